// Command line front end: simulate, estimate, bench and validate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/sha.h>

#include "levyfield/bench.hpp"
#include "levyfield/config.hpp"
#include "levyfield/io.hpp"
#include "levyfield/validate.hpp"

namespace lf = levyfield;

namespace {

enum Exit { ok = 0, config_error = 2, numeric_error = 3, io_error = 4 };

// Object id git assigns to a blob with these contents.
std::string git_blob_sha1(std::string const& data)
{
  std::string blob = "blob " + std::to_string(data.size()) + '\0' + data;
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<unsigned char const*>(blob.data()), blob.size(), md);
  static char const* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : md)
  {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

struct LoadedConfig
{
  lf::ExperimentConfig cfg;
  nlohmann::json raw;
  std::string text;
};

LoadedConfig load_config(std::string const& path)
{
  LoadedConfig lc;
  if (path.empty())
  {
    lc.raw = nlohmann::json::object();
    lc.text = "{}";
  }
  else
  {
    lc.text = lf::read_text(path);
    try
    {
      lc.raw = nlohmann::json::parse(lc.text);
    }
    catch (nlohmann::json::parse_error const& e)
    {
      throw lf::ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
  }
  lc.cfg = lf::parse_config(lc.raw);
  return lc;
}

void write_manifest(std::string const& out_path, lf::ExperimentConfig const& cfg,
                    std::vector<std::pair<std::string, std::string>> const& inputs,
                    std::vector<std::uint64_t> const& reps, std::uint64_t master)
{
  nlohmann::json m;
  m["config"] = lf::to_json(cfg);
  m["master_seed"] = master;
  nlohmann::json seeds = nlohmann::json::array();
  for (auto r : reps)
    seeds.push_back({{"replication", r}, {"stream_seed", lf::derive_seed(master, r)}});
  m["seeds"] = seeds;
  nlohmann::json hashes = nlohmann::json::object();
  for (auto const& [name, data] : inputs)
    hashes[name] = git_blob_sha1(data);
  m["input_hashes"] = hashes;
  m["outputs"] = {{"path", out_path}, {"sha1", git_blob_sha1(lf::read_text(out_path))}};
  lf::write_text(out_path + ".manifest.json", m.dump(2) + "\n");
}

void print_suite(lf::SuiteReport const& s)
{
  for (auto const& c : s.checks)
    std::printf("%s  %-48s %-12.6g %s %.6g\n", c.pass() ? "ok  " : "FAIL", c.name.c_str(), c.value,
                c.at_least ? ">=" : "<=", c.limit);
  for (auto const& n : s.notes)
    std::printf("      %s\n", n.c_str());
  std::printf("suite %s: %s\n", s.suite.c_str(), s.pass() ? "passed" : "FAILED");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Levy density estimation for moving-average random fields"};
  app.require_subcommand(1);

  std::string config_path, out_path, sample_path, method, suite;
  std::uint64_t seed = 0;
  std::uint64_t rep = 0;
  int reps = 0;
  unsigned threads = 1;
  bool timing = false;

  auto* sim = app.add_subcommand("simulate", "Simulate one field sample");
  sim->add_option("--config", config_path, "Experiment config (JSON)");
  sim->add_option("--seed", seed, "Master seed")->required();
  sim->add_option("--rep", rep, "Replication index");
  sim->add_option("--out", out_path, "Sample CSV")->required();

  auto* est = app.add_subcommand("estimate", "Estimate g0 = x v0(x) from a sample");
  est->add_option("--method", method, "plugin, fourier or onb")
    ->check(CLI::IsMember({"plugin", "fourier", "onb"}));
  est->add_option("--sample", sample_path, "Sample CSV")->required();
  est->add_option("--config", config_path, "Experiment config (JSON)");
  est->add_option("--out", out_path, "Estimate CSV")->required();

  auto* bench = app.add_subcommand("bench", "Monte Carlo MSE over replications");
  bench->add_option("--config", config_path, "Experiment config (JSON)");
  bench->add_option("--reps", reps, "Replications (default: config reps)");
  bench->add_option("--threads", threads, "Worker threads, 0 for all cores");
  bench->add_flag("--timing", timing, "Record wall-clock runtimes in the CSV");
  bench->add_option("--out", out_path, "Results CSV")->required();

  auto* val = app.add_subcommand("validate", "Run a diagnostic suite");
  val->add_option("--suite", suite, "Suite name")
    ->required()
    ->check(CLI::IsMember({"appendix-rates", "kernels", "fixed-point", "onb"}));
  val->add_option("--config", config_path, "Experiment config (JSON)");
  val->add_option("--reps", reps, "Replications for appendix-rates");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const& e)
  {
    int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::config_error;
  }

  try
  {
    if (*sim)
    {
      auto lc = load_config(config_path);
      auto s = lf::sample_field(lc.cfg.kernel(), lc.cfg.law(), lc.cfg.window,
                                lf::SeedSpec{seed, rep}, lc.cfg.mesh);
      lf::write_sample_csv(out_path, s);
      write_manifest(out_path, lc.cfg, {{"config", lc.text}}, {rep}, seed);
      std::printf("wrote %zu observations to %s\n", s.N(), out_path.c_str());
    }
    else if (*est)
    {
      auto lc = load_config(config_path);
      if (!method.empty())
        lc.cfg.method = lf::parse_method(method);
      auto sample = lf::read_sample_csv(sample_path);
      auto r = lf::estimate_from_sample(lc.cfg, sample.values);
      if (lc.raw.contains("jump_law"))
      {
        auto truth = lf::true_g0(lc.cfg);
        lf::write_estimate_csv(out_path, r.g0_hat, &truth);
        double d = lf::l2_distance(r.g0_hat, truth);
        std::printf("mse %.6g\n", d * d);
      }
      else
        lf::write_estimate_csv(out_path, r.g0_hat);
      write_manifest(out_path, lc.cfg,
                     {{"config", lc.text}, {"sample", lf::read_text(sample_path)}}, {}, 0);
      std::printf("method %s, l = %g%s\n", lf::to_string(lc.cfg.method).c_str(), r.l,
                  r.bandwidth ? (", b = " + lf::format_double(*r.bandwidth)).c_str() : "");
    }
    else if (*bench)
    {
      auto lc = load_config(config_path);
      int n = reps > 0 ? reps : lc.cfg.reps;
      auto b = lf::run_bench(lc.cfg, n, threads);
      lf::write_results_csv(out_path, {b}, timing);
      std::vector<std::uint64_t> ids;
      for (auto const& r : b.records)
        ids.push_back(r.rep);
      write_manifest(out_path, lc.cfg, {{"config", lc.text}}, ids, lc.cfg.master_seed);
      std::printf("%s/%s: mean mse %.6g, sd %.6g over %d replications\n", b.method.c_str(),
                  b.law.c_str(), b.mean, b.sd, n);
    }
    else if (*val)
    {
      lf::SuiteReport s;
      if (suite == "appendix-rates")
        s = lf::suite_appendix_rates(load_config(config_path).cfg, reps > 0 ? reps : 400);
      else if (suite == "kernels")
        s = lf::suite_kernels();
      else if (suite == "fixed-point")
        s = lf::suite_fixed_point();
      else
        s = lf::suite_onb();
      print_suite(s);
      return s.pass() ? Exit::ok : Exit::numeric_error;
    }
  }
  catch (lf::ConfigError const& e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config_error;
  }
  catch (lf::IoError const& e)
  {
    std::cerr << "i/o error: " << e.what() << '\n';
    return Exit::io_error;
  }
  catch (lf::Error const& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::numeric_error;
  }
  return Exit::ok;
}
