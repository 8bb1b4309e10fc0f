#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "invert.hpp"
#include "model.hpp"
#include "smooth.hpp"

namespace levyfield {

enum class Method { plugin, fourier, onb };

inline std::string to_string(Method m)
{
  switch (m)
  {
    case Method::plugin: return "plugin";
    case Method::fourier: return "fourier";
    case Method::onb: return "onb";
  }
  return "?";
}

inline Method parse_method(std::string const& s)
{
  if (s == "plugin")
    return Method::plugin;
  if (s == "fourier")
    return Method::fourier;
  if (s == "onb")
    return Method::onb;
  throw ConfigError("unknown method '" + s + "' (expected plugin, fourier or onb)");
}

struct JumpLawSpec
{
  std::string kind = "gaussian";
  double mean = 0.0;
  double sd = 1.0;
  double rate = 1.0;
  double mass = 1.0;
  double table_lo = 0.0;
  double table_hi = 0.0;
  std::vector<double> table;

  JumpLaw build() const
  {
    if (kind == "gaussian")
      return JumpLaw::gaussian(mean, sd, mass);
    if (kind == "exponential")
      return JumpLaw::exponential(rate, mass);
    if (kind == "tabulated")
      return JumpLaw::tabulated(
        GridFunction(Grid1D::trapezoid(table_lo, table_hi, table.size()), table));
    throw ConfigError("unknown jump_law kind '" + kind + "'");
  }
};

//! Bandwidth setting: a fixed value, "auto" (select_bandwidth) or "none".
struct BandwidthSpec
{
  enum class Mode { fixed, automatic, none } mode = Mode::fixed;
  double value = 0.0;
};

//! Every knob of one experiment. Optional fields fall back to per-method
//! defaults in resolved_l() and resolved_bandwidth().
struct ExperimentConfig
{
  int d = 2;
  std::vector<double> coeffs{1.3, 0.2, 0.1, 0.1};
  std::vector<std::vector<long>> offsets{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<double> volumes{1.0, 1.0, 1.0, 1.0};
  std::optional<std::size_t> pivot;  //!< empty: smallest contraction factor
  JumpLawSpec jump_law;
  std::vector<long> window{100, 100};
  long mesh = 1;
  Method method = Method::plugin;
  double beta = 1.0;
  bool signed_h = true;
  int n_N = 1;
  std::optional<double> l;
  double A = 6.0;
  std::size_t grid_points = 2048;
  std::size_t u_points = 4097;
  std::optional<BandwidthSpec> bandwidth;
  KernelFamily smoothing_kernel = KernelFamily::epanechnikov;
  int haar_levels = 2;
  std::size_t m = 7;
  int reps = 20;
  std::uint64_t master_seed = 20170601;
  bool oracle_g1 = false;

  WeightH weight() const { return WeightH(beta, signed_h); }

  SimpleKernel kernel() const
  {
    SimpleKernel k(coeffs, offsets, volumes);
    if (pivot)
    {
      if (*pivot >= coeffs.size())
        throw ConfigError("kernel.pivot is out of range");
      return k.with_pivot(*pivot);
    }
    return choose_pivot(k, weight());
  }

  JumpLaw law() const { return jump_law.build(); }

  double resolved_l() const
  {
    if (l)
      return *l;
    if (method != Method::onb)
      return 1.0;
    return jump_law.kind == "exponential" ? 4.0 : 4.5;
  }

  BandwidthSpec resolved_bandwidth() const
  {
    if (bandwidth)
      return *bandwidth;
    bool expo = jump_law.kind == "exponential";
    if (method == Method::onb)
      return {BandwidthSpec::Mode::fixed, expo ? 1.1 : 0.7};
    return {BandwidthSpec::Mode::fixed, expo ? 1.0 : 0.5};
  }
};

namespace detail {

inline void reject_unknown(nlohmann::json const& j, std::set<std::string> const& allowed,
                           std::string const& where)
{
  if (!j.is_object())
    throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template<class T>
T get_as(nlohmann::json const& j, std::string const& key)
{
  try
  {
    return j.at(key).get<T>();
  }
  catch (nlohmann::json::exception const& e)
  {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

inline KernelFamily parse_family(std::string const& s)
{
  if (s == "gaussian")
    return KernelFamily::gaussian;
  if (s == "epanechnikov")
    return KernelFamily::epanechnikov;
  if (s == "bandlimited")
    return KernelFamily::bandlimited;
  throw ConfigError("unknown smoothing_kernel '" + s + "'");
}

} // namespace detail

//! Range checks beyond the schema; surfaces model errors as ConfigError.
inline void validate_config(ExperimentConfig const& c)
{
  auto fail = [](std::string const& m) { throw ConfigError(m); };
  if (c.d < 1)
    fail("d must be at least 1");
  if (c.window.size() != static_cast<std::size_t>(c.d))
    fail("window must list one extent per dimension");
  for (auto const& o : c.offsets)
    if (o.size() != static_cast<std::size_t>(c.d))
      fail("kernel offsets must have d components");
  if (c.mesh < 1)
    fail("mesh must be a positive integer");
  if (c.n_N < 0)
    fail("n_N must be nonnegative");
  if (c.l && !(*c.l > 0.0))
    fail("l must be positive");
  if (!(c.A > 0.0))
    fail("A must be positive");
  if (c.grid_points < 2 || c.u_points < 3)
    fail("grid_points and u_points are too small");
  if (c.reps < 1)
    fail("reps must be positive");
  if (c.bandwidth && c.bandwidth->mode == BandwidthSpec::Mode::fixed && !(c.bandwidth->value > 0.0))
    fail("bandwidth must be positive");
  try
  {
    (void)c.kernel();
    (void)c.law();
  }
  catch (ConfigError const&)
  {
    throw;
  }
  catch (Error const& e)
  {
    throw ConfigError(e.what());
  }
}

inline ExperimentConfig parse_config(nlohmann::json const& j)
{
  using detail::get_as;
  detail::reject_unknown(j,
                         {"d", "kernel", "jump_law", "window", "mesh", "method", "beta", "signed_h",
                          "n_N", "l", "A", "grid_points", "u_points", "bandwidth",
                          "smoothing_kernel", "haar_levels", "m", "reps", "master_seed",
                          "oracle_g1"},
                         "config");
  ExperimentConfig c;
  if (j.contains("d"))
    c.d = get_as<int>(j, "d");
  if (j.contains("kernel"))
  {
    auto const& k = j.at("kernel");
    detail::reject_unknown(k, {"coeffs", "offsets", "volumes", "pivot"}, "kernel");
    c.coeffs = get_as<std::vector<double>>(k, "coeffs");
    if (k.contains("offsets"))
      c.offsets = get_as<std::vector<std::vector<long>>>(k, "offsets");
    else
    {
      c.offsets.clear();
      for (std::size_t i = 0; i < c.coeffs.size(); ++i)
      {
        std::vector<long> o(static_cast<std::size_t>(std::max(c.d, 1)), 0);
        o.back() = static_cast<long>(i);
        c.offsets.push_back(o);
      }
    }
    c.volumes = k.contains("volumes") ? get_as<std::vector<double>>(k, "volumes")
                                      : std::vector<double>(c.coeffs.size(), 1.0);
    if (k.contains("pivot") && !(k.at("pivot").is_string() && k.at("pivot") == "auto"))
      c.pivot = get_as<std::size_t>(k, "pivot");
  }
  if (j.contains("jump_law"))
  {
    auto const& v = j.at("jump_law");
    detail::reject_unknown(v, {"kind", "mean", "sd", "rate", "mass", "lo", "hi", "values"},
                           "jump_law");
    c.jump_law.kind = get_as<std::string>(v, "kind");
    if (v.contains("mean"))
      c.jump_law.mean = get_as<double>(v, "mean");
    if (v.contains("sd"))
      c.jump_law.sd = get_as<double>(v, "sd");
    if (v.contains("rate"))
      c.jump_law.rate = get_as<double>(v, "rate");
    if (v.contains("mass"))
      c.jump_law.mass = get_as<double>(v, "mass");
    if (c.jump_law.kind == "tabulated")
    {
      c.jump_law.table_lo = get_as<double>(v, "lo");
      c.jump_law.table_hi = get_as<double>(v, "hi");
      c.jump_law.table = get_as<std::vector<double>>(v, "values");
    }
  }
  if (j.contains("window"))
    c.window = get_as<std::vector<long>>(j, "window");
  if (j.contains("mesh"))
  {
    auto const& mj = j.at("mesh");
    if (!mj.is_number_integer() && !(mj.is_number() && mj.get<double>() == std::floor(mj.get<double>())))
      throw ConfigError("mesh must be a positive integer");
    c.mesh = static_cast<long>(mj.get<double>());
  }
  if (j.contains("method"))
    c.method = parse_method(get_as<std::string>(j, "method"));
  if (j.contains("beta"))
    c.beta = get_as<double>(j, "beta");
  if (j.contains("signed_h"))
    c.signed_h = get_as<bool>(j, "signed_h");
  if (j.contains("n_N"))
    c.n_N = get_as<int>(j, "n_N");
  if (j.contains("l"))
    c.l = get_as<double>(j, "l");
  if (j.contains("A"))
    c.A = get_as<double>(j, "A");
  if (j.contains("grid_points"))
    c.grid_points = get_as<std::size_t>(j, "grid_points");
  if (j.contains("u_points"))
    c.u_points = get_as<std::size_t>(j, "u_points");
  if (j.contains("bandwidth"))
  {
    auto const& b = j.at("bandwidth");
    if (b.is_string())
    {
      auto s = b.get<std::string>();
      if (s == "auto")
        c.bandwidth = BandwidthSpec{BandwidthSpec::Mode::automatic, 0.0};
      else if (s == "none")
        c.bandwidth = BandwidthSpec{BandwidthSpec::Mode::none, 0.0};
      else
        throw ConfigError("bandwidth must be a number, \"auto\" or \"none\"");
    }
    else
      c.bandwidth = BandwidthSpec{BandwidthSpec::Mode::fixed, get_as<double>(j, "bandwidth")};
  }
  if (j.contains("smoothing_kernel"))
    c.smoothing_kernel = detail::parse_family(get_as<std::string>(j, "smoothing_kernel"));
  if (j.contains("haar_levels"))
    c.haar_levels = get_as<int>(j, "haar_levels");
  if (j.contains("m"))
    c.m = get_as<std::size_t>(j, "m");
  if (j.contains("reps"))
    c.reps = get_as<int>(j, "reps");
  if (j.contains("master_seed"))
    c.master_seed = get_as<std::uint64_t>(j, "master_seed");
  if (j.contains("oracle_g1"))
    c.oracle_g1 = get_as<bool>(j, "oracle_g1");
  validate_config(c);
  return c;
}

//! Canonical JSON form; parse_config(to_json(c)) reproduces c.
inline nlohmann::json to_json(ExperimentConfig const& c)
{
  nlohmann::json j;
  j["d"] = c.d;
  j["kernel"] = {{"coeffs", c.coeffs}, {"offsets", c.offsets}, {"volumes", c.volumes}};
  if (c.pivot)
    j["kernel"]["pivot"] = *c.pivot;
  else
    j["kernel"]["pivot"] = "auto";
  nlohmann::json v{{"kind", c.jump_law.kind}, {"mass", c.jump_law.mass}};
  if (c.jump_law.kind == "gaussian")
  {
    v["mean"] = c.jump_law.mean;
    v["sd"] = c.jump_law.sd;
  }
  else if (c.jump_law.kind == "exponential")
    v["rate"] = c.jump_law.rate;
  else
  {
    v.erase("mass");
    v["lo"] = c.jump_law.table_lo;
    v["hi"] = c.jump_law.table_hi;
    v["values"] = c.jump_law.table;
  }
  j["jump_law"] = v;
  j["window"] = c.window;
  j["mesh"] = c.mesh;
  j["method"] = to_string(c.method);
  j["beta"] = c.beta;
  j["signed_h"] = c.signed_h;
  j["n_N"] = c.n_N;
  if (c.l)
    j["l"] = *c.l;
  j["A"] = c.A;
  j["grid_points"] = c.grid_points;
  j["u_points"] = c.u_points;
  if (c.bandwidth)
  {
    switch (c.bandwidth->mode)
    {
      case BandwidthSpec::Mode::fixed: j["bandwidth"] = c.bandwidth->value; break;
      case BandwidthSpec::Mode::automatic: j["bandwidth"] = "auto"; break;
      case BandwidthSpec::Mode::none: j["bandwidth"] = "none"; break;
    }
  }
  j["smoothing_kernel"] = to_string(c.smoothing_kernel);
  j["haar_levels"] = c.haar_levels;
  j["m"] = c.m;
  j["reps"] = c.reps;
  j["master_seed"] = c.master_seed;
  j["oracle_g1"] = c.oracle_g1;
  return j;
}

} // namespace levyfield
