//! Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
//! Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "levyfield/bench.hpp"
#include "levyfield/invert.hpp"
#include "levyfield/model.hpp"
#include "levyfield/onb.hpp"
#include "levyfield/rng.hpp"
#include "levyfield/smooth.hpp"
#include "support/oracles.hpp"

using namespace levyfield;
namespace fs = std::filesystem;

namespace {

int failures = 0;
auto started = std::chrono::steady_clock::now();

void detail_line(char const* fmt, auto... args)
{
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

void verdict(int n, bool ok, char const* what)
{
  auto now = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(now - started).count();
  started = now;
  std::printf("criterion %d: %s  %s (%.0f s)\n", n, ok ? "PASS" : "FAIL", what, secs);
  std::fflush(stdout);
  failures += !ok;
}

SimpleKernel benchmark_kernel()
{
  return SimpleKernel({1.3, 0.2, 0.1, 0.1}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

double g0_gauss(double x) { return x * oracle::std_normal(x); }

double smooth_g1(double x) { return std::exp(-0.3 * x * x) * (1.0 + 0.5 * x) + 0.2 * x / (1.0 + x * x); }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

void table_reproduction()
{
  struct Cell
  {
    char const* law;
    Method method;
    double reference;
    double factor;
  };
  std::vector<Cell> cells{{"gaussian", Method::fourier, 5.609e-4, 3.0},
                          {"gaussian", Method::plugin, 5.292e-3, 3.0},
                          {"gaussian", Method::onb, 2.258e-2, 3.0},
                          {"exponential", Method::plugin, 0.1241, 2.0},
                          {"exponential", Method::fourier, 0.1307, 2.0},
                          {"exponential", Method::onb, 0.1447, 2.0}};
  bool ok = true;
  std::vector<std::string> lines;
  for (auto const& c : cells)
  {
    ExperimentConfig cfg;
    cfg.jump_law.kind = c.law;
    cfg.method = c.method;
    auto r = run_bench(cfg, 20, worker_count());
    bool in = r.mean >= c.reference / c.factor && r.mean <= c.reference * c.factor;
    ok = ok && in;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-11s %-7s mean %.4g sd %.3g  band [%.4g, %.4g]  %s", c.law,
                  to_string(c.method).c_str(), r.mean, r.sd, c.reference / c.factor,
                  c.reference * c.factor, in ? "in" : "OUT");
    lines.push_back(buf);
  }
  verdict(1, ok, "mean MSE over 20 replications within the reference bands");
  for (auto const& l : lines)
    detail_line("%s", l.c_str());
}

void contraction_arithmetic()
{
  WeightH h(1.0, true);
  double e = contraction_factor(benchmark_kernel(), h).e_factor;
  double hand = std::sqrt(0.2 / 1.3) + 2.0 * std::sqrt(0.1 / 1.3);
  double ref = oracle::contraction({1.3, 0.2, 0.1, 0.1}, 0, 1.0);
  auto pm = contraction_factor(SimpleKernel({1.0, -1.0}), h);
  bool ok = std::abs(e - 0.946932) <= 1e-6 && std::abs(e - hand) <= 1e-12 && std::abs(e - ref) <= 1e-12
            && !pm.satisfied;
  verdict(2, ok, "contraction factor of the benchmark kernel and the (1,-1) odd-weight case");
  detail_line("e = %.9f (hand %.9f, target 0.946932 +- 1e-6)", e, hand);
  detail_line("(1,-1): e = %.3g, satisfied = %s", pm.e_factor, pm.satisfied ? "yes" : "no");
}

void fixed_point()
{
  SimpleKernel kernel({1.0, 0.1});
  WeightH h(1.0, true);
  int n_N = 10;
  double e = contraction_factor(kernel, h).e_factor;
  double tol = std::pow(e, n_N + 1) / (1.0 - e) + 2e-3;
  auto v1 = forward_levy_density(kernel, oracle::std_normal);
  auto g1 = [&](double x) { return x * v1(x); };
  auto xg = Grid1D::cells(-6.0, 6.0, 2048);
  auto P = plugin_estimate(g1, kernel, h, n_N, xg);
  auto G0 = GridFunction::sample(xg, g0_gauss);
  double rel = l2_distance(P, G0) / l2_norm(G0);
  auto fwd = forward_operator([&](double x) { return P(x); }, kernel, h);
  auto FP = GridFunction::sample(xg, fwd), G1 = GridFunction::sample(xg, g1);
  double resid = l2_distance(FP, G1) / l2_norm(G1);
  verdict(3, rel < tol && resid < tol, "plug-in inverts an exact forward image");
  detail_line("e = %.4f, tolerance e^11/(1-e) + 2e-3 = %.4g", e, tol);
  detail_line("relative error %.3g, forward residual %.3g", rel, resid);
}

void series_grouping()
{
  Stream rng(derive_seed(4, 0));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial)
  {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 5);
    std::vector<double> f(n);
    for (auto& v : f)
      v = (rng.uniform() < 0.3 ? -1.0 : 1.0) * (0.1 + 2.0 * rng.uniform());
    if (n >= 3 && rng.uniform() < 0.5)
      f[2] = f[1];
    if (n >= 2 && rng.uniform() < 0.3)
      f[1] = f[0];
    double beta = std::floor(3.0 * rng.uniform());
    bool is_signed = rng.uniform() < 0.5;
    int n_N = static_cast<int>(rng.uniform() * 7);
    WeightH h(beta, is_signed);
    auto plan = build_series_plan(SimpleKernel(f), h, n_N);
    double x = 4.0 * rng.uniform() - 2.0;
    double raw = oracle::raw_series(f, 0, beta, is_signed, n_N, smooth_g1, x);
    double got = evaluate_series(plan, h, smooth_g1, x);
    worst = std::max(worst, std::abs(got - raw) / std::max(1.0, std::abs(raw)));
  }
  verdict(4, worst <= 1e-14, "grouped and raw series agree on 100 random kernels");
  detail_line("worst relative difference %.3g (tolerance 1e-14)", worst);
}

void onb_structure()
{
  HaarBasis b(6.0, 2, 7, 2048);
  WeightH h(1.0, true);
  auto kernel = benchmark_kernel();
  auto s = build_eta(b, kernel, h);
  double e = oracle::contraction({1.3, 0.2, 0.1, 0.1}, 0, 1.0);
  double lower = 1.0 / 1.3 * (1.0 - e) - 1e-8;
  double ortho = 0.0, below = 0.0, min_diag = INFINITY;
  for (std::size_t j = 0; j < b.m(); ++j)
  {
    min_diag = std::min(min_diag, s.mix[j][j]);
    for (std::size_t i = 0; i < b.m(); ++i)
    {
      ortho = std::max(ortho, std::abs(inner(s.e_basis[i], s.e_basis[j]) - (i == j ? 1.0 : 0.0)));
      if (i < j)
        below = std::max(below, std::abs(inner(s.eta[i], s.e_basis[j])));
    }
  }

  std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.4, 0.25, 0.05};
  auto truth = onb_estimate(x, b);
  auto xr = solve_coefficients(project_g1bar(forward_operator([&](double t) { return truth(t); }, kernel, h), h, s), s);
  double recov = 0.0;
  auto back = onb_estimate(xr, b);
  for (std::size_t i = 0; i < truth.grid().n(); ++i)
    recov = std::max(recov, std::abs(back[i] - truth[i]));

  Stream rng(derive_seed(5, 0));
  EtaSystem t = s;
  double round = 0.0;
  for (int trial = 0; trial < 20; ++trial)
  {
    for (std::size_t j = 0; j < 7; ++j)
      for (std::size_t i = 0; i < 7; ++i)
        t.mix[j][i] = i < j ? 0.0 : (i == j ? 0.5 + rng.uniform() : 2.0 * rng.uniform() - 1.0);
    std::vector<double> z(7), bz(7, 0.0);
    for (auto& v : z)
      v = 2.0 * rng.uniform() - 1.0;
    for (std::size_t j = 0; j < 7; ++j)
      for (std::size_t i = j; i < 7; ++i)
        bz[j] += t.mix[j][i] * z[i];
    auto r = solve_coefficients(bz, t);
    for (std::size_t i = 0; i < 7; ++i)
      round = std::max(round, std::abs(r[i] - z[i]));
  }

  bool ok = ortho <= 1e-10 && below <= 1e-10 && min_diag >= lower && recov <= 1e-8 && round <= 1e-12;
  verdict(5, ok, "orthonormal-basis structure");
  detail_line("orthonormality %.3g, below-diagonal %.3g, min diagonal %.4g >= %.4g", ortho, below,
              min_diag, lower);
  detail_line("in-span recovery %.3g, triangular round trip %.3g", recov, round);
}

void ecf_error_rates()
{
  ExperimentConfig c;
  std::vector<double> N{1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4};
  auto r = validate_appendix_rates(c, N, 400);
  bool ok = std::abs(r.slope_psi + 1.0) <= 0.15 && std::abs(r.slope_theta + 2.0) <= 0.2;
  verdict(6, ok, "error rates of the empirical characteristic function on the benchmark field");
  detail_line("slope of E|psi_hat - psi|^2: %.3f (target -1 +- 0.15)", r.slope_psi);
  detail_line("slope of E|theta_hat - theta|^4: %.3f (target -2 +- 0.2)", r.slope_theta);
}

void smoothing_kernels()
{
  bool ok = true;
  std::vector<std::string> lines;
  char buf[200];
  std::vector<double> bs{0.1, 0.2, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> xs;
  for (int i = -4000; i <= 4000; ++i)
    xs.push_back(0.01 * i);
  using GL = boost::math::quadrature::gauss<double, 30>;
  for (auto fam : {KernelFamily::gaussian, KernelFamily::epanechnikov, KernelFamily::bandlimited})
  {
    double worst_mass = 0.0, worst_ft = 0.0, worst_k3 = 0.0;
    bool nonneg = true;
    for (double b : bs)
    {
      SmoothingKernel k(fam, b);
      bool bl = fam == KernelFamily::bandlimited;
      double X = bl ? 4000.0 * b : k.reach();
      double w = bl ? b : std::min(1.0, b / 4.0);
      double mass = 0.0;
      for (double a = -X; a < X - 1e-12; a += w)
        mass += GL::integrate([&](double t) { return k(t); }, a, std::min(a + w, X));
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      for (double x : xs)
      {
        nonneg = nonneg && k(x) >= 0.0;
        worst_ft = std::max(worst_ft, std::abs(k.fourier(x)) - k.C_K());
        worst_k3 = std::max(worst_k3, std::abs(1.0 - k.fourier(x)) - k.c1() * std::min(1.0, b * std::abs(x)));
      }
    }
    auto fit = check_k3(fam, bs, xs);
    bool fam_ok = worst_mass <= 1e-8 && nonneg && worst_ft <= 1e-15 && worst_k3 <= 1e-12 && fit.holds;
    if (fam == KernelFamily::gaussian)
      fam_ok = fam_ok && fit.c1 <= 2.0;
    if (fam == KernelFamily::bandlimited)
      fam_ok = fam_ok && SmoothingKernel(fam, 1.0).c1() == std::max(1.0, SmoothingKernel(fam, 1.0).lipschitz());
    ok = ok && fam_ok;
    std::snprintf(buf, sizeof buf, "%-12s mass error %.2g, fitted c1 %.4g, %s", to_string(fam).c_str(),
                  worst_mass, fit.c1, fam_ok ? "ok" : "violated");
    lines.push_back(buf);
  }

  std::vector<double> b_log;
  for (int i = 0; i <= 20; ++i)
    b_log.push_back(std::pow(10.0, -3.0 + 0.1 * i));
  for (double delta : {1.0, 1.5, 2.0, 2.5})
  {
    std::vector<double> a;
    for (double b : b_log)
      a.push_back(a_delta(b, delta, 2.0));
    double slope = loglog_slope(b_log, a);
    double target = std::min(1.0, (2.0 * delta - 1.0) / 4.0);
    bool in = delta == 2.5 ? slope >= 0.9 && slope <= 1.1 : std::abs(slope - target) <= 0.1;
    ok = ok && in;
    std::snprintf(buf, sizeof buf, "a_delta slope at delta %.1f: %.3f (target %.3f)", delta, slope, target);
    lines.push_back(buf);
  }
  verdict(7, ok, "smoothing-kernel conditions and the a_delta rate");
  for (auto const& l : lines)
    detail_line("%s", l.c_str());
}

void drift_recovery()
{
  Stream rng(derive_seed(8, 0));
  double worst = 0.0;
  int done = 0;
  while (done < 50)
  {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    std::vector<double> f(n), nu(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      f[i] = (rng.uniform() < 0.4 ? -1.0 : 1.0) * (0.1 + 2.0 * rng.uniform());
      nu[i] = 0.2 + rng.uniform();
    }
    SimpleKernel k(f, {}, nu);
    if (std::abs(k.sum_f_nu()) < 1e-3)
      continue;
    auto law = done % 2 == 0 ? JumpLaw::gaussian(0.3 * rng.normal(), 0.5 + rng.uniform())
                             : JumpLaw::exponential(0.5 + 2.0 * rng.uniform());
    double a0 = 2.0 * rng.uniform() - 1.0, b0 = 2.0 * rng.uniform();
    auto r = recover_a0_b0(k, forward_drift(k, a0, law), forward_gaussian(k, b0), law);
    worst = std::max({worst, std::abs(r.a0 - a0), std::abs(r.b0 - b0)});
    ++done;
  }
  bool singular = false;
  try
  {
    recover_a0_b0(SimpleKernel({1.0, -1.0}), 0.0, 1.0, JumpLaw::gaussian(0.0, 1.0));
  }
  catch (SingularRecovery const&)
  {
    singular = true;
  }
  verdict(8, worst <= 1e-8 && singular, "drift and Gaussian variance recovery");
  detail_line("worst error over 50 kernels %.3g; (1,-1) rejected: %s", worst, singular ? "yes" : "no");
}

int run_cli(std::string const& args)
{
  std::string cmd = std::string("\"") + LEVYFIELD_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

void determinism()
{
  auto dir = fs::temp_directory_path() / "levyfield_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = (dir / "config.json").string();
  auto c = ExperimentConfig{};
  write_text(cfg, to_json(c).dump(2));
  auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string(), d = (dir / "c.csv").string();
  int ra = run_cli("bench --config " + cfg + " --reps 4 --threads 1 --out " + a);
  int rb = run_cli("bench --config " + cfg + " --reps 4 --threads 1 --out " + b);
  int rc = run_cli("bench --config " + cfg + " --reps 4 --threads 4 --out " + d);
  bool ok = ra == 0 && rb == 0 && rc == 0;
  bool same = false;
  if (ok)
  {
    auto ta = read_text(a);
    same = ta == read_text(b) && ta == read_text(d) && !ta.empty();
  }
  verdict(9, ok && same, "bench CSVs are byte-identical across reruns and worker counts");
  detail_line("exit codes %d %d %d; identical: %s", ra, rb, rc, same ? "yes" : "no");
}

} // namespace

int main()
{
  table_reproduction();
  contraction_arithmetic();
  fixed_point();
  series_grouping();
  onb_structure();
  ecf_error_rates();
  smoothing_kernels();
  drift_recovery();
  determinism();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
