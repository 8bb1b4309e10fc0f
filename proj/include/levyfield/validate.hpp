#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bench.hpp"
#include "invert.hpp"
#include "model.hpp"
#include "numcore.hpp"
#include "onb.hpp"
#include "rng.hpp"
#include "smooth.hpp"

namespace levyfield {

//! One named diagnostic: pass when value <= limit (or >= limit when
//! `at_least` is set).
struct Check
{
  std::string name;
  double value;
  double limit;
  bool at_least = false;

  bool pass() const { return at_least ? value >= limit : value <= limit; }
};

struct SuiteReport
{
  std::string suite;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool pass() const
  {
    for (auto const& c : checks)
      if (!c.pass())
        return false;
    return true;
  }
};

inline SuiteReport suite_appendix_rates(ExperimentConfig const& c, int reps = 400)
{
  auto r = validate_appendix_rates(c, {1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4}, reps);
  SuiteReport s{"appendix-rates", {}, {}};
  s.checks.push_back({"|slope E|psi_hat-psi|^2 + 1|", std::abs(r.slope_psi + 1.0), 0.15});
  s.checks.push_back({"|slope E|theta_hat-theta|^4 + 2|", std::abs(r.slope_theta + 2.0), 0.2});
  s.notes.push_back("slope psi = " + format_double(r.slope_psi) + ", slope theta = "
                    + format_double(r.slope_theta));
  if (!r.warning.empty())
    s.notes.push_back(r.warning);
  return s;
}

inline SuiteReport suite_kernels()
{
  SuiteReport s{"kernels", {}, {}};
  std::vector<double> bs, xs;
  for (int i = 1; i <= 20; ++i)
    bs.push_back(0.1 * i);
  for (int i = -2000; i <= 2000; ++i)
    xs.push_back(0.01 * i);
  for (auto fam : {KernelFamily::gaussian, KernelFamily::epanechnikov, KernelFamily::bandlimited})
  {
    std::string n = to_string(fam);
    double mass_err = 0.0, neg = 0.0, over = 0.0;
    for (double b : {0.1, 0.5, 1.0, 2.0})
    {
      SmoothingKernel k(fam, b);
      double lim = fam == KernelFamily::bandlimited ? 4000.0 * b : 12.0 * b;
      double m = integrate([&](double x) { return k(x); }, -lim, lim, 4000);
      mass_err = std::max(mass_err, std::abs(m - 1.0));
      for (double x : xs)
      {
        neg = std::max(neg, -k(x));
        over = std::max(over, std::abs(k.fourier(x)) - k.C_K());
      }
    }
    auto k3 = check_k3(fam, bs, xs);
    s.checks.push_back({n + ": |int K_b - 1|", mass_err, 1e-6});
    s.checks.push_back({n + ": max(-K_b)", neg, 0.0});
    s.checks.push_back({n + ": max |F K_b| - C_K", over, 1e-12});
    s.checks.push_back({n + ": fitted c1 - c1", k3.c1 - SmoothingKernel(fam, 1.0).c1(), 1e-9});
  }
  std::vector<double> bgrid;
  for (int i = 0; i <= 8; ++i)
    bgrid.push_back(1e-3 * std::pow(100.0, i / 8.0));
  for (double delta : {1.0, 1.5, 2.0, 2.5})
  {
    std::vector<double> a;
    for (double b : bgrid)
      a.push_back(a_delta(b, delta, 2.0));
    double slope = loglog_slope(bgrid, a);
    double target = std::min(1.0, (2.0 * delta - 1.0) / 4.0);
    if (delta == 2.5)
    {
      s.checks.push_back({"a_delta exponent (delta=2.5) >= 0.9", slope, 0.9, true});
      s.checks.push_back({"a_delta exponent (delta=2.5) <= 1.1", slope, 1.1});
    }
    else
      s.checks.push_back({"|a_delta slope - rate| (delta=" + format_double(delta) + ")",
                          std::abs(slope - target), 0.1});
  }
  return s;
}

//! Plug-in inversion of an exact g1 for the kernel (1.0, 0.1), beta = 1,
//! n_N = 10, with g0 = x phi(x).
inline SuiteReport suite_fixed_point()
{
  SuiteReport s{"fixed-point", {}, {}};
  SimpleKernel kernel({1.0, 0.1});
  WeightH h(1.0, true);
  int n_N = 10;
  auto law = JumpLaw::gaussian(0.0, 1.0);
  auto g0 = [&](double x) { return x * law.levy_density(x); };
  auto v1 = forward_levy_density(kernel, [&](double x) { return law.levy_density(x); });
  auto g1 = [&](double x) { return x * v1(x); };
  double e = contraction_factor(kernel, h).e_factor;
  double tol = std::pow(e, n_N + 1) / (1.0 - e) + 2e-3;

  auto xg = Grid1D::cells(-6.0, 6.0, 2048);
  auto P = plugin_estimate(g1, kernel, h, n_N, xg);
  auto G0 = GridFunction::sample(xg, g0);
  double rel = l2_distance(P, G0) / l2_norm(G0);
  s.checks.push_back({"relative L2 error of plug-in output", rel, tol});

  double M = std::min(1.0, std::abs(kernel.pivot_value()));
  auto sub = Grid1D::cells(-6.0 * M, 6.0 * M, 2048);
  auto fwd = forward_operator([&](double x) { return P(x); }, kernel, h);
  auto FP = GridFunction::sample(sub, fwd);
  auto G1 = GridFunction::sample(sub, g1);
  s.checks.push_back({"relative forward residual", l2_distance(FP, G1) / l2_norm(G1), tol});
  s.notes.push_back("e = " + format_double(e) + ", tolerance = " + format_double(tol));
  return s;
}

//! Gram-Schmidt, triangularity, diagonal bound, in-span recovery and the
//! triangular round trip for the benchmark kernel.
inline SuiteReport suite_onb()
{
  SuiteReport s{"onb", {}, {}};
  SimpleKernel kernel({1.3, 0.2, 0.1, 0.1}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  WeightH h(1.0, true);
  HaarBasis basis(6.0, 2, 7, 2048);
  auto sys = build_eta(basis, kernel, h);
  std::size_t m = basis.m();

  double orth = 0.0, tri = 0.0, diag_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
    {
      orth = std::max(orth, std::abs(inner(sys.e_basis[i], sys.e_basis[j]) - (i == j ? 1.0 : 0.0)));
      if (j > i)
        tri = std::max(tri, std::abs(inner(sys.eta[i], sys.e_basis[j])));
    }
  double lower = sys.pivot_mass / std::abs(sys.pivot_value) * (1.0 - sys.e_factor);
  for (std::size_t j = 0; j < m; ++j)
    diag_gap = std::min(diag_gap, sys.mix[j][j] - (lower - 1e-8));
  s.checks.push_back({"max |<e_i,e_j> - delta_ij|", orth, 1e-10});
  s.checks.push_back({"max |<eta_i,e_j>|, j > i", tri, 1e-10});
  s.checks.push_back({"min diag(B) - lower bound", diag_gap, 0.0, true});

  std::vector<double> x{0.3, -0.2, 0.5, 0.1, -0.4, 0.25, 0.05};
  auto g0 = [&](double t) {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      v += x[j] * basis.eval(j, t);
    return v;
  };
  auto g1 = forward_operator(g0, kernel, h);
  auto xr = solve_coefficients(project_g1bar(g1, h, sys), sys);
  auto rec = onb_estimate(xr, basis);
  auto truth = onb_estimate(x, basis);
  s.checks.push_back({"in-span recovery sup error", [&] {
                        double e = 0.0;
                        for (std::size_t i = 0; i < rec.size(); ++i)
                          e = std::max(e, std::abs(rec[i] - truth[i]));
                        return e;
                      }(),
                      1e-8});

  Stream rng(derive_seed(7, 7));
  EtaSystem tsys = sys;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      tsys.mix[j][i] = i < j ? 0.0 : (i == j ? 1.0 + rng.uniform() : 2.0 * rng.uniform() - 1.0);
  std::vector<double> xt(m), yt(m, 0.0);
  for (auto& v : xt)
    v = 2.0 * rng.uniform() - 1.0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = j; i < m; ++i)
      yt[j] += tsys.mix[j][i] * xt[i];
  auto xs = solve_coefficients(yt, tsys);
  double rt = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    rt = std::max(rt, std::abs(xs[i] - xt[i]));
  s.checks.push_back({"triangular round-trip error", rt, 1e-12});
  return s;
}

} // namespace levyfield
