#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "ecf.hpp"
#include "error.hpp"
#include "invert.hpp"
#include "io.hpp"
#include "model.hpp"
#include "numcore.hpp"
#include "onb.hpp"
#include "simulate.hpp"
#include "smooth.hpp"

namespace levyfield {

namespace detail {

template<class E, class... Rest>
[[noreturn]] void retag(std::string const& stage, Error const& e)
{
  if (dynamic_cast<E const*>(&e))
    throw E("[" + stage + "] " + e.what());
  if constexpr (sizeof...(Rest) > 0)
    retag<Rest...>(stage, e);
  else
    throw Error("[" + stage + "] " + e.what());
}

//! Runs f, prefixing any library error with the stage name while keeping
//! its category.
template<class F>
auto staged(std::string const& stage, F&& f)
{
  try
  {
    return f();
  }
  catch (Error const& e)
  {
    retag<ConfigError, IoError, InvalidInput, CoverageError, PreconditionError, SingularRecovery,
          BoundInapplicable, DivergentBound, SingularSystem, DegeneracyError, ResourceError>(stage,
                                                                                             e);
  }
}

inline std::size_t odd_at_least(double v)
{
  auto n = static_cast<std::size_t>(std::ceil(v));
  n = std::max<std::size_t>(n, 3);
  return n % 2 == 0 ? n + 1 : n;
}

//! Symmetric grid of half-width r with spacing close to h.
inline Grid1D span_grid(double r, double h)
{
  return Grid1D::symmetric(r, odd_at_least(2.0 * r / h + 1.0));
}

} // namespace detail

inline Grid1D x_grid_of(ExperimentConfig const& c)
{
  return Grid1D::cells(-c.A, c.A, c.grid_points);
}

//! g0 = x v0(x) on the x-grid.
inline GridFunction true_g0(ExperimentConfig const& c)
{
  auto law = c.law();
  return GridFunction::sample(x_grid_of(c), [&](double x) { return x * law.levy_density(x); });
}

struct EstimateResult
{
  GridFunction g0_hat;
  GridFunction g0_raw;  //!< before smoothing
  double l;
  std::optional<double> bandwidth;
};

//! Estimation half of the pipeline: ecf, g1 estimate, inversion, smoothing.
inline EstimateResult estimate_from_sample(ExperimentConfig const& c, std::span<double const> y)
{
  auto kernel = c.kernel();
  auto law = c.law();
  auto h = c.weight();
  double l = c.resolved_l();
  auto xg = x_grid_of(c);
  auto plan = detail::staged("series", [&] { return build_series_plan(kernel, h, c.n_N); });
  double f1 = kernel.pivot_value();
  double hx = xg.spacing() * std::max(1.0, std::abs(f1));

  // Estimated g1 on [-r, r], or the exact one under oracle_g1.
  auto g1_on = [&](double r) {
    auto g = detail::span_grid(r, hx);
    if (c.oracle_g1)
    {
      auto v1 = forward_levy_density(kernel, [&](double x) { return law.levy_density(x); });
      return GridFunction::sample(g, [&](double x) { return x * v1(x); });
    }
    auto e = detail::staged("ecf", [&] {
      return stabilize(compute_ecf(y, Grid1D::symmetric(pi * l, c.u_points)));
    });
    return detail::staged("g1_hat", [&] { return g1_hat(e, l, g); });
  };

  GridFunction raw;
  switch (c.method)
  {
    case Method::plugin:
    {
      double reach = 0.0;
      for (auto const& t : plan.terms)
        reach = std::max(reach, std::abs(t.scale));
      auto g1 = g1_on(reach * c.A);
      raw = detail::staged("plugin", [&] { return plugin_estimate(g1, plan, h, xg); });
      break;
    }
    case Method::fourier:
    {
      auto source = [&](Grid1D const& g) {
        if (c.oracle_g1)
          return ComplexGridFunction::sample(g, [&](double u) { return exact_fourier_g1(kernel, law, u); });
        return fourier_g1_hat(stabilize(compute_ecf(y, g)));
      };
      raw = detail::staged("fourier", [&] {
        return fourier_estimate_gridwise(source, plan, h, l, xg, c.u_points);
      });
      break;
    }
    case Method::onb:
    {
      auto g1 = g1_on(std::abs(f1) * c.A);
      raw = detail::staged("onb", [&] {
        HaarBasis basis(c.A, c.haar_levels, c.m, c.grid_points);
        auto sys = build_eta(basis, kernel, h);
        auto yv = project_g1bar(g1, h, sys);
        return onb_estimate(solve_coefficients(yv, sys), basis, xg);
      });
      break;
    }
  }

  auto bw = c.resolved_bandwidth();
  EstimateResult r{raw, raw, l, std::nullopt};
  if (bw.mode == BandwidthSpec::Mode::none)
    return r;
  double b = bw.value;
  if (bw.mode == BandwidthSpec::Mode::automatic)
    b = detail::staged("bandwidth", [&] { return select_bandwidth(raw, c.smoothing_kernel).b; });
  r.bandwidth = b;
  r.g0_hat = detail::staged("smooth", [&] { return smooth(raw, SmoothingKernel(c.smoothing_kernel, b)); });
  return r;
}

struct PipelineResult
{
  GridFunction g0_hat;
  double mse;
};

inline double mse_against_truth(ExperimentConfig const& c, GridFunction const& est)
{
  double d = l2_distance(est, true_g0(c));
  return d * d;
}

//! simulate -> estimate -> MSE for replication `rep`.
inline PipelineResult run_pipeline(ExperimentConfig const& c, std::uint64_t rep)
{
  auto sample = detail::staged("simulate", [&] {
    return sample_field(c.kernel(), c.law(), c.window, SeedSpec{c.master_seed, rep}, c.mesh);
  });
  auto est = estimate_from_sample(c, sample.values);
  return {est.g0_hat, mse_against_truth(c, est.g0_hat)};
}

struct ReplicationRecord
{
  std::uint64_t rep;
  double mse;
  double runtime_s;
};

struct BenchResult
{
  std::string method;
  std::string law;
  std::vector<ReplicationRecord> records;  //!< sorted by rep
  double mean = 0.0;
  double sd = 0.0;
};

//! Replications 0..reps-1 on `threads` workers (0: hardware concurrency).
//! Results do not depend on the worker count.
inline BenchResult run_bench(ExperimentConfig const& c, int reps, unsigned threads = 1)
{
  if (reps < 1)
    throw ConfigError("bench: reps must be positive");
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(reps));

  std::vector<ReplicationRecord> recs(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    for (;;)
    {
      int i = next.fetch_add(1);
      if (i >= reps)
        return;
      try
      {
        auto t0 = std::chrono::steady_clock::now();
        auto r = run_pipeline(c, static_cast<std::uint64_t>(i));
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        recs[static_cast<std::size_t>(i)] = {static_cast<std::uint64_t>(i), r.mse, dt.count()};
      }
      catch (...)
      {
        std::lock_guard lk(fail_mu);
        if (!failure)
          failure = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  if (threads == 1)
    worker();
  else
  {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);

  BenchResult b;
  b.method = to_string(c.method);
  b.law = c.law().name();
  b.records = std::move(recs);
  double s = 0.0;
  for (auto const& r : b.records)
    s += r.mse;
  b.mean = s / double(reps);
  double ss = 0.0;
  for (auto const& r : b.records)
    ss += (r.mse - b.mean) * (r.mse - b.mean);
  b.sd = reps > 1 ? std::sqrt(ss / double(reps - 1)) : 0.0;
  return b;
}

//! Header method,law,rep,mse,runtime_s. Runtimes are written as 0 unless
//! `timing` is set, so that reruns are byte-identical.
inline void write_results_csv(std::string const& path, std::vector<BenchResult> const& results,
                              bool timing = false)
{
  std::string out = "method,law,rep,mse,runtime_s\n";
  for (auto const& b : results)
    for (auto const& r : b.records)
      out += b.method + ',' + b.law + ',' + std::to_string(r.rep) + ',' + format_double(r.mse) + ','
             + (timing ? format_double(r.runtime_s) : std::string("0")) + '\n';
  write_text(path, out);
}

struct RateReport
{
  std::vector<double> N;
  std::vector<double> psi_sq_err;     //!< MC mean of |psi_hat - psi|^2
  std::vector<double> theta_4th_err;  //!< MC mean of |theta_hat - theta|^4
  double slope_psi;
  double slope_theta;
  int reps;
  std::string warning;
};

//! Least-squares slope of log y against log x.
inline double loglog_slope(std::vector<double> const& x, std::vector<double> const& y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("loglog_slope: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

//! Monte Carlo moments of the ecf errors at a fixed u for windows of
//! about N points each, with fitted log-log slopes against N.
inline RateReport validate_appendix_rates(ExperimentConfig const& c,
                                          std::vector<double> const& N_targets, int reps,
                                          double u = 1.0)
{
  if (reps < 1)
    throw ConfigError("validate_appendix_rates: reps must be positive");
  auto kernel = c.kernel();
  auto law = c.law();
  cplx psi = cp_charfn(kernel, law, u);
  cplx theta = psi * exact_fourier_g1(kernel, law, u);
  auto ug = Grid1D::symmetric(u, 3);

  RateReport r;
  r.reps = reps;
  if (reps < 50)
    r.warning = "fewer than 50 replications; slopes are unreliable";
  for (std::size_t i = 0; i < N_targets.size(); ++i)
  {
    auto side = static_cast<long>(std::llround(std::pow(N_targets[i], 1.0 / double(c.d))));
    std::vector<long> dims(static_cast<std::size_t>(c.d), std::max(1L, side));
    double e2 = 0.0, e4 = 0.0;
    std::size_t N = 0;
    for (int k = 0; k < reps; ++k)
    {
      auto s = sample_field(kernel, law, dims, SeedSpec{derive_seed(c.master_seed, 1000 + i),
                                                        static_cast<std::uint64_t>(k)},
                            c.mesh);
      auto e = compute_ecf_direct(s.values, ug);
      N = s.N();
      e2 += std::norm(e.psi_hat[2] - psi);
      double t = std::norm(e.theta_hat[2] - theta);
      e4 += t * t;
    }
    r.N.push_back(double(N));
    r.psi_sq_err.push_back(e2 / reps);
    r.theta_4th_err.push_back(e4 / reps);
  }
  r.slope_psi = loglog_slope(r.N, r.psi_sq_err);
  r.slope_theta = loglog_slope(r.N, r.theta_4th_err);
  return r;
}

} // namespace levyfield
