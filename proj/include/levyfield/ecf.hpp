#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numcore.hpp"

namespace levyfield {

//! Empirical characteristic data on a u-grid.
struct EcfEstimate
{
  Grid1D u_grid;
  std::vector<cplx> psi_hat;    //!< (1/N) sum e^{iuY}
  std::vector<cplx> theta_hat;  //!< (1/N) sum Y e^{iuY}
  std::vector<cplx> stabilized_recip;
  std::size_t N = 0;
};

//! Empirical sums by direct evaluation of every phase.
inline EcfEstimate compute_ecf_direct(std::span<double const> y, Grid1D const& u_grid)
{
  if (y.empty())
    throw InvalidInput("compute_ecf: empty sample");
  EcfEstimate e;
  e.u_grid = u_grid;
  e.N = y.size();
  e.psi_hat.assign(u_grid.n(), cplx{});
  e.theta_hat.assign(u_grid.n(), cplx{});
  double invN = 1.0 / double(y.size());
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    double u = u_grid.node(k);
    cplx ps{}, th{};
    for (double v : y)
    {
      cplx z = u == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, u * v);
      ps += z;
      th += v * z;
    }
    e.psi_hat[k] = ps * invN;
    e.theta_hat[k] = th * invN;
  }
  return e;
}

//! Empirical sums by phase recurrence along the u-grid. Agrees with
//! compute_ecf_direct to about 1e-13 and is exact at u = 0.
inline EcfEstimate compute_ecf(std::span<double const> y, Grid1D const& u_grid)
{
  if (y.empty())
    throw InvalidInput("compute_ecf: empty sample");
  EcfEstimate e;
  e.u_grid = u_grid;
  e.N = y.size();
  std::vector<cplx> ps(u_grid.n(), cplx{}), th(u_grid.n(), cplx{});
  double h = u_grid.spacing();
  for (double v : y)
  {
    if (!std::isfinite(v))
      throw InvalidInput("compute_ecf: non-finite observation");
    cplx step = std::polar(1.0, h * v);
    cplx z;
    for (std::size_t k = 0; k < u_grid.n(); ++k)
    {
      double u = u_grid.node(k);
      if (k % detail::reanchor_stride == 0 || u == 0.0)
        z = u == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, u * v);
      ps[k] += z;
      th[k] += v * z;
      z *= step;
    }
  }
  double invN = 1.0 / double(y.size());
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    ps[k] *= invN;
    th[k] *= invN;
  }
  e.psi_hat = std::move(ps);
  e.theta_hat = std::move(th);
  return e;
}

//! 1/psi_hat where |psi_hat| > N^{-1/2}, exactly zero elsewhere.
inline EcfEstimate stabilize(EcfEstimate e)
{
  double thr = 1.0 / std::sqrt(double(e.N));
  e.stabilized_recip.assign(e.psi_hat.size(), cplx{});
  for (std::size_t k = 0; k < e.psi_hat.size(); ++k)
    if (std::abs(e.psi_hat[k]) > thr)
      e.stabilized_recip[k] = 1.0 / e.psi_hat[k];
  return e;
}

//! Estimated Fourier transform of g1 = x v1.
//!
//! theta_hat estimates E Y e^{iuY} = -i psi'(u), so -i psi'/psi is
//! estimated by theta_hat times the stabilized reciprocal.
inline ComplexGridFunction fourier_g1_hat(EcfEstimate const& e)
{
  if (e.stabilized_recip.size() != e.psi_hat.size())
    throw PreconditionError("fourier_g1_hat: ecf has not been stabilized");
  std::vector<cplx> v(e.psi_hat.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = e.theta_hat[k] * e.stabilized_recip[k];
  return ComplexGridFunction(e.u_grid, std::move(v));
}

//! Restricts a transform to [-r, r], interpolating the end nodes when the
//! grid is wider. Keeps roughly the original spacing.
inline ComplexGridFunction restrict_symmetric(ComplexGridFunction const& F, double r)
{
  auto const& g = F.grid();
  double tol = 1e-12 * std::max(1.0, r);
  if (g.lo() > -r + tol || g.hi() < r - tol)
    throw CoverageError("u-grid [" + std::to_string(g.lo()) + ", " + std::to_string(g.hi())
                        + "] does not cover [-" + std::to_string(r) + ", " + std::to_string(r) + "]");
  if (std::abs(g.lo() + r) <= tol && std::abs(g.hi() - r) <= tol && g.is_symmetric())
    return F;
  auto n = static_cast<std::size_t>(std::ceil(2.0 * r / g.spacing())) + 1;
  if (n % 2 == 0)
    ++n;
  n = std::max<std::size_t>(n, 3);
  return resample(F, Grid1D::symmetric(r, n));
}

//! g1_hat_l(x) = (1/2pi) int_{-pi l}^{pi l} e^{-ixu} F_hat[g1](u) du.
inline GridFunction g1_hat(EcfEstimate const& e, double l, Grid1D const& x_grid)
{
  if (!(l > 0.0))
    throw InvalidInput("g1_hat: cutoff l must be positive");
  auto F = fourier_g1_hat(e.stabilized_recip.empty() ? stabilize(e) : e);
  return fourier_inverse_truncated(restrict_symmetric(F, pi * l), x_grid).values;
}

struct CutoffChoice
{
  double l;
  bool degenerate;  //!< objective has no interior minimum (beta = 0)
};

//! Objective L/(1+(pi l)^2)^beta + (Kbar/N) l (1+(pi l)^2)^beta.
inline double cutoff_objective(double l, double L, double beta, double Kbar, double N)
{
  double q = std::pow(1.0 + pi * pi * l * l, beta);
  return L / q + Kbar / N * l * q;
}

//! Grid-search minimizer of cutoff_objective over log-spaced l.
inline CutoffChoice select_cutoff(double L, double beta, double Kbar, double N,
                                  double l_min = 0.05, double l_max = 50.0,
                                  std::size_t points = 1000)
{
  if (!(L > 0.0) || !(Kbar > 0.0) || !(beta >= 0.0) || !(N > 0.0))
    throw InvalidInput("select_cutoff: need L, Kbar, N > 0 and beta >= 0");
  if (!(l_min > 0.0) || !(l_max > l_min) || points < 2)
    throw InvalidInput("select_cutoff: invalid search range");
  if (beta == 0.0)
    return {l_min, true};
  double best_l = l_min;
  double best = cutoff_objective(l_min, L, beta, Kbar, N);
  double step = std::log(l_max / l_min) / double(points - 1);
  for (std::size_t i = 1; i < points; ++i)
  {
    double l = l_min * std::exp(step * double(i));
    double v = cutoff_objective(l, L, beta, Kbar, N);
    if (v < best)
    {
      best = v;
      best_l = l;
    }
  }
  return {best_l, false};
}

//! Kbar = 2 pi K c_psi (sqrt(E Y^4) + ||g1||_1^2).
inline double kbar_constant(double K, double c_psi, double fourth_moment, double g1_l1)
{
  return 2.0 * pi * K * c_psi * (std::sqrt(fourth_moment) + g1_l1 * g1_l1);
}

//! int_{-pi l}^{pi l} dx / |psi(x)|^2 by composite Gauss-Legendre.
inline double inverse_psi_integral(std::function<cplx(double)> const& psi, double l,
                                   std::size_t panels = 64)
{
  double r = pi * l;
  double total = integrate(
    [&](double x) {
      double a = std::norm(psi(x));
      if (!(a > 0.0) || !std::isfinite(a))
        throw DivergentBound("theorem_bound_g1: |psi| vanishes at x = " + std::to_string(x));
      return 1.0 / a;
    },
    -r, r, panels);
  return total;
}

//! Right-hand side of the L2 bound for g1_hat_l:
//! bias_sq + (K/N)(sqrt(E Y^4) + ||g1||_1^2) int dx/|psi|^2.
inline double theorem_bound_g1(double bias_sq, double fourth_moment, double g1_l1,
                               std::function<cplx(double)> const& psi, double l, double N,
                               double K = 1.0)
{
  if (!(K > 0.0) || !(N > 0.0) || !(l >= 0.0))
    throw InvalidInput("theorem_bound_g1: need K, N > 0 and l >= 0");
  double var = l == 0.0 ? 0.0 : inverse_psi_integral(psi, l);
  return bias_sq + K / N * (std::sqrt(fourth_moment) + g1_l1 * g1_l1) * var;
}

//! Smallest K for which theorem_bound_g1 covers every pilot error.
inline double calibrate_K(std::vector<double> const& observed_sq_errors, double bias_sq,
                          double fourth_moment, double g1_l1,
                          std::function<cplx(double)> const& psi, double l, double N)
{
  double unit = theorem_bound_g1(0.0, fourth_moment, g1_l1, psi, l, N, 1.0);
  double K = 0.0;
  for (double e : observed_sq_errors)
    K = std::max(K, (e - bias_sq) / unit);
  return std::max(K, 1e-300);
}

struct H3Diagnostics
{
  double beta;
  double c_psi;
  double C_psi;
  double L;  //!< ||g1||^2_{H^beta}, or NaN when no transform was given
};

//! Fits |psi(x)| ~ c (1+x^2)^{-beta/2} by least squares of log|psi| on
//! log(1+x^2), then takes the envelope constants over the grid.
inline H3Diagnostics fit_h3(std::function<cplx(double)> const& psi, Grid1D const& u_grid,
                            ComplexGridFunction const* fourier_g1 = nullptr)
{
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    double u = u_grid.node(k);
    double a = std::abs(psi(u));
    if (!(a > 0.0))
      throw DivergentBound("fit_h3: psi vanishes on the grid");
    double t = std::log1p(u * u), yv = std::log(a);
    st += t;
    sy += yv;
    stt += t * t;
    sty += t * yv;
    ++m;
  }
  double den = double(m) * stt - st * st;
  double slope = den > 0.0 ? (double(m) * sty - st * sy) / den : 0.0;
  double beta = std::max(0.0, -2.0 * slope);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    double u = u_grid.node(k);
    double env = std::abs(psi(u)) * std::pow(1.0 + u * u, 0.5 * beta);
    lo = std::min(lo, env);
    hi = std::max(hi, env);
  }
  double L = fourier_g1 ? sobolev_norm_sq(*fourier_g1, beta) : std::nan("");
  return {beta, lo, hi, L};
}

} // namespace levyfield
