#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "error.hpp"
#include "numcore.hpp"

namespace levyfield {

enum class KernelFamily { gaussian, epanechnikov, bandlimited };

inline std::string to_string(KernelFamily f)
{
  switch (f)
  {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::epanechnikov: return "epanechnikov";
    case KernelFamily::bandlimited: return "bandlimited";
  }
  return "?";
}

namespace detail {

// 3 (sin t - t cos t) / t^3, the transform of the unit Epanechnikov kernel.
inline double epan_ft(double t)
{
  double a = std::abs(t);
  if (a < 1e-2)
  {
    double t2 = t * t;
    return 1.0 - t2 / 10.0 + t2 * t2 / 280.0;
  }
  return 3.0 * (std::sin(a) - a * std::cos(a)) / (a * a * a);
}

inline double epan_ft_deriv(double t)
{
  double a = std::abs(t);
  if (a < 1e-2)
    return -t / 5.0 + t * t * t / 70.0;
  double d = 3.0 * (a * a * std::sin(a) - 3.0 * (std::sin(a) - a * std::cos(a))) / (a * a * a * a);
  return t < 0.0 ? -d : d;
}

// Cubic B-spline in 2|u|, scaled to 1 at the origin; vanishes for |u| >= 1.
inline double spline_ft(double u)
{
  double t = 2.0 * std::abs(u);
  if (t >= 2.0)
    return 0.0;
  if (t <= 1.0)
    return (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 4.0;
  double r = 2.0 - t;
  return r * r * r / 4.0;
}

inline double spline_ft_deriv(double u)
{
  double t = 2.0 * std::abs(u);
  if (t >= 2.0)
    return 0.0;
  double dt = t <= 1.0 ? (-12.0 * t + 9.0 * t * t) / 4.0 : -3.0 * (2.0 - t) * (2.0 - t) / 4.0;
  return u < 0.0 ? -2.0 * dt : 2.0 * dt;
}

} // namespace detail

//! K_b(x) = K(x/b)/b for a nonnegative kernel K with unit mass.
//!
//! bandlimited is K(x) = (3/(8 pi)) sinc(x/4)^4, whose transform is a cubic
//! B-spline supported on [-1, 1] with Lipschitz constant 2.
class SmoothingKernel
{
public:
  SmoothingKernel(KernelFamily family, double b) : family_(family), b_(b)
  {
    if (!(b > 0.0) || !std::isfinite(b))
      throw InvalidInput("SmoothingKernel: bandwidth must be positive");
  }

  KernelFamily family() const { return family_; }
  double b() const { return b_; }

  double operator()(double x) const { return unit(x / b_) / b_; }

  //! F[K_b](u) = int e^{iux} K_b(x) dx, real since K is even.
  double fourier(double u) const { return unit_ft(b_ * u); }

  //! d/db F[K_b](u).
  double fourier_db(double u) const
  {
    switch (family_)
    {
      case KernelFamily::gaussian: return -b_ * u * u * std::exp(-0.5 * b_ * b_ * u * u);
      case KernelFamily::epanechnikov: return u * detail::epan_ft_deriv(b_ * u);
      case KernelFamily::bandlimited: return u * detail::spline_ft_deriv(b_ * u);
    }
    return 0.0;
  }

  //! sup |F[K_b]|; 1 for every nonnegative unit-mass kernel.
  double C_K() const { return 1.0; }

  //! Constant in |1 - F[K_b](x)| <= c1 min(1, b|x|).
  double c1() const
  {
    switch (family_)
    {
      case KernelFamily::gaussian: return 2.0;
      case KernelFamily::bandlimited: return std::max(1.0, lipschitz());
      case KernelFamily::epanechnikov:
      {
        static double const c = fitted_c1([](double t) { return detail::epan_ft(t); });
        return c;
      }
    }
    return 0.0;
  }

  //! Lipschitz constant of the unit transform (band-limited family only).
  double lipschitz() const { return family_ == KernelFamily::bandlimited ? 2.0 : 0.0; }

  //! Half-width beyond which K_b is zero or negligible.
  double reach() const
  {
    switch (family_)
    {
      case KernelFamily::gaussian: return 10.0 * b_;
      case KernelFamily::epanechnikov: return b_;
      case KernelFamily::bandlimited: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

  double unit(double x) const
  {
    switch (family_)
    {
      case KernelFamily::gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
      case KernelFamily::epanechnikov: return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
      case KernelFamily::bandlimited:
      {
        double y = 0.25 * x;
        double s = std::abs(y) < 1e-8 ? 1.0 - y * y / 6.0 : std::sin(y) / y;
        return 3.0 / (8.0 * pi) * s * s * s * s;
      }
    }
    return 0.0;
  }

  double unit_ft(double t) const
  {
    switch (family_)
    {
      case KernelFamily::gaussian: return std::exp(-0.5 * t * t);
      case KernelFamily::epanechnikov: return detail::epan_ft(t);
      case KernelFamily::bandlimited: return detail::spline_ft(t);
    }
    return 0.0;
  }

  //! sup_t |1 - F(t)| / min(1, |t|) over a dense scan of t in (0, 400].
  template<class F>
  static double fitted_c1(F const& ft)
  {
    double c = 0.0;
    for (int i = 1; i <= 400000; ++i)
    {
      double t = 1e-3 * double(i);
      c = std::max(c, std::abs(1.0 - ft(t)) / std::min(1.0, t));
    }
    return c;
  }

private:
  KernelFamily family_;
  double b_;
};

//! est * K_b on est's grid. The kernel is sampled at multiples of the grid
//! spacing and rescaled to unit discrete mass.
inline GridFunction smooth(GridFunction const& est, SmoothingKernel const& kern)
{
  auto const& g = est.grid();
  double h = g.spacing();
  double R = std::min(kern.reach(), g.hi() - g.lo());
  auto K = static_cast<std::size_t>(std::floor(R / h + 1e-9));
  if (K == 0)
    return est;
  auto kg = Grid1D::symmetric(double(K) * h, 2 * K + 1);
  auto kv = GridFunction::sample(kg, [&](double x) { return kern(x); });
  double mass = 0.0;
  for (double v : kv.values())
    mass += h * v;
  if (!(mass > 0.0))
    return est;
  for (auto& v : kv.values())
    v /= mass;
  return convolve(est, kv);
}

//! (c1/(2 pi) int min(1, b|x|)^4 (1+x^2)^{-delta} dx)^{1/4}.
//!
//! With x = tan(theta) the integrand becomes min(1, b tan)^4 cos^{2 delta - 2};
//! the two pieces are split at atan(1/b).
inline double a_delta(double b, double delta, double c1)
{
  if (!(delta > 0.5))
    throw DivergentBound("a_delta: delta = " + std::to_string(delta) + " must exceed 1/2");
  if (!(b > 0.0) || !(c1 > 0.0))
    throw InvalidInput("a_delta: need b > 0 and c1 > 0");
  double split = std::atan(1.0 / b);
  double p = 2.0 * delta - 2.0;
  auto inner_piece = [&](double th) {
    double t = std::tan(th);
    double bt = b * t;
    return bt * bt * bt * bt * std::pow(std::cos(th), p);
  };
  double first = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
    inner_piece, 0.0, split, 15, 1e-12);
  // int_{split}^{pi/2} cos^p = int_0^{atan b} sin^p.
  boost::math::quadrature::tanh_sinh<double> ts;
  double second = ts.integrate([&](double ph) { return std::pow(std::sin(ph), p); }, 0.0,
                               std::atan(b));
  double integral = 2.0 * (first + second);
  return std::pow(c1 / (2.0 * pi) * integral, 0.25);
}

struct K3Check
{
  bool holds;
  double c1;
};

//! Smallest c1 with |1 - F[K_b](x)| <= c1 min(1, b|x|) on the product grid.
inline K3Check check_k3(std::function<double(double)> const& unit_ft,
                        std::vector<double> const& b_grid, std::vector<double> const& x_grid)
{
  double c = 0.0;
  for (double b : b_grid)
    for (double x : x_grid)
    {
      double m = std::min(1.0, b * std::abs(x));
      double gap = std::abs(1.0 - unit_ft(b * x));
      if (m == 0.0)
      {
        if (gap > 0.0)
          return {false, std::numeric_limits<double>::infinity()};
        continue;
      }
      c = std::max(c, gap / m);
    }
  return {std::isfinite(c), c};
}

inline K3Check check_k3(KernelFamily family, std::vector<double> const& b_grid,
                        std::vector<double> const& x_grid)
{
  SmoothingKernel k(family, 1.0);
  return check_k3([&](double t) { return k.unit_ft(t); }, b_grid, x_grid);
}

struct BandwidthChoice
{
  double b;
  std::vector<double> b_grid;
  std::vector<double> objective;
};

inline constexpr std::size_t default_bandwidth_u_points = 4097;

//! Minimizes || F[est] d/db F[K_b] ||_2 over log-spaced b; ties go to the
//! smaller b.
inline BandwidthChoice select_bandwidth(GridFunction const& est, KernelFamily family,
                                        double b_lo = 0.05, double b_hi = 3.0,
                                        std::size_t points = 50,
                                        std::size_t u_points = default_bandwidth_u_points)
{
  if (!(b_lo > 0.0) || !(b_hi >= b_lo) || points == 0 || (points > 1 && b_hi == b_lo))
    throw InvalidInput("select_bandwidth: empty bandwidth range");
  double umax = pi / est.grid().spacing();
  auto ug = Grid1D::symmetric(umax, u_points | 1);
  auto F = fourier_forward_fast(est, ug);
  std::vector<double> pw(ug.n());
  for (std::size_t k = 0; k < ug.n(); ++k)
    pw[k] = ug.weight(k) * std::norm(F[k]);

  BandwidthChoice out;
  double step = points > 1 ? std::log(b_hi / b_lo) / double(points - 1) : 0.0;
  double best = std::numeric_limits<double>::infinity();
  out.b = b_lo;
  for (std::size_t i = 0; i < points; ++i)
  {
    double b = b_lo * std::exp(step * double(i));
    SmoothingKernel k(family, b);
    double s = 0.0;
    for (std::size_t t = 0; t < ug.n(); ++t)
    {
      double d = k.fourier_db(ug.node(t));
      s += pw[t] * d * d;
    }
    double v = std::sqrt(s);
    out.b_grid.push_back(b);
    out.objective.push_back(v);
    if (v < best)
    {
      best = v;
      out.b = b;
    }
  }
  return out;
}

} // namespace levyfield
