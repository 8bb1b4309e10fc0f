#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "error.hpp"

namespace levyfield {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

//! Quadrature attached to a grid.
//!
//! `trapezoid` places nodes on both endpoints; `cells` places one node at
//! the midpoint of each of n equal cells, so that piecewise-constant
//! functions aligned with the cells integrate exactly.
enum class Rule
{
  trapezoid,
  cells
};

class Grid1D
{
public:
  Grid1D() = default;

  Grid1D(double lo, double hi, std::size_t n, Rule rule = Rule::trapezoid)
    : lo_(lo), hi_(hi), n_(n), rule_(rule)
  {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      throw InvalidInput("Grid1D: need finite lo < hi");
    if (n < 2)
      throw InvalidInput("Grid1D: need at least two nodes");
  }

  static Grid1D trapezoid(double lo, double hi, std::size_t n)
  {
    return Grid1D(lo, hi, n, Rule::trapezoid);
  }
  static Grid1D cells(double lo, double hi, std::size_t n)
  {
    return Grid1D(lo, hi, n, Rule::cells);
  }
  //! Trapezoid grid on [-r, r].
  static Grid1D symmetric(double r, std::size_t n)
  {
    return Grid1D(-r, r, n, Rule::trapezoid);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t n() const { return n_; }
  Rule rule() const { return rule_; }
  bool empty() const { return n_ == 0; }

  double spacing() const
  {
    return rule_ == Rule::cells ? (hi_ - lo_) / double(n_)
                                : (hi_ - lo_) / double(n_ - 1);
  }

  //! Node i. The convex-combination form keeps the midpoint of a
  //! symmetric odd grid at exactly zero.
  double node(std::size_t i) const
  {
    if (rule_ == Rule::cells)
    {
      double t = (double(i) + 0.5) / double(n_);
      return lo_ * (1.0 - t) + hi_ * t;
    }
    double m = double(n_ - 1);
    return (lo_ * (m - double(i)) + hi_ * double(i)) / m;
  }

  double weight(std::size_t i) const
  {
    double h = spacing();
    if (rule_ == Rule::trapezoid && (i == 0 || i + 1 == n_))
      return 0.5 * h;
    return h;
  }

  double first_node() const { return node(0); }
  double last_node() const { return node(n_ - 1); }

  std::vector<double> nodes() const
  {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i)
      x[i] = node(i);
    return x;
  }

  bool is_symmetric(double tol = 1e-12) const
  {
    return std::abs(lo_ + hi_) <= tol * std::max(std::abs(lo_), std::abs(hi_));
  }

private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::size_t n_ = 0;
  Rule rule_ = Rule::trapezoid;
};

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
inline double sq_abs(double v) { return v * v; }
inline double sq_abs(cplx v) { return std::norm(v); }
} // namespace detail

//! Function sampled on a Grid1D, zero off the grid's span.
template<class T>
class BasicGridFunction
{
public:
  using value_type = T;

  BasicGridFunction() = default;

  BasicGridFunction(Grid1D grid, std::vector<T> values)
    : grid_(grid), values_(std::move(values))
  {
    if (values_.size() != grid_.n())
      throw InvalidInput("GridFunction: value count does not match grid");
    for (auto const& v : values_)
      if (!detail::finite(v))
        throw InvalidInput("GridFunction: non-finite value");
  }

  explicit BasicGridFunction(Grid1D grid)
    : grid_(grid), values_(grid.n(), T{})
  {
  }

  template<class F>
  static BasicGridFunction sample(Grid1D const& grid, F&& f)
  {
    std::vector<T> v(grid.n());
    for (std::size_t i = 0; i < grid.n(); ++i)
      v[i] = static_cast<T>(f(grid.node(i)));
    return BasicGridFunction(grid, std::move(v));
  }

  Grid1D const& grid() const { return grid_; }
  std::vector<T> const& values() const { return values_; }
  std::vector<T>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  T operator[](std::size_t i) const { return values_[i]; }
  T& operator[](std::size_t i) { return values_[i]; }

  //! Linear interpolation between nodes; zero outside [lo, hi]. On a
  //! cell grid the half cells at either end hold the end value.
  T operator()(double x) const
  {
    double lo = grid_.lo(), hi = grid_.hi();
    if (!(x >= lo && x <= hi))
      return T{};
    double x0 = grid_.first_node();
    double h = grid_.spacing();
    double t = (x - x0) / h;
    if (t <= 0.0)
      return values_.front();
    std::size_t last = values_.size() - 1;
    if (t >= double(last))
      return values_.back();
    auto i = static_cast<std::size_t>(t);
    if (i >= last)
      i = last - 1;
    double r = t - double(i);
    return values_[i] * (1.0 - r) + values_[i + 1] * r;
  }

  void check_finite() const
  {
    for (auto const& v : values_)
      if (!detail::finite(v))
        throw InvalidInput("GridFunction: non-finite value");
  }

private:
  Grid1D grid_;
  std::vector<T> values_;
};

using GridFunction = BasicGridFunction<double>;
using ComplexGridFunction = BasicGridFunction<cplx>;

template<class T>
double l2_norm_sq(BasicGridFunction<T> const& f)
{
  f.check_finite();
  auto const& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += g.weight(i) * detail::sq_abs(f[i]);
  return s;
}

template<class T>
double l2_norm(BasicGridFunction<T> const& f)
{
  return std::sqrt(l2_norm_sq(f));
}

inline double integral(GridFunction const& f)
{
  auto const& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += g.weight(i) * f[i];
  return s;
}

inline double l1_norm(GridFunction const& f)
{
  auto const& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += g.weight(i) * std::abs(f[i]);
  return s;
}

namespace detail {
inline bool same_grid(Grid1D const& a, Grid1D const& b)
{
  return a.n() == b.n() && a.rule() == b.rule() && a.lo() == b.lo() && a.hi() == b.hi();
}
} // namespace detail

//! Real inner product on a shared grid.
inline double inner(GridFunction const& f, GridFunction const& g)
{
  if (!detail::same_grid(f.grid(), g.grid()))
    throw InvalidInput("inner: functions live on different grids");
  auto const& gr = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += gr.weight(i) * f[i] * g[i];
  return s;
}

//! L2 distance between two functions on a shared grid.
inline double l2_distance(GridFunction const& f, GridFunction const& g)
{
  if (!detail::same_grid(f.grid(), g.grid()))
    throw InvalidInput("l2_distance: functions live on different grids");
  auto const& gr = f.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += gr.weight(i) * (f[i] - g[i]) * (f[i] - g[i]);
  return std::sqrt(s);
}

//! a*f + b*g on a shared grid.
template<class T>
BasicGridFunction<T> combine(double a, BasicGridFunction<T> const& f, double b,
                             BasicGridFunction<T> const& g)
{
  if (!detail::same_grid(f.grid(), g.grid()))
    throw InvalidInput("combine: functions live on different grids");
  std::vector<T> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = a * f[i] + b * g[i];
  return BasicGridFunction<T>(f.grid(), std::move(v));
}

//! Resample f onto another grid by linear interpolation.
template<class T>
BasicGridFunction<T> resample(BasicGridFunction<T> const& f, Grid1D const& to)
{
  return BasicGridFunction<T>::sample(to, [&](double x) { return f(x); });
}

//! Composite Gauss-Legendre rule on [a, b] split into `panels` pieces.
template<class F>
auto integrate(F&& f, double a, double b, std::size_t panels = 16)
{
  using R = std::invoke_result_t<F&, double>;
  R total{};
  if (!(b > a))
    return total;
  panels = std::max<std::size_t>(panels, 1);
  double w = (b - a) / double(panels);
  for (std::size_t p = 0; p < panels; ++p)
  {
    double lo = a + w * double(p);
    double hi = p + 1 == panels ? b : lo + w;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, hi);
  }
  return total;
}

//! Forward transform F(u) = int e^{iux} f(x) dx by direct quadrature.
inline ComplexGridFunction fourier_forward(GridFunction const& f, Grid1D const& u_grid)
{
  if (f.size() == 0 || u_grid.n() == 0)
    throw InvalidInput("fourier_forward: empty grid");
  f.check_finite();
  auto const& xg = f.grid();
  std::vector<cplx> out(u_grid.n());
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    double u = u_grid.node(k);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
    {
      double wf = xg.weight(i) * f[i];
      double ph = u * xg.node(i);
      re += wf * std::cos(ph);
      im += wf * std::sin(ph);
    }
    out[k] = {re, im};
  }
  return ComplexGridFunction(u_grid, std::move(out));
}

namespace detail {
inline constexpr std::size_t reanchor_stride = 64;

//! out[k] += w * exp(i * sign * t_k * y) for all k of a uniform grid, by
//! phase recurrence with exact re-anchoring every few nodes and at t = 0.
inline void accumulate_phases(Grid1D const& t_grid, double y, double sign, cplx w,
                              std::vector<cplx>& out)
{
  double h = t_grid.spacing();
  cplx step = std::polar(1.0, sign * h * y);
  cplx z;
  for (std::size_t k = 0; k < t_grid.n(); ++k)
  {
    double t = t_grid.node(k);
    if (k % reanchor_stride == 0 || t == 0.0)
      z = t == 0.0 ? cplx(1.0, 0.0) : std::polar(1.0, sign * t * y);
    out[k] += w * z;
    z *= step;
  }
}
} // namespace detail

//! Same transform as fourier_forward, using a phase recurrence along the
//! u-grid instead of one sincos per node pair.
inline ComplexGridFunction fourier_forward_fast(GridFunction const& f, Grid1D const& u_grid)
{
  if (f.size() == 0 || u_grid.n() == 0)
    throw InvalidInput("fourier_forward_fast: empty grid");
  f.check_finite();
  auto const& xg = f.grid();
  std::vector<cplx> out(u_grid.n(), cplx{});
  for (std::size_t i = 0; i < f.size(); ++i)
  {
    double wf = xg.weight(i) * f[i];
    if (wf == 0.0)
      continue;
    detail::accumulate_phases(u_grid, xg.node(i), 1.0, wf, out);
  }
  return ComplexGridFunction(u_grid, std::move(out));
}

struct InverseTransform
{
  GridFunction values;  //!< real part on the x-grid
  double imag_residue;  //!< L2 norm of the discarded imaginary part
};

//! (1/2pi) int e^{-ixu} F(u) du over the full symmetric span of F's grid.
inline InverseTransform fourier_inverse_truncated(ComplexGridFunction const& F,
                                                  Grid1D const& x_grid)
{
  auto const& ug = F.grid();
  if (ug.n() == 0 || x_grid.n() == 0)
    throw InvalidInput("fourier_inverse_truncated: empty grid");
  if (!ug.is_symmetric())
    throw InvalidInput("fourier_inverse_truncated: u-grid must be symmetric about 0");
  F.check_finite();
  std::vector<cplx> acc(x_grid.n(), cplx{});
  for (std::size_t k = 0; k < ug.n(); ++k)
  {
    cplx w = F[k] * (ug.weight(k) / (2.0 * pi));
    if (w == cplx{})
      continue;
    detail::accumulate_phases(x_grid, ug.node(k), -1.0, w, acc);
  }
  std::vector<double> re(x_grid.n()), im(x_grid.n());
  for (std::size_t i = 0; i < acc.size(); ++i)
  {
    re[i] = acc[i].real();
    im[i] = acc[i].imag();
  }
  double resid = l2_norm(GridFunction(x_grid, std::move(im)));
  return {GridFunction(x_grid, std::move(re)), resid};
}

//! Reference inverse transform with one sincos per node pair.
inline InverseTransform fourier_inverse_direct(ComplexGridFunction const& F,
                                               Grid1D const& x_grid)
{
  auto const& ug = F.grid();
  if (!ug.is_symmetric())
    throw InvalidInput("fourier_inverse_direct: u-grid must be symmetric about 0");
  std::vector<double> re(x_grid.n()), im(x_grid.n());
  for (std::size_t i = 0; i < x_grid.n(); ++i)
  {
    double x = x_grid.node(i);
    cplx s{};
    for (std::size_t k = 0; k < ug.n(); ++k)
      s += ug.weight(k) * F[k] * std::polar(1.0, -x * ug.node(k));
    s /= 2.0 * pi;
    re[i] = s.real();
    im[i] = s.imag();
  }
  double resid = l2_norm(GridFunction(x_grid, std::move(im)));
  return {GridFunction(x_grid, std::move(re)), resid};
}

//! (f*g)(x_i) = sum_j w_j f(x_j) g(x_i - x_j) on f's grid; g is read by
//! linear interpolation and treated as zero off its span.
inline GridFunction convolve(GridFunction const& f, GridFunction const& g)
{
  double hf = f.grid().spacing(), hg = g.grid().spacing();
  if (std::abs(hf - hg) > 1e-9 * std::max(hf, hg))
    throw InvalidInput("convolve: grids must share the same spacing");
  auto const& fg = f.grid();
  std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  double glo = g.grid().lo(), ghi = g.grid().hi();
  for (std::size_t i = 0; i < n; ++i)
  {
    double xi = fg.node(i);
    // x_i - x_j in [glo, ghi]  <=>  x_j in [xi - ghi, xi - glo]
    double jlo = std::ceil((xi - ghi - fg.first_node()) / hf - 1e-9);
    double jhi = std::floor((xi - glo - fg.first_node()) / hf + 1e-9);
    auto j0 = static_cast<std::ptrdiff_t>(std::max(0.0, jlo));
    auto j1 = static_cast<std::ptrdiff_t>(std::min(double(n) - 1.0, jhi));
    double s = 0.0;
    for (std::ptrdiff_t j = j0; j <= j1; ++j)
    {
      auto ju = static_cast<std::size_t>(j);
      s += fg.weight(ju) * f[ju] * g(xi - fg.node(ju));
    }
    out[i] = s;
  }
  return GridFunction(fg, std::move(out));
}

//! Sobolev norm squared int |F(u)|^2 (1 + u^2)^delta du of a transform
//! known on a grid.
inline double sobolev_norm_sq(ComplexGridFunction const& F, double delta)
{
  auto const& ug = F.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < ug.n(); ++k)
  {
    double u = ug.node(k);
    s += ug.weight(k) * std::norm(F[k]) * std::pow(1.0 + u * u, delta);
  }
  return s;
}

} // namespace levyfield
