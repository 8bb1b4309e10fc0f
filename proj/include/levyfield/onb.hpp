#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "invert.hpp"
#include "model.hpp"
#include "numcore.hpp"

namespace levyfield {

//! Haar system on [-A, A]: the scaling function, then wavelets of level
//! 0..J, each level ordered by shift. Sampled at the midpoints of a cell
//! grid whose cells nest inside the finest wavelet halves, so the sampled
//! functions are orthonormal under the grid inner product.
class HaarBasis
{
public:
  HaarBasis(double A, int levels, std::size_t m, std::size_t grid_points)
    : A_(A), levels_(levels), m_(m)
  {
    if (!(A > 0.0) || !std::isfinite(A))
      throw InvalidInput("HaarBasis: A must be positive");
    if (levels < 0 || levels > 24)
      throw InvalidInput("HaarBasis: levels must lie in 0..24");
    std::size_t cap = std::size_t(1) << (levels + 1);
    if (m < 1 || m > cap)
      throw InvalidInput("HaarBasis: m must lie in 1.." + std::to_string(cap));
    if (grid_points < cap || grid_points % cap != 0)
      throw InvalidInput("HaarBasis: grid_points must be a multiple of " + std::to_string(cap));
    grid_ = Grid1D::cells(-A, A, grid_points);
    for (std::size_t j = 0; j < m; ++j)
      psi_.push_back(GridFunction::sample(grid_, [&](double t) { return eval(j, t); }));
  }

  double A() const { return A_; }
  int levels() const { return levels_; }
  std::size_t m() const { return m_; }
  Grid1D const& grid() const { return grid_; }
  GridFunction const& operator[](std::size_t j) const { return psi_[j]; }

  //! psi_j(t), exactly; zero off [-A, A).
  double eval(std::size_t j, double t) const
  {
    if (!(t >= -A_ && t < A_))
      return 0.0;
    double len = 2.0 * A_;
    if (j == 0)
      return 1.0 / std::sqrt(len);
    int level = 0;
    std::size_t first = 1;
    while (j >= first + (std::size_t(1) << level))
    {
      first += std::size_t(1) << level;
      ++level;
    }
    double width = len / double(std::size_t(1) << level);
    double start = -A_ + double(j - first) * width;
    if (t < start || t >= start + width)
      return 0.0;
    double amp = 1.0 / std::sqrt(width);
    return t < start + 0.5 * width ? amp : -amp;
  }

private:
  double A_;
  int levels_;
  std::size_t m_;
  Grid1D grid_;
  std::vector<GridFunction> psi_;
};

struct EtaSystem
{
  std::vector<GridFunction> eta;
  std::vector<GridFunction> e_basis;
  std::vector<std::vector<double>> mix;  //!< mix[j][i] = <eta_i, e_j>, upper triangular
  double M;                              //!< min(1, |f1|)
  double pivot_value;
  double pivot_mass;
  double e_factor;
};

//! eta_j(x) = sum_k (nu_k/|f_k|) h(x)/h((f1/f_k) x) psi_j((f1/f_k) x),
//! orthonormalized by modified Gram-Schmidt with one reorthogonalization.
inline EtaSystem build_eta(HaarBasis const& basis, SimpleKernel const& kernel, WeightH const& h)
{
  double f1 = kernel.pivot_value();
  for (double f : kernel.coeffs())
    if (std::abs(f) > std::abs(f1))
      throw PreconditionError("build_eta: pivot |f1| = " + std::to_string(std::abs(f1))
                              + " is not maximal (found " + std::to_string(std::abs(f)) + ")");
  auto rep = contraction_factor(kernel, h);
  if (!rep.satisfied)
    throw PreconditionError("build_eta: contraction factor " + std::to_string(rep.e_factor)
                            + " is not below 1");

  EtaSystem s;
  s.M = std::min(1.0, std::abs(f1));
  s.pivot_value = f1;
  s.pivot_mass = kernel.pivot_mass();
  s.e_factor = rep.e_factor;
  std::size_t m = basis.m();
  auto const& g = basis.grid();

  for (std::size_t j = 0; j < m; ++j)
  {
    std::vector<double> v(g.n(), 0.0);
    for (std::size_t k = 0; k < kernel.n(); ++k)
    {
      double fk = kernel.coeffs()[k];
      double c = f1 / fk;
      double w = kernel.volumes()[k] / std::abs(fk) * h.ratio(c);
      for (std::size_t i = 0; i < g.n(); ++i)
        v[i] += w * basis.eval(j, c * g.node(i));
    }
    s.eta.emplace_back(g, std::move(v));
  }

  s.mix.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
  {
    auto r = s.eta[i].values();
    double eta_norm = l2_norm(s.eta[i]);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < i; ++j)
      {
        double c = inner(GridFunction(g, r), s.e_basis[j]);
        auto const& ej = s.e_basis[j].values();
        for (std::size_t t = 0; t < r.size(); ++t)
          r[t] -= c * ej[t];
        s.mix[j][i] += c;
      }
    GridFunction res(g, std::move(r));
    double nr = l2_norm(res);
    if (!(nr >= 1e-8 * eta_norm) || nr == 0.0)
      throw DegeneracyError("build_eta: eta_" + std::to_string(i + 1)
                            + " is numerically dependent on its predecessors");
    for (auto& x : res.values())
      x /= nr;
    s.mix[i][i] = nr;
    s.e_basis.push_back(std::move(res));
  }
  return s;
}

//! y_j = <g1_bar, e_j> with g1_bar(x) = h(x)/h(f1 x) g1(f1 x).
template<class G1>
std::vector<double> project_g1bar(G1 const& g1, WeightH const& h, EtaSystem const& s)
{
  auto const& g = s.e_basis.front().grid();
  double f1 = s.pivot_value;
  double rho = h.ratio(f1);
  auto bar = GridFunction::sample(g, [&](double x) { return rho * double(g1(f1 * x)); });
  std::vector<double> y(s.e_basis.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = inner(bar, s.e_basis[j]);
  return y;
}

//! Back substitution in mix * x = y.
inline std::vector<double> solve_coefficients(std::vector<double> const& y, EtaSystem const& s)
{
  std::size_t m = s.mix.size();
  if (y.size() != m)
    throw InvalidInput("solve_coefficients: expected " + std::to_string(m) + " coefficients, got "
                       + std::to_string(y.size()));
  std::vector<double> x(m, 0.0);
  for (std::size_t j = m; j-- > 0;)
  {
    double d = s.mix[j][j];
    if (d == 0.0)
      throw SingularSystem("solve_coefficients: zero diagonal entry at " + std::to_string(j + 1));
    double r = y[j];
    for (std::size_t i = j + 1; i < m; ++i)
      r -= s.mix[j][i] * x[i];
    x[j] = r / d;
  }
  return x;
}

//! sum_i x_i psi_i on the basis grid.
inline GridFunction onb_estimate(std::vector<double> const& x, HaarBasis const& basis)
{
  if (x.size() != basis.m())
    throw InvalidInput("onb_estimate: coefficient count does not match the basis");
  std::vector<double> v(basis.grid().n(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t t = 0; t < v.size(); ++t)
      v[t] += x[j] * basis[j][t];
  return GridFunction(basis.grid(), std::move(v));
}

//! sum_i x_i psi_i evaluated exactly on another grid.
inline GridFunction onb_estimate(std::vector<double> const& x, HaarBasis const& basis,
                                 Grid1D const& x_grid)
{
  if (x.size() != basis.m())
    throw InvalidInput("onb_estimate: coefficient count does not match the basis");
  return GridFunction::sample(x_grid, [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      s += x[j] * basis.eval(j, t);
    return s;
  });
}

//! |f1|/(n1 (1 - e)) (2 tail + proj).
inline double onb_error_bound(double e_factor, double f1, double n1, double tail_norm,
                              double proj_err)
{
  if (!(e_factor < 1.0))
    throw BoundInapplicable("onb_error_bound: contraction factor " + std::to_string(e_factor)
                            + " is not below 1");
  return std::abs(f1) / (n1 * (1.0 - e_factor)) * (2.0 * tail_norm + proj_err);
}

} // namespace levyfield
