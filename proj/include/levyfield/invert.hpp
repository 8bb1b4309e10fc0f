#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "ecf.hpp"
#include "error.hpp"
#include "model.hpp"
#include "numcore.hpp"

namespace levyfield {

struct ContractionTerm
{
  std::size_t k;
  double s_k;
  double contribution;
};

struct ContractionReport
{
  double pivot_value;
  std::size_t n1;
  double pivot_mass;
  double e_factor;
  std::vector<ContractionTerm> per_term;
  bool satisfied;
};

//! e(f,h) = (1/n1) sum_{k not in Q} s_k (|f1|/|f_k|)^{1/2}, with each
//! term weighted by nu_k and n1 replaced by the pivot group's volume.
inline ContractionReport contraction_factor(SimpleKernel const& kernel, WeightH const& h)
{
  ContractionReport r;
  r.pivot_value = kernel.pivot_value();
  r.n1 = kernel.n1();
  r.pivot_mass = kernel.pivot_mass();
  double f1 = std::abs(r.pivot_value);
  double e = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
  {
    if (kernel.in_pivot_group(k))
      continue;
    double fk = kernel.coeffs()[k];
    double sk = h.s(r.pivot_value / fk);
    double c = kernel.volumes()[k] / r.pivot_mass * sk * std::sqrt(f1 / std::abs(fk));
    r.per_term.push_back({k, sk, c});
    e += c;
  }
  r.e_factor = e;
  r.satisfied = e < 1.0;
  return r;
}

//! Kernel with the pivot on the group of smallest e(f,h); ties go to the
//! larger |f|.
inline SimpleKernel choose_pivot(SimpleKernel const& kernel, WeightH const& h)
{
  SimpleKernel best = kernel.with_pivot(kernel.groups().front().members.front());
  double best_e = contraction_factor(best, h).e_factor;
  for (auto const& g : kernel.groups())
  {
    SimpleKernel cand = kernel.with_pivot(g.members.front());
    double e = contraction_factor(cand, h).e_factor;
    double tol = 1e-12 * std::max(1.0, std::abs(best_e));
    if (e < best_e - tol
        || (std::abs(e - best_e) <= tol && std::abs(g.value) > std::abs(best.pivot_value())))
    {
      best = cand;
      best_e = e;
    }
  }
  return best;
}

//! (1/n1) sum_{k not in Q} (|f_k|/|f1|)^beta, volume-weighted like
//! contraction_factor.
inline double fourier_condition(SimpleKernel const& kernel, double beta)
{
  double f1 = std::abs(kernel.pivot_value());
  double e = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
    if (!kernel.in_pivot_group(k))
      e += kernel.volumes()[k] / kernel.pivot_mass()
           * std::pow(std::abs(kernel.coeffs()[k]) / f1, beta);
  return e;
}

//! One merged term of the truncated solution series: all multi-indices
//! with the same multiset of non-pivot values.
struct SeriesTerm
{
  int depth;
  int sign;
  double scale;   //!< f1^{j+1} / prod f_i
  double weight;  //!< multinomial count times (|f1|/n1)^{j+1} prod nu_i/|f_i|
  std::vector<int> multiplicity;  //!< per non-pivot group
};

struct SeriesPlan
{
  double pivot_value;
  double pivot_mass;
  int n_N;
  std::vector<double> group_values;   //!< non-pivot values
  std::vector<double> group_volumes;  //!< their summed volumes
  std::vector<SeriesTerm> terms;
  bool contraction_ok;
  std::string warning;
};

namespace detail {
inline double binomial(int n, int k)
{
  if (k < 0 || k > n)
    return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i)
    r = r * double(n - k + i) / double(i);
  return r;
}

inline void compositions(int total, std::size_t parts, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out)
{
  if (parts == 0)
    return;
  if (cur.size() + 1 == parts)
  {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int m = total; m >= 0; --m)
  {
    cur.push_back(m);
    compositions(total - m, parts, cur, out);
    cur.pop_back();
  }
}
} // namespace detail

inline constexpr std::size_t default_term_budget = 2'000'000;

//! Grouped expansion of the series up to depth n_N, ordered by
//! (depth, scale) so that summation order is fixed.
inline SeriesPlan build_series_plan(SimpleKernel const& kernel, WeightH const& h, int n_N,
                                    std::size_t term_budget = default_term_budget)
{
  if (n_N < 0)
    throw InvalidInput("build_series_plan: n_N must be nonnegative");
  SeriesPlan plan;
  plan.pivot_value = kernel.pivot_value();
  plan.pivot_mass = kernel.pivot_mass();
  plan.n_N = n_N;
  for (auto const& g : kernel.nonpivot_groups())
  {
    plan.group_values.push_back(g.value);
    plan.group_volumes.push_back(g.volume);
  }
  auto rep = contraction_factor(kernel, h);
  plan.contraction_ok = rep.satisfied;
  if (!rep.satisfied)
    plan.warning = "contraction condition not satisfied (e = " + std::to_string(rep.e_factor) + ")";

  std::size_t G = plan.group_values.size();
  double count = 0.0;
  for (int j = 0; j <= n_N; ++j)
    count += G == 0 ? (j == 0 ? 1.0 : 0.0) : detail::binomial(j + int(G) - 1, int(G) - 1);
  if (count > double(term_budget))
    throw ResourceError("build_series_plan: " + std::to_string(static_cast<long long>(count))
                        + " terms exceed the budget of " + std::to_string(term_budget)
                        + "; use a smaller n_N");

  double f1 = plan.pivot_value;
  double base = std::abs(f1) / plan.pivot_mass;
  plan.terms.push_back({0, 1, f1, base, std::vector<int>(G, 0)});
  if (G == 0)
    return plan;
  for (int j = 1; j <= n_N; ++j)
  {
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    detail::compositions(j, G, cur, comps);
    std::vector<SeriesTerm> level;
    for (auto const& m : comps)
    {
      double w = std::pow(base, j + 1);
      double scale = std::pow(f1, j + 1);
      int left = j;
      for (std::size_t g = 0; g < G; ++g)
      {
        w *= detail::binomial(left, m[g]);
        left -= m[g];
        w *= std::pow(plan.group_volumes[g] / std::abs(plan.group_values[g]), m[g]);
        scale /= std::pow(plan.group_values[g], m[g]);
      }
      level.push_back({j, j % 2 == 0 ? 1 : -1, scale, w, m});
    }
    std::stable_sort(level.begin(), level.end(), [](SeriesTerm const& a, SeriesTerm const& b) {
      return std::tie(a.scale, a.multiplicity) < std::tie(b.scale, b.multiplicity);
    });
    plan.terms.insert(plan.terms.end(), level.begin(), level.end());
  }
  return plan;
}

//! Plug-in value at x: sum_t sign_t weight_t h(x)/h(c_t x) g1(c_t x).
template<class G1>
double evaluate_series(SeriesPlan const& plan, WeightH const& h, G1 const& g1, double x)
{
  double s = 0.0;
  for (auto const& t : plan.terms)
    s += double(t.sign) * t.weight * h.ratio(t.scale) * g1(t.scale * x);
  return s;
}

//! Truncated series estimate of g0 on x_grid from an estimate of g1.
template<class G1>
GridFunction plugin_estimate(G1 const& g1, SeriesPlan const& plan, WeightH const& h,
                             Grid1D const& x_grid)
{
  std::vector<double> v(x_grid.n());
  for (std::size_t i = 0; i < x_grid.n(); ++i)
    v[i] = evaluate_series(plan, h, g1, x_grid.node(i));
  return GridFunction(x_grid, std::move(v));
}

template<class G1>
GridFunction plugin_estimate(G1 const& g1, SimpleKernel const& kernel, WeightH const& h, int n_N,
                             Grid1D const& x_grid)
{
  return plugin_estimate(g1, build_series_plan(kernel, h, n_N), h, x_grid);
}

//! (|f1|^{1/2}/n1) s(f1) [(1 + sum_{j<=n_N} e^j) err + e^{n_N+1} ||g1|| / (1-e)].
inline double plugin_error_bound(double e_factor, double s_f1, double f1, double n1, int n_N,
                                 double err_g1, double norm_g1)
{
  if (!(e_factor < 1.0))
    throw BoundInapplicable("plugin_error_bound: contraction factor " + std::to_string(e_factor)
                            + " is not below 1");
  double geo = 1.0, p = 1.0;
  for (int j = 1; j <= n_N; ++j)
  {
    p *= e_factor;
    geo += p;
  }
  double tail = std::pow(e_factor, n_N + 1) * norm_g1 / (1.0 - e_factor);
  return std::sqrt(std::abs(f1)) / n1 * s_f1 * (geo * err_g1 + tail);
}

//! Fourier transform of the series estimate on a u-grid:
//! sum_t sign_t weight_t h(x)/h(c_t x) (1/|c_t|) F_hat[g1](u / c_t).
//! Valid for power weights, where the ratio does not depend on x.
template<class FG1>
ComplexGridFunction fourier_g0_hat(FG1 const& Fg1, SeriesPlan const& plan, WeightH const& h,
                                   Grid1D const& u_grid)
{
  std::vector<cplx> v(u_grid.n(), cplx{});
  for (std::size_t k = 0; k < u_grid.n(); ++k)
  {
    double u = u_grid.node(k);
    cplx s{};
    for (auto const& t : plan.terms)
      s += double(t.sign) * t.weight * h.ratio(t.scale) / std::abs(t.scale) * cplx(Fg1(u / t.scale));
    v[k] = s;
  }
  return ComplexGridFunction(u_grid, std::move(v));
}

//! Largest |u / c_t| needed for |u| <= r.
inline double fourier_reach(SeriesPlan const& plan, double r)
{
  double m = 0.0;
  for (auto const& t : plan.terms)
    m = std::max(m, r / std::abs(t.scale));
  return m;
}

namespace detail {
inline void require_power_weight(WeightH const& h)
{
  if (!h.is_signed())
    throw InvalidInput("fourier_estimate: needs h(x) = x^beta with integer beta");
}
} // namespace detail

inline constexpr std::size_t default_u_points = 4097;

//! g0_hat_l(x) = (1/2pi) int_{-pi l}^{pi l} e^{-ixu} F_hat[g0](u) du, with
//! F_hat[g1] given as a callable.
template<class FG1>
GridFunction fourier_estimate(FG1 const& Fg1, SeriesPlan const& plan, WeightH const& h, double l,
                              Grid1D const& x_grid, std::size_t u_points = default_u_points)
{
  detail::require_power_weight(h);
  if (!(l > 0.0))
    throw InvalidInput("fourier_estimate: cutoff l must be positive");
  auto ug = Grid1D::symmetric(pi * l, u_points);
  return fourier_inverse_truncated(fourier_g0_hat(Fg1, plan, h, ug), x_grid).values;
}

//! Same, with F_hat[g1] tabulated; its grid must reach every scaled node.
inline GridFunction fourier_estimate(ComplexGridFunction const& Fg1, SeriesPlan const& plan,
                                     WeightH const& h, double l, Grid1D const& x_grid,
                                     std::size_t u_points = default_u_points)
{
  double need = fourier_reach(plan, pi * l);
  auto const& g = Fg1.grid();
  double tol = 1e-9 * std::max(1.0, need);
  if (g.lo() > -need + tol || g.hi() < need - tol)
    throw CoverageError("fourier_estimate: transform known on [" + std::to_string(g.lo()) + ", "
                        + std::to_string(g.hi()) + "] but [-" + std::to_string(need) + ", "
                        + std::to_string(need) + "] is needed");
  auto read = [&](double u) {
    if (u < g.lo())
      u = g.lo();
    if (u > g.hi())
      u = g.hi();
    return Fg1(u);
  };
  return fourier_estimate(read, plan, h, l, x_grid, u_points);
}

//! Same estimate, with F_hat[g1] requested one grid at a time: for each
//! series term, `source(g)` returns F_hat[g1] at the nodes of
//! g = symmetric(pi l / |c_t|), which are exactly the points u / c_t.
template<class Source>
GridFunction fourier_estimate_gridwise(Source const& source, SeriesPlan const& plan,
                                       WeightH const& h, double l, Grid1D const& x_grid,
                                       std::size_t u_points = default_u_points)
{
  detail::require_power_weight(h);
  if (!(l > 0.0))
    throw InvalidInput("fourier_estimate: cutoff l must be positive");
  auto ug = Grid1D::symmetric(pi * l, u_points);
  std::size_t n = ug.n();
  std::vector<cplx> acc(n, cplx{});
  for (auto const& t : plan.terms)
  {
    double c = t.scale;
    ComplexGridFunction F = source(Grid1D::symmetric(pi * l / std::abs(c), n));
    if (F.size() != n)
      throw InvalidInput("fourier_estimate: source returned the wrong number of nodes");
    double coef = double(t.sign) * t.weight * h.ratio(c) / std::abs(c);
    for (std::size_t k = 0; k < n; ++k)
      acc[k] += coef * F[c > 0.0 ? k : n - 1 - k];
  }
  return fourier_inverse_truncated(ComplexGridFunction(ug, std::move(acc)), x_grid).values;
}

//! (1/(n1|f1|^beta)) (err(l/|f1|) + E^{n_N+1}/(1-E) ||g1|| +
//! sum_j sum_{i_1..i_j} s_{i_1}..s_{i_j}/n1^j err(|prod f/f1^{j+1}| l)),
//! with E = fourier_condition and s_k = (|f_k|/|f1|)^beta.
inline double fourier_error_bound(SimpleKernel const& kernel, double beta, int n_N, double l,
                                  std::function<double(double)> const& err, double norm_g1)
{
  double E = fourier_condition(kernel, beta);
  if (!(E < 1.0))
    throw BoundInapplicable("fourier_error_bound: condition value " + std::to_string(E)
                            + " is not below 1");
  auto plan = build_series_plan(kernel, WeightH(beta, true), n_N);
  double f1 = std::abs(plan.pivot_value);
  double w1 = plan.pivot_mass;
  double total = err(l / f1) + std::pow(E, n_N + 1) / (1.0 - E) * norm_g1;
  for (auto const& t : plan.terms)
  {
    if (t.depth == 0)
      continue;
    double c = 1.0;
    int left = t.depth;
    for (std::size_t g = 0; g < plan.group_values.size(); ++g)
    {
      double s = std::pow(std::abs(plan.group_values[g]) / f1, beta);
      c *= detail::binomial(left, t.multiplicity[g])
           * std::pow(s * plan.group_volumes[g] / w1, t.multiplicity[g]);
      left -= t.multiplicity[g];
    }
    total += c * err(l / std::abs(t.scale));
  }
  return total / (w1 * std::pow(f1, beta));
}

//! Right-hand side of the integral equation:
//! g1(x) = sum_k (nu_k/|f_k|) h(x)/h(x/f_k) g0(x/f_k).
template<class G0>
auto forward_operator(G0 g0, SimpleKernel const& kernel, WeightH const& h)
{
  return [g0, kernel, h](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < kernel.n(); ++k)
    {
      double f = kernel.coeffs()[k];
      s += kernel.volumes()[k] / std::abs(f) * h.ratio(1.0 / f) * g0(x / f);
    }
    return s;
  };
}

} // namespace levyfield
