#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <type_traits>
#include <vector>

#include "error.hpp"
#include "numcore.hpp"
#include "rng.hpp"

namespace levyfield {

//! Jump law of the compound Poisson integrator: a probability law for the
//! jump sizes Y together with the total Levy mass lambda, so that the Levy
//! density is v0 = lambda * p_Y.
class JumpLaw
{
public:
  enum class Kind
  {
    none,
    gaussian,
    exponential,
    tabulated
  };

  JumpLaw() = default;

  static JumpLaw none()
  {
    JumpLaw j;
    j.kind_ = Kind::none;
    j.mass_ = 0.0;
    return j;
  }

  static JumpLaw gaussian(double mean, double sd, double mass = 1.0)
  {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd))
      throw InvalidInput("gaussian jump law: need finite mean and sd > 0");
    check_mass(mass);
    JumpLaw j;
    j.kind_ = Kind::gaussian;
    j.p1_ = mean;
    j.p2_ = sd;
    j.mass_ = mass;
    return j;
  }

  static JumpLaw exponential(double rate, double mass = 1.0)
  {
    if (!(rate > 0.0) || !std::isfinite(rate))
      throw InvalidInput("exponential jump law: need rate > 0");
    check_mass(mass);
    JumpLaw j;
    j.kind_ = Kind::exponential;
    j.p1_ = rate;
    j.mass_ = mass;
    return j;
  }

  //! Levy density given on a grid. The total mass is its integral; jumps
  //! are drawn by inverting the piecewise-linear CDF.
  static JumpLaw tabulated(GridFunction levy_density)
  {
    for (double v : levy_density.values())
      if (v < 0.0)
        throw InvalidInput("tabulated jump law: density must be nonnegative");
    if (levy_density.grid().rule() != Rule::trapezoid)
      throw InvalidInput("tabulated jump law: density must use a trapezoid grid");
    JumpLaw j;
    j.kind_ = Kind::tabulated;
    auto const& g = levy_density.grid();
    std::vector<double> cdf(g.n(), 0.0);
    double h = g.spacing();
    for (std::size_t i = 1; i < g.n(); ++i)
      cdf[i] = cdf[i - 1] + 0.5 * h * (levy_density[i - 1] + levy_density[i]);
    j.mass_ = cdf.back();
    check_mass(j.mass_);
    if (!(j.mass_ > 0.0))
      throw InvalidInput("tabulated jump law: density integrates to zero");
    j.table_ = std::move(levy_density);
    j.cdf_ = std::move(cdf);
    return j;
  }

  Kind kind() const { return kind_; }
  double mass() const { return mass_; }
  double mean_param() const { return p1_; }
  double sd_param() const { return p2_; }
  double rate_param() const { return p1_; }
  GridFunction const& table() const { return table_; }

  std::string name() const
  {
    switch (kind_)
    {
      case Kind::none: return "none";
      case Kind::gaussian: return "gaussian";
      case Kind::exponential: return "exponential";
      case Kind::tabulated: return "tabulated";
    }
    return "unknown";
  }

  //! Probability density of a single jump.
  double jump_density(double x) const
  {
    switch (kind_)
    {
      case Kind::none: return 0.0;
      case Kind::gaussian:
      {
        double z = (x - p1_) / p2_;
        return std::exp(-0.5 * z * z) / (p2_ * std::sqrt(2.0 * pi));
      }
      case Kind::exponential: return x < 0.0 ? 0.0 : p1_ * std::exp(-p1_ * x);
      case Kind::tabulated: return table_(x) / mass_;
    }
    return 0.0;
  }

  double levy_density(double x) const { return mass_ * jump_density(x); }

  //! Interval outside which the density is negligible (or zero).
  std::pair<double, double> support() const
  {
    switch (kind_)
    {
      case Kind::none: return {0.0, 0.0};
      case Kind::gaussian: return {p1_ - 12.0 * p2_, p1_ + 12.0 * p2_};
      case Kind::exponential: return {0.0, 50.0 / p1_};
      case Kind::tabulated: return {table_.grid().lo(), table_.grid().hi()};
    }
    return {0.0, 0.0};
  }

  //! Length scale used to size quadrature panels.
  double scale() const
  {
    switch (kind_)
    {
      case Kind::gaussian: return p2_;
      case Kind::exponential: return 1.0 / p1_;
      case Kind::tabulated: return table_.grid().spacing() * 4.0;
      default: return 1.0;
    }
  }

  //! Characteristic function E exp(iuY) of one jump.
  cplx charfn(double u) const
  {
    switch (kind_)
    {
      case Kind::none: return 1.0;
      case Kind::gaussian:
        return std::exp(cplx(-0.5 * p2_ * p2_ * u * u, p1_ * u));
      case Kind::exponential: return p1_ / cplx(p1_, -u);
      case Kind::tabulated:
        return integrate_jumps([u](double x) { return std::polar(1.0, u * x); },
                               support().first, support().second, u);
    }
    return 1.0;
  }

  //! Derivative of charfn with respect to u.
  cplx charfn_deriv(double u) const
  {
    switch (kind_)
    {
      case Kind::none: return 0.0;
      case Kind::gaussian: return cplx(-p2_ * p2_ * u, p1_) * charfn(u);
      case Kind::exponential:
      {
        cplx d = cplx(p1_, -u);
        return cplx(0.0, p1_) / (d * d);
      }
      case Kind::tabulated:
        return integrate_jumps(
          [u](double x) { return cplx(0.0, x) * std::polar(1.0, u * x); },
          support().first, support().second, u);
    }
    return 0.0;
  }

  //! Raw moment E[Y^k] of a single jump, k = 1..4.
  double moment(int k) const
  {
    switch (kind_)
    {
      case Kind::none: return 0.0;
      case Kind::gaussian:
      {
        double m = p1_, s2 = p2_ * p2_;
        switch (k)
        {
          case 1: return m;
          case 2: return m * m + s2;
          case 3: return m * m * m + 3.0 * m * s2;
          case 4: return m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2;
        }
        break;
      }
      case Kind::exponential:
      {
        double f = 1.0;
        for (int i = 2; i <= k; ++i)
          f *= i;
        return f / std::pow(p1_, k);
      }
      case Kind::tabulated:
        return integrate_jumps([k](double x) { return std::pow(x, k); },
                               support().first, support().second, 0.0);
    }
    throw InvalidInput("moment: order must be 1..4");
  }

  //! Draw one jump.
  double sample(Stream& s) const
  {
    switch (kind_)
    {
      case Kind::none: return 0.0;
      case Kind::gaussian: return p1_ + p2_ * s.normal();
      case Kind::exponential: return s.exponential(p1_);
      case Kind::tabulated: return sample_table(s.uniform());
    }
    return 0.0;
  }

  //! int_a^b F(x) v0(x) dx (Levy density, not the jump density), with
  //! panel breakpoints at -1, 0, 1 and panels no wider than the law's
  //! scale or the half period of frequency `freq`.
  template<class F, class R = std::invoke_result_t<F&, double>>
  R integrate_levy(F&& f, double a, double b, double freq = 0.0) const
  {
    R total{};
    if (kind_ == Kind::none)
      return total;
    auto [slo, shi] = support();
    a = std::max(a, slo);
    b = std::min(b, shi);
    if (!(b > a))
      return total;
    double width = std::min(0.5 * scale(), 1.0);
    if (freq != 0.0)
      width = std::min(width, 1.0 / std::abs(freq));
    std::vector<double> cuts{a};
    for (double c : {-1.0, 0.0, 1.0})
      if (c > a && c < b)
        cuts.push_back(c);
    cuts.push_back(b);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
      double lo = cuts[i], hi = cuts[i + 1];
      auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / width));
      total += integrate([&](double x) { return f(x) * levy_density(x); }, lo, hi, panels);
    }
    return total;
  }

private:
  static void check_mass(double mass)
  {
    if (!(mass >= 0.0) || !std::isfinite(mass))
      throw InvalidInput("jump law: total mass must be finite and nonnegative");
  }

  template<class F, class R = std::invoke_result_t<F&, double>>
  R integrate_jumps(F&& f, double a, double b, double freq) const
  {
    return integrate_levy(std::forward<F>(f), a, b, freq) / mass_;
  }

  double sample_table(double u) const
  {
    double target = u * mass_;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t i = it == cdf_.begin() ? 0 : std::size_t(it - cdf_.begin()) - 1;
    auto const& g = table_.grid();
    if (i + 1 >= cdf_.size())
      return g.hi();
    double d = cdf_[i + 1] - cdf_[i];
    double r = d > 0.0 ? (target - cdf_[i]) / d : 0.0;
    return g.node(i) + r * g.spacing();
  }

  Kind kind_ = Kind::none;
  double p1_ = 0.0;
  double p2_ = 0.0;
  double mass_ = 0.0;
  GridFunction table_;
  std::vector<double> cdf_;
};

//! Drift a, Gaussian variance b and Levy density v.
struct LevyTriplet
{
  double a = 0.0;
  double b = 0.0;
  JumpLaw v = JumpLaw::none();

  LevyTriplet() = default;
  LevyTriplet(double a_, double b_, JumpLaw v_) : a(a_), b(b_), v(std::move(v_))
  {
    if (!std::isfinite(a) || !(b >= 0.0) || !std::isfinite(b))
      throw InvalidInput("LevyTriplet: need finite a and b >= 0");
  }
};

//! Weight h(x) = x^beta (signed, integer beta) or |x|^beta.
class WeightH
{
public:
  WeightH() = default;
  WeightH(double beta, bool is_signed) : beta_(beta), signed_(is_signed)
  {
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw InvalidInput("WeightH: beta must be a finite nonnegative number");
    if (is_signed && beta != std::floor(beta))
      throw InvalidInput("WeightH: signed weights need an integer beta");
  }

  static WeightH identity() { return WeightH(1.0, true); }

  double beta() const { return beta_; }
  bool is_signed() const { return signed_; }
  bool odd() const { return signed_ && static_cast<long>(beta_) % 2 != 0; }

  double operator()(double x) const
  {
    if (beta_ == 0.0)
      return 1.0;
    if (signed_)
      return std::pow(x, beta_);
    return std::pow(std::abs(x), beta_);
  }

  //! h(x) / h(c x), which for power weights does not depend on x.
  double ratio(double c) const
  {
    double r = std::pow(std::abs(c), -beta_);
    if (odd() && c < 0.0)
      r = -r;
    return r;
  }

  //! s(y) = sup_x |h(x)| / |h(y x)| = |y|^{-beta}.
  double s(double y) const { return std::pow(std::abs(y), -beta_); }

private:
  double beta_ = 1.0;
  bool signed_ = true;
};

//! f = sum_k f_k 1{c_k + [0,1)^d}, with cell volumes and a pivot group.
class SimpleKernel
{
public:
  struct Group
  {
    double value;
    std::vector<std::size_t> members;
    double volume;  //!< sum of member volumes
  };

  SimpleKernel() = default;

  SimpleKernel(std::vector<double> coeffs, std::vector<std::vector<long>> offsets = {},
               std::vector<double> volumes = {}, std::size_t pivot_index = 0)
    : coeffs_(std::move(coeffs)), offsets_(std::move(offsets)), volumes_(std::move(volumes))
  {
    std::size_t n = coeffs_.size();
    if (n == 0)
      throw InvalidInput("SimpleKernel: need at least one coefficient");
    for (double c : coeffs_)
      if (!std::isfinite(c) || c == 0.0)
        throw InvalidInput("SimpleKernel: coefficients must be finite and nonzero");
    if (offsets_.empty())
      for (std::size_t k = 0; k < n; ++k)
        offsets_.push_back({static_cast<long>(k)});
    if (offsets_.size() != n)
      throw InvalidInput("SimpleKernel: one offset per coefficient required");
    d_ = offsets_.front().size();
    if (d_ == 0)
      throw InvalidInput("SimpleKernel: offsets need at least one dimension");
    for (auto const& o : offsets_)
      if (o.size() != d_)
        throw InvalidInput("SimpleKernel: offsets have inconsistent dimension");
    if (std::set<std::vector<long>>(offsets_.begin(), offsets_.end()).size() != n)
      throw InvalidInput("SimpleKernel: offsets must be pairwise distinct");
    if (volumes_.empty())
      volumes_.assign(n, 1.0);
    if (volumes_.size() != n)
      throw InvalidInput("SimpleKernel: one volume per coefficient required");
    for (double v : volumes_)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidInput("SimpleKernel: volumes must be positive");
    if (pivot_index >= n)
      throw InvalidInput("SimpleKernel: pivot index out of range");

    // Snap coefficients equal within relative 1e-12 onto one value.
    for (std::size_t k = 0; k < n; ++k)
    {
      bool placed = false;
      for (auto& g : groups_)
      {
        if (std::abs(coeffs_[k] - g.value) <= 1e-12 * std::max(std::abs(coeffs_[k]), std::abs(g.value)))
        {
          coeffs_[k] = g.value;
          g.members.push_back(k);
          g.volume += volumes_[k];
          placed = true;
          break;
        }
      }
      if (!placed)
        groups_.push_back({coeffs_[k], {k}, volumes_[k]});
    }
    for (std::size_t g = 0; g < groups_.size(); ++g)
      for (std::size_t k : groups_[g].members)
        if (k == pivot_index)
          pivot_group_ = g;

    m_range_ = 0;
    for (std::size_t a = 0; a < d_; ++a)
    {
      long lo = offsets_[0][a], hi = offsets_[0][a];
      for (auto const& o : offsets_)
      {
        lo = std::min(lo, o[a]);
        hi = std::max(hi, o[a]);
      }
      m_range_ = std::max(m_range_, hi - lo);
    }
  }

  //! Same kernel with the pivot moved to the group of coefficient `index`.
  SimpleKernel with_pivot(std::size_t index) const
  {
    return SimpleKernel(coeffs_, offsets_, volumes_, index);
  }

  std::size_t n() const { return coeffs_.size(); }
  std::size_t d() const { return d_; }
  std::vector<double> const& coeffs() const { return coeffs_; }
  std::vector<std::vector<long>> const& offsets() const { return offsets_; }
  std::vector<double> const& volumes() const { return volumes_; }
  std::vector<Group> const& groups() const { return groups_; }
  std::size_t pivot_group() const { return pivot_group_; }
  std::size_t pivot_index() const { return groups_[pivot_group_].members.front(); }
  double pivot_value() const { return groups_[pivot_group_].value; }
  std::vector<std::size_t> const& pivot_members() const { return groups_[pivot_group_].members; }
  std::size_t n1() const { return pivot_members().size(); }
  //! Total cell volume of the pivot group; equals n1 for unit cells.
  double pivot_mass() const { return groups_[pivot_group_].volume; }
  long m_range() const { return m_range_; }

  bool in_pivot_group(std::size_t k) const { return coeffs_[k] == pivot_value(); }

  //! Groups other than the pivot group, in order of first appearance.
  std::vector<Group> nonpivot_groups() const
  {
    std::vector<Group> out;
    for (std::size_t g = 0; g < groups_.size(); ++g)
      if (g != pivot_group_)
        out.push_back(groups_[g]);
    return out;
  }

  double sum_f_nu() const
  {
    double s = 0.0;
    for (std::size_t k = 0; k < n(); ++k)
      s += coeffs_[k] * volumes_[k];
    return s;
  }

  double sum_f2_nu() const
  {
    double s = 0.0;
    for (std::size_t k = 0; k < n(); ++k)
      s += coeffs_[k] * coeffs_[k] * volumes_[k];
    return s;
  }

  double total_volume() const
  {
    double s = 0.0;
    for (double v : volumes_)
      s += v;
    return s;
  }

private:
  std::vector<double> coeffs_;
  std::vector<std::vector<long>> offsets_;
  std::vector<double> volumes_;
  std::size_t d_ = 1;
  std::vector<Group> groups_;
  std::size_t pivot_group_ = 0;
  long m_range_ = 0;
};

//! v1(x) = sum_k (nu_k / |f_k|) v0(x / f_k).
template<class V0>
auto forward_levy_density(SimpleKernel const& kernel, V0 v0)
{
  return [kernel, v0](double x) {
    double s = 0.0;
    for (std::size_t k = 0; k < kernel.n(); ++k)
    {
      double f = kernel.coeffs()[k];
      s += kernel.volumes()[k] / std::abs(f) * v0(x / f);
    }
    return s;
  };
}

inline double forward_gaussian(SimpleKernel const& kernel, double b0)
{
  if (!(b0 >= 0.0))
    throw InvalidInput("forward_gaussian: b0 must be nonnegative");
  return b0 * kernel.sum_f2_nu();
}

namespace detail {
//! int x [1{|ux| <= 1} - 1{|x| <= 1}] v0(x) dx.
inline double u_integral(double u, JumpLaw const& v0)
{
  double au = std::abs(u);
  if (au == 1.0 || v0.kind() == JumpLaw::Kind::none)
    return 0.0;
  auto id = [](double x) { return x; };
  if (v0.kind() == JumpLaw::Kind::tabulated)
  {
    double reach = au == 0.0 ? std::numeric_limits<double>::infinity()
                             : std::max(1.0, 1.0 / au);
    auto const& t = v0.table();
    bool left_ok = t.grid().lo() <= -reach || t.values().front() == 0.0;
    bool right_ok = t.grid().hi() >= reach || t.values().back() == 0.0;
    if (!left_ok || !right_ok)
      throw CoverageError("u_function: tabulated density does not cover [-"
                          + std::to_string(reach) + ", " + std::to_string(reach) + "]");
  }
  if (au == 0.0)
  {
    auto [lo, hi] = v0.support();
    return v0.integrate_levy(id, lo, -1.0) + v0.integrate_levy(id, 1.0, hi);
  }
  double r = 1.0 / au;
  if (au > 1.0)
    return -(v0.integrate_levy(id, r, 1.0) + v0.integrate_levy(id, -1.0, -r));
  return v0.integrate_levy(id, 1.0, r) + v0.integrate_levy(id, -r, -1.0);
}
} // namespace detail

//! U(u) = u (a0 + int x [1{|ux| <= 1} - 1{|x| <= 1}] v0(x) dx).
inline double u_function(double u, double a0, JumpLaw const& v0)
{
  if (u == 0.0)
    return 0.0;
  return u * (a0 + detail::u_integral(u, v0));
}

inline double forward_drift(SimpleKernel const& kernel, double a0, JumpLaw const& v0)
{
  double s = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
    s += u_function(kernel.coeffs()[k], a0, v0) * kernel.volumes()[k];
  return s;
}

struct DriftVariance
{
  double a0;
  double b0;
};

//! Inverts (forward_drift, forward_gaussian) for a known v0.
inline DriftVariance recover_a0_b0(SimpleKernel const& kernel, double a1, double b1,
                                   JumpLaw const& v0)
{
  double s1 = kernel.sum_f_nu();
  double scale = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
    scale += std::abs(kernel.coeffs()[k]) * kernel.volumes()[k];
  if (std::abs(s1) <= 1e-12 * scale)
    throw SingularRecovery("recover_a0_b0: sum f_k nu_k vanishes, a0 is not identifiable");
  if (!(b1 >= 0.0))
    throw InvalidInput("recover_a0_b0: b1 must be nonnegative");
  double b0 = b1 / kernel.sum_f2_nu();
  double rest = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
  {
    double f = kernel.coeffs()[k];
    rest += kernel.volumes()[k] * f * detail::u_integral(f, v0);
  }
  return {(a1 - rest) / s1, b0};
}

//! K(t) = ita - t^2 b / 2 + int (e^{itx} - 1 - itx 1{|x| <= 1}) v(x) dx.
inline cplx cumulant(LevyTriplet const& tri, double t)
{
  if (t == 0.0)
    return 0.0;
  cplx k(-0.5 * t * t * tri.b, t * tri.a);
  if (tri.v.kind() != JumpLaw::Kind::none)
  {
    auto [lo, hi] = tri.v.support();
    k += tri.v.integrate_levy(
      [t](double x) {
        double trunc = std::abs(x) <= 1.0 ? t * x : 0.0;
        return cplx(std::cos(t * x) - 1.0, std::sin(t * x) - trunc);
      },
      lo, hi, t);
  }
  return k;
}

//! Characteristic function of X(0): exp(sum_k nu_k K(u f_k)).
inline cplx charfn_x0(SimpleKernel const& kernel, LevyTriplet const& tri, double u)
{
  cplx s = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
    s += kernel.volumes()[k] * cumulant(tri, u * kernel.coeffs()[k]);
  return std::exp(s);
}

//! Pure-jump triplet of a compound Poisson integrator, with drift
//! a0 = int_{-1}^{1} x v0(x) dx so that the cumulant has no linear term.
inline LevyTriplet compound_poisson_triplet(JumpLaw const& law)
{
  double a0 = law.integrate_levy([](double x) { return x; }, -1.0, 1.0);
  return LevyTriplet(a0, 0.0, law);
}

//! Closed form of charfn_x0 for compound Poisson cells:
//! exp(sum_k nu_k lambda (phi_Y(u f_k) - 1)).
inline cplx cp_charfn(SimpleKernel const& kernel, JumpLaw const& law, double u)
{
  cplx s = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
    s += kernel.volumes()[k] * law.mass() * (law.charfn(u * kernel.coeffs()[k]) - 1.0);
  return std::exp(s);
}

//! Fourier transform of g1 = x v1 in closed form: -i psi'(u) / psi(u).
inline cplx exact_fourier_g1(SimpleKernel const& kernel, JumpLaw const& law, double u)
{
  cplx s = 0.0;
  for (std::size_t k = 0; k < kernel.n(); ++k)
  {
    double f = kernel.coeffs()[k];
    s += kernel.volumes()[k] * law.mass() * f * law.charfn_deriv(u * f);
  }
  return cplx(0.0, -1.0) * s;
}

//! Raw moments E X(0)^k, k = 1..4, of the compound Poisson field.
inline double field_moment(SimpleKernel const& kernel, JumpLaw const& law, int k)
{
  double c[5] = {0, 0, 0, 0, 0};
  for (int n = 1; n <= 4; ++n)
    for (std::size_t j = 0; j < kernel.n(); ++j)
      c[n] += kernel.volumes()[j] * law.mass() * std::pow(kernel.coeffs()[j], n) * law.moment(n);
  switch (k)
  {
    case 1: return c[1];
    case 2: return c[2] + c[1] * c[1];
    case 3: return c[3] + 3.0 * c[2] * c[1] + c[1] * c[1] * c[1];
    case 4:
      return c[4] + 4.0 * c[3] * c[1] + 3.0 * c[2] * c[2] + 6.0 * c[2] * c[1] * c[1]
             + c[1] * c[1] * c[1] * c[1];
  }
  throw InvalidInput("field_moment: order must be 1..4");
}

//! g(x) = h(x) v(x) for a density evaluator v.
template<class V>
auto weighted(WeightH h, V v)
{
  return [h, v](double x) { return h(x) * v(x); };
}

} // namespace levyfield
