#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levyfield/model.hpp"
#include "levyfield/rng.hpp"
#include "support/oracles.hpp"

using namespace levyfield;
using Catch::Approx;

namespace {

SimpleKernel benchmark_kernel()
{
  return SimpleKernel({1.3, 0.2, 0.1, 0.1}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

TEST_CASE("forward Levy density of the benchmark kernel")
{
  auto law = JumpLaw::gaussian(0.0, 1.0);
  auto v0 = [&](double x) { return law.levy_density(x); };
  auto v1 = forward_levy_density(benchmark_kernel(), v0);
  for (double x : {-2.0, -0.3, 0.0, 0.05, 0.7, 3.1})
  {
    double ref = v0(x / 1.3) / 1.3 + v0(x / 0.2) / 0.2 + 2.0 * v0(x / 0.1) / 0.1;
    CHECK(v1(x) == Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("forward Levy density of trivial kernels")
{
  auto law = JumpLaw::gaussian(0.0, 1.0);
  auto v0 = [&](double x) { return law.levy_density(x); };
  auto id = forward_levy_density(SimpleKernel({1.0}), v0);
  for (double x : {-1.5, 0.0, 2.0})
    CHECK(id(x) == v0(x));
  auto two = forward_levy_density(SimpleKernel({2.0}), v0);
  CHECK(std::abs(two(0.0) - 0.19947) < 1e-5);
  CHECK(two(0.0) == Approx(0.5 / std::sqrt(2.0 * pi)).epsilon(1e-14));
}

TEST_CASE("forward map conserves Levy mass")
{
  for (auto law : {JumpLaw::gaussian(0.0, 1.0), JumpLaw::gaussian(0.5, 2.0, 3.0)})
  {
    auto kernel = SimpleKernel({1.3, 0.2, 0.1, 0.1}, {{0}, {1}, {2}, {3}}, {1.0, 0.5, 2.0, 1.0});
    auto v1 = forward_levy_density(kernel, [&](double x) { return law.levy_density(x); });
    double m = 0.0;
    for (int i = -40; i < 40; ++i)
      m += oracle::quad(v1, i, i + 1.0);
    double expect = kernel.total_volume() * law.mass();
    CHECK(std::abs(m - expect) / expect < 1e-6);
  }
}

TEST_CASE("forward Gaussian part")
{
  CHECK(forward_gaussian(benchmark_kernel(), 2.0) == Approx(3.5).epsilon(1e-14));
  CHECK(forward_gaussian(benchmark_kernel(), 0.0) == 0.0);
  CHECK(forward_gaussian(SimpleKernel({1.0}), 0.7) == 0.7);
  CHECK_THROWS_AS(forward_gaussian(benchmark_kernel(), -1.0), InvalidInput);
}

TEST_CASE("drift function U")
{
  auto g = JumpLaw::gaussian(0.0, 1.0);
  for (double u : {0.3, 2.0, -1.7, 5.0})
    CHECK(std::abs(u_function(u, 0.0, g)) < 1e-8);
  auto e = JumpLaw::exponential(1.0);
  for (double a0 : {-0.4, 0.0, 2.5})
  {
    CHECK(u_function(1.0, a0, e) == a0);
    CHECK(u_function(1.0, a0, g) == a0);
  }
  // int_{1/2}^{1} x e^{-x} dx with antiderivative -(x+1)e^{-x}
  double I = -2.0 * std::exp(-1.0) + 1.5 * std::exp(-0.5);
  CHECK(u_function(2.0, 1.0, e) == Approx(2.0 * (1.0 - I)).epsilon(1e-10));
}

TEST_CASE("forward drift")
{
  auto g = JumpLaw::gaussian(0.0, 1.0);
  CHECK(std::abs(forward_drift(benchmark_kernel(), 0.0, g)) < 1e-8);
  auto ones = SimpleKernel({1.0, 1.0, 1.0}, {}, {0.5, 1.0, 2.0});
  CHECK(forward_drift(ones, 0.3, JumpLaw::exponential(2.0)) == Approx(0.3 * 3.5).epsilon(1e-14));

  // U(f) = f (int_0^{1/f} x e^{-x} dx - int_0^1 x e^{-x} dx) for f > 0
  auto e = JumpLaw::exponential(1.0);
  auto xe = [](double x) { return x * std::exp(-x); };
  double ref = 0.0;
  for (double f : {1.3, 0.2, 0.1, 0.1})
  {
    double far = 0.0;
    for (double a = 0.0; a < 1.0 / f; a += 0.5)
      far += oracle::quad(xe, a, std::min(a + 0.5, 1.0 / f));
    ref += f * (far - oracle::quad(xe, 0.0, 1.0));
  }
  CHECK(std::abs(forward_drift(benchmark_kernel(), 0.0, e) - ref) < 1e-8);
}

TEST_CASE("recovery of drift and Gaussian variance")
{
  auto kernel = benchmark_kernel();
  auto g = JumpLaw::gaussian(0.0, 1.0);
  auto r = recover_a0_b0(kernel, 0.0, 3.5, g);
  CHECK(r.b0 == Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(r.a0) < 1e-8);
  CHECK_THROWS_AS(recover_a0_b0(SimpleKernel({1.0, -1.0}), 0.0, 1.0, g), SingularRecovery);
  auto a1 = forward_drift(kernel, 0.0, g);
  CHECK(std::abs(recover_a0_b0(kernel, a1, 0.0, g).a0) < 1e-8);
}

TEST_CASE("forward then recover is the identity")
{
  Stream rng(5);
  auto law = JumpLaw::exponential(1.0);
  for (int trial = 0; trial < 20; ++trial)
  {
    std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    std::vector<double> f(n), nu(n);
    for (std::size_t k = 0; k < n; ++k)
    {
      f[k] = (rng.uniform() < 0.3 ? -1.0 : 1.0) * (0.05 + 2.0 * rng.uniform());
      nu[k] = 0.2 + rng.uniform();
    }
    SimpleKernel kernel(f, {}, nu);
    if (std::abs(kernel.sum_f_nu()) < 0.05)
      continue;
    double a0 = 2.0 * rng.uniform() - 1.0, b0 = 3.0 * rng.uniform();
    auto r = recover_a0_b0(kernel, forward_drift(kernel, a0, law), forward_gaussian(kernel, b0), law);
    CHECK(std::abs(r.a0 - a0) < 1e-8);
    CHECK(std::abs(r.b0 - b0) < 1e-8);
  }
}

TEST_CASE("cumulant at zero")
{
  LevyTriplet t(0.4, 1.2, JumpLaw::exponential(1.0));
  CHECK(cumulant(t, 0.0) == cplx(0.0, 0.0));
  CHECK(charfn_x0(benchmark_kernel(), t, 0.0) == cplx(1.0, 0.0));
}

TEST_CASE("compound Poisson characteristic function matches the cumulant route")
{
  auto kernel = benchmark_kernel();
  for (auto law : {JumpLaw::gaussian(0.0, 1.0), JumpLaw::exponential(1.0), JumpLaw::gaussian(0.7, 0.5, 2.0)})
  {
    auto tri = compound_poisson_triplet(law);
    for (double u : {-3.0, -0.5, 0.25, 1.0, 4.0, 9.0})
      CHECK(std::abs(charfn_x0(kernel, tri, u) - cp_charfn(kernel, law, u)) < 1e-8);
  }
}

TEST_CASE("Gaussian-only characteristic function")
{
  auto kernel = benchmark_kernel();
  LevyTriplet t(0.0, 1.0, JumpLaw::none());
  for (double u : {0.3, 1.0, 2.5})
    CHECK(std::abs(charfn_x0(kernel, t, u) - std::exp(-0.5 * u * u * 1.75)) < 1e-14);
}

TEST_CASE("characteristic function is bounded and Hermitian")
{
  auto kernel = SimpleKernel({1.3, -0.2, 0.1}, {}, {1.0, 2.0, 0.5});
  LevyTriplet t(0.3, 0.5, JumpLaw::exponential(2.0, 1.5));
  for (double u = -6.0; u <= 6.0; u += 0.37)
  {
    auto p = charfn_x0(kernel, t, u);
    CHECK(std::abs(p) <= 1.0 + 1e-12);
    CHECK(std::abs(charfn_x0(kernel, t, -u) - std::conj(p)) < 1e-12);
  }
}

TEST_CASE("field moments")
{
  auto kernel = benchmark_kernel();
  auto g = JumpLaw::gaussian(0.0, 1.0);
  CHECK(field_moment(kernel, g, 1) == 0.0);
  CHECK(field_moment(kernel, g, 2) == Approx(1.75).epsilon(1e-14));
  // fourth cumulant 3 sum f^4 plus 3 (variance)^2
  double s4 = std::pow(1.3, 4) + std::pow(0.2, 4) + 2.0 * std::pow(0.1, 4);
  CHECK(field_moment(kernel, g, 4) == Approx(3.0 * s4 + 3.0 * 1.75 * 1.75).epsilon(1e-13));
  auto e = JumpLaw::exponential(1.0);
  CHECK(field_moment(kernel, e, 1) == Approx(1.7).epsilon(1e-14));
  CHECK(field_moment(kernel, e, 2) == Approx(3.5 + 1.7 * 1.7).epsilon(1e-14));
}

TEST_CASE("kernel groups and snapping")
{
  SimpleKernel k({1.0, 1.0 + 1e-14, 1.0 + 1e-9, 0.5}, {}, {1.0, 2.0, 1.0, 1.0});
  CHECK(k.groups().size() == 3);
  CHECK(k.n1() == 2);
  CHECK(k.pivot_mass() == 3.0);
  CHECK(k.coeffs()[1] == k.coeffs()[0]);
  CHECK(k.coeffs()[2] != k.coeffs()[0]);
  std::vector<int> seen(k.n(), 0);
  for (auto const& g : k.groups())
    for (auto i : g.members)
      ++seen[i];
  for (int s : seen)
    CHECK(s == 1);
  auto moved = k.with_pivot(3);
  CHECK(moved.pivot_value() == 0.5);
  CHECK(moved.n1() == 1);
  CHECK(moved.nonpivot_groups().size() == 2);
}

TEST_CASE("kernel validation")
{
  CHECK_THROWS_AS(SimpleKernel({1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(SimpleKernel(std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(SimpleKernel({1.0, 2.0}, {{0, 0}, {0, 0}}), InvalidInput);
  CHECK_THROWS_AS(SimpleKernel({1.0, 2.0}, {{0, 0}, {1}}), InvalidInput);
  CHECK_THROWS_AS(SimpleKernel({1.0}, {}, {0.0}), InvalidInput);
  CHECK_THROWS_AS(SimpleKernel({1.0}, {}, {}, 3), InvalidInput);
  CHECK(benchmark_kernel().m_range() == 1);
  CHECK(SimpleKernel({1.0, 2.0}, {{0, -2}, {3, 1}}).m_range() == 3);
  CHECK(benchmark_kernel().d() == 2);
}

TEST_CASE("power weights")
{
  WeightH odd(1.0, true), even(2.0, true), abs1(1.0, false), flat(0.0, false);
  CHECK(odd(-2.0) == -2.0);
  CHECK(abs1(-2.0) == 2.0);
  CHECK(flat(-3.0) == 1.0);
  for (double c : {-2.0, -0.5, 0.3, 4.0})
  {
    for (double x : {-1.3, 0.7, 2.0})
    {
      CHECK(odd.ratio(c) == Approx(odd(x) / odd(c * x)).epsilon(1e-14));
      CHECK(even.ratio(c) == Approx(even(x) / even(c * x)).epsilon(1e-14));
      CHECK(abs1.ratio(c) == Approx(abs1(x) / abs1(c * x)).epsilon(1e-14));
    }
    CHECK(odd.s(c) == Approx(1.0 / std::abs(c)).epsilon(1e-14));
    CHECK(odd.ratio(c) == Approx(oracle::weight_ratio(c, 1.0, true)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(WeightH(1.5, true), InvalidInput);
  CHECK_THROWS_AS(WeightH(-1.0, false), InvalidInput);
}

TEST_CASE("jump samplers match their laws")
{
  std::size_t n = 20000;
  double crit = 1.63 / std::sqrt(double(n));
  Stream rng(123);
  std::vector<double> xs(n);

  auto g = JumpLaw::gaussian(0.5, 2.0);
  for (auto& x : xs)
    x = g.sample(rng);
  CHECK(oracle::ks_statistic(xs, [](double x) { return normal_cdf((x - 0.5) / 2.0); }) < crit);

  auto e = JumpLaw::exponential(1.0);
  for (auto& x : xs)
    x = e.sample(rng);
  CHECK(oracle::ks_statistic(xs, exp_cdf) < crit);

  // triangle density on [0, 2], mass 3
  auto tg = Grid1D::trapezoid(0.0, 2.0, 401);
  auto t = JumpLaw::tabulated(GridFunction::sample(tg, [](double x) { return 3.0 * (1.0 - std::abs(x - 1.0)); }));
  CHECK(t.mass() == Approx(3.0).epsilon(1e-12));
  for (auto& x : xs)
    x = t.sample(rng);
  auto tri_cdf = [](double x) {
    if (x <= 0.0)
      return 0.0;
    if (x >= 2.0)
      return 1.0;
    return x <= 1.0 ? 0.5 * x * x : 1.0 - 0.5 * (2.0 - x) * (2.0 - x);
  };
  CHECK(oracle::ks_statistic(xs, tri_cdf) < crit);
}

TEST_CASE("jump law closed forms")
{
  auto e = JumpLaw::exponential(2.0);
  for (double u : {-1.0, 0.5, 3.0})
  {
    cplx ref(oracle::quad([&](double x) { return 2.0 * std::exp(-2.0 * x) * std::cos(u * x); }, 0.0, 40.0),
             oracle::quad([&](double x) { return 2.0 * std::exp(-2.0 * x) * std::sin(u * x); }, 0.0, 40.0));
    CHECK(std::abs(e.charfn(u) - ref) < 1e-10);
    double h = 1e-5;
    CHECK(std::abs(e.charfn_deriv(u) - (e.charfn(u + h) - e.charfn(u - h)) / (2.0 * h)) < 1e-8);
  }
  CHECK(e.moment(3) == Approx(6.0 / 8.0).epsilon(1e-14));
  auto tg = Grid1D::trapezoid(-6.0, 6.0, 2401);
  auto t = JumpLaw::tabulated(GridFunction::sample(tg, oracle::std_normal));
  CHECK(std::abs(t.charfn(1.0) - std::exp(-0.5)) < 1e-5);
  CHECK(std::abs(t.moment(2) - 1.0) < 1e-4);
  CHECK_THROWS_AS(JumpLaw::gaussian(0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(JumpLaw::exponential(-1.0), InvalidInput);
  CHECK_THROWS_AS(JumpLaw::tabulated(GridFunction(tg, std::vector<double>(tg.n(), -1.0))), InvalidInput);
}

TEST_CASE("tabulated law must cover the truncation window")
{
  auto tg = Grid1D::trapezoid(-0.5, 0.5, 101);
  auto t = JumpLaw::tabulated(GridFunction::sample(tg, [](double) { return 1.0; }));
  CHECK_THROWS_AS(u_function(0.5, 0.0, t), CoverageError);
}
