#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace levyfield {

//! One step of the splitmix64 generator, used to mix seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Seed of substream `index` under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

//! Portable random stream.
//!
//! The standard library distributions are implementation-defined, so every
//! variate here is built from raw mt19937_64 output. Results depend only on
//! the seed and the call sequence.
class Stream
{
public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  //! Standard normal by the Marsaglia polar method.
  double normal()
  {
    if (has_spare_)
    {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do
    {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  //! Poisson variate: inversion for small means, PTRS rejection otherwise.
  std::uint64_t poisson(double mu)
  {
    if (!(mu > 0.0))
      return 0;
    if (mu < 30.0)
      return poisson_inversion(mu);
    return poisson_ptrs(mu);
  }

  std::mt19937_64& engine() { return eng_; }

private:
  std::uint64_t poisson_inversion(double mu)
  {
    double p = std::exp(-mu);
    double cdf = p;
    double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf)
    {
      ++k;
      p *= mu / double(k);
      cdf += p;
      if (p == 0.0 && cdf < u)
        break;
    }
    return k;
  }

  // Hormann's transformed rejection with squeeze.
  std::uint64_t poisson_ptrs(double lam)
  {
    double slam = std::sqrt(lam);
    double loglam = std::log(lam);
    double b = 0.931 + 2.53 * slam;
    double a = -0.059 + 0.02483 * b;
    double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;)
    {
      double U = uniform() - 0.5;
      double V = uniform();
      double us = 0.5 - std::fabs(U);
      double k = std::floor((2.0 * a / us + b) * U + lam + 0.43);
      if (us >= 0.07 && V <= vr)
        return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && V > us))
        continue;
      if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b)
          <= -lam + k * loglam - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace levyfield
