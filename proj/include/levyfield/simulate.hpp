#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace levyfield {

//! Observations Y_j = X(mesh * j) over the box window
//! {0..dims[0]-1} x ... x {0..dims[d-1]-1}, stored row-major.
struct GridSample
{
  std::vector<long> dims;
  long mesh = 1;
  std::vector<double> values;

  std::size_t d() const { return dims.size(); }
  std::size_t N() const { return values.size(); }

  //! Lattice index of the i-th stored value.
  std::vector<long> index(std::size_t i) const
  {
    std::vector<long> j(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;)
    {
      j[a] = static_cast<long>(i % static_cast<std::size_t>(dims[a]));
      i /= static_cast<std::size_t>(dims[a]);
    }
    return j;
  }
};

struct SeedSpec
{
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;

  std::uint64_t stream_seed() const { return derive_seed(master_seed, replication); }
};

//! Largest number of cell variables one replication may allocate.
inline constexpr std::size_t default_cell_budget = std::size_t(1) << 27;

//! Lambda(cell) for a compound Poisson measure: a Poisson(volume * lambda)
//! number of jumps, summed.
inline double sample_cp_cell(JumpLaw const& law, double volume, Stream& s)
{
  if (!(volume > 0.0))
    throw InvalidInput("sample_cp_cell: volume must be positive");
  std::uint64_t m = s.poisson(volume * law.mass());
  double sum = 0.0;
  for (std::uint64_t i = 0; i < m; ++i)
    sum += law.sample(s);
  return sum;
}

//! Simulates Y_j = sum_k f_k W_{mesh*j - c_k} on the window, where W_c are
//! i.i.d. compound Poisson cell variables on unit lattice cells.
//!
//! Cell variables are drawn once, in row-major order over the smallest
//! box holding every cell the window touches, from a single stream seeded
//! by the replication's derived seed.
inline GridSample sample_field(SimpleKernel const& kernel, JumpLaw const& law,
                               std::vector<long> const& dims, SeedSpec const& seeds,
                               long mesh = 1, std::size_t cell_budget = default_cell_budget)
{
  std::size_t d = kernel.d();
  if (dims.size() != d)
    throw InvalidInput("sample_field: window dimension " + std::to_string(dims.size())
                       + " does not match kernel dimension " + std::to_string(d));
  if (mesh < 1)
    throw InvalidInput("sample_field: mesh must be a positive integer");
  std::size_t N = 1;
  for (long n : dims)
  {
    if (n < 1)
      throw InvalidInput("sample_field: window must be nonempty");
    N *= static_cast<std::size_t>(n);
  }
  double vol = kernel.volumes().front();
  for (double v : kernel.volumes())
    if (v != vol)
      throw InvalidInput("sample_field: lattice cells need a common volume");

  // Cell index c = mesh * j - c_k ranges over [lo, hi] per axis.
  std::vector<long> lo(d), hi(d), ext(d);
  double cells = 1.0;
  for (std::size_t a = 0; a < d; ++a)
  {
    long cmin = kernel.offsets()[0][a], cmax = cmin;
    for (auto const& o : kernel.offsets())
    {
      cmin = std::min(cmin, o[a]);
      cmax = std::max(cmax, o[a]);
    }
    lo[a] = -cmax;
    hi[a] = mesh * (dims[a] - 1) - cmin;
    ext[a] = hi[a] - lo[a] + 1;
    cells *= double(ext[a]);
  }
  if (cells > double(cell_budget))
    throw ResourceError("sample_field: window needs " + std::to_string(static_cast<long long>(cells))
                        + " cell variables, budget is " + std::to_string(cell_budget));
  auto ncell = static_cast<std::size_t>(cells);

  Stream stream(seeds.stream_seed());
  std::vector<double> W(ncell);
  for (std::size_t i = 0; i < ncell; ++i)
    W[i] = sample_cp_cell(law, vol, stream);

  GridSample out;
  out.dims = dims;
  out.mesh = mesh;
  out.values.assign(N, 0.0);
  std::vector<long> j(d, 0);
  for (std::size_t i = 0; i < N; ++i)
  {
    double y = 0.0;
    for (std::size_t k = 0; k < kernel.n(); ++k)
    {
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a)
      {
        long c = mesh * j[a] - kernel.offsets()[k][a] - lo[a];
        flat = flat * static_cast<std::size_t>(ext[a]) + static_cast<std::size_t>(c);
      }
      y += kernel.coeffs()[k] * W[flat];
    }
    out.values[i] = y;
    for (std::size_t a = d; a-- > 0;)
    {
      if (++j[a] < dims[a])
        break;
      j[a] = 0;
    }
  }
  return out;
}

} // namespace levyfield
