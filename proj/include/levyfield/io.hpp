#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecf.hpp"
#include "error.hpp"
#include "numcore.hpp"
#include "simulate.hpp"

namespace levyfield {

//! Shortest round-trip decimal form of v.
inline std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::ofstream open_out(std::string const& path)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw IoError("cannot open '" + path + "' for writing");
  return os;
}

inline void close_out(std::ofstream& os, std::string const& path)
{
  os.flush();
  if (!os)
    throw IoError("write to '" + path + "' failed");
}

//! Whole-cell number parse; subnormals are accepted.
template<class T>
bool parse_number(std::string const& cell, T& out)
{
  auto const* end = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && p == end;
}

inline std::vector<std::string> split_csv(std::string const& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  return out;
}
} // namespace detail

//! Header j1,...,jd,value; rows in row-major order.
inline void write_sample_csv(std::string const& path, GridSample const& s)
{
  auto os = detail::open_out(path);
  for (std::size_t a = 0; a < s.d(); ++a)
    os << 'j' << (a + 1) << ',';
  os << "value\n";
  for (std::size_t i = 0; i < s.N(); ++i)
  {
    for (long j : s.index(i))
      os << j << ',';
    os << format_double(s.values[i]) << '\n';
  }
  detail::close_out(os, path);
}

//! Reads a sample written by write_sample_csv. Rows must cover a box
//! starting at the origin in row-major order.
inline GridSample read_sample_csv(std::string const& path)
{
  std::ifstream is(path);
  if (!is)
    throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line))
    throw IoError("'" + path + "' is empty");
  auto head = detail::split_csv(line);
  if (head.size() < 2 || head.back() != "value")
    throw IoError("'" + path + "': expected header j1,...,jd,value");
  std::size_t d = head.size() - 1;
  std::vector<std::vector<long>> idx;
  GridSample s;
  std::size_t row = 1;
  while (std::getline(is, line))
  {
    ++row;
    if (line.empty())
      continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != d + 1)
      throw IoError("'" + path + "' line " + std::to_string(row) + ": wrong column count");
    std::vector<long> j(d);
    double v = 0.0;
    bool ok = detail::parse_number(cells[d], v);
    for (std::size_t a = 0; a < d && ok; ++a)
      ok = detail::parse_number(cells[a], j[a]);
    if (!ok)
      throw IoError("'" + path + "' line " + std::to_string(row) + ": malformed number");
    s.values.push_back(v);
    idx.push_back(std::move(j));
  }
  if (idx.empty())
    throw IoError("'" + path + "' has no observations");
  s.dims.assign(d, 0);
  for (auto const& j : idx)
    for (std::size_t a = 0; a < d; ++a)
      s.dims[a] = std::max(s.dims[a], j[a] + 1);
  std::size_t N = 1;
  for (long n : s.dims)
    N *= static_cast<std::size_t>(n);
  if (N != idx.size())
    throw IoError("'" + path + "': rows do not fill a box window");
  for (std::size_t i = 0; i < N; ++i)
    if (idx[i] != s.index(i))
      throw IoError("'" + path + "': rows are not in row-major order");
  return s;
}

//! Header x,g0_true,g0_hat; the middle column is dropped when unknown.
inline void write_estimate_csv(std::string const& path, GridFunction const& g0_hat,
                               GridFunction const* g0_true = nullptr)
{
  auto os = detail::open_out(path);
  os << (g0_true ? "x,g0_true,g0_hat\n" : "x,g0_hat\n");
  auto const& g = g0_hat.grid();
  for (std::size_t i = 0; i < g.n(); ++i)
  {
    os << format_double(g.node(i)) << ',';
    if (g0_true)
      os << format_double((*g0_true)[i]) << ',';
    os << format_double(g0_hat[i]) << '\n';
  }
  detail::close_out(os, path);
}

inline void write_ecf_csv(std::string const& path, EcfEstimate const& e)
{
  auto os = detail::open_out(path);
  os << "u,re_psi,im_psi,re_theta,im_theta\n";
  for (std::size_t k = 0; k < e.u_grid.n(); ++k)
    os << format_double(e.u_grid.node(k)) << ',' << format_double(e.psi_hat[k].real()) << ','
       << format_double(e.psi_hat[k].imag()) << ',' << format_double(e.theta_hat[k].real()) << ','
       << format_double(e.theta_hat[k].imag()) << '\n';
  detail::close_out(os, path);
}

inline void write_text(std::string const& path, std::string const& text)
{
  auto os = detail::open_out(path);
  os << text;
  detail::close_out(os, path);
}

inline std::string read_text(std::string const& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

} // namespace levyfield
