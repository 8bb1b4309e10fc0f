#pragma once

#include <stdexcept>
#include <string>

namespace levyfield {

//! Base of every error raised by the library. The CLI maps the derived
//! categories onto process exit codes.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Malformed arguments: non-finite values, empty or mismatched grids.
class InvalidInput : public Error
{
public:
  using Error::Error;
};

//! A grid does not cover the range an operation needs.
class CoverageError : public Error
{
public:
  using Error::Error;
};

//! A documented precondition of an algorithm does not hold.
class PreconditionError : public Error
{
public:
  using Error::Error;
};

//! a0 cannot be recovered because sum_k f_k nu_k vanishes.
class SingularRecovery : public Error
{
public:
  using Error::Error;
};

//! An error bound was requested outside the regime where it is valid.
class BoundInapplicable : public Error
{
public:
  using Error::Error;
};

//! An integral or bound diverges: |psi| vanishes, or delta <= 1/2.
class DivergentBound : public Error
{
public:
  using Error::Error;
};

//! A triangular system has a zero pivot.
class SingularSystem : public Error
{
public:
  using Error::Error;
};

//! Gram-Schmidt produced a (numerically) vanishing residual.
class DegeneracyError : public Error
{
public:
  using Error::Error;
};

//! A computation would exceed its memory or term budget.
class ResourceError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

} // namespace levyfield
