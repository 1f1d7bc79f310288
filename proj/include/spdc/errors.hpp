#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// A quantity was requested outside the validity range of a model.
class RangeError : public Error
{
  public:
    using Error::Error;
    const char* kind() const noexcept override { return "range"; }
};

// Invalid argument, configuration value or malformed input file.
class ConfigError : public Error
{
  public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

// The input is well formed but the requested quantity is undefined
// (all-zero grid, rank-deficient fit, undefined g2, ...).
class NumericalError : public Error
{
  public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
};

}  // namespace spdc
