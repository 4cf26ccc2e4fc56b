// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_ERROR_HPP
#define RBM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rbm
{

// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// A precondition on an argument was violated (shape, range, budget).
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

// A numerical procedure failed: singular system, zero spectrum, no convergence.
class NumericalError : public Error
{
public:
  using Error::Error;
};

// Persistence failures. The kind distinguishes the matrix-file error paths.
class IoError : public Error
{
public:
  enum class Kind
  {
    Open,
    BadMagic,
    Truncated,
    SizeOverflow,
    Write
  };

  IoError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

}  // namespace rbm

#endif  // RBM_ERROR_HPP
