// Copyright 2026 the faceanim authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace faceanim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// Input matrix is numerically zero; no covariance structure to extract.
class DegenerateInput : public Error {
  public:
    explicit DegenerateInput(const std::string& msg) : Error(msg) {}
};

/// Latent score vector collapsed to zero during deflation.
class ZeroLatentVector : public Error {
  public:
    explicit ZeroLatentVector(const std::string& msg) : Error(msg) {}
};

/// The inner p-by-p system (or an interpolation system) is numerically singular.
class SingularSystem : public Error {
  public:
    explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

class NotUnitVector : public Error {
  public:
    explicit NotUnitVector(const std::string& msg) : Error(msg) {}
};

/// All feature points of a frame coincide; scale is undefined.
class DegenerateFrame : public Error {
  public:
    explicit DegenerateFrame(const std::string& msg) : Error(msg) {}
};

class TooFewPairs : public Error {
  public:
    explicit TooFewPairs(const std::string& msg) : Error(msg) {}
};

class DivisionByZero : public Error {
  public:
    explicit DivisionByZero(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

class InvalidConfig : public Error {
  public:
    explicit InvalidConfig(const std::string& msg) : Error(msg) {}
};

} // namespace faceanim
