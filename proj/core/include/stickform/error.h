// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace stickform {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A stick whose control points coincide (|p2 - p1| <= kStickEpsilon).
class DegenerateStickError : public Error {
  public:
    using Error::Error;
};

/// Malformed or inconsistent template document.
class TemplateError : public Error {
  public:
    using Error::Error;
};

/// Parameter vector does not match the template it is used with.
class LengthMismatchError : public Error {
  public:
    using Error::Error;
};

/// Too few or collinear points for a boundary polygon.
class DegenerateDetailError : public Error {
  public:
    using Error::Error;
};

/// Input failed validation (file formats, records, preconditions).
class ValidationError : public Error {
  public:
    using Error::Error;
};

}  // namespace stickform
