// Copyright 2026 The stickform Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "stickform/error.h"

namespace stickform::service {

/// Unknown template, job, point cloud or annotation.
class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// Write against a stale record version.
class ConflictError : public Error {
  public:
    using Error::Error;
};

/// A stored file that cannot be read back.
class StoreError : public Error {
  public:
    using Error::Error;
};

}  // namespace stickform::service
