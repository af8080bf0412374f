// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace smashlab {

//! Base class for all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Bad input: malformed scene, mismatched grids, violated precondition.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

//! Something would leave the grid window (rasterization, dilation, sums).
class OutOfBounds : public Error
{
  public:
    using Error::Error;
};

//! Sandpile mass reached the outer layer of its grid.
class BoundaryContact : public OutOfBounds
{
  public:
    using OutOfBounds::OutOfBounds;
};

//! An iteration hit its cap before reaching tolerance.
class NonConvergence : public Error
{
  public:
    using Error::Error;
};

//! The grid cannot resolve a requested length or mass scale.
class GridTooCoarse : public Error
{
  public:
    using Error::Error;
};

}  // namespace smashlab
