// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vacpack
{
//! Malformed or inconsistent user input (recipe, data file, arguments).
class InputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A physical model could not produce an answer for valid input, e.g. a hole
//! that never clogs or a release that exceeds its time cap.
class ModelError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Numerical failure inside a solver (singular system, no bracket).
class SolverError : public ModelError
{
  public:
    using ModelError::ModelError;
};
}  // namespace vacpack
