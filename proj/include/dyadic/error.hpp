// Copyright 2026 The dyadic-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Raised when an argument falls outside the domain of an operation
/// (invalid exponent, missing ancestor, non-positive weight, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace dyadic
