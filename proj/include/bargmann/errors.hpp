#pragma once

#include <stdexcept>
#include <string>

namespace bargmann {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wire bookkeeping problems: unknown wires, bad permutations, kind mismatches.
struct LayoutError : Error {
  using Error::Error;
};

// Parameter outside its documented domain (eta < 0, cutoff 0, ...).
struct DomainError : Error {
  using Error::Error;
};

// The Gaussian integral of a contraction has a singular measure block.
struct SingularContractionError : Error {
  using Error::Error;
};

// The contraction convergence criterion fails (operator norm margin >= 2).
struct DivergentIntegralError : Error {
  using Error::Error;
};

// A decomposition hit a non-invertible marginal or inconsistent equations.
struct DegenerateMarginalError : Error {
  using Error::Error;
};

}  // namespace bargmann
