// physicality.hpp — Hermiticity, positivity, density-matrix and CPTP
// certification straight from Abc data, with numerical margins.

#pragma once

#include <map>
#include <string>

#include "bargmann/triple.hpp"

namespace bargmann {

struct PhysicalityReport {
  bool hermitian = false;
  bool positive = false;
  bool trace_class = false;
  bool cp = false;
  bool tp = false;
  std::map<std::string, double> margins;
  WireLayout ordering_used;

  double margin(const std::string& name) const;
};

struct PhysicalityTolerances {
  double hermitian = 1e-10;
  double eigen = 1e-10;       // PSD slack
  double strict = 1e-9;       // slack for strict (<) inequalities
  double c_equality = 1e-8;   // |log c - log rhs|
};

// Type-wise block data (Lambda, Gamma, beta) of a Hermitian-shaped operator.
struct HermitianBlocks {
  Matrix lambda;
  Matrix gamma;
  Vector beta;
};

HermitianBlocks hermitian_blocks(const AbcTriple& obj);

// X A X = A*, X b = b* in type-wise order.
PhysicalityReport check_hermitian(const AbcTriple& obj,
                                  const PhysicalityTolerances& tol = {});

// Gamma >= 0 and c >= 0 (positivity of the operator).
PhysicalityReport check_positive(const AbcTriple& obj, const PhysicalityTolerances& tol = {});

// 0 <= Gamma < 1, Lambda^dag (1 - Gamma^T)^{-1} Lambda < 1 - Gamma, and the
// trace normalization identity for c.
PhysicalityReport check_density_matrix(const AbcTriple& obj,
                                       const PhysicalityTolerances& tol = {});

// Complete positivity of a map: Gamma_Phi >= 0 and c_Phi >= 0 in type-wise
// order (the Choi reindexing is a pure relabeling).
PhysicalityReport check_cp(const AbcTriple& map, const PhysicalityTolerances& tol = {});

// Trace preservation of a map in output-input order.
PhysicalityReport check_tp(const AbcTriple& map, const PhysicalityTolerances& tol = {});

// Convenience: CP and TP combined.
PhysicalityReport check_cptp(const AbcTriple& map, const PhysicalityTolerances& tol = {});

}  // namespace bargmann
