// Randomized invariant suite: quadrature exactness, projector identities,
// local patch-problem properties and the global reconstruction properties.
#pragma once

#include <string>
#include <vector>

#include "stokesrec/reconstruction.hpp"

namespace stokesrec {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;  // residual or measured constant
  double bound = 0.0;
  std::string note;
};

struct VerifyOptions {
  int n = 8;  // structured mesh parameter
  std::vector<ElementChoice> elements = {{Variant::TaylorHood, 2},
                                         {Variant::TaylorHood, 3},
                                         {Variant::TaylorHood, 4},
                                         {Variant::Mini, 1}};
  double tol = 1e-11;  // relative residual bound for equality properties
  unsigned seed = 1234;
  int n_random = 20;  // random trials per equality property
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace stokesrec
