#pragma once

// Small dense Hermitian semidefinite programs:
//
//   maximize Tr[C X]  subject to  Tr[A_i X] = b_i,  X >= 0.
//
// Solved with an infeasible-start primal-dual interior-point method using
// Nesterov-Todd scaling and a Mehrotra predictor-corrector step. Hermitian
// n x n matrices are mapped to real symmetric 2n x 2n matrices
// [[Re X, -Im X], [Im X, Re X]]; since Tr[emb(A) emb(B)] = 2 Tr[AB], the
// embedded data carries a factor 1/2 so that objective values, residuals and
// the duality gap are all reported in the original Hermitian inner product.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qtradeoff/matrix.hpp"

namespace qtradeoff {

/// Tr[op X] = value.
struct LinearConstraint {
  HermitianOperator op;
  double value = 0.0;
};

enum class SdpStatus { optimal, max_iterations, infeasible, numerical_failure };

std::string_view to_string(SdpStatus status) noexcept;

struct SdpProblem {
  HermitianOperator objective;
  std::vector<LinearConstraint> constraints;

  std::size_t dimension() const noexcept { return objective.dim(); }
};

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  int max_iter = 200;
};

struct SdpSolution {
  HermitianOperator x;
  /// Dual slack S = sum_i y_i A_i - C at the final iterate.
  HermitianOperator dual_slack;
  double value = 0.0;       // Tr[C X]
  double dual_value = 0.0;  // b^T y
  double duality_gap = 0.0;
  double primal_residual = 0.0;  // max_i |Tr[A_i X] - b_i| over the input constraints
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::numerical_failure;
  std::string message;
};

/// Maximum problem dimension accepted by solve().
inline constexpr std::size_t kMaxSdpDimension = 256;

/// Throws std::invalid_argument on malformed problems (no constraints,
/// dimension mismatch, dimension above kMaxSdpDimension). Infeasibility and
/// numerical trouble are reported through SdpSolution::status.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct FeasibilityReport {
  double primal_residual = 0.0;
  double min_eigenvalue = 0.0;
};

FeasibilityReport check_feasibility(const SdpProblem& problem, const HermitianOperator& x);

}  // namespace qtradeoff
