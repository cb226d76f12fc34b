#pragma once

// Covariant state families and their fidelity operators.
//
// For a family |psi_g> = U_g |psi_0>, the operation and estimation
// fidelities of a covariant instrument with seed Jamiolkowski operator R_0
// are F = Tr[R_F R_0] and G = Tr[R_G R_0], where
//
//   R_F = int dg |psi_g><psi_g|^T (x) |psi_g><psi_g|,
//   R_G = Tr_out[(I (x) |psi_0><psi_0|) R_F] (x) I.
//
// Trace preservation of the covariant instrument reduces, after the Schur
// average over the input representation, to a short list of linear
// constraints Tr[A_i R_0] = b_i.

#include <cstddef>
#include <string>
#include <vector>

#include "qtradeoff/group.hpp"
#include "qtradeoff/matrix.hpp"
#include "qtradeoff/sdp.hpp"

namespace qtradeoff {

enum class Family { pure, maxent, spin };

std::string to_string(Family family);

struct Scenario {
  Family family = Family::pure;
  /// Dimension of the base group representation: d, or 2j+1 for spin.
  std::size_t d = 0;
  Spin j;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  /// Shape of R_0, R_F and R_G on in (x) out.
  TensorShape shape;
  HermitianOperator r_f;
  HermitianOperator r_g;
  std::vector<LinearConstraint> constraints;
  /// Reference state on the (in_dim)-dimensional state space.
  ComplexMatrix psi0;
  /// Base group sampler, lifted to act on the state space.
  RepSampler state_rep;

  /// "pure", "maxent" or "spin".
  std::string name() const { return to_string(family); }
  /// "d=2", "j=3/2".
  std::string parameter() const;
  /// Shape of the state space (one factor for pure/spin, two for maxent).
  TensorShape state_shape() const;
  /// V_g = U_g^* (x) U_g lifted to in (x) out; R_F commutes with it.
  RepSampler seed_rep() const;
};

/// Unknown pure state in dimension d >= 2 under U(d).
Scenario build_pure(std::size_t d);
/// Unknown maximally entangled state of C^d (x) C^d under U (x) I, d >= 2.
Scenario build_maxent(std::size_t d);
/// Spin-j coherent states U_g |-j>, 2j >= 1.
Scenario build_spin(Spin j);

/// Tr_out[(I (x) |psi_0><psi_0|) R_F] (x) I_out, computed from R_F directly.
HermitianOperator derive_estimation_operator(const HermitianOperator& r_f, const ComplexMatrix& psi0,
                                             const TensorShape& shape);

/// |Phi><Phi| on in (x) out: the identity channel.
HermitianOperator identity_seed(const Scenario& s);

/// d_in (|psi_0><psi_0|)^T (x) |psi_0><psi_0|: measure the covariant POVM
/// and reprepare the guess. Throws std::logic_error if it violates the
/// scenario constraints.
HermitianOperator measure_prepare_seed(const Scenario& s);

/// Covariantized seed of a discrete instrument with guess unitaries U_{f(r)}:
///   R_0 = sum_{r,mu} vec(U_f(r)^dagger A_{r mu} U_f(r)) vec(.)^dagger.
/// Requires one guess unitary per outcome and sum A^dagger A = I to 1e-10.
/// The result carries `shape` (defaults to a bipartite in/out shape).
HermitianOperator covariant_seed(const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries);
HermitianOperator covariant_seed(const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries, const TensorShape& shape);

/// Largest |Tr[A_i x] - b_i| over the scenario constraints.
double constraint_residual(const Scenario& s, const HermitianOperator& x);

}  // namespace qtradeoff
