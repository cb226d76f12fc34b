#pragma once

// Haar sampling, spin-j representations of SU(2), total-spin projectors and
// group twirls.
//
// Every average used downstream has the conjugation form V Y V^dagger, so a
// global phase on V drops out. That is why sampling on U(d) stands in for
// SU(d), and why Euler angles over SO(3) suffice for half-integer spins.

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtradeoff/matrix.hpp"

namespace qtradeoff {

/// Caller-owned pseudo-random stream. Identical seeds reproduce identical
/// sample sequences within one build.
using Rng = std::mt19937_64;

/// Non-negative half-integer, stored as 2j.
class Spin {
 public:
  constexpr Spin() = default;
  static Spin from_twice(int twice_j);
  /// Accepts "p/q" fractions and decimals, e.g. "3/2", "1.5", "2".
  static Spin parse(std::string_view text);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr std::size_t dim() const noexcept { return static_cast<std::size_t>(twice_) + 1; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }
  std::string to_string() const;

  friend constexpr bool operator==(Spin, Spin) = default;
  friend constexpr auto operator<=>(Spin, Spin) = default;

 private:
  constexpr explicit Spin(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// How one tensor factor of a lifted representation transforms under U_g.
enum class FactorAction { plain, conjugate, identity };

enum class GroupKind { fundamental_unitary, spin };

class SpinRotor;

/// Draws group elements and assembles the representation matrix V_g that a
/// twirl or a covariant family uses. An unlifted sampler acts as U_g on one
/// factor; a lifted sampler acts as a tensor product of U_g, U_g^* and I
/// according to its factor pattern.
class RepSampler {
 public:
  static RepSampler fundamental(std::size_t d);
  static RepSampler spin(Spin j);

  /// Same base group, new factor pattern.
  RepSampler lifted(std::vector<FactorAction> pattern) const;

  GroupKind group() const noexcept { return group_; }
  std::size_t base_dim() const noexcept { return base_dim_; }
  Spin spin_value() const noexcept { return spin_; }
  const std::vector<FactorAction>& pattern() const noexcept { return pattern_; }
  bool is_lifted() const noexcept { return pattern_.size() != 1 || pattern_.front() != FactorAction::plain; }
  /// Dimension of the lifted representation space.
  std::size_t dim() const noexcept;

  ComplexMatrix sample_base(Rng& rng) const;
  ComplexMatrix lift(const ComplexMatrix& u) const;
  ComplexMatrix sample(Rng& rng) const { return lift(sample_base(rng)); }

 private:
  GroupKind group_ = GroupKind::fundamental_unitary;
  std::size_t base_dim_ = 1;
  Spin spin_;
  std::vector<FactorAction> pattern_{FactorAction::plain};
  std::shared_ptr<const SpinRotor> rotor_;
};

struct TwirlReport {
  std::size_t sample_count = 0;
  HermitianOperator mean;
  double standard_error = 0.0;  // max over entries
};

/// Haar-distributed unitary on U(d): complex Ginibre matrix, QR by repeated
/// Gram-Schmidt, diagonal of R made real positive.
ComplexMatrix haar_unitary(std::size_t d, Rng& rng);

struct SpinOperators {
  HermitianOperator jx, jy, jz;
};

/// Angular-momentum matrices in the |j, m> basis ordered m = -j, ..., j, so
/// basis index 0 is the lowest-weight state.
SpinOperators spin_operators(Spin j);

/// exp(-i a Jz) exp(-i b Jy) exp(-i c Jz) with cached eigendecompositions.
class SpinRotor {
 public:
  explicit SpinRotor(Spin j);
  Spin spin() const noexcept { return j_; }
  ComplexMatrix operator()(double alpha, double beta, double gamma) const;

 private:
  Spin j_;
  EigenDecomposition jy_;
  EigenDecomposition jz_;
};

ComplexMatrix spin_rotation(Spin j, double alpha, double beta, double gamma);

/// alpha, gamma uniform on [0, 2pi), cos(beta) uniform on [-1, 1].
ComplexMatrix haar_spin(Spin j, Rng& rng);
ComplexMatrix haar_spin(const SpinRotor& rotor, Rng& rng);

/// Projector onto total spin l inside j (x) j, from the Casimir of J (x) I +
/// I (x) J. Throws std::invalid_argument unless l is an integer in [0, 2j].
HermitianOperator total_spin_projector(Spin j, Spin l);

/// Exact twirl over an irreducible representation: (Tr[y]/d) I.
HermitianOperator schur_twirl_irreducible(const HermitianOperator& y, std::size_t d);

/// (1/n) sum V_g y V_g^dagger with V_g = sampler.sample(). Throws for n < 2.
TwirlReport monte_carlo_twirl(const RepSampler& sampler, const HermitianOperator& y,
                              std::size_t n, Rng& rng);
/// Overload that lifts the base sampler with an explicit factor pattern.
TwirlReport monte_carlo_twirl(const RepSampler& sampler, std::span<const FactorAction> pattern,
                              const HermitianOperator& y, std::size_t n, Rng& rng);

}  // namespace qtradeoff
