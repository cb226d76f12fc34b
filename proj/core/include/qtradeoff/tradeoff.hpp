#pragma once

// Information-disturbance frontier for a covariant family: the maximal
// operation fidelity F for each achievable estimation fidelity G.
//
// The feasible (G, F) set is convex, so the frontier is concave and is traced
// by supporting hyperplanes: maximize Tr[(R_F + lambda R_G) R_0] over seeds
// obeying the trace-preservation constraints. lambda = +inf is the
// lexicographic limit (maximal G, then maximal F on that face), which is the
// frontier's end point. The constrained mode fixes G = g exactly instead.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtradeoff/group.hpp"
#include "qtradeoff/matrix.hpp"
#include "qtradeoff/scenario.hpp"
#include "qtradeoff/sdp.hpp"

namespace qtradeoff {

enum class PointStatus { optimal, max_iterations, infeasible, numerical_failure, refused };

std::string_view to_string(PointStatus status) noexcept;

struct SolverSummary {
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double min_eigenvalue = 0.0;
  int iterations = 0;
  std::string message;
};

/// Monte Carlo estimates of F and G for a seed or an instrument.
struct Verification {
  std::size_t n_samples = 0;
  double f_estimate = 0.0;
  double g_estimate = 0.0;
  double f_stderr = 0.0;
  double g_stderr = 0.0;

  /// |f - f_estimate| <= k f_stderr and likewise for g. A zero standard
  /// error is compared with a 1e-12 absolute slack.
  bool consistent_with(double f, double g, double k) const noexcept;
};

struct TradeoffPoint {
  double g = 0.0;
  double f = 0.0;
  /// Scalarization weight; +inf for the end point, absent in constrained mode.
  std::optional<double> lambda;
  /// Requested G in constrained mode.
  std::optional<double> target_g;
  PointStatus status = PointStatus::numerical_failure;
  SolverSummary diagnostics;
  std::optional<Verification> verification;
  /// Optimal seed R_0, when the solve produced one.
  std::optional<HermitianOperator> seed;

  bool ok() const noexcept { return status == PointStatus::optimal; }
};

struct KrausSet {
  /// out_dim x in_dim, eigenvalue weights folded in.
  std::vector<ComplexMatrix> operators;
  /// Sum of eigenvalues dropped below the rank tolerance.
  double discarded_mass = 0.0;
};

struct TradeoffOptions {
  SdpOptions sdp;
  /// Worker threads for sweeps; 0 means hardware concurrency.
  unsigned threads = 1;
  /// Constrained solves closer than this to either end of the G range are refused.
  double boundary_margin = 1e-4;
};

/// G of the identity channel (the left end of the frontier, where F = 1).
double identity_g(const Scenario& s);

/// Maximal estimation fidelity, together with the largest F among the seeds
/// attaining it (found by restricting to the optimal face). lambda = +inf.
TradeoffPoint max_g(const Scenario& s, const TradeoffOptions& options = {});

/// lambda = 0, then `grid_points - 1` log-spaced values in
/// [lambda_max * 1e-5, lambda_max], then +inf: grid_points + 1 values.
std::vector<double> default_lambda_grid(std::size_t grid_points = 25, double lambda_max = 1e3);

/// One point per lambda (objective (R_F + lambda R_G)/(1 + lambda)), sorted by G.
std::vector<TradeoffPoint> curve_lagrangian(const Scenario& s, std::span<const double> lambdas,
                                            const TradeoffOptions& options = {});

/// Maximize F at each fixed G. Points outside (G_identity, G_max) by less
/// than the boundary margin are refused; points beyond G_max are reported
/// infeasible. The sweep never aborts on a bad point. Output order follows
/// the input.
std::vector<TradeoffPoint> curve_constrained(const Scenario& s, std::span<const double> g_values,
                                             const TradeoffOptions& options = {});

/// Kraus operators of a Jamiolkowski operator: each eigenpair (lambda, v)
/// above rank_tol * lambda_max gives unvec(sqrt(lambda) v). Eigenvector
/// phases are fixed so the largest component is real positive. Throws
/// std::invalid_argument if x has an eigenvalue below -rank_tol * lambda_max.
KrausSet extract_kraus(const HermitianOperator& x, double rank_tol = 1e-10);

/// Monte Carlo over Haar g of the covariant instrument generated by seed x:
/// E_g has Kraus operators V_g A V_g^dagger. Requires n >= 100 and x within
/// 1e-8 of the scenario constraints.
Verification verify_fidelities(const Scenario& s, const HermitianOperator& x, std::size_t n, Rng& rng);

/// Monte Carlo fidelities of a discrete instrument {A_{r mu}} with guesses
/// U_{f(r)} |psi_0>. Unitaries act on the scenario's state space.
Verification discrete_fidelities(const Scenario& s, const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries, std::size_t n, Rng& rng);

}  // namespace qtradeoff
