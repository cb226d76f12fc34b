#include "qtradeoff/tradeoff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qtradeoff {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Eigenvalues of the maximal-G seed below this fraction of the largest one
// are treated as outside the optimal face.
constexpr double kFaceTolerance = 1e-6;

PointStatus from_sdp(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal:
      return PointStatus::optimal;
    case SdpStatus::max_iterations:
      return PointStatus::max_iterations;
    case SdpStatus::infeasible:
      return PointStatus::infeasible;
    case SdpStatus::numerical_failure:
      return PointStatus::numerical_failure;
  }
  return PointStatus::numerical_failure;
}

SolverSummary summarize(const SdpSolution& sol) {
  return {sol.duality_gap, sol.primal_residual, sol.min_eigenvalue, sol.iterations, sol.message};
}

TradeoffPoint point_from(const Scenario& s, const SdpSolution& sol) {
  TradeoffPoint p;
  p.status = from_sdp(sol.status);
  p.diagnostics = summarize(sol);
  if (sol.status == SdpStatus::optimal || sol.status == SdpStatus::max_iterations) {
    p.f = frobenius_inner(s.r_f, sol.x);
    p.g = frobenius_inner(s.r_g, sol.x);
    p.seed = sol.x;
  } else {
    p.f = p.g = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

SdpSolution solve_weighted(const Scenario& s, double lambda, const SdpOptions& options) {
  const HermitianOperator objective = (s.r_f + s.r_g * lambda) * (1.0 / (1.0 + lambda));
  return solve(SdpProblem{objective, s.constraints}, options);
}

ComplexMatrix column_block(const ComplexMatrix& m, std::span<const std::size_t> columns) {
  ComplexMatrix out(m.rows(), columns.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < columns.size(); ++k) out(i, k) = m(i, columns[k]);
  return out;
}

HermitianOperator compress(const HermitianOperator& op, const ComplexMatrix& v) {
  return HermitianOperator(v.adjoint() * op.matrix() * v, TensorShape::flat(v.cols()));
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

struct RunningMean {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double standard_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) sum += std::conj(a(i, 0)) * b(i, 0);
  return sum;
}

}  // namespace

std::string_view to_string(PointStatus status) noexcept {
  switch (status) {
    case PointStatus::optimal:
      return "optimal";
    case PointStatus::max_iterations:
      return "max-iterations";
    case PointStatus::infeasible:
      return "infeasible";
    case PointStatus::numerical_failure:
      return "numerical-failure";
    case PointStatus::refused:
      return "refused";
  }
  return "unknown";
}

bool Verification::consistent_with(double f, double g, double k) const noexcept {
  const auto close = [k](double exact, double estimate, double stderr_) {
    return std::abs(exact - estimate) <= k * stderr_ + 1e-12;
  };
  return close(f, f_estimate, f_stderr) && close(g, g_estimate, g_stderr);
}

double identity_g(const Scenario& s) { return frobenius_inner(s.r_g, identity_seed(s)); }

TradeoffPoint max_g(const Scenario& s, const TradeoffOptions& options) {
  const SdpSolution first = solve(SdpProblem{s.r_g, s.constraints}, options.sdp);
  if (first.status != SdpStatus::optimal) {
    TradeoffPoint p = point_from(s, first);
    p.lambda = kInfinity;
    return p;
  }

  // Second stage: maximize F over the face of seeds supported on the range of
  // the first optimum. An interior-point solution sits in the relative
  // interior of the optimal face, so its range spans that face.
  const EigenDecomposition eig = eigh(first.x);
  const double top = eig.values.back();
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < eig.values.size(); ++k)
    if (eig.values[k] > kFaceTolerance * top) kept.push_back(k);
  const ComplexMatrix v = column_block(eig.vectors, kept);

  SdpProblem reduced{compress(s.r_f, v), {}};
  for (const auto& c : s.constraints) reduced.constraints.push_back({compress(c.op, v), c.value});
  const SdpSolution second = solve(reduced, options.sdp);

  TradeoffPoint p;
  p.lambda = kInfinity;
  p.status = from_sdp(second.status);
  p.diagnostics = summarize(second);
  p.diagnostics.iterations += first.iterations;
  p.diagnostics.duality_gap = std::max(first.duality_gap, second.duality_gap);
  if (second.status != SdpStatus::optimal && second.status != SdpStatus::max_iterations) {
    // Fall back to the first-stage optimum; G is still certified.
    p.f = frobenius_inner(s.r_f, first.x);
    p.g = frobenius_inner(s.r_g, first.x);
    p.seed = first.x;
    p.diagnostics.message = "face restriction failed: " + second.message;
    return p;
  }
  const HermitianOperator x(v * second.x.matrix() * v.adjoint(), s.shape);
  p.f = frobenius_inner(s.r_f, x);
  p.g = frobenius_inner(s.r_g, x);
  const SdpProblem full{s.r_f, s.constraints};
  const FeasibilityReport report = check_feasibility(full, x);
  p.diagnostics.primal_residual = report.primal_residual;
  p.diagnostics.min_eigenvalue = report.min_eigenvalue;
  p.seed = x;
  return p;
}

std::vector<double> default_lambda_grid(std::size_t grid_points, double lambda_max) {
  if (grid_points < 2) throw std::invalid_argument("default_lambda_grid: need at least 2 grid points");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw std::invalid_argument("default_lambda_grid: lambda_max must be positive and finite");
  std::vector<double> grid{0.0};
  const std::size_t count = grid_points - 1;
  const double lo = lambda_max * 1e-5;
  for (std::size_t k = 0; k < count; ++k) {
    if (count == 1 || k + 1 == count) {
      grid.push_back(lambda_max);
      continue;
    }
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    grid.push_back(k == 0 ? lo : lo * std::pow(lambda_max / lo, t));
  }
  grid.push_back(kInfinity);
  return grid;
}

std::vector<TradeoffPoint> curve_lagrangian(const Scenario& s, std::span<const double> lambdas,
                                            const TradeoffOptions& options) {
  for (double l : lambdas)
    if (!(l >= 0.0)) throw std::invalid_argument("curve_lagrangian: lambda must be non-negative");
  std::vector<TradeoffPoint> points(lambdas.size());
  parallel_for(lambdas.size(), options.threads, [&](std::size_t i) {
    const double lambda = lambdas[i];
    if (std::isinf(lambda)) {
      points[i] = max_g(s, options);
      return;
    }
    points[i] = point_from(s, solve_weighted(s, lambda, options.sdp));
    points[i].lambda = lambda;
  });
  std::stable_sort(points.begin(), points.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
    const double ga = std::isnan(a.g) ? kInfinity : a.g;
    const double gb = std::isnan(b.g) ? kInfinity : b.g;
    if (ga != gb) return ga < gb;
    return a.lambda.value_or(0.0) < b.lambda.value_or(0.0);
  });
  return points;
}

std::vector<TradeoffPoint> curve_constrained(const Scenario& s, std::span<const double> g_values,
                                             const TradeoffOptions& options) {
  const double g_lo = identity_g(s);
  const SdpSolution upper = solve(SdpProblem{s.r_g, s.constraints}, options.sdp);
  const bool have_upper = upper.status == SdpStatus::optimal;
  // Any feasible seed has G <= b^T y for the dual point of the max-G solve.
  const double certified_bound = have_upper ? upper.dual_value : kInfinity;
  const double g_hi = have_upper ? upper.value : kInfinity;
  const double margin = options.boundary_margin;

  std::vector<TradeoffPoint> points(g_values.size());
  parallel_for(g_values.size(), options.threads, [&](std::size_t i) {
    const double g = g_values[i];
    TradeoffPoint p;
    p.target_g = g;
    p.g = g;
    p.f = std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(g)) {
      p.status = PointStatus::refused;
      p.diagnostics.message = "target G is not finite";
      points[i] = std::move(p);
      return;
    }
    const bool beyond = g > g_hi + margin;
    const bool interior = g > g_lo + margin && g < g_hi - margin;
    if (!interior && !beyond) {
      p.status = PointStatus::refused;
      std::ostringstream msg;
      msg << "target G within " << margin << " of the range boundary or below the identity channel's G";
      p.diagnostics.message = msg.str();
      points[i] = std::move(p);
      return;
    }

    std::vector<LinearConstraint> constraints = s.constraints;
    constraints.push_back({s.r_g, g});
    const SdpSolution sol = solve(SdpProblem{s.r_f, std::move(constraints)}, options.sdp);
    if (beyond) {
      p.status = PointStatus::infeasible;
      p.diagnostics = summarize(sol);
      if (sol.status != SdpStatus::infeasible) {
        std::ostringstream msg;
        msg << "target G exceeds the certified maximum " << certified_bound;
        p.diagnostics.message = msg.str();
      }
      points[i] = std::move(p);
      return;
    }
    p = point_from(s, sol);
    p.target_g = g;
    points[i] = std::move(p);
  });
  return points;
}

KrausSet extract_kraus(const HermitianOperator& x, double rank_tol) {
  const std::size_t n_in = x.shape().in_dim(), n_out = x.shape().out_dim();
  if (n_in * n_out != x.dim()) throw std::invalid_argument("extract_kraus: operator has no in/out shape");
  const EigenDecomposition eig = eigh(x);
  const double top = std::max(eig.values.back(), 0.0);
  const double cutoff = rank_tol * top;
  if (eig.values.front() < -cutoff) {
    std::ostringstream msg;
    msg << "extract_kraus: eigenvalue " << eig.values.front() << " below tolerance " << -cutoff;
    throw std::invalid_argument(msg.str());
  }

  KrausSet out;
  const std::size_t n = eig.values.size();
  for (std::size_t k = n; k-- > 0;) {
    const double value = eig.values[k];
    if (value <= cutoff || value <= 0.0) {
      out.discarded_mass += std::max(value, 0.0);
      continue;
    }
    ComplexMatrix v(n, 1);
    std::size_t lead = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v(i, 0) = eig.vectors(i, k);
      if (std::abs(v(i, 0)) > std::abs(v(lead, 0)) + 1e-12) lead = i;
    }
    const Complex phase = std::conj(v(lead, 0)) / std::abs(v(lead, 0));
    out.operators.push_back(unvec(v * (phase * std::sqrt(value)), n_out, n_in));
  }
  return out;
}

Verification verify_fidelities(const Scenario& s, const HermitianOperator& x, std::size_t n, Rng& rng) {
  if (n < 100) throw std::invalid_argument("verify_fidelities: need at least 100 samples");
  const double residual = constraint_residual(s, x);
  if (residual > 1e-8) {
    std::ostringstream msg;
    msg << "verify_fidelities: seed violates the constraints by " << residual;
    throw std::invalid_argument(msg.str());
  }
  const KrausSet kraus = extract_kraus(x);

  RunningMean f_acc, g_acc;
  for (std::size_t t = 0; t < n; ++t) {
    const ComplexMatrix u = s.state_rep.sample(rng);
    const ComplexMatrix ud = u.adjoint();
    const ComplexMatrix psi = u * s.psi0;
    const double overlap = std::norm(inner(s.psi0, psi));
    double f = 0.0, prob = 0.0;
    for (const ComplexMatrix& a : kraus.operators) {
      const ComplexMatrix moved = u * a * ud;
      const ComplexMatrix image = moved * s.psi0;
      f += std::norm(inner(s.psi0, image));
      prob += inner(image, image).real();
    }
    f_acc.add(f);
    g_acc.add(overlap * prob);
  }
  return {n, f_acc.mean, g_acc.mean, f_acc.standard_error(), g_acc.standard_error()};
}

Verification discrete_fidelities(const Scenario& s, const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries, std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("discrete_fidelities: need at least 2 samples");
  if (kraus_by_outcome.size() != guess_unitaries.size())
    throw std::invalid_argument("discrete_fidelities: need exactly one guess unitary per outcome");
  std::vector<ComplexMatrix> guesses;
  for (const ComplexMatrix& u : guess_unitaries) guesses.push_back(u * s.psi0);

  RunningMean f_acc, g_acc;
  for (std::size_t t = 0; t < n; ++t) {
    const ComplexMatrix psi = s.state_rep.sample(rng) * s.psi0;
    double f = 0.0, g = 0.0;
    for (std::size_t r = 0; r < kraus_by_outcome.size(); ++r) {
      const double score = std::norm(inner(guesses[r], psi));
      for (const ComplexMatrix& a : kraus_by_outcome[r]) {
        const ComplexMatrix image = a * psi;
        f += std::norm(inner(psi, image));
        g += inner(image, image).real() * score;
      }
    }
    f_acc.add(f);
    g_acc.add(g);
  }
  return {n, f_acc.mean, g_acc.mean, f_acc.standard_error(), g_acc.standard_error()};
}

}  // namespace qtradeoff
