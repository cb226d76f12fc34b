#include "qtradeoff/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qtradeoff {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

constexpr double kStepFraction = 0.98;
constexpr double kDependenceTolerance = 1e-10;
constexpr double kConsistencyTolerance = 1e-7;
constexpr double kFarkasTolerance = 1e-8;
constexpr double kMonotonicityTolerance = 1e-10;
constexpr int kMonotonicityWindow = 5;
constexpr double kSchurShifts[] = {1e-14, 1e-12, 1e-10};

Mat embed_real(const ComplexMatrix& h, double scale) {
  const auto n = static_cast<Eigen::Index>(h.rows());
  Mat out(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex z = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * scale;
      out(i, j) = z.real();
      out(i + n, j + n) = z.real();
      out(i, j + n) = -z.imag();
      out(i + n, j) = z.imag();
    }
  return out;
}

// Inverse of embed_real(., 1), averaging the redundant blocks.
ComplexMatrix extract_complex(const Mat& y, double scale) {
  const Eigen::Index n = y.rows() / 2;
  ComplexMatrix out(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = 0.5 * (y(i, j) + y(i + n, j + n));
      const double im = 0.5 * (y(i + n, j) - y(i, j + n));
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Complex(re, im) * scale;
    }
  return out;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

// Largest alpha in (0, inf] with x + alpha dx >= 0, given chol(x).
double max_step(const Eigen::LLT<Mat>& chol, const Mat& dx) {
  const Mat l_inv_dx = chol.matrixL().solve(dx);
  const Mat scaled = chol.matrixL().solve(l_inv_dx.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(scaled), Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (lambda_min >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lambda_min;
}

struct ReducedConstraints {
  std::vector<Mat> ops;  // embedded, orthonormal in Tr[AB] before embedding
  Vec rhs;
  bool consistent = true;
  std::string message;
};

// Modified Gram-Schmidt on (A_i, b_i) pairs in the Hermitian inner product.
ReducedConstraints reduce_constraints(const std::vector<LinearConstraint>& constraints) {
  std::vector<ComplexMatrix> basis;
  std::vector<double> basis_rhs;
  ReducedConstraints out;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    ComplexMatrix a = constraints[i].op.matrix();
    double beta = constraints[i].value;
    const double original_norm = std::sqrt(std::max(frobenius_inner(a, a), 0.0));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < basis.size(); ++k) {
        const double c = frobenius_inner(basis[k], a);
        a -= basis[k] * Complex(c);
        beta -= c * basis_rhs[k];
      }
    }
    const double norm = std::sqrt(std::max(frobenius_inner(a, a), 0.0));
    if (norm <= kDependenceTolerance * std::max(original_norm, 1.0)) {
      if (std::abs(beta) > kConsistencyTolerance * (1.0 + std::abs(constraints[i].value))) {
        std::ostringstream msg;
        msg << "constraint " << i << " is linearly dependent on earlier ones with inconsistent value"
            << " (residual " << beta << ")";
        out.consistent = false;
        out.message = msg.str();
        return out;
      }
      continue;
    }
    basis.push_back(a * Complex(1.0 / norm));
    basis_rhs.push_back(beta / norm);
  }
  out.ops.reserve(basis.size());
  out.rhs.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.ops.push_back(embed_real(basis[k], 0.5));
    out.rhs(static_cast<Eigen::Index>(k)) = basis_rhs[k];
  }
  return out;
}

double max_constraint_residual(const std::vector<LinearConstraint>& constraints, const HermitianOperator& x) {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, std::abs(frobenius_inner(c.op, x) - c.value));
  return worst;
}

void validate(const SdpProblem& problem) {
  const std::size_t n = problem.dimension();
  if (n == 0) throw std::invalid_argument("sdp: empty objective");
  if (n > kMaxSdpDimension) throw std::invalid_argument("sdp: dimension exceeds solver limit");
  if (problem.constraints.empty()) throw std::invalid_argument("sdp: at least one constraint is required");
  for (const auto& c : problem.constraints) {
    if (c.op.dim() != n) throw std::invalid_argument("sdp: constraint dimension does not match objective");
    if (!std::isfinite(c.value)) throw std::invalid_argument("sdp: non-finite constraint value");
  }
}

}  // namespace

std::string_view to_string(SdpStatus status) noexcept {
  switch (status) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::max_iterations:
      return "max-iterations";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

FeasibilityReport check_feasibility(const SdpProblem& problem, const HermitianOperator& x) {
  if (x.dim() != problem.dimension()) throw std::invalid_argument("check_feasibility: dimension mismatch");
  FeasibilityReport report;
  report.primal_residual = max_constraint_residual(problem.constraints, x);
  report.min_eigenvalue = eigh(x).values.front();
  return report;
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  validate(problem);
  const std::size_t n = problem.dimension();
  const TensorShape shape = problem.objective.shape();

  SdpSolution sol;
  sol.x = HermitianOperator::zero(shape);
  sol.dual_slack = HermitianOperator::zero(shape);

  const ReducedConstraints reduced = reduce_constraints(problem.constraints);
  if (!reduced.consistent) {
    sol.status = SdpStatus::infeasible;
    sol.message = reduced.message;
    sol.primal_residual = max_constraint_residual(problem.constraints, sol.x);
    return sol;
  }

  const auto big_n = static_cast<Eigen::Index>(2 * n);
  const auto m = static_cast<Eigen::Index>(reduced.ops.size());
  const std::vector<Mat>& a = reduced.ops;
  const Vec& b = reduced.rhs;
  const Mat c = embed_real(problem.objective.matrix(), 0.5);
  const Mat eye = Mat::Identity(big_n, big_n);

  // Y0 = xi I with xi the least-squares fit of the constraints, Z0 = I.
  double xi = 1.0;
  {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = a[static_cast<std::size_t>(i)].trace();
      num += t * b(i);
      den += t * t;
    }
    if (den > 1e-14 && num / den > 1e-8) xi = num / den;
  }
  Mat y_mat = xi * eye;
  Mat z_mat = eye;
  Vec y = Vec::Zero(m);

  // Termination is judged on the caller's constraints, not only on the
  // orthonormalized ones, whose residuals can be smaller.
  std::vector<Mat> input_ops;
  input_ops.reserve(problem.constraints.size());
  for (const auto& con : problem.constraints) input_ops.push_back(embed_real(con.op.matrix(), 0.5));
  auto input_residual = [&](const Mat& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < input_ops.size(); ++i)
      worst = std::max(worst, std::abs(inner(input_ops[i], x) - problem.constraints[i].value));
    return worst;
  };

  auto dual_operator = [&](const Vec& coeffs) {
    Mat out = Mat::Zero(big_n, big_n);
    for (Eigen::Index i = 0; i < m; ++i) out += coeffs(i) * a[static_cast<std::size_t>(i)];
    return out;
  };
  auto apply_constraints = [&](const Mat& x) {
    Vec out(m);
    for (Eigen::Index i = 0; i < m; ++i) out(i) = inner(a[static_cast<std::size_t>(i)], x);
    return out;
  };

  std::vector<double> objective_history;
  int iter = 0;
  SdpStatus status = SdpStatus::max_iterations;
  std::string message;

  for (;; ++iter) {
    const Vec r_p = b - apply_constraints(y_mat);
    const Mat dual_res = dual_operator(y) - z_mat - c;
    const double xz = inner(y_mat, z_mat);
    const double mu = xz / static_cast<double>(big_n);
    const double pobj = inner(c, y_mat);
    const double dobj = b.dot(y);

    sol.value = pobj;
    sol.dual_value = dobj;
    sol.duality_gap = std::max(xz, std::abs(dobj - pobj));
    sol.dual_residual = 2.0 * dual_res.cwiseAbs().maxCoeff();
    const double reduced_primal_res =
        std::max(r_p.size() ? r_p.cwiseAbs().maxCoeff() : 0.0, input_residual(y_mat));
    // Only primal-feasible iterates count as accepted for the monotonicity
    // audit; an infeasible iterate can overshoot the optimum.
    if (reduced_primal_res <= options.feas_tol) objective_history.push_back(pobj);

    if (sol.duality_gap <= options.gap_tol && reduced_primal_res <= options.feas_tol &&
        sol.dual_residual <= options.feas_tol) {
      status = SdpStatus::optimal;
      break;
    }

    // Farkas certificate for primal infeasibility: y with b^T y < 0 and
    // sum_i y_i A_i >= 0.
    if (dobj < 0.0) {
      const Mat farkas = dual_operator(y / (-dobj));
      Eigen::SelfAdjointEigenSolver<Mat> eig(farkas, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() >= -kFarkasTolerance && std::abs(dobj) > 1e3) {
        status = SdpStatus::infeasible;
        message = "primal infeasible (Farkas certificate from diverging dual iterates)";
        break;
      }
    }

    if (iter >= options.max_iter) {
      status = SdpStatus::max_iterations;
      message = "iteration limit reached";
      break;
    }

    // Nesterov-Todd scaling: W = G G^T with G^T Z G = G^{-1} Y G^{-T} = diag(d).
    const Eigen::LLT<Mat> chol_y(y_mat);
    const Eigen::LLT<Mat> chol_z(z_mat);
    if (chol_y.info() != Eigen::Success || chol_z.info() != Eigen::Success) {
      status = SdpStatus::numerical_failure;
      message = "iterate lost positive definiteness";
      break;
    }
    const Mat l_y = chol_y.matrixL();
    const Mat l_z = chol_z.matrixL();
    Eigen::JacobiSVD<Mat> svd(l_z.transpose() * l_y, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec d = svd.singularValues();
    if (d.minCoeff() <= 0.0) {
      status = SdpStatus::numerical_failure;
      message = "degenerate scaling point";
      break;
    }
    const Mat g = l_y * svd.matrixV() * d.cwiseSqrt().cwiseInverse().asDiagonal();
    const Mat g_inverse = d.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                          l_y.triangularView<Eigen::Lower>().solve(eye);
    const Mat w = g * g.transpose();

    // Schur matrix <A_i, W A_j W> as the Gram matrix of G^T A_i G, which
    // keeps it symmetric positive semidefinite in floating point.
    std::vector<Mat> scaled_a(static_cast<std::size_t>(m));
    std::vector<Mat> waw(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto k = static_cast<std::size_t>(j);
      scaled_a[k] = symmetrize(g.transpose() * a[k] * g);
      waw[k] = symmetrize(g * scaled_a[k] * g.transpose());
    }
    Mat schur(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i; j < m; ++j) {
        const double v = inner(scaled_a[static_cast<std::size_t>(i)], scaled_a[static_cast<std::size_t>(j)]);
        schur(i, j) = v;
        schur(j, i) = v;
      }
    Eigen::LLT<Mat> chol_schur(schur);
    // Near the boundary the Schur matrix can lose definiteness to roundoff;
    // retry with a tiny diagonal shift before giving up.
    for (double shift : kSchurShifts) {
      if (chol_schur.info() == Eigen::Success) break;
      const double scale = schur.diagonal().cwiseAbs().maxCoeff();
      chol_schur.compute(schur + (shift * scale) * Mat::Identity(m, m));
    }
    if (chol_schur.info() != Eigen::Success) {
      status = SdpStatus::numerical_failure;
      message = "Schur complement is not positive definite";
      break;
    }
    const Mat wdw = w * dual_res * w;

    struct Direction {
      Mat dy_mat;
      Vec dy;
      Mat dz;
    };
    auto direction = [&](const Mat& r_c) {
      Vec rhs(m);
      const Mat base = r_c - wdw;
      for (Eigen::Index i = 0; i < m; ++i) rhs(i) = inner(a[static_cast<std::size_t>(i)], base) - r_p(i);
      Direction dir;
      dir.dy = chol_schur.solve(rhs);
      Mat dx = base;
      for (Eigen::Index j = 0; j < m; ++j) dx -= dir.dy(j) * waw[static_cast<std::size_t>(j)];
      // One step of iterative refinement so that A(dY) = r_p holds to
      // working precision.
      const Vec defect = apply_constraints(dx) - r_p;
      const Vec fix = chol_schur.solve(defect);
      dir.dy += fix;
      for (Eigen::Index j = 0; j < m; ++j) dx -= fix(j) * waw[static_cast<std::size_t>(j)];
      dir.dz = dual_operator(dir.dy) + dual_res;
      dir.dy_mat = symmetrize(dx);
      dir.dz = symmetrize(dir.dz);
      return dir;
    };
    auto lyapunov_rhs = [&](const Mat& rhs) {
      // Solve diag(d) T + T diag(d) = rhs, then unscale.
      Mat t(big_n, big_n);
      for (Eigen::Index i = 0; i < big_n; ++i)
        for (Eigen::Index j = 0; j < big_n; ++j) t(i, j) = rhs(i, j) / (d(i) + d(j));
      return Mat(g * t * g.transpose());
    };

    // Predictor (affine scaling).
    const Direction pred = direction(-y_mat);
    const double ap_aff = std::min(1.0, max_step(chol_y, pred.dy_mat));
    const double ad_aff = std::min(1.0, max_step(chol_z, pred.dz));
    const double mu_aff = inner(y_mat + ap_aff * pred.dy_mat, z_mat + ad_aff * pred.dz) / static_cast<double>(big_n);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector with the second-order term in the scaled space.
    const Mat dy_scaled = g_inverse * pred.dy_mat * g_inverse.transpose();
    const Mat dz_scaled = g.transpose() * pred.dz * g;
    Mat rhs = -(dy_scaled * dz_scaled + dz_scaled * dy_scaled);
    for (Eigen::Index i = 0; i < big_n; ++i) rhs(i, i) += 2.0 * (sigma * mu - d(i) * d(i));
    const Direction corr = direction(lyapunov_rhs(rhs));

    const double ap = std::min(1.0, kStepFraction * max_step(chol_y, corr.dy_mat));
    const double ad = std::min(1.0, kStepFraction * max_step(chol_z, corr.dz));
    y_mat = symmetrize(y_mat + ap * corr.dy_mat);
    z_mat = symmetrize(z_mat + ad * corr.dz);
    y += ad * corr.dy;
  }

  sol.iterations = iter;
  sol.x = HermitianOperator(extract_complex(y_mat, 1.0), shape);
  sol.dual_slack = HermitianOperator(extract_complex(z_mat, 2.0), shape);
  const FeasibilityReport feas = check_feasibility(problem, sol.x);
  sol.primal_residual = feas.primal_residual;
  sol.min_eigenvalue = feas.min_eigenvalue;
  sol.value = frobenius_inner(problem.objective, sol.x);

  if (status == SdpStatus::optimal) {
    if (sol.primal_residual > options.feas_tol || sol.min_eigenvalue < -options.feas_tol) {
      status = SdpStatus::numerical_failure;
      message = "final iterate fails the feasibility audit on the input constraints";
    } else if (sol.value > sol.dual_value + sol.duality_gap + options.feas_tol) {
      status = SdpStatus::numerical_failure;
      message = "weak duality audit failed";
    } else if (objective_history.size() > static_cast<std::size_t>(kMonotonicityWindow)) {
      const std::size_t last = objective_history.size() - 1;
      for (std::size_t k = last - kMonotonicityWindow + 1; k <= last; ++k) {
        const double slack = kMonotonicityTolerance * (1.0 + std::abs(objective_history[k - 1]));
        if (objective_history[k] < objective_history[k - 1] - slack) {
          status = SdpStatus::numerical_failure;
          message = "primal objective decreased along the final iterations";
          break;
        }
      }
    }
  }
  sol.status = status;
  sol.message = message;
  return sol;
}

}  // namespace qtradeoff
