#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtradeoff/matrix.hpp"

namespace qtradeoff {

namespace {

constexpr int kMaxSweeps = 100;

std::string convergence_message(double norm, int sweeps) {
  std::ostringstream msg;
  msg << "eigh: no convergence after " << sweeps << " sweeps (matrix max-norm " << norm << ")";
  return msg.str();
}

double off_diagonal_norm2(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

}  // namespace

ConvergenceError::ConvergenceError(double norm, int sweeps)
    : std::runtime_error(convergence_message(norm, sweeps)), norm_(norm), sweeps_(sweeps) {}

EigenDecomposition eigh(const ComplexMatrix& m) {
  return eigh(HermitianOperator(m));
}

// Cyclic Jacobi. Each rotation first removes the phase of a(p,q) with
// diag(1, e^{-i phi}) and then applies the real symmetric rotation, so the
// combined 2x2 unitary on columns (p, q) is
//   [ c          s        ]
//   [ -s e*      c e*     ]   with e = a(p,q)/|a(p,q)|.
EigenDecomposition eigh(const HermitianOperator& op) {
  ComplexMatrix a = op.matrix();
  const std::size_t n = a.rows();
  ComplexMatrix v = ComplexMatrix::identity(n);

  double total = 0.0;
  for (auto z : a.entries()) total += std::norm(z);
  const double threshold = std::max(total, 1e-300) * 1e-30;

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm2(a) <= threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Skip rotations that cannot change the diagonal in floating point.
        if (sweep > 3 && std::abs(app) + 100.0 * mag == std::abs(app) &&
            std::abs(aqq) + 100.0 * mag == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex e = apq / mag;
        const Complex ec = std::conj(e);
        const Complex u_pp = c, u_pq = s, u_qp = -s * ec, u_qq = c * ec;

        // a <- a u
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        // a <- u^dagger a
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        // v <- v u
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm2(a) > threshold)
    throw ConvergenceError(op.matrix().max_abs(), sweep);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

}  // namespace qtradeoff
