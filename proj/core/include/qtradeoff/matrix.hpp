#pragma once

// Dense complex linear algebra with tensor-factor bookkeeping.
//
// Storage is row-major. Operators carry a TensorShape describing how the
// Hilbert space factorizes; the first `in_count` factors form the input
// space of a Jamiolkowski operator, the remaining ones the output space.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtradeoff {

using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Row-major entries; throws std::invalid_argument on size mismatch or
  /// non-finite values.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(std::span<const Complex> entries);
  static ComplexMatrix basis_vector(std::size_t n, std::size_t k);
  static ComplexMatrix diagonal(std::span<const double> values);
  static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Complex> entries() noexcept { return data_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;
  Complex trace() const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale) noexcept;

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Largest entrywise modulus of a - b. Shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// v w^dagger for column vectors.
ComplexMatrix outer(const ComplexMatrix& v, const ComplexMatrix& w);

/// Ordered tensor factor dimensions, the first `in_count` of which are the
/// input space.
class TensorShape {
 public:
  TensorShape() = default;
  TensorShape(std::vector<std::size_t> factors, std::size_t in_count);
  /// Single-factor shape of dimension n, counted as input.
  static TensorShape flat(std::size_t n) { return TensorShape({n}, 1); }
  /// Bipartite in/out shape.
  static TensorShape in_out(std::size_t in_dim, std::size_t out_dim) {
    return TensorShape({in_dim, out_dim}, 1);
  }

  const std::vector<std::size_t>& factors() const noexcept { return factors_; }
  std::size_t size() const noexcept { return factors_.size(); }
  std::size_t factor(std::size_t k) const { return factors_.at(k); }
  std::size_t in_count() const noexcept { return in_count_; }
  std::size_t dim() const noexcept;
  std::size_t in_dim() const noexcept;
  std::size_t out_dim() const noexcept;

  /// Shape with the given factor positions removed.
  TensorShape without(std::span<const std::size_t> removed) const;
  /// Indices of the input (true) or output (false) factors.
  std::vector<std::size_t> input_factors() const;
  std::vector<std::size_t> output_factors() const;

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

 private:
  std::vector<std::size_t> factors_;
  std::size_t in_count_ = 0;
};

/// Square Hermitian matrix with a tensor shape. Construction checks the
/// Hermiticity deviation and then stores the exact symmetrization
/// (M + M^dagger)/2.
class HermitianOperator {
 public:
  /// Absolute tolerance on max|M - M^dagger|, scaled by (1 + max|M|).
  static constexpr double kHermiticityTolerance = 1e-12;

  HermitianOperator() = default;
  HermitianOperator(ComplexMatrix matrix, TensorShape shape);
  explicit HermitianOperator(ComplexMatrix matrix);

  static HermitianOperator identity(const TensorShape& shape);
  static HermitianOperator zero(const TensorShape& shape);
  /// v v^dagger for a column vector v.
  static HermitianOperator projector(const ComplexMatrix& v, TensorShape shape);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const TensorShape& shape() const noexcept { return shape_; }
  std::size_t dim() const noexcept { return matrix_.rows(); }
  Complex operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }
  double trace() const { return matrix_.trace().real(); }
  HermitianOperator with_shape(TensorShape shape) const;

  HermitianOperator& operator+=(const HermitianOperator& other);
  HermitianOperator& operator-=(const HermitianOperator& other);
  HermitianOperator& operator*=(double scale);
  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(HermitianOperator a, double s) { return a *= s; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }

 private:
  ComplexMatrix matrix_;
  TensorShape shape_;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace out the listed factors. The input need not be Hermitian.
ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::span<const std::size_t> traced);
HermitianOperator partial_trace(const HermitianOperator& op, std::span<const std::size_t> traced);
HermitianOperator partial_trace(const HermitianOperator& op,
                                std::initializer_list<std::size_t> traced);

/// Transpose the listed factors. An involution.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const TensorShape& shape,
                                std::span<const std::size_t> transposed);
HermitianOperator partial_transpose(const HermitianOperator& op,
                                    std::span<const std::size_t> transposed);
HermitianOperator partial_transpose(const HermitianOperator& op,
                                    std::initializer_list<std::size_t> transposed);

/// Place `local`, acting on the factors at `positions` (in the order given),
/// into the full space described by `shape`, with identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& local, std::span<const std::size_t> positions,
                    const TensorShape& shape);
ComplexMatrix embed(const ComplexMatrix& local, std::initializer_list<std::size_t> positions,
                    const TensorShape& shape);

/// Thrown when the eigensolver exceeds its sweep cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double norm, int sweeps);
  double matrix_norm() const noexcept { return norm_; }
  int sweeps() const noexcept { return sweeps_; }

 private:
  double norm_;
  int sweeps_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns, orthonormal
};

/// Cyclic complex Jacobi eigensolver.
EigenDecomposition eigh(const HermitianOperator& op);
EigenDecomposition eigh(const ComplexMatrix& m);

/// V f(Lambda) V^dagger for a Hermitian matrix. Used for matrix exponentials
/// and square roots.
template <typename Fn>
ComplexMatrix apply_spectral(const EigenDecomposition& eig, Fn&& fn) {
  const std::size_t n = eig.values.size();
  ComplexMatrix scaled = eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex w = fn(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= w;
  }
  return scaled * eig.vectors.adjoint();
}

/// (I (x) a)|Phi>, with |Phi> = sum_i |i>|i>. Component i*n_out + o equals
/// a(o, i) where a is n_out x n_in.
ComplexMatrix vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexMatrix& v, std::size_t n_out, std::size_t n_in);

/// Identity followed by the generalized Gell-Mann matrices; pairwise
/// orthogonal under Tr[AB].
std::vector<HermitianOperator> hermitian_basis(std::size_t d);

/// Tr[a b], with the imaginary residue checked and discarded.
double frobenius_inner(const HermitianOperator& a, const HermitianOperator& b);
double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qtradeoff
