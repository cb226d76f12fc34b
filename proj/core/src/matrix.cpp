#include "qtradeoff/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qtradeoff {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Mixed-radix digits of a flat index, most significant factor first.
struct Radix {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> strides;

  explicit Radix(const std::vector<std::size_t>& factors) : dims(factors), strides(factors.size()) {
    std::size_t s = 1;
    for (std::size_t k = factors.size(); k-- > 0;) {
      strides[k] = s;
      s *= factors[k];
    }
  }
  std::size_t digit(std::size_t index, std::size_t k) const { return (index / strides[k]) % dims[k]; }
};

void check_positions(std::span<const std::size_t> positions, std::size_t count) {
  std::vector<bool> seen(count, false);
  for (std::size_t p : positions) {
    if (p >= count) throw std::out_of_range("tensor factor index out of range");
    if (seen[p]) throw std::invalid_argument("repeated tensor factor index");
    seen[p] = true;
  }
}

}  // namespace

// --- ComplexMatrix -------------------------------------------------------

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(data_.size() == rows * cols, "ComplexMatrix: entry count does not match rows*cols");
  require(all_finite(), "ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> entries) {
  return ComplexMatrix(entries.size(), 1, std::vector<Complex>(entries.begin(), entries.end()));
}

ComplexMatrix ComplexMatrix::basis_vector(std::size_t n, std::size_t k) {
  require(k < n, "basis_vector: index out of range");
  ComplexMatrix v(n, 1);
  v(k, 0) = 1.0;
  return v;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, "from_rows: ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

Complex ComplexMatrix::trace() const {
  require(is_square(), "trace: matrix is not square");
  Complex t{};
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) noexcept {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), "matrix product: inner dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
  double m = 0.0;
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) m = std::max(m, std::abs(ea[k] - eb[k]));
  return m;
}

ComplexMatrix outer(const ComplexMatrix& v, const ComplexMatrix& w) {
  require(v.cols() == 1 && w.cols() == 1, "outer: arguments must be column vectors");
  ComplexMatrix out(v.rows(), w.rows());
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < w.rows(); ++j) out(i, j) = v(i, 0) * std::conj(w(j, 0));
  return out;
}

// --- TensorShape ----------------------------------------------------------

TensorShape::TensorShape(std::vector<std::size_t> factors, std::size_t in_count)
    : factors_(std::move(factors)), in_count_(in_count) {
  require(in_count_ <= factors_.size(), "TensorShape: in_count exceeds factor count");
  require(std::all_of(factors_.begin(), factors_.end(), [](std::size_t f) { return f > 0; }),
          "TensorShape: factor dimensions must be positive");
}

std::size_t TensorShape::dim() const noexcept {
  return std::accumulate(factors_.begin(), factors_.end(), std::size_t{1}, std::multiplies<>());
}

std::size_t TensorShape::in_dim() const noexcept {
  return std::accumulate(factors_.begin(), factors_.begin() + static_cast<std::ptrdiff_t>(in_count_),
                         std::size_t{1}, std::multiplies<>());
}

std::size_t TensorShape::out_dim() const noexcept {
  return std::accumulate(factors_.begin() + static_cast<std::ptrdiff_t>(in_count_), factors_.end(),
                         std::size_t{1}, std::multiplies<>());
}

TensorShape TensorShape::without(std::span<const std::size_t> removed) const {
  check_positions(removed, factors_.size());
  std::vector<std::size_t> kept;
  std::size_t kept_in = 0;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (std::find(removed.begin(), removed.end(), k) != removed.end()) continue;
    kept.push_back(factors_[k]);
    if (k < in_count_) ++kept_in;
  }
  return TensorShape(std::move(kept), kept_in);
}

std::vector<std::size_t> TensorShape::input_factors() const {
  std::vector<std::size_t> idx(in_count_);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

std::vector<std::size_t> TensorShape::output_factors() const {
  std::vector<std::size_t> idx(factors_.size() - in_count_);
  std::iota(idx.begin(), idx.end(), in_count_);
  return idx;
}

// --- HermitianOperator ----------------------------------------------------

HermitianOperator::HermitianOperator(ComplexMatrix matrix, TensorShape shape)
    : matrix_(std::move(matrix)), shape_(std::move(shape)) {
  require(matrix_.is_square(), "HermitianOperator: matrix is not square");
  require(shape_.dim() == matrix_.rows(), "HermitianOperator: shape does not match dimension");
  require(matrix_.all_finite(), "HermitianOperator: non-finite entry");
  const std::size_t n = matrix_.rows();
  const double tol = kHermiticityTolerance * (1.0 + matrix_.max_abs());
  double deviation = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      deviation = std::max(deviation, std::abs(matrix_(i, j) - std::conj(matrix_(j, i))));
  if (deviation > tol) {
    std::ostringstream msg;
    msg << "HermitianOperator: Hermiticity deviation " << deviation << " exceeds " << tol;
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    matrix_(i, i) = matrix_(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (matrix_(i, j) + std::conj(matrix_(j, i)));
      matrix_(i, j) = avg;
      matrix_(j, i) = std::conj(avg);
    }
  }
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix)
    : HermitianOperator(matrix, TensorShape::flat(matrix.rows())) {}

HermitianOperator HermitianOperator::identity(const TensorShape& shape) {
  return HermitianOperator(ComplexMatrix::identity(shape.dim()), shape);
}

HermitianOperator HermitianOperator::zero(const TensorShape& shape) {
  return HermitianOperator(ComplexMatrix(shape.dim(), shape.dim()), shape);
}

HermitianOperator HermitianOperator::projector(const ComplexMatrix& v, TensorShape shape) {
  return HermitianOperator(outer(v, v), std::move(shape));
}

HermitianOperator HermitianOperator::with_shape(TensorShape shape) const {
  require(shape.dim() == dim(), "with_shape: dimension mismatch");
  HermitianOperator out = *this;
  out.shape_ = std::move(shape);
  return out;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
  require(dim() == other.dim(), "operator sum: dimension mismatch");
  matrix_ += other.matrix_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& other) {
  require(dim() == other.dim(), "operator difference: dimension mismatch");
  matrix_ -= other.matrix_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double scale) {
  matrix_ *= scale;
  return *this;
}

// --- tensor operations ----------------------------------------------------

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rb = b.rows(), cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const TensorShape& shape,
                            std::span<const std::size_t> traced) {
  require(m.is_square() && m.rows() == shape.dim(), "partial_trace: shape does not match matrix");
  check_positions(traced, shape.size());
  const TensorShape reduced = shape.without(traced);
  const Radix full(shape.factors());

  std::vector<bool> is_traced(shape.size(), false);
  for (std::size_t t : traced) is_traced[t] = true;

  // Reduced index of every full index, and the traced-digit signature.
  const std::size_t n = shape.dim();
  std::vector<std::size_t> kept_index(n), traced_key(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t kept = 0, key = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      const std::size_t digit = full.digit(idx, k);
      if (is_traced[k]) {
        key = key * shape.factor(k) + digit;
      } else {
        kept = kept * shape.factor(k) + digit;
      }
    }
    kept_index[idx] = kept;
    traced_key[idx] = key;
  }

  ComplexMatrix out(reduced.dim(), reduced.dim());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (traced_key[r] == traced_key[c]) out(kept_index[r], kept_index[c]) += m(r, c);
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& op, std::span<const std::size_t> traced) {
  return HermitianOperator(partial_trace(op.matrix(), op.shape(), traced), op.shape().without(traced));
}

HermitianOperator partial_trace(const HermitianOperator& op,
                                std::initializer_list<std::size_t> traced) {
  return partial_trace(op, std::span<const std::size_t>(traced.begin(), traced.size()));
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const TensorShape& shape,
                                std::span<const std::size_t> transposed) {
  require(m.is_square() && m.rows() == shape.dim(), "partial_transpose: shape does not match matrix");
  check_positions(transposed, shape.size());
  const Radix full(shape.factors());
  const std::size_t n = shape.dim();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t r2 = r, c2 = c;
      for (std::size_t k : transposed) {
        const std::size_t dr = full.digit(r, k), dc = full.digit(c, k);
        r2 = r2 - dr * full.strides[k] + dc * full.strides[k];
        c2 = c2 - dc * full.strides[k] + dr * full.strides[k];
      }
      out(r2, c2) = m(r, c);
    }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& op,
                                    std::span<const std::size_t> transposed) {
  return HermitianOperator(partial_transpose(op.matrix(), op.shape(), transposed), op.shape());
}

HermitianOperator partial_transpose(const HermitianOperator& op,
                                    std::initializer_list<std::size_t> transposed) {
  return partial_transpose(op, std::span<const std::size_t>(transposed.begin(), transposed.size()));
}

ComplexMatrix embed(const ComplexMatrix& local, std::span<const std::size_t> positions,
                    const TensorShape& shape) {
  check_positions(positions, shape.size());
  std::size_t local_dim = 1;
  for (std::size_t p : positions) local_dim *= shape.factor(p);
  require(local.is_square() && local.rows() == local_dim, "embed: local operator dimension mismatch");

  const Radix full(shape.factors());
  std::vector<bool> is_local(shape.size(), false);
  for (std::size_t p : positions) is_local[p] = true;

  const std::size_t n = shape.dim();
  std::vector<std::size_t> sub(n), rest(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t s = 0, r = 0;
    for (std::size_t p : positions) s = s * shape.factor(p) + full.digit(idx, p);
    for (std::size_t k = 0; k < shape.size(); ++k)
      if (!is_local[k]) r = r * shape.factor(k) + full.digit(idx, k);
    sub[idx] = s;
    rest[idx] = r;
  }

  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (rest[r] == rest[c]) out(r, c) = local(sub[r], sub[c]);
  return out;
}

ComplexMatrix embed(const ComplexMatrix& local, std::initializer_list<std::size_t> positions,
                    const TensorShape& shape) {
  return embed(local, std::span<const std::size_t>(positions.begin(), positions.size()), shape);
}

// --- vectorization --------------------------------------------------------

ComplexMatrix vec(const ComplexMatrix& a) {
  const std::size_t n_out = a.rows(), n_in = a.cols();
  ComplexMatrix v(n_in * n_out, 1);
  for (std::size_t i = 0; i < n_in; ++i)
    for (std::size_t o = 0; o < n_out; ++o) v(i * n_out + o, 0) = a(o, i);
  return v;
}

ComplexMatrix unvec(const ComplexMatrix& v, std::size_t n_out, std::size_t n_in) {
  require(v.cols() == 1 && v.rows() == n_in * n_out, "unvec: vector length mismatch");
  ComplexMatrix a(n_out, n_in);
  for (std::size_t i = 0; i < n_in; ++i)
    for (std::size_t o = 0; o < n_out; ++o) a(o, i) = v(i * n_out + o, 0);
  return a;
}

// --- inner products and bases ---------------------------------------------

std::vector<HermitianOperator> hermitian_basis(std::size_t d) {
  require(d >= 1, "hermitian_basis: d must be positive");
  std::vector<HermitianOperator> basis;
  basis.reserve(d * d);
  basis.emplace_back(ComplexMatrix::identity(d));
  const Complex i_unit{0.0, 1.0};
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix sym(d, d), asym(d, d);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      asym(j, k) = -i_unit;
      asym(k, j) = i_unit;
      basis.emplace_back(std::move(sym));
      basis.emplace_back(std::move(asym));
    }
  for (std::size_t l = 1; l < d; ++l) {
    ComplexMatrix diag(d, d);
    const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (std::size_t k = 0; k < l; ++k) diag(k, k) = norm;
    diag(l, l) = -norm * static_cast<double>(l);
    basis.emplace_back(std::move(diag));
  }
  return basis;
}

double frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.is_square() && b.is_square() && a.rows() == b.rows(),
          "frobenius_inner: dimension mismatch");
  const std::size_t n = a.rows();
  Complex sum{};
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex term = a(i, j) * b(j, i);
      sum += term;
      scale += std::abs(term);
    }
  if (std::abs(sum.imag()) > 1e-12 * (1.0 + scale)) {
    std::ostringstream msg;
    msg << "frobenius_inner: imaginary residue " << sum.imag() << " (operands not Hermitian?)";
    throw std::domain_error(msg.str());
  }
  return sum.real();
}

double frobenius_inner(const HermitianOperator& a, const HermitianOperator& b) {
  return frobenius_inner(a.matrix(), b.matrix());
}

}  // namespace qtradeoff
