#include "qtradeoff/group.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qtradeoff {

namespace {

constexpr double kCasimirClusterTolerance = 1e-8;

long parse_integer(std::string_view text) {
  long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("invalid spin value: '" + std::string(text) + "'");
  return value;
}

ComplexMatrix factor_matrix(FactorAction action, const ComplexMatrix& u) {
  switch (action) {
    case FactorAction::plain:
      return u;
    case FactorAction::conjugate:
      return u.conjugate();
    case FactorAction::identity:
      return ComplexMatrix::identity(u.rows());
  }
  return u;
}

}  // namespace

// --- Spin -----------------------------------------------------------------

Spin Spin::from_twice(int twice_j) {
  if (twice_j < 0) throw std::invalid_argument("spin must be non-negative");
  return Spin(twice_j);
}

Spin Spin::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty spin value");

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const long num = parse_integer(text.substr(0, slash));
    const long den = parse_integer(text.substr(slash + 1));
    if (den <= 0) throw std::invalid_argument("spin denominator must be positive");
    if ((2 * num) % den != 0) throw std::invalid_argument("spin '" + std::string(text) + "' is not a half-integer");
    return from_twice(static_cast<int>(2 * num / den));
  }

  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw std::invalid_argument("invalid spin value: '" + std::string(text) + "'");
  const double twice = 2.0 * value;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > 1e-9)
    throw std::invalid_argument("spin '" + std::string(text) + "' is not a half-integer");
  return from_twice(static_cast<int>(rounded));
}

std::string Spin::to_string() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

// --- sampling ---------------------------------------------------------------

ComplexMatrix haar_unitary(std::size_t d, Rng& rng) {
  if (d == 0) throw std::invalid_argument("haar_unitary: d must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix q(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      q(i, j) = Complex(re, im);
    }
  // Two passes of classical Gram-Schmidt; the R factor then has a real
  // positive diagonal, which is the phase convention that makes Q Haar.
  for (std::size_t k = 0; k < d; ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < k; ++p) {
        Complex proj{};
        for (std::size_t i = 0; i < d; ++i) proj += std::conj(q(i, p)) * q(i, k);
        for (std::size_t i = 0; i < d; ++i) q(i, k) -= proj * q(i, p);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) norm += std::norm(q(i, k));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < d; ++i) q(i, k) /= norm;
  }
  return q;
}

SpinOperators spin_operators(Spin j) {
  if (j.twice() < 1) throw std::invalid_argument("spin_operators: 2j must be a positive integer");
  const std::size_t n = j.dim();
  const double jv = j.value();
  ComplexMatrix raise(n, n), jz(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = -jv + static_cast<double>(k);
    jz(k, k) = m;
    if (k + 1 < n) raise(k + 1, k) = std::sqrt(jv * (jv + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix lower = raise.adjoint();
  const Complex half_over_i{0.0, -0.5};
  return SpinOperators{HermitianOperator((raise + lower) * Complex(0.5)),
                       HermitianOperator((raise - lower) * half_over_i), HermitianOperator(jz)};
}

SpinRotor::SpinRotor(Spin j) : j_(j) {
  const SpinOperators ops = spin_operators(j);
  jy_ = eigh(ops.jy);
  jz_ = eigh(ops.jz);
}

ComplexMatrix SpinRotor::operator()(double alpha, double beta, double gamma) const {
  auto rotation = [](const EigenDecomposition& eig, double angle) {
    return apply_spectral(eig, [angle](double lambda) { return std::polar(1.0, -angle * lambda); });
  };
  return rotation(jz_, alpha) * rotation(jy_, beta) * rotation(jz_, gamma);
}

ComplexMatrix spin_rotation(Spin j, double alpha, double beta, double gamma) {
  return SpinRotor(j)(alpha, beta, gamma);
}

ComplexMatrix haar_spin(const SpinRotor& rotor, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> cosine(-1.0, 1.0);
  const double alpha = angle(rng);
  const double beta = std::acos(cosine(rng));
  const double gamma = angle(rng);
  return rotor(alpha, beta, gamma);
}

ComplexMatrix haar_spin(Spin j, Rng& rng) { return haar_spin(SpinRotor(j), rng); }

// --- RepSampler -------------------------------------------------------------

RepSampler RepSampler::fundamental(std::size_t d) {
  if (d == 0) throw std::invalid_argument("RepSampler: dimension must be positive");
  RepSampler s;
  s.group_ = GroupKind::fundamental_unitary;
  s.base_dim_ = d;
  return s;
}

RepSampler RepSampler::spin(Spin j) {
  RepSampler s;
  s.group_ = GroupKind::spin;
  s.base_dim_ = j.dim();
  s.spin_ = j;
  s.rotor_ = std::make_shared<const SpinRotor>(j);
  return s;
}

RepSampler RepSampler::lifted(std::vector<FactorAction> pattern) const {
  if (pattern.empty()) throw std::invalid_argument("RepSampler: empty lift pattern");
  RepSampler s = *this;
  s.pattern_ = std::move(pattern);
  return s;
}

std::size_t RepSampler::dim() const noexcept {
  std::size_t d = 1;
  for (std::size_t k = 0; k < pattern_.size(); ++k) d *= base_dim_;
  return d;
}

ComplexMatrix RepSampler::sample_base(Rng& rng) const {
  if (group_ == GroupKind::spin) return haar_spin(*rotor_, rng);
  return haar_unitary(base_dim_, rng);
}

ComplexMatrix RepSampler::lift(const ComplexMatrix& u) const {
  ComplexMatrix v = factor_matrix(pattern_.front(), u);
  for (std::size_t k = 1; k < pattern_.size(); ++k) v = kron(v, factor_matrix(pattern_[k], u));
  return v;
}

// --- projectors and twirls --------------------------------------------------

HermitianOperator total_spin_projector(Spin j, Spin l) {
  if (!l.is_integer() || l.twice() > 2 * j.twice()) {
    throw std::invalid_argument("total_spin_projector: l = " + l.to_string() +
                                " is outside the coupling range of j (x) j with j = " + j.to_string());
  }
  const SpinOperators ops = spin_operators(j);
  const std::size_t n = j.dim();
  const ComplexMatrix id = ComplexMatrix::identity(n);
  ComplexMatrix casimir(n * n, n * n);
  for (const auto* op : {&ops.jx, &ops.jy, &ops.jz}) {
    const ComplexMatrix total = kron(op->matrix(), id) + kron(id, op->matrix());
    casimir += total * total;
  }
  const EigenDecomposition eig = eigh(HermitianOperator(casimir, TensorShape({n, n}, 1)));
  const double target = l.value() * (l.value() + 1.0);

  ComplexMatrix proj(n * n, n * n);
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (std::abs(eig.values[k] - target) > kCasimirClusterTolerance) continue;
    for (std::size_t r = 0; r < n * n; ++r)
      for (std::size_t c = 0; c < n * n; ++c)
        proj(r, c) += eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  return HermitianOperator(proj, TensorShape({n, n}, 1));
}

HermitianOperator schur_twirl_irreducible(const HermitianOperator& y, std::size_t d) {
  if (y.dim() != d) throw std::invalid_argument("schur_twirl_irreducible: operator dimension mismatch");
  HermitianOperator out = HermitianOperator::identity(y.shape());
  out *= y.trace() / static_cast<double>(d);
  return out;
}

TwirlReport monte_carlo_twirl(const RepSampler& sampler, const HermitianOperator& y, std::size_t n,
                              Rng& rng) {
  if (n < 2) throw std::invalid_argument("monte_carlo_twirl: need at least two samples");
  if (sampler.dim() != y.dim()) throw std::invalid_argument("monte_carlo_twirl: sampler dimension does not match operator");
  const std::size_t dim = y.dim();
  std::vector<Complex> sum(dim * dim);
  std::vector<double> sum_sq(dim * dim);
  for (std::size_t s = 0; s < n; ++s) {
    const ComplexMatrix v = sampler.sample(rng);
    const ComplexMatrix term = v * y.matrix() * v.adjoint();
    const auto e = term.entries();
    for (std::size_t k = 0; k < e.size(); ++k) {
      sum[k] += e[k];
      sum_sq[k] += std::norm(e[k]);
    }
  }
  const double count = static_cast<double>(n);
  ComplexMatrix mean(dim, dim);
  double max_se = 0.0;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const Complex m = sum[k] / count;
    mean.entries()[k] = m;
    const double var = std::max(0.0, (sum_sq[k] - count * std::norm(m)) / (count - 1.0));
    max_se = std::max(max_se, std::sqrt(var / count));
  }
  return TwirlReport{n, HermitianOperator(std::move(mean), y.shape()), max_se};
}

TwirlReport monte_carlo_twirl(const RepSampler& sampler, std::span<const FactorAction> pattern,
                              const HermitianOperator& y, std::size_t n, Rng& rng) {
  return monte_carlo_twirl(sampler.lifted(std::vector<FactorAction>(pattern.begin(), pattern.end())), y,
                           n, rng);
}

}  // namespace qtradeoff
