#include "qtradeoff/scenario.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qtradeoff {

namespace {

ComplexMatrix unnormalized_max_entangled_projector(std::size_t d) {
  const ComplexMatrix phi = vec(ComplexMatrix::identity(d));
  return outer(phi, phi);
}

FactorAction conjugated(FactorAction a) {
  switch (a) {
    case FactorAction::plain:
      return FactorAction::conjugate;
    case FactorAction::conjugate:
      return FactorAction::plain;
    case FactorAction::identity:
      return FactorAction::identity;
  }
  return a;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::pure:
      return "pure";
    case Family::maxent:
      return "maxent";
    case Family::spin:
      return "spin";
  }
  return "unknown";
}

std::string Scenario::parameter() const {
  if (family == Family::spin) return "j=" + j.to_string();
  return "d=" + std::to_string(d);
}

TensorShape Scenario::state_shape() const {
  if (family == Family::maxent) return TensorShape({d, d}, 2);
  return TensorShape({in_dim}, 1);
}

RepSampler Scenario::seed_rep() const {
  std::vector<FactorAction> pattern;
  for (FactorAction a : state_rep.pattern()) pattern.push_back(conjugated(a));
  for (FactorAction a : state_rep.pattern()) pattern.push_back(a);
  return state_rep.lifted(std::move(pattern));
}

Scenario build_pure(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_pure: d must be at least 2");
  Scenario s;
  s.family = Family::pure;
  s.d = d;
  s.in_dim = s.out_dim = d;
  s.shape = TensorShape({d, d}, 1);
  s.psi0 = ComplexMatrix::basis_vector(d, 0);
  s.state_rep = RepSampler::fundamental(d);

  const double norm = 1.0 / static_cast<double>(d * (d + 1));
  const ComplexMatrix id = ComplexMatrix::identity(d * d);
  s.r_f = HermitianOperator((id + unnormalized_max_entangled_projector(d)) * Complex(norm), s.shape);

  const ComplexMatrix p0 = outer(s.psi0, s.psi0);
  s.r_g = HermitianOperator(kron(ComplexMatrix::identity(d) + p0.transpose(), ComplexMatrix::identity(d)) *
                                Complex(norm),
                            s.shape);

  // U^* is irreducible: Tr_out[R_0] twirls to (Tr[R_0]/d) I.
  s.constraints.push_back({HermitianOperator::identity(s.shape), static_cast<double>(d)});
  return s;
}

Scenario build_maxent(std::size_t d) {
  if (d < 2) throw std::invalid_argument("build_maxent: d must be at least 2");
  Scenario s;
  s.family = Family::maxent;
  s.d = d;
  s.in_dim = s.out_dim = d * d;
  // Factors (in1, in2, out1, out2).
  s.shape = TensorShape({d, d, d, d}, 2);
  s.psi0 = vec(ComplexMatrix::identity(d)) * Complex(1.0 / std::sqrt(static_cast<double>(d)));
  s.state_rep = RepSampler::fundamental(d).lifted({FactorAction::plain, FactorAction::identity});

  const double dd = static_cast<double>(d);
  const double norm = 1.0 / (dd * dd * (dd * dd - 1.0));
  const ComplexMatrix pair = unnormalized_max_entangled_projector(d);
  const ComplexMatrix i13 = embed(pair, {0, 2}, s.shape);
  const ComplexMatrix i24 = embed(pair, {1, 3}, s.shape);
  const ComplexMatrix i12 = embed(pair, {0, 1}, s.shape);
  const ComplexMatrix id = ComplexMatrix::identity(s.shape.dim());

  s.r_f = HermitianOperator((id + i13 * i24 - (i13 + i24) * Complex(1.0 / dd)) * Complex(norm), s.shape);
  // The pair operator acts on the input factors (1,2): R_G = X_in (x) I_out.
  s.r_g = HermitianOperator((id * Complex(1.0 - 2.0 / (dd * dd)) + i12 * Complex(1.0 / dd)) * Complex(norm),
                            s.shape);

  // U^* (x) I on the input: the twirl only sees Tr_{in1}[Tr_out R_0], which
  // must equal d I_d. One scalar constraint per Hermitian basis element.
  for (const HermitianOperator& e : hermitian_basis(d)) {
    s.constraints.push_back({HermitianOperator(embed(e.matrix(), {1}, s.shape), s.shape), dd * e.trace()});
  }
  return s;
}

Scenario build_spin(Spin j) {
  if (j.twice() < 1) throw std::invalid_argument("build_spin: 2j must be a positive integer");
  const std::size_t n = j.dim();
  Scenario s;
  s.family = Family::spin;
  s.d = n;
  s.j = j;
  s.in_dim = s.out_dim = n;
  s.shape = TensorShape({n, n}, 1);
  s.psi0 = ComplexMatrix::basis_vector(n, 0);
  s.state_rep = RepSampler::spin(j);

  const double norm = 1.0 / (2.0 * j.twice() + 1.0);
  const HermitianOperator top = total_spin_projector(j, Spin::from_twice(2 * j.twice())).with_shape(s.shape);
  s.r_f = partial_transpose(top, {0}) * norm;

  const ComplexMatrix p0 = outer(s.psi0, s.psi0);
  const std::size_t second[] = {1};
  const ComplexMatrix reduced =
      partial_trace(kron(ComplexMatrix::identity(n), p0) * top.matrix(), s.shape, second);
  s.r_g = HermitianOperator(kron(reduced, ComplexMatrix::identity(n)) * Complex(norm), s.shape);

  s.constraints.push_back({HermitianOperator::identity(s.shape), static_cast<double>(n)});
  return s;
}

HermitianOperator derive_estimation_operator(const HermitianOperator& r_f, const ComplexMatrix& psi0,
                                             const TensorShape& shape) {
  if (psi0.rows() != shape.out_dim()) throw std::invalid_argument("derive_estimation_operator: state dimension mismatch");
  const ComplexMatrix projected = kron(ComplexMatrix::identity(shape.in_dim()), outer(psi0, psi0)) * r_f.matrix();
  const std::vector<std::size_t> out_factors = shape.output_factors();
  const ComplexMatrix in_part = partial_trace(projected, shape, out_factors);
  return HermitianOperator(kron(in_part, ComplexMatrix::identity(shape.out_dim())), shape);
}

double constraint_residual(const Scenario& s, const HermitianOperator& x) {
  double worst = 0.0;
  for (const auto& c : s.constraints) worst = std::max(worst, std::abs(frobenius_inner(c.op, x) - c.value));
  return worst;
}

HermitianOperator identity_seed(const Scenario& s) {
  return HermitianOperator::projector(vec(ComplexMatrix::identity(s.in_dim)), s.shape);
}

HermitianOperator measure_prepare_seed(const Scenario& s) {
  const ComplexMatrix p0 = outer(s.psi0, s.psi0);
  HermitianOperator seed(kron(p0.transpose(), p0) * Complex(static_cast<double>(s.in_dim)), s.shape);
  const double residual = constraint_residual(s, seed);
  if (residual > 1e-12 * static_cast<double>(s.in_dim)) {
    std::ostringstream msg;
    msg << "measure_prepare_seed: constraint residual " << residual << " for " << s.name() << " " << s.parameter();
    throw std::logic_error(msg.str());
  }
  return seed;
}

HermitianOperator covariant_seed(const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries) {
  if (kraus_by_outcome.empty() || kraus_by_outcome.front().empty())
    throw std::invalid_argument("covariant_seed: no Kraus operators");
  const ComplexMatrix& first = kraus_by_outcome.front().front();
  return covariant_seed(kraus_by_outcome, guess_unitaries, TensorShape::in_out(first.cols(), first.rows()));
}

HermitianOperator covariant_seed(const std::vector<std::vector<ComplexMatrix>>& kraus_by_outcome,
                                 const std::vector<ComplexMatrix>& guess_unitaries, const TensorShape& shape) {
  if (kraus_by_outcome.size() != guess_unitaries.size())
    throw std::invalid_argument("covariant_seed: need exactly one guess unitary per outcome");
  const std::size_t n_in = shape.in_dim(), n_out = shape.out_dim();
  if (n_in != n_out) throw std::invalid_argument("covariant_seed: covariant seeds need equal in/out dimensions");

  ComplexMatrix povm_sum(n_in, n_in);
  ComplexMatrix seed(shape.dim(), shape.dim());
  for (std::size_t r = 0; r < kraus_by_outcome.size(); ++r) {
    const ComplexMatrix& u = guess_unitaries[r];
    if (u.rows() != n_in || u.cols() != n_in) throw std::invalid_argument("covariant_seed: guess unitary dimension mismatch");
    for (const ComplexMatrix& a : kraus_by_outcome[r]) {
      if (a.rows() != n_out || a.cols() != n_in) throw std::invalid_argument("covariant_seed: Kraus operator dimension mismatch");
      povm_sum += a.adjoint() * a;
      const ComplexMatrix v = vec(u.adjoint() * a * u);
      seed += outer(v, v);
    }
  }
  const double deviation = max_abs_diff(povm_sum, ComplexMatrix::identity(n_in));
  if (deviation > 1e-10) {
    std::ostringstream msg;
    msg << "covariant_seed: Kraus operators violate completeness (max deviation " << deviation << ")";
    throw std::invalid_argument(msg.str());
  }
  return HermitianOperator(std::move(seed), shape);
}

}  // namespace qtradeoff
