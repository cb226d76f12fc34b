#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace qtradeoff::cli {

namespace {

struct Check {
  std::string name;
  std::function<std::string(Rng&)> body;  // empty string on success
};

std::string describe(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

double max_entry_excess(const HermitianOperator& got, const HermitianOperator& want, double band) {
  return max_abs_diff(got.matrix(), want.matrix()) - band;
}

std::vector<Check> checks() {
  constexpr std::size_t kTwirlSamples = 20000;
  return {
      {"twirl of diag(1,0) under U(2) is I/2",
       [](Rng& rng) {
         const auto y = HermitianOperator::projector(ComplexMatrix::basis_vector(2, 0), TensorShape::flat(2));
         const TwirlReport r = monte_carlo_twirl(RepSampler::fundamental(2), y, kTwirlSamples, rng);
         const double excess = max_entry_excess(r.mean, HermitianOperator::identity(TensorShape::flat(2)) * 0.5,
                                                5.0 * r.standard_error);
         return excess <= 0.0 ? "" : describe("deviation exceeds 5 sigma by %.3g (sigma %.3g)", excess, r.standard_error);
       }},
      {"maximally entangled state is invariant under U* (x) U",
       [](Rng& rng) {
         const TensorShape shape({3, 3}, 1);
         const auto y = HermitianOperator::projector(vec(ComplexMatrix::identity(3)), shape) * (1.0 / 3.0);
         const FactorAction pattern[] = {FactorAction::conjugate, FactorAction::plain};
         const TwirlReport r = monte_carlo_twirl(RepSampler::fundamental(3), pattern, y, kTwirlSamples, rng);
         const double dev = max_abs_diff(r.mean.matrix(), y.matrix());
         return dev <= 1e-10 ? "" : describe("deviation %.3g (bound %.3g)", dev, 1e-10);
       }},
      {"spin twirl of |-1/2><-1/2| is I/2",
       [](Rng& rng) {
         const auto y = HermitianOperator::projector(ComplexMatrix::basis_vector(2, 0), TensorShape::flat(2));
         const TwirlReport r = monte_carlo_twirl(RepSampler::spin(Spin::from_twice(1)), y, kTwirlSamples, rng);
         const double excess = max_entry_excess(r.mean, HermitianOperator::identity(TensorShape::flat(2)) * 0.5,
                                                5.0 * r.standard_error);
         return excess <= 0.0 ? "" : describe("deviation exceeds 5 sigma by %.3g (sigma %.3g)", excess, r.standard_error);
       }},
      {"spin(1/2) coincides with pure(2)",
       [](Rng&) {
         const Scenario a = build_spin(Spin::from_twice(1)), b = build_pure(2);
         double dev = std::max(max_abs_diff(a.r_f.matrix(), b.r_f.matrix()), max_abs_diff(a.r_g.matrix(), b.r_g.matrix()));
         if (a.constraints.size() != b.constraints.size()) return std::string("constraint counts differ");
         for (std::size_t i = 0; i < a.constraints.size(); ++i) {
           dev = std::max(dev, max_abs_diff(a.constraints[i].op.matrix(), b.constraints[i].op.matrix()));
           dev = std::max(dev, std::abs(a.constraints[i].value - b.constraints[i].value));
         }
         return dev <= 1e-12 ? std::string() : describe("max deviation %.3g (bound %.3g)", dev, 1e-12);
       }},
      {"R_F of pure(2) matches its Monte Carlo average",
       [](Rng& rng) {
         const Scenario s = build_pure(2);
         const TwirlReport r = monte_carlo_twirl(s.seed_rep(), HermitianOperator::projector(kron(s.psi0.conjugate(), s.psi0), s.shape),
                                                 kTwirlSamples, rng);
         const double band = std::max(0.01, 5.0 * r.standard_error);
         const double dev = max_abs_diff(r.mean.matrix(), s.r_f.matrix());
         return dev <= band ? "" : describe("deviation %.3g (band %.3g)", dev, band);
       }},
      {"SDP: max Tr[diag(1,2) X] with Tr X = 1 is 2",
       [](Rng&) {
         const TensorShape shape = TensorShape::flat(2);
         const double diag[] = {1.0, 2.0};
         const SdpProblem p{HermitianOperator(ComplexMatrix::diagonal(diag), shape),
                            {{HermitianOperator::identity(shape), 1.0}}};
         const SdpSolution sol = solve(p);
         const double err = std::abs(sol.value - 2.0);
         if (sol.status != SdpStatus::optimal) return "status " + std::string(to_string(sol.status));
         return err <= 1e-7 ? std::string() : describe("value error %.3g (bound %.3g)", err, 1e-7);
       }},
      {"SDP: random 4x4 objective matches the top eigenvalue",
       [](Rng& rng) {
         std::normal_distribution<double> normal;
         const TensorShape shape = TensorShape::flat(4);
         for (int trial = 0; trial < 5; ++trial) {
           ComplexMatrix a(4, 4);
           for (Complex& z : a.entries()) z = Complex(normal(rng), normal(rng));
           const HermitianOperator c((a + a.adjoint()) * Complex(0.5), shape);
           const SdpSolution sol = solve(SdpProblem{c, {{HermitianOperator::identity(shape), 1.0}}});
           const double err = std::abs(sol.value - eigh(c).values.back());
           if (sol.status != SdpStatus::optimal || err > 1e-7) return describe("trial %.0f error %.3g", trial, err);
         }
         return std::string();
       }},
      {"maximal G of pure(2) is 2/3",
       [](Rng&) {
         const TradeoffPoint p = max_g(build_pure(2));
         const double err = std::abs(p.g - 2.0 / 3.0);
         if (!p.ok()) return "status " + std::string(to_string(p.status));
         return err <= 1e-5 ? std::string() : describe("G error %.3g (bound %.3g)", err, 1e-5);
       }},
  };
}

}  // namespace

int run_selftest(std::uint64_t seed, std::ostream& out) {
  int failures = 0;
  Rng rng(seed);
  for (const Check& check : checks()) {
    std::string detail;
    try {
      detail = check.body(rng);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      out << "PASS " << check.name << '\n';
    } else {
      ++failures;
      out << "FAIL " << check.name << ": " << detail << '\n';
    }
  }
  out << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failures;
}

}  // namespace qtradeoff::cli
