#include <cmath>
#include <vector>

#include "doctest.h"
#include "qtradeoff/scenario.hpp"
#include "support/oracles.hpp"

using namespace qtradeoff;

namespace {

std::vector<Scenario> all_scenarios() {
  return {build_pure(2), build_pure(3),  build_maxent(2), build_maxent(3),
          build_spin(Spin::parse("1/2")), build_spin(Spin::parse("1")), build_spin(Spin::parse("3/2")),
          build_spin(Spin::parse("2"))};
}

/// Monte Carlo average of |psi_g><psi_g|^T (x) |psi_g><psi_g| drawn straight
/// from the family's state sampler.
double monte_carlo_rf_deviation(const Scenario& s, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dim = s.shape.dim();
  ComplexMatrix sum(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexMatrix psi = s.state_rep.sample(rng) * s.psi0;
    const ComplexMatrix v = kron(psi.conjugate(), psi);
    sum += outer(v, v);
  }
  return max_abs_diff(sum * Complex(1.0 / static_cast<double>(n)), s.r_f.matrix());
}

/// Random instrument: Kraus operators cut from a random isometry into
/// C^n (x) C^(outcomes * kraus_per_outcome).
std::vector<std::vector<ComplexMatrix>> random_instrument(std::size_t n, std::size_t outcomes,
                                                          std::size_t kraus_per_outcome, Rng& rng) {
  const std::size_t rows = n * outcomes * kraus_per_outcome;
  ComplexMatrix g = oracle::random_matrix(rows, n, rng);
  // Orthonormalize the columns (modified Gram-Schmidt).
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      Complex dot = 0.0;
      for (std::size_t r = 0; r < rows; ++r) dot += std::conj(g(r, p)) * g(r, c);
      for (std::size_t r = 0; r < rows; ++r) g(r, c) -= dot * g(r, p);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += std::norm(g(r, c));
    for (std::size_t r = 0; r < rows; ++r) g(r, c) /= std::sqrt(norm);
  }
  std::vector<std::vector<ComplexMatrix>> kraus(outcomes);
  for (std::size_t o = 0; o < outcomes; ++o)
    for (std::size_t m = 0; m < kraus_per_outcome; ++m) {
      ComplexMatrix a(n, n);
      const std::size_t block = (o * kraus_per_outcome + m) * n;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = g(block + i, j);
      kraus[o].push_back(a);
    }
  return kraus;
}

}  // namespace

TEST_SUITE("scenario invariants") {
  TEST_CASE("normalization, positivity and dimensions") {
    for (const Scenario& s : all_scenarios()) {
      CAPTURE(s.name());
      CAPTURE(s.parameter());
      CHECK(s.in_dim == s.out_dim);
      CHECK(s.shape.dim() == s.in_dim * s.out_dim);
      CHECK(std::abs(s.r_f.trace() - 1.0) <= 1e-10);
      CHECK(eigh(s.r_f).values.front() >= -1e-10);
      CHECK(eigh(s.r_g).values.front() >= -1e-10);
    }
  }

  TEST_CASE("estimation operator follows from the operation operator") {
    for (const Scenario& s : all_scenarios()) {
      CAPTURE(s.name());
      CAPTURE(s.parameter());
      const HermitianOperator derived = derive_estimation_operator(s.r_f, s.psi0, s.shape);
      CHECK(max_abs_diff(derived.matrix(), s.r_g.matrix()) <= 1e-12);
    }
  }

  TEST_CASE("R_F commutes with the seed representation") {
    Rng rng(21);
    for (const Scenario& s : all_scenarios()) {
      CAPTURE(s.name());
      const RepSampler rep = s.seed_rep();
      for (int k = 0; k < 10; ++k) {
        const ComplexMatrix v = rep.sample(rng);
        CHECK(max_abs_diff(v * s.r_f.matrix() * v.adjoint(), s.r_f.matrix()) <= 1e-10);
      }
    }
  }

  TEST_CASE("canonical seeds satisfy the constraints") {
    for (const Scenario& s : all_scenarios()) {
      CAPTURE(s.name());
      CAPTURE(s.parameter());
      CHECK(constraint_residual(s, identity_seed(s)) <= 1e-12);
      CHECK(constraint_residual(s, measure_prepare_seed(s)) <= 1e-12);
    }
  }

  TEST_CASE("covariantized random instruments are feasible with fidelities in [0, 1]") {
    Rng rng(22);
    for (const Scenario& s : all_scenarios()) {
      CAPTURE(s.name());
      CAPTURE(s.parameter());
      for (int trial = 0; trial < 3; ++trial) {
        const auto kraus = random_instrument(s.in_dim, 3, 2, rng);
        std::vector<ComplexMatrix> guesses;
        for (int r = 0; r < 3; ++r) guesses.push_back(s.state_rep.sample(rng));
        const HermitianOperator seed = covariant_seed(kraus, guesses, s.shape);
        CHECK(constraint_residual(s, seed) <= 1e-10);
        const double f = frobenius_inner(s.r_f, seed), g = frobenius_inner(s.r_g, seed);
        CHECK(f >= -1e-12);
        CHECK(f <= 1.0 + 1e-9);
        CHECK(g >= -1e-12);
        CHECK(g <= 1.0 + 1e-9);
      }
    }
  }

  TEST_CASE("spin 1/2 coincides with the qubit pure-state family") {
    const Scenario a = build_spin(Spin::parse("1/2")), b = build_pure(2);
    CHECK(max_abs_diff(a.r_f.matrix(), b.r_f.matrix()) <= 1e-12);
    CHECK(max_abs_diff(a.r_g.matrix(), b.r_g.matrix()) <= 1e-12);
    REQUIRE(a.constraints.size() == b.constraints.size());
    for (std::size_t i = 0; i < a.constraints.size(); ++i) {
      CHECK(max_abs_diff(a.constraints[i].op.matrix(), b.constraints[i].op.matrix()) <= 1e-12);
      CHECK(a.constraints[i].value == b.constraints[i].value);
    }
  }
}

TEST_SUITE("pure family") {
  TEST_CASE("construction and names") {
    const Scenario s = build_pure(3);
    CHECK(s.name() == "pure");
    CHECK(s.parameter() == "d=3");
    CHECK(s.constraints.size() == 1);
    CHECK(s.constraints[0].value == 3.0);
    CHECK_THROWS_AS(build_pure(1), std::invalid_argument);
  }

  TEST_CASE("spectrum of R_F") {
    for (std::size_t d : {2u, 3u, 4u}) {
      const EigenDecomposition e = eigh(build_pure(d).r_f);
      const double small = 1.0 / static_cast<double>(d * (d + 1));
      for (std::size_t k = 0; k + 1 < e.values.size(); ++k) CHECK(e.values[k] == doctest::Approx(small).epsilon(1e-12));
      CHECK(e.values.back() == doctest::Approx(1.0 / static_cast<double>(d)).epsilon(1e-12));
    }
  }

  TEST_CASE("R_F matches its Monte Carlo average") {
    CHECK(monte_carlo_rf_deviation(build_pure(2), 200000, 31) <= 0.01);
  }

  TEST_CASE("seed fidelities") {
    for (std::size_t d : {2u, 3u, 5u}) {
      const Scenario s = build_pure(d);
      const HermitianOperator id = identity_seed(s), mp = measure_prepare_seed(s);
      CHECK(frobenius_inner(s.r_f, id) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, id) == doctest::Approx(1.0 / d).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_f, mp) == doctest::Approx(2.0 / (d + 1)).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, mp) == doctest::Approx(2.0 / (d + 1)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("maximally entangled family") {
  TEST_CASE("construction") {
    const Scenario s = build_maxent(2);
    CHECK(s.in_dim == 4);
    CHECK(s.shape == TensorShape({2, 2, 2, 2}, 2));
    CHECK(s.constraints.size() == 4);
    CHECK_THROWS_AS(build_maxent(1), std::invalid_argument);
  }

  TEST_CASE("identity channel reduces to d I on the second input factor") {
    for (std::size_t d : {2u, 3u}) {
      const Scenario s = build_maxent(d);
      const HermitianOperator id = identity_seed(s);
      const HermitianOperator in_part = partial_trace(id, {2, 3});
      CHECK(max_abs_diff(in_part.matrix(), ComplexMatrix::identity(d * d)) <= 1e-12);
      const HermitianOperator second = partial_trace(in_part, {0});
      CHECK(max_abs_diff(second.matrix(), ComplexMatrix::identity(d) * Complex(static_cast<double>(d))) <= 1e-12);
    }
  }

  TEST_CASE("R_F matches its Monte Carlo average") {
    CHECK(monte_carlo_rf_deviation(build_maxent(2), 200000, 32) <= 0.01);
  }

  TEST_CASE("seed fidelities") {
    for (std::size_t d : {2u, 3u}) {
      const Scenario s = build_maxent(d);
      const double dd = static_cast<double>(d);
      CHECK(frobenius_inner(s.r_f, identity_seed(s)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, identity_seed(s)) == doctest::Approx(1.0 / (dd * dd)).epsilon(1e-12));
      // Measure-and-reprepare: G = d^2 E|Tr U / d|^4 = 2/d^2, and F = G.
      CHECK(frobenius_inner(s.r_f, measure_prepare_seed(s)) == doctest::Approx(2.0 / (dd * dd)).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, measure_prepare_seed(s)) == doctest::Approx(2.0 / (dd * dd)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("spin coherent family") {
  TEST_CASE("construction") {
    const Scenario s = build_spin(Spin::parse("3/2"));
    CHECK(s.in_dim == 4);
    CHECK(s.parameter() == "j=3/2");
    CHECK(s.constraints.size() == 1);
    CHECK(s.constraints[0].value == 4.0);
    CHECK_THROWS_AS(build_spin(Spin::from_twice(0)), std::invalid_argument);
  }

  TEST_CASE("R_F matches its Monte Carlo average") {
    CHECK(monte_carlo_rf_deviation(build_spin(Spin::parse("1")), 200000, 33) <= 0.01);
  }

  TEST_CASE("seed fidelities") {
    for (int twice = 1; twice <= 4; ++twice) {
      const Spin j = Spin::from_twice(twice);
      const Scenario s = build_spin(j);
      const double expected_mp = (twice + 1.0) / (2.0 * twice + 1.0);
      CHECK(frobenius_inner(s.r_f, identity_seed(s)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, identity_seed(s)) == doctest::Approx(1.0 / (twice + 1.0)).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_f, measure_prepare_seed(s)) == doctest::Approx(expected_mp).epsilon(1e-12));
      CHECK(frobenius_inner(s.r_g, measure_prepare_seed(s)) == doctest::Approx(expected_mp).epsilon(1e-12));
    }
  }
}

TEST_SUITE("covariant seeds") {
  TEST_CASE("trivial instrument gives the identity seed") {
    const Scenario s = build_pure(3);
    const HermitianOperator seed = covariant_seed({{ComplexMatrix::identity(3)}}, {ComplexMatrix::identity(3)}, s.shape);
    CHECK(max_abs_diff(seed.matrix(), identity_seed(s).matrix()) == 0.0);
  }

  TEST_CASE("Kraus phases drop out") {
    Rng rng(41);
    const auto kraus = random_instrument(2, 2, 1, rng);
    const std::vector<ComplexMatrix> guesses{haar_unitary(2, rng), haar_unitary(2, rng)};
    auto rotated = kraus;
    rotated[0][0] *= std::polar(1.0, 0.7);
    rotated[1][0] *= std::polar(1.0, -2.1);
    CHECK(max_abs_diff(covariant_seed(kraus, guesses).matrix(), covariant_seed(rotated, guesses).matrix()) <= 1e-14);
  }

  TEST_CASE("input validation") {
    const ComplexMatrix half = ComplexMatrix::identity(2) * Complex(0.5);
    CHECK_THROWS_AS(covariant_seed({{half}}, {ComplexMatrix::identity(2)}), std::invalid_argument);
    CHECK_THROWS_AS(covariant_seed({{ComplexMatrix::identity(2)}}, {}), std::invalid_argument);
    CHECK_THROWS_AS(covariant_seed({{ComplexMatrix::identity(2)}}, {ComplexMatrix::identity(3)}), std::invalid_argument);
    CHECK_THROWS_AS(covariant_seed({}, {}), std::invalid_argument);
  }
}
