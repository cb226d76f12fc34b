#include <cmath>

#include "doctest.h"
#include "qtradeoff/matrix.hpp"
#include "support/oracles.hpp"

using namespace qtradeoff;

TEST_SUITE("matrix") {
  TEST_CASE("ComplexMatrix rejects bad entries") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<Complex>(3)), std::invalid_argument);
    std::vector<Complex> bad(4, Complex(1.0));
    bad[2] = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(ComplexMatrix(2, 2, bad), std::invalid_argument);
  }

  TEST_CASE("kron of identities and scalars") {
    CHECK(max_abs_diff(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4)) == 0.0);
    Rng rng(3);
    const ComplexMatrix b = oracle::random_matrix(3, 2, rng);
    const ComplexMatrix two = ComplexMatrix::from_rows({{2.0}});
    CHECK(max_abs_diff(kron(two, b), b * Complex(2.0)) == 0.0);
  }

  TEST_CASE("kron matches the four-index formula") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix a = oracle::random_matrix(2, 2, rng), b = oracle::random_matrix(2, 3, rng);
      CHECK(oracle::max_diff(kron(a, b), oracle::kron4(a, b)) == 0.0);
    }
  }

  TEST_CASE("kron is associative") {
    Rng rng(12);
    const ComplexMatrix a = oracle::random_matrix(2, 2, rng), b = oracle::random_matrix(3, 3, rng),
                        c = oracle::random_matrix(2, 2, rng);
    CHECK(max_abs_diff(kron(kron(a, b), c), kron(a, kron(b, c))) <= 1e-14);
  }

  TEST_CASE("HermitianOperator checks and symmetrizes") {
    ComplexMatrix m = ComplexMatrix::from_rows({{1.0, Complex(0.0, 1.0)}, {Complex(0.0, -1.0), 2.0}});
    CHECK_NOTHROW(HermitianOperator{m});
    m(0, 1) += Complex(1e-6, 0.0);
    CHECK_THROWS_AS(HermitianOperator{m}, std::invalid_argument);
    ComplexMatrix tiny = ComplexMatrix::from_rows({{1.0, 1e-14}, {0.0, 1.0}});
    const HermitianOperator h(tiny);
    CHECK(h(0, 1) == h(1, 0));
    CHECK_THROWS_AS(HermitianOperator(ComplexMatrix::identity(4), TensorShape({2, 3}, 1)), std::invalid_argument);
  }

  TEST_CASE("partial trace of a product operator") {
    Rng rng(5);
    const ComplexMatrix a = oracle::random_hermitian_matrix(2, rng), b = oracle::random_hermitian_matrix(3, rng);
    const HermitianOperator ab(kron(a, b), TensorShape({2, 3}, 1));
    const HermitianOperator reduced = partial_trace(ab, {1});
    CHECK(max_abs_diff(reduced.matrix(), a * b.trace()) <= 1e-12);
    CHECK(reduced.shape() == TensorShape({2}, 1));
    const HermitianOperator scalar = partial_trace(ab, {0, 1});
    CHECK(scalar.dim() == 1);
    CHECK(std::abs(scalar(0, 0) - ab.matrix().trace()) <= 1e-12);
  }

  TEST_CASE("partial trace matches explicit double sums") {
    Rng rng(6);
    const HermitianOperator x = oracle::random_hermitian(TensorShape({2, 2}, 1), rng);
    CHECK(max_abs_diff(partial_trace(x, {1}).matrix(), oracle::trace_second(x.matrix(), 2, 2)) <= 1e-14);
    CHECK(max_abs_diff(partial_trace(x, {0}).matrix(), oracle::trace_first(x.matrix(), 2, 2)) <= 1e-14);
    const HermitianOperator y = oracle::random_hermitian(TensorShape({3, 2}, 1), rng);
    CHECK(max_abs_diff(partial_trace(y, {0}).matrix(), oracle::trace_first(y.matrix(), 3, 2)) <= 1e-14);
    CHECK(std::abs(partial_trace(y, {0}).trace() - y.trace()) <= 1e-12);
  }

  TEST_CASE("partial traces over disjoint factors commute") {
    Rng rng(7);
    const HermitianOperator x = oracle::random_hermitian(TensorShape({2, 3, 2}, 1), rng);
    const HermitianOperator stepwise = partial_trace(partial_trace(x, {0}), {0});
    const HermitianOperator reversed = partial_trace(partial_trace(x, {1}), {0});
    const HermitianOperator at_once = partial_trace(x, {0, 1});
    CHECK(max_abs_diff(stepwise.matrix(), at_once.matrix()) <= 1e-12);
    CHECK(max_abs_diff(reversed.matrix(), at_once.matrix()) <= 1e-12);
  }

  TEST_CASE("factor index out of range") {
    const HermitianOperator x = HermitianOperator::identity(TensorShape({2, 2}, 1));
    CHECK_THROWS_AS(partial_trace(x, {2}), std::out_of_range);
    CHECK_THROWS_AS(partial_transpose(x, {5}), std::out_of_range);
  }

  TEST_CASE("partial transpose of a product and involution") {
    Rng rng(8);
    const ComplexMatrix a = oracle::random_hermitian_matrix(2, rng), b = oracle::random_hermitian_matrix(2, rng);
    const HermitianOperator ab(kron(a, b), TensorShape({2, 2}, 1));
    CHECK(max_abs_diff(partial_transpose(ab, {0}).matrix(), kron(a.transpose(), b)) == 0.0);
    const HermitianOperator x = oracle::random_hermitian(TensorShape({2, 3}, 1), rng);
    CHECK(max_abs_diff(partial_transpose(partial_transpose(x, {1}), {1}).matrix(), x.matrix()) == 0.0);
  }

  TEST_CASE("partial transpose of the maximally entangled projector is SWAP") {
    for (std::size_t d : {2u, 3u}) {
      const TensorShape shape({d, d}, 1);
      const HermitianOperator phi = HermitianOperator::projector(vec(ComplexMatrix::identity(d)), shape);
      CHECK(max_abs_diff(partial_transpose(phi, {0}).matrix(), oracle::swap_operator(d)) == 0.0);
    }
  }

  TEST_CASE("partial transpose preserves trace and Frobenius norm") {
    Rng rng(9);
    const HermitianOperator x = oracle::random_hermitian(TensorShape({3, 2}, 1), rng);
    const HermitianOperator t = partial_transpose(x, {0});
    CHECK(std::abs(t.trace() - x.trace()) <= 1e-12);
    CHECK(std::abs(frobenius_inner(t, t) - frobenius_inner(x, x)) <= 1e-10);
  }

  TEST_CASE("eigh on simple inputs") {
    const double diag[] = {3.0, 1.0, 2.0};
    const EigenDecomposition e = eigh(HermitianOperator(ComplexMatrix::diagonal(diag)));
    CHECK(e.values == std::vector<double>{1.0, 2.0, 3.0});
    const EigenDecomposition id = eigh(HermitianOperator::identity(TensorShape::flat(4)));
    for (double v : id.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("eigh reconstructs random Hermitian matrices") {
    Rng rng(10);
    for (std::size_t n : {1u, 2u, 5u, 8u, 16u}) {
      const ComplexMatrix m = oracle::random_hermitian_matrix(n, rng);
      const EigenDecomposition e = eigh(m);
      const ComplexMatrix rebuilt = apply_spectral(e, [](double v) { return Complex(v); });
      CHECK(max_abs_diff(rebuilt, m) <= 1e-10 * (1.0 + m.max_abs()));
      CHECK(oracle::unitarity_defect(e.vectors) <= 1e-10);
      for (std::size_t k = 1; k < n; ++k) CHECK(e.values[k - 1] <= e.values[k]);
    }
  }

  TEST_CASE("eigh on PSD input has no negative eigenvalues") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
      const HermitianOperator rho = oracle::random_density(TensorShape::flat(6), rng, 2);
      CHECK(eigh(rho).values.front() >= -1e-10);
    }
  }

  TEST_CASE("vec of the identity and round trip") {
    const ComplexMatrix phi = vec(ComplexMatrix::identity(3));
    for (std::size_t i = 0; i < 9; ++i) CHECK(phi(i, 0) == Complex(i % 4 == 0 ? 1.0 : 0.0));
    Rng rng(14);
    const ComplexMatrix a = oracle::random_matrix(3, 2, rng);
    CHECK(max_abs_diff(unvec(vec(a), 3, 2), a) == 0.0);
    CHECK(vec(a)(1 * 3 + 2, 0) == a(2, 1));
  }

  TEST_CASE("Choi operator of vec(a) acts as a rho a^dagger") {
    Rng rng(15);
    for (int trial = 0; trial < 3; ++trial) {
      const ComplexMatrix a = oracle::random_matrix(3, 2, rng);
      const ComplexMatrix rho = oracle::random_density(TensorShape::flat(2), rng).matrix();
      const ComplexMatrix r = outer(vec(a), vec(a));
      const ComplexMatrix direct = oracle::matmul(oracle::matmul(a, rho), oracle::dagger(a));
      CHECK(oracle::max_diff(oracle::apply_choi(r, rho, 2, 3), direct) <= 1e-12);
    }
  }

  TEST_CASE("hermitian basis") {
    const auto one = hermitian_basis(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0](0, 0) == Complex(1.0));
    for (std::size_t d : {2u, 3u, 4u}) {
      const auto basis = hermitian_basis(d);
      REQUIRE(basis.size() == d * d);
      CHECK(max_abs_diff(basis[0].matrix(), ComplexMatrix::identity(d)) == 0.0);
      for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = i + 1; j < basis.size(); ++j) CHECK(std::abs(frobenius_inner(basis[i], basis[j])) <= 1e-14);
    }
  }

  TEST_CASE("hermitian basis is complete") {
    Rng rng(16);
    const auto basis = hermitian_basis(3);
    const ComplexMatrix m = oracle::random_hermitian_matrix(3, rng);
    ComplexMatrix rebuilt(3, 3);
    for (const auto& e : basis) rebuilt += e.matrix() * Complex(frobenius_inner(e.matrix(), m) / frobenius_inner(e, e));
    CHECK(max_abs_diff(rebuilt, m) <= 1e-12);
  }

  TEST_CASE("frobenius inner product") {
    const TensorShape shape = TensorShape::flat(3);
    CHECK(frobenius_inner(HermitianOperator::identity(shape), HermitianOperator::identity(shape)) == 3.0);
    Rng rng(17);
    const HermitianOperator a = oracle::random_hermitian(shape, rng), b = oracle::random_hermitian(shape, rng);
    CHECK(frobenius_inner(a, HermitianOperator::zero(shape)) == 0.0);
    CHECK(frobenius_inner(a, b) == doctest::Approx(oracle::trace_product(a.matrix(), b.matrix()).real()).epsilon(1e-13));
    CHECK_THROWS(frobenius_inner(a, HermitianOperator::identity(TensorShape::flat(2))));
  }

  TEST_CASE("embed places a local operator on chosen factors") {
    Rng rng(18);
    const TensorShape shape({2, 3, 2}, 1);
    const ComplexMatrix a = oracle::random_matrix(2, 2, rng);
    CHECK(max_abs_diff(embed(a, {2}, shape), kron(ComplexMatrix::identity(6), a)) == 0.0);
    const ComplexMatrix swap = oracle::swap_operator(2);
    const ComplexMatrix s02 = embed(swap, {0, 2}, shape);
    // Swapping the outer qubits twice is the identity, and it fixes |0 k 0>.
    CHECK(max_abs_diff(s02 * s02, ComplexMatrix::identity(12)) == 0.0);
    CHECK(s02(0 * 6 + 1 * 2 + 1, 1 * 6 + 1 * 2 + 0) == Complex(1.0));
  }
}
