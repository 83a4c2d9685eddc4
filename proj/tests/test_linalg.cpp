#include <doctest.h>

#include <cmath>

#include "nosig/linalg.hpp"
#include "nosig/random.hpp"

using namespace nosig;

TEST_SUITE("linalg") {

TEST_CASE("pure states must be normalized") {
    ComplexVector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(PureState{v}, NormalizationError);
    const PureState s = PureState::normalized(v);
    CHECK(std::abs(s.amplitudes().norm() - 1.0) < 1e-15);
    CHECK_THROWS_AS(PureState::normalized(ComplexVector::Zero(3)), NormalizationError);
}

TEST_CASE("inner product is antilinear on the left") {
    ComplexVector a(2), b(2);
    a << Complex(0, 1), 0;
    b << 1, 0;
    const PureState pa(a), pb(b);
    CHECK(std::abs(pa.inner(pb) - Complex(0, -1)) < 1e-15);
    CHECK(std::abs(pa.conjugate()[0] - Complex(0, -1)) < 1e-15);
}

TEST_CASE("density matrices are validated") {
    ComplexMatrix m(2, 2);
    m << 0.5, Complex(0, 0.1), Complex(0, 0.1), 0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), NotHermitianError);
    ComplexMatrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(neg), LinalgError);
    ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
    CHECK(DensityMatrix::from_matrix(half).normalized());
    CHECK_THROWS_AS(DensityMatrix::from_matrix(2.0 * half), LinalgError);

    ComplexVector v(2);
    v << 2.0, 0.0;
    const DensityMatrix r = DensityMatrix::rank_one_unnormalized(v);
    CHECK_FALSE(r.normalized());
    CHECK(std::abs(r.trace() - 4.0) < 1e-14);
}

TEST_CASE("mixtures are convex combinations") {
    const DensityMatrix a = rank_one(PureState::basis_vector(2, 0));
    const DensityMatrix b = rank_one(PureState::basis_vector(2, 1));
    const DensityMatrix m = DensityMatrix::mixture(a, b, 0.25);
    CHECK(std::abs(m.matrix()(0, 0) - 0.25) < 1e-15);
    CHECK(std::abs(m.matrix()(1, 1) - 0.75) < 1e-15);
}

TEST_CASE("tensor product puts the left factor on the slow index") {
    ComplexVector a(2), b(3);
    a << 1, 2;
    b << 3, 4, 5;
    const ComplexVector t = tensor(a, b);
    REQUIRE(t.size() == 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) CHECK(t(i * 3 + j) == a(i) * b(j));
}

TEST_CASE("eigh reconstructs random Hermitian matrices") {
    Rng rng(3);
    for (int dim = 1; dim <= 6; ++dim) {
        const ComplexMatrix h = random_hermitian(dim, rng);
        const EighResult e = eigh(h);
        const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
        CHECK(max_abs(back - h) < 1e-12);
        for (int i = 1; i < dim; ++i) CHECK(e.values(i - 1) <= e.values(i));
        CHECK(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(dim, dim)) < 1e-12);
    }
    ComplexMatrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(eigh(bad), NotHermitianError);
}

TEST_CASE("random unitaries are unitary and reproducible") {
    for (int dim = 2; dim <= 6; ++dim) {
        const ComplexMatrix u = random_unitary(dim, 42);
        CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(dim, dim)) < 1e-12);
        CHECK(max_abs(u - random_unitary(dim, 42)) == 0.0);
        CHECK(max_abs(u - random_unitary(dim, 43)) > 1e-3);
    }
}

TEST_CASE("Haar states have a uniform first-coordinate weight") {
    // For Haar vectors in C^d, |v_0|^2 is Beta(1, d-1) with mean 1/d.
    Rng rng(11);
    const int dim = 4, n = 20000;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += std::norm(random_state(dim, rng)[0]);
    mean /= n;
    const double sd = std::sqrt((dim - 1.0) / (dim * dim * (dim + 1.0)) / n);
    CHECK(std::abs(mean - 1.0 / dim) < 4 * sd);
}

TEST_CASE("bases check orthonormality") {
    ComplexMatrix m(2, 2);
    m << 1, 1, 0, 1;
    CHECK_THROWS_AS(Basis{m}, LinalgError);
    const Basis f = Basis::fourier(5);
    CHECK(max_abs(f.unitary().adjoint() * f.unitary() - ComplexMatrix::Identity(5, 5)) < 1e-12);
    CHECK(std::abs(std::norm(f.vector(2)[3]) - 0.2) < 1e-12);
}

TEST_CASE("pinv_sqrt inverts on the support") {
    Rng rng(5);
    const ComplexMatrix p = random_psd(4, 2, rng);
    const ComplexMatrix s = pinv_sqrt(p);
    const ComplexMatrix proj = s * p * s;
    CHECK(max_abs(proj * proj - proj) < 1e-10);
    CHECK(std::abs(proj.trace().real() - 2.0) < 1e-10);
    CHECK(numerical_rank(p) == 2);
}

TEST_CASE("Pauli matrices") {
    const Complex i(0, 1);
    CHECK(max_abs(pauli(1) * pauli(2) - i * pauli(3)) < 1e-15);
    for (int k = 1; k <= 3; ++k) CHECK(max_abs(pauli(k) * pauli(k) - pauli(0)) < 1e-15);
    CHECK(matrix_unit(3, 1, 2)(1, 2) == Complex(1, 0));
    CHECK(matrix_unit(3, 1, 2).cwiseAbs().sum() == 1.0);
}

TEST_CASE("seed derivation is stable") {
    CHECK(mix_seed(0) == 0xe220a8397b1dcdafULL);
    CHECK(child_seed(1, 0) != child_seed(1, 1));
    Rng a(9), b(9);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
}

}
