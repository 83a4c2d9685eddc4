// Dense complex linear algebra for small Hilbert spaces.
//
// Everything in nosig is built on these few value types. Matrices are plain
// Eigen::MatrixXcd; the wrappers below only exist where a type carries an
// invariant (unit norm, orthonormality, positivity) that the rest of the
// library relies on.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nosig {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NormalizationError : public LinalgError {
public:
    using LinalgError::LinalgError;
};

class NotHermitianError : public LinalgError {
public:
    using LinalgError::LinalgError;
};

class DimensionError : public LinalgError {
public:
    using LinalgError::LinalgError;
};

/// Unit vector in C^dim. Construction fails unless ||v|| = 1 within 1e-12.
class PureState {
public:
    explicit PureState(ComplexVector amplitudes, double tol = kNormTol);

    /// Rescales v to unit norm. Throws NormalizationError on a zero vector.
    static PureState normalized(const ComplexVector& v);
    static PureState basis_vector(int dim, int index);

    int dim() const { return static_cast<int>(amps_.size()); }
    const ComplexVector& amplitudes() const { return amps_; }
    Complex operator[](int i) const { return amps_(i); }

    /// <this, other>, antilinear in the left argument.
    Complex inner(const PureState& other) const { return amps_.dot(other.amps_); }

    /// Complex conjugate in the computational basis.
    PureState conjugate() const;

private:
    ComplexVector amps_;
};

/// Hermitian positive operator. Normalized ones have trace 1; unnormalized
/// rank-one projectors (e,.)e are allowed but carry normalized() == false.
class DensityMatrix {
public:
    /// Validates Hermitian (1e-12), eigenvalues >= -1e-10 and, when
    /// normalized is requested, trace 1 within 1e-10.
    static DensityMatrix from_matrix(ComplexMatrix m, bool normalized = true);
    static DensityMatrix rank_one_unnormalized(const ComplexVector& v);
    /// Convex combination w*a + (1-w)*b.
    static DensityMatrix mixture(const DensityMatrix& a, const DensityMatrix& b, double w);

    int dim() const { return static_cast<int>(m_.rows()); }
    const ComplexMatrix& matrix() const { return m_; }
    bool normalized() const { return normalized_; }
    double trace() const { return m_.trace().real(); }

private:
    DensityMatrix(ComplexMatrix m, bool normalized) : m_(std::move(m)), normalized_(normalized) {}
    ComplexMatrix m_;
    bool normalized_;
};

/// Orthonormal basis, stored as the columns of a unitary matrix.
class Basis {
public:
    /// Columns must be orthonormal: |<v_i,v_j> - delta_ij| <= tol.
    explicit Basis(ComplexMatrix columns, double tol = kDefaultTol);

    static Basis computational(int dim);
    static Basis fourier(int dim);
    static Basis from_vectors(const std::vector<PureState>& vectors, double tol = kDefaultTol);

    int dim() const { return static_cast<int>(u_.rows()); }
    PureState vector(int i) const;
    std::vector<PureState> vectors() const;
    const ComplexMatrix& unitary() const { return u_; }

private:
    ComplexMatrix u_;
};

struct EighResult {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns, orthonormal
};

/// (phi,.)phi for a unit vector.
DensityMatrix rank_one(const PureState& phi);
/// Same, for raw amplitudes; throws NormalizationError unless ||v|| = 1.
DensityMatrix rank_one(const ComplexVector& v);

/// Kronecker product, left factor is the slow index: (i_a * dim_b + i_b).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);
PureState tensor(const PureState& a, const PureState& b);

/// Hermitian eigendecomposition. Throws NotHermitianError when
/// max|H - H*| exceeds herm_tol * max(1, max|H|).
EighResult eigh(const ComplexMatrix& h, double herm_tol = 1e-12);

bool is_hermitian(const ComplexMatrix& m, double tol = kNormTol);
double max_abs(const ComplexMatrix& m);
ComplexMatrix dagger(const ComplexMatrix& m);

/// Haar unitary: QR of a seeded complex Gaussian matrix, with the phases
/// of R's diagonal folded back into Q. Deterministic per (dim, seed).
ComplexMatrix random_unitary(int dim, std::uint64_t seed);

/// Hermitian square root of the pseudo-inverse of a PSD matrix, restricted
/// to eigenvalues above rel_cut * lambda_max.
ComplexMatrix pinv_sqrt(const ComplexMatrix& psd, double rel_cut = 1e-12);

/// Numerical rank from singular values above rel_tol * s_max.
int numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-9);

/// Pauli matrices sigma_1..3 (index 1..3) and the identity (index 0).
ComplexMatrix pauli(int index);

/// Matrix unit E_ab of size dim x dim.
ComplexMatrix matrix_unit(int dim, int a, int b);

}  // namespace nosig
