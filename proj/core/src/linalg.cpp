#include "nosig/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nosig/random.hpp"

namespace nosig {

namespace {

std::string describe_norm(double n) {
    std::ostringstream os;
    os.precision(17);
    os << "state is not normalized (norm " << n << ")";
    return os.str();
}

}  // namespace

PureState::PureState(ComplexVector amplitudes, double tol) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw DimensionError("pure state must have dim >= 1");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > tol) throw NormalizationError(describe_norm(n));
}

PureState PureState::normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw NormalizationError("cannot normalize a zero or non-finite vector");
    return PureState(v / n, 1e-9);
}

PureState PureState::basis_vector(int dim, int index) {
    if (index < 0 || index >= dim) throw DimensionError("basis index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

PureState PureState::conjugate() const { return PureState(amps_.conjugate(), 1e-9); }

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, bool normalized) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DimensionError("density matrix must be square and non-empty");
    if (!is_hermitian(m, 1e-12 * std::max(1.0, max_abs(m)))) throw NotHermitianError("density matrix is not Hermitian");
    const auto eig = eigh(m);
    if (eig.values(0) < -1e-10) throw LinalgError("density matrix has a negative eigenvalue");
    if (normalized && std::abs(m.trace().real() - 1.0) > 1e-10) throw NormalizationError("density matrix trace differs from 1");
    return DensityMatrix(std::move(m), normalized);
}

DensityMatrix DensityMatrix::rank_one_unnormalized(const ComplexVector& v) {
    ComplexMatrix m = v * v.adjoint();
    const bool unit = std::abs(v.squaredNorm() - 1.0) <= 1e-12;
    return DensityMatrix(std::move(m), unit);
}

DensityMatrix DensityMatrix::mixture(const DensityMatrix& a, const DensityMatrix& b, double w) {
    if (a.dim() != b.dim()) throw DimensionError("mixture of density matrices with different dimensions");
    if (w < 0.0 || w > 1.0) throw LinalgError("mixture weight outside [0,1]");
    return DensityMatrix(w * a.m_ + (1.0 - w) * b.m_, a.normalized_ && b.normalized_);
}

Basis::Basis(ComplexMatrix columns, double tol) : u_(std::move(columns)) {
    if (u_.rows() != u_.cols() || u_.rows() == 0) throw DimensionError("basis must have dim vectors of length dim");
    const ComplexMatrix gram = u_.adjoint() * u_;
    const ComplexMatrix dev = gram - ComplexMatrix::Identity(u_.rows(), u_.cols());
    if (max_abs(dev) > tol) throw NormalizationError("basis vectors are not orthonormal");
}

Basis Basis::computational(int dim) { return Basis(ComplexMatrix::Identity(dim, dim)); }

Basis Basis::fourier(int dim) {
    ComplexMatrix f(dim, dim);
    const double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < dim; ++k) {
            const double angle = 2.0 * std::numbers::pi * j * k / dim;
            f(j, k) = s * Complex(std::cos(angle), std::sin(angle));
        }
    }
    return Basis(std::move(f));
}

Basis Basis::from_vectors(const std::vector<PureState>& vectors, double tol) {
    if (vectors.empty()) throw DimensionError("empty basis");
    const int d = vectors.front().dim();
    if (static_cast<int>(vectors.size()) != d) throw DimensionError("basis needs exactly dim vectors");
    ComplexMatrix u(d, d);
    for (int j = 0; j < d; ++j) {
        if (vectors[j].dim() != d) throw DimensionError("basis vectors differ in dimension");
        u.col(j) = vectors[j].amplitudes();
    }
    return Basis(std::move(u), tol);
}

PureState Basis::vector(int i) const { return PureState(u_.col(i), 1e-9); }

std::vector<PureState> Basis::vectors() const {
    std::vector<PureState> out;
    out.reserve(u_.cols());
    for (int i = 0; i < u_.cols(); ++i) out.push_back(vector(i));
    return out;
}

DensityMatrix rank_one(const PureState& phi) {
    return DensityMatrix::rank_one_unnormalized(phi.amplitudes());
}

DensityMatrix rank_one(const ComplexVector& v) {
    const double n = v.norm();
    if (std::abs(n - 1.0) > kNormTol) throw NormalizationError(describe_norm(n));
    return DensityMatrix::rank_one_unnormalized(v);
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

PureState tensor(const PureState& a, const PureState& b) {
    return PureState(tensor(a.amplitudes(), b.amplitudes()), 1e-9);
}

EighResult eigh(const ComplexMatrix& h, double herm_tol) {
    if (h.rows() != h.cols()) throw DimensionError("eigh needs a square matrix");
    if (!is_hermitian(h, herm_tol * std::max(1.0, max_abs(h)))) throw NotHermitianError("eigh input is not Hermitian");
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw LinalgError("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) <= tol;
}

double max_abs(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

ComplexMatrix random_unitary(int dim, std::uint64_t seed) {
    if (dim < 1) throw DimensionError("random_unitary needs dim >= 1");
    Rng rng(seed);
    ComplexMatrix g(dim, dim);
    // Column-major fill order is part of the determinism contract.
    for (int j = 0; j < dim; ++j) {
        for (int i = 0; i < dim; ++i) g(i, j) = rng.complex_normal() / std::sqrt(2.0);
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        q.col(j) *= (a > 0.0) ? d / a : Complex(1.0);
    }
    return q;
}

ComplexMatrix pinv_sqrt(const ComplexMatrix& psd, double rel_cut) {
    const auto eig = eigh(psd, 1e-9);
    const double top = std::max(0.0, eig.values.maxCoeff());
    ComplexMatrix out = ComplexMatrix::Zero(psd.rows(), psd.cols());
    if (top <= 0.0) return out;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double l = eig.values(i);
        if (l > rel_cut * top) out += (1.0 / std::sqrt(l)) * eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
    return out;
}

int numerical_rank(const ComplexMatrix& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * s(0)) ++r;
    }
    return r;
}

ComplexMatrix pauli(int index) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    switch (index) {
        case 0: p(0, 0) = 1.0; p(1, 1) = 1.0; break;
        case 1: p(0, 1) = 1.0; p(1, 0) = 1.0; break;
        case 2: p(0, 1) = Complex(0, -1); p(1, 0) = Complex(0, 1); break;
        case 3: p(0, 0) = 1.0; p(1, 1) = -1.0; break;
        default: throw DimensionError("Pauli index must be 0..3");
    }
    return p;
}

ComplexMatrix matrix_unit(int dim, int a, int b) {
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    e(a, b) = 1.0;
    return e;
}

}  // namespace nosig
