// Classification of linear maps W : L(H) -> L(K) that send positive
// rank-one operators to positive rank-one operators or zero.
//
// Such a map acts on rank-one inputs in exactly one of three ways:
//
//   linear       W rho = C rho C*            (C : H -> K linear)
//   antilinear   W rho = C0 rho^T C0*        (phi -> C0 conj(phi))
//   degenerate   W rho = Tr(D rho) k k*      (D >= 0, k in K)
//
// classify() decides which, and extracts C, C0 or (D, k). The decision uses
// the process matrix X = sum_ab E_ab (x) W(E_ab), which is rank one exactly
// for conjugation maps. pauli_constraints() replays the two-dimensional
// block analysis (Pauli parametrization of the L_ij) as an independent check.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nosig/linalg.hpp"

namespace nosig {

class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, double worst_error)
        : std::runtime_error(what), worst_error_(worst_error) {}
    double worst_error() const { return worst_error_; }

private:
    double worst_error_;
};

/// W A = sum_ij Tr(A L_ij) (k_i,.) k_j, i.e. (W A)_{j i} = Tr(A L_ij).
class OperatorMap {
public:
    OperatorMap(int dim_h, int dim_k, std::vector<ComplexMatrix> blocks);

    /// Blocks read off from the action of f on the matrix units of L(H).
    template <class F>
    static OperatorMap from_action(int dim_h, int dim_k, F&& f);

    static OperatorMap conjugation(const ComplexMatrix& c);
    static OperatorMap antilinear(const ComplexMatrix& c0);
    static OperatorMap degenerate(const ComplexMatrix& d, const ComplexVector& k);
    static OperatorMap identity(int dim);
    static OperatorMap transpose(int dim);
    static OperatorMap zero(int dim_h, int dim_k);

    int dim_h() const { return dim_h_; }
    int dim_k() const { return dim_k_; }
    const ComplexMatrix& block(int i, int j) const { return blocks_[i * dim_k_ + j]; }
    const std::vector<ComplexMatrix>& blocks() const { return blocks_; }

    ComplexMatrix apply(const ComplexMatrix& a) const;

    /// The map A -> W(A^T).
    OperatorMap compose_transpose() const;

private:
    int dim_h_;
    int dim_k_;
    std::vector<ComplexMatrix> blocks_;
};

template <class F>
OperatorMap OperatorMap::from_action(int dim_h, int dim_k, F&& f) {
    std::vector<ComplexMatrix> blocks(dim_k * dim_k, ComplexMatrix::Zero(dim_h, dim_h));
    for (int a = 0; a < dim_h; ++a) {
        for (int b = 0; b < dim_h; ++b) {
            // Tr(E_ab L_ij) = (L_ij)_{ba} = (W E_ab)_{ji}.
            const ComplexMatrix out = f(matrix_unit(dim_h, a, b));
            for (int i = 0; i < dim_k; ++i)
                for (int j = 0; j < dim_k; ++j) blocks[i * dim_k + j](b, a) = out(j, i);
        }
    }
    return OperatorMap(dim_h, dim_k, std::move(blocks));
}

/// L_ij -> (L_ij + L_ji*)/2. On rank-one inputs the result is the
/// Hermitian part of the original output, so any map that already returns
/// Hermitian operators there keeps its action.
OperatorMap symmetrize(const OperatorMap& w);

struct RankOneCheck {
    bool ok = true;
    std::optional<PureState> witness;
    double worst_violation = 0.0;
};

inline constexpr double kRankOneTol = 1e-8;

/// On seeded pure phi: W rho_phi Hermitian within tol, eigenvalues >= -tol,
/// second eigenvalue <= tol * ||W rho_phi||. Witness is the first failure.
RankOneCheck check_rank_one_preserving(const OperatorMap& w, int samples, std::uint64_t seed,
                                       double tol = kRankOneTol);

struct DegenerateType {
    ComplexMatrix d;
    ComplexVector k;  // unit vector
};

struct LinearType {
    ComplexMatrix c;
    /// Present when C has rank one and the map is also degenerate.
    std::optional<DegenerateType> degenerate_form;
};

struct AntilinearType {
    ComplexMatrix c0;
};

struct NotRankOnePreserving {
    PureState witness;
};

using Classification = std::variant<LinearType, AntilinearType, DegenerateType, NotRankOnePreserving>;

std::string type_name(const Classification& c);

/// Output of the representing data on rho (rank-one inputs).
ComplexMatrix reconstruct(const Classification& c, const ComplexMatrix& rho);

struct ClassifyOptions {
    double tol = kRankOneTol;         // Hermitian/positivity/ray tests
    double rank_ratio = 1e-8;         // lambda_2 / lambda_1 counts as rank one
    double verify_tol = 1e-8;         // reconstruction must match W
    int samples = 64;
    std::uint64_t seed = 0xc1a55;
};

/// Throws ClassificationError when the extracted data fails to reproduce W.
Classification classify(const OperatorMap& w, const ClassifyOptions& opt = {});

/// Worst max-norm gap between W rho_phi and reconstruct(c, rho_phi) over
/// seeded pure phi. Operators are compared, never C itself.
double verify_classification(const OperatorMap& w, const Classification& c, int samples, std::uint64_t seed);

/// Superposition probe: for phi = a u + b v, compares W rho_phi with the
/// rank-one operator of a Cu + b Cv (linear) or conj(a) C0 conj(u) + ...
/// (antilinear). Checks the extracted C really is (anti)linear.
double superposition_probe_error(const OperatorMap& w, const Classification& c, int samples, std::uint64_t seed);

/// Process matrix sum_ab E_ab (x) W(E_ab), size (h*k) x (h*k).
ComplexMatrix process_matrix(const OperatorMap& w);

/// L_11 = alpha I + beta.sigma, L_22 = gamma I + delta.sigma,
/// L_12 = A I + B.sigma (and L_21 = L_12*).
struct PauliDecomposition {
    double alpha = 0.0;
    double gamma = 0.0;
    std::array<double, 3> beta{};
    std::array<double, 3> delta{};
    Complex a{};
    std::array<Complex, 3> b{};
};

PauliDecomposition pauli_decompose(const OperatorMap& w);

struct PauliResiduals {
    PauliDecomposition params;       // after normalization and rotation
    double eq1 = 0.0;                // alpha gamma + beta delta/3 - |A|^2 - |B|^2/3
    double eq2 = 0.0;                // alpha delta + gamma beta - 2 Re(A* B3)
    std::array<double, 2> eq3{};     // Re(A* B_i), i = 1, 2
    double eq4 = 0.0;                // 2 beta delta - 2|B3|^2 + |B1|^2 + |B2|^2
    std::array<double, 2> eq5{};     // Re(B_i* B3), i = 1, 2
    std::array<double, 2> eq6{};     // -beta delta - (2|B_i|^2 - |B_j|^2 - |B3|^2)
    double eq7 = 0.0;                // Re(B1* B2)
    double off_axis = 0.0;           // |beta_1|, |beta_2|, |delta_1|, |delta_2| after rotation

    double max_abs() const;
    std::vector<double> as_vector() const;
};

/// Dim-2 block analysis: symmetrize, rescale by M = L^{-1/2} on the support
/// of L = L_11 + L_22 so that L becomes a projector, rotate H so that L_11
/// and L_22 are diagonal, then evaluate the seven relations.
/// Throws DimensionError unless dim_h == dim_k == 2.
PauliResiduals pauli_constraints(const OperatorMap& w);

/// Canonical dim-2 forms of the block analysis.
OperatorMap case_one_form(bool plus);
OperatorMap subcase_iia_form();
OperatorMap subcase_iib_form();

}  // namespace nosig
