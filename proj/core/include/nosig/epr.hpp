// EPR apparatus: collapse statistics on the far arm, the signaling audit,
// quadratic-form reconstruction of detectors, and density-matrix tomography
// of state transformers.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nosig/linalg.hpp"
#include "nosig/random.hpp"

namespace nosig {

class DetectorContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximally correlated state (1/sqrt N) sum_i f_i (x) e_i.
///
/// The e-basis lives on the measured arm (A); the f-basis on the detector
/// arm (B). The vector is laid out as partner (x) measured, left factor slow.
class EprState {
public:
    EprState(Basis partner, Basis measured);
    static EprState standard(int dim);

    int dim() const { return partner_.dim(); }
    const Basis& partner_basis() const { return partner_; }
    const Basis& measured_basis() const { return measured_; }
    ComplexVector psi() const;

private:
    Basis partner_;
    Basis measured_;
};

struct Ensemble {
    std::vector<PureState> members;
    std::vector<double> weights;
};

/// Arm-A measurement in basis h collapses arm B to g_j = sum_i u_ij f_i with
/// weight 1/N, where e_i = sum_j u_ij h_j.
Ensemble collapse_arm_b(const EprState& state, const Basis& h);
/// Same, for caller-supplied columns; rejects non-orthonormal input.
Ensemble collapse_arm_b(const EprState& state, const ComplexMatrix& h_columns);

enum class DetectorForm { Quadratic, Cloner, Power, Composite, Custom };

std::string to_string(DetectorForm f);

/// Deterministic rate function on pure states with a declared ground truth.
class Detector {
public:
    using RateFn = std::function<double(const PureState&)>;

    Detector(int dim, RateFn rate, DetectorForm form);

    /// D(phi) = (phi, R phi); R is Hermitian with spectrum in [0,1].
    static Detector quadratic(ComplexMatrix r);
    /// D(phi) = |<c (x) c, phi (x) phi>|^2 for a unit vector c.
    static Detector cloner(const PureState& c);
    /// D(phi) = (phi, R phi)^exponent; a generic nonlinear rate.
    static Detector power(ComplexMatrix r, double exponent);

    int dim() const { return dim_; }
    DetectorForm form() const { return form_; }
    double rate(const PureState& phi) const { return rate_(phi); }

    /// Ground-truth data when the form carries one.
    const std::optional<ComplexMatrix>& operator_data() const { return op_; }
    const std::optional<PureState>& clone_target() const { return target_; }
    double exponent() const { return exponent_; }

private:
    int dim_;
    RateFn rate_;
    DetectorForm form_;
    std::optional<ComplexMatrix> op_;
    std::optional<PureState> target_;
    double exponent_ = 1.0;
};

/// Seeded Bernoulli click sampler around an exact detector.
class SampledDetector {
public:
    SampledDetector(Detector d, std::uint64_t seed) : d_(std::move(d)), rng_(seed) {}
    /// Number of clicks in `trials` independent presentations of phi.
    std::uint64_t clicks(const PureState& phi, std::uint64_t trials);

private:
    Detector d_;
    Rng rng_;
};

/// Mean of d over ensemble members, weighted. Throws DetectorContractError
/// if any individual rate falls outside [0,1].
double arm_b_rate(const Detector& d, const Ensemble& ensemble);

enum class Verdict { NoSignal, Signal };
std::string to_string(Verdict v);

struct SignalingReport {
    std::vector<double> rates;  // index 0: computational basis, then Haar bases
    double max_minus_min = 0.0;
    double variance = 0.0;
    double theta_sig = 0.0;
    Verdict verdict = Verdict::NoSignal;
};

inline constexpr double kDefaultThetaSig = 1e-6;

/// Arm-B rate for the computational basis plus num_bases seeded Haar bases
/// on arm A. Signal iff max - min > theta_sig.
SignalingReport signaling_audit(const Detector& d, int dim, int num_bases, std::uint64_t seed,
                                double theta_sig = kDefaultThetaSig);

/// The arm-A basis used for audit index k (k = 0 is computational).
Basis audit_basis(int dim, std::uint64_t seed, int k);

struct QuadraticFit {
    ComplexMatrix r;
    double residual = 0.0;
};

/// Tomography frame {e_p, (e_p+e_q)/sqrt2, (e_p+i e_q)/sqrt2 : p<q}.
std::vector<PureState> tomography_frame(int dim);

/// Solves for the Hermitian R with (phi, R phi) = values on the frame.
/// `values` is ordered as tomography_frame(dim).
ComplexMatrix fit_quadratic_form(int dim, const std::vector<double>& values);

inline constexpr int kResidualSamples = 64;

/// Fits D(phi) = (phi, R phi) from the tomography frame; residual is the
/// worst |D(phi) - (phi,R phi)| on a fresh seeded sample.
QuadraticFit gleason_fit(const Detector& d, int dim, std::uint64_t seed = 0x5eed,
                         int samples = kResidualSamples);

enum class TransformerForm { LinearConjugation, Antilinear, Degenerate, Cloner, Custom };

std::string to_string(TransformerForm f);

/// Map on density matrices of H (dim_in) into operators on K (dim_out).
/// Outputs may be unnormalized.
class Transformer {
public:
    using ApplyFn = std::function<ComplexMatrix(const ComplexMatrix&)>;

    Transformer(int dim_in, int dim_out, ApplyFn apply, TransformerForm form);

    /// rho -> C rho C*.
    static Transformer linear_conjugation(ComplexMatrix c);
    /// rho -> C0 rho^T C0*, i.e. phi -> C0 conj(phi).
    static Transformer antilinear(ComplexMatrix c0);
    /// rho -> Tr(D rho) psi psi*, the density action of phi -> (phi,D phi)^1/2 psi.
    static Transformer degenerate(ComplexMatrix d, ComplexVector psi);
    /// rho -> rho (x) rho; clones pure states, is quadratic in rho.
    static Transformer cloner(int dim);

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    TransformerForm form() const { return form_; }
    ComplexMatrix apply(const ComplexMatrix& rho) const { return apply_(rho); }
    ComplexMatrix apply(const DensityMatrix& rho) const { return apply_(rho.matrix()); }

    const std::vector<ComplexMatrix>& data() const { return data_; }

private:
    int dim_in_;
    int dim_out_;
    ApplyFn apply_;
    TransformerForm form_;
    std::vector<ComplexMatrix> data_;
};

/// Detector that first applies t and then measures (., R .) on the output.
Detector compose(const Transformer& t, const ComplexMatrix& r);

/// Blocks L_pq with (k_p, T rho_phi k_q) = (phi, L_pq phi).
class TransformerTomography {
public:
    TransformerTomography(int dim_in, int dim_out, std::vector<ComplexMatrix> blocks, double residual);

    int dim_in() const { return dim_in_; }
    int dim_out() const { return dim_out_; }
    const ComplexMatrix& block(int p, int q) const { return blocks_[p * dim_out_ + q]; }
    double residual() const { return residual_; }

    /// sum_pq Tr(L_pq rho) (k_q,.) k_p.
    ComplexMatrix apply(const ComplexMatrix& rho) const;

    /// max |L_pq* - L_qp|.
    double hermiticity_defect() const;

private:
    int dim_in_;
    int dim_out_;
    std::vector<ComplexMatrix> blocks_;
    double residual_;
};

TransformerTomography reconstruct_transformer(const Transformer& t, std::uint64_t seed = 0x5eed,
                                              int samples = kResidualSamples);

struct LinearityResult {
    bool consistent = false;
    double worst_error = 0.0;
    double worst_error_pure = 0.0;
    double worst_error_mixture = 0.0;
};

inline constexpr double kLinearityTol = 1e-8;

/// Compares t with the tomography's linear formula on fresh pure states and
/// on mixtures l rho1 + (1-l) rho2, l in {0.25, 0.5, 0.75}.
LinearityResult linearity_test(const Transformer& t, const TransformerTomography& tomo, int samples,
                               std::uint64_t seed);

}  // namespace nosig
