#include "nosig/epr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nosig {

EprState::EprState(Basis partner, Basis measured) : partner_(std::move(partner)), measured_(std::move(measured)) {
    if (partner_.dim() != measured_.dim()) throw DimensionError("EPR arms must have equal dimension");
    if (partner_.dim() < 2) throw DimensionError("EPR state needs N >= 2");
}

EprState EprState::standard(int dim) { return EprState(Basis::computational(dim), Basis::computational(dim)); }

ComplexVector EprState::psi() const {
    const int n = dim();
    ComplexVector out = ComplexVector::Zero(n * n);
    for (int i = 0; i < n; ++i) {
        out += tensor(ComplexVector(partner_.unitary().col(i)), ComplexVector(measured_.unitary().col(i)));
    }
    return out / std::sqrt(static_cast<double>(n));
}

Ensemble collapse_arm_b(const EprState& state, const Basis& h) {
    const int n = state.dim();
    if (h.dim() != n) throw DimensionError("measurement basis dimension mismatch");
    // u_ij = <h_j, e_i>, so that e_i = sum_j u_ij h_j.
    const ComplexMatrix u = state.measured_basis().unitary().transpose() * h.unitary().conjugate();
    // g_j = sum_i u_ij f_i, i.e. the columns of F u.
    const ComplexMatrix g = state.partner_basis().unitary() * u;
    Ensemble out;
    out.members.reserve(n);
    for (int j = 0; j < n; ++j) out.members.emplace_back(g.col(j), 1e-9);
    out.weights.assign(n, 1.0 / n);
    return out;
}

Ensemble collapse_arm_b(const EprState& state, const ComplexMatrix& h_columns) {
    return collapse_arm_b(state, Basis(h_columns));
}

std::string to_string(DetectorForm f) {
    switch (f) {
        case DetectorForm::Quadratic: return "quadratic";
        case DetectorForm::Cloner: return "cloner";
        case DetectorForm::Power: return "power";
        case DetectorForm::Composite: return "composite";
        case DetectorForm::Custom: return "custom";
    }
    return "unknown";
}

Detector::Detector(int dim, RateFn rate, DetectorForm form) : dim_(dim), rate_(std::move(rate)), form_(form) {
    if (dim_ < 1) throw DimensionError("detector dim must be >= 1");
}

Detector Detector::quadratic(ComplexMatrix r) {
    if (r.rows() != r.cols()) throw DimensionError("quadratic detector needs a square operator");
    if (!is_hermitian(r, 1e-12 * std::max(1.0, max_abs(r)))) throw NotHermitianError("quadratic detector operator is not Hermitian");
    const auto eig = eigh(r);
    if (eig.values(0) < -1e-10 || eig.values(eig.values.size() - 1) > 1.0 + 1e-10) {
        throw DetectorContractError("quadratic detector spectrum must lie in [0,1]");
    }
    const int dim = static_cast<int>(r.rows());
    ComplexMatrix copy = r;
    Detector d(dim, [r = std::move(copy)](const PureState& phi) {
        return phi.amplitudes().dot(r * phi.amplitudes()).real();
    }, DetectorForm::Quadratic);
    d.op_ = std::move(r);
    return d;
}

Detector Detector::cloner(const PureState& c) {
    const ComplexVector chi = tensor(c.amplitudes(), c.amplitudes());
    Detector d(c.dim(), [chi](const PureState& phi) {
        const ComplexVector pp = tensor(phi.amplitudes(), phi.amplitudes());
        return std::norm(chi.dot(pp));
    }, DetectorForm::Cloner);
    d.target_ = c;
    return d;
}

Detector Detector::power(ComplexMatrix r, double exponent) {
    Detector base = quadratic(r);
    Detector d(base.dim(), [base, exponent](const PureState& phi) {
        return std::pow(std::max(0.0, base.rate(phi)), exponent);
    }, DetectorForm::Power);
    d.op_ = std::move(r);
    d.exponent_ = exponent;
    return d;
}

std::uint64_t SampledDetector::clicks(const PureState& phi, std::uint64_t trials) {
    const double p = d_.rate(phi);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) hits += rng_.uniform() < p ? 1 : 0;
    return hits;
}

double arm_b_rate(const Detector& d, const Ensemble& ensemble) {
    if (ensemble.members.size() != ensemble.weights.size()) throw DimensionError("ensemble weights/members mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < ensemble.members.size(); ++j) {
        const auto& g = ensemble.members[j];
        if (g.dim() != d.dim()) throw DimensionError("detector dimension does not match ensemble");
        const double r = d.rate(g);
        if (!(r >= -1e-12 && r <= 1.0 + 1e-12)) {
            throw DetectorContractError("detector rate " + std::to_string(r) + " outside [0,1]");
        }
        total += ensemble.weights[j] * r;
    }
    return total;
}

std::string to_string(Verdict v) { return v == Verdict::Signal ? "Signal" : "NoSignal"; }

Basis audit_basis(int dim, std::uint64_t seed, int k) {
    if (k == 0) return Basis::computational(dim);
    return Basis(random_unitary(dim, child_seed(seed, static_cast<std::uint64_t>(k))));
}

SignalingReport signaling_audit(const Detector& d, int dim, int num_bases, std::uint64_t seed, double theta_sig) {
    if (num_bases < 2) throw std::invalid_argument("signaling_audit needs num_bases >= 2");
    if (d.dim() != dim) throw DimensionError("detector dimension does not match audit dimension");
    const EprState state = EprState::standard(dim);
    SignalingReport rep;
    rep.theta_sig = theta_sig;
    rep.rates.reserve(num_bases + 1);
    for (int k = 0; k <= num_bases; ++k) {
        rep.rates.push_back(arm_b_rate(d, collapse_arm_b(state, audit_basis(dim, seed, k))));
    }
    const auto [lo, hi] = std::minmax_element(rep.rates.begin(), rep.rates.end());
    rep.max_minus_min = *hi - *lo;
    const double mean = std::accumulate(rep.rates.begin(), rep.rates.end(), 0.0) / rep.rates.size();
    double ss = 0.0;
    for (double r : rep.rates) ss += (r - mean) * (r - mean);
    rep.variance = ss / rep.rates.size();
    rep.verdict = rep.max_minus_min > theta_sig ? Verdict::Signal : Verdict::NoSignal;
    return rep;
}

std::vector<PureState> tomography_frame(int dim) {
    std::vector<PureState> frame;
    frame.reserve(dim * dim);
    for (int p = 0; p < dim; ++p) frame.push_back(PureState::basis_vector(dim, p));
    const double s = 1.0 / std::sqrt(2.0);
    for (int p = 0; p < dim; ++p) {
        for (int q = p + 1; q < dim; ++q) {
            ComplexVector plus = ComplexVector::Zero(dim);
            plus(p) = s;
            plus(q) = s;
            ComplexVector iplus = ComplexVector::Zero(dim);
            iplus(p) = s;
            iplus(q) = Complex(0.0, s);
            frame.emplace_back(plus, 1e-9);
            frame.emplace_back(iplus, 1e-9);
        }
    }
    return frame;
}

ComplexMatrix fit_quadratic_form(int dim, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != dim * dim) throw DimensionError("frame value count must be dim^2");
    ComplexMatrix r = ComplexMatrix::Zero(dim, dim);
    for (int p = 0; p < dim; ++p) r(p, p) = values[p];
    std::size_t idx = dim;
    for (int p = 0; p < dim; ++p) {
        for (int q = p + 1; q < dim; ++q) {
            const double avg = 0.5 * (values[p] + values[q]);
            // (e_p+e_q)/sqrt2 sees avg + Re R_pq; (e_p+i e_q)/sqrt2 sees avg - Im R_pq.
            const double re = values[idx++] - avg;
            const double im = avg - values[idx++];
            r(p, q) = Complex(re, im);
            r(q, p) = Complex(re, -im);
        }
    }
    return r;
}

QuadraticFit gleason_fit(const Detector& d, int dim, std::uint64_t seed, int samples) {
    if (d.dim() != dim) throw DimensionError("detector dimension does not match fit dimension");
    const auto frame = tomography_frame(dim);
    std::vector<double> values;
    values.reserve(frame.size());
    for (const auto& f : frame) values.push_back(d.rate(f));
    QuadraticFit fit{fit_quadratic_form(dim, values), 0.0};
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        const PureState phi = random_state(dim, rng);
        const double model = phi.amplitudes().dot(fit.r * phi.amplitudes()).real();
        fit.residual = std::max(fit.residual, std::abs(d.rate(phi) - model));
    }
    return fit;
}

std::string to_string(TransformerForm f) {
    switch (f) {
        case TransformerForm::LinearConjugation: return "linear";
        case TransformerForm::Antilinear: return "antilinear";
        case TransformerForm::Degenerate: return "degenerate";
        case TransformerForm::Cloner: return "cloner";
        case TransformerForm::Custom: return "custom";
    }
    return "unknown";
}

Transformer::Transformer(int dim_in, int dim_out, ApplyFn apply, TransformerForm form)
    : dim_in_(dim_in), dim_out_(dim_out), apply_(std::move(apply)), form_(form) {
    if (dim_in_ < 1 || dim_out_ < 1) throw DimensionError("transformer dimensions must be >= 1");
}

Transformer Transformer::linear_conjugation(ComplexMatrix c) {
    const int in = static_cast<int>(c.cols());
    const int out = static_cast<int>(c.rows());
    Transformer t(in, out, [c](const ComplexMatrix& rho) -> ComplexMatrix { return c * rho * c.adjoint(); },
                  TransformerForm::LinearConjugation);
    t.data_ = {std::move(c)};
    return t;
}

Transformer Transformer::antilinear(ComplexMatrix c0) {
    const int in = static_cast<int>(c0.cols());
    const int out = static_cast<int>(c0.rows());
    Transformer t(in, out,
                  [c0](const ComplexMatrix& rho) -> ComplexMatrix { return c0 * rho.transpose() * c0.adjoint(); },
                  TransformerForm::Antilinear);
    t.data_ = {std::move(c0)};
    return t;
}

Transformer Transformer::degenerate(ComplexMatrix d, ComplexVector psi) {
    if (d.rows() != d.cols()) throw DimensionError("degenerate transformer needs square D");
    const int in = static_cast<int>(d.rows());
    const int out = static_cast<int>(psi.size());
    const ComplexMatrix proj = psi * psi.adjoint();
    Transformer t(in, out, [d, proj](const ComplexMatrix& rho) -> ComplexMatrix { return (d * rho).trace() * proj; },
                  TransformerForm::Degenerate);
    t.data_ = {std::move(d), ComplexMatrix(psi)};
    return t;
}

Transformer Transformer::cloner(int dim) {
    return Transformer(dim, dim * dim, [](const ComplexMatrix& rho) -> ComplexMatrix { return tensor(rho, rho); },
                       TransformerForm::Cloner);
}

Detector compose(const Transformer& t, const ComplexMatrix& r) {
    if (r.rows() != t.dim_out()) throw DimensionError("post-measurement operator does not act on transformer output");
    return Detector(t.dim_in(), [t, r](const PureState& phi) {
        return (r * t.apply(rank_one(phi))).trace().real();
    }, DetectorForm::Composite);
}

TransformerTomography::TransformerTomography(int dim_in, int dim_out, std::vector<ComplexMatrix> blocks,
                                             double residual)
    : dim_in_(dim_in), dim_out_(dim_out), blocks_(std::move(blocks)), residual_(residual) {
    if (static_cast<int>(blocks_.size()) != dim_out_ * dim_out_) throw DimensionError("tomography needs dim_out^2 blocks");
}

ComplexMatrix TransformerTomography::apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_in_) throw DimensionError("tomography input dimension mismatch");
    ComplexMatrix out(dim_out_, dim_out_);
    for (int p = 0; p < dim_out_; ++p) {
        for (int q = 0; q < dim_out_; ++q) out(p, q) = (block(p, q) * rho).trace();
    }
    return out;
}

double TransformerTomography::hermiticity_defect() const {
    double worst = 0.0;
    for (int p = 0; p < dim_out_; ++p) {
        for (int q = 0; q < dim_out_; ++q) worst = std::max(worst, max_abs(block(p, q).adjoint() - block(q, p)));
    }
    return worst;
}

TransformerTomography reconstruct_transformer(const Transformer& t, std::uint64_t seed, int samples) {
    const int n = t.dim_in();
    const int k = t.dim_out();
    const auto frame = tomography_frame(n);
    std::vector<ComplexMatrix> outputs;
    outputs.reserve(frame.size());
    for (const auto& f : frame) outputs.push_back(t.apply(rank_one(f)));

    std::vector<ComplexMatrix> blocks;
    blocks.reserve(k * k);
    std::vector<double> re(frame.size()), im(frame.size());
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q < k; ++q) {
            for (std::size_t f = 0; f < frame.size(); ++f) {
                re[f] = outputs[f](p, q).real();
                im[f] = outputs[f](p, q).imag();
            }
            const ComplexMatrix m = fit_quadratic_form(n, re);
            const ComplexMatrix nn = fit_quadratic_form(n, im);
            blocks.push_back(m + Complex(0.0, 1.0) * nn);
        }
    }
    const TransformerTomography unscored(n, k, blocks, 0.0);

    Rng rng(seed);
    double residual = 0.0;
    for (int s = 0; s < samples; ++s) {
        const ComplexMatrix rho = rank_one(random_state(n, rng)).matrix();
        residual = std::max(residual, max_abs(t.apply(rho) - unscored.apply(rho)));
    }
    return TransformerTomography(n, k, std::move(blocks), residual);
}

LinearityResult linearity_test(const Transformer& t, const TransformerTomography& tomo, int samples,
                               std::uint64_t seed) {
    if (t.dim_in() != tomo.dim_in() || t.dim_out() != tomo.dim_out()) {
        throw DimensionError("tomography does not match transformer");
    }
    const int n = t.dim_in();
    Rng rng(seed);
    LinearityResult res;
    for (int s = 0; s < samples; ++s) {
        const DensityMatrix r1 = rank_one(random_state(n, rng));
        const DensityMatrix r2 = rank_one(random_state(n, rng));
        res.worst_error_pure = std::max(res.worst_error_pure, max_abs(t.apply(r1) - tomo.apply(r1.matrix())));
        for (double lambda : {0.25, 0.5, 0.75}) {
            const DensityMatrix mix = DensityMatrix::mixture(r1, r2, lambda);
            res.worst_error_mixture =
                std::max(res.worst_error_mixture, max_abs(t.apply(mix) - tomo.apply(mix.matrix())));
        }
    }
    res.worst_error = std::max(res.worst_error_pure, res.worst_error_mixture);
    res.consistent = res.worst_error <= kLinearityTol;
    return res;
}

}  // namespace nosig
