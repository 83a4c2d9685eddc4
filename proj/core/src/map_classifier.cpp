#include "nosig/map_classifier.hpp"

#include <algorithm>
#include <cmath>

#include "nosig/epr.hpp"
#include "nosig/random.hpp"

namespace nosig {

OperatorMap::OperatorMap(int dim_h, int dim_k, std::vector<ComplexMatrix> blocks)
    : dim_h_(dim_h), dim_k_(dim_k), blocks_(std::move(blocks)) {
    if (dim_h_ < 1 || dim_k_ < 1) throw DimensionError("operator map dimensions must be >= 1");
    if (static_cast<int>(blocks_.size()) != dim_k_ * dim_k_) throw DimensionError("operator map needs dimK^2 blocks");
    for (const auto& b : blocks_) {
        if (b.rows() != dim_h_ || b.cols() != dim_h_) throw DimensionError("operator map block must be dimH x dimH");
    }
}

OperatorMap OperatorMap::conjugation(const ComplexMatrix& c) {
    return from_action(static_cast<int>(c.cols()), static_cast<int>(c.rows()),
                       [&c](const ComplexMatrix& a) -> ComplexMatrix { return c * a * c.adjoint(); });
}

OperatorMap OperatorMap::antilinear(const ComplexMatrix& c0) {
    return from_action(static_cast<int>(c0.cols()), static_cast<int>(c0.rows()),
                       [&c0](const ComplexMatrix& a) -> ComplexMatrix { return c0 * a.transpose() * c0.adjoint(); });
}

OperatorMap OperatorMap::degenerate(const ComplexMatrix& d, const ComplexVector& k) {
    const ComplexMatrix proj = k * k.adjoint();
    return from_action(static_cast<int>(d.rows()), static_cast<int>(k.size()),
                       [&](const ComplexMatrix& a) -> ComplexMatrix { return (d * a).trace() * proj; });
}

OperatorMap OperatorMap::identity(int dim) { return conjugation(ComplexMatrix::Identity(dim, dim)); }

OperatorMap OperatorMap::transpose(int dim) { return antilinear(ComplexMatrix::Identity(dim, dim)); }

OperatorMap OperatorMap::zero(int dim_h, int dim_k) {
    return OperatorMap(dim_h, dim_k, std::vector<ComplexMatrix>(dim_k * dim_k, ComplexMatrix::Zero(dim_h, dim_h)));
}

ComplexMatrix OperatorMap::apply(const ComplexMatrix& a) const {
    if (a.rows() != dim_h_ || a.cols() != dim_h_) throw DimensionError("operator map input has wrong dimension");
    ComplexMatrix out(dim_k_, dim_k_);
    for (int i = 0; i < dim_k_; ++i) {
        for (int j = 0; j < dim_k_; ++j) out(j, i) = (a * block(i, j)).trace();
    }
    return out;
}

OperatorMap OperatorMap::compose_transpose() const {
    return from_action(dim_h_, dim_k_, [this](const ComplexMatrix& a) -> ComplexMatrix { return apply(a.transpose()); });
}

OperatorMap symmetrize(const OperatorMap& w) {
    const int k = w.dim_k();
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(k * k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) blocks.push_back(0.5 * (w.block(i, j) + w.block(j, i).adjoint()));
    }
    return OperatorMap(w.dim_h(), k, std::move(blocks));
}

namespace {

/// Violation of the rank-one-positive property for one output, in units
/// of tol. Zero means the output passes.
double rank_one_violation(const ComplexMatrix& x, double tol) {
    const double scale = std::max(1.0, max_abs(x));
    const double herm = max_abs(x - x.adjoint()) / scale;
    const auto eig = eigh(0.5 * (x + x.adjoint()), 1.0);
    const auto n = eig.values.size();
    const double top = eig.values(n - 1);
    const double negativity = std::max(0.0, -eig.values(0)) / scale;
    const double second = n >= 2 ? std::max(0.0, eig.values(n - 2)) / std::max(tol, std::abs(top)) : 0.0;
    double v = 0.0;
    if (herm > tol) v = std::max(v, herm / tol);
    if (negativity > tol) v = std::max(v, negativity / tol);
    if (second > tol) v = std::max(v, second / tol);
    return v;
}

std::optional<ComplexMatrix> rank_one_factor(const ComplexMatrix& x, int dim_h, int dim_k, double ratio) {
    const auto eig = eigh(x, 1e-9);
    const auto n = eig.values.size();
    const double top = eig.values(n - 1);
    if (!(top > 0.0)) return std::nullopt;
    const double second = n >= 2 ? eig.values(n - 2) : 0.0;
    if (second > ratio * top || eig.values(0) < -ratio * top) return std::nullopt;
    const ComplexVector v = std::sqrt(top) * eig.vectors.col(n - 1);
    ComplexMatrix c(dim_k, dim_h);
    for (int a = 0; a < dim_h; ++a)
        for (int k = 0; k < dim_k; ++k) c(k, a) = v(a * dim_k + k);
    return c;
}

}  // namespace

RankOneCheck check_rank_one_preserving(const OperatorMap& w, int samples, std::uint64_t seed, double tol) {
    Rng rng(seed);
    RankOneCheck res;
    for (int s = 0; s < samples; ++s) {
        const PureState phi = random_state(w.dim_h(), rng);
        const double v = rank_one_violation(w.apply(rank_one(phi).matrix()), tol);
        if (v > 0.0) {
            if (res.ok) res.witness = phi;
            res.ok = false;
            res.worst_violation = std::max(res.worst_violation, v);
        }
    }
    return res;
}

std::string type_name(const Classification& c) {
    struct Visitor {
        std::string operator()(const LinearType&) const { return "linear"; }
        std::string operator()(const AntilinearType&) const { return "antilinear"; }
        std::string operator()(const DegenerateType&) const { return "degenerate"; }
        std::string operator()(const NotRankOnePreserving&) const { return "not_rank_one_preserving"; }
    };
    return std::visit(Visitor{}, c);
}

ComplexMatrix reconstruct(const Classification& c, const ComplexMatrix& rho) {
    struct Visitor {
        const ComplexMatrix& rho;
        ComplexMatrix operator()(const LinearType& l) const { return l.c * rho * l.c.adjoint(); }
        ComplexMatrix operator()(const AntilinearType& a) const { return a.c0 * rho.transpose() * a.c0.adjoint(); }
        ComplexMatrix operator()(const DegenerateType& d) const { return (d.d * rho).trace() * d.k * d.k.adjoint(); }
        ComplexMatrix operator()(const NotRankOnePreserving&) const {
            throw std::invalid_argument("cannot reconstruct a map that is not rank-one preserving");
        }
    };
    return std::visit(Visitor{rho}, c);
}

ComplexMatrix process_matrix(const OperatorMap& w) {
    const int h = w.dim_h();
    const int k = w.dim_k();
    ComplexMatrix x = ComplexMatrix::Zero(h * k, h * k);
    for (int a = 0; a < h; ++a) {
        for (int b = 0; b < h; ++b) x.block(a * k, b * k, k, k) = w.apply(matrix_unit(h, a, b));
    }
    return x;
}

Classification classify(const OperatorMap& w, const ClassifyOptions& opt) {
    const OperatorMap ws = symmetrize(w);
    const int h = ws.dim_h();
    const int kd = ws.dim_k();

    const RankOneCheck check = check_rank_one_preserving(ws, opt.samples, opt.seed, opt.tol);
    if (!check.ok) return NotRankOnePreserving{*check.witness};

    Classification result = NotRankOnePreserving{PureState::basis_vector(h, 0)};
    bool found = false;

    // Degenerate probe: all frame outputs on one ray k.
    const auto frame = tomography_frame(h);
    std::vector<ComplexMatrix> outs;
    outs.reserve(frame.size());
    double scale = 0.0;
    ComplexMatrix sum = ComplexMatrix::Zero(kd, kd);
    for (const auto& f : frame) {
        outs.push_back(ws.apply(rank_one(f).matrix()));
        scale = std::max(scale, max_abs(outs.back()));
        sum += outs.back();
    }
    if (scale == 0.0) {
        ComplexVector k0 = ComplexVector::Zero(kd);
        k0(0) = 1.0;
        result = LinearType{ComplexMatrix::Zero(kd, h), DegenerateType{ComplexMatrix::Zero(h, h), k0}};
        found = true;
    } else {
        const auto sum_eig = eigh(0.5 * (sum + sum.adjoint()), 1.0);
        const ComplexVector k = sum_eig.vectors.col(kd - 1);
        const ComplexMatrix kk = k * k.adjoint();
        bool on_ray = true;
        std::vector<double> values;
        values.reserve(outs.size());
        for (const auto& x : outs) {
            const double weight = k.dot(x * k).real();
            values.push_back(weight);
            if (max_abs(x - weight * kk) > opt.tol * std::max(1.0, scale)) on_ray = false;
        }
        if (on_ray) {
            const ComplexMatrix d = fit_quadratic_form(h, values);
            const auto d_eig = eigh(d, 1e-9);
            const double top = d_eig.values(h - 1);
            const bool psd = d_eig.values(0) >= -opt.tol * std::max(1.0, std::abs(top));
            if (psd) {
                const double second = h >= 2 ? std::max(0.0, d_eig.values(h - 2)) : 0.0;
                if (second <= opt.rank_ratio * top) {
                    // Rank-one D = c c*: also W rho = C rho C* with C = k c*.
                    const ComplexVector c = std::sqrt(std::max(0.0, top)) * d_eig.vectors.col(h - 1);
                    result = LinearType{k * c.adjoint(), DegenerateType{d, k}};
                } else {
                    result = DegenerateType{d, k};
                }
                found = true;
            }
        }
    }

    if (!found) {
        if (auto c = rank_one_factor(process_matrix(ws), h, kd, opt.rank_ratio)) {
            result = LinearType{*c, std::nullopt};
            found = true;
        } else if (auto c0 = rank_one_factor(process_matrix(ws.compose_transpose()), h, kd, opt.rank_ratio)) {
            result = AntilinearType{*c0};
            found = true;
        }
    }

    if (!found) {
        // The sampled check passed yet no form fits: report the sample
        // closest to failing as the witness.
        Rng rng(opt.seed);
        double worst = -1.0;
        PureState witness = PureState::basis_vector(h, 0);
        for (int s = 0; s < opt.samples; ++s) {
            const PureState phi = random_state(h, rng);
            const ComplexMatrix x = ws.apply(rank_one(phi).matrix());
            const double v = rank_one_violation(x, 1e-300);
            if (v > worst) {
                worst = v;
                witness = phi;
            }
        }
        return NotRankOnePreserving{witness};
    }

    const double err = verify_classification(ws, result, opt.samples, child_seed(opt.seed, 1));
    if (err > opt.verify_tol * std::max(1.0, scale)) {
        throw ClassificationError("extracted " + type_name(result) + " data does not reproduce the map", err);
    }
    return result;
}

double verify_classification(const OperatorMap& w, const Classification& c, int samples, std::uint64_t seed) {
    if (std::holds_alternative<NotRankOnePreserving>(c)) {
        throw std::invalid_argument("verify_classification needs a rank-one-preserving classification");
    }
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const ComplexMatrix rho = rank_one(random_state(w.dim_h(), rng)).matrix();
        worst = std::max(worst, max_abs(w.apply(rho) - reconstruct(c, rho)));
    }
    return worst;
}

double superposition_probe_error(const OperatorMap& w, const Classification& c, int samples, std::uint64_t seed) {
    const bool linear = std::holds_alternative<LinearType>(c);
    const bool anti = std::holds_alternative<AntilinearType>(c);
    if (!linear && !anti) throw std::invalid_argument("superposition probes need a linear or antilinear classification");
    const ComplexMatrix& op = linear ? std::get<LinearType>(c).c : std::get<AntilinearType>(c).c0;
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const ComplexVector u = random_state(w.dim_h(), rng).amplitudes();
        const ComplexVector v = random_state(w.dim_h(), rng).amplitudes();
        const Complex a = rng.complex_normal();
        const Complex b = rng.complex_normal();
        const ComplexVector sup = a * u + b * v;
        const double n = sup.norm();
        ComplexVector image;
        if (linear) {
            image = (a * (op * u) + b * (op * v)) / n;
        } else {
            image = (std::conj(a) * (op * u.conjugate()) + std::conj(b) * (op * v.conjugate())) / n;
        }
        const ComplexMatrix expected = image * image.adjoint();
        const ComplexMatrix actual = w.apply(rank_one(PureState::normalized(sup)).matrix());
        worst = std::max(worst, max_abs(actual - expected));
    }
    return worst;
}

PauliDecomposition pauli_decompose(const OperatorMap& w) {
    if (w.dim_h() != 2 || w.dim_k() != 2) throw DimensionError("Pauli decomposition needs dimH = dimK = 2");
    PauliDecomposition p;
    p.alpha = 0.5 * w.block(0, 0).trace().real();
    p.gamma = 0.5 * w.block(1, 1).trace().real();
    p.a = 0.5 * w.block(0, 1).trace();
    for (int i = 0; i < 3; ++i) {
        const ComplexMatrix s = pauli(i + 1);
        p.beta[i] = 0.5 * (w.block(0, 0) * s).trace().real();
        p.delta[i] = 0.5 * (w.block(1, 1) * s).trace().real();
        p.b[i] = 0.5 * (w.block(0, 1) * s).trace();
    }
    return p;
}

double PauliResiduals::max_abs() const {
    double m = 0.0;
    for (double v : as_vector()) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> PauliResiduals::as_vector() const {
    return {eq1, eq2, eq3[0], eq3[1], eq4, eq5[0], eq5[1], eq6[0], eq6[1], eq7};
}

PauliResiduals pauli_constraints(const OperatorMap& w) {
    if (w.dim_h() != 2 || w.dim_k() != 2) throw DimensionError("Pauli constraints need dimH = dimK = 2");
    const OperatorMap ws = symmetrize(w);

    // M positive invertible with M L M a projector.
    const ComplexMatrix l = ws.block(0, 0) + ws.block(1, 1);
    const ComplexMatrix root = pinv_sqrt(l, 1e-10);
    const ComplexMatrix support = root * l * root;
    const auto sup_eig = eigh(0.5 * (support + support.adjoint()), 1e-6);
    ComplexMatrix kernel = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
        if (sup_eig.values(i) < 0.5) kernel += sup_eig.vectors.col(i) * sup_eig.vectors.col(i).adjoint();
    }
    const ComplexMatrix m = root + kernel;

    std::vector<ComplexMatrix> scaled;
    for (const auto& b : ws.blocks()) scaled.push_back(m * b * m);

    // L_11 and L_22 commute now; a generic combination diagonalizes both.
    const ComplexMatrix combo = scaled[0] + std::sqrt(2.0) * scaled[3];
    const ComplexMatrix u = eigh(0.5 * (combo + combo.adjoint()), 1e-6).vectors;
    for (auto& b : scaled) b = u.adjoint() * b * u;

    PauliResiduals r;
    r.params = pauli_decompose(OperatorMap(2, 2, scaled));
    const auto& p = r.params;
    const double beta = p.beta[2];
    const double delta = p.delta[2];
    const Complex a = p.a;
    const auto& b = p.b;
    const double b1 = std::norm(b[0]), b2 = std::norm(b[1]), b3 = std::norm(b[2]);

    r.eq1 = p.alpha * p.gamma + beta * delta / 3.0 - std::norm(a) - (b1 + b2 + b3) / 3.0;
    r.eq2 = p.alpha * delta + p.gamma * beta - 2.0 * (std::conj(a) * b[2]).real();
    r.eq3 = {(std::conj(a) * b[0]).real(), (std::conj(a) * b[1]).real()};
    r.eq4 = 2.0 * beta * delta - 2.0 * b3 + b1 + b2;
    r.eq5 = {(std::conj(b[0]) * b[2]).real(), (std::conj(b[1]) * b[2]).real()};
    r.eq6 = {-beta * delta - (2.0 * b1 - b2 - b3), -beta * delta - (2.0 * b2 - b1 - b3)};
    r.eq7 = (std::conj(b[0]) * b[1]).real();
    r.off_axis = std::max({std::abs(p.beta[0]), std::abs(p.beta[1]), std::abs(p.delta[0]), std::abs(p.delta[1])});
    return r;
}

namespace {

OperatorMap from_blocks(const ComplexMatrix& l11, const ComplexMatrix& l12, const ComplexMatrix& l21,
                        const ComplexMatrix& l22) {
    return OperatorMap(2, 2, {l11, l12, l21, l22});
}

}  // namespace

OperatorMap case_one_form(bool plus) {
    const Complex i(0.0, 1.0);
    const double s = plus ? 1.0 : -1.0;
    const ComplexMatrix id = pauli(0), s1 = pauli(1), s2 = pauli(2), s3 = pauli(3);
    return from_blocks(0.5 * (id + s3), 0.5 * (s1 + s * i * s2), 0.5 * (s1 - s * i * s2), 0.5 * (id - s3));
}

OperatorMap subcase_iia_form() {
    const ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    return from_blocks(0.5 * (pauli(0) + pauli(3)), z, z, z);
}

OperatorMap subcase_iib_form() {
    const ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    return from_blocks(pauli(0), z, z, z);
}

}  // namespace nosig
