// Finite quantum logics with collapse models, and a Hilbert-space model
// that is probed rather than enumerated.
//
// Finite models use exact rational arithmetic so that the identities
// (CNS, successive rates, Guz property) are checked with equality, not a
// tolerance.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "nosig/linalg.hpp"

namespace nosig::logic {

using Prob = boost::rational<std::int64_t>;

double to_double(const Prob& p);

class LogicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bounded poset with an orthocomplement. Elements are indices 0..n-1.
class OrthoPoset {
public:
    /// `order` lists pairs (a, b) meaning a <= b; reflexive-transitive
    /// closure is taken. `complement[a]` is a'.
    OrthoPoset(std::vector<std::string> ids, const std::vector<std::pair<int, int>>& order,
               std::vector<int> complement);

    static OrthoPoset boolean(int n);
    /// Horizontal sum of n four-element Boolean blocks {0, x_i, x_i', 1}.
    static OrthoPoset mo(int n);
    /// N5 with a complement that is not an involution.
    static OrthoPoset pentagon_fake();
    /// Hexagon 0 < a < b < 1, 0 < b' < a' < 1: ortholattice, not orthomodular.
    static OrthoPoset benzene();

    int size() const { return static_cast<int>(ids_.size()); }
    const std::string& id(int a) const { return ids_[a]; }
    int index_of(const std::string& id) const;
    int bottom() const { return bottom_; }
    int top() const { return top_; }
    int complement(int a) const { return complement_[a]; }
    bool leq(int a, int b) const { return leq_[a * size() + b]; }
    bool orthogonal(int a, int b) const { return leq(a, complement(b)); }

    std::optional<int> meet(int a, int b) const { return meet_[a * size() + b]; }
    std::optional<int> join(int a, int b) const { return join_[a * size() + b]; }
    std::optional<int> join_all(const std::vector<int>& xs) const;

    /// a = (a ^ b) v (a ^ b'); nullopt when a needed meet or join is missing.
    std::optional<bool> commutes(int a, int b) const;

    std::vector<int> atoms() const;
    bool covers(int upper, int lower) const;

private:
    std::vector<std::string> ids_;
    std::vector<int> complement_;
    std::vector<char> leq_;
    std::vector<std::optional<int>> meet_;
    std::vector<std::optional<int>> join_;
    int bottom_ = -1;
    int top_ = -1;
};

struct PosetReport {
    bool valid = true;
    bool is_boolean = false;  // every pair commutes
    std::vector<std::string> violations;
};

/// Exhaustive check of order, complement and orthomodular axioms.
PosetReport validate_poset(const OrthoPoset& l);

/// Probability measure on the elements.
struct StateMeasure {
    std::string id;
    std::vector<Prob> values;
    Prob operator()(int a) const { return values[a]; }
};

/// Orthomodular poset with states, the pure-state/atom bijection and an
/// explicit collapse table (p, a) -> p_a.
class CollapseModel {
public:
    CollapseModel(OrthoPoset logic, std::vector<StateMeasure> states, std::map<int, int> indicator,
                  std::map<std::pair<int, int>, int> collapse);

    const OrthoPoset& logic() const { return logic_; }
    const std::vector<StateMeasure>& states() const { return states_; }
    const StateMeasure& state(int p) const { return states_[p]; }
    int state_count() const { return static_cast<int>(states_.size()); }
    int state_index(const std::string& id) const;

    bool is_pure(int p) const { return indicator_.count(p) != 0; }
    std::vector<int> pure_states() const;
    /// s(p), the atom singling out pure state p.
    int indicator(int p) const;
    /// p_a, if the table defines it.
    std::optional<int> collapse(int p, int a) const;

    const std::map<int, int>& indicator_map() const { return indicator_; }
    const std::map<std::pair<int, int>, int>& collapse_table() const { return collapse_; }

private:
    OrthoPoset logic_;
    std::vector<StateMeasure> states_;
    std::map<int, int> indicator_;
    std::map<std::pair<int, int>, int> collapse_;
};

struct ModelReport {
    bool valid = true;
    std::vector<std::string> violations;
};

/// Measures are normalized and orthoadditive; s is a bijection P -> atoms
/// with p(s(p)) = 1 and q(s(p)) < 1 for q != p; collapse obeys
/// p(a) = 1 => p_a = p and s(p_a) <= a.
ModelReport validate_model(const CollapseModel& m);

/// (p : q) = p(s(q)); q must be pure.
Prob transition_prob(const CollapseModel& m, int p, int q);

/// Frequency with which p collapses to p_b: 0 when p(b) = 0, (p : p_b)
/// when p_b is pure, p(b) otherwise (conditioning of mixed states).
Prob collapse_rate(const CollapseModel& m, int p, int b);

/// All sets of pairwise orthogonal non-zero elements whose join is 1.
std::vector<std::vector<int>> orthogonal_partitions(const OrthoPoset& l);

struct CnsResult {
    bool holds = true;
    Prob worst_deviation{0};
    int partitions_checked = 0;
};

/// sum_j (p : p_{b_j}) p_{b_j}(a) == p(a) for every partition. Partitions
/// must be orthogonal, join to 1 and commute with a (throws LogicError).
CnsResult cns_check(const CollapseModel& m, int p, int a, const std::vector<std::vector<int>>& partitions);

struct SuccessiveResult {
    bool applicable = true;
    Prob lhs{0}, rhs{0};          // (p:p_b)(p_b:(p_b)_a) vs (p:p_{a^b})
    Prob lhs_swapped{0}, rhs_swapped{0};
    bool equal = false;
};

/// Requires a and b to commute (throws LogicError otherwise). Not
/// applicable when p(b) = 0 or p(a) = 0.
SuccessiveResult successive_rate_identity(const CollapseModel& m, int p, int a, int b);

struct GuzCounterexample {
    int p, q, a;
};

struct GuzResult {
    bool holds = true;
    int premises = 0;  // triples where (p:p_a) = (p:q_a) != 0
    std::vector<GuzCounterexample> counterexamples;
};

/// (p : p_a) = (p : q_a) != 0  =>  p_a = q_a over all pure p, q and all a.
GuzResult guz_property_check(const CollapseModel& m);

struct CoveringCounterexample {
    int atom, element;
    std::string reason;
};

struct CoveringResult {
    bool holds = true;
    int pairs_checked = 0;
    std::vector<CoveringCounterexample> counterexamples;
};

/// For every atom q and element a with q ^ a = 0: a v q exists and covers a.
CoveringResult covering_law_check(const OrthoPoset& l);

/// Every check over every state, element and partition of a finite model.
struct ChainReport {
    PosetReport poset;
    ModelReport model;
    bool cns_all = true;
    int cns_cases = 0;
    int cns_skipped_pairs = 0;  // pairs whose commutativity is undecidable
    bool successive_all = true;
    int successive_cases = 0;
    GuzResult guz;
    CoveringResult covering;
};

ChainReport derivation_chain(const CollapseModel& m);

// Shipped finite models.
/// Boolean 2^n: point masses (pure) plus dyadic mixtures, Bayes conditioning.
CollapseModel boolean_model(int n);
/// MO_n: atom collapse, pure state per atom, one uniform mixture.
CollapseModel mo_model(int n);
/// Boolean 2^2 where testing 1 moves the first point mass to the second.
CollapseModel broken_collapse_model();

// ---------------------------------------------------------------------------
// Hilbert-space logic: propositions are projectors, states are unit
// vectors, collapse is Lüders projection.

namespace hilbert {

inline constexpr double kTol = 1e-10;

ComplexMatrix projector(const ComplexMatrix& columns);
bool commute(const ComplexMatrix& p, const ComplexMatrix& q, double tol = kTol);

/// Normalized P psi, or nullopt when ||P psi|| = 0.
std::optional<PureState> lueders(const PureState& psi, const ComplexMatrix& p);

/// |<p, q>|^2.
double transition_prob(const PureState& p, const PureState& q);

/// ||P psi||^2, which equals (psi : psi_P).
double probability(const PureState& psi, const ComplexMatrix& p);

/// |sum_j ||B_j psi||^2 <psi_j, A psi_j> - <psi, A psi>|; throws on a
/// partition that is not orthogonal, not summing to I, or not commuting.
double cns_deviation(const PureState& psi, const ComplexMatrix& a, const std::vector<ComplexMatrix>& partition);

struct Successive {
    bool applicable = true;
    double lhs = 0.0, rhs = 0.0, lhs_swapped = 0.0, rhs_swapped = 0.0;
    double deviation() const;
};

Successive successive_rate_identity(const PureState& psi, const ComplexMatrix& a, const ComplexMatrix& b);

/// Deviation from the two collapse conditions for one (psi, P).
double collapse_condition_defect(const PureState& psi, const ComplexMatrix& p);

/// Seeded probe family: one random unitary frame per family; propositions
/// are sums of frame projectors (so all commute inside a family).
struct ProbeSet {
    int dim = 0;
    std::vector<PureState> states;
    std::vector<ComplexMatrix> frames;  // unitary, columns are the frame
};

ProbeSet make_probes(int dim, int states, int frames, std::uint64_t seed);

/// All projector partitions of I built from one frame (set partitions of
/// its columns).
std::vector<std::vector<ComplexMatrix>> frame_partitions(const ComplexMatrix& frame);

/// All non-zero frame projectors (sums over non-empty column subsets).
std::vector<ComplexMatrix> frame_propositions(const ComplexMatrix& frame);

struct HilbertCheck {
    bool holds = true;
    double worst = 0.0;
    int cases = 0;
};

HilbertCheck cns_check(const ProbeSet& probes, double tol = kTol);
HilbertCheck successive_check(const ProbeSet& probes, double tol = kTol);

struct GuzProbeResult {
    bool holds = true;
    int probes = 0;
    int premises = 0;
    double worst = 0.0;  // 1 - |<p_a, q_a>|^2 over triples meeting the premise
};

/// Runs `count` seeded triples (p, q, A); half are built so that the
/// premise holds (q_a parallel to A p) and half are unconstrained.
GuzProbeResult guz_check(int dim, int count, std::uint64_t seed, double tol = kTol);

struct CoveringProbeResult {
    bool holds = true;
    int pairs = 0;
    int worst_gap = 0;  // |dim(A v q) - dim A - 1| over rays outside A
};

/// Random subspaces and rays: dim(A v q) = dim A + 1 whenever q is not in A.
CoveringProbeResult covering_check(int dim, int subspaces, int rays, std::uint64_t seed);

}  // namespace hilbert

}  // namespace nosig::logic
