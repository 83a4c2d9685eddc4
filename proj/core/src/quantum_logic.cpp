#include "nosig/quantum_logic.hpp"

#include <cmath>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "nosig/random.hpp"

namespace nosig::logic {

double to_double(const Prob& p) { return boost::rational_cast<double>(p); }

namespace {

std::string show(const Prob& p) {
    std::ostringstream os;
    os << p.numerator();
    if (p.denominator() != 1) os << '/' << p.denominator();
    return os.str();
}

Prob abs_prob(const Prob& p) { return p < Prob(0) ? -p : p; }

}  // namespace

OrthoPoset::OrthoPoset(std::vector<std::string> ids, const std::vector<std::pair<int, int>>& order,
                       std::vector<int> complement)
    : ids_(std::move(ids)), complement_(std::move(complement)) {
    const int n = size();
    if (n == 0) throw LogicError("poset must have at least one element");
    if (static_cast<int>(complement_.size()) != n) throw LogicError("complement map must cover every element");
    for (int c : complement_) {
        if (c < 0 || c >= n) throw LogicError("complement maps outside the poset");
    }
    leq_.assign(n * n, 0);
    for (int a = 0; a < n; ++a) leq_[a * n + a] = 1;
    for (const auto& [a, b] : order) {
        if (a < 0 || a >= n || b < 0 || b >= n) throw LogicError("order pair refers to an unknown element");
        leq_[a * n + b] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (leq_[i * n + k])
                for (int j = 0; j < n; ++j)
                    if (leq_[k * n + j]) leq_[i * n + j] = 1;

    for (int a = 0; a < n; ++a) {
        bool below_all = true, above_all = true;
        for (int b = 0; b < n; ++b) {
            below_all = below_all && leq(a, b);
            above_all = above_all && leq(b, a);
        }
        if (below_all && bottom_ < 0) bottom_ = a;
        if (above_all && top_ < 0) top_ = a;
    }
    if (bottom_ < 0 || top_ < 0) throw LogicError("poset must have a bottom and a top element");

    meet_.assign(n * n, std::nullopt);
    join_.assign(n * n, std::nullopt);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            std::optional<int> greatest, least;
            for (int x = 0; x < n; ++x) {
                if (leq(x, a) && leq(x, b)) {
                    bool is_greatest = true;
                    for (int y = 0; y < n && is_greatest; ++y)
                        if (leq(y, a) && leq(y, b) && !leq(y, x)) is_greatest = false;
                    if (is_greatest) greatest = x;
                }
                if (leq(a, x) && leq(b, x)) {
                    bool is_least = true;
                    for (int y = 0; y < n && is_least; ++y)
                        if (leq(a, y) && leq(b, y) && !leq(x, y)) is_least = false;
                    if (is_least) least = x;
                }
            }
            meet_[a * n + b] = greatest;
            join_[a * n + b] = least;
        }
    }
}

OrthoPoset OrthoPoset::boolean(int n) {
    if (n < 1 || n > 6) throw LogicError("Boolean logic supported for 1 <= n <= 6");
    const int size = 1 << n;
    std::vector<std::string> ids;
    for (int m = 0; m < size; ++m) {
        std::string s = "{";
        for (int i = 0; i < n; ++i) {
            if (m & (1 << i)) {
                if (s.size() > 1) s += ',';
                s += std::to_string(i);
            }
        }
        ids.push_back(s + "}");
    }
    std::vector<std::pair<int, int>> order;
    for (int a = 0; a < size; ++a)
        for (int b = 0; b < size; ++b)
            if ((a & b) == a) order.emplace_back(a, b);
    std::vector<int> comp(size);
    for (int m = 0; m < size; ++m) comp[m] = (size - 1) & ~m;
    return OrthoPoset(std::move(ids), order, std::move(comp));
}

OrthoPoset OrthoPoset::mo(int n) {
    if (n < 1) throw LogicError("MO_n needs n >= 1");
    std::vector<std::string> ids{"0", "1"};
    std::vector<int> comp{1, 0};
    std::vector<std::pair<int, int>> order{{0, 1}};
    for (int i = 1; i <= n; ++i) {
        const int x = static_cast<int>(ids.size());
        ids.push_back("x" + std::to_string(i));
        ids.push_back("x" + std::to_string(i) + "'");
        comp.push_back(x + 1);
        comp.push_back(x);
        for (int e : {x, x + 1}) {
            order.emplace_back(0, e);
            order.emplace_back(e, 1);
        }
    }
    return OrthoPoset(std::move(ids), order, std::move(comp));
}

OrthoPoset OrthoPoset::pentagon_fake() {
    // 0 < a < b < 1, 0 < c < 1; complement a -> c, b -> c, c -> a.
    return OrthoPoset({"0", "a", "b", "c", "1"}, {{0, 1}, {1, 2}, {2, 4}, {0, 3}, {3, 4}}, {4, 3, 3, 1, 0});
}

OrthoPoset OrthoPoset::benzene() {
    // 0 < a < b < 1 and 0 < b' < a' < 1.
    return OrthoPoset({"0", "a", "b", "b'", "a'", "1"}, {{0, 1}, {1, 2}, {2, 5}, {0, 3}, {3, 4}, {4, 5}},
                      {5, 4, 3, 2, 1, 0});
}

int OrthoPoset::index_of(const std::string& id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw LogicError("unknown element '" + id + "'");
    return static_cast<int>(it - ids_.begin());
}

std::optional<int> OrthoPoset::join_all(const std::vector<int>& xs) const {
    const int n = size();
    std::optional<int> least;
    for (int x = 0; x < n; ++x) {
        const bool upper = std::all_of(xs.begin(), xs.end(), [&](int e) { return leq(e, x); });
        if (!upper) continue;
        bool is_least = true;
        for (int y = 0; y < n && is_least; ++y) {
            if (std::all_of(xs.begin(), xs.end(), [&](int e) { return leq(e, y); }) && !leq(x, y)) is_least = false;
        }
        if (is_least) least = x;
    }
    return least;
}

std::optional<bool> OrthoPoset::commutes(int a, int b) const {
    const auto m1 = meet(a, b);
    const auto m2 = meet(a, complement(b));
    if (!m1 || !m2) return std::nullopt;
    const auto j = join(*m1, *m2);
    if (!j) return std::nullopt;
    return *j == a;
}

std::vector<int> OrthoPoset::atoms() const {
    std::vector<int> out;
    for (int a = 0; a < size(); ++a)
        if (covers(a, bottom_)) out.push_back(a);
    return out;
}

bool OrthoPoset::covers(int upper, int lower) const {
    if (upper == lower || !leq(lower, upper)) return false;
    for (int x = 0; x < size(); ++x) {
        if (x != upper && x != lower && leq(lower, x) && leq(x, upper)) return false;
    }
    return true;
}

PosetReport validate_poset(const OrthoPoset& l) {
    PosetReport rep;
    const int n = l.size();
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    const auto& id = [&](int a) -> const std::string& { return l.id(a); };

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (l.leq(a, b) && l.leq(b, a)) fail("antisymmetry: " + id(a) + " <= " + id(b) + " <= " + id(a));

    for (int a = 0; a < n; ++a) {
        if (l.complement(l.complement(a)) != a) fail("involution: " + id(a) + "'' != " + id(a));
        const auto j = l.join(a, l.complement(a));
        if (!j || *j != l.top()) fail("complement join: " + id(a) + " v " + id(a) + "' != 1");
        const auto m = l.meet(a, l.complement(a));
        if (!m || *m != l.bottom()) fail("complement meet: " + id(a) + " ^ " + id(a) + "' != 0");
    }
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (!l.leq(a, b)) continue;
            if (!l.leq(l.complement(b), l.complement(a))) fail("order reversal: " + id(a) + " <= " + id(b) + " but not b' <= a'");
            const auto m = l.meet(b, l.complement(a));
            if (!m) {
                fail("orthomodular law: " + id(b) + " ^ " + id(a) + "' does not exist");
                continue;
            }
            const auto j = l.join(a, *m);
            if (!j || *j != b) fail("orthomodular law: " + id(a) + " <= " + id(b) + " but " + id(b) + " != " + id(a) + " v (" + id(b) + " ^ " + id(a) + "')");
        }
    }
    rep.is_boolean = true;
    for (int a = 0; a < n && rep.is_boolean; ++a)
        for (int b = 0; b < n && rep.is_boolean; ++b) {
            const auto c = l.commutes(a, b);
            if (!c || !*c) rep.is_boolean = false;
        }
    return rep;
}

CollapseModel::CollapseModel(OrthoPoset logic, std::vector<StateMeasure> states, std::map<int, int> indicator,
                             std::map<std::pair<int, int>, int> collapse)
    : logic_(std::move(logic)), states_(std::move(states)), indicator_(std::move(indicator)), collapse_(std::move(collapse)) {
    const int n = logic_.size();
    const int s = state_count();
    for (const auto& st : states_) {
        if (static_cast<int>(st.values.size()) != n) throw LogicError("state '" + st.id + "' must assign every element");
    }
    for (const auto& [p, atom] : indicator_) {
        if (p < 0 || p >= s || atom < 0 || atom >= n) throw LogicError("indicator map refers to unknown state or element");
    }
    for (const auto& [key, target] : collapse_) {
        if (key.first < 0 || key.first >= s || key.second < 0 || key.second >= n || target < 0 || target >= s) {
            throw LogicError("collapse table refers to unknown state or element");
        }
    }
}

int CollapseModel::state_index(const std::string& id) const {
    for (int i = 0; i < state_count(); ++i)
        if (states_[i].id == id) return i;
    throw LogicError("unknown state '" + id + "'");
}

std::vector<int> CollapseModel::pure_states() const {
    std::vector<int> out;
    for (const auto& [p, atom] : indicator_) out.push_back(p);
    return out;
}

int CollapseModel::indicator(int p) const {
    const auto it = indicator_.find(p);
    if (it == indicator_.end()) throw LogicError("state '" + states_[p].id + "' is not pure");
    return it->second;
}

std::optional<int> CollapseModel::collapse(int p, int a) const {
    const auto it = collapse_.find({p, a});
    if (it == collapse_.end()) return std::nullopt;
    return it->second;
}

ModelReport validate_model(const CollapseModel& m) {
    ModelReport rep;
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    const auto& l = m.logic();
    const int n = l.size();
    for (const auto& st : m.states()) {
        if (st(l.top()) != Prob(1)) fail("state " + st.id + ": p(1) = " + show(st(l.top())));
        for (int a = 0; a < n; ++a)
            if (st(a) < Prob(0) || st(a) > Prob(1)) fail("state " + st.id + ": p(" + l.id(a) + ") outside [0,1]");
        for (int a = 0; a < n; ++a) {
            for (int b = a; b < n; ++b) {
                if (!l.orthogonal(a, b)) continue;
                const auto j = l.join(a, b);
                if (j && st(*j) != st(a) + st(b)) {
                    fail("state " + st.id + ": not additive on " + l.id(a) + " _|_ " + l.id(b));
                }
            }
        }
    }

    std::set<int> hit;
    const auto atoms = l.atoms();
    for (const auto& [p, atom] : m.indicator_map()) {
        if (std::find(atoms.begin(), atoms.end(), atom) == atoms.end()) {
            fail("s(" + m.state(p).id + ") = " + l.id(atom) + " is not an atom");
        }
        if (!hit.insert(atom).second) fail("atom " + l.id(atom) + " indicates two pure states");
        if (m.state(p)(atom) != Prob(1)) fail("p(s(p)) != 1 for " + m.state(p).id);
        for (int q = 0; q < m.state_count(); ++q) {
            if (q != p && m.state(q)(atom) == Prob(1)) fail("state " + m.state(q).id + " is certain on s(" + m.state(p).id + ")");
        }
    }
    for (int atom : atoms)
        if (!hit.count(atom)) fail("atom " + l.id(atom) + " indicates no pure state");

    for (const auto& [key, target] : m.collapse_table()) {
        const auto [p, a] = key;
        const auto& st = m.state(p);
        if (st(a) == Prob(0)) fail("collapse of " + st.id + " on " + l.id(a) + " defined at zero probability");
        if (m.is_pure(p) && st(a) == Prob(1) && target != p) {
            fail("condition 1: " + st.id + "(" + l.id(a) + ") = 1 but collapse moves the state");
        }
        if (m.is_pure(target)) {
            if (!l.leq(m.indicator(target), a)) fail("condition 2: s(" + st.id + "_" + l.id(a) + ") not below " + l.id(a));
        } else if (m.state(target)(a) != Prob(1)) {
            fail("condition 2: collapsed state " + m.state(target).id + " not certain on " + l.id(a));
        }
    }
    for (int p : m.pure_states()) {
        for (int a = 0; a < n; ++a) {
            if (m.state(p)(a) > Prob(0) && !m.collapse(p, a)) fail("missing collapse of " + m.state(p).id + " on " + l.id(a));
        }
    }
    return rep;
}

Prob transition_prob(const CollapseModel& m, int p, int q) { return m.state(p)(m.indicator(q)); }

Prob collapse_rate(const CollapseModel& m, int p, int b) {
    const Prob pb = m.state(p)(b);
    if (pb == Prob(0)) return Prob(0);
    const auto target = m.collapse(p, b);
    if (!target) {
        throw LogicError("collapse of " + m.state(p).id + " on " + m.logic().id(b) + " is undefined");
    }
    if (m.is_pure(*target)) return transition_prob(m, p, *target);
    return pb;
}

std::vector<std::vector<int>> orthogonal_partitions(const OrthoPoset& l) {
    std::vector<int> nonzero;
    for (int a = 0; a < l.size(); ++a)
        if (a != l.bottom()) nonzero.push_back(a);
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    std::function<void(std::size_t)> extend = [&](std::size_t start) {
        if (!current.empty()) {
            const auto j = l.join_all(current);
            if (j && *j == l.top()) {
                out.push_back(current);
                return;
            }
        }
        for (std::size_t i = start; i < nonzero.size(); ++i) {
            const int c = nonzero[i];
            if (!std::all_of(current.begin(), current.end(), [&](int e) { return l.orthogonal(e, c); })) continue;
            current.push_back(c);
            extend(i + 1);
            current.pop_back();
        }
    };
    extend(0);
    return out;
}

namespace {

void require_partition(const OrthoPoset& l, const std::vector<int>& part, int a) {
    if (part.empty()) throw LogicError("empty partition");
    for (std::size_t i = 0; i < part.size(); ++i)
        for (std::size_t j = i + 1; j < part.size(); ++j)
            if (!l.orthogonal(part[i], part[j])) throw LogicError("partition elements are not pairwise orthogonal");
    const auto j = l.join_all(part);
    if (!j || *j != l.top()) throw LogicError("partition does not join to 1");
    for (int b : part) {
        const auto c = l.commutes(a, b);
        if (!c || !*c) throw LogicError("partition element " + l.id(b) + " does not commute with " + l.id(a));
    }
}

}  // namespace

CnsResult cns_check(const CollapseModel& m, int p, int a, const std::vector<std::vector<int>>& partitions) {
    CnsResult res;
    const auto& l = m.logic();
    const Prob target = m.state(p)(a);
    for (const auto& part : partitions) {
        require_partition(l, part, a);
        Prob sum(0);
        for (int b : part) {
            const Prob rate = collapse_rate(m, p, b);
            if (rate == Prob(0)) continue;
            sum += rate * m.state(*m.collapse(p, b))(a);
        }
        const Prob dev = abs_prob(sum - target);
        if (dev > res.worst_deviation) res.worst_deviation = dev;
        ++res.partitions_checked;
    }
    res.holds = res.worst_deviation == Prob(0);
    return res;
}

SuccessiveResult successive_rate_identity(const CollapseModel& m, int p, int a, int b) {
    const auto& l = m.logic();
    const auto c = l.commutes(a, b);
    if (!c || !*c) throw LogicError(l.id(a) + " and " + l.id(b) + " do not commute");
    const auto ab = l.meet(a, b);
    if (!ab) throw LogicError(l.id(a) + " ^ " + l.id(b) + " does not exist");
    SuccessiveResult res;
    const auto& st = m.state(p);
    if (st(b) == Prob(0) || st(a) == Prob(0)) {
        res.applicable = false;
        return res;
    }
    res.rhs = collapse_rate(m, p, *ab);
    res.rhs_swapped = res.rhs;
    const int pb = *m.collapse(p, b);
    const int pa = *m.collapse(p, a);
    res.lhs = collapse_rate(m, p, b) * collapse_rate(m, pb, a);
    res.lhs_swapped = collapse_rate(m, p, a) * collapse_rate(m, pa, b);
    res.equal = res.lhs == res.rhs && res.lhs_swapped == res.rhs_swapped;
    return res;
}

GuzResult guz_property_check(const CollapseModel& m) {
    GuzResult res;
    const auto pure = m.pure_states();
    const int n = m.logic().size();
    for (int p : pure) {
        for (int q : pure) {
            for (int a = 0; a < n; ++a) {
                if (m.state(p)(a) == Prob(0) || m.state(q)(a) == Prob(0)) continue;
                const auto pa = m.collapse(p, a);
                const auto qa = m.collapse(q, a);
                if (!pa || !qa || !m.is_pure(*pa) || !m.is_pure(*qa)) continue;
                const Prob lhs = transition_prob(m, p, *pa);
                const Prob rhs = transition_prob(m, p, *qa);
                if (lhs != rhs || lhs == Prob(0)) continue;
                ++res.premises;
                if (*pa != *qa) {
                    res.holds = false;
                    res.counterexamples.push_back({p, q, a});
                }
            }
        }
    }
    return res;
}

CoveringResult covering_law_check(const OrthoPoset& l) {
    CoveringResult res;
    for (int q : l.atoms()) {
        for (int a = 0; a < l.size(); ++a) {
            const auto m = l.meet(q, a);
            if (!m || *m != l.bottom()) continue;
            ++res.pairs_checked;
            const auto j = l.join(a, q);
            if (!j) {
                res.holds = false;
                res.counterexamples.push_back({q, a, "join does not exist"});
            } else if (!l.covers(*j, a)) {
                res.holds = false;
                res.counterexamples.push_back({q, a, l.id(*j) + " does not cover " + l.id(a)});
            }
        }
    }
    return res;
}

ChainReport derivation_chain(const CollapseModel& m) {
    ChainReport rep;
    const auto& l = m.logic();
    rep.poset = validate_poset(l);
    rep.model = validate_model(m);
    const auto partitions = orthogonal_partitions(l);
    const int n = l.size();

    std::vector<std::vector<std::vector<int>>> commuting(n);
    for (int a = 0; a < n; ++a) {
        for (const auto& part : partitions) {
            bool ok = true;
            for (int b : part) {
                const auto c = l.commutes(a, b);
                if (!c) {
                    ++rep.cns_skipped_pairs;
                    ok = false;
                    break;
                }
                if (!*c) {
                    ok = false;
                    break;
                }
            }
            if (ok) commuting[a].push_back(part);
        }
    }
    for (int p = 0; p < m.state_count(); ++p) {
        for (int a = 0; a < n; ++a) {
            const auto r = cns_check(m, p, a, commuting[a]);
            rep.cns_cases += r.partitions_checked;
            rep.cns_all = rep.cns_all && r.holds;
        }
    }
    for (int p = 0; p < m.state_count(); ++p) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const auto c = l.commutes(a, b);
                if (!c || !*c || !l.meet(a, b)) continue;
                const auto s = successive_rate_identity(m, p, a, b);
                if (!s.applicable) continue;
                ++rep.successive_cases;
                rep.successive_all = rep.successive_all && s.equal;
            }
        }
    }
    rep.guz = guz_property_check(m);
    rep.covering = covering_law_check(l);
    return rep;
}

CollapseModel boolean_model(int n) {
    if (n < 1 || n > 5) throw LogicError("shipped Boolean models cover 1 <= n <= 5");
    OrthoPoset l = OrthoPoset::boolean(n);
    const int size = 1 << n;

    using Weights = std::vector<Prob>;
    std::vector<Weights> weights;
    std::map<Weights, int> index;
    auto add = [&](const Weights& w) {
        const auto it = index.find(w);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(weights.size());
        weights.push_back(w);
        index.emplace(w, id);
        return id;
    };
    for (int i = 0; i < n; ++i) {
        Weights w(n, Prob(0));
        w[i] = 1;
        add(w);
    }
    // Dyadic seeds: uniform, and 1/2, 1/4, ..., with the tail on the last atom.
    add(Weights(n, Prob(1, n)));
    Weights geometric(n, Prob(0));
    Prob rest(1);
    for (int i = 0; i < n; ++i) {
        geometric[i] = (i + 1 < n) ? rest / 2 : rest;
        rest -= geometric[i];
    }
    add(geometric);

    auto measure = [&](const Weights& w, int mask) {
        Prob s(0);
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) s += w[i];
        return s;
    };
    std::map<std::pair<int, int>, int> collapse;
    for (std::size_t s = 0; s < weights.size(); ++s) {
        for (int mask = 1; mask < size; ++mask) {
            const Weights w = weights[s];
            const Prob pb = measure(w, mask);
            if (pb == Prob(0)) continue;
            Weights cond(n, Prob(0));
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) cond[i] = w[i] / pb;
            const int target = add(cond);
            collapse[{static_cast<int>(s), mask}] = target;
        }
    }
    std::vector<StateMeasure> states;
    for (std::size_t s = 0; s < weights.size(); ++s) {
        StateMeasure st;
        st.id = s < static_cast<std::size_t>(n) ? "d" + std::to_string(s) : "m" + std::to_string(s - n);
        for (int mask = 0; mask < size; ++mask) st.values.push_back(measure(weights[s], mask));
        states.push_back(std::move(st));
    }
    std::map<int, int> indicator;
    for (int i = 0; i < n; ++i) indicator[i] = 1 << i;
    return CollapseModel(std::move(l), std::move(states), std::move(indicator), std::move(collapse));
}

CollapseModel mo_model(int n) {
    OrthoPoset l = OrthoPoset::mo(n);
    const int size = l.size();
    // Atom x_k has index 2k, x_k' has 2k+1 (k = 1..n).
    auto value = [](int k, int j) { return Prob(1 + (k + 2 * j) % 3, 4); };
    std::vector<StateMeasure> states;
    std::map<int, int> indicator;
    for (int k = 1; k <= n; ++k) {
        for (int primed = 0; primed < 2; ++primed) {
            StateMeasure st;
            st.id = "p_" + l.id(2 * k + primed);
            st.values.assign(size, Prob(0));
            st.values[1] = 1;
            for (int j = 1; j <= n; ++j) {
                Prob x = (j == k) ? Prob(1) : value(k, j);
                if (primed) x = 1 - x;
                st.values[2 * j] = x;
                st.values[2 * j + 1] = 1 - x;
            }
            indicator[static_cast<int>(states.size())] = 2 * k + primed;
            states.push_back(std::move(st));
        }
    }
    StateMeasure mixed;
    mixed.id = "uniform";
    mixed.values.assign(size, Prob(1, 2));
    mixed.values[0] = 0;
    mixed.values[1] = 1;
    states.push_back(std::move(mixed));

    std::map<int, int> by_atom;
    for (const auto& [p, atom] : indicator) by_atom[atom] = p;
    std::map<std::pair<int, int>, int> collapse;
    for (int p = 0; p < static_cast<int>(states.size()); ++p) {
        for (int a = 1; a < size; ++a) {
            if (states[p].values[a] == Prob(0)) continue;
            collapse[{p, a}] = (a == 1) ? p : by_atom.at(a);
        }
    }
    return CollapseModel(std::move(l), std::move(states), std::move(indicator), std::move(collapse));
}

CollapseModel broken_collapse_model() {
    CollapseModel base = boolean_model(2);
    // Keep only the two point masses and their table, then corrupt (d0, 1).
    std::vector<StateMeasure> states{base.state(0), base.state(1)};
    std::map<std::pair<int, int>, int> collapse;
    for (const auto& [key, target] : base.collapse_table()) {
        if (key.first < 2) collapse[key] = target;
    }
    collapse[{0, base.logic().top()}] = 1;
    return CollapseModel(base.logic(), std::move(states), base.indicator_map(), std::move(collapse));
}

namespace hilbert {

ComplexMatrix projector(const ComplexMatrix& columns) {
    const int r = numerical_rank(columns);
    if (r == 0) return ComplexMatrix::Zero(columns.rows(), columns.rows());
    Eigen::JacobiSVD<ComplexMatrix> svd(columns, Eigen::ComputeThinU);
    const ComplexMatrix u = svd.matrixU().leftCols(r);
    return u * u.adjoint();
}

bool commute(const ComplexMatrix& p, const ComplexMatrix& q, double tol) {
    return max_abs(p * q - q * p) <= tol;
}

std::optional<PureState> lueders(const PureState& psi, const ComplexMatrix& p) {
    const ComplexVector v = p * psi.amplitudes();
    if (v.squaredNorm() <= 1e-24) return std::nullopt;
    return PureState::normalized(v);
}

double transition_prob(const PureState& p, const PureState& q) { return std::norm(p.inner(q)); }

double probability(const PureState& psi, const ComplexMatrix& p) { return (p * psi.amplitudes()).squaredNorm(); }

namespace {

double expectation(const PureState& psi, const ComplexMatrix& a) {
    return psi.amplitudes().dot(a * psi.amplitudes()).real();
}

void require_projector(const ComplexMatrix& p) {
    if (max_abs(p * p - p) > 1e-9 || !is_hermitian(p, 1e-9)) throw LogicError("operator is not an orthogonal projector");
}

}  // namespace

double cns_deviation(const PureState& psi, const ComplexMatrix& a, const std::vector<ComplexMatrix>& partition) {
    if (partition.empty()) throw LogicError("empty partition");
    require_projector(a);
    const int d = psi.dim();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < partition.size(); ++i) {
        require_projector(partition[i]);
        for (std::size_t j = i + 1; j < partition.size(); ++j)
            if (max_abs(partition[i] * partition[j]) > 1e-9) throw LogicError("partition is not orthogonal");
        if (!commute(a, partition[i], 1e-9)) throw LogicError("partition does not commute with the proposition");
        sum += partition[i];
    }
    if (max_abs(sum - ComplexMatrix::Identity(d, d)) > 1e-9) throw LogicError("partition does not sum to the identity");

    double total = 0.0;
    for (const auto& b : partition) {
        const auto collapsed = lueders(psi, b);
        if (!collapsed) continue;
        total += probability(psi, b) * expectation(*collapsed, a);
    }
    return std::abs(total - expectation(psi, a));
}

double Successive::deviation() const {
    if (!applicable) return 0.0;
    return std::max(std::abs(lhs - rhs), std::abs(lhs_swapped - rhs_swapped));
}

Successive successive_rate_identity(const PureState& psi, const ComplexMatrix& a, const ComplexMatrix& b) {
    require_projector(a);
    require_projector(b);
    if (!commute(a, b, 1e-9)) throw LogicError("propositions do not commute");
    Successive s;
    const auto pb = lueders(psi, b);
    const auto pa = lueders(psi, a);
    if (!pa || !pb) {
        s.applicable = false;
        return s;
    }
    const ComplexMatrix meet = a * b;
    s.rhs = probability(psi, meet);
    s.rhs_swapped = s.rhs;
    s.lhs = probability(psi, b) * probability(*pb, a);
    s.lhs_swapped = probability(psi, a) * probability(*pa, b);
    return s;
}

double collapse_condition_defect(const PureState& psi, const ComplexMatrix& p) {
    const auto collapsed = lueders(psi, p);
    if (!collapsed) return 0.0;
    // s(psi_P) <= P: the collapsed ray lies in the range of P.
    double defect = (p * collapsed->amplitudes() - collapsed->amplitudes()).norm();
    const double prob = probability(psi, p);
    if (std::abs(prob - 1.0) <= 1e-12) defect = std::max(defect, 1.0 - transition_prob(psi, *collapsed));
    return defect;
}

ProbeSet make_probes(int dim, int states, int frames, std::uint64_t seed) {
    ProbeSet set;
    set.dim = dim;
    Rng rng(child_seed(seed, 0));
    for (int i = 0; i < states; ++i) set.states.push_back(random_state(dim, rng));
    for (int f = 0; f < frames; ++f) set.frames.push_back(random_unitary(dim, child_seed(seed, f + 1)));
    return set;
}

namespace {

ComplexMatrix subset_projector(const ComplexMatrix& frame, unsigned mask) {
    const int d = static_cast<int>(frame.rows());
    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < frame.cols(); ++i)
        if (mask & (1u << i)) p += frame.col(i) * frame.col(i).adjoint();
    return p;
}

}  // namespace

std::vector<std::vector<ComplexMatrix>> frame_partitions(const ComplexMatrix& frame) {
    const int d = static_cast<int>(frame.cols());
    if (d > 8) throw DimensionError("frame partitions are enumerated for dim <= 8");
    // Restricted growth strings enumerate the set partitions of {0..d-1}.
    std::vector<std::vector<ComplexMatrix>> out;
    std::vector<int> label(d, 0);
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == d) {
            std::vector<unsigned> masks(blocks, 0u);
            for (int k = 0; k < d; ++k) masks[label[k]] |= 1u << k;
            std::vector<ComplexMatrix> part;
            for (unsigned m : masks) part.push_back(subset_projector(frame, m));
            out.push_back(std::move(part));
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            label[i] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

std::vector<ComplexMatrix> frame_propositions(const ComplexMatrix& frame) {
    const int d = static_cast<int>(frame.cols());
    if (d > 16) throw DimensionError("frame propositions are enumerated for dim <= 16");
    std::vector<ComplexMatrix> out;
    for (unsigned m = 1; m < (1u << d); ++m) out.push_back(subset_projector(frame, m));
    return out;
}

HilbertCheck cns_check(const ProbeSet& probes, double tol) {
    HilbertCheck res;
    for (const auto& frame : probes.frames) {
        const auto partitions = frame_partitions(frame);
        const auto props = frame_propositions(frame);
        for (const auto& psi : probes.states) {
            for (const auto& a : props) {
                for (const auto& part : partitions) {
                    const double dev = cns_deviation(psi, a, part);
                    res.worst = std::max(res.worst, dev);
                    ++res.cases;
                }
            }
        }
    }
    res.holds = res.worst <= tol;
    return res;
}

HilbertCheck successive_check(const ProbeSet& probes, double tol) {
    HilbertCheck res;
    for (const auto& frame : probes.frames) {
        const auto props = frame_propositions(frame);
        for (const auto& psi : probes.states) {
            for (const auto& a : props) {
                for (const auto& b : props) {
                    const auto s = successive_rate_identity(psi, a, b);
                    if (!s.applicable) continue;
                    res.worst = std::max(res.worst, s.deviation());
                    ++res.cases;
                }
            }
        }
    }
    res.holds = res.worst <= tol;
    return res;
}

GuzProbeResult guz_check(int dim, int count, std::uint64_t seed, double tol) {
    if (dim < 2) throw DimensionError("Guz probes need dim >= 2");
    GuzProbeResult res;
    for (int i = 0; i < count; ++i) {
        Rng rng(child_seed(seed, i));
        const ComplexMatrix frame = random_unitary(dim, child_seed(seed ^ 0x6a09e667f3bcc909ULL, i));
        const int rank = 1 + static_cast<int>(rng.below(dim - 1));
        const ComplexMatrix a = subset_projector(frame, (1u << rank) - 1);
        const PureState p = random_state(dim, rng);
        PureState q = random_state(dim, rng);
        if (i % 2 == 0) {
            // Same A-component direction as p, arbitrary complement part.
            const ComplexVector ap = a * p.amplitudes();
            const ComplexVector rest = (ComplexMatrix::Identity(dim, dim) - a) * q.amplitudes();
            const Complex c = rng.complex_normal();
            q = PureState::normalized(c * ap + rest);
        }
        ++res.probes;
        const auto pa = lueders(p, a);
        const auto qa = lueders(q, a);
        if (!pa || !qa) continue;
        const double lhs = transition_prob(p, *pa);
        const double rhs = transition_prob(p, *qa);
        if (lhs <= tol || std::abs(lhs - rhs) > 1e-9) continue;
        ++res.premises;
        res.worst = std::max(res.worst, 1.0 - transition_prob(*pa, *qa));
    }
    res.holds = res.worst <= 1e-9;
    return res;
}

CoveringProbeResult covering_check(int dim, int subspaces, int rays, std::uint64_t seed) {
    if (dim < 2) throw DimensionError("covering probes need dim >= 2");
    CoveringProbeResult res;
    for (int s = 0; s < subspaces; ++s) {
        Rng rng(child_seed(seed, s));
        const int k = 1 + static_cast<int>(rng.below(dim - 1));
        const ComplexMatrix span = random_matrix(dim, k, rng);
        const ComplexMatrix a = projector(span);
        const int dim_a = numerical_rank(a);
        for (int r = 0; r < rays; ++r) {
            const PureState q = random_state(dim, rng);
            if (((ComplexMatrix::Identity(dim, dim) - a) * q.amplitudes()).norm() <= 1e-9) continue;
            ComplexMatrix joined(dim, k + 1);
            joined << span, q.amplitudes();
            const int gap = std::abs(numerical_rank(joined) - dim_a - 1);
            res.worst_gap = std::max(res.worst_gap, gap);
            ++res.pairs;
        }
    }
    res.holds = res.worst_gap == 0;
    return res;
}

}  // namespace hilbert

}  // namespace nosig::logic
