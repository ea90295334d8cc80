#include <algorithm>
#include <vector>

#include "vsearch/ltlf.hpp"

namespace vsearch::ltlf {

namespace {

bool is_const(const Formula& f) { return f.kind() == Kind::True || f.kind() == Kind::False; }

Formula constant(bool v) { return v ? Formula::truth() : Formula::falsity(); }

Formula mk_not(const Formula& a) {
    switch (a.kind()) {
        case Kind::True: return Formula::falsity();
        case Kind::False: return Formula::truth();
        case Kind::Not: return a.child();
        default: return Not(a);
    }
}

void flatten(const Formula& f, Kind k, std::vector<Formula>& out) {
    if (f.kind() == k) {
        flatten(f.lhs(), k, out);
        flatten(f.rhs(), k, out);
    } else {
        out.push_back(f);
    }
}

// Flattened, sorted, duplicate-free chain of & or |. The absorbing constant wins, the
// neutral one is dropped, and a pair x, !x collapses to the absorbing constant.
Formula mk_assoc(Kind k, const Formula& a, const Formula& b) {
    const Kind absorbing = k == Kind::And ? Kind::False : Kind::True;
    const Kind neutral = k == Kind::And ? Kind::True : Kind::False;
    std::vector<Formula> ops;
    flatten(a, k, ops);
    flatten(b, k, ops);
    std::vector<Formula> kept;
    kept.reserve(ops.size());
    for (auto& op : ops) {
        if (op.kind() == absorbing) return op;
        if (op.kind() != neutral) kept.push_back(op);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (const auto& op : kept) {
        if (op.kind() == Kind::Not && std::binary_search(kept.begin(), kept.end(), op.child())) {
            return constant(absorbing == Kind::True);
        }
    }
    if (kept.empty()) return constant(neutral == Kind::True);
    Formula acc = kept.front();
    for (std::size_t i = 1; i < kept.size(); ++i) acc = Formula::binary(k, acc, kept[i]);
    return acc;
}

Formula mk_and(const Formula& a, const Formula& b) { return mk_assoc(Kind::And, a, b); }
Formula mk_or(const Formula& a, const Formula& b) { return mk_assoc(Kind::Or, a, b); }

Formula mk_xor(const Formula& a, const Formula& b) {
    if (a.kind() == Kind::False) return b;
    if (b.kind() == Kind::False) return a;
    if (a.kind() == Kind::True) return mk_not(b);
    if (b.kind() == Kind::True) return mk_not(a);
    if (a == b) return Formula::falsity();
    return b < a ? Xor(b, a) : Xor(a, b);
}

Formula mk_iff(const Formula& a, const Formula& b) {
    if (a.kind() == Kind::True) return b;
    if (b.kind() == Kind::True) return a;
    if (a.kind() == Kind::False) return mk_not(b);
    if (b.kind() == Kind::False) return mk_not(a);
    if (a == b) return Formula::truth();
    return b < a ? Iff(b, a) : Iff(a, b);
}

Formula mk_implies(const Formula& a, const Formula& b) {
    if (a.kind() == Kind::True) return b;
    if (a.kind() == Kind::False || b.kind() == Kind::True) return Formula::truth();
    if (b.kind() == Kind::False) return mk_not(a);
    if (a == b) return Formula::truth();
    return Implies(a, b);
}

Formula mk_binary(Kind k, const Formula& a, const Formula& b) {
    switch (k) {
        case Kind::And: return mk_and(a, b);
        case Kind::Or: return mk_or(a, b);
        case Kind::Xor: return mk_xor(a, b);
        case Kind::Iff: return mk_iff(a, b);
        case Kind::Implies: return mk_implies(a, b);
        default: return Formula::binary(k, a, b);
    }
}

// Progression of an already simplified formula.
Formula step(const Formula& f, const Step& s, bool last) {
    switch (f.kind()) {
        case Kind::True:
        case Kind::False:
            return f;
        case Kind::Atom:
            return constant(s.contains(f.proposition()));
        case Kind::Not:
            return mk_not(step(f.child(), s, last));
        case Kind::Next:
            return last ? Formula::falsity() : f.child();
        case Kind::Always: {
            Formula now = step(f.child(), s, last);
            return last ? now : mk_and(now, f);
        }
        case Kind::Eventually: {
            Formula now = step(f.child(), s, last);
            return last ? now : mk_or(now, f);
        }
        case Kind::Until: {
            Formula goal = step(f.rhs(), s, last);
            if (last) return goal;
            return mk_or(goal, mk_and(step(f.lhs(), s, last), f));
        }
        default:
            return mk_binary(f.kind(), step(f.lhs(), s, last), step(f.rhs(), s, last));
    }
}

}  // namespace

// Rewrites that hold on every non-empty suffix; residuals are never checked on an empty one.
Formula simplify(const Formula& f) {
    switch (f.kind()) {
        case Kind::True:
        case Kind::False:
        case Kind::Atom:
            return f;
        case Kind::Not:
            return mk_not(simplify(f.child()));
        case Kind::Next: {
            Formula c = simplify(f.child());
            return c.kind() == Kind::False ? c : Next(c);
        }
        case Kind::Always: {
            Formula c = simplify(f.child());
            return is_const(c) ? c : Always(c);
        }
        case Kind::Eventually: {
            Formula c = simplify(f.child());
            return is_const(c) ? c : Eventually(c);
        }
        case Kind::Until: {
            Formula a = simplify(f.lhs());
            Formula b = simplify(f.rhs());
            if (is_const(b)) return b;
            if (a.kind() == Kind::False) return b;
            if (a.kind() == Kind::True) return Eventually(b);
            return Until(a, b);
        }
        default:
            return mk_binary(f.kind(), simplify(f.lhs()), simplify(f.rhs()));
    }
}

Formula progress(const Formula& f, const Step& s, bool is_last) { return step(simplify(f), s, is_last); }

namespace {

// DNF over literals whose atoms are the non-boolean nodes (atoms and temporal operators).
struct Literal {
    Formula leaf;
    bool negated;
    bool operator<(const Literal& o) const {
        return leaf.text() != o.leaf.text() ? leaf.text() < o.leaf.text() : negated < o.negated;
    }
    bool operator==(const Literal& o) const { return negated == o.negated && leaf.text() == o.leaf.text(); }
};
using Term = std::vector<Literal>;  // sorted, conjunction
using Dnf = std::vector<Term>;      // disjunction

bool contradictory(const Term& t) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i].leaf.text() == t[i - 1].leaf.text()) return true;
    }
    return false;
}

bool subset_of(const Term& small, const Term& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

Dnf tidy(Dnf d) {
    for (auto& t : d) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    std::erase_if(d, contradictory);
    std::sort(d.begin(), d.end(), [](const Term& a, const Term& b) {
        return a.size() != b.size() ? a.size() < b.size() : std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    d.erase(std::unique(d.begin(), d.end()), d.end());
    Dnf kept;
    for (auto& t : d) {
        bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Term& k) { return subset_of(k, t); });
        if (!absorbed) kept.push_back(std::move(t));
    }
    return kept;
}

Dnf disjoin(Dnf a, const Dnf& b) {
    a.insert(a.end(), b.begin(), b.end());
    return tidy(std::move(a));
}

Dnf conjoin(const Dnf& a, const Dnf& b) {
    Dnf out;
    for (const auto& x : a) {
        for (const auto& y : b) {
            Term t = x;
            t.insert(t.end(), y.begin(), y.end());
            out.push_back(std::move(t));
        }
    }
    return tidy(std::move(out));
}

Dnf to_dnf(const Formula& f, bool positive) {
    switch (f.kind()) {
        case Kind::True: return positive ? Dnf{Term{}} : Dnf{};
        case Kind::False: return positive ? Dnf{} : Dnf{Term{}};
        case Kind::Not: return to_dnf(f.child(), !positive);
        case Kind::And:
            return positive ? conjoin(to_dnf(f.lhs(), true), to_dnf(f.rhs(), true))
                            : disjoin(to_dnf(f.lhs(), false), to_dnf(f.rhs(), false));
        case Kind::Or:
            return positive ? disjoin(to_dnf(f.lhs(), true), to_dnf(f.rhs(), true))
                            : conjoin(to_dnf(f.lhs(), false), to_dnf(f.rhs(), false));
        case Kind::Implies:
            return positive ? disjoin(to_dnf(f.lhs(), false), to_dnf(f.rhs(), true))
                            : conjoin(to_dnf(f.lhs(), true), to_dnf(f.rhs(), false));
        case Kind::Xor:
        case Kind::Iff: {
            bool differ = (f.kind() == Kind::Xor) == positive;
            auto a = to_dnf(f.lhs(), true), na = to_dnf(f.lhs(), false);
            auto b = to_dnf(f.rhs(), true), nb = to_dnf(f.rhs(), false);
            return differ ? disjoin(conjoin(a, nb), conjoin(na, b)) : disjoin(conjoin(a, b), conjoin(na, nb));
        }
        default:
            return Dnf{Term{Literal{f, !positive}}};
    }
}

}  // namespace

Formula normalize(const Formula& f) {
    Dnf d = to_dnf(simplify(f), true);
    Formula out = Formula::falsity();
    for (const auto& term : d) {
        Formula conj = Formula::truth();
        for (const auto& lit : term) conj = mk_and(conj, lit.negated ? Not(lit.leaf) : lit.leaf);
        out = mk_or(out, conj);
    }
    return out;
}

}  // namespace vsearch::ltlf
