#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vsearch::ltlf {

// Atomic proposition name: non-empty, [a-z0-9_] only.
class Proposition {
public:
    explicit Proposition(std::string name);

    const std::string& name() const noexcept { return name_; }

    friend bool operator==(const Proposition&, const Proposition&) = default;
    friend auto operator<=>(const Proposition&, const Proposition&) = default;

    static bool is_valid_name(std::string_view name) noexcept;

private:
    std::string name_;
};

using PropSet = std::set<Proposition>;

PropSet make_props(std::initializer_list<const char*> names);

enum class Kind {
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    Next,
    Always,
    Eventually,
    Until,
};

bool is_unary(Kind k) noexcept;
bool is_binary(Kind k) noexcept;

// Immutable LTL_f syntax tree. Copies share structure; equality is structural.
class Formula {
public:
    static Formula truth();
    static Formula falsity();
    static Formula atom(Proposition p);
    static Formula atom(std::string name) { return atom(Proposition(std::move(name))); }
    static Formula unary(Kind k, Formula child);
    static Formula binary(Kind k, Formula lhs, Formula rhs);

    Kind kind() const noexcept;
    const Proposition& proposition() const;  // Atom only
    const Formula& child() const;            // unary only
    const Formula& lhs() const;              // binary only
    const Formula& rhs() const;              // binary only

    // Fully parenthesized canonical text; also serves as a structural key.
    const std::string& text() const noexcept;
    std::size_t size() const noexcept;

    friend bool operator==(const Formula& a, const Formula& b) noexcept;
    friend bool operator<(const Formula& a, const Formula& b) noexcept { return a.text() < b.text(); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Builders, for tests and callers assembling formulas programmatically.
inline Formula Not(Formula f) { return Formula::unary(Kind::Not, std::move(f)); }
inline Formula Next(Formula f) { return Formula::unary(Kind::Next, std::move(f)); }
inline Formula Always(Formula f) { return Formula::unary(Kind::Always, std::move(f)); }
inline Formula Eventually(Formula f) { return Formula::unary(Kind::Eventually, std::move(f)); }
inline Formula And(Formula a, Formula b) { return Formula::binary(Kind::And, std::move(a), std::move(b)); }
inline Formula Or(Formula a, Formula b) { return Formula::binary(Kind::Or, std::move(a), std::move(b)); }
inline Formula Xor(Formula a, Formula b) { return Formula::binary(Kind::Xor, std::move(a), std::move(b)); }
inline Formula Implies(Formula a, Formula b) { return Formula::binary(Kind::Implies, std::move(a), std::move(b)); }
inline Formula Iff(Formula a, Formula b) { return Formula::binary(Kind::Iff, std::move(a), std::move(b)); }
inline Formula Until(Formula a, Formula b) { return Formula::binary(Kind::Until, std::move(a), std::move(b)); }
inline Formula Atom(const char* name) { return Formula::atom(std::string(name)); }

// Weak next: holds at the last step. Encoded as !X!f.
inline Formula WeakNext(Formula f) { return Not(Next(Not(std::move(f)))); }

/// Parses formula text.
///
/// Tokens: `G F X WX U ! & | ^ -> <->`, `true`, `false`, identifiers, parentheses.
/// Precedence, tightest first: unary, U (right), &, ^, |, -> (right), <->.
/// Throws ParseError on bad syntax and UndeclaredAtomError for atoms not in `props`.
Formula parse_formula(std::string_view text, const PropSet& props);

std::string format_formula(const Formula& f);

PropSet extract_propositions(const Formula& f);

using Step = std::set<Proposition>;
using Trace = std::vector<Step>;

// LTL_f satisfaction at position 0; X is strong. Throws EmptyTraceError on an empty trace.
bool evaluate_trace(const Formula& f, const Trace& t);

// Residual obligation after consuming `step`. With is_last, every X obligation resolves to
// false and the result is a constant. Results are simplified (constant folding, double
// negation, flattened idempotent & and |).
Formula progress(const Formula& f, const Step& step, bool is_last);

// Constant folding and normalization used by progress; exposed for tests.
Formula simplify(const Formula& f);

// Equivalent canonical form: disjunctive normal form whose literals are atoms and temporal
// subformulas. Keeps the progression closure finite when residuals nest.
Formula normalize(const Formula& f);

}  // namespace vsearch::ltlf
