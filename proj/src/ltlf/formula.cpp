#include <optional>
#include <stdexcept>

#include "vsearch/errors.hpp"
#include "vsearch/ltlf.hpp"

namespace vsearch::ltlf {

Proposition::Proposition(std::string name) : name_(std::move(name)) {
    if (!is_valid_name(name_)) {
        throw InputError("invalid proposition name '" + name_ +
                         "' (expected lowercase letters, digits and underscores)");
    }
}

bool Proposition::is_valid_name(std::string_view name) noexcept {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return name != "true" && name != "false";
}

PropSet make_props(std::initializer_list<const char*> names) {
    PropSet out;
    for (const char* n : names) out.emplace(n);
    return out;
}

bool is_unary(Kind k) noexcept {
    return k == Kind::Not || k == Kind::Next || k == Kind::Always || k == Kind::Eventually;
}

bool is_binary(Kind k) noexcept {
    switch (k) {
        case Kind::And:
        case Kind::Or:
        case Kind::Xor:
        case Kind::Implies:
        case Kind::Iff:
        case Kind::Until:
            return true;
        default:
            return false;
    }
}

namespace {

const char* op_token(Kind k) {
    switch (k) {
        case Kind::Not: return "!";
        case Kind::Next: return "X";
        case Kind::Always: return "G";
        case Kind::Eventually: return "F";
        case Kind::And: return "&";
        case Kind::Or: return "|";
        case Kind::Xor: return "^";
        case Kind::Implies: return "->";
        case Kind::Iff: return "<->";
        case Kind::Until: return "U";
        default: return "?";
    }
}

}  // namespace

struct Formula::Node {
    Kind kind;
    std::optional<Proposition> prop;
    std::optional<Formula> a;
    std::optional<Formula> b;
    std::string text;
    std::size_t size = 1;
};

Formula Formula::truth() {
    static const Formula t(std::make_shared<const Node>(Node{Kind::True, {}, {}, {}, "true", 1}));
    return t;
}

Formula Formula::falsity() {
    static const Formula f(std::make_shared<const Node>(Node{Kind::False, {}, {}, {}, "false", 1}));
    return f;
}

Formula Formula::atom(Proposition p) {
    std::string text = p.name();
    return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(p), {}, {}, std::move(text), 1}));
}

Formula Formula::unary(Kind k, Formula child) {
    if (!is_unary(k)) throw std::invalid_argument("Formula::unary: not a unary operator");
    std::string text = std::string("(") + op_token(k) + " " + child.text() + ")";
    std::size_t size = child.size() + 1;
    return Formula(std::make_shared<const Node>(Node{k, {}, std::move(child), {}, std::move(text), size}));
}

Formula Formula::binary(Kind k, Formula lhs, Formula rhs) {
    if (!is_binary(k)) throw std::invalid_argument("Formula::binary: not a binary operator");
    std::string text = "(" + lhs.text() + " " + op_token(k) + " " + rhs.text() + ")";
    std::size_t size = lhs.size() + rhs.size() + 1;
    return Formula(
        std::make_shared<const Node>(Node{k, {}, std::move(lhs), std::move(rhs), std::move(text), size}));
}

Kind Formula::kind() const noexcept { return node_->kind; }

const Proposition& Formula::proposition() const {
    if (!node_->prop) throw std::logic_error("Formula::proposition on non-atom");
    return *node_->prop;
}

const Formula& Formula::child() const {
    if (!is_unary(node_->kind)) throw std::logic_error("Formula::child on non-unary node");
    return *node_->a;
}

const Formula& Formula::lhs() const {
    if (!is_binary(node_->kind)) throw std::logic_error("Formula::lhs on non-binary node");
    return *node_->a;
}

const Formula& Formula::rhs() const {
    if (!is_binary(node_->kind)) throw std::logic_error("Formula::rhs on non-binary node");
    return *node_->b;
}

const std::string& Formula::text() const noexcept { return node_->text; }

std::size_t Formula::size() const noexcept { return node_->size; }

bool operator==(const Formula& a, const Formula& b) noexcept {
    return a.node_ == b.node_ || a.text() == b.text();
}

std::string format_formula(const Formula& f) { return f.text(); }

namespace {

void collect_atoms(const Formula& f, PropSet& out) {
    if (f.kind() == Kind::Atom) {
        out.insert(f.proposition());
    } else if (is_unary(f.kind())) {
        collect_atoms(f.child(), out);
    } else if (is_binary(f.kind())) {
        collect_atoms(f.lhs(), out);
        collect_atoms(f.rhs(), out);
    }
}

}  // namespace

PropSet extract_propositions(const Formula& f) {
    PropSet out;
    collect_atoms(f, out);
    return out;
}

}  // namespace vsearch::ltlf
