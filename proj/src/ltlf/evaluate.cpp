#include <vector>

#include "vsearch/errors.hpp"
#include "vsearch/ltlf.hpp"

namespace vsearch::ltlf {

namespace {

// Truth value of `f` at every position of `t`, computed right to left.
std::vector<bool> satisfaction(const Formula& f, const Trace& t) {
    const std::size_t n = t.size();
    std::vector<bool> out(n, false);
    switch (f.kind()) {
        case Kind::True:
            out.assign(n, true);
            break;
        case Kind::False:
            break;
        case Kind::Atom:
            for (std::size_t i = 0; i < n; ++i) out[i] = t[i].contains(f.proposition());
            break;
        case Kind::Not: {
            auto c = satisfaction(f.child(), t);
            for (std::size_t i = 0; i < n; ++i) out[i] = !c[i];
            break;
        }
        case Kind::Next: {
            auto c = satisfaction(f.child(), t);
            for (std::size_t i = 0; i + 1 < n; ++i) out[i] = c[i + 1];
            break;
        }
        case Kind::Always: {
            auto c = satisfaction(f.child(), t);
            bool rest = true;
            for (std::size_t i = n; i-- > 0;) out[i] = rest = c[i] && rest;
            break;
        }
        case Kind::Eventually: {
            auto c = satisfaction(f.child(), t);
            bool rest = false;
            for (std::size_t i = n; i-- > 0;) out[i] = rest = c[i] || rest;
            break;
        }
        case Kind::Until: {
            auto a = satisfaction(f.lhs(), t);
            auto b = satisfaction(f.rhs(), t);
            bool rest = false;
            for (std::size_t i = n; i-- > 0;) out[i] = rest = b[i] || (a[i] && rest);
            break;
        }
        default: {
            auto a = satisfaction(f.lhs(), t);
            auto b = satisfaction(f.rhs(), t);
            for (std::size_t i = 0; i < n; ++i) {
                switch (f.kind()) {
                    case Kind::And: out[i] = a[i] && b[i]; break;
                    case Kind::Or: out[i] = a[i] || b[i]; break;
                    case Kind::Xor: out[i] = a[i] != b[i]; break;
                    case Kind::Implies: out[i] = !a[i] || b[i]; break;
                    case Kind::Iff: out[i] = a[i] == b[i]; break;
                    default: break;
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace

bool evaluate_trace(const Formula& f, const Trace& t) {
    if (t.empty()) throw EmptyTraceError();
    return satisfaction(f, t).front();
}

}  // namespace vsearch::ltlf
