#include <cctype>
#include <string>
#include <vector>

#include "vsearch/errors.hpp"
#include "vsearch/ltlf.hpp"

namespace vsearch::ltlf {

namespace {

enum class Tok {
    Ident,
    True,
    False,
    Not,
    Always,
    Eventually,
    Next,
    WeakNext,
    Until,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

bool is_ident_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_ident_char(c)) {
            while (i < s.size() && is_ident_char(s[i])) ++i;
            std::string word(s.substr(start, i - start));
            Tok k = word == "true" ? Tok::True : word == "false" ? Tok::False : Tok::Ident;
            out.push_back({k, std::move(word), start});
            continue;
        }
        if (c >= 'A' && c <= 'Z') {
            while (i < s.size() && s[i] >= 'A' && s[i] <= 'Z') ++i;
            std::string word(s.substr(start, i - start));
            if (word == "WX") {
                out.push_back({Tok::WeakNext, std::move(word), start});
                continue;
            }
            if (word == "U") {
                out.push_back({Tok::Until, std::move(word), start});
                continue;
            }
            // Runs of prefix operators such as "GF" are read letter by letter.
            for (std::size_t j = 0; j < word.size(); ++j) {
                Tok k;
                switch (word[j]) {
                    case 'G': k = Tok::Always; break;
                    case 'F': k = Tok::Eventually; break;
                    case 'X': k = Tok::Next; break;
                    default: throw ParseError("unknown operator '" + word + "'", start);
                }
                out.push_back({k, std::string(1, word[j]), start + j});
            }
            continue;
        }
        auto rest = s.substr(i);
        if (rest.starts_with("<->")) {
            out.push_back({Tok::Iff, "<->", start});
            i += 3;
        } else if (rest.starts_with("->")) {
            out.push_back({Tok::Implies, "->", start});
            i += 2;
        } else {
            Tok k;
            switch (c) {
                case '!': k = Tok::Not; break;
                case '&': k = Tok::And; break;
                case '|': k = Tok::Or; break;
                case '^': k = Tok::Xor; break;
                case '(': k = Tok::LParen; break;
                case ')': k = Tok::RParen; break;
                default: throw ParseError(std::string("unexpected character '") + c + "'", start);
            }
            out.push_back({k, std::string(1, c), start});
            ++i;
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const PropSet& props) : toks_(std::move(toks)), props_(props) {}

    Formula parse() {
        Formula f = iff();
        if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    Formula iff() {
        Formula lhs = implies();
        while (accept(Tok::Iff)) lhs = Iff(lhs, implies());
        return lhs;
    }

    Formula implies() {
        Formula lhs = disjunction();
        if (accept(Tok::Implies)) return Implies(lhs, implies());
        return lhs;
    }

    Formula disjunction() {
        Formula lhs = exclusive();
        while (accept(Tok::Or)) lhs = Or(lhs, exclusive());
        return lhs;
    }

    Formula exclusive() {
        Formula lhs = conjunction();
        while (accept(Tok::Xor)) lhs = Xor(lhs, conjunction());
        return lhs;
    }

    Formula conjunction() {
        Formula lhs = until();
        while (accept(Tok::And)) lhs = And(lhs, until());
        return lhs;
    }

    Formula until() {
        Formula lhs = unary();
        if (accept(Tok::Until)) return Until(lhs, until());
        return lhs;
    }

    Formula unary() {
        switch (peek().kind) {
            case Tok::Not: ++pos_; return Not(unary());
            case Tok::Always: ++pos_; return Always(unary());
            case Tok::Eventually: ++pos_; return Eventually(unary());
            case Tok::Next: ++pos_; return Next(unary());
            case Tok::WeakNext: ++pos_; return WeakNext(unary());
            default: return primary();
        }
    }

    Formula primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::True: ++pos_; return Formula::truth();
            case Tok::False: ++pos_; return Formula::falsity();
            case Tok::Ident: {
                Proposition p(t.text);
                if (!props_.contains(p)) throw UndeclaredAtomError(t.text);
                ++pos_;
                return Formula::atom(std::move(p));
            }
            case Tok::LParen: {
                ++pos_;
                Formula inner = iff();
                if (!accept(Tok::RParen)) throw ParseError("expected ')'", peek().pos);
                return inner;
            }
            case Tok::End: throw ParseError("unexpected end of formula", t.pos);
            default: throw ParseError("unexpected '" + t.text + "'", t.pos);
        }
    }

    std::vector<Token> toks_;
    const PropSet& props_;
    std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, const PropSet& props) {
    return Parser(tokenize(text), props).parse();
}

}  // namespace vsearch::ltlf
