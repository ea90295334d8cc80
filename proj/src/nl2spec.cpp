#include "vsearch/nl2spec.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <regex>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json_util.hpp"

namespace vsearch::nl2spec {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_operator(const std::string& word) { return word == "G" || word == "F" || word == "X" || word == "U" || word == "WX"; }

}  // namespace

RuleSet::RuleSet(std::vector<std::string> rules) : rules_(std::move(rules)) {
    if (rules_.empty()) throw InputError("rule set is empty");
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (trim(rules_[i]).empty()) throw InputError("rule " + std::to_string(i + 1) + " is blank");
    }
}

RuleSet rules_from_text(const std::string& text) {
    std::vector<std::string> rules;
    for (const auto& line : lines_of(text)) {
        auto t = trim(line);
        if (!t.empty()) rules.push_back(t);
    }
    return RuleSet(std::move(rules));
}

RuleSet load_rules(const std::string& path) { return rules_from_text(detail::read_file(path)); }

FixtureBackend::FixtureBackend(std::map<std::string, std::string> completions) : completions_(std::move(completions)) {}

FixtureBackend FixtureBackend::load(const std::string& path) {
    using namespace detail;
    json j = parse_json(read_file(path));
    if (!j.is_object()) throw FormatError("fixture must map prompt hashes to completions", "/");
    std::map<std::string, std::string> m;
    for (const auto& [key, value] : j.items()) m.emplace(key, get_string(value, "/" + key));
    return FixtureBackend(std::move(m));
}

std::string FixtureBackend::complete(const std::string& prompt) {
    auto h = prompt_hash(prompt);
    auto it = completions_.find(h);
    if (it == completions_.end()) throw TransportError("fixture has no completion for prompt " + h);
    return it->second;
}

HttpBackend::HttpBackend(std::string url, std::string token, int timeout_s) : token_(std::move(token)), timeout_s_(timeout_s) {
    static const std::regex re(R"(^(http://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw InputError("unsupported backend URL '" + url + "' (expected http://host[:port]/path)");
    origin_ = m[1];
    path_ = m[2].matched ? std::string(m[2]) : "/";
    if (token_.empty()) {
        if (const char* env = std::getenv("VSEARCH_NL_TOKEN")) token_ = env;
    }
}

std::string HttpBackend::complete(const std::string& prompt) {
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_s_);
    client.set_read_timeout(timeout_s_);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    const std::string body = detail::json{{"prompt", prompt}}.dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) throw TransportError("request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError("backend answered HTTP " + std::to_string(res->status));
    try {
        auto j = detail::json::parse(res->body);
        return j.at("completion").get<std::string>();
    } catch (const detail::json::exception&) {
        throw TransportError("backend response lacks a string 'completion' field");
    }
}

std::unique_ptr<NlBackend> make_backend(const std::string& spec) {
    if (spec.starts_with("fixture:")) return std::make_unique<FixtureBackend>(FixtureBackend::load(spec.substr(8)));
    if (spec.starts_with("http:")) return std::make_unique<HttpBackend>(spec.substr(5));
    throw InputError("backend must be fixture:PATH or http:URL, got '" + spec + "'");
}

std::string prompt_hash(const std::string& prompt) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : prompt) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string numbered(const RuleSet& rules) {
    std::string out;
    for (std::size_t i = 0; i < rules.rules().size(); ++i) out += "\n" + std::to_string(i + 1) + ". " + trim(rules.rules()[i]);
    return out;
}

}  // namespace

std::string noun_phrase_prompt(const RuleSet& rules) { return "Extract noun phrases from the following rules:" + numbered(rules); }

std::string formula_prompt(const RuleSet& rules, const std::vector<std::string>& phrases) {
    std::string list;
    for (std::size_t i = 0; i < phrases.size(); ++i) list += (i ? ", " : "") + phrases[i];
    return "Define the following rules in temporal logic with atomic propositions " + list + ":" + numbered(rules);
}

std::vector<std::string> parse_numbered_list(const std::string& completion) {
    static const std::regex item(R"(^\s*(\d+)\s*[.)]\s*(.*?)\s*$)");
    std::vector<std::string> out;
    for (const auto& line : lines_of(completion)) {
        if (trim(line).empty()) continue;
        std::smatch m;
        if (!std::regex_match(line, m, item)) {
            throw UnparseableCompletionError("completion line is not a numbered item: '" + trim(line) + "'", completion);
        }
        if (std::stoul(m[1]) != out.size() + 1) {
            throw UnparseableCompletionError("completion numbering is not consecutive at '" + trim(line) + "'", completion);
        }
        if (std::string(m[2]).empty()) throw UnparseableCompletionError("completion item " + std::string(m[1]) + " is empty", completion);
        out.push_back(m[2]);
    }
    if (out.empty()) throw UnparseableCompletionError("completion contains no numbered items", completion);
    return out;
}

ltlf::Proposition normalize_proposition(const std::string& phrase) {
    std::string out;
    bool gap = false;
    for (char c : trim(phrase)) {
        auto u = static_cast<unsigned char>(c);
        if (std::isspace(u) || c == '-' || c == '_') {
            gap = true;
        } else if (std::isalnum(u) && u < 128) {
            if (gap && !out.empty()) out += '_';
            gap = false;
            out += static_cast<char>(std::tolower(u));
        }
    }
    if (out.empty()) throw InputError("phrase '" + phrase + "' is empty after normalization");
    return ltlf::Proposition(out);
}

std::string normalize_formula_text(const std::string& line, const std::vector<std::string>& phrases) {
    static const std::vector<std::pair<std::string, std::string>> symbols{
        {"□", " G "}, {"◻", " G "}, {"◇", " F "}, {"◊", " F "}, {"◯", " X "},
        {"○", " X "}, {"∧", " & "}, {"∨", " | "}, {"¬", " ! "}, {"→", " -> "},
        {"↔", " <-> "}, {"⊕", " ^ "}, {"⇒", " -> "}, {"⇔", " <-> "}};
    std::string s = trim(line);
    if (s.ends_with(".")) s.pop_back();
    for (const auto& [from, to] : symbols) {
        for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
    }

    // Longest phrases first so "red light" wins over "light"; matches are case-insensitive on word boundaries.
    std::vector<std::pair<std::string, std::string>> names;
    for (const auto& p : phrases) names.emplace_back(lower(trim(p)), normalize_proposition(p).name());
    std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
        return a.first.size() != b.first.size() ? a.first.size() > b.first.size() : a.first < b.first;
    });
    std::string out;
    const std::string low = lower(s);
    for (std::size_t i = 0; i < s.size();) {
        bool replaced = false;
        if (i == 0 || !word_char(s[i - 1])) {
            for (const auto& [phrase, id] : names) {
                if (phrase.empty() || low.compare(i, phrase.size(), phrase) != 0) continue;
                std::size_t end = i + phrase.size();
                if (end < s.size() && word_char(s[end])) continue;
                if (is_operator(s.substr(i, phrase.size()))) continue;
                out += id;
                i = end;
                replaced = true;
                break;
            }
        }
        if (!replaced) out += s[i++];
    }
    return out;
}

std::vector<std::string> extract_noun_phrases(const RuleSet& rules, NlBackend& backend) {
    const auto completion = backend.complete(noun_phrase_prompt(rules));
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto item : parse_numbered_list(completion)) {
        if (item.ends_with(".")) item.pop_back();
        item = trim(item);
        ltlf::Proposition p = [&] {
            try {
                return normalize_proposition(item);
            } catch (const InputError&) {
                throw UnparseableCompletionError("noun phrase '" + item + "' has no usable characters", completion);
            }
        }();
        if (seen.insert(p.name()).second) out.push_back(item);
    }
    return out;
}

Translation rules_to_ltlf(const RuleSet& rules, const std::vector<std::string>& phrases, NlBackend& backend) {
    if (phrases.empty()) throw InputError("no atomic propositions given");
    ltlf::PropSet props;
    for (const auto& p : phrases) props.insert(normalize_proposition(p));
    const auto completion = backend.complete(formula_prompt(rules, phrases));
    const auto items = parse_numbered_list(completion);
    if (items.size() != rules.rules().size()) {
        throw UnparseableCompletionError("expected " + std::to_string(rules.rules().size()) + " formulas, got " +
                                             std::to_string(items.size()),
                                         completion);
    }
    std::vector<SpecFormula> formulas;
    std::vector<RuleError> errors;
    for (std::size_t i = 0; i < items.size(); ++i) {
        try {
            auto f = ltlf::parse_formula(normalize_formula_text(items[i], phrases), props);
            formulas.push_back({"phi" + std::to_string(i + 1), f, i});
        } catch (const InputError& e) {
            errors.push_back({i, e.what()});
        }
    }
    if (formulas.empty()) {
        std::string msg = "no rule could be translated";
        for (const auto& e : errors) msg += "; rule " + std::to_string(e.rule_index + 1) + ": " + e.message;
        throw InputError(msg);
    }
    return {SpecSet(std::move(props), std::move(formulas)), std::move(errors)};
}

}  // namespace vsearch::nl2spec
