#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "vsearch/ltlf.hpp"
#include "vsearch/spec.hpp"

namespace vsearch::nl2spec {

// Ordered natural-language rules; non-empty, no blank rule.
class RuleSet {
public:
    explicit RuleSet(std::vector<std::string> rules);
    const std::vector<std::string>& rules() const noexcept { return rules_; }

private:
    std::vector<std::string> rules_;
};

// One rule per non-blank line.
RuleSet rules_from_text(const std::string& text);
RuleSet load_rules(const std::string& path);

// A text-completion service. One prompt in, one completion out.
class NlBackend {
public:
    virtual ~NlBackend() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// Canned completions keyed by prompt_hash(prompt). Network-free and deterministic.
class FixtureBackend : public NlBackend {
public:
    explicit FixtureBackend(std::map<std::string, std::string> completions);
    static FixtureBackend load(const std::string& path);
    // Throws TransportError when the fixture has no entry for the prompt.
    std::string complete(const std::string& prompt) override;

private:
    std::map<std::string, std::string> completions_;
};

// POSTs {"prompt": ...} to `url` and reads {"completion": ...}. The bearer token defaults to
// the VSEARCH_NL_TOKEN environment variable. Only plain http:// endpoints are supported.
class HttpBackend : public NlBackend {
public:
    explicit HttpBackend(std::string url, std::string token = "", int timeout_s = 60);
    std::string complete(const std::string& prompt) override;

private:
    std::string origin_;
    std::string path_;
    std::string token_;
    int timeout_s_;
};

// "fixture:PATH" or "http:URL" (the URL keeps its scheme, e.g. http:http://host:8080/complete).
std::unique_ptr<NlBackend> make_backend(const std::string& spec);

// Lowercase 16-digit hex FNV-1a 64-bit hash of the UTF-8 prompt.
std::string prompt_hash(const std::string& prompt);

std::string noun_phrase_prompt(const RuleSet& rules);
std::string formula_prompt(const RuleSet& rules, const std::vector<std::string>& phrases);

// Items of a numbered-list completion ("1. x", "2) y"), numbering consecutive from 1.
// Throws UnparseableCompletionError otherwise, including for an empty completion.
std::vector<std::string> parse_numbered_list(const std::string& completion);

// Lowercased, trimmed, whitespace and hyphen runs to '_', other non-alphanumerics dropped.
// Throws InputError when nothing remains.
ltlf::Proposition normalize_proposition(const std::string& phrase);

// Maps logic symbols to grammar tokens and multiword phrases to their identifiers.
std::string normalize_formula_text(const std::string& line, const std::vector<std::string>& phrases);

std::vector<std::string> extract_noun_phrases(const RuleSet& rules, NlBackend& backend);

struct RuleError {
    std::size_t rule_index;  // zero-based
    std::string message;
};

struct Translation {
    SpecSet spec;
    std::vector<RuleError> errors;  // rules whose formula could not be parsed
};

// One formula per rule, ids "phi1", "phi2", ... by rule position. Lines that fail to parse
// are reported in `errors`; throws InputError when every line fails.
Translation rules_to_ltlf(const RuleSet& rules, const std::vector<std::string>& phrases, NlBackend& backend);

}  // namespace vsearch::nl2spec
