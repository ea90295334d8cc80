#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vsearch/ltlf.hpp"

namespace vsearch {

struct SpecFormula {
    std::string id;
    ltlf::Formula formula;
    std::optional<std::size_t> rule_index;  // zero-based source rule, when translated from text
};

// Propositions plus named formulas over them. Construction checks that ids are unique and
// non-empty and that every formula's atoms are declared (UndeclaredAtomError otherwise).
class SpecSet {
public:
    SpecSet(ltlf::PropSet propositions, std::vector<SpecFormula> formulas);

    const ltlf::PropSet& propositions() const noexcept { return props_; }
    const std::vector<SpecFormula>& formulas() const noexcept { return formulas_; }

private:
    ltlf::PropSet props_;
    std::vector<SpecFormula> formulas_;
};

// Spec file: {"propositions": [s...], "formulas": [{"id": s, "ltlf": s}]}.
SpecSet spec_from_json(const std::string& text);
std::string spec_to_json(const SpecSet& s);
SpecSet load_spec(const std::string& path);
void save_spec(const SpecSet& s, const std::string& path);

}  // namespace vsearch
