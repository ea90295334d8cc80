#include "vsearch/spec.hpp"

#include <set>

#include "json_util.hpp"

namespace vsearch {

SpecSet::SpecSet(ltlf::PropSet propositions, std::vector<SpecFormula> formulas)
    : props_(std::move(propositions)), formulas_(std::move(formulas)) {
    std::set<std::string> ids;
    for (const auto& f : formulas_) {
        if (f.id.empty()) throw InputError("formula id must not be empty");
        if (!ids.insert(f.id).second) throw InputError("duplicate formula id '" + f.id + "'");
        for (const auto& p : ltlf::extract_propositions(f.formula)) {
            if (!props_.contains(p)) throw UndeclaredAtomError(p.name());
        }
    }
}

SpecSet spec_from_json(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    ltlf::PropSet props;
    const json& pj = get_array(field(j, "propositions", ""), "/propositions");
    for (std::size_t i = 0; i < pj.size(); ++i) {
        const std::string at = "/propositions/" + std::to_string(i);
        std::string name = get_string(pj[i], at);
        if (!ltlf::Proposition::is_valid_name(name)) throw FormatError("invalid proposition name '" + name + "'", at);
        if (!props.emplace(name).second) throw FormatError("duplicate proposition '" + name + "'", at);
    }
    std::vector<SpecFormula> formulas;
    std::set<std::string> ids;
    const json& fj = get_array(field(j, "formulas", ""), "/formulas");
    for (std::size_t i = 0; i < fj.size(); ++i) {
        const std::string at = "/formulas/" + std::to_string(i);
        std::string id = get_string(field(fj[i], "id", at), at + "/id");
        if (id.empty() || !ids.insert(id).second) throw FormatError("formula ids must be non-empty and unique", at + "/id");
        std::string source = get_string(field(fj[i], "ltlf", at), at + "/ltlf");
        try {
            formulas.push_back({id, ltlf::parse_formula(source, props), std::nullopt});
        } catch (const InputError& e) {
            throw FormatError(std::string("formula '") + id + "': " + e.what(), at + "/ltlf");
        }
    }
    return SpecSet(std::move(props), std::move(formulas));
}

std::string spec_to_json(const SpecSet& s) {
    detail::json props = detail::json::array();
    for (const auto& p : s.propositions()) props.push_back(p.name());
    detail::json formulas = detail::json::array();
    for (const auto& f : s.formulas()) formulas.push_back({{"id", f.id}, {"ltlf", ltlf::format_formula(f.formula)}});
    detail::json j{{"propositions", std::move(props)}, {"formulas", std::move(formulas)}};
    return j.dump(2) + "\n";
}

SpecSet load_spec(const std::string& path) { return spec_from_json(detail::read_file(path)); }

void save_spec(const SpecSet& s, const std::string& path) { detail::write_file(path, spec_to_json(s)); }

}  // namespace vsearch
