#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vsearch/automaton.hpp"
#include "vsearch/dfa.hpp"
#include "vsearch/ltlf.hpp"

namespace vsearch::checker {

enum class Method { ProductDp, Enumeration };

std::string to_string(Method m);

struct CheckResult {
    double probability = 0.0;
    std::string formula_id;
    std::optional<std::uint64_t> trajectory_count;  // enumeration only
    Method method = Method::ProductDp;
};

// Total probability of the trajectories from the initial state to an accepting state whose
// label sequence (initial state excluded) satisfies `f`. Runs a forward pass over the
// product of the layers with the formula's DFA. Throws UndeclaredAtomError when `f` uses a
// proposition the automaton does not label, InputError when `a` fails validation, and
// DfaStateLimitError from the DFA construction.
CheckResult check_probability(const automaton::ProbabilisticAutomaton& a, const ltlf::Formula& f,
                              const std::string& formula_id = "", const ltlf::DfaOptions& options = {});

// Same quantity by explicit depth-first enumeration of every trajectory, each checked with
// evaluate_trace. Throws EnumerationLimitError when the automaton has more than `max_paths`
// trajectories.
CheckResult enumerate_probability(const automaton::ProbabilisticAutomaton& a, const ltlf::Formula& f,
                                  const std::string& formula_id = "", std::uint64_t max_paths = 1'000'000);

}  // namespace vsearch::checker
