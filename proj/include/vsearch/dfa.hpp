#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vsearch/ltlf.hpp"

namespace vsearch::ltlf {

// Deterministic automaton over the alphabet 2^props. A letter is a bitmask over
// `props` in set order (bit i set iff the i-th proposition holds).
class SpecDfa {
public:
    using StateId = std::uint32_t;
    using Letter = std::uint32_t;

    SpecDfa(std::vector<Proposition> props, StateId initial, std::vector<bool> accepting,
            std::vector<StateId> delta);

    const std::vector<Proposition>& propositions() const noexcept { return props_; }
    std::size_t state_count() const noexcept { return accepting_.size(); }
    std::size_t alphabet_size() const noexcept { return std::size_t{1} << props_.size(); }
    StateId initial() const noexcept { return initial_; }
    bool accepting(StateId s) const { return accepting_.at(s); }
    StateId next(StateId s, Letter a) const { return delta_[s * alphabet_size() + a]; }

    Letter letter(const Step& step) const;

    // Acceptance of a non-empty trace; steps may mention propositions outside the alphabet.
    bool accepts(const Trace& t) const;

private:
    std::vector<Proposition> props_;
    StateId initial_;
    std::vector<bool> accepting_;
    std::vector<StateId> delta_;
};

struct DfaOptions {
    std::size_t max_states = 20000;
    std::size_t max_propositions = 16;
};

// Determinizes the progression closure of `f` and minimizes it. The language equals the
// set of non-empty traces satisfying `f`; the initial state's acceptance only governs the
// empty trace, which is outside the domain, and is chosen to give the smaller automaton.
// Throws UndeclaredAtomError if `props` misses an atom of `f` and DfaStateLimitError
// when the closure exceeds options.max_states.
SpecDfa to_dfa(const Formula& f, const PropSet& props, const DfaOptions& options = {});

}  // namespace vsearch::ltlf
