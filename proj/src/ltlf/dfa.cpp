#include <deque>
#include <map>
#include <string>
#include <utility>

#include "vsearch/dfa.hpp"
#include "vsearch/errors.hpp"

namespace vsearch::ltlf {

SpecDfa::SpecDfa(std::vector<Proposition> props, StateId initial, std::vector<bool> accepting,
                 std::vector<StateId> delta)
    : props_(std::move(props)), initial_(initial), accepting_(std::move(accepting)), delta_(std::move(delta)) {
    if (delta_.size() != accepting_.size() * alphabet_size() || initial_ >= accepting_.size()) {
        throw std::invalid_argument("SpecDfa: inconsistent transition table");
    }
}

SpecDfa::Letter SpecDfa::letter(const Step& step) const {
    Letter a = 0;
    for (std::size_t i = 0; i < props_.size(); ++i) {
        if (step.contains(props_[i])) a |= Letter{1} << i;
    }
    return a;
}

bool SpecDfa::accepts(const Trace& t) const {
    if (t.empty()) throw EmptyTraceError();
    StateId s = initial_;
    for (const auto& step : t) s = next(s, letter(step));
    return accepting_[s];
}

namespace {

struct RawDfa {
    std::vector<bool> accepting;          // index 0 is the initial state, its entry is unused
    std::vector<SpecDfa::StateId> delta;  // state * alphabet + letter
};

// Moore partition refinement followed by breadth-first renumbering from the initial state.
SpecDfa minimize(const std::vector<Proposition>& props, const RawDfa& raw, bool initial_accepting) {
    const std::size_t n = raw.accepting.size();
    const std::size_t sigma = std::size_t{1} << props.size();
    std::vector<bool> acc = raw.accepting;
    acc[0] = initial_accepting;

    std::vector<std::size_t> cls(n);
    for (std::size_t s = 0; s < n; ++s) cls[s] = acc[s] ? 1 : 0;
    std::size_t classes = 0;
    for (;;) {
        std::map<std::vector<std::size_t>, std::size_t> ids;
        std::vector<std::size_t> next_cls(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<std::size_t> sig;
            sig.reserve(sigma + 1);
            sig.push_back(cls[s]);
            for (std::size_t a = 0; a < sigma; ++a) sig.push_back(cls[raw.delta[s * sigma + a]]);
            auto [it, inserted] = ids.emplace(std::move(sig), ids.size());
            next_cls[s] = it->second;
        }
        cls.swap(next_cls);
        if (ids.size() == classes) break;
        classes = ids.size();
    }

    // Pick a representative per class and renumber in BFS order.
    std::vector<std::size_t> rep(classes, n);
    for (std::size_t s = 0; s < n; ++s) {
        if (rep[cls[s]] == n) rep[cls[s]] = s;
    }
    std::vector<SpecDfa::StateId> order(classes, static_cast<SpecDfa::StateId>(-1));
    std::vector<std::size_t> bfs{cls[0]};
    order[cls[0]] = 0;
    for (std::size_t i = 0; i < bfs.size(); ++i) {
        std::size_t s = rep[bfs[i]];
        for (std::size_t a = 0; a < sigma; ++a) {
            std::size_t c = cls[raw.delta[s * sigma + a]];
            if (order[c] == static_cast<SpecDfa::StateId>(-1)) {
                order[c] = static_cast<SpecDfa::StateId>(bfs.size());
                bfs.push_back(c);
            }
        }
    }
    std::vector<bool> accepting(bfs.size());
    std::vector<SpecDfa::StateId> delta(bfs.size() * sigma);
    for (std::size_t i = 0; i < bfs.size(); ++i) {
        std::size_t s = rep[bfs[i]];
        accepting[i] = acc[s];
        for (std::size_t a = 0; a < sigma; ++a) delta[i * sigma + a] = order[cls[raw.delta[s * sigma + a]]];
    }
    return SpecDfa(props, 0, std::move(accepting), std::move(delta));
}

}  // namespace

SpecDfa to_dfa(const Formula& f, const PropSet& props, const DfaOptions& options) {
    for (const auto& p : extract_propositions(f)) {
        if (!props.contains(p)) throw UndeclaredAtomError(p.name());
    }
    if (props.size() > options.max_propositions) {
        throw ResourceError("DFA alphabet over " + std::to_string(props.size()) +
                            " propositions exceeds the limit of " + std::to_string(options.max_propositions));
    }
    std::vector<Proposition> prop_list(props.begin(), props.end());
    const std::size_t sigma = std::size_t{1} << prop_list.size();
    std::vector<Step> letters(sigma);
    for (std::size_t a = 0; a < sigma; ++a) {
        for (std::size_t i = 0; i < prop_list.size(); ++i) {
            if (a & (std::size_t{1} << i)) letters[a].insert(prop_list[i]);
        }
    }

    // A state is (residual obligation, did the trace read so far satisfy f). The initial
    // state has no meaningful acceptance bit and is kept apart from the keyed states.
    std::vector<Formula> residual{normalize(f)};
    RawDfa raw;
    raw.accepting.push_back(false);
    std::map<std::pair<std::string, bool>, SpecDfa::StateId> index;
    std::deque<SpecDfa::StateId> work{0};
    raw.delta.resize(sigma);
    while (!work.empty()) {
        SpecDfa::StateId s = work.front();
        work.pop_front();
        for (std::size_t a = 0; a < sigma; ++a) {
            Formula rest = normalize(progress(residual[s], letters[a], false));
            bool done = progress(residual[s], letters[a], true).kind() == Kind::True;
            auto key = std::make_pair(rest.text(), done);
            auto it = index.find(key);
            if (it == index.end()) {
                if (residual.size() >= options.max_states) throw DfaStateLimitError(options.max_states);
                auto id = static_cast<SpecDfa::StateId>(residual.size());
                it = index.emplace(std::move(key), id).first;
                residual.push_back(rest);
                raw.accepting.push_back(done);
                raw.delta.resize(raw.delta.size() + sigma);
                work.push_back(id);
            }
            raw.delta[s * sigma + a] = it->second;
        }
    }

    SpecDfa rejecting = minimize(prop_list, raw, false);
    SpecDfa accepting = minimize(prop_list, raw, true);
    return accepting.state_count() < rejecting.state_count() ? accepting : rejecting;
}

}  // namespace vsearch::ltlf
