#include "vsearch/checker.hpp"

#include <algorithm>
#include <unordered_map>

#include "vsearch/errors.hpp"

namespace vsearch::checker {

namespace {

using automaton::ProbabilisticAutomaton;
using automaton::State;
using automaton::StateId;

void check_atoms(const ProbabilisticAutomaton& a, const ltlf::Formula& f) {
    const auto labeled = automaton::propositions(a);
    for (const auto& p : ltlf::extract_propositions(f)) {
        if (!labeled.contains(p)) throw UndeclaredAtomError(p.name());
    }
}

void require_valid(const ProbabilisticAutomaton& a) {
    auto diagnostics = automaton::validate(a);
    if (!diagnostics.empty()) {
        throw InputError("automaton '" + a.video_id + "' is malformed: " + diagnostics.front().message);
    }
    if (std::find(a.accepting.begin(), a.accepting.end(), a.initial) != a.accepting.end()) {
        throw EmptyTraceError();
    }
}

// States in layer order with their outgoing transitions grouped.
struct Graph {
    std::vector<const State*> order;
    std::unordered_map<StateId, std::size_t> index;
    std::vector<std::vector<std::pair<std::size_t, double>>> out;
    std::vector<bool> accepting;

    explicit Graph(const ProbabilisticAutomaton& a) {
        for (const auto& s : a.states) order.push_back(&s);
        std::stable_sort(order.begin(), order.end(), [](const State* x, const State* y) {
            return std::tie(x->layer, x->id) < std::tie(y->layer, y->id);
        });
        for (std::size_t i = 0; i < order.size(); ++i) index.emplace(order[i]->id, i);
        out.resize(order.size());
        for (const auto& t : a.transitions) out[index.at(t.from)].emplace_back(index.at(t.to), t.p);
        accepting.assign(order.size(), false);
        for (StateId s : a.accepting) accepting[index.at(s)] = true;
    }
};

}  // namespace

std::string to_string(Method m) { return m == Method::ProductDp ? "product_dp" : "enumeration"; }

CheckResult check_probability(const ProbabilisticAutomaton& a, const ltlf::Formula& f, const std::string& formula_id,
                              const ltlf::DfaOptions& options) {
    check_atoms(a, f);
    require_valid(a);
    const auto props = ltlf::extract_propositions(f);
    const auto dfa = ltlf::to_dfa(f, props, options);
    const Graph g(a);
    const std::size_t q = dfa.state_count();

    std::vector<ltlf::SpecDfa::Letter> letter(g.order.size(), 0);
    for (std::size_t i = 0; i < g.order.size(); ++i) {
        if (g.order[i]->label) letter[i] = dfa.letter(automaton::step_of(*g.order[i]->label));
    }

    // mass[i * q + d]: probability of reaching state i with the DFA in state d.
    std::vector<double> mass(g.order.size() * q, 0.0);
    mass[g.index.at(a.initial) * q + dfa.initial()] = 1.0;
    double accepted = 0.0;
    for (std::size_t i = 0; i < g.order.size(); ++i) {
        const double* here = &mass[i * q];
        if (g.accepting[i]) {
            for (std::size_t d = 0; d < q; ++d) {
                if (dfa.accepting(static_cast<ltlf::SpecDfa::StateId>(d))) accepted += here[d];
            }
        }
        for (auto [j, p] : g.out[i]) {
            double* there = &mass[j * q];
            for (std::size_t d = 0; d < q; ++d) {
                if (here[d] != 0.0) there[dfa.next(static_cast<ltlf::SpecDfa::StateId>(d), letter[j])] += here[d] * p;
            }
        }
    }
    return {std::clamp(accepted, 0.0, 1.0), formula_id, std::nullopt, Method::ProductDp};
}

CheckResult enumerate_probability(const ProbabilisticAutomaton& a, const ltlf::Formula& f, const std::string& formula_id,
                                  std::uint64_t max_paths) {
    check_atoms(a, f);
    require_valid(a);
    const Graph g(a);

    // Trajectory count per state, saturating just above the cap.
    std::vector<std::uint64_t> paths(g.order.size(), 0);
    for (std::size_t i = g.order.size(); i-- > 0;) {
        std::uint64_t n = g.accepting[i] ? 1 : 0;
        for (auto [j, p] : g.out[i]) n = std::min(max_paths + 1, n + paths[j]);
        paths[i] = n;
    }
    const std::size_t root = g.index.at(a.initial);
    if (paths[root] > max_paths) throw EnumerationLimitError(max_paths);

    double total = 0.0;
    std::uint64_t count = 0;
    ltlf::Trace trace;
    auto visit = [&](auto&& self, std::size_t i, double weight) -> void {
        if (g.accepting[i]) {
            ++count;
            if (ltlf::evaluate_trace(f, trace)) total += weight;
        }
        for (auto [j, p] : g.out[i]) {
            trace.push_back(automaton::step_of(*g.order[j]->label));
            self(self, j, weight * p);
            trace.pop_back();
        }
    };
    visit(visit, root, 1.0);
    return {std::clamp(total, 0.0, 1.0), formula_id, count, Method::Enumeration};
}

}  // namespace vsearch::checker
