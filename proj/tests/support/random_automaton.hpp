#pragma once

#include <random>
#include <string>
#include <vector>

#include "vsearch/automaton.hpp"
#include "vsearch/calibration.hpp"

namespace vsearch::testing {

// Mapping with wide saturation thresholds so most confidences stay fractional.
inline calibration::CalibrationModel soft_model() { return calibration::CalibrationModel({8.0, 0.5}, 0.97, 0.03); }

// Detection trace with random confidences; about one value in six is a saturating 0 or 1
// and, when `hard` is set, about one proposition in five is a hard label.
inline automaton::DetectionTrace random_trace(std::mt19937_64& rng, const std::vector<ltlf::Proposition>& props,
                                              int frames, bool hard = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    automaton::DetectionTrace t{"random", 1.0, props, {}};
    for (int j = 0; j < frames; ++j) {
        automaton::Frame f{j, static_cast<double>(j), {}, {}};
        for (const auto& p : props) {
            double r = u(rng);
            if (hard && r < 0.2) {
                f.hard_labels.emplace(p, u(rng) < 0.5);
            } else if (r < 0.3) {
                f.confidences.emplace(p, u(rng) < 0.5 ? 0.0 : 1.0);
            } else {
                f.confidences.emplace(p, u(rng));
            }
        }
        t.frames.push_back(std::move(f));
    }
    return t;
}

// Layered automaton that need not have product form: each layer holds 1-4 distinct labels,
// random edges with random weights normalized per source.
inline automaton::ProbabilisticAutomaton random_layered(std::mt19937_64& rng, const std::vector<ltlf::Proposition>& props,
                                                        int layers) {
    using namespace automaton;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const std::size_t letters = std::size_t{1} << props.size();
    ProbabilisticAutomaton a;
    a.video_id = "layered";
    a.states.push_back({0, 0, std::nullopt});
    std::vector<StateId> previous{0};
    StateId next = 1;
    for (int l = 1; l <= layers; ++l) {
        std::vector<std::size_t> pool(letters);
        for (std::size_t i = 0; i < letters; ++i) pool[i] = i;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::size_t width = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(4, letters))(rng);
        std::vector<StateId> current;
        for (std::size_t w = 0; w < width; ++w) {
            Label label;
            for (std::size_t i = 0; i < props.size(); ++i) label.emplace(props[i], ((pool[w] >> i) & 1u) != 0);
            a.states.push_back({next, static_cast<std::uint32_t>(l), std::move(label)});
            current.push_back(next++);
        }
        // Each source reaches a random non-empty subset; each target gets at least one source.
        std::vector<std::vector<StateId>> targets(previous.size());
        std::uniform_int_distribution<std::size_t> src(0, previous.size() - 1);
        for (StateId c : current) targets[src(rng)].push_back(c);
        for (auto& ts : targets) {
            for (StateId c : current) {
                if (std::find(ts.begin(), ts.end(), c) == ts.end() && u(rng) < 0.5) ts.push_back(c);
            }
            if (ts.empty()) ts.push_back(current[std::uniform_int_distribution<std::size_t>(0, current.size() - 1)(rng)]);
        }
        for (std::size_t s = 0; s < previous.size(); ++s) {
            std::vector<double> w(targets[s].size());
            double sum = 0.0;
            for (auto& x : w) sum += (x = u(rng));
            for (std::size_t k = 0; k < w.size(); ++k) a.transitions.push_back({previous[s], targets[s][k], w[k] / sum});
        }
        previous = current;
    }
    a.accepting = previous;
    return a;
}

}  // namespace vsearch::testing
