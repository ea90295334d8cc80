#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsearch/calibration.hpp"
#include "vsearch/ltlf.hpp"

namespace vsearch::automaton {

using ltlf::Proposition;
using ltlf::PropSet;

// One sampled frame. Each declared proposition appears in exactly one of the two maps:
// a detector confidence in [0,1], or a ground-truth label taken from the dataset.
struct Frame {
    std::int64_t index = 0;
    double timestamp_s = 0.0;
    std::map<Proposition, double> confidences;
    std::map<Proposition, bool> hard_labels;

    friend bool operator==(const Frame&, const Frame&) = default;
};

struct DetectionTrace {
    std::string video_id;
    double frame_rate = 1.0;
    std::vector<Proposition> propositions;
    std::vector<Frame> frames;

    friend bool operator==(const DetectionTrace&, const DetectionTrace&) = default;
};

// Throws EmptyTraceError, PropositionMismatchError or FormatError (location "/frames/i/...")
// when the trace violates its invariants.
void validate_trace(const DetectionTrace& t);

DetectionTrace trace_from_json(const std::string& text);
std::string trace_to_json(const DetectionTrace& t);
DetectionTrace load_trace(const std::string& path);
void save_trace(const DetectionTrace& t, const std::string& path);

using StateId = std::uint32_t;
using Label = std::map<Proposition, bool>;

struct State {
    StateId id = 0;
    std::uint32_t layer = 0;
    std::optional<Label> label;  // nullopt only for the initial state

    friend bool operator==(const State&, const State&) = default;
};

struct Transition {
    StateId from = 0;
    StateId to = 0;
    double p = 0.0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

// Layered acyclic automaton; one layer per frame after the unlabeled initial state.
struct ProbabilisticAutomaton {
    std::string video_id;
    std::vector<State> states;
    StateId initial = 0;
    std::vector<StateId> accepting;
    std::vector<Transition> transitions;

    friend bool operator==(const ProbabilisticAutomaton&, const ProbabilisticAutomaton&) = default;
};

// Builds the automaton over `props` (a subset of the trace's propositions). Per frame, every
// conjunction over `props` gets probability prod(m' or 1 - m'), with m' the thresholded
// mapping of a confidence or 1/0 for a hard label; zero-probability conjunctions are dropped
// and each survivor is entered from every survivor of the previous layer with an edge
// carrying its own probability. States are numbered layer by layer, conjunctions ordered
// from all-true downwards in proposition order.
ProbabilisticAutomaton frames_to_automaton(const DetectionTrace& trace, const calibration::CalibrationModel& model,
                                           const PropSet& props);
ProbabilisticAutomaton frames_to_automaton(const DetectionTrace& trace, const calibration::CalibrationModel& model);

enum class Violation {
    Structure,      // duplicate or unknown state ids, bad initial state
    Labeling,       // None label misplaced, or labels over differing propositions
    Probability,    // edge weight outside (0,1]
    Layering,       // edge not going from layer l to l+1
    Stochasticity,  // outgoing weights of a non-final state do not sum to 1
    Reachability,   // non-initial state without incoming edges
    Acceptance,     // accepting set differs from the last layer
};

struct Diagnostic {
    Violation kind;
    std::optional<StateId> state;
    std::string message;
};

std::string to_string(Violation v);

// Every invariant violation found; empty for a well-formed automaton.
std::vector<Diagnostic> validate(const ProbabilisticAutomaton& a);

// Propositions labeling the automaton's states.
PropSet propositions(const ProbabilisticAutomaton& a);

// The set of true propositions of a labeled state.
ltlf::Step step_of(const Label& label);

// Deterministic JSON: states by (layer, id), transitions by (from, to), accepting ascending.
std::string serialize(const ProbabilisticAutomaton& a);
// Throws FormatError with a JSON pointer on malformed content or dangling state ids.
ProbabilisticAutomaton deserialize(const std::string& text);
ProbabilisticAutomaton load_automaton(const std::string& path);
void save_automaton(const ProbabilisticAutomaton& a, const std::string& path);

}  // namespace vsearch::automaton
