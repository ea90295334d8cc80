#include "vsearch/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "json_util.hpp"

namespace vsearch::automaton {

namespace {

using detail::json;

constexpr double kSumTolerance = 1e-9;

Proposition proposition_at(const std::string& name, const std::string& where) {
    if (!Proposition::is_valid_name(name)) throw FormatError("invalid proposition name '" + name + "'", where);
    return Proposition(name);
}

// JSON pointer escaping for object keys.
std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace

void validate_trace(const DetectionTrace& t) {
    if (t.frames.empty()) throw EmptyTraceError();
    if (!(t.frame_rate > 0.0) || !std::isfinite(t.frame_rate)) throw FormatError("frame_rate must be positive", "/frame_rate");
    std::set<Proposition> declared;
    for (std::size_t i = 0; i < t.propositions.size(); ++i) {
        if (!declared.insert(t.propositions[i]).second) {
            throw FormatError("duplicate proposition '" + t.propositions[i].name() + "'", "/propositions/" + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < t.frames.size(); ++i) {
        const Frame& f = t.frames[i];
        const std::string at = "/frames/" + std::to_string(i);
        if (f.index < 0) throw FormatError("frame index must be non-negative", at + "/index");
        if (i > 0 && f.index <= t.frames[i - 1].index) throw FormatError("frame indices must be strictly increasing", at + "/index");
        for (const auto& [p, c] : f.confidences) {
            if (!declared.contains(p)) {
                throw PropositionMismatchError("frame " + std::to_string(f.index) + " of '" + t.video_id +
                                               "' has a confidence for undeclared proposition '" + p.name() + "'");
            }
            if (!(c >= 0.0 && c <= 1.0)) throw FormatError("confidence outside [0,1]", at + "/confidences/" + escape(p.name()));
            if (f.hard_labels.contains(p)) {
                throw FormatError("proposition '" + p.name() + "' has both a confidence and a hard label", at);
            }
        }
        for (const auto& [p, v] : f.hard_labels) {
            if (!declared.contains(p)) {
                throw PropositionMismatchError("frame " + std::to_string(f.index) + " of '" + t.video_id +
                                               "' has a label for undeclared proposition '" + p.name() + "'");
            }
        }
        for (const auto& p : declared) {
            if (!f.confidences.contains(p) && !f.hard_labels.contains(p)) {
                throw PropositionMismatchError("frame " + std::to_string(f.index) + " of '" + t.video_id +
                                               "' is missing proposition '" + p.name() + "'");
            }
        }
    }
}

DetectionTrace trace_from_json(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    DetectionTrace t;
    t.video_id = get_string(field(j, "video_id", ""), "/video_id");
    t.frame_rate = number_field(j, "frame_rate", "");
    const json& props = get_array(field(j, "propositions", ""), "/propositions");
    for (std::size_t i = 0; i < props.size(); ++i) {
        std::string at = "/propositions/" + std::to_string(i);
        t.propositions.push_back(proposition_at(get_string(props[i], at), at));
    }
    const json& frames = get_array(field(j, "frames", ""), "/frames");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string at = "/frames/" + std::to_string(i);
        const json& fj = frames[i];
        Frame f;
        f.index = get_integer(field(fj, "index", at), at + "/index");
        f.timestamp_s = fj.contains("timestamp_s") ? get_number(fj["timestamp_s"], at + "/timestamp_s")
                                                   : static_cast<double>(f.index) / t.frame_rate;
        if (fj.contains("confidences")) {
            const json& c = fj["confidences"];
            if (!c.is_object()) throw FormatError("expected an object", at + "/confidences");
            for (const auto& [name, value] : c.items()) {
                std::string vat = at + "/confidences/" + escape(name);
                f.confidences.emplace(proposition_at(name, vat), get_number(value, vat));
            }
        }
        if (fj.contains("hard_labels") && !fj["hard_labels"].is_null()) {
            const json& h = fj["hard_labels"];
            if (!h.is_object()) throw FormatError("expected an object", at + "/hard_labels");
            for (const auto& [name, value] : h.items()) {
                std::string vat = at + "/hard_labels/" + escape(name);
                f.hard_labels.emplace(proposition_at(name, vat), get_bool(value, vat));
            }
        }
        t.frames.push_back(std::move(f));
    }
    validate_trace(t);
    return t;
}

std::string trace_to_json(const DetectionTrace& t) {
    json props = json::array();
    for (const auto& p : t.propositions) props.push_back(p.name());
    json frames = json::array();
    for (const auto& f : t.frames) {
        json c = json::object();
        for (const auto& [p, v] : f.confidences) c[p.name()] = v;
        json fj{{"index", f.index}, {"timestamp_s", f.timestamp_s}, {"confidences", std::move(c)}};
        if (!f.hard_labels.empty()) {
            json h = json::object();
            for (const auto& [p, v] : f.hard_labels) h[p.name()] = v;
            fj["hard_labels"] = std::move(h);
        }
        frames.push_back(std::move(fj));
    }
    json j{{"video_id", t.video_id}, {"frame_rate", t.frame_rate}, {"propositions", std::move(props)}, {"frames", std::move(frames)}};
    return j.dump(2) + "\n";
}

DetectionTrace load_trace(const std::string& path) { return trace_from_json(detail::read_file(path)); }

void save_trace(const DetectionTrace& t, const std::string& path) { detail::write_file(path, trace_to_json(t)); }

ProbabilisticAutomaton frames_to_automaton(const DetectionTrace& trace, const calibration::CalibrationModel& model,
                                           const PropSet& props) {
    validate_trace(trace);
    for (const auto& p : props) {
        if (std::find(trace.propositions.begin(), trace.propositions.end(), p) == trace.propositions.end()) {
            throw PropositionMismatchError("proposition '" + p.name() + "' is not declared by trace '" + trace.video_id + "'");
        }
    }
    if (props.size() > 20) throw ResourceError("too many propositions for an explicit automaton layer");
    const std::vector<Proposition> order(props.begin(), props.end());
    const std::size_t n = order.size();
    const std::size_t width = std::size_t{1} << n;

    ProbabilisticAutomaton a;
    a.video_id = trace.video_id;
    a.initial = 0;
    a.states.push_back({0, 0, std::nullopt});
    std::vector<StateId> previous{0};
    StateId next_id = 1;

    std::vector<double> truth(n);
    for (std::size_t j = 0; j < trace.frames.size(); ++j) {
        const Frame& frame = trace.frames[j];
        for (std::size_t i = 0; i < n; ++i) {
            auto h = frame.hard_labels.find(order[i]);
            truth[i] = h != frame.hard_labels.end() ? (h->second ? 1.0 : 0.0)
                                                    : calibration::map_thresholded(model, frame.confidences.at(order[i]));
        }
        std::vector<StateId> current;
        for (std::size_t k = 0; k < width; ++k) {
            // Bit (n-1-i) of k clear means the i-th proposition holds, so k = 0 is all-true.
            double prob = 1.0;
            Label label;
            for (std::size_t i = 0; i < n; ++i) {
                bool holds = ((k >> (n - 1 - i)) & 1u) == 0;
                prob *= holds ? truth[i] : 1.0 - truth[i];
                label.emplace(order[i], holds);
            }
            if (prob == 0.0) continue;
            const StateId id = next_id++;
            a.states.push_back({id, static_cast<std::uint32_t>(j + 1), std::move(label)});
            for (StateId from : previous) a.transitions.push_back({from, id, prob});
            current.push_back(id);
        }
        previous = std::move(current);
    }
    a.accepting = previous;
    std::sort(a.transitions.begin(), a.transitions.end(),
              [](const Transition& x, const Transition& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    return a;
}

ProbabilisticAutomaton frames_to_automaton(const DetectionTrace& trace, const calibration::CalibrationModel& model) {
    return frames_to_automaton(trace, model, PropSet(trace.propositions.begin(), trace.propositions.end()));
}

std::string to_string(Violation v) {
    switch (v) {
        case Violation::Structure: return "structure";
        case Violation::Labeling: return "labeling";
        case Violation::Probability: return "probability";
        case Violation::Layering: return "layering";
        case Violation::Stochasticity: return "stochasticity";
        case Violation::Reachability: return "reachability";
        case Violation::Acceptance: return "acceptance";
    }
    return "unknown";
}

std::vector<Diagnostic> validate(const ProbabilisticAutomaton& a) {
    std::vector<Diagnostic> out;
    auto report = [&](Violation kind, std::optional<StateId> s, std::string msg) {
        out.push_back({kind, s, std::move(msg)});
    };
    auto name = [](StateId s) { return "state " + std::to_string(s); };

    std::unordered_map<StateId, const State*> by_id;
    for (const auto& s : a.states) {
        if (!by_id.emplace(s.id, &s).second) report(Violation::Structure, s.id, "duplicate " + name(s.id));
    }
    auto init = by_id.find(a.initial);
    if (init == by_id.end()) {
        report(Violation::Structure, a.initial, "initial " + name(a.initial) + " does not exist");
    } else {
        if (init->second->label) report(Violation::Labeling, a.initial, "initial " + name(a.initial) + " must carry the None label");
        if (init->second->layer != 0) report(Violation::Layering, a.initial, "initial " + name(a.initial) + " must be in layer 0");
    }

    std::optional<std::set<Proposition>> alphabet;
    std::uint32_t last_layer = 0;
    for (const auto& s : a.states) {
        last_layer = std::max(last_layer, s.layer);
        if (s.id == a.initial) continue;
        if (!s.label) {
            report(Violation::Labeling, s.id, name(s.id) + " is not initial but has the None label");
            continue;
        }
        if (s.layer == 0) report(Violation::Layering, s.id, name(s.id) + " shares layer 0 with the initial state");
        std::set<Proposition> keys;
        for (const auto& [p, v] : *s.label) keys.insert(p);
        if (!alphabet) {
            alphabet = keys;
        } else if (*alphabet != keys) {
            report(Violation::Labeling, s.id, name(s.id) + " is labeled over a different proposition set");
        }
    }

    std::unordered_map<StateId, double> outgoing;
    std::unordered_map<StateId, std::size_t> incoming;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& t = a.transitions[i];
        auto from = by_id.find(t.from), to = by_id.find(t.to);
        if (from == by_id.end() || to == by_id.end()) {
            report(Violation::Structure, std::nullopt,
                   "transition " + std::to_string(i) + " references unknown " + name(from == by_id.end() ? t.from : t.to));
            continue;
        }
        if (!(t.p > 0.0 && t.p <= 1.0)) {
            report(Violation::Probability, t.from,
                   "transition " + name(t.from) + " -> " + name(t.to) + " has weight " + std::to_string(t.p) + " outside (0,1]");
        }
        if (to->second->layer != from->second->layer + 1) {
            report(Violation::Layering, t.from, "transition " + name(t.from) + " -> " + name(t.to) + " skips or reverses layers");
        }
        outgoing[t.from] += t.p;
        ++incoming[t.to];
    }

    for (const auto& s : a.states) {
        if (s.layer != last_layer) {
            double sum = outgoing.contains(s.id) ? outgoing[s.id] : 0.0;
            if (std::abs(sum - 1.0) > kSumTolerance) {
                report(Violation::Stochasticity, s.id, "outgoing weights of " + name(s.id) + " sum to " + std::to_string(sum));
            }
        }
        if (s.id != a.initial && !incoming.contains(s.id)) {
            report(Violation::Reachability, s.id, name(s.id) + " has no incoming transition");
        }
    }

    std::set<StateId> expected, actual(a.accepting.begin(), a.accepting.end());
    for (const auto& s : a.states) {
        if (s.layer == last_layer) expected.insert(s.id);
    }
    for (StateId s : actual) {
        if (!expected.contains(s)) report(Violation::Acceptance, s, name(s) + " is accepting but not in the last layer");
    }
    for (StateId s : expected) {
        if (!actual.contains(s)) report(Violation::Acceptance, s, name(s) + " is in the last layer but not accepting");
    }
    return out;
}

PropSet propositions(const ProbabilisticAutomaton& a) {
    PropSet out;
    for (const auto& s : a.states) {
        if (!s.label) continue;
        for (const auto& [p, v] : *s.label) out.insert(p);
    }
    return out;
}

ltlf::Step step_of(const Label& label) {
    ltlf::Step step;
    for (const auto& [p, v] : label) {
        if (v) step.insert(p);
    }
    return step;
}

std::string serialize(const ProbabilisticAutomaton& a) {
    std::vector<const State*> states;
    for (const auto& s : a.states) states.push_back(&s);
    std::stable_sort(states.begin(), states.end(),
                     [](const State* x, const State* y) { return std::tie(x->layer, x->id) < std::tie(y->layer, y->id); });
    std::vector<Transition> transitions = a.transitions;
    std::stable_sort(transitions.begin(), transitions.end(),
                     [](const Transition& x, const Transition& y) { return std::tie(x.from, x.to) < std::tie(y.from, y.to); });
    std::vector<StateId> accepting = a.accepting;
    std::sort(accepting.begin(), accepting.end());

    json js = json::array();
    for (const State* s : states) {
        json label = nullptr;
        if (s->label) {
            label = json::object();
            for (const auto& [p, v] : *s->label) label[p.name()] = v;
        }
        js.push_back({{"id", s->id}, {"layer", s->layer}, {"label", std::move(label)}});
    }
    json jt = json::array();
    for (const auto& t : transitions) jt.push_back({{"from", t.from}, {"to", t.to}, {"p", t.p}});
    json j{{"video_id", a.video_id},
           {"states", std::move(js)},
           {"initial", a.initial},
           {"accepting", accepting},
           {"transitions", std::move(jt)}};
    return j.dump(2) + "\n";
}

ProbabilisticAutomaton deserialize(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    auto state_id = [](const json& v, const std::string& at) -> StateId {
        auto x = get_count(v, at);
        if (x > UINT32_MAX) throw FormatError("state id out of range", at);
        return static_cast<StateId>(x);
    };

    ProbabilisticAutomaton a;
    a.video_id = j.is_object() && j.contains("video_id") ? get_string(j["video_id"], "/video_id") : "";
    std::set<StateId> ids;
    const json& states = get_array(field(j, "states", ""), "/states");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string at = "/states/" + std::to_string(i);
        State s;
        s.id = state_id(field(states[i], "id", at), at + "/id");
        auto layer = get_count(field(states[i], "layer", at), at + "/layer");
        if (layer > UINT32_MAX) throw FormatError("layer out of range", at + "/layer");
        s.layer = static_cast<std::uint32_t>(layer);
        const json& label = field(states[i], "label", at);
        if (!label.is_null()) {
            if (!label.is_object()) throw FormatError("label must be an object or null", at + "/label");
            Label l;
            for (const auto& [name, value] : label.items()) {
                std::string vat = at + "/label/" + escape(name);
                l.emplace(proposition_at(name, vat), get_bool(value, vat));
            }
            s.label = std::move(l);
        }
        if (!ids.insert(s.id).second) throw FormatError("duplicate state id " + std::to_string(s.id), at + "/id");
        a.states.push_back(std::move(s));
    }
    a.initial = state_id(field(j, "initial", ""), "/initial");
    if (!ids.contains(a.initial)) throw FormatError("unknown state id " + std::to_string(a.initial), "/initial");
    const json& accepting = get_array(field(j, "accepting", ""), "/accepting");
    for (std::size_t i = 0; i < accepting.size(); ++i) {
        const std::string at = "/accepting/" + std::to_string(i);
        StateId s = state_id(accepting[i], at);
        if (!ids.contains(s)) throw FormatError("unknown state id " + std::to_string(s), at);
        a.accepting.push_back(s);
    }
    const json& transitions = get_array(field(j, "transitions", ""), "/transitions");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const std::string at = "/transitions/" + std::to_string(i);
        Transition t;
        t.from = state_id(field(transitions[i], "from", at), at + "/from");
        t.to = state_id(field(transitions[i], "to", at), at + "/to");
        t.p = number_field(transitions[i], "p", at);
        if (!ids.contains(t.from)) throw FormatError("unknown state id " + std::to_string(t.from), at + "/from");
        if (!ids.contains(t.to)) throw FormatError("unknown state id " + std::to_string(t.to), at + "/to");
        a.transitions.push_back(t);
    }
    return a;
}

ProbabilisticAutomaton load_automaton(const std::string& path) { return deserialize(detail::read_file(path)); }

void save_automaton(const ProbabilisticAutomaton& a, const std::string& path) { detail::write_file(path, serialize(a)); }

}  // namespace vsearch::automaton
