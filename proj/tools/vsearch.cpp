// vsearch: calibrate detectors, build automata, verify specifications and search videos.
//
// Exit codes: 0 success, 1 usage, 2 malformed input, 3 verification resource limit.

#include <charconv>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vsearch/automaton.hpp"
#include "vsearch/calibration.hpp"
#include "vsearch/checker.hpp"
#include "vsearch/errors.hpp"
#include "vsearch/nl2spec.hpp"
#include "vsearch/search.hpp"

namespace {

using namespace vsearch;

std::string shortest(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

void write_or_print(const std::string& content, const std::string& path, void (*save)(const std::string&, const std::string&)) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        save(content, path);
    }
}

void save_text(const std::string& content, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw Error("cannot write '" + path + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal-logic video search over probabilistic automata"};
    app.require_subcommand(1);

    std::string samples, calib, trace, out, automaton_path, spec_path, traces_dir, results_path, gt_path, rules_path,
        props_list, backend;
    double bin_width = 0.02, threshold = 0.5;
    std::size_t chunk_len = 0, intervals = 20;
    unsigned threads = 0;
    bool oracle = false;
    std::vector<std::string> formula_ids;

    auto* cal = app.add_subcommand("calibrate", "Fit the confidence-to-probability mapping from labeled samples");
    cal->add_option("--samples", samples, "Samples JSON [{confidence, correct}]")->required();
    cal->add_option("--bin-width", bin_width, "Reliability bin width")->check(CLI::Range(1e-6, 1.0));
    cal->add_option("-o,--output", out, "Calibration JSON (stdout if omitted)");

    auto* aut = app.add_subcommand("automaton", "Build the probabilistic automaton of a detection trace");
    aut->add_option("--trace", trace, "Detection trace JSON")->required();
    aut->add_option("--calib", calib, "Calibration JSON (the published mapping if omitted)");
    aut->add_option("--props", props_list, "Comma-separated subset of propositions");
    aut->add_option("-o,--output", out, "Automaton JSON (stdout if omitted)");

    auto* chk = app.add_subcommand("check", "Probability that an automaton satisfies each formula of a spec");
    chk->add_option("--automaton", automaton_path, "Automaton JSON")->required();
    chk->add_option("--spec", spec_path, "Spec JSON")->required();
    chk->add_flag("--oracle", oracle, "Also enumerate trajectories explicitly and report both values");

    auto* srch = app.add_subcommand("search", "Verify every trace in a directory against a spec");
    srch->add_option("--traces", traces_dir, "Directory of detection trace JSON files")->required();
    srch->add_option("--spec", spec_path, "Spec JSON")->required();
    srch->add_option("--calib", calib, "Calibration JSON (the published mapping if omitted)");
    srch->add_option("--threshold", threshold, "Inclusion threshold; probabilities must exceed it")->check(CLI::Range(0.0, 1.0));
    srch->add_option("--chunk-len", chunk_len, "Split each trace into chunks of this many frames")->check(CLI::PositiveNumber);
    srch->add_option("--threads", threads, "Worker threads (0: all cores)");
    srch->add_option("-o,--output", out, "Results CSV (stdout if omitted)");

    auto* met = app.add_subcommand("metrics", "Interval precision, recall and search accuracy against ground truth");
    met->add_option("--results", results_path, "Results CSV")->required();
    met->add_option("--ground-truth", gt_path, "Ground-truth JSON")->required();
    met->add_option("--intervals", intervals, "Number of probability intervals")->check(CLI::PositiveNumber);
    met->add_option("--formula", formula_ids, "Formula ids to report (all if omitted)");
    met->add_option("-o,--output", out, "Metrics CSV (stdout if omitted)");

    auto* nl = app.add_subcommand("nl2ltl", "Translate natural-language rules into a spec");
    nl->add_option("--rules", rules_path, "Rules, one per line")->required();
    nl->add_option("--props", props_list, "Comma-separated propositions (extracted from the rules if omitted)");
    nl->add_option("--backend", backend, "fixture:PATH or http:URL")->required();
    nl->add_option("-o,--output", out, "Spec JSON (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    auto model = [&] { return calib.empty() ? calibration::CalibrationModel::grounded_sam() : calibration::load_calibration(calib); };

    try {
        if (*cal) {
            auto s = calibration::load_samples(samples);
            auto m = calibration::calibrate(s, bin_width);
            std::cerr << "k = " << m.k() << ", x0 = " << m.x0() << ", t_true = " << m.t_true() << ", t_false = " << m.t_false() << "\n";
            write_or_print(calibration::to_json(m), out, save_text);
        } else if (*aut) {
            auto t = automaton::load_trace(trace);
            ltlf::PropSet props(t.propositions.begin(), t.propositions.end());
            if (!props_list.empty()) {
                props.clear();
                for (const auto& p : split_commas(props_list)) props.insert(ltlf::Proposition(p));
            }
            auto a = automaton::frames_to_automaton(t, model(), props);
            write_or_print(automaton::serialize(a), out, save_text);
        } else if (*chk) {
            auto a = automaton::load_automaton(automaton_path);
            auto spec = load_spec(spec_path);
            for (const auto& f : spec.formulas()) {
                auto r = checker::check_probability(a, f.formula, f.id);
                std::cout << f.id << "\t" << shortest(r.probability) << "\t" << percent(r.probability);
                if (oracle) {
                    auto e = checker::enumerate_probability(a, f.formula, f.id);
                    std::cout << "\toracle " << shortest(e.probability) << " over " << *e.trajectory_count << " trajectories";
                }
                std::cout << "\n";
            }
        } else if (*srch) {
            auto traces = search::load_traces(traces_dir);
            if (chunk_len > 0) {
                std::vector<automaton::DetectionTrace> chunks;
                for (const auto& t : traces) {
                    for (auto& c : search::chunk_trace(t, chunk_len)) chunks.push_back(std::move(c));
                }
                traces = std::move(chunks);
            }
            search::SearchOptions opt;
            opt.threshold = threshold;
            opt.threads = threads;
            auto report = search::search(traces, load_spec(spec_path), model(), opt);
            for (const auto& r : report.results) {
                for (const auto& id : r.ties) std::cerr << "note: " << r.video_id << " scores exactly " << threshold << " on " << id << " and is excluded\n";
                if (r.included) std::cerr << "included: " << r.video_id << "\n";
            }
            for (const auto& f : report.failures) std::cerr << "failed: " << f.video_id << ": " << f.message << "\n";
            write_or_print(search::results_to_csv(search::scores_of(report.results)), out, save_text);
        } else if (*met) {
            auto scores = search::load_results(results_path);
            auto gt = search::load_ground_truth(gt_path);
            if (formula_ids.empty()) {
                for (const auto& s : scores) {
                    if (std::find(formula_ids.begin(), formula_ids.end(), s.formula_id) == formula_ids.end()) formula_ids.push_back(s.formula_id);
                }
            }
            std::vector<std::string> missing;
            auto rows = search::build_report(scores, gt, formula_ids, intervals, &missing);
            for (const auto& m : missing) std::cerr << "missing annotation: " << m << "\n";
            write_or_print(search::report_to_csv(rows), out, save_text);
        } else if (*nl) {
            auto rules = nl2spec::load_rules(rules_path);
            auto b = nl2spec::make_backend(backend);
            auto phrases = props_list.empty() ? nl2spec::extract_noun_phrases(rules, *b) : split_commas(props_list);
            auto t = nl2spec::rules_to_ltlf(rules, phrases, *b);
            for (const auto& e : t.errors) std::cerr << "rule " << e.rule_index + 1 << ": " << e.message << "\n";
            write_or_print(spec_to_json(t.spec), out, save_text);
        }
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
