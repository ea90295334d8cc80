#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsearch/automaton.hpp"
#include "vsearch/calibration.hpp"
#include "vsearch/dfa.hpp"
#include "vsearch/spec.hpp"

namespace vsearch::search {

struct SearchResult {
    std::string video_id;
    std::map<std::string, double> probabilities;  // formula id -> satisfaction probability
    bool included = false;                        // every probability strictly above threshold
    double threshold = 0.5;
    std::vector<std::string> ties;                // formula ids scoring exactly the threshold
};

struct VideoFailure {
    std::string video_id;
    std::string message;
};

struct SearchReport {
    std::vector<SearchResult> results;   // ordered by video_id, digit runs compared numerically
    std::vector<VideoFailure> failures;  // ordered by video_id
};

struct SearchOptions {
    double threshold = 0.5;
    unsigned threads = 0;  // 0: hardware concurrency
    ltlf::DfaOptions dfa;
};

// Builds the automaton over the spec's propositions once and checks every formula.
// Errors propagate with the video id in the message.
SearchResult verify_video(const automaton::DetectionTrace& trace, const SpecSet& spec,
                          const calibration::CalibrationModel& model, double threshold = 0.5,
                          const ltlf::DfaOptions& dfa = {});

// Verifies every trace, in parallel. A failing video lands in `failures` and does not stop
// the others. Throws DomainError for a threshold outside [0,1].
SearchReport search(const std::vector<automaton::DetectionTrace>& traces, const SpecSet& spec,
                    const calibration::CalibrationModel& model, const SearchOptions& options = {});

// Consecutive chunks of `chunk_len` frames with ids "<video_id>#1", "#2", ...; the last may
// be shorter. A trace no longer than one chunk is returned unchanged.
std::vector<automaton::DetectionTrace> chunk_trace(const automaton::DetectionTrace& trace, std::size_t chunk_len);

// Every *.json trace in a directory, sorted by file name.
std::vector<automaton::DetectionTrace> load_traces(const std::string& dir);

// One scored (video, formula) pair.
struct Score {
    std::string video_id;
    std::string formula_id;
    double probability = 0.0;
    bool included = false;

    friend bool operator==(const Score&, const Score&) = default;
};

std::vector<Score> scores_of(const std::vector<SearchResult>& results);

// Results CSV: video_id,formula_id,probability,included.
std::string results_to_csv(const std::vector<Score>& scores);
std::vector<Score> results_from_csv(const std::string& text);
void save_results(const std::vector<Score>& scores, const std::string& path);
std::vector<Score> load_results(const std::string& path);

// video id -> formula id -> whether the video actually satisfies the formula.
using GroundTruth = std::map<std::string, std::map<std::string, bool>>;

GroundTruth ground_truth_from_json(const std::string& text);
GroundTruth load_ground_truth(const std::string& path);

struct IntervalMetrics {
    double lo = 0.0;
    double hi = 0.0;
    bool closed = false;                 // hi belongs to the interval (only the last one)
    std::uint64_t n = 0;                 // scored videos in the interval
    std::uint64_t satisfied = 0;         // of which truly satisfy the formula
    std::optional<double> precision;     // satisfied / n
    std::optional<double> recall;        // satisfied videos scored in [lo, 1] / all satisfied
};

struct AccuracyInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool closed = false;
    std::uint64_t n = 0;
    std::optional<double> accuracy;
};

struct MetricsTable {
    std::vector<IntervalMetrics> intervals;
    std::vector<std::string> missing;  // scored videos lacking an annotation for the formula
};

struct AccuracyTable {
    std::vector<AccuracyInterval> intervals;
    std::vector<std::string> missing;
};

// Precision and recall over [0,1/n), ..., [1-1/n,1]. Throws InputError for n_intervals < 1.
MetricsTable interval_metrics(const std::vector<Score>& scores, const GroundTruth& gt, const std::string& formula_id,
                              std::size_t n_intervals = 20);

// Video search accuracy over the same intervals, any interval straddling 0.5 split in two:
// below 0.5 a bin is right about the videos that do not satisfy, above about those that do.
AccuracyTable search_accuracy(const std::vector<Score>& scores, const GroundTruth& gt, const std::string& formula_id,
                              std::size_t n_intervals = 20);

struct ReportRow {
    std::string formula_id;
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t n = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> accuracy;
};

// All three metrics per formula over the interval grid refined at 0.5.
std::vector<ReportRow> build_report(const std::vector<Score>& scores, const GroundTruth& gt,
                                    const std::vector<std::string>& formula_ids, std::size_t n_intervals = 20,
                                    std::vector<std::string>* missing = nullptr);

// CSV with header formula_id,lo,hi,n,precision,recall,accuracy; undefined values are empty.
std::string report_to_csv(const std::vector<ReportRow>& rows);
void emit_report(const std::vector<ReportRow>& rows, const std::string& path);

}  // namespace vsearch::search
