#include "vsearch/search.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json_util.hpp"
#include "vsearch/checker.hpp"

namespace vsearch::search {

namespace {

// Orders digit runs by value so chunk "v#2" precedes "v#10".
bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            auto x = a.substr(i, i2 - i), y = b.substr(j, j2 - j);
            x.erase(0, std::min(x.find_first_not_of('0'), x.size()));
            y.erase(0, std::min(y.find_first_not_of('0'), y.size()));
            if (x.size() != y.size()) return x.size() < y.size();
            if (x != y) return x < y;
            i = i2, j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i, ++j;
        }
    }
    if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
    return a < b;  // tie-break, e.g. "v01" vs "v1"
}

std::string prefix(const std::string& video_id) { return "video '" + video_id + "': "; }

std::string number(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw FormatError("unterminated quoted field", "line " + std::to_string(line_no));
    out.push_back(std::move(cur));
    return out;
}

// Interval edges 0 = e0 < ... < en = 1, optionally with 0.5 added.
std::vector<double> edges(std::size_t n, bool split_half) {
    if (n < 1) throw InputError("number of intervals must be at least 1");
    std::vector<double> e;
    for (std::size_t i = 0; i < n; ++i) e.push_back(static_cast<double>(i) / static_cast<double>(n));
    e.push_back(1.0);
    if (split_half && std::find(e.begin(), e.end(), 0.5) == e.end()) e.insert(std::upper_bound(e.begin(), e.end(), 0.5), 0.5);
    return e;
}

std::size_t interval_of(const std::vector<double>& e, double p) {
    auto it = std::upper_bound(e.begin(), e.end() - 1, p);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - e.begin() - 1));
}

struct Counts {
    std::vector<std::uint64_t> n, satisfied;
    std::uint64_t total_satisfied = 0;
    std::vector<std::string> missing;
};

Counts count(const std::vector<Score>& scores, const GroundTruth& gt, const std::string& formula_id,
             const std::vector<double>& e) {
    Counts c;
    c.n.assign(e.size() - 1, 0);
    c.satisfied.assign(e.size() - 1, 0);
    std::set<std::string> missing;
    for (const auto& s : scores) {
        if (s.formula_id != formula_id) continue;
        if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
            throw DomainError(prefix(s.video_id) + "probability " + number(s.probability) + " outside [0,1]");
        }
        auto v = gt.find(s.video_id);
        if (v == gt.end() || !v->second.contains(formula_id)) {
            missing.insert(s.video_id);
            continue;
        }
        const bool sat = v->second.at(formula_id);
        const auto i = interval_of(e, s.probability);
        ++c.n[i];
        if (sat) {
            ++c.satisfied[i];
            ++c.total_satisfied;
        }
    }
    c.missing.assign(missing.begin(), missing.end());
    return c;
}

std::optional<double> ratio(std::uint64_t a, std::uint64_t b) {
    if (b == 0) return std::nullopt;
    return static_cast<double>(a) / static_cast<double>(b);
}

std::vector<IntervalMetrics> metrics_over(const Counts& c, const std::vector<double>& e) {
    std::vector<IntervalMetrics> out;
    std::uint64_t tail = c.total_satisfied;  // satisfied videos scored at or above the current lo
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        IntervalMetrics m;
        m.lo = e[i];
        m.hi = e[i + 1];
        m.closed = i + 2 == e.size();
        m.n = c.n[i];
        m.satisfied = c.satisfied[i];
        m.precision = ratio(m.satisfied, m.n);
        m.recall = ratio(tail, c.total_satisfied);
        tail -= c.satisfied[i];
        out.push_back(m);
    }
    return out;
}

std::optional<double> accuracy_of(double lo, double hi, std::uint64_t n, std::uint64_t satisfied) {
    if (n == 0) return std::nullopt;
    if (hi <= 0.5) return ratio(n - satisfied, n);
    if (lo >= 0.5) return ratio(satisfied, n);
    return std::nullopt;
}

}  // namespace

SearchResult verify_video(const automaton::DetectionTrace& trace, const SpecSet& spec,
                          const calibration::CalibrationModel& model, double threshold, const ltlf::DfaOptions& dfa) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in [0,1]");
    if (spec.formulas().empty()) throw InputError("specification has no formulas");
    SearchResult r;
    r.video_id = trace.video_id;
    r.threshold = threshold;
    try {
        const auto a = automaton::frames_to_automaton(trace, model, spec.propositions());
        r.included = true;
        for (const auto& f : spec.formulas()) {
            const double p = checker::check_probability(a, f.formula, f.id, dfa).probability;
            r.probabilities[f.id] = p;
            if (!(p > threshold)) r.included = false;
            if (p == threshold) r.ties.push_back(f.id);
        }
    } catch (const PropositionMismatchError& e) {
        throw PropositionMismatchError(prefix(trace.video_id) + e.what());
    } catch (const EmptyTraceError&) {
        throw InputError(prefix(trace.video_id) + "trace has no frames");
    } catch (const ResourceError& e) {
        throw ResourceError(prefix(trace.video_id) + e.what());
    } catch (const InputError& e) {
        throw InputError(prefix(trace.video_id) + e.what());
    }
    return r;
}

SearchReport search(const std::vector<automaton::DetectionTrace>& traces, const SpecSet& spec,
                    const calibration::CalibrationModel& model, const SearchOptions& options) {
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) throw DomainError("threshold must lie in [0,1]");
    SearchReport report;
    std::mutex lock;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < traces.size();) {
            try {
                auto r = verify_video(traces[i], spec, model, options.threshold, options.dfa);
                std::lock_guard g(lock);
                report.results.push_back(std::move(r));
            } catch (const std::exception& e) {
                std::lock_guard g(lock);
                report.failures.push_back({traces[i].video_id, e.what()});
            }
        }
    };
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, traces.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::sort(report.results.begin(), report.results.end(),
              [](const SearchResult& a, const SearchResult& b) { return natural_less(a.video_id, b.video_id); });
    std::sort(report.failures.begin(), report.failures.end(),
              [](const VideoFailure& a, const VideoFailure& b) { return natural_less(a.video_id, b.video_id); });
    return report;
}

std::vector<automaton::DetectionTrace> chunk_trace(const automaton::DetectionTrace& trace, std::size_t chunk_len) {
    if (chunk_len < 1) throw InputError("chunk length must be at least 1");
    if (trace.frames.size() <= chunk_len) return {trace};
    std::vector<automaton::DetectionTrace> out;
    for (std::size_t start = 0, k = 1; start < trace.frames.size(); start += chunk_len, ++k) {
        automaton::DetectionTrace c{trace.video_id + "#" + std::to_string(k), trace.frame_rate, trace.propositions, {}};
        auto end = std::min(trace.frames.size(), start + chunk_len);
        c.frames.assign(trace.frames.begin() + static_cast<std::ptrdiff_t>(start),
                        trace.frames.begin() + static_cast<std::ptrdiff_t>(end));
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<automaton::DetectionTrace> load_traces(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw InputError("'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<automaton::DetectionTrace> out;
    for (const auto& f : files) {
        try {
            out.push_back(automaton::load_trace(f.string()));
        } catch (const FormatError& e) {
            throw FormatError(f.filename().string() + ": " + e.what(), e.location());
        }
    }
    return out;
}

std::vector<Score> scores_of(const std::vector<SearchResult>& results) {
    std::vector<Score> out;
    for (const auto& r : results) {
        for (const auto& [id, p] : r.probabilities) out.push_back({r.video_id, id, p, r.included});
    }
    return out;
}

std::string results_to_csv(const std::vector<Score>& scores) {
    std::string out = "video_id,formula_id,probability,included\n";
    for (const auto& s : scores) {
        out += csv_field(s.video_id) + "," + csv_field(s.formula_id) + "," + number(s.probability) + "," +
               (s.included ? "true" : "false") + "\n";
    }
    return out;
}

std::vector<Score> results_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<Score> out;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string at = "line " + std::to_string(line_no);
        auto cells = csv_split(line, line_no);
        if (!header) {
            if (cells != std::vector<std::string>{"video_id", "formula_id", "probability", "included"}) {
                throw FormatError("expected header video_id,formula_id,probability,included", at);
            }
            header = true;
            continue;
        }
        if (cells.size() != 4) throw FormatError("expected 4 columns", at);
        Score s{cells[0], cells[1], 0.0, false};
        auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), s.probability);
        if (ec != std::errc() || ptr != cells[2].data() + cells[2].size() || !(s.probability >= 0.0 && s.probability <= 1.0)) {
            throw FormatError("probability must be a number in [0,1]", at);
        }
        if (cells[3] == "true") {
            s.included = true;
        } else if (cells[3] != "false") {
            throw FormatError("included must be true or false", at);
        }
        out.push_back(std::move(s));
    }
    if (!header) throw FormatError("missing header", "line 1");
    return out;
}

void save_results(const std::vector<Score>& scores, const std::string& path) { detail::write_file(path, results_to_csv(scores)); }

std::vector<Score> load_results(const std::string& path) { return results_from_csv(detail::read_file(path)); }

GroundTruth ground_truth_from_json(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    if (!j.is_object()) throw FormatError("expected an object", "/");
    GroundTruth gt;
    for (const auto& [video, formulas] : j.items()) {
        if (!formulas.is_object()) throw FormatError("expected an object", "/" + video);
        auto& row = gt[video];
        for (const auto& [formula, value] : formulas.items()) row[formula] = get_bool(value, "/" + video + "/" + formula);
    }
    return gt;
}

GroundTruth load_ground_truth(const std::string& path) { return ground_truth_from_json(detail::read_file(path)); }

MetricsTable interval_metrics(const std::vector<Score>& scores, const GroundTruth& gt, const std::string& formula_id,
                              std::size_t n_intervals) {
    const auto e = edges(n_intervals, false);
    auto c = count(scores, gt, formula_id, e);
    return {metrics_over(c, e), std::move(c.missing)};
}

AccuracyTable search_accuracy(const std::vector<Score>& scores, const GroundTruth& gt, const std::string& formula_id,
                              std::size_t n_intervals) {
    const auto e = edges(n_intervals, true);
    auto c = count(scores, gt, formula_id, e);
    AccuracyTable t;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        t.intervals.push_back({e[i], e[i + 1], i + 2 == e.size(), c.n[i], accuracy_of(e[i], e[i + 1], c.n[i], c.satisfied[i])});
    }
    t.missing = std::move(c.missing);
    return t;
}

std::vector<ReportRow> build_report(const std::vector<Score>& scores, const GroundTruth& gt,
                                    const std::vector<std::string>& formula_ids, std::size_t n_intervals,
                                    std::vector<std::string>* missing) {
    const auto e = edges(n_intervals, true);
    std::vector<ReportRow> rows;
    std::set<std::string> absent;
    for (const auto& id : formula_ids) {
        auto c = count(scores, gt, id, e);
        for (const auto& m : metrics_over(c, e)) {
            rows.push_back({id, m.lo, m.hi, m.n, m.precision, m.recall, accuracy_of(m.lo, m.hi, m.n, m.satisfied)});
        }
        absent.insert(c.missing.begin(), c.missing.end());
    }
    if (missing) missing->assign(absent.begin(), absent.end());
    return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    auto cell = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
    std::string out = "formula_id,lo,hi,n,precision,recall,accuracy\n";
    for (const auto& r : rows) {
        out += csv_field(r.formula_id) + "," + number(r.lo) + "," + number(r.hi) + "," + std::to_string(r.n) + "," +
               cell(r.precision) + "," + cell(r.recall) + "," + cell(r.accuracy) + "\n";
    }
    return out;
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& path) { detail::write_file(path, report_to_csv(rows)); }

}  // namespace vsearch::search
