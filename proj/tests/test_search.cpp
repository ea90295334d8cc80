#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <random>

#include "json_util.hpp"
#include "support/random_automaton.hpp"
#include "vsearch/checker.hpp"
#include "vsearch/errors.hpp"
#include "vsearch/search.hpp"

using namespace vsearch;
using namespace vsearch::search;
using vsearch::automaton::DetectionTrace;
using vsearch::calibration::CalibrationModel;

namespace {

const std::string kFixtures = VSEARCH_FIXTURES;
const auto kModel = CalibrationModel::grounded_sam();

std::optional<double> fraction(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j[0].get<double>() / j[1].get<double>();
}

std::vector<std::string> included(const SearchReport& r) {
    std::vector<std::string> out;
    for (const auto& x : r.results) {
        if (x.included) out.push_back(x.video_id);
    }
    return out;
}

}  // namespace

TEST_CASE("driving clip") {
    auto trace = automaton::load_trace(kFixtures + "/driving_trace.json");
    auto spec = load_spec(kFixtures + "/specs/driving.json");
    auto r = verify_video(trace, spec, kModel);
    CHECK(r.video_id == "driving");
    CHECK(r.threshold == 0.5);
    CHECK(r.probabilities.at("phi1") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.probabilities.at("phi3") == doctest::Approx(1.0).epsilon(1e-12));
    // Braking for the stop sign is followed by accelerating, so every trajectory violates phi2.
    const auto a = automaton::frames_to_automaton(trace, kModel, spec.propositions());
    double oracle = checker::enumerate_probability(a, spec.formulas()[1].formula).probability;
    CHECK(r.probabilities.at("phi2") == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == 0.0);
    CHECK_FALSE(r.included);
}

TEST_CASE("verify_video errors") {
    auto trace = automaton::load_trace(kFixtures + "/campus_trace.json");
    auto spec = load_spec(kFixtures + "/specs/driving.json");
    try {
        verify_video(trace, spec, kModel);
        FAIL("expected PropositionMismatchError");
    } catch (const PropositionMismatchError& e) {
        CHECK(std::string(e.what()).find("campus") != std::string::npos);
    }
    auto faces = load_spec(kFixtures + "/specs/faces.json");
    CHECK_THROWS_AS(verify_video(trace, faces, kModel, 1.5), DomainError);
    ltlf::DfaOptions tiny;
    tiny.max_states = 1;
    CHECK_THROWS_AS(verify_video(trace, faces, kModel, 0.5, tiny), ResourceError);
}

TEST_CASE("three faces videos") {
    auto traces = load_traces(kFixtures + "/campus_videos");
    REQUIRE(traces.size() == 3);
    auto spec = load_spec(kFixtures + "/specs/faces.json");
    auto middle = verify_video(traces[1], spec, kModel);
    CHECK(middle.probabilities.at("phi") == 1.0);
    CHECK(middle.included);

    auto report = search::search(traces, spec, kModel);
    REQUIRE(report.results.size() == 3);
    CHECK(report.failures.empty());
    CHECK(report.results[0].probabilities.at("phi") == doctest::Approx(0.007068).epsilon(1e-9));
    CHECK(report.results[2].probabilities.at("phi") == 0.0);
    CHECK(included(report) == std::vector<std::string>{"video2"});

    SearchOptions strict;
    strict.threshold = 1.0;
    CHECK(included(search::search(traces, spec, kModel, strict)).empty());
    CHECK(search::search({}, spec, kModel).results.empty());
    strict.threshold = -0.1;
    CHECK_THROWS_AS(search::search(traces, spec, kModel, strict), DomainError);
}

TEST_CASE("threshold ties are excluded and recorded") {
    auto trace = automaton::load_trace(kFixtures + "/campus_trace.json");
    auto spec = load_spec(kFixtures + "/specs/faces.json");
    auto r = verify_video(trace, spec, kModel, 0.0);
    CHECK(r.included);
    auto all_false = automaton::load_trace(kFixtures + "/campus_videos/video3.json");
    auto z = verify_video(all_false, spec, kModel, 0.0);
    CHECK_FALSE(z.included);
    CHECK(z.ties == std::vector<std::string>{"phi"});
}

TEST_CASE("search properties over random collections") {
    std::mt19937_64 rng(99);
    std::vector<ltlf::Proposition> props{ltlf::Proposition("a"), ltlf::Proposition("b")};
    const auto model = testing::soft_model();
    SpecSet spec(ltlf::make_props({"a", "b"}),
                 {{"f1", ltlf::parse_formula("F a", ltlf::make_props({"a", "b"})), std::nullopt},
                  {"f2", ltlf::parse_formula("G (a -> X b)", ltlf::make_props({"a", "b"})), std::nullopt}});
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<DetectionTrace> traces;
        for (int v = 0; v < 12; ++v) {
            auto t = testing::random_trace(rng, props, std::uniform_int_distribution<int>(1, 6)(rng));
            t.video_id = "v" + std::to_string(v);
            traces.push_back(std::move(t));
        }
        // A broken video fails alone.
        DetectionTrace broken{"broken", 1.0, {ltlf::Proposition("a")}, {}};
        broken.frames.push_back({0, 0.0, {{ltlf::Proposition("a"), 0.5}}, {}});
        traces.push_back(broken);

        SearchOptions opt;
        std::vector<std::string> previous;
        bool first = true;
        for (double t = 0.1; t < 0.95; t += 0.1) {
            opt.threshold = t;
            auto now = included(search::search(traces, spec, model, opt));
            std::sort(now.begin(), now.end());
            if (!first) CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
            previous = now;
            first = false;
        }

        opt.threshold = 0.5;
        auto forward = search::search(traces, spec, model, opt);
        REQUIRE(forward.failures.size() == 1);
        CHECK(forward.failures[0].video_id == "broken");
        CHECK(forward.results.size() == 12);
        auto shuffled = traces;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        opt.threads = 3;
        auto backward = search::search(shuffled, spec, model, opt);
        CHECK(scores_of(backward.results) == scores_of(forward.results));
        for (const auto& r : forward.results) {
            double lowest = 1.0;
            for (const auto& [id, p] : r.probabilities) lowest = std::min(lowest, p);
            CHECK(r.included == (lowest > 0.5));
        }
    }
}

TEST_CASE("chunking") {
    auto trace = automaton::load_trace(kFixtures + "/campus_trace.json");
    auto chunks = chunk_trace(trace, 2);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].frames.size() == 2);
    CHECK(chunks[1].frames.size() == 2);
    CHECK(chunks[2].frames.size() == 1);
    CHECK(chunks[0].video_id == "campus#1");
    CHECK(chunks[2].video_id == "campus#3");
    CHECK(chunks[2].frames[0] == trace.frames[4]);
    CHECK(chunk_trace(trace, 5) == std::vector<DetectionTrace>{trace});
    CHECK(chunk_trace(trace, 50) == std::vector<DetectionTrace>{trace});
    CHECK_THROWS_AS(chunk_trace(trace, 0), InputError);

    auto drive = automaton::load_trace(kFixtures + "/drive_300_trace.json");
    auto spec = load_spec(kFixtures + "/specs/driving.json");
    auto parts = chunk_trace(drive, 30);
    REQUIRE(parts.size() == 10);
    auto report = search::search(parts, spec, kModel);
    REQUIRE(report.results.size() == 10);
    for (std::size_t k = 0; k < parts.size(); ++k) {
        // Standalone: the same frames as an independent video.
        DetectionTrace alone = parts[k];
        alone.video_id = "standalone";
        auto r = verify_video(alone, spec, kModel);
        const auto& chunked = report.results[k];
        CHECK(chunked.video_id == parts[k].video_id);
        for (const auto& [id, p] : r.probabilities) CHECK(std::abs(chunked.probabilities.at(id) - p) <= 1e-12);
    }
}

TEST_CASE("metrics on the hand-counted fixture") {
    auto scores = load_results(kFixtures + "/metrics/results.csv");
    auto gt = load_ground_truth(kFixtures + "/metrics/ground_truth.json");
    auto expected = nlohmann::json::parse(vsearch::detail::read_file(kFixtures + "/metrics/expected.json"));
    auto m = interval_metrics(scores, gt, "phi", 20);
    auto acc = search_accuracy(scores, gt, "phi", 20);
    CHECK(m.missing == std::vector<std::string>{"v21"});
    CHECK(acc.missing == std::vector<std::string>{"v21"});
    REQUIRE(m.intervals.size() == 20);
    REQUIRE(acc.intervals.size() == 20);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& row = expected["rows"][i];
        INFO("interval ", i);
        CHECK(m.intervals[i].lo == static_cast<double>(i) / 20.0);
        CHECK(m.intervals[i].closed == (i == 19));
        CHECK(m.intervals[i].n == row["n"].get<std::uint64_t>());
        CHECK(m.intervals[i].precision == fraction(row["precision"]));
        CHECK(m.intervals[i].recall == fraction(row["recall"]));
        CHECK(acc.intervals[i].accuracy == fraction(row["accuracy"]));
        if (i > 0) CHECK(*m.intervals[i].recall <= *m.intervals[i - 1].recall);
        total += m.intervals[i].n;
    }
    CHECK(total == 20);
}

TEST_CASE("metric definitions on small cases") {
    GroundTruth gt;
    std::vector<Score> scores;
    for (int i = 0; i < 4; ++i) {
        scores.push_back({"a" + std::to_string(i), "f", 0.31, false});
        gt["a" + std::to_string(i)]["f"] = i < 3;
    }
    auto m = interval_metrics(scores, gt, "f", 10);
    CHECK(m.intervals[3].precision == 0.75);
    CHECK(m.intervals[0].recall == 1.0);
    CHECK_FALSE(m.intervals[0].precision.has_value());

    GroundTruth g2;
    std::vector<Score> high, low;
    for (int i = 0; i < 10; ++i) {
        std::string id = "v" + std::to_string(i);
        high.push_back({id, "f", 0.92, true});
        low.push_back({id, "f", 0.01, false});
        g2[id]["f"] = i < 9;
    }
    CHECK(search_accuracy(high, g2, "f", 20).intervals[18].accuracy == 0.9);
    for (auto& [id, row] : g2) row["f"] = id == "v0";
    CHECK(search_accuracy(low, g2, "f", 20).intervals[0].accuracy == 0.9);

    CHECK_THROWS_AS(interval_metrics(scores, gt, "f", 0), InputError);
    CHECK(interval_metrics({}, gt, "f", 5).intervals.size() == 5);
}

TEST_CASE("accuracy splits intervals at one half") {
    std::vector<Score> scores{{"x", "f", 0.45, false}, {"y", "f", 0.55, false}, {"z", "f", 0.6, false}};
    GroundTruth gt{{"x", {{"f", false}}}, {"y", {{"f", true}}}, {"z", {{"f", false}}}};
    auto acc = search_accuracy(scores, gt, "f", 3);
    REQUIRE(acc.intervals.size() == 4);
    CHECK(acc.intervals[1].hi == 0.5);
    CHECK(acc.intervals[2].lo == 0.5);
    CHECK(acc.intervals[1].accuracy == 1.0);
    CHECK(acc.intervals[2].accuracy == 0.5);
    CHECK(acc.intervals[3].closed);
    auto rows = build_report(scores, gt, {"f"}, 3);
    REQUIRE(rows.size() == 4);
    CHECK(rows[2].precision == 0.5);
    CHECK(rows[2].recall == 1.0);
    CHECK(rows[3].recall == 0.0);
}

TEST_CASE("report CSV") {
    CHECK(report_to_csv({}) == "formula_id,lo,hi,n,precision,recall,accuracy\n");
    std::vector<ReportRow> rows{{"phi", 0.0, 0.05, 0, std::nullopt, 1.0, std::nullopt},
                                {"phi", 0.95, 1.0, 4, 0.75, 0.5, 0.75}};
    CHECK(report_to_csv(rows) ==
          "formula_id,lo,hi,n,precision,recall,accuracy\n"
          "phi,0,0.05,0,,1,\n"
          "phi,0.95,1,4,0.75,0.5,0.75\n");
    auto path = std::filesystem::temp_directory_path() / "vsearch_report.csv";
    emit_report(rows, path.string());
    CHECK(std::filesystem::file_size(path) == report_to_csv(rows).size());
    std::filesystem::remove(path);

    auto scores = load_results(kFixtures + "/metrics/results.csv");
    auto gt = load_ground_truth(kFixtures + "/metrics/ground_truth.json");
    std::vector<std::string> missing;
    auto report = build_report(scores, gt, {"phi"}, 20, &missing);
    CHECK(report.size() == 20);
    CHECK(missing == std::vector<std::string>{"v21"});
}

TEST_CASE("results CSV") {
    std::vector<Score> s{{"a#1", "phi1", 0.1 + 0.2, true}, {"b,\"c\"", "phi2", 1e-17, false}};
    CHECK(results_from_csv(results_to_csv(s)) == s);
    CHECK_THROWS_AS(results_from_csv(""), FormatError);
    CHECK_THROWS_AS(results_from_csv("video,formula\n"), FormatError);
    try {
        results_from_csv("video_id,formula_id,probability,included\nv,f,high,true\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.location() == "line 2");
    }
    CHECK_THROWS_AS(results_from_csv("video_id,formula_id,probability,included\nv,f,1.5,true\n"), FormatError);
    CHECK_THROWS_AS(results_from_csv("video_id,formula_id,probability,included\nv,f,0.5,yes\n"), FormatError);
}

TEST_CASE("ground truth JSON") {
    auto gt = ground_truth_from_json(R"({"v": {"f": true, "g": false}})");
    CHECK(gt.at("v").at("f"));
    CHECK_FALSE(gt.at("v").at("g"));
    try {
        ground_truth_from_json(R"({"v": {"f": 1}})");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.location() == "/v/f");
    }
    CHECK_THROWS_AS(ground_truth_from_json("[]"), FormatError);
    CHECK_THROWS_AS(load_traces(kFixtures + "/missing"), InputError);
}
