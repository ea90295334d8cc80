#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vsearch/automaton.hpp"
#include "vsearch/calibration.hpp"
#include "vsearch/search.hpp"
#include "vsearch/spec.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = VSEARCH_FIXTURES;
const std::string kCli = VSEARCH_CLI;

struct Run {
    int code;
    std::string out;
};

// Runs the CLI with stdout captured to a file.
Run run(const std::string& args) {
    auto out = fs::temp_directory_path() / "vsearch_cli_stdout.txt";
    int status = std::system((kCli + " " + args + " > " + out.string() + " 2>/dev/null").c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("vsearch_cli_" + std::to_string(std::rand()))) { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run("").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("check --spec x.json").code == 1);
    CHECK(run("search --traces d --spec s --threshold 2").code == 1);
    CHECK(run("--help").code == 0);
}

TEST_CASE("input errors exit 2") {
    CHECK(run("check --automaton " + kFixtures + "/campus_trace.json --spec " + kFixtures + "/specs/faces.json").code == 2);
    CHECK(run("automaton --trace /nonexistent.json").code == 2);
    CHECK(run("nl2ltl --rules " + kFixtures + "/nl/faces_rules.txt --backend fixture:/nonexistent.json").code == 2);
}

TEST_CASE("automaton then check") {
    TempDir d;
    auto r = run("automaton --trace " + kFixtures + "/campus_trace.json -o " + (d / "a.json"));
    REQUIRE(r.code == 0);
    auto a = vsearch::automaton::load_automaton(d / "a.json");
    CHECK(vsearch::automaton::validate(a).empty());
    auto c = run("check --automaton " + (d / "a.json") + " --spec " + kFixtures + "/specs/faces.json --oracle");
    CHECK(c.code == 0);
    CHECK(c.out.starts_with("phi\t0.00706800"));
    CHECK(c.out.find("0.71%") != std::string::npos);
    CHECK(c.out.find("over 8 trajectories") != std::string::npos);
}

TEST_CASE("resource limits exit 3") {
    TempDir d;
    // A trace long enough to exceed the enumeration cap.
    vsearch::automaton::DetectionTrace t{"long", 1.0, {vsearch::ltlf::Proposition("faces")}, {}};
    for (int i = 0; i < 25; ++i) t.frames.push_back({i, double(i), {{vsearch::ltlf::Proposition("faces"), 0.56}}, {}});
    vsearch::automaton::save_trace(t, d / "t.json");
    REQUIRE(run("automaton --trace " + (d / "t.json") + " -o " + (d / "a.json")).code == 0);
    CHECK(run("check --automaton " + (d / "a.json") + " --spec " + kFixtures + "/specs/faces.json").code == 0);
    CHECK(run("check --automaton " + (d / "a.json") + " --spec " + kFixtures + "/specs/faces.json --oracle").code == 3);
}

TEST_CASE("search, chunking and metrics") {
    TempDir d;
    auto r = run("search --traces " + kFixtures + "/campus_videos --spec " + kFixtures + "/specs/faces.json -o " + (d / "r.csv"));
    REQUIRE(r.code == 0);
    auto scores = vsearch::search::load_results(d / "r.csv");
    REQUIRE(scores.size() == 3);
    CHECK_FALSE(scores[0].included);
    CHECK(scores[1].included);
    CHECK_FALSE(scores[2].included);

    fs::create_directories(d.path / "drive");
    fs::copy_file(kFixtures + "/drive_300_trace.json", d.path / "drive" / "drive.json");
    auto c = run("search --traces " + (d / "drive") + " --spec " + kFixtures + "/specs/driving.json --chunk-len 30 --threads 2");
    REQUIRE(c.code == 0);
    auto chunked = vsearch::search::results_from_csv(c.out);
    CHECK(chunked.size() == 30);
    CHECK(chunked.front().video_id == "drive#1");
    CHECK(chunked.back().video_id == "drive#10");

    auto m = run("metrics --results " + kFixtures + "/metrics/results.csv --ground-truth " + kFixtures +
                 "/metrics/ground_truth.json --intervals 20 -o " + (d / "m.csv"));
    REQUIRE(m.code == 0);
    std::ifstream in(d / "m.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "formula_id,lo,hi,n,precision,recall,accuracy");
    CHECK(first == "phi,0,0.05,3,0.3333333333333333,1,0.6666666666666666");
}

TEST_CASE("calibrate and nl2ltl") {
    TempDir d;
    std::ofstream s(d / "samples.json");
    s << "[";
    for (int i = 0; i < 1000; ++i) s << (i ? "," : "") << "{\"confidence\": " << i / 999.0 << ", \"correct\": " << (i % 7 < (i * 7) / 1000 ? "true" : "false") << "}";
    s << "]";
    s.close();
    REQUIRE(run("calibrate --samples " + (d / "samples.json") + " --bin-width 0.05 -o " + (d / "c.json")).code == 0);
    auto model = vsearch::calibration::load_calibration(d / "c.json");
    CHECK(model.bins().size() == 20);
    CHECK(model.t_false() < model.t_true());

    auto nl = run("nl2ltl --rules " + kFixtures + "/nl/driving_rules.txt --backend fixture:" + kFixtures + "/nl/completions.json");
    REQUIRE(nl.code == 0);
    auto spec = vsearch::spec_from_json(nl.out);
    CHECK(spec.formulas().size() == 3);
    CHECK(spec.propositions().contains(vsearch::ltlf::Proposition("stop_sign")));
}
