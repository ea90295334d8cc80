#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "vsearch/calibration.hpp"
#include "vsearch/errors.hpp"

using namespace vsearch;
using namespace vsearch::calibration;

namespace {

const std::string kFixtures = VSEARCH_FIXTURES;

// Bins of width 0.02 whose accuracies lie exactly on the given curve.
std::vector<ReliabilityBin> bins_from_curve(const LogisticParams& p, std::uint64_t n) {
    std::vector<ReliabilityBin> bins;
    for (int i = 0; i < 50; ++i) {
        ReliabilityBin b{i * 0.02, (i + 1) * 0.02, n, 0};
        b.correct = static_cast<std::uint64_t>(std::llround(logistic(p, b.midpoint()) * static_cast<double>(n)));
        bins.push_back(b);
    }
    return bins;
}

std::vector<CurvePoint> points_from_curve(const LogisticParams& p) {
    std::vector<CurvePoint> pts;
    for (int i = 0; i < 50; ++i) {
        double x = 0.01 + i * 0.02;
        pts.push_back({x, logistic(p, x), 1.0});
    }
    return pts;
}

}  // namespace

TEST_CASE("bin_samples counts each sample once") {
    std::vector<CalibrationSample> s{{0.61, true}, {0.61, true}, {0.63, false}, {0.20, false}};
    auto bins = bin_samples(s, 0.02);
    REQUIRE(bins.size() == 50);
    CHECK(bins[30].lo == doctest::Approx(0.60));
    CHECK(bins[30].n == 2);
    CHECK(bins[30].correct == 2);
    CHECK(bins[31].n == 1);
    CHECK(bins[31].correct == 0);
    CHECK(bins[10].lo == doctest::Approx(0.20));
    CHECK(bins[10].n == 1);
    CHECK(bins[10].correct == 0);
    CHECK_FALSE(bins[0].accuracy().has_value());
    CHECK(bins[30].accuracy() == 1.0);
}

TEST_CASE("bin boundaries") {
    std::vector<CalibrationSample> s{{0.0, true}, {1.0, true}, {0.02, false}, {0.06, false}};
    auto bins = bin_samples(s, 0.02);
    CHECK(bins.front().n == 1);
    CHECK(bins.back().n == 1);  // the last bin is closed at 1
    CHECK(bins[1].n == 1);
    CHECK(bins[3].n == 1);
}

TEST_CASE("all-correct samples give accuracy 1 in every non-empty bin") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<CalibrationSample> s;
    for (int i = 0; i < 500; ++i) s.push_back({u(rng), true});
    for (const auto& b : bin_samples(s, 0.05)) {
        if (!b.empty()) CHECK(*b.accuracy() == 1.0);
    }
}

TEST_CASE("bin_samples rejects bad input") {
    std::vector<CalibrationSample> none;
    CHECK_THROWS_AS(bin_samples(none, 0.02), InputError);
    std::vector<CalibrationSample> one{{0.5, true}};
    CHECK_THROWS_AS(bin_samples(one, 0.0), InputError);
    CHECK_THROWS_AS(bin_samples(one, 1.5), InputError);
    std::vector<CalibrationSample> bad{{1.2, true}};
    CHECK_THROWS_AS(bin_samples(bad, 0.02), DomainError);
}

TEST_CASE("binning conserves the sample count") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 400);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CalibrationSample> s(static_cast<std::size_t>(len(rng)));
        for (auto& x : s) x = {u(rng), u(rng) < 0.5};
        for (double w : {0.02, 0.03, 0.1, 0.3, 1.0}) {
            auto bins = bin_samples(s, w);
            std::uint64_t total = 0;
            for (std::size_t i = 0; i < bins.size(); ++i) {
                total += bins[i].n;
                CHECK(bins[i].correct <= bins[i].n);
                if (i > 0) CHECK(bins[i].lo == bins[i - 1].hi);
            }
            CHECK(bins.front().lo == 0.0);
            CHECK(bins.back().hi == 1.0);
            CHECK(total == s.size());
        }
    }
}

TEST_CASE("map_confidence follows the fitted curve") {
    auto m = CalibrationModel::grounded_sam();
    CHECK(map_confidence(m, 0.56) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(map_confidence(m, 0.60) == doctest::Approx(0.880797).epsilon(1e-6));
    CHECK(map_confidence(m, 0.50) == doctest::Approx(0.047426).epsilon(1e-5));
    CHECK_THROWS_AS(map_confidence(m, -0.01), DomainError);
    CHECK_THROWS_AS(map_confidence(m, 1.01), DomainError);
}

TEST_CASE("map_thresholded saturates inclusively") {
    auto m = CalibrationModel::grounded_sam();
    CHECK(map_thresholded(m, 0.64) == 1.0);
    CHECK(map_thresholded(m, 0.38) == 0.0);
    CHECK(map_thresholded(m, 0.56) == doctest::Approx(0.5));
    CHECK(map_thresholded(m, 0.0) == 0.0);
    CHECK(map_thresholded(m, 1.0) == 1.0);
    CHECK_THROWS_AS(map_thresholded(m, std::nan("")), DomainError);
}

TEST_CASE("mapping properties over random models") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        CalibrationModel m({0.5 + 100 * u(rng), u(rng)}, std::max(a, b), std::min(a, b));
        double prev = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            double c = i / 1000.0;
            double s = map_confidence(m, c), t = map_thresholded(m, c);
            REQUIRE(s >= 0.0);
            REQUIRE(s <= 1.0);
            REQUIRE(t >= 0.0);
            REQUIRE(t <= 1.0);
            REQUIRE(t >= prev);
            prev = t;
            bool saturated = c <= m.t_false() || c >= m.t_true();
            if (saturated) REQUIRE((t == 0.0 || t == 1.0));
            if (!saturated) REQUIRE(t == s);
        }
    }
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(CalibrationModel({0.0, 0.5}, 0.6, 0.4), InputError);
    CHECK_THROWS_AS(CalibrationModel({10.0, 1.5}, 0.6, 0.4), InputError);
    CHECK_THROWS_AS(CalibrationModel({10.0, 0.5}, 0.4, 0.6), InputError);
    CHECK_THROWS_AS(CalibrationModel({10.0, 0.5}, 0.5, 0.5), InputError);
    CHECK_THROWS_AS(CalibrationModel({10.0, 0.5}, 1.2, 0.4), InputError);
}

TEST_CASE("fit recovers a synthetic curve") {
    for (LogisticParams truth : {LogisticParams{10.0, 0.5}, LogisticParams{50.0, 0.56}, LogisticParams{3.0, 0.3}}) {
        auto pts = points_from_curve(truth);
        auto fit = fit_logistic(std::span<const CurvePoint>(pts));
        CHECK(fit.k == doctest::Approx(truth.k).epsilon(1e-3 / truth.k));
        CHECK(std::abs(fit.x0 - truth.x0) <= 1e-3);
    }
    auto bins = bins_from_curve({10.0, 0.5}, 1000000);
    auto fit = fit_logistic(std::span<const ReliabilityBin>(bins));
    CHECK(std::abs(fit.k - 10.0) <= 1e-3 * 10.0);
    CHECK(std::abs(fit.x0 - 0.5) <= 1e-3);
}

TEST_CASE("fit is idempotent on its own curve") {
    auto fixture = load_calibration(kFixtures + "/grounded_sam_calibration.json");
    auto first = fit_logistic(std::span<const ReliabilityBin>(fixture.bins()));
    auto pts = points_from_curve(first);
    auto second = fit_logistic(std::span<const CurvePoint>(pts));
    CHECK(std::abs(second.k - first.k) <= 1e-6 * first.k);
    CHECK(std::abs(second.x0 - first.x0) <= 1e-6);
}

TEST_CASE("symmetric two-bin data fixes the midpoint") {
    std::vector<ReliabilityBin> bins{{0.39, 0.41, 10, 0}, {0.59, 0.61, 10, 10}};
    auto fit = fit_logistic(std::span<const ReliabilityBin>(bins));
    CHECK(std::abs(fit.x0 - 0.5) <= 1e-6);
}

TEST_CASE("degenerate fits are rejected") {
    std::vector<ReliabilityBin> one{{0.4, 0.42, 10, 3}};
    CHECK_THROWS_AS(fit_logistic(std::span<const ReliabilityBin>(one)), DegenerateDataError);
    std::vector<ReliabilityBin> flat{{0.4, 0.42, 10, 3}, {0.6, 0.62, 20, 6}, {0.8, 0.82, 0, 0}};
    CHECK_THROWS_AS(fit_logistic(std::span<const ReliabilityBin>(flat)), DegenerateDataError);
}

TEST_CASE("fit of the detector reliability fixture") {
    auto fixture = load_calibration(kFixtures + "/grounded_sam_calibration.json");
    const auto& bins = fixture.bins();
    auto at = [&](double x) {
        for (const auto& b : bins) {
            if (b.lo <= x && x < b.hi) return *b.accuracy();
        }
        return -1.0;
    };
    CHECK(at(0.60) == doctest::Approx(0.922).epsilon(1e-3));
    CHECK(at(0.50) == doctest::Approx(0.131).epsilon(1e-3));
    auto fit = fit_logistic(std::span<const ReliabilityBin>(bins));
    // Independent least-squares solution of the same problem (scipy): k 48.2454, x0 0.568360.
    CHECK(fit.k == doctest::Approx(48.2454).epsilon(1e-4));
    CHECK(fit.x0 == doctest::Approx(0.568360).epsilon(1e-5));
    CHECK(std::abs(fit.k - 50.0) <= 0.15 * 50.0);
    CHECK(std::abs(fit.x0 - 0.56) <= 0.02);
}

TEST_CASE("derive_thresholds reads saturated runs") {
    std::vector<ReliabilityBin> bins{{0.0, 0.2, 5, 0}, {0.2, 0.4, 4, 0}, {0.4, 0.6, 10, 4},
                                     {0.6, 0.8, 0, 0}, {0.8, 1.0, 7, 7}};
    auto [t, f] = derive_thresholds(bins);
    CHECK(t == doctest::Approx(0.9));
    CHECK(f == doctest::Approx(0.3));
    std::vector<ReliabilityBin> mixed{{0.0, 0.5, 5, 1}, {0.5, 1.0, 5, 4}};
    auto [t2, f2] = derive_thresholds(mixed);
    CHECK(t2 == 1.0);
    CHECK(f2 == 0.0);
}

TEST_CASE("calibrate end to end") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<CalibrationSample> s;
    for (int i = 0; i < 20000; ++i) {
        double c = u(rng);
        s.push_back({c, u(rng) < logistic({20.0, 0.5}, c)});
    }
    auto m = calibrate(s, 0.02);
    CHECK(m.k() == doctest::Approx(20.0).epsilon(0.2));
    CHECK(m.x0() == doctest::Approx(0.5).epsilon(0.03));
    CHECK(m.t_false() < m.t_true());
    CHECK(m.bins().size() == 50);
}

TEST_CASE("calibration JSON round trip") {
    auto fixture = load_calibration(kFixtures + "/grounded_sam_calibration.json");
    CHECK(fixture.k() == 50.0);
    CHECK(fixture.x0() == 0.56);
    CHECK(fixture.t_true() == 0.64);
    CHECK(fixture.t_false() == 0.38);
    auto again = calibration_from_json(to_json(fixture));
    CHECK(again.bins() == fixture.bins());
    CHECK(again.k() == fixture.k());
    CHECK(to_json(again) == to_json(fixture));

    auto path = std::filesystem::temp_directory_path() / "vsearch_calib_roundtrip.json";
    save_calibration(fixture, path.string());
    CHECK(to_json(load_calibration(path.string())) == to_json(fixture));
    std::filesystem::remove(path);
}

TEST_CASE("calibration JSON errors carry a location") {
    try {
        calibration_from_json(R"({"k": 50, "x0": 0.56, "t_true": 0.64})");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.location() == "/");
    }
    try {
        calibration_from_json(R"({"k": 50, "x0": 0.56, "t_true": 0.64, "t_false": 0.38,
                                  "bins": [{"lo": 0, "hi": 0.5, "n": 2, "correct": "x"}]})");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.location() == "/bins/0/correct");
    }
    CHECK_THROWS_AS(calibration_from_json("{"), FormatError);
    CHECK_THROWS_AS(load_calibration("/nonexistent/calib.json"), InputError);
}

TEST_CASE("samples JSON") {
    auto s = samples_from_json(R"([{"confidence": 0.3, "correct": true}, {"confidence": 0.9, "correct": false}])");
    REQUIRE(s.size() == 2);
    CHECK(s[0].confidence == 0.3);
    CHECK(s[0].correct);
    CHECK_FALSE(s[1].correct);
    try {
        samples_from_json(R"([{"confidence": 0.3, "correct": true}, {"confidence": 1.3, "correct": false}])");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.location() == "/1");
    }
    CHECK_THROWS_AS(samples_from_json(R"({"confidence": 0.3})"), FormatError);
}
