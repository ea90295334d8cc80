#include "vsearch/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "json_util.hpp"

namespace vsearch::calibration {

namespace {

constexpr double kMinSteepness = 1e-2;
constexpr double kMaxSteepness = 1e3;

void check_unit(double c, const char* what) {
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(c));
}

double clamp_log_k(double u) { return std::clamp(u, std::log(kMinSteepness), std::log(kMaxSteepness)); }

// Weighted squared error as a function of (log k, x0).
struct Objective {
    std::span<const CurvePoint> pts;
    double operator()(double log_k, double x0) const {
        const LogisticParams p{std::exp(clamp_log_k(log_k)), std::clamp(x0, 0.0, 1.0)};
        double sum = 0.0;
        for (const auto& pt : pts) {
            // Above the midpoint use 1 - f(x) = f(-x) so saturated residuals keep their precision.
            double z = p.k * (pt.x - p.x0);
            double r = z <= 0.0 ? 1.0 / (1.0 + std::exp(-z)) - pt.y : (1.0 - pt.y) - 1.0 / (1.0 + std::exp(z));
            sum += pt.weight * r * r;
        }
        return sum;
    }
};

using Vertex = std::array<double, 2>;

Vertex nelder_mead(const Objective& f, Vertex start, Vertex step) {
    std::array<Vertex, 3> v{start, start, start};
    v[1][0] += step[0];
    v[2][1] += step[1];
    std::array<double, 3> fv{};
    for (int i = 0; i < 3; ++i) fv[i] = f(v[i][0], v[i][1]);
    for (int iter = 0; iter < 20000; ++iter) {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = idx[0], mid = idx[1], worst = idx[2];
        double size = 0.0;
        for (int i : {mid, worst}) {
            size = std::max({size, std::abs(v[i][0] - v[best][0]), std::abs(v[i][1] - v[best][1])});
        }
        if (size < 1e-13) break;
        Vertex c{(v[best][0] + v[mid][0]) / 2, (v[best][1] + v[mid][1]) / 2};
        auto along = [&](double t) { return Vertex{c[0] + t * (v[worst][0] - c[0]), c[1] + t * (v[worst][1] - c[1])}; };
        Vertex r = along(-1.0);
        double fr = f(r[0], r[1]);
        if (fr < fv[best]) {
            Vertex e = along(-2.0);
            double fe = f(e[0], e[1]);
            if (fe < fr) {
                v[worst] = e, fv[worst] = fe;
            } else {
                v[worst] = r, fv[worst] = fr;
            }
        } else if (fr < fv[mid]) {
            v[worst] = r, fv[worst] = fr;
        } else {
            Vertex k = fr < fv[worst] ? along(-0.5) : along(0.5);
            double fk = f(k[0], k[1]);
            if (fk < std::min(fr, fv[worst])) {
                v[worst] = k, fv[worst] = fk;
            } else {
                for (int i : {mid, worst}) {
                    v[i] = Vertex{(v[i][0] + v[best][0]) / 2, (v[i][1] + v[best][1]) / 2};
                    fv[i] = f(v[i][0], v[i][1]);
                }
            }
        }
    }
    int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return v[best];
}

// Golden-section minimum of g on [a, b].
template <typename G>
double golden(G g, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b))) {
        if (gc < gd) {
            b = d, d = c, gd = gc;
            c = b - inv_phi * (b - a), gc = g(c);
        } else {
            a = c, c = d, gc = gd;
            d = a + inv_phi * (b - a), gd = g(d);
        }
    }
    return (a + b) / 2;
}

}  // namespace

std::optional<double> ReliabilityBin::accuracy() const noexcept {
    if (n == 0) return std::nullopt;
    return static_cast<double>(correct) / static_cast<double>(n);
}

double logistic(const LogisticParams& p, double x) noexcept { return 1.0 / (1.0 + std::exp(-p.k * (x - p.x0))); }

CalibrationModel::CalibrationModel(LogisticParams params, double t_true, double t_false, double bin_width,
                                   std::vector<ReliabilityBin> bins)
    : params_(params), t_true_(t_true), t_false_(t_false), bin_width_(bin_width), bins_(std::move(bins)) {
    if (!(params_.k > 0.0) || !std::isfinite(params_.k)) throw InputError("calibration: k must be positive");
    if (!(params_.x0 >= 0.0 && params_.x0 <= 1.0)) throw InputError("calibration: x0 must lie in [0,1]");
    check_unit(t_true_, "t_true");
    check_unit(t_false_, "t_false");
    if (!(t_false_ < t_true_)) throw InputError("calibration: t_false must be below t_true");
    if (!(bin_width_ > 0.0 && bin_width_ <= 1.0)) throw InputError("calibration: bin_width must lie in (0,1]");
}

CalibrationModel CalibrationModel::grounded_sam() { return CalibrationModel({50.0, 0.56}, 0.64, 0.38); }

std::vector<ReliabilityBin> bin_samples(std::span<const CalibrationSample> samples, double bin_width) {
    if (!(bin_width > 0.0 && bin_width <= 1.0)) throw InputError("bin width must lie in (0,1]");
    if (samples.empty()) throw InputError("no calibration samples");
    const auto count = static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
    std::vector<ReliabilityBin> bins(count);
    for (std::size_t i = 0; i < count; ++i) {
        bins[i].lo = static_cast<double>(i) * bin_width;
        bins[i].hi = i + 1 == count ? 1.0 : static_cast<double>(i + 1) * bin_width;
    }
    for (const auto& s : samples) {
        check_unit(s.confidence, "sample confidence");
        auto i = std::min(count - 1, static_cast<std::size_t>(s.confidence / bin_width));
        // Division can land one bin off near a boundary.
        while (i > 0 && s.confidence < bins[i].lo) --i;
        while (i + 1 < count && s.confidence >= bins[i + 1].lo) ++i;
        ++bins[i].n;
        if (s.correct) ++bins[i].correct;
    }
    return bins;
}

LogisticParams fit_logistic(std::span<const ReliabilityBin> bins) {
    std::vector<CurvePoint> pts;
    for (const auto& b : bins) {
        if (b.correct > b.n) throw InputError("reliability bin has more correct than total detections");
        if (auto acc = b.accuracy()) pts.push_back({b.midpoint(), *acc, static_cast<double>(b.n)});
    }
    return fit_logistic(std::span<const CurvePoint>(pts));
}

LogisticParams fit_logistic(std::span<const CurvePoint> points) {
    if (points.size() < 2) throw DegenerateDataError("logistic fit needs at least two non-empty bins");
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [](const CurvePoint& a, const CurvePoint& b) { return a.y < b.y; });
    if (lo->y == hi->y) throw DegenerateDataError("all bin accuracies are equal; the midpoint is unidentifiable");

    const Objective f{points};

    // Coarse grid: k log-spaced, x0 on a 0.01 lattice.
    double best_u = 0.0, best_x = 0.5, best_f = std::numeric_limits<double>::infinity();
    const double u_lo = std::log(kMinSteepness), u_hi = std::log(kMaxSteepness);
    for (int i = 0; i <= 120; ++i) {
        double u = u_lo + (u_hi - u_lo) * i / 120.0;
        for (int j = 0; j <= 100; ++j) {
            double x = j / 100.0;
            double v = f(u, x);
            if (v < best_f) best_f = v, best_u = u, best_x = x;
        }
    }

    Vertex v = nelder_mead(f, {best_u, best_x}, {0.05, 0.005});
    v[0] = clamp_log_k(v[0]);

    // Coordinate polish.
    for (int sweep = 0; sweep < 200; ++sweep) {
        Vertex prev = v;
        v[1] = golden([&](double x) { return f(v[0], x); }, v[1] - 0.01, v[1] + 0.01);
        v[0] = golden([&](double u) { return f(clamp_log_k(u), v[1]); }, clamp_log_k(v[0] - 0.01),
                      clamp_log_k(v[0] + 0.01));
        if (std::abs(v[0] - prev[0]) < 1e-13 && std::abs(v[1] - prev[1]) < 1e-13) break;
    }
    return {std::exp(clamp_log_k(v[0])), std::clamp(v[1], 0.0, 1.0)};
}

double map_confidence(const CalibrationModel& m, double c) {
    check_unit(c, "confidence");
    return logistic(m.params(), c);
}

double map_thresholded(const CalibrationModel& m, double c) {
    check_unit(c, "confidence");
    if (c >= m.t_true()) return 1.0;
    if (c <= m.t_false()) return 0.0;
    return logistic(m.params(), c);
}

std::pair<double, double> derive_thresholds(std::span<const ReliabilityBin> bins) {
    std::vector<const ReliabilityBin*> filled;
    for (const auto& b : bins) {
        if (!b.empty()) filled.push_back(&b);
    }
    std::sort(filled.begin(), filled.end(), [](auto* a, auto* b) { return a->lo < b->lo; });
    double t_true = 1.0, t_false = 0.0;
    for (auto it = filled.rbegin(); it != filled.rend() && (*it)->correct == (*it)->n; ++it) t_true = (*it)->midpoint();
    for (auto it = filled.begin(); it != filled.end() && (*it)->correct == 0; ++it) t_false = (*it)->midpoint();
    if (!(t_false < t_true)) return {1.0, 0.0};
    return {t_true, t_false};
}

CalibrationModel calibrate(std::span<const CalibrationSample> samples, double bin_width) {
    auto bins = bin_samples(samples, bin_width);
    auto params = fit_logistic(std::span<const ReliabilityBin>(bins));
    auto [t_true, t_false] = derive_thresholds(bins);
    return CalibrationModel(params, t_true, t_false, bin_width, std::move(bins));
}

std::string to_json(const CalibrationModel& m) {
    detail::json bins = detail::json::array();
    for (const auto& b : m.bins()) bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"n", b.n}, {"correct", b.correct}});
    detail::json j{{"k", m.k()},
                   {"x0", m.x0()},
                   {"t_true", m.t_true()},
                   {"t_false", m.t_false()},
                   {"bin_width", m.bin_width()},
                   {"bins", std::move(bins)}};
    return j.dump(2) + "\n";
}

CalibrationModel calibration_from_json(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    std::vector<ReliabilityBin> bins;
    if (j.is_object() && j.contains("bins")) {
        const json& arr = get_array(j["bins"], "/bins");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string at = "/bins/" + std::to_string(i);
            ReliabilityBin b;
            b.lo = number_field(arr[i], "lo", at);
            b.hi = number_field(arr[i], "hi", at);
            b.n = get_count(field(arr[i], "n", at), at + "/n");
            b.correct = get_count(field(arr[i], "correct", at), at + "/correct");
            if (!(b.lo < b.hi)) throw FormatError("bin bounds must satisfy lo < hi", at);
            if (b.correct > b.n) throw FormatError("bin has more correct than total detections", at);
            bins.push_back(b);
        }
    }
    double bin_width = j.is_object() && j.contains("bin_width") ? get_number(j["bin_width"], "/bin_width") : 0.02;
    return CalibrationModel({number_field(j, "k", ""), number_field(j, "x0", "")}, number_field(j, "t_true", ""),
                            number_field(j, "t_false", ""), bin_width, std::move(bins));
}

CalibrationModel load_calibration(const std::string& path) { return calibration_from_json(detail::read_file(path)); }

void save_calibration(const CalibrationModel& m, const std::string& path) { detail::write_file(path, to_json(m)); }

std::vector<CalibrationSample> samples_from_json(const std::string& text) {
    using namespace detail;
    json j = parse_json(text);
    const json& arr = get_array(j, "/");
    std::vector<CalibrationSample> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string at = "/" + std::to_string(i);
        CalibrationSample s;
        s.confidence = number_field(arr[i], "confidence", at);
        s.correct = get_bool(field(arr[i], "correct", at), at + "/correct");
        if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) throw FormatError("confidence outside [0,1]", at);
        out.push_back(s);
    }
    return out;
}

std::vector<CalibrationSample> load_samples(const std::string& path) { return samples_from_json(detail::read_file(path)); }

}  // namespace vsearch::calibration
