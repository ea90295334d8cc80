#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vsearch::calibration {

struct CalibrationSample {
    double confidence = 0.0;  // in [0,1]
    bool correct = false;
};

// Detections whose confidence falls in [lo, hi). The bin ending at 1 is closed.
struct ReliabilityBin {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t n = 0;
    std::uint64_t correct = 0;

    bool empty() const noexcept { return n == 0; }
    double midpoint() const noexcept { return 0.5 * (lo + hi); }
    // Classification accuracy correct / n; nullopt for an empty bin.
    std::optional<double> accuracy() const noexcept;

    friend bool operator==(const ReliabilityBin&, const ReliabilityBin&) = default;
};

struct LogisticParams {
    double k = 0.0;   // steepness
    double x0 = 0.0;  // midpoint
};

// One weighted observation of the confidence -> accuracy curve.
struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;
};

double logistic(const LogisticParams& p, double x) noexcept;

// Logistic mapping plus saturation thresholds. Immutable once constructed.
class CalibrationModel {
public:
    CalibrationModel(LogisticParams params, double t_true, double t_false, double bin_width = 0.02,
                     std::vector<ReliabilityBin> bins = {});

    double k() const noexcept { return params_.k; }
    double x0() const noexcept { return params_.x0; }
    const LogisticParams& params() const noexcept { return params_; }
    double t_true() const noexcept { return t_true_; }
    double t_false() const noexcept { return t_false_; }
    double bin_width() const noexcept { return bin_width_; }
    const std::vector<ReliabilityBin>& bins() const noexcept { return bins_; }

    // The mapping used throughout the published experiments: k = 50, x0 = 0.56,
    // saturating at 0.64 (true) and 0.38 (false).
    static CalibrationModel grounded_sam();

private:
    LogisticParams params_;
    double t_true_;
    double t_false_;
    double bin_width_;
    std::vector<ReliabilityBin> bins_;
};

// Counts samples into consecutive bins of `bin_width` covering [0,1]; every bin is
// returned, including empty ones. Throws InputError on empty input or a bad width.
std::vector<ReliabilityBin> bin_samples(std::span<const CalibrationSample> samples, double bin_width = 0.02);

// n-weighted least squares fit of the logistic curve to bin accuracies at bin midpoints.
// Empty bins are skipped. Throws DegenerateDataError with fewer than two non-empty bins
// or when all accuracies coincide.
LogisticParams fit_logistic(std::span<const ReliabilityBin> bins);
LogisticParams fit_logistic(std::span<const CurvePoint> points);

// Smooth mapping M(c). Throws DomainError outside [0,1].
double map_confidence(const CalibrationModel& m, double c);

// Saturated mapping: 1 for c >= t_true, 0 for c <= t_false, M(c) in between.
double map_thresholded(const CalibrationModel& m, double c);

// Saturation thresholds read off the bins: t_true is the lowest midpoint from which every
// non-empty bin is fully correct, t_false the highest midpoint up to which every non-empty
// bin is fully wrong. Falls back to 1 and 0 when no such run exists.
std::pair<double, double> derive_thresholds(std::span<const ReliabilityBin> bins);

// Bins, fit and thresholds in one step.
CalibrationModel calibrate(std::span<const CalibrationSample> samples, double bin_width = 0.02);

// JSON file formats.
std::string to_json(const CalibrationModel& m);
CalibrationModel calibration_from_json(const std::string& text);
CalibrationModel load_calibration(const std::string& path);
void save_calibration(const CalibrationModel& m, const std::string& path);
std::vector<CalibrationSample> samples_from_json(const std::string& text);
std::vector<CalibrationSample> load_samples(const std::string& path);

}  // namespace vsearch::calibration
