#pragma once

#include "mvhinge/hinge.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvhinge {

enum class View { A4C, A2C };
enum class Phase { ED, ES };
enum class PointKind { AMVL, PMVL };
enum class Axis { X, Y };

/// One of the four (view, phase) acquisition groups.
struct Subgroup {
    View view = View::A4C;
    Phase phase = Phase::ED;

    auto operator<=>(const Subgroup&) const = default;
};

inline constexpr std::array<Subgroup, 4> kAllSubgroups = {
    Subgroup{View::A4C, Phase::ED}, Subgroup{View::A4C, Phase::ES},
    Subgroup{View::A2C, Phase::ED}, Subgroup{View::A2C, Phase::ES}};

std::string to_string(Subgroup subgroup);        // "a4c-ED"
std::string_view to_string(PointKind point) noexcept; // "aMVL"
std::string_view to_string(Axis axis) noexcept;       // "x"

std::optional<Subgroup> parse_subgroup(std::string_view text);
std::optional<PointKind> parse_point(std::string_view text);
std::optional<Axis> parse_axis(std::string_view text);

/// (subgroup, point, axis): the unit over which bias and percentiles are taken.
struct CellKey {
    Subgroup subgroup;
    PointKind point = PointKind::AMVL;
    Axis axis = Axis::X;

    auto operator<=>(const CellKey&) const = default;
};

std::string to_string(const CellKey& cell);

/// Signed coordinate error, predicted minus reference, in mm. Positive x is
/// posterior (image-right), positive y is image-down.
struct ErrorSample {
    Subgroup subgroup;
    PointKind point = PointKind::AMVL;
    Axis axis = Axis::X;
    double error_mm = 0.0;
    std::string case_id;

    CellKey cell() const noexcept { return {subgroup, point, axis}; }
};

/// Emits (aMVL,x), (aMVL,y), (pMVL,x), (pMVL,y). Throws SpacingMismatch when
/// the two pairs were measured on differently spaced grids.
std::array<ErrorSample, 4> compute_errors(const HingePair& predicted, const HingePair& truth,
                                          Subgroup subgroup, std::string_view case_id);

/// Linear interpolation between closest ranks at position p/100·(n−1) of
/// the ascending sort. p must lie in [0, 100].
double percentile(std::span<const double> samples, double p);

/// Middle value; mean of the two middle values for even counts.
double median(std::span<const double> samples);

struct ShapiroWilkResult {
    double w = 0.0;
    double p = 0.0;
};

/// Shapiro-Wilk W with Royston's (1995) p-value approximation, 3 ≤ n ≤ 5000.
ShapiroWilkResult shapiro_wilk(std::span<const double> samples);

inline constexpr double kNormalityAlpha = 0.05;

namespace detail {
/// Standard normal quantile Φ⁻¹(p), p in (0, 1).
double normal_quantile(double p);
/// 1 − Φ(z).
double normal_upper_tail(double z);
} // namespace detail

/// Per-cell median bias.
struct CalibrationTable {
    std::map<CellKey, double> bias_mm;

    std::optional<double> bias(const CellKey& cell) const;
    /// Mean of the cell biases along one axis (the single "average bias"
    /// display value); nullopt when no cell has that axis.
    std::optional<double> mean_bias(Axis axis) const;
};

CalibrationTable fit_calibration(std::span<const ErrorSample> samples);

/// Subtracts each sample's cell bias. Throws MissingCell for cells the
/// table does not know. Order is preserved.
std::vector<ErrorSample> apply_calibration(std::span<const ErrorSample> samples,
                                           const CalibrationTable& table);

struct SummaryRow {
    std::string subgroup; // "a4c-ED" ... or "all"
    std::string point;    // "aMVL", "pMVL" or "all"
    std::string axis;     // "x" / "y"
    std::size_t n = 0;
    double p15_mm = 0.0;
    double p50_mm = 0.0;
    double p85_mm = 0.0;
    double median_abs_mm = 0.0;
    std::optional<double> shapiro_w;
    std::optional<double> shapiro_p;
};

struct SummaryReport {
    std::vector<SummaryRow> rows;
};

/// One row per populated cell in (subgroup, point, axis) order, followed by
/// pooled all-x and all-y rows. Shapiro-Wilk columns are filled whenever the
/// test is defined for the row (3..5000 samples, non-constant).
SummaryReport summarize(std::span<const ErrorSample> samples);

} // namespace mvhinge
