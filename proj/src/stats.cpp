#include "mvhinge/stats.hpp"

#include "mvhinge/error.hpp"

#include <algorithm>
#include <cmath>

namespace mvhinge {

std::string to_string(Subgroup subgroup) {
    std::string s = subgroup.view == View::A4C ? "a4c" : "a2c";
    s += subgroup.phase == Phase::ED ? "-ED" : "-ES";
    return s;
}

std::string_view to_string(PointKind point) noexcept { return point == PointKind::AMVL ? "aMVL" : "pMVL"; }

std::string_view to_string(Axis axis) noexcept { return axis == Axis::X ? "x" : "y"; }

std::string to_string(const CellKey& cell) {
    return to_string(cell.subgroup) + "/" + std::string(to_string(cell.point)) + "/" +
           std::string(to_string(cell.axis));
}

std::optional<Subgroup> parse_subgroup(std::string_view text) {
    for (const Subgroup& s : kAllSubgroups) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::optional<PointKind> parse_point(std::string_view text) {
    if (text == "aMVL") return PointKind::AMVL;
    if (text == "pMVL") return PointKind::PMVL;
    return std::nullopt;
}

std::optional<Axis> parse_axis(std::string_view text) {
    if (text == "x") return Axis::X;
    if (text == "y") return Axis::Y;
    return std::nullopt;
}

std::array<ErrorSample, 4> compute_errors(const HingePair& predicted, const HingePair& truth,
                                          Subgroup subgroup, std::string_view case_id) {
    if (predicted.spacing != truth.spacing) {
        throw Error(ErrorCode::SpacingMismatch, std::string(case_id));
    }
    const Spacing s = truth.spacing;
    const std::string id(case_id);
    // Pixel differences scaled once, so errors are exact multiples of spacing.
    return {
        ErrorSample{subgroup, PointKind::AMVL, Axis::X, (predicted.amvl_px.x - truth.amvl_px.x) * s.sx, id},
        ErrorSample{subgroup, PointKind::AMVL, Axis::Y, (predicted.amvl_px.y - truth.amvl_px.y) * s.sy, id},
        ErrorSample{subgroup, PointKind::PMVL, Axis::X, (predicted.pmvl_px.x - truth.pmvl_px.x) * s.sx, id},
        ErrorSample{subgroup, PointKind::PMVL, Axis::Y, (predicted.pmvl_px.y - truth.pmvl_px.y) * s.sy, id},
    };
}

namespace {

std::vector<double> sorted_copy(std::span<const double> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no samples");
    std::vector<double> v(samples.begin(), samples.end());
    for (double x : v) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
    }
    std::sort(v.begin(), v.end());
    return v;
}

double percentile_sorted(const std::vector<double>& v, double p) {
    const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return v[lo];
    return v[lo] + frac * (v[hi] - v[lo]);
}

double median_sorted(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

double percentile(std::span<const double> samples, double p) {
    if (!(p >= 0.0 && p <= 100.0)) throw Error(ErrorCode::InvalidArgument, "percentile outside [0, 100]");
    return percentile_sorted(sorted_copy(samples), p);
}

double median(std::span<const double> samples) { return median_sorted(sorted_copy(samples)); }

std::optional<double> CalibrationTable::bias(const CellKey& cell) const {
    const auto it = bias_mm.find(cell);
    if (it == bias_mm.end()) return std::nullopt;
    return it->second;
}

std::optional<double> CalibrationTable::mean_bias(Axis axis) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [cell, b] : bias_mm) {
        if (cell.axis != axis) continue;
        sum += b;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

namespace {

std::map<CellKey, std::vector<double>> group_by_cell(std::span<const ErrorSample> samples) {
    std::map<CellKey, std::vector<double>> cells;
    for (const auto& s : samples) cells[s.cell()].push_back(s.error_mm);
    return cells;
}

} // namespace

CalibrationTable fit_calibration(std::span<const ErrorSample> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no error samples to calibrate on");
    CalibrationTable table;
    for (const auto& [cell, values] : group_by_cell(samples)) table.bias_mm[cell] = median(values);
    return table;
}

std::vector<ErrorSample> apply_calibration(std::span<const ErrorSample> samples,
                                           const CalibrationTable& table) {
    std::vector<ErrorSample> out(samples.begin(), samples.end());
    for (auto& s : out) {
        const auto b = table.bias(s.cell());
        if (!b) throw Error(ErrorCode::MissingCell, to_string(s.cell()));
        s.error_mm -= *b;
    }
    return out;
}

namespace {

SummaryRow summarize_values(std::string subgroup, std::string point, std::string axis,
                            const std::vector<double>& values) {
    SummaryRow row;
    row.subgroup = std::move(subgroup);
    row.point = std::move(point);
    row.axis = std::move(axis);
    const auto sorted = sorted_copy(values);
    row.n = sorted.size();
    row.p15_mm = percentile_sorted(sorted, 15.0);
    row.p50_mm = percentile_sorted(sorted, 50.0);
    row.p85_mm = percentile_sorted(sorted, 85.0);

    std::vector<double> abs_values;
    abs_values.reserve(sorted.size());
    for (double v : sorted) abs_values.push_back(std::fabs(v));
    std::sort(abs_values.begin(), abs_values.end());
    row.median_abs_mm = median_sorted(abs_values);

    if (row.n >= 3 && row.n <= 5000 && sorted.front() != sorted.back()) {
        const auto sw = shapiro_wilk(sorted);
        row.shapiro_w = sw.w;
        row.shapiro_p = sw.p;
    }
    return row;
}

} // namespace

SummaryReport summarize(std::span<const ErrorSample> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySamples, "no error samples to summarize");
    SummaryReport report;
    for (const auto& [cell, values] : group_by_cell(samples)) {
        report.rows.push_back(summarize_values(to_string(cell.subgroup), std::string(to_string(cell.point)),
                                               std::string(to_string(cell.axis)), values));
    }
    for (Axis axis : {Axis::X, Axis::Y}) {
        std::vector<double> pooled;
        for (const auto& s : samples) {
            if (s.axis == axis) pooled.push_back(s.error_mm);
        }
        if (!pooled.empty()) report.rows.push_back(summarize_values("all", "all", std::string(to_string(axis)), pooled));
    }
    return report;
}

} // namespace mvhinge
