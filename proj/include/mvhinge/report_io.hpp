#pragma once

#include "mvhinge/hinge.hpp"
#include "mvhinge/phantom.hpp"
#include "mvhinge/stats.hpp"

#include "json.hpp"

#include <string>

namespace mvhinge {

/// {amvl_px, pmvl_px, amvl_mm, pmvl_mm, diameter_mm, degenerate, off_center,
///  centering_reasons, la_area_ratio}
nlohmann::json hinge_to_json(const HingePair& hinges, const CenteringDiagnosis& centering);

/// Array of {subgroup, point, axis, bias_mm} objects.
nlohmann::json calibration_to_json(const CalibrationTable& table);
/// Throws BadValue on malformed entries or duplicate cells.
CalibrationTable calibration_from_json(const nlohmann::json& doc);

inline constexpr const char* kSummaryCsvHeader =
    "subgroup,point,axis,n,p15_mm,p50_mm,p85_mm,median_abs_mm,shapiro_w,shapiro_p";

/// Fixed notation: mm with 2 decimals, W and p with 4. Undefined
/// Shapiro-Wilk fields are left empty.
std::string summary_to_csv(const SummaryReport& report);

/// Fixed-point formatting helper shared by the CSV writers.
std::string fixed(double value, int decimals);

/// Unknown keys are rejected so typos do not silently fall back to defaults.
PhantomSpec phantom_spec_from_json(const nlohmann::json& doc);
nlohmann::json phantom_spec_to_json(const PhantomSpec& spec);

} // namespace mvhinge
