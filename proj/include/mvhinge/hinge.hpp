#pragma once

#include "mvhinge/labelmap.hpp"

#include <string_view>
#include <vector>

namespace mvhinge {

/// LV pixels with at least one LA pixel among their four direct
/// neighbours, sorted ascending by (x, y). Never empty.
struct ContactLine {
    std::vector<Pixel> pixels;
};

struct PointMm {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const PointMm&) const = default;
};

/// Mitral valve hinge points. Anterior is image-left (minimum x), posterior
/// image-right. Millimetre coordinates are pixel centres scaled by spacing.
struct HingePair {
    Pixel amvl_px;
    Pixel pmvl_px;
    PointMm amvl_mm;
    PointMm pmvl_mm;
    Spacing spacing;
    double diameter_mm = 0.0;
    bool degenerate = false;
};

struct ContactOptions {
    /// Restrict the search to the largest 4-connected LV and LA components.
    /// Off by default: raw network output is used as is.
    bool largest_components_only = false;
};

/// Throws NoContact when LV and LA never share a 4-neighbour edge.
ContactLine extract_contact_line(const LabelMap& map, const ContactOptions& options = {});

/// aMVL is the contact pixel with minimum x, pMVL the one with maximum x;
/// equal x is resolved by minimum y.
HingePair extract_hinge_points(const ContactLine& line, Spacing spacing);

/// Anisotropic Euclidean distance between the hinge points in mm.
double mv_diameter(const HingePair& hinges) noexcept;

HingePair make_hinge_pair(Pixel amvl, Pixel pmvl, Spacing spacing) noexcept;

enum class CenteringReason { LaAbsent, LaTouchesBottom, LaTouchesSide, LaAreaRatioLow };

std::string_view to_string(CenteringReason reason) noexcept;

struct CenteringOptions {
    double min_area_ratio = 0.15;
    /// LA touching the left/right border is reported only when enabled.
    bool flag_side_contact = false;
};

struct CenteringDiagnosis {
    bool off_center = false;
    std::vector<CenteringReason> reasons;
    /// LA pixel count over LV pixel count; +inf when LV is absent but LA is not.
    double la_area_ratio = 0.0;
};

/// Flags acquisitions where the atrium is cut off by the image frame.
CenteringDiagnosis diagnose_centering(const LabelMap& map, const CenteringOptions& options = {});

} // namespace mvhinge
