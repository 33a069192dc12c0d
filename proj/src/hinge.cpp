#include "mvhinge/hinge.hpp"

#include "mvhinge/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvhinge {

namespace {

/// Keeps only the largest LV and largest LA component; everything else
/// becomes background.
LabelMap keep_largest_chambers(const LabelMap& map) {
    LabelMap out(map.width(), map.height(), map.spacing());
    for (Label label : {Label::LV, Label::LA}) {
        const auto comps = connected_components(map, label, Connectivity::Four);
        if (comps.empty()) continue;
        for (const Pixel& p : comps.front().pixels) out.set(p.x, p.y, label);
    }
    return out;
}

ContactLine scan_contacts(const LabelMap& map) {
    ContactLine line;
    const int w = map.width();
    const int h = map.height();
    // Column-major scan yields the (x, y) order directly.
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            if (map.at(x, y) != Label::LV) continue;
            const bool touches = (x > 0 && map.at(x - 1, y) == Label::LA) ||
                                 (x + 1 < w && map.at(x + 1, y) == Label::LA) ||
                                 (y > 0 && map.at(x, y - 1) == Label::LA) ||
                                 (y + 1 < h && map.at(x, y + 1) == Label::LA);
            if (touches) line.pixels.push_back({x, y});
        }
    }
    return line;
}

} // namespace

ContactLine extract_contact_line(const LabelMap& map, const ContactOptions& options) {
    ContactLine line = options.largest_components_only ? scan_contacts(keep_largest_chambers(map))
                                                       : scan_contacts(map);
    if (line.pixels.empty()) throw Error(ErrorCode::NoContact, "no LV-LA contact line");
    return line;
}

HingePair make_hinge_pair(Pixel amvl, Pixel pmvl, Spacing spacing) noexcept {
    HingePair hp;
    hp.amvl_px = amvl;
    hp.pmvl_px = pmvl;
    hp.spacing = spacing;
    hp.amvl_mm = {amvl.x * spacing.sx, amvl.y * spacing.sy};
    hp.pmvl_mm = {pmvl.x * spacing.sx, pmvl.y * spacing.sy};
    const double dx = (pmvl.x - amvl.x) * spacing.sx;
    const double dy = (pmvl.y - amvl.y) * spacing.sy;
    hp.diameter_mm = std::sqrt(dx * dx + dy * dy);
    hp.degenerate = amvl == pmvl;
    return hp;
}

HingePair extract_hinge_points(const ContactLine& line, Spacing spacing) {
    if (line.pixels.empty()) throw Error(ErrorCode::NoContact, "empty contact line");
    // Sorted by (x, y): the first pixel is min-x/min-y. For the maximum x we
    // need the first pixel of the last column.
    const Pixel amvl = line.pixels.front();
    const int max_x = line.pixels.back().x;
    const auto pmvl_it = std::lower_bound(line.pixels.begin(), line.pixels.end(), Pixel{max_x, std::numeric_limits<int>::min()});
    return make_hinge_pair(amvl, *pmvl_it, spacing);
}

double mv_diameter(const HingePair& hinges) noexcept { return hinges.diameter_mm; }

std::string_view to_string(CenteringReason reason) noexcept {
    switch (reason) {
    case CenteringReason::LaAbsent: return "LA_absent";
    case CenteringReason::LaTouchesBottom: return "LA_touches_bottom";
    case CenteringReason::LaTouchesSide: return "LA_touches_side";
    case CenteringReason::LaAreaRatioLow: return "LA_area_ratio_low";
    }
    return "?";
}

CenteringDiagnosis diagnose_centering(const LabelMap& map, const CenteringOptions& options) {
    CenteringDiagnosis d;
    const auto la_area = map.count(Label::LA);
    const auto lv_area = map.count(Label::LV);

    if (la_area == 0) {
        d.la_area_ratio = 0.0;
        d.reasons.push_back(CenteringReason::LaAbsent);
    } else {
        d.la_area_ratio = lv_area == 0 ? std::numeric_limits<double>::infinity()
                                       : static_cast<double>(la_area) / static_cast<double>(lv_area);
        const auto comps = connected_components(map, Label::LA, Connectivity::Four);
        const auto& largest = comps.front();
        if (largest.touches_border.bottom) d.reasons.push_back(CenteringReason::LaTouchesBottom);
        if (options.flag_side_contact && (largest.touches_border.left || largest.touches_border.right)) {
            d.reasons.push_back(CenteringReason::LaTouchesSide);
        }
        if (d.la_area_ratio < options.min_area_ratio) d.reasons.push_back(CenteringReason::LaAreaRatioLow);
    }
    d.off_center = !d.reasons.empty();
    return d;
}

} // namespace mvhinge
