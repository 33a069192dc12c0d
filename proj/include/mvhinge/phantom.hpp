#pragma once

#include "mvhinge/hinge.hpp"
#include "mvhinge/labelmap.hpp"
#include "mvhinge/stats.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mvhinge {

/// Synthetic LV/LA label map with analytically known hinge points.
///
/// The LV is a half-ellipse standing on the LV-LA interface, clipped to the
/// columns [hinge_x_left, hinge_x_right]; the LA hangs la_depth rows below
/// the interface over the same columns. The interface row ramps linearly
/// from contact_y at the left hinge to contact_y_right at the right hinge,
/// optionally roughened by a bounded random walk.
struct PhantomSpec {
    int width = 600;
    int height = 800;
    Spacing spacing{0.3, 0.15};

    int lv_center_x = 300;
    int lv_apex_y = 150;
    int lv_semi_axis_x = 70;

    int contact_y = 500;
    std::optional<int> contact_y_right; // defaults to contact_y
    int hinge_x_left = 250;
    int hinge_x_right = 350;
    int la_depth = 180;

    /// Rows cropped from the bottom of the image (0 = none).
    int mis_center = 0;

    std::uint64_t jitter_seed = 0;
    int jitter_amp = 0;

    int right_contact_y() const noexcept { return contact_y_right.value_or(contact_y); }
};

struct Phantom {
    LabelMap map;
    /// Absent when cropping removed the whole atrium.
    std::optional<HingePair> hinges;
    CenteringDiagnosis centering;
};

/// Throws SpecOutOfBounds when the geometry leaves the image, the LA would
/// split into pieces, or the crop cuts through the atrium in some columns
/// but not others.
Phantom generate_phantom(const PhantomSpec& spec, const CenteringOptions& centering = {});

struct CellPerturbation {
    double bias_mm = 0.0;
    double spread_mm = 0.0;
};

/// Missing cells are unperturbed.
using ErrorModel = std::map<CellKey, CellPerturbation>;

struct CohortCase {
    std::string case_id;
    Subgroup subgroup;
    Phantom truth;
    Phantom prediction;
};

/// n cases cycling through the four subgroups. Each prediction moves the
/// hinge columns and interface rows by whole pixels drawn from the error
/// model: round((bias + spread·z) / spacing) with z standard normal.
std::vector<CohortCase> generate_cohort(const PhantomSpec& base, int n, const ErrorModel& model,
                                        std::uint64_t seed);

/// CAMUS-style identifier, e.g. "patient0003_4CH_ES".
std::string camus_case_id(int patient, Subgroup subgroup);

} // namespace mvhinge
