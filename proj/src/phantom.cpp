#include "mvhinge/phantom.hpp"

#include "mvhinge/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace mvhinge {

namespace {

[[noreturn]] void out_of_bounds(const std::string& what) { throw Error(ErrorCode::SpecOutOfBounds, what); }

/// Column-wise geometry of a phantom before rasterisation.
struct Layout {
    int x0 = 0;
    int x1 = 0;
    int rows = 0;               // image height after cropping
    std::vector<int> interface; // LV bottom row per column
    std::vector<int> lv_top;
    std::vector<int> la_bottom; // clipped to the cropped image
    bool la_present = false;

    int iface(int x) const { return interface[static_cast<std::size_t>(x - x0)]; }
    int top(int x) const { return lv_top[static_cast<std::size_t>(x - x0)]; }
    int bottom(int x) const { return la_bottom[static_cast<std::size_t>(x - x0)]; }
};

Layout layout_of(const PhantomSpec& s) {
    if (s.width < 1 || s.height < 1) out_of_bounds("image size must be positive");
    if (!(s.spacing.sx > 0.0) || !(s.spacing.sy > 0.0) || !std::isfinite(s.spacing.sx) ||
        !std::isfinite(s.spacing.sy)) {
        out_of_bounds("spacing must be finite and positive");
    }
    if (s.hinge_x_left < 0 || s.hinge_x_left >= s.hinge_x_right || s.hinge_x_right >= s.width) {
        out_of_bounds("need 0 <= hinge_x_left < hinge_x_right < width");
    }
    if (s.lv_semi_axis_x < 1) out_of_bounds("lv_semi_axis_x must be >= 1");
    if (s.lv_apex_y < 0 || s.lv_apex_y >= s.contact_y) out_of_bounds("need 0 <= lv_apex_y < contact_y");
    if (s.la_depth < 1) out_of_bounds("la_depth must be >= 1");
    if (s.jitter_amp < 0) out_of_bounds("jitter_amp must be >= 0");
    if (s.mis_center < 0 || s.mis_center >= s.height) out_of_bounds("need 0 <= mis_center < height");

    Layout l;
    l.x0 = s.hinge_x_left;
    l.x1 = s.hinge_x_right;
    l.rows = s.height - s.mis_center;

    const int span = l.x1 - l.x0;
    const int y_left = s.contact_y;
    const int y_right = s.right_contact_y();
    const double semi_y = static_cast<double>(s.contact_y - s.lv_apex_y);

    std::mt19937_64 rng(s.jitter_seed);
    int walk = 0;
    for (int x = l.x0; x <= l.x1; ++x) {
        if (x > l.x0 && s.jitter_amp > 0) {
            walk += static_cast<int>(rng() % 3) - 1;
            walk = std::clamp(walk, -s.jitter_amp, s.jitter_amp);
        }
        const int ramp = y_left + static_cast<int>(std::lround(static_cast<double>(x - l.x0) * (y_right - y_left) / span));
        const int iface = ramp + walk;

        const double u = static_cast<double>(x - s.lv_center_x) / s.lv_semi_axis_x;
        const int rise = u * u < 1.0 ? static_cast<int>(std::floor(semi_y * std::sqrt(1.0 - u * u))) : 0;
        const int top = iface - rise;

        if (top < 0 || iface < 0) out_of_bounds("LV leaves the top of the image at column " + std::to_string(x));
        if (iface + s.la_depth > s.height - 1) out_of_bounds("LA leaves the image at column " + std::to_string(x));
        if (!l.interface.empty() && std::abs(iface - l.interface.back()) >= s.la_depth) {
            out_of_bounds("interface step at column " + std::to_string(x) + " would split the LA");
        }
        l.interface.push_back(iface);
        l.lv_top.push_back(top);
        l.la_bottom.push_back(std::min(iface + s.la_depth, l.rows - 1));
    }

    int present = 0;
    for (int x = l.x0; x <= l.x1; ++x) present += l.iface(x) + 1 <= l.rows - 1;
    if (present != 0 && present != span + 1) out_of_bounds("crop truncates the LA in some columns only");
    l.la_present = present != 0;
    return l;
}

/// Top-most contact pixel in the extreme column `c`, whose only chamber
/// neighbour column is `nb`.
int hinge_row(const Layout& l, int c, int nb) {
    int best = l.iface(c); // LA directly below
    const int lo = std::max(l.top(c), l.iface(nb) + 1);
    const int hi = std::min(l.iface(c), l.bottom(nb));
    if (lo <= hi) best = std::min(best, lo);
    return best;
}

CenteringDiagnosis expected_centering(const Layout& l, const PhantomSpec& s, const CenteringOptions& opt) {
    CenteringDiagnosis d;
    if (!l.la_present) {
        d.reasons.push_back(CenteringReason::LaAbsent);
        d.off_center = true;
        return d;
    }
    long long la_area = 0;
    long long lv_area = 0;
    bool touches_bottom = false;
    for (int x = l.x0; x <= l.x1; ++x) {
        la_area += l.bottom(x) - l.iface(x);
        lv_area += std::max(0, std::min(l.iface(x), l.rows - 1) - l.top(x) + 1);
        touches_bottom |= l.bottom(x) == l.rows - 1;
    }
    d.la_area_ratio = static_cast<double>(la_area) / static_cast<double>(lv_area);
    if (touches_bottom) d.reasons.push_back(CenteringReason::LaTouchesBottom);
    if (opt.flag_side_contact && (l.x0 == 0 || l.x1 == s.width - 1)) d.reasons.push_back(CenteringReason::LaTouchesSide);
    if (d.la_area_ratio < opt.min_area_ratio) d.reasons.push_back(CenteringReason::LaAreaRatioLow);
    d.off_center = !d.reasons.empty();
    return d;
}

} // namespace

Phantom generate_phantom(const PhantomSpec& spec, const CenteringOptions& centering) {
    const Layout l = layout_of(spec);
    LabelMap map(spec.width, l.rows, spec.spacing);
    for (int x = l.x0; x <= l.x1; ++x) {
        for (int y = l.top(x); y <= std::min(l.iface(x), l.rows - 1); ++y) map.set(x, y, Label::LV);
        for (int y = l.iface(x) + 1; y <= l.bottom(x); ++y) map.set(x, y, Label::LA);
    }

    std::optional<HingePair> hinges;
    if (l.la_present) {
        const Pixel amvl{l.x0, hinge_row(l, l.x0, l.x0 + 1)};
        const Pixel pmvl{l.x1, hinge_row(l, l.x1, l.x1 - 1)};
        hinges = make_hinge_pair(amvl, pmvl, spec.spacing);
    }
    return Phantom{std::move(map), hinges, expected_centering(l, spec, centering)};
}

std::string camus_case_id(int patient, Subgroup subgroup) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "patient%04d_%s_%s", patient, subgroup.view == View::A4C ? "4CH" : "2CH",
                  subgroup.phase == Phase::ED ? "ED" : "ES");
    return buf;
}

namespace {

class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    // Box-Muller on 53-bit uniforms; fixed so cohorts are reproducible
    // across standard library implementations.
    double operator()() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 rng_;
    std::optional<double> spare_;
};

} // namespace

std::vector<CohortCase> generate_cohort(const PhantomSpec& base, int n, const ErrorModel& model,
                                        std::uint64_t seed) {
    if (n < 1) out_of_bounds("cohort size must be >= 1");
    Gaussian gauss(seed);
    std::vector<CohortCase> cases;
    cases.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        const Subgroup subgroup = kAllSubgroups[static_cast<std::size_t>(i % 4)];
        PhantomSpec truth_spec = base;
        truth_spec.jitter_seed = base.jitter_seed + static_cast<std::uint64_t>(i);

        const auto shift = [&](PointKind point, Axis axis) {
            const auto it = model.find(CellKey{subgroup, point, axis});
            const double z = gauss();
            if (it == model.end()) return 0;
            const double step = axis == Axis::X ? base.spacing.sx : base.spacing.sy;
            return static_cast<int>(std::lround((it->second.bias_mm + it->second.spread_mm * z) / step));
        };
        PhantomSpec pred_spec = truth_spec;
        pred_spec.hinge_x_left += shift(PointKind::AMVL, Axis::X);
        pred_spec.contact_y += shift(PointKind::AMVL, Axis::Y);
        pred_spec.hinge_x_right += shift(PointKind::PMVL, Axis::X);
        pred_spec.contact_y_right = truth_spec.right_contact_y() + shift(PointKind::PMVL, Axis::Y);

        cases.push_back(CohortCase{camus_case_id(i / 4 + 1, subgroup), subgroup, generate_phantom(truth_spec),
                                   generate_phantom(pred_spec)});
    }
    return cases;
}

} // namespace mvhinge
