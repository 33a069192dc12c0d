#include "mvhinge/report_io.hpp"

#include "mvhinge/error.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace mvhinge {

using nlohmann::json;

namespace {

json pixel_json(Pixel p) { return json::array({p.x, p.y}); }
json point_json(PointMm p) { return json::array({p.x, p.y}); }

} // namespace

json hinge_to_json(const HingePair& hinges, const CenteringDiagnosis& centering) {
    json reasons = json::array();
    for (auto r : centering.reasons) reasons.push_back(std::string(to_string(r)));
    json ratio = std::isfinite(centering.la_area_ratio) ? json(centering.la_area_ratio) : json(nullptr);
    return json{
        {"amvl_px", pixel_json(hinges.amvl_px)},
        {"pmvl_px", pixel_json(hinges.pmvl_px)},
        {"amvl_mm", point_json(hinges.amvl_mm)},
        {"pmvl_mm", point_json(hinges.pmvl_mm)},
        {"diameter_mm", hinges.diameter_mm},
        {"degenerate", hinges.degenerate},
        {"off_center", centering.off_center},
        {"centering_reasons", reasons},
        {"la_area_ratio", ratio},
    };
}

json calibration_to_json(const CalibrationTable& table) {
    json entries = json::array();
    for (const auto& [cell, bias] : table.bias_mm) {
        entries.push_back({{"subgroup", to_string(cell.subgroup)},
                           {"point", std::string(to_string(cell.point))},
                           {"axis", std::string(to_string(cell.axis))},
                           {"bias_mm", bias}});
    }
    return entries;
}

CalibrationTable calibration_from_json(const json& doc) {
    if (!doc.is_array()) throw Error(ErrorCode::BadValue, "calibration document must be an array");
    CalibrationTable table;
    for (const auto& entry : doc) {
        if (!entry.is_object()) throw Error(ErrorCode::BadValue, "calibration entry must be an object");
        const auto text = [&](const char* key) -> std::string {
            const auto it = entry.find(key);
            if (it == entry.end() || !it->is_string()) throw Error(ErrorCode::BadValue, std::string("calibration entry lacks ") + key);
            return it->get<std::string>();
        };
        const auto subgroup = parse_subgroup(text("subgroup"));
        const auto point = parse_point(text("point"));
        const auto axis = parse_axis(text("axis"));
        const auto bias = entry.find("bias_mm");
        if (!subgroup || !point || !axis || bias == entry.end() || !bias->is_number()) {
            throw Error(ErrorCode::BadValue, "calibration entry " + entry.dump());
        }
        const CellKey cell{*subgroup, *point, *axis};
        if (!table.bias_mm.emplace(cell, bias->get<double>()).second) {
            throw Error(ErrorCode::BadValue, "duplicate calibration cell " + to_string(cell));
        }
    }
    return table;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    // Avoid "-0.00".
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string summary_to_csv(const SummaryReport& report) {
    std::ostringstream out;
    out << kSummaryCsvHeader << '\n';
    for (const auto& r : report.rows) {
        out << r.subgroup << ',' << r.point << ',' << r.axis << ',' << r.n << ',' << fixed(r.p15_mm, 2) << ','
            << fixed(r.p50_mm, 2) << ',' << fixed(r.p85_mm, 2) << ',' << fixed(r.median_abs_mm, 2) << ','
            << (r.shapiro_w ? fixed(*r.shapiro_w, 4) : "") << ',' << (r.shapiro_p ? fixed(*r.shapiro_p, 4) : "")
            << '\n';
    }
    return out.str();
}

namespace {

const std::set<std::string>& phantom_keys() {
    static const std::set<std::string> keys = {
        "width",        "height",          "spacing",       "lv_center_x", "lv_apex_y",
        "lv_semi_axis_x", "contact_y",     "contact_y_right", "hinge_x_left", "hinge_x_right",
        "la_depth",     "mis_center",      "jitter_seed",   "jitter_amp"};
    return keys;
}

} // namespace

PhantomSpec phantom_spec_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::BadValue, "phantom spec must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!phantom_keys().contains(key)) throw Error(ErrorCode::BadValue, "unknown phantom spec key " + key);
    }
    PhantomSpec spec;
    const auto get_int = [&](const char* key, auto& target) {
        const auto it = doc.find(key);
        if (it == doc.end()) return;
        if (!it->is_number_integer()) throw Error(ErrorCode::BadValue, std::string(key) + " must be an integer");
        target = it->get<std::remove_reference_t<decltype(target)>>();
    };
    get_int("width", spec.width);
    get_int("height", spec.height);
    get_int("lv_center_x", spec.lv_center_x);
    get_int("lv_apex_y", spec.lv_apex_y);
    get_int("lv_semi_axis_x", spec.lv_semi_axis_x);
    get_int("contact_y", spec.contact_y);
    get_int("hinge_x_left", spec.hinge_x_left);
    get_int("hinge_x_right", spec.hinge_x_right);
    get_int("la_depth", spec.la_depth);
    get_int("mis_center", spec.mis_center);
    get_int("jitter_seed", spec.jitter_seed);
    get_int("jitter_amp", spec.jitter_amp);
    if (const auto it = doc.find("contact_y_right"); it != doc.end() && !it->is_null()) {
        int v = 0;
        get_int("contact_y_right", v);
        spec.contact_y_right = v;
    }
    if (const auto it = doc.find("spacing"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
            throw Error(ErrorCode::BadValue, "spacing must be [sx, sy]");
        }
        spec.spacing = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    }
    return spec;
}

json phantom_spec_to_json(const PhantomSpec& spec) {
    json doc = {
        {"width", spec.width},
        {"height", spec.height},
        {"spacing", json::array({spec.spacing.sx, spec.spacing.sy})},
        {"lv_center_x", spec.lv_center_x},
        {"lv_apex_y", spec.lv_apex_y},
        {"lv_semi_axis_x", spec.lv_semi_axis_x},
        {"contact_y", spec.contact_y},
        {"hinge_x_left", spec.hinge_x_left},
        {"hinge_x_right", spec.hinge_x_right},
        {"la_depth", spec.la_depth},
        {"mis_center", spec.mis_center},
        {"jitter_seed", spec.jitter_seed},
        {"jitter_amp", spec.jitter_amp},
    };
    if (spec.contact_y_right) doc["contact_y_right"] = *spec.contact_y_right;
    return doc;
}

} // namespace mvhinge
