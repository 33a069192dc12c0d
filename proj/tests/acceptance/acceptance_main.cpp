// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "golden/shapiro_golden.hpp"
#include "oracles.hpp"

#include "mvhinge/cli.hpp"
#include "mvhinge/error.hpp"
#include "mvhinge/hinge.hpp"
#include "mvhinge/labelmap.hpp"
#include "mvhinge/mhd_io.hpp"
#include "mvhinge/phantom.hpp"
#include "mvhinge/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <regex>
#include <string>
#include <vector>

using namespace mvhinge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class Outcome { Pass, Fail, Skip };

int g_failures = 0;

void verdict(const char* name, Outcome outcome, const std::string& detail) {
    const char* tag = outcome == Outcome::Pass ? "PASS" : outcome == Outcome::Fail ? "FAIL" : "SKIP";
    if (outcome == Outcome::Fail) ++g_failures;
    std::printf("[%s] %s: %s\n", tag, name, detail.c_str());
    std::fflush(stdout);
}

void verdict(const char* name, bool ok, const std::string& detail) {
    verdict(name, ok ? Outcome::Pass : Outcome::Fail, detail);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

fs::path scratch(const char* name) {
    auto dir = fs::temp_directory_path() / "mvhinge_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Jitter-free spec at 700×1000 whose interface slope stays within one row
/// per column, so the hinge rows are exactly contact_y / contact_y_right.
PhantomSpec random_spec(std::mt19937_64& rng) {
    PhantomSpec s;
    s.width = 700;
    s.height = 1000;
    s.spacing = {std::uniform_real_distribution<double>(0.1, 0.6)(rng),
                 std::uniform_real_distribution<double>(0.1, 0.6)(rng)};
    s.hinge_x_left = uniform(rng, 0, 400);
    s.hinge_x_right = uniform(rng, s.hinge_x_left + 1, std::min(699, s.hinge_x_left + 300));
    const int span = s.hinge_x_right - s.hinge_x_left;
    s.lv_center_x = uniform(rng, s.hinge_x_left, s.hinge_x_right);
    s.lv_semi_axis_x = uniform(rng, std::max(1, span / 2), span + 40);
    s.contact_y = uniform(rng, 350, 700);
    s.contact_y_right = s.contact_y + uniform(rng, -std::min(span, 60), std::min(span, 60));
    s.lv_apex_y = uniform(rng, 70, s.contact_y - 60);
    const int lowest = std::max(s.contact_y, *s.contact_y_right);
    s.la_depth = uniform(rng, 5, 999 - lowest);
    // Occasionally crop the bottom without removing the atrium from any column.
    const int free_rows = 999 - lowest - s.la_depth;
    const int max_crop = 999 - lowest - 1;
    s.mis_center = uniform(rng, 0, 3) == 0 ? uniform(rng, 0, max_crop) : uniform(rng, 0, free_rows);
    return s;
}

void phantom_exactness() {
    std::mt19937_64 rng(20211014);
    const auto dir = scratch("phantom");
    int exact = 0;
    double worst_ms = 0.0;
    std::string first_problem;
    for (int i = 0; i < 100; ++i) {
        const PhantomSpec s = random_spec(rng);
        try {
            const Phantom ph = generate_phantom(s);
            const auto path = dir / "case.mhd";
            const auto t0 = Clock::now();
            save_mhd(path, ph.map);
            const LabelMap back = load_mhd(path);
            const HingePair hp = extract_hinge_points(extract_contact_line(back), back.spacing());
            worst_ms = std::max(worst_ms, ms_since(t0));
            const bool ok = ph.hinges && hp.amvl_px == Pixel{s.hinge_x_left, s.contact_y} &&
                            hp.pmvl_px == Pixel{s.hinge_x_right, *s.contact_y_right} &&
                            hp.amvl_px == ph.hinges->amvl_px && hp.pmvl_px == ph.hinges->pmvl_px && back == ph.map;
            if (ok) ++exact;
            else if (first_problem.empty()) first_problem = fmt("case %d: hinge mismatch", i);
        } catch (const Error& e) {
            if (first_problem.empty()) first_problem = fmt("case %d: %s", i, e.what());
        }
    }
    verdict("phantom exactness", exact == 100,
            fmt("%d/100 specs recovered with 0 px error", exact) + (first_problem.empty() ? "" : "; " + first_problem));
    verdict("phantom pipeline time", worst_ms < 50.0,
            fmt("slowest write->parse->extract at 700x1000 took %.1f ms (limit 50 ms)", worst_ms));
}

void parser_round_trip() {
    std::mt19937_64 rng(7);
    int identical = 0;
    for (int i = 0; i < 1000; ++i) {
        const Spacing sp{std::uniform_real_distribution<double>(1e-3, 10.0)(rng),
                         std::uniform_real_distribution<double>(1e-3, 10.0)(rng)};
        const LabelMap m = oracle::random_map(rng, uniform(rng, 1, 64), uniform(rng, 1, 64), sp);
        const MhdImage img = write_label_map(m);
        const ImageMeta meta = parse_mhd_header(img.header);
        const LabelMap back = read_label_map(meta, img.payload);
        if (back == m && back.spacing() == m.spacing()) ++identical;
    }
    verdict("parser round-trip", identical == 1000, fmt("%d/1000 maps identical after write->read", identical));

    const std::string tail = "ElementType = MET_UCHAR\nElementDataFile = a.raw\n";
    const std::vector<std::string> corpus = {
        "",
        "garbage without equals sign",
        "= 2\n",
        "NDims = 2\n",
        "NDims = 3\nDimSize = 4 4 4\n" + tail,
        "NDims = 1\nDimSize = 4\n" + tail,
        "NDims = two\nDimSize = 4 4\n" + tail,
        "NDims = 2\nDimSize = 4\n" + tail,
        "NDims = 2\nDimSize = 4 4 4\n" + tail,
        "NDims = 2\nDimSize = -4 4\n" + tail,
        "NDims = 2\nDimSize = 0 4\n" + tail,
        "NDims = 2\nDimSize = 99999999 4\n" + tail,
        "NDims = 2\nDimSize = 4x 4\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementSpacing = 0 1\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementSpacing = -1 1\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementSpacing = inf 1\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementSpacing = 1\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementType = MET_FLOAT\nElementDataFile = a.raw\n",
        "NDims = 2\nDimSize = 4 4\nElementDataFile = a.raw\n",
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\n",
        "NDims = 2\nDimSize = 4 4\nCompressedData = True\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = /abs/a.raw\n",
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = ../a.raw\n",
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = sub/a.raw\n",
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = LIST\n",
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = a%03d.raw 1 3 1\n",
        "NDims = 2\nNDims = 2\nDimSize = 4 4\n" + tail,
        "NDims = 2\nDimSize = 4 4\nElementType = MET_UCHAR\nElementDataFile = \n",
        std::string("NDims = 2\0\nDimSize = 4 4\n", 24) + tail,
    };
    int typed = 0;
    std::string escaped;
    for (const auto& text : corpus) {
        try {
            parse_mhd_header(text);
            if (escaped.empty()) escaped = "accepted: " + text.substr(0, 40);
        } catch (const Error&) {
            ++typed;
        } catch (const std::exception& e) {
            if (escaped.empty()) escaped = std::string("untyped exception: ") + e.what();
        }
    }

    // Random byte mutations of a valid header: accepted or typed error, nothing else.
    const std::string valid = write_label_map(LabelMap(5, 7, {0.3, 0.15})).header;
    int mutants_ok = 0;
    const int mutants = 5000;
    for (int i = 0; i < mutants; ++i) {
        std::string text = valid;
        const int edits = uniform(rng, 1, 6);
        for (int k = 0; k < edits; ++k) {
            const auto pos = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(text.size()) - 1));
            switch (uniform(rng, 0, 2)) {
            case 0: text[pos] = static_cast<char>(uniform(rng, 0, 255)); break;
            case 1: text.erase(pos, 1); break;
            default: text.insert(pos, 1, static_cast<char>(uniform(rng, 0, 255))); break;
            }
        }
        try {
            const ImageMeta meta = parse_mhd_header(text);
            if (meta.width >= 1 && meta.height >= 1 && meta.spacing.sx > 0 && meta.spacing.sy > 0) ++mutants_ok;
        } catch (const Error&) {
            ++mutants_ok;
        } catch (...) {
        }
    }
    const int n = static_cast<int>(corpus.size());
    verdict("parser fuzz", typed == n && mutants_ok == mutants,
            fmt("%d/%d malformed headers gave typed errors; %d/%d random mutants handled", typed, n, mutants_ok,
                mutants) +
                (escaped.empty() ? "" : "; " + escaped));
}

void dice_oracle() {
    std::mt19937_64 rng(16);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
        const LabelMap a = oracle::random_map(rng, 16, 16);
        const LabelMap b = oracle::random_map(rng, 16, 16);
        bool good = true;
        for (Label l : {Label::Background, Label::LV, Label::LA}) {
            const double d = dice(a, b, l);
            good = good && d == oracle::dice(a, b, l) && d == dice(b, a, l) && d >= 0.0 && d <= 1.0;
            if (a.count(l) > 0) good = good && dice(a, a, l) == 1.0;
        }
        ok += good;
    }
    verdict("dice oracle", ok == 200, fmt("%d/200 pairs exact, symmetric, self-Dice 1", ok));
}

void contact_oracle() {
    std::mt19937_64 rng(32);
    int ok = 0;
    int drawn = 0;
    while (drawn < 200) {
        const LabelMap m = oracle::random_map(rng, 32, 32);
        if (m.count(Label::LV) == 0 || m.count(Label::LA) == 0) continue;
        ++drawn;
        const auto expected = oracle::contact_pixels(m);
        try {
            ok += extract_contact_line(m).pixels == expected;
        } catch (const Error&) {
            ok += expected.empty();
        }
    }
    verdict("contact-line oracle", ok == 200, fmt("%d/200 maps match the brute-force adjacency scan", ok));
}

std::vector<ErrorSample> cohort_errors(const std::vector<CohortCase>& cases) {
    std::vector<ErrorSample> samples;
    for (const auto& c : cases) {
        const HingePair pred =
            extract_hinge_points(extract_contact_line(c.prediction.map), c.prediction.map.spacing());
        const HingePair truth = extract_hinge_points(extract_contact_line(c.truth.map), c.truth.map.spacing());
        const auto e = compute_errors(pred, truth, c.subgroup, c.case_id);
        samples.insert(samples.end(), e.begin(), e.end());
    }
    return samples;
}

PhantomSpec cohort_base() {
    PhantomSpec s;
    s.width = 300;
    s.height = 420;
    s.spacing = {0.3, 0.15};
    s.lv_center_x = 150;
    s.lv_apex_y = 40;
    s.lv_semi_axis_x = 80;
    s.contact_y = 250;
    s.hinge_x_left = 100;
    s.hinge_x_right = 200;
    s.la_depth = 100;
    return s;
}

ErrorModel random_model(std::mt19937_64& rng, double spread_max) {
    ErrorModel model;
    std::uniform_real_distribution<double> bias(-2.0, 2.0);
    std::uniform_real_distribution<double> spread(0.0, spread_max);
    for (auto g : kAllSubgroups)
        for (auto p : {PointKind::AMVL, PointKind::PMVL})
            for (auto a : {Axis::X, Axis::Y}) model[{g, p, a}] = {bias(rng), spread(rng)};
    return model;
}

void calibration() {
    const PhantomSpec base = cohort_base();
    std::mt19937_64 rng(6);

    // Identity: calibrated cell medians vanish.
    double worst_ratio = 0.0;
    int cells = 0;
    int cells_ok = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const auto cases = generate_cohort(base, 20 + 4 * trial + trial % 3, random_model(rng, 1.2), 100 + trial);
        const auto samples = cohort_errors(cases);
        const auto table = fit_calibration(samples);
        const auto calibrated = apply_calibration(samples, table);
        std::map<CellKey, std::vector<double>> by_cell;
        for (const auto& s : calibrated) by_cell[s.cell()].push_back(s.error_mm);
        for (const auto& [cell, values] : by_cell) {
            const double m = median(values);
            const double b = std::abs(*table.bias(cell));
            const double ulp = b > 0 ? std::nextafter(b, std::numeric_limits<double>::infinity()) - b
                                     : std::numeric_limits<double>::denorm_min();
            ++cells;
            cells_ok += std::abs(m) <= ulp;
            worst_ratio = std::max(worst_ratio, std::abs(m) / ulp);
        }
    }
    verdict("calibration identity", cells_ok == cells,
            fmt("%d/%d calibrated cell medians within 1 ulp of 0 (worst %.2f ulp)", cells_ok, cells, worst_ratio));

    // Recovery of injected biases. Zero spread isolates the pixel quantisation.
    const double tol = 0.5 * std::max(base.spacing.sx, base.spacing.sy);
    double worst = 0.0;
    int recovered = 0;
    int total = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const ErrorModel model = random_model(rng, 0.0);
        const auto table = fit_calibration(cohort_errors(generate_cohort(base, 16, model, 200 + trial)));
        for (const auto& [cell, pert] : model) {
            const double err = std::abs(*table.bias(cell) - pert.bias_mm);
            worst = std::max(worst, err);
            ++total;
            recovered += err <= tol + 1e-12;
        }
    }
    // Whole-pixel shifts: +1 px in x and +3 px in y.
    ErrorModel fig;
    for (auto g : kAllSubgroups)
        for (auto p : {PointKind::AMVL, PointKind::PMVL}) {
            fig[{g, p, Axis::X}] = {0.3, 0.0};
            fig[{g, p, Axis::Y}] = {0.45, 0.0};
        }
    const auto fig_table = fit_calibration(cohort_errors(generate_cohort(base, 8, fig, 9)));
    bool fig_ok = true;
    for (const auto& [cell, b] : fig_table.bias_mm) fig_ok = fig_ok && std::abs(b - fig[cell].bias_mm) < 1e-9;
    verdict("calibration bias recovery", recovered == total && fig_ok,
            fmt("%d/%d injected cell biases recovered, worst error %.4f mm (limit %.3f mm); +0.30/+0.45 mm case %s",
                recovered, total, worst, tol, fig_ok ? "exact" : "off"));
}

void percentile_oracle() {
    std::mt19937_64 rng(1000);
    int agree = 0;
    int ordered = 0;
    double worst_rel = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> v(static_cast<std::size_t>(uniform(rng, 1, 300)));
        const double scale = std::pow(10.0, uniform(rng, -3, 3));
        std::normal_distribution<double> value(uniform(rng, -5, 5), scale);
        for (auto& x : v) x = value(rng);
        if (i % 10 == 0) {
            for (auto& x : v) x = std::round(x); // ties
        }
        bool good = true;
        std::vector<double> ps = {0, 15, 50, 85, 100};
        for (int k = 0; k < 5; ++k) ps.push_back(std::uniform_real_distribution<double>(0, 100)(rng));
        for (double p : ps) {
            const double got = percentile(v, p);
            const double want = oracle::percentile(v, p);
            const double rel = got == want ? 0.0 : std::abs(got - want) / std::abs(want);
            worst_rel = std::max(worst_rel, rel);
            good = good && rel <= 1e-12;
        }
        agree += good;
        ordered += percentile(v, 15) <= percentile(v, 50) && percentile(v, 50) <= percentile(v, 85);
    }
    verdict("percentile oracle", agree == 1000 && ordered == 1000,
            fmt("%d/1000 vectors agree (worst relative diff %.1e); p15<=p50<=p85 on %d/1000", agree, worst_rel,
                ordered));
}

void shapiro() {
    int golden_ok = 0;
    double worst_w = 0.0;
    double worst_p = 0.0;
    const auto& cases = golden::shapiro_cases();
    for (const auto& c : cases) {
        const auto r = shapiro_wilk(c.x);
        const double dw = std::abs(r.w - c.w);
        const double dp = std::abs(r.p - c.p);
        worst_w = std::max(worst_w, dw);
        worst_p = std::max(worst_p, dp);
        golden_ok += dw <= 1e-4 && dp <= 1e-3;
    }
    const int n_golden = static_cast<int>(cases.size());
    verdict("shapiro-wilk golden", golden_ok == n_golden,
            fmt("%d/%d reference vectors match (max |dW| %.1e, max |dp| %.1e)", golden_ok, n_golden, worst_w, worst_p));

    std::mt19937_64 rng(42);
    double worst_aff = 0.0;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(static_cast<std::size_t>(uniform(rng, 3, 500)));
        std::lognormal_distribution<double> d(0.0, 0.8);
        for (auto& v : x) v = d(rng);
        const double w0 = shapiro_wilk(x).w;
        const double shift = std::uniform_real_distribution<double>(-1e3, 1e3)(rng);
        const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
        for (auto& v : x) v = shift + scale * v;
        worst_aff = std::max(worst_aff, std::abs(shapiro_wilk(x).w - w0));
    }
    verdict("shapiro-wilk affine invariance", worst_aff <= 1e-10,
            fmt("max |dW| over 200 shifted and scaled vectors %.1e (limit 1e-10)", worst_aff));

    std::mt19937_64 nrng(50);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> gauss(50);
    for (auto& v : gauss) v = normal(nrng);
    const double p_normal = shapiro_wilk(gauss).p;

    std::cauchy_distribution<double> cauchy(0.0, 1.0);
    std::vector<double> heavy(100);
    for (auto& v : heavy) v = cauchy(nrng);
    const double p_heavy = shapiro_wilk(heavy).p;
    verdict("shapiro-wilk decisions", p_normal > kNormalityAlpha && p_heavy < kNormalityAlpha,
            fmt("normal n=50 p=%.4f (> 0.05), Cauchy n=100 p=%.2e (< 0.05)", p_normal, p_heavy));
}

void diameters() {
    const double d1 = mv_diameter(make_hinge_pair({0, 0}, {100, 0}, {0.3, 0.15}));
    const double d2 = mv_diameter(make_hinge_pair({0, 0}, {0, 100}, {0.3, 0.15}));
    bool axis_ok = d1 == 100 * 0.3 && d2 == 100 * 0.15 && std::abs(d1 - 30.0) < 1e-12 && std::abs(d2 - 15.0) < 1e-12;

    std::mt19937_64 rng(3);
    int exact = 0;
    for (int i = 0; i < 500; ++i) {
        const Spacing sp{std::uniform_real_distribution<double>(0.05, 2.0)(rng),
                         std::uniform_real_distribution<double>(0.05, 2.0)(rng)};
        const int x0 = uniform(rng, 0, 500), y0 = uniform(rng, 0, 500), len = uniform(rng, 0, 500);
        const bool horizontal = i % 2 == 0;
        const auto hp = make_hinge_pair({x0, y0}, horizontal ? Pixel{x0 + len, y0} : Pixel{x0, y0 + len}, sp);
        exact += hp.diameter_mm == len * (horizontal ? sp.sx : sp.sy);
    }
    axis_ok = axis_ok && exact == 500;

    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Pixel a{uniform(rng, 0, 700), uniform(rng, 0, 1000)};
        const Pixel b{uniform(rng, 0, 700), uniform(rng, 0, 1000)};
        const Spacing sp{0.3, 0.15};
        const double base = make_hinge_pair(a, b, sp).diameter_mm;
        const double k = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const double scaled = make_hinge_pair(a, b, {sp.sx * k, sp.sy * k}).diameter_mm;
        if (base > 0) worst = std::max(worst, std::abs(scaled - k * base) / (k * base));
    }
    verdict("diameter units", axis_ok && worst <= 1e-12,
            fmt("100 px x 0.3 mm = %.12g mm, 100 px x 0.15 mm = %.12g mm, %d/500 axis-aligned exact, "
                "linear scaling worst relative diff %.1e",
                d1, d2, exact, worst));
}

void camus_truth_diameters() {
    const char* root = std::getenv("CAMUS_ROOT");
    if (!root || !fs::is_directory(root)) {
        verdict("CAMUS ground-truth diameters", Outcome::Skip, "set CAMUS_ROOT to the CAMUS training directory to run");
        return;
    }
    static const std::regex gt_name(R"(patient\d+_(2CH|4CH)_(ED|ES)_gt\.mhd)");
    const auto t0 = Clock::now();
    std::map<Subgroup, std::vector<double>> by_group;
    int failed = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        const std::string name = entry.path().filename().string();
        if (!entry.is_regular_file() || !std::regex_match(name, gt_name)) continue;
        const auto group = cli::infer_subgroup(name);
        try {
            const LabelMap m = load_mhd(entry.path());
            by_group[*group].push_back(extract_hinge_points(extract_contact_line(m), m.spacing()).diameter_mm);
        } catch (const Error&) {
            ++failed;
        }
    }
    const double seconds = ms_since(t0) / 1000.0;
    const std::map<Subgroup, double> table2 = {{{View::A4C, Phase::ED}, 28.8},
                                               {{View::A4C, Phase::ES}, 28.3},
                                               {{View::A2C, Phase::ED}, 31.7},
                                               {{View::A2C, Phase::ES}, 26.1}};
    bool ok = seconds < 60.0;
    std::string detail;
    for (const auto& [g, expected] : table2) {
        const auto it = by_group.find(g);
        if (it == by_group.end() || it->second.empty()) {
            ok = false;
            detail += to_string(g) + " no masks; ";
            continue;
        }
        const double m = median(it->second);
        ok = ok && std::abs(m - expected) <= 0.5;
        detail += fmt("%s %.2f mm (expected %.1f, n=%zu); ", to_string(g).c_str(), m, expected, it->second.size());
    }
    detail += fmt("%d unreadable masks; %.1f s", failed, seconds);
    verdict("CAMUS ground-truth diameters", ok, detail);
}

} // namespace

int main() {
    phantom_exactness();
    parser_round_trip();
    dice_oracle();
    contact_oracle();
    calibration();
    percentile_oracle();
    shapiro();
    diameters();
    camus_truth_diameters();
    std::printf("%d criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
