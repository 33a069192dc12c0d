#include "mvhinge/cli.hpp"

#include "mvhinge/error.hpp"
#include "mvhinge/hinge.hpp"
#include "mvhinge/phantom.hpp"
#include "mvhinge/report_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace mvhinge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadValue, path.string() + ": " + e.what());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

int report(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::NoContact ? kExitEmptyResult : kExitInputError;
}

} // namespace

int run_extract(const ExtractOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const LabelMap map = load_mhd(options.mask, mapping_for(options.encoding));
        const auto line = extract_contact_line(map, {options.largest_components});
        const auto hinges = extract_hinge_points(line, map.spacing());
        const auto centering = diagnose_centering(map, {options.offcenter_ratio});
        out << hinge_to_json(hinges, centering).dump(2) << '\n';
        return kExitOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

int run_dice(const DiceOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const LabelMap pred = load_mhd(options.prediction, mapping_for(options.prediction_encoding));
        const LabelMap truth = load_mhd(options.truth, mapping_for(options.truth_encoding));
        out << fixed(dice(pred, truth, options.label), 4) << '\n';
        return kExitOk;
    } catch (const Error& e) {
        return report(e, err);
    }
}

namespace {

struct CaseResult {
    CaseRecord record;
    std::optional<Subgroup> subgroup;
    std::optional<HingePair> predicted;
    std::optional<HingePair> truth;
    bool off_center = false;
    std::vector<ErrorSample> errors;
    std::optional<double> dice_lv;
    std::optional<double> dice_la;
    std::string failure;
};

CaseResult evaluate_case(const CaseRecord& record, const EvaluateOptions& options) {
    CaseResult r;
    r.record = record;
    try {
        r.subgroup = record.subgroup_text.empty() ? infer_subgroup(record.case_id) : infer_subgroup(record.subgroup_text);
        if (!r.subgroup && record.subgroup_text.empty()) r.subgroup = infer_subgroup(record.prediction.filename().string());
        if (!r.subgroup) {
            throw Error(ErrorCode::BadValue, "cannot determine subgroup for '" + record.case_id + "'");
        }
        if (!record.truth) throw Error(ErrorCode::MissingKey, "no truth mask for '" + record.case_id + "'");

        const LabelMap pred = load_mhd(record.prediction, mapping_for(options.prediction_encoding));
        const LabelMap truth = load_mhd(*record.truth, mapping_for(options.truth_encoding));
        if (options.dice) {
            r.dice_lv = dice(pred, truth, Label::LV);
            r.dice_la = dice(pred, truth, Label::LA);
        }
        const ContactOptions contact{options.largest_components};
        r.off_center = diagnose_centering(pred, {options.offcenter_ratio}).off_center;
        try {
            r.truth = extract_hinge_points(extract_contact_line(truth, contact), truth.spacing());
        } catch (const Error& e) {
            throw Error(e.code(), std::string("truth: ") + e.what());
        }
        try {
            r.predicted = extract_hinge_points(extract_contact_line(pred, contact), pred.spacing());
        } catch (const Error& e) {
            throw Error(e.code(), std::string("prediction: ") + e.what());
        }
        const auto errors = compute_errors(*r.predicted, *r.truth, *r.subgroup, record.case_id);
        r.errors.assign(errors.begin(), errors.end());
    } catch (const Error& e) {
        r.failure = e.what();
        r.errors.clear();
    }
    return r;
}

std::vector<CaseResult> evaluate_all(const std::vector<CaseRecord>& records, const EvaluateOptions& options) {
    std::vector<CaseResult> results(records.size());
    unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, records.size()));

    // Results land in manifest order regardless of scheduling.
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < records.size(); i = next++) results[i] = evaluate_case(records[i], options);
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    return results;
}

std::optional<double> calibrated_diameter(const CaseResult& r, const CalibrationTable& table) {
    if (!r.predicted || !r.subgroup) return std::nullopt;
    const auto b = [&](PointKind p, Axis a) { return table.bias(CellKey{*r.subgroup, p, a}).value_or(0.0); };
    const double ax = r.predicted->amvl_mm.x - b(PointKind::AMVL, Axis::X);
    const double ay = r.predicted->amvl_mm.y - b(PointKind::AMVL, Axis::Y);
    const double px = r.predicted->pmvl_mm.x - b(PointKind::PMVL, Axis::X);
    const double py = r.predicted->pmvl_mm.y - b(PointKind::PMVL, Axis::Y);
    return std::hypot(px - ax, py - ay);
}

std::string cases_csv(const std::vector<CaseResult>& results, const std::optional<CalibrationTable>& applied,
                      bool with_dice) {
    std::ostringstream out;
    out << "case_id,subgroup,amvl_x_err_mm,amvl_y_err_mm,pmvl_x_err_mm,pmvl_y_err_mm,predicted_diameter_mm,"
           "truth_diameter_mm,calibrated_diameter_mm,off_center";
    if (with_dice) out << ",dice_lv,dice_la";
    out << ",errors\n";
    const auto opt = [](const std::optional<double>& v, int decimals) { return v ? fixed(*v, decimals) : std::string(); };
    for (const auto& r : results) {
        out << csv_escape(r.record.case_id) << ',' << (r.subgroup ? to_string(*r.subgroup) : std::string()) << ',';
        for (std::size_t k = 0; k < 4; ++k) {
            out << (r.errors.size() == 4 ? fixed(r.errors[k].error_mm, 2) : std::string()) << ',';
        }
        const bool ok = r.failure.empty();
        out << (ok ? fixed(r.predicted->diameter_mm, 2) : "") << ',' << (ok ? fixed(r.truth->diameter_mm, 2) : "") << ','
            << (ok && applied ? opt(calibrated_diameter(r, *applied), 2) : "") << ','
            << (ok ? (r.off_center ? "true" : "false") : "");
        if (with_dice) out << ',' << opt(r.dice_lv, 4) << ',' << opt(r.dice_la, 4);
        out << ',' << csv_escape(r.failure) << '\n';
    }
    return out.str();
}

std::string diameters_csv(const std::vector<CaseResult>& results, const std::optional<CalibrationTable>& applied) {
    std::ostringstream out;
    out << "subgroup,n,median_predicted_mm,median_truth_mm,median_calibrated_mm,median_relative_error_pct\n";
    for (const Subgroup& s : kAllSubgroups) {
        std::vector<double> pred, truth, cal;
        for (const auto& r : results) {
            if (!r.failure.empty() || r.subgroup != s) continue;
            pred.push_back(r.predicted->diameter_mm);
            truth.push_back(r.truth->diameter_mm);
            if (applied) cal.push_back(*calibrated_diameter(r, *applied));
        }
        if (pred.empty()) continue;
        const double mp = median(pred);
        const double mt = median(truth);
        out << to_string(s) << ',' << pred.size() << ',' << fixed(mp, 2) << ',' << fixed(mt, 2) << ','
            << (cal.empty() ? std::string() : fixed(median(cal), 2)) << ','
            << (mt > 0.0 ? fixed(100.0 * (mp - mt) / mt, 2) : std::string()) << '\n';
    }
    return out.str();
}

std::string dice_csv(const std::vector<CaseResult>& results) {
    std::ostringstream out;
    out << "group,label,n,mean_dice\n";
    for (const char* group : {"ED", "ES", "all"}) {
        for (Label label : {Label::LV, Label::LA}) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : results) {
                const auto& d = label == Label::LV ? r.dice_lv : r.dice_la;
                if (!d || !r.subgroup) continue;
                const std::string_view g(group);
                if (g != "all" && (g == "ED") != (r.subgroup->phase == Phase::ED)) continue;
                sum += *d;
                ++n;
            }
            if (n == 0) continue;
            out << group << ',' << to_string(label) << ',' << n << ',' << fixed(sum / static_cast<double>(n), 4) << '\n';
        }
    }
    return out.str();
}

void report_normality(const SummaryReport& summary, std::string_view stage, std::ostream& err) {
    std::size_t tested = 0;
    std::size_t rejected = 0;
    for (const auto& row : summary.rows) {
        if (row.subgroup == "all" || !row.shapiro_p) continue;
        ++tested;
        rejected += *row.shapiro_p < kNormalityAlpha;
    }
    err << "shapiro-wilk (" << stage << "): " << rejected << " of " << tested
        << " cell series reject normality at p < " << kNormalityAlpha << '\n';
}

} // namespace

int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (options.fit_on_self && options.calibration_in) {
            throw Error(ErrorCode::InvalidArgument, "--fit-on-self and --calibration-in are mutually exclusive");
        }
        const auto records = read_manifest(options.manifest);
        if (records.empty()) {
            err << "error: no cases in " << options.manifest.string() << '\n';
            return kExitInputError;
        }
        std::optional<CalibrationTable> table_in;
        if (options.calibration_in) table_in = calibration_from_json(read_json(*options.calibration_in));

        const auto results = evaluate_all(records, options);

        std::vector<ErrorSample> samples;
        std::size_t failed = 0;
        for (const auto& r : results) {
            if (!r.failure.empty()) {
                ++failed;
                err << "case " << r.record.case_id << " failed: " << r.failure << '\n';
            }
            samples.insert(samples.end(), r.errors.begin(), r.errors.end());
        }
        if (options.out_dir) ensure_dir(*options.out_dir);

        std::optional<CalibrationTable> applied = table_in;
        std::optional<CalibrationTable> fitted;
        if (!samples.empty() && (options.fit_on_self || options.calibration_out)) fitted = fit_calibration(samples);
        if (options.fit_on_self) applied = fitted;

        if (options.out_dir) {
            write_text(*options.out_dir / "cases.csv", cases_csv(results, applied, options.dice));
        }
        if (samples.empty()) {
            err << "error: all " << results.size() << " cases failed\n";
            return kExitEmptyResult;
        }
        if (options.calibration_out) write_text(*options.calibration_out, calibration_to_json(*fitted).dump(2) + "\n");

        const auto raw_summary = summarize(samples);
        report_normality(raw_summary, "uncalibrated", err);
        std::optional<SummaryReport> cal_summary;
        if (applied) {
            cal_summary = summarize(apply_calibration(samples, *applied));
            const auto mx = applied->mean_bias(Axis::X);
            const auto my = applied->mean_bias(Axis::Y);
            err << "mean of cell biases: x = " << (mx ? fixed(*mx, 2) : "n/a") << " mm, y = " << (my ? fixed(*my, 2) : "n/a")
                << " mm\n";
        }

        if (options.out_dir) {
            write_text(*options.out_dir / "summary_uncalibrated.csv", summary_to_csv(raw_summary));
            if (cal_summary) write_text(*options.out_dir / "summary_calibrated.csv", summary_to_csv(*cal_summary));
            write_text(*options.out_dir / "diameters.csv", diameters_csv(results, applied));
            if (options.dice) write_text(*options.out_dir / "dice.csv", dice_csv(results));
        }
        out << summary_to_csv(cal_summary ? *cal_summary : raw_summary);
        err << results.size() - failed << " of " << results.size() << " cases evaluated\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

namespace {

json hinge_or_null(const Phantom& p) {
    if (!p.hinges) {
        json reasons = json::array();
        for (auto r : p.centering.reasons) reasons.push_back(std::string(to_string(r)));
        return json{{"no_contact", true}, {"off_center", p.centering.off_center}, {"centering_reasons", reasons}};
    }
    return hinge_to_json(*p.hinges, p.centering);
}

ErrorModel error_model_from_json(const json& doc) {
    ErrorModel model;
    if (doc.is_null()) return model;
    if (!doc.is_array()) throw Error(ErrorCode::BadValue, "error_model must be an array");
    for (const auto& e : doc) {
        if (!e.is_object()) throw Error(ErrorCode::BadValue, "error_model entry must be an object");
        const auto s = parse_subgroup(e.value("subgroup", ""));
        const auto p = parse_point(e.value("point", ""));
        const auto a = parse_axis(e.value("axis", ""));
        if (!s || !p || !a) throw Error(ErrorCode::BadValue, "error_model entry " + e.dump());
        const double bias = e.value("bias_mm", 0.0);
        const double spread = e.value("spread_mm", 0.0);
        if (!std::isfinite(bias) || !(spread >= 0.0)) throw Error(ErrorCode::BadValue, "error_model entry " + e.dump());
        model[CellKey{*s, *p, *a}] = CellPerturbation{bias, spread};
    }
    return model;
}

} // namespace

int run_phantom(const PhantomOptions& options, std::ostream& out, std::ostream& err) {
    try {
        json doc = options.spec ? read_json(*options.spec) : json::object();
        if (!doc.is_object()) throw Error(ErrorCode::BadValue, "phantom document must be a JSON object");
        const bool wrapped = doc.contains("spec") || doc.contains("cohort");
        const PhantomSpec spec = phantom_spec_from_json(wrapped ? doc.value("spec", json::object()) : doc);
        ensure_dir(options.out_dir);

        if (!wrapped || !doc.contains("cohort")) {
            const Phantom phantom = generate_phantom(spec);
            save_mhd(options.out_dir / "phantom.mhd", phantom.map);
            write_text(options.out_dir / "truth.json", hinge_or_null(phantom).dump(2) + "\n");
            out << "wrote " << (options.out_dir / "phantom.mhd").string() << '\n';
            return kExitOk;
        }

        const json& cohort = doc["cohort"];
        if (!cohort.is_object()) throw Error(ErrorCode::BadValue, "cohort must be an object");
        const int n = cohort.value("n", 0);
        const std::uint64_t seed = options.seed.value_or(cohort.value("seed", std::uint64_t{0}));
        const ErrorModel model = error_model_from_json(cohort.value("error_model", json()));
        const auto cases = generate_cohort(spec, n, model, seed);

        std::ostringstream manifest;
        manifest << "case_id,subgroup,prediction,truth\n";
        json truth = json::array();
        for (const auto& c : cases) {
            const std::string gt_name = c.case_id + "_gt.mhd";
            const std::string pred_name = c.case_id + "_pred.mhd";
            save_mhd(options.out_dir / gt_name, c.truth.map);
            save_mhd(options.out_dir / pred_name, c.prediction.map);
            manifest << c.case_id << ',' << to_string(c.subgroup) << ',' << pred_name << ',' << gt_name << '\n';
            truth.push_back({{"case_id", c.case_id},
                             {"subgroup", to_string(c.subgroup)},
                             {"truth", hinge_or_null(c.truth)},
                             {"prediction", hinge_or_null(c.prediction)}});
        }
        write_text(options.out_dir / "manifest.csv", manifest.str());
        write_text(options.out_dir / "truth.json", truth.dump(2) + "\n");
        out << "wrote " << cases.size() << " cases to " << options.out_dir.string() << '\n';
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace mvhinge::cli
