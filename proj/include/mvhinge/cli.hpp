#pragma once

#include "mvhinge/labelmap.hpp"
#include "mvhinge/mhd_io.hpp"
#include "mvhinge/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mvhinge::cli {

/// Process exit codes: stable contract of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitEmptyResult = 3,
};

/// Byte encoding of a mask file on disk.
enum class MaskEncoding { Camus, Compact };

LabelMapping mapping_for(MaskEncoding encoding);
std::optional<MaskEncoding> parse_encoding(std::string_view text);

struct CaseRecord {
    std::string case_id;
    std::string subgroup_text; // as written in the manifest, possibly empty
    std::filesystem::path prediction;
    std::optional<std::filesystem::path> truth;
};

/// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

/// Reads a `case_id,subgroup,prediction,truth` manifest. Relative paths are
/// resolved against the manifest's directory. Throws BadValue/Io.
std::vector<CaseRecord> read_manifest(const std::filesystem::path& manifest);

/// Parses "a4c-ED" style names or finds `_4CH_ES` / `_2CH_ED` markers
/// (CAMUS naming) inside file or case names.
std::optional<Subgroup> infer_subgroup(std::string_view text);

struct ExtractOptions {
    std::filesystem::path mask;
    MaskEncoding encoding = MaskEncoding::Camus;
    bool largest_components = false;
    double offcenter_ratio = 0.15;
};

/// Prints the hinge JSON for one mask.
int run_extract(const ExtractOptions& options, std::ostream& out, std::ostream& err);

struct DiceOptions {
    std::filesystem::path prediction;
    std::filesystem::path truth;
    Label label = Label::LV;
    MaskEncoding prediction_encoding = MaskEncoding::Camus;
    MaskEncoding truth_encoding = MaskEncoding::Camus;
};

int run_dice(const DiceOptions& options, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
    std::filesystem::path manifest;
    std::optional<std::filesystem::path> calibration_in;
    std::optional<std::filesystem::path> calibration_out;
    bool fit_on_self = false;
    bool dice = false;
    bool largest_components = false;
    double offcenter_ratio = 0.15;
    std::optional<std::filesystem::path> out_dir;
    MaskEncoding prediction_encoding = MaskEncoding::Camus;
    MaskEncoding truth_encoding = MaskEncoding::Camus;
    unsigned jobs = 0; // 0 = hardware concurrency
};

/// Writes the summary CSV to `out`. With an output directory it also writes
/// summary_uncalibrated.csv, summary_calibrated.csv (when calibration is
/// applied), cases.csv, diameters.csv and, with --dice, dice.csv.
int run_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);

struct PhantomOptions {
    std::optional<std::filesystem::path> spec;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
};

/// Single phantom: phantom.mhd/.raw and truth.json. With a "cohort" block:
/// <case>_gt / <case>_pred mask pairs, manifest.csv and truth.json.
int run_phantom(const PhantomOptions& options, std::ostream& out, std::ostream& err);

} // namespace mvhinge::cli
