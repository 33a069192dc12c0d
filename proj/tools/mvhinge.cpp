// mvhinge: mitral valve hinge-point extraction and evaluation.
//
//   mvhinge extract  MASK.mhd
//   mvhinge dice     PRED.mhd TRUTH.mhd --label lv
//   mvhinge evaluate MANIFEST.csv [--fit-on-self | --calibration-in F] [--calibration-out F] [--dice] [--out DIR]
//   mvhinge phantom  [SPEC.json] --out DIR [--seed N]

#include "mvhinge/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

namespace {

const std::map<std::string, mvhinge::cli::MaskEncoding> kEncodings = {
    {"camus", mvhinge::cli::MaskEncoding::Camus},
    {"compact", mvhinge::cli::MaskEncoding::Compact},
};

} // namespace

int main(int argc, char** argv) {
    using namespace mvhinge::cli;

    CLI::App app{"Mitral valve hinge points from LV/LA segmentation masks"};
    app.require_subcommand(1);

    ExtractOptions extract;
    auto* extract_cmd = app.add_subcommand("extract", "Hinge points, annulus diameter and centering of one mask");
    extract_cmd->add_option("mask", extract.mask, "MetaImage header (.mhd)")->required();
    extract_cmd->add_option("--labels", extract.encoding, "Mask byte encoding")
        ->transform(CLI::CheckedTransformer(kEncodings, CLI::ignore_case));
    extract_cmd->add_flag("--largest-components", extract.largest_components,
                          "Keep only the largest LV and LA components");
    extract_cmd->add_option("--offcenter-ratio", extract.offcenter_ratio, "Minimum LA/LV area ratio")
        ->check(CLI::NonNegativeNumber);

    DiceOptions dice;
    std::string label = "lv";
    auto* dice_cmd = app.add_subcommand("dice", "Dice coefficient of one chamber");
    dice_cmd->add_option("prediction", dice.prediction, "Predicted mask (.mhd)")->required();
    dice_cmd->add_option("truth", dice.truth, "Reference mask (.mhd)")->required();
    dice_cmd->add_option("--label", label, "Chamber")->check(CLI::IsMember({"lv", "la"}, CLI::ignore_case));
    dice_cmd->add_option("--prediction-labels", dice.prediction_encoding, "Prediction byte encoding")
        ->transform(CLI::CheckedTransformer(kEncodings, CLI::ignore_case));
    dice_cmd->add_option("--truth-labels", dice.truth_encoding, "Reference byte encoding")
        ->transform(CLI::CheckedTransformer(kEncodings, CLI::ignore_case));

    EvaluateOptions evaluate;
    std::string calibration_in;
    std::string calibration_out;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("evaluate", "Cohort error statistics from a case manifest");
    eval_cmd->add_option("manifest", evaluate.manifest, "CSV with case_id,subgroup,prediction,truth")->required();
    auto* cal_in = eval_cmd->add_option("--calibration-in", calibration_in, "Apply this calibration table");
    auto* fit_self = eval_cmd->add_flag("--fit-on-self", evaluate.fit_on_self,
                                        "Fit the calibration on this cohort and apply it to the same cohort");
    cal_in->excludes(fit_self);
    eval_cmd->add_option("--calibration-out", calibration_out, "Write the calibration fitted on this cohort");
    eval_cmd->add_flag("--dice", evaluate.dice, "Add per-case Dice columns");
    eval_cmd->add_flag("--largest-components", evaluate.largest_components,
                       "Keep only the largest LV and LA components");
    eval_cmd->add_option("--offcenter-ratio", evaluate.offcenter_ratio, "Minimum LA/LV area ratio")
        ->check(CLI::NonNegativeNumber);
    eval_cmd->add_option("--out", eval_out, "Directory for the detailed CSV reports");
    eval_cmd->add_option("--prediction-labels", evaluate.prediction_encoding, "Prediction byte encoding")
        ->transform(CLI::CheckedTransformer(kEncodings, CLI::ignore_case));
    eval_cmd->add_option("--truth-labels", evaluate.truth_encoding, "Reference byte encoding")
        ->transform(CLI::CheckedTransformer(kEncodings, CLI::ignore_case));
    eval_cmd->add_option("--jobs", evaluate.jobs, "Worker threads (0 = all cores)");

    PhantomOptions phantom;
    std::string phantom_spec;
    std::uint64_t seed = 0;
    auto* phantom_cmd = app.add_subcommand("phantom", "Write synthetic masks with known hinge points");
    phantom_cmd->add_option("spec", phantom_spec, "Phantom JSON (defaults to the built-in spec)");
    phantom_cmd->add_option("--out", phantom.out_dir, "Output directory")->required();
    auto* seed_opt = phantom_cmd->add_option("--seed", seed, "Override the cohort seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    if (*extract_cmd) return run_extract(extract, std::cout, std::cerr);
    if (*dice_cmd) {
        dice.label = (label == "la" || label == "LA") ? mvhinge::Label::LA : mvhinge::Label::LV;
        return run_dice(dice, std::cout, std::cerr);
    }
    if (*eval_cmd) {
        if (!calibration_in.empty()) evaluate.calibration_in = calibration_in;
        if (!calibration_out.empty()) evaluate.calibration_out = calibration_out;
        if (!eval_out.empty()) evaluate.out_dir = eval_out;
        return run_evaluate(evaluate, std::cout, std::cerr);
    }
    if (*phantom_cmd) {
        if (!phantom_spec.empty()) phantom.spec = phantom_spec;
        if (*seed_opt) phantom.seed = seed;
        return run_phantom(phantom, std::cout, std::cerr);
    }
    return kExitInputError;
}
