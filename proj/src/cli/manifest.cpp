#include "mvhinge/cli.hpp"

#include "mvhinge/error.hpp"

#include <fstream>
#include <regex>

namespace mvhinge::cli {

LabelMapping mapping_for(MaskEncoding encoding) {
    return encoding == MaskEncoding::Camus ? LabelMapping::camus() : LabelMapping::compact();
}

std::optional<MaskEncoding> parse_encoding(std::string_view text) {
    if (text == "camus") return MaskEncoding::Camus;
    if (text == "compact") return MaskEncoding::Compact;
    return std::nullopt;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    out += '"';
    return out;
}

std::vector<CaseRecord> read_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + manifest.string());

    std::string line;
    if (!std::getline(in, line)) return {};
    const auto header = split_csv_line(line);
    const auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    };
    const auto id_col = column("case_id");
    const auto subgroup_col = column("subgroup");
    const auto pred_col = column("prediction");
    const auto truth_col = column("truth");
    if (!id_col || !pred_col) {
        throw Error(ErrorCode::BadValue, "manifest header must name case_id, subgroup, prediction, truth columns");
    }

    const auto base = manifest.parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    std::vector<CaseRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        const auto at = [&](std::optional<std::size_t> col) -> std::string {
            return col && *col < fields.size() ? fields[*col] : std::string();
        };
        CaseRecord rec;
        rec.case_id = at(id_col);
        rec.subgroup_text = at(subgroup_col);
        const auto pred = at(pred_col);
        if (rec.case_id.empty() || pred.empty()) {
            throw Error(ErrorCode::BadValue, "manifest line " + std::to_string(line_no) + " lacks case_id or prediction");
        }
        rec.prediction = resolve(pred);
        if (const auto truth = at(truth_col); !truth.empty()) rec.truth = resolve(truth);
        records.push_back(std::move(rec));
    }
    return records;
}

std::optional<Subgroup> infer_subgroup(std::string_view text) {
    if (auto s = parse_subgroup(text)) return s;
    static const std::regex camus(R"((?:^|_)(2CH|4CH)_(ED|ES)(?:_|\.|$))");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, camus)) return std::nullopt;
    return Subgroup{m[1] == "4CH" ? View::A4C : View::A2C, m[2] == "ED" ? Phase::ED : Phase::ES};
}

} // namespace mvhinge::cli
