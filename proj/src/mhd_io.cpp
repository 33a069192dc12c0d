#include "mvhinge/mhd_io.hpp"

#include "mvhinge/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace mvhinge {

namespace {

constexpr int kMaxDimension = 1 << 16;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, const std::string& key) {
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::BadValue, key + " = '" + std::string(token) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view value, const std::string& key) {
    std::vector<T> out;
    for (auto token : split_ws(value)) out.push_back(parse_number<T>(token, key));
    return out;
}

bool parse_bool(std::string_view value, const std::string& key) {
    if (value == "True" || value == "true" || value == "TRUE" || value == "1") return true;
    if (value == "False" || value == "false" || value == "FALSE" || value == "0") return false;
    throw Error(ErrorCode::BadValue, key + " = '" + std::string(value) + "'");
}

void check_data_file(const std::string& name) {
    if (name.empty()) throw Error(ErrorCode::BadValue, "ElementDataFile is empty");
    if (name == "LOCAL") return;
    if (name == "LIST" || name.find('%') != std::string::npos) {
        throw Error(ErrorCode::BadValue, "multi-file ElementDataFile '" + name + "' is not supported");
    }
    // Same-directory references only.
    const bool absolute = name.front() == '/' || name.front() == '\\' ||
                          (name.size() > 1 && name[1] == ':');
    if (absolute || name.find('/') != std::string::npos || name.find('\\') != std::string::npos ||
        name == "." || name == "..") {
        throw Error(ErrorCode::UnsafeDataPath, name);
    }
}

} // namespace

LabelMapping LabelMapping::camus() {
    LabelMapping m;
    m.assign(0, Label::Background).assign(1, Label::LV).assign(2, Label::Background).assign(3, Label::LA);
    return m;
}

LabelMapping LabelMapping::compact() {
    LabelMapping m;
    m.assign(0, Label::Background).assign(1, Label::LV).assign(2, Label::LA);
    return m;
}

std::uint8_t camus_byte(Label label) noexcept {
    switch (label) {
    case Label::Background: return 0;
    case Label::LV: return 1;
    case Label::LA: return 3;
    }
    return 0;
}

ImageMeta parse_mhd_header(std::string_view text) {
    ImageMeta meta;
    std::map<std::string, std::string, std::less<>> seen;

    std::size_t pos = 0;
    int line_no = 0;
    bool saw_data_file = false;
    while (pos < text.size() && !saw_data_file) {
        auto eol = text.find('\n', pos);
        const std::size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
        const std::string_view line = trim(text.substr(pos, next - pos));
        pos = next;
        ++line_no;
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::BadValue, "line " + std::to_string(line_no) + " is not 'Key = Value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw Error(ErrorCode::BadValue, "line " + std::to_string(line_no) + " has no key");
        if (!seen.emplace(key, value).second) throw Error(ErrorCode::BadValue, "duplicate key " + key);

        if (key == "ElementDataFile") {
            // By convention this is the last header entry; for LOCAL the
            // raster starts right after it.
            saw_data_file = true;
            meta.local_payload_offset = value == "LOCAL" ? pos : 0;
        } else if (key != "NDims" && key != "DimSize" && key != "ElementSpacing" &&
                   key != "ElementType" && key != "BinaryDataByteOrderMSB" &&
                   key != "ElementByteOrderMSB" && key != "CompressedData") {
            meta.extra.emplace_back(key, value);
        }
    }

    const auto require = [&](const char* key) -> const std::string& {
        const auto it = seen.find(key);
        if (it == seen.end()) throw Error(ErrorCode::MissingKey, key);
        return it->second;
    };

    meta.ndims = parse_number<int>(require("NDims"), "NDims");
    if (meta.ndims != 2) throw Error(ErrorCode::UnsupportedDims, "NDims = " + std::to_string(meta.ndims));

    const auto dims = parse_list<int>(require("DimSize"), "DimSize");
    if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1 || dims[0] > kMaxDimension ||
        dims[1] > kMaxDimension) {
        throw Error(ErrorCode::BadValue, "DimSize = '" + seen.find("DimSize")->second + "'");
    }
    meta.width = dims[0];
    meta.height = dims[1];

    meta.element_type = require("ElementType");
    if (meta.element_type != "MET_UCHAR") throw Error(ErrorCode::UnsupportedElementType, meta.element_type);

    meta.data_file = require("ElementDataFile");
    check_data_file(meta.data_file);

    if (const auto it = seen.find("ElementSpacing"); it != seen.end()) {
        const auto spacing = parse_list<double>(it->second, "ElementSpacing");
        if (spacing.size() != 2 || !(spacing[0] > 0.0) || !(spacing[1] > 0.0) ||
            !std::isfinite(spacing[0]) || !std::isfinite(spacing[1])) {
            throw Error(ErrorCode::BadValue, "ElementSpacing = '" + it->second + "'");
        }
        meta.spacing = {spacing[0], spacing[1]};
    } else {
        meta.spacing = {1.0, 1.0};
        meta.warnings.emplace_back("ElementSpacing missing, assuming 1 1");
    }

    if (const auto it = seen.find("CompressedData"); it != seen.end()) {
        if (parse_bool(it->second, "CompressedData")) throw Error(ErrorCode::UnsupportedCompression, "CompressedData = True");
    }
    for (const char* key : {"BinaryDataByteOrderMSB", "ElementByteOrderMSB"}) {
        if (const auto it = seen.find(key); it != seen.end()) meta.byte_order_msb = parse_bool(it->second, key);
    }
    return meta;
}

LabelMap read_label_map(const ImageMeta& meta, std::span<const std::uint8_t> payload,
                        const LabelMapping& mapping) {
    const std::size_t expected = meta.pixel_count();
    if (payload.size() != expected) {
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(expected) + " bytes, got " + std::to_string(payload.size()));
    }
    std::vector<Label> labels;
    labels.reserve(expected);
    for (const std::uint8_t byte : payload) {
        const auto label = mapping.lookup(byte);
        if (!label) throw Error(ErrorCode::UnknownLabel, "byte value " + std::to_string(byte));
        labels.push_back(*label);
    }
    return LabelMap(meta.width, meta.height, meta.spacing, std::move(labels));
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

} // namespace

MhdImage write_label_map(const LabelMap& map, std::string_view data_file) {
    std::ostringstream h;
    h << "ObjectType = Image\n"
      << "NDims = 2\n"
      << "BinaryData = True\n"
      << "BinaryDataByteOrderMSB = False\n"
      << "CompressedData = False\n"
      << "DimSize = " << map.width() << ' ' << map.height() << '\n'
      << "ElementSpacing = " << format_double(map.spacing().sx) << ' ' << format_double(map.spacing().sy) << '\n'
      << "ElementType = MET_UCHAR\n"
      << "ElementDataFile = " << data_file << '\n';

    MhdImage image;
    image.header = h.str();
    image.payload.reserve(map.labels().size());
    for (Label l : map.labels()) image.payload.push_back(camus_byte(l));
    return image;
}

LabelMap load_mhd(const std::filesystem::path& header_path, const LabelMapping& mapping) {
    const auto bytes = read_file(header_path);
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const ImageMeta meta = parse_mhd_header(text);
    if (meta.is_local()) {
        return read_label_map(meta, std::span(bytes).subspan(meta.local_payload_offset), mapping);
    }
    const auto payload = read_file(header_path.parent_path() / meta.data_file);
    return read_label_map(meta, payload, mapping);
}

void save_mhd(const std::filesystem::path& header_path, const LabelMap& map) {
    auto raw_path = header_path;
    raw_path.replace_extension(".raw");
    const auto image = write_label_map(map, raw_path.filename().string());
    write_file(header_path, image.header.data(), image.header.size());
    write_file(raw_path, image.payload.data(), image.payload.size());
}

} // namespace mvhinge
