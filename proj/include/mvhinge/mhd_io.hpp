#pragma once

#include "mvhinge/labelmap.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvhinge {

/// Parsed MetaImage header. Only 2D, uncompressed, 8-bit unsigned rasters
/// are accepted.
struct ImageMeta {
    int ndims = 2;
    int width = 0;
    int height = 0;
    Spacing spacing;
    std::string element_type;
    std::string data_file;
    bool byte_order_msb = false;

    /// Byte offset of the payload inside the header text when
    /// `ElementDataFile = LOCAL`; zero otherwise.
    std::size_t local_payload_offset = 0;

    /// Keys the parser does not interpret, in file order.
    std::vector<std::pair<std::string, std::string>> extra;
    std::vector<std::string> warnings;

    bool is_local() const noexcept { return data_file == "LOCAL"; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

/// Maps stored byte values onto chamber labels. Unmapped bytes are
/// rejected when reading.
class LabelMapping {
public:
    LabelMapping() = default;

    /// CAMUS ground truth: 0 background, 1 LV, 2 myocardium (folded into
    /// background), 3 LA.
    static LabelMapping camus();
    /// Three-class masks: 0 background, 1 LV, 2 LA.
    static LabelMapping compact();

    LabelMapping& assign(std::uint8_t byte, Label label) {
        table_[byte] = label;
        return *this;
    }
    std::optional<Label> lookup(std::uint8_t byte) const noexcept { return table_[byte]; }

private:
    std::array<std::optional<Label>, 256> table_{};
};

/// Byte values written for each label; the inverse of the CAMUS mapping.
std::uint8_t camus_byte(Label label) noexcept;

ImageMeta parse_mhd_header(std::string_view text);

LabelMap read_label_map(const ImageMeta& meta, std::span<const std::uint8_t> payload,
                        const LabelMapping& mapping = LabelMapping::camus());

struct MhdImage {
    std::string header;
    std::vector<std::uint8_t> payload;
};

/// Header plus raw payload in CAMUS byte encoding. `data_file` is the name
/// recorded under ElementDataFile.
MhdImage write_label_map(const LabelMap& map, std::string_view data_file = "labels.raw");

/// Reads `<name>.mhd` and the raster it references, which must live in the
/// same directory (or inline after the header for LOCAL).
LabelMap load_mhd(const std::filesystem::path& header_path,
                  const LabelMapping& mapping = LabelMapping::camus());

/// Writes `<stem>.mhd` and `<stem>.raw` next to each other.
void save_mhd(const std::filesystem::path& header_path, const LabelMap& map);

} // namespace mvhinge
