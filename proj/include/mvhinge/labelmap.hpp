#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace mvhinge {

/// Chamber labels of a segmentation. Anything that is neither left
/// ventricle nor left atrium is background.
enum class Label : std::uint8_t { Background = 0, LV = 1, LA = 2 };

std::string_view to_string(Label label) noexcept;

/// Physical pixel size in millimetres, x (columns) then y (rows).
struct Spacing {
    double sx = 1.0;
    double sy = 1.0;

    bool operator==(const Spacing&) const = default;
};

/// Integer pixel position; x is the column, y the row (row 0 is the top).
/// Ordering is lexicographic on (x, y).
struct Pixel {
    int x = 0;
    int y = 0;

    auto operator<=>(const Pixel&) const = default;
};

/// 2D grid of chamber labels with physical spacing, stored row-major with
/// the top row first.
class LabelMap {
public:
    /// Background-filled map. Throws InvalidArgument on non-positive sizes
    /// or spacing.
    LabelMap(int width, int height, Spacing spacing = {});
    LabelMap(int width, int height, Spacing spacing, std::vector<Label> labels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Spacing spacing() const noexcept { return spacing_; }
    std::span<const Label> labels() const noexcept { return labels_; }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }
    Label at(int x, int y) const { return labels_[index(x, y)]; }
    void set(int x, int y, Label label) { labels_[index(x, y)] = label; }

    std::size_t count(Label label) const noexcept;
    bool same_shape(const LabelMap& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const LabelMap&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    Spacing spacing_;
    std::vector<Label> labels_;
};

enum class Connectivity { Four = 4, Eight = 8 };

struct BorderTouch {
    bool top = false;
    bool bottom = false;
    bool left = false;
    bool right = false;

    bool any() const noexcept { return top || bottom || left || right; }
    bool operator==(const BorderTouch&) const = default;
};

/// One connected region of a single label. Pixels are sorted by (y, x).
struct Component {
    Label label = Label::Background;
    std::vector<Pixel> pixels;
    BorderTouch touches_border;

    std::size_t size() const noexcept { return pixels.size(); }
};

/// 2|A∩B| / (|A|+|B|) over the pixels carrying `label`; 1.0 when both sets
/// are empty. Throws ShapeMismatch when the grids differ in size.
double dice(const LabelMap& a, const LabelMap& b, Label label);

struct DiceSummary {
    std::vector<double> values;
    double mean = 0.0;
};

/// Per-pair Dice values and their unweighted mean. The first pair in
/// `pairs` is the prediction, the second the reference.
DiceSummary dice_cohort(std::span<const std::pair<LabelMap, LabelMap>> pairs, Label label);

/// Components of `label`, largest first; equal sizes are ordered by the
/// (y, x) of each component's first pixel in raster order.
std::vector<Component> connected_components(const LabelMap& map, Label label,
                                             Connectivity connectivity = Connectivity::Four);

} // namespace mvhinge
