#include "mvhinge/labelmap.hpp"

#include "mvhinge/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvhinge {

std::string_view to_string(Label label) noexcept {
    switch (label) {
    case Label::Background: return "bg";
    case Label::LV: return "LV";
    case Label::LA: return "LA";
    }
    return "?";
}

namespace {

void validate_geometry(int width, int height, Spacing spacing) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "label map size must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    if (!(spacing.sx > 0.0) || !(spacing.sy > 0.0) || !std::isfinite(spacing.sx) ||
        !std::isfinite(spacing.sy)) {
        throw Error(ErrorCode::InvalidArgument, "pixel spacing must be finite and positive");
    }
}

} // namespace

LabelMap::LabelMap(int width, int height, Spacing spacing)
    : width_(width), height_(height), spacing_(spacing) {
    validate_geometry(width, height, spacing);
    labels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                   Label::Background);
}

LabelMap::LabelMap(int width, int height, Spacing spacing, std::vector<Label> labels)
    : width_(width), height_(height), spacing_(spacing), labels_(std::move(labels)) {
    validate_geometry(width, height, spacing);
    const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (labels_.size() != expected) {
        throw Error(ErrorCode::InvalidArgument, "label grid holds " + std::to_string(labels_.size()) +
                                                    " cells, expected " + std::to_string(expected));
    }
    for (Label l : labels_) {
        if (l != Label::Background && l != Label::LV && l != Label::LA) {
            throw Error(ErrorCode::InvalidArgument, "cell value outside {bg, LV, LA}");
        }
    }
}

std::size_t LabelMap::count(Label label) const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

double dice(const LabelMap& a, const LabelMap& b, Label label) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::ShapeMismatch,
                    std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" + std::to_string(b.height()));
    }
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::size_t both = 0;
    const auto la = a.labels();
    const auto lb = b.labels();
    for (std::size_t i = 0; i < la.size(); ++i) {
        const bool in_a = la[i] == label;
        const bool in_b = lb[i] == label;
        size_a += in_a;
        size_b += in_b;
        both += in_a && in_b;
    }
    if (size_a + size_b == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(size_a + size_b);
}

DiceSummary dice_cohort(std::span<const std::pair<LabelMap, LabelMap>> pairs, Label label) {
    if (pairs.empty()) throw Error(ErrorCode::EmptySamples, "dice cohort has no pairs");
    DiceSummary summary;
    summary.values.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        try {
            summary.values.push_back(dice(pairs[i].first, pairs[i].second, label));
        } catch (const Error& e) {
            throw Error(e.code(), "pair " + std::to_string(i) + ": " + e.what());
        }
    }
    double sum = 0.0;
    for (double v : summary.values) sum += v;
    summary.mean = sum / static_cast<double>(summary.values.size());
    return summary;
}

std::vector<Component> connected_components(const LabelMap& map, Label label,
                                             Connectivity connectivity) {
    const int w = map.width();
    const int h = map.height();
    std::vector<int> owner(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
    std::vector<Component> components;
    std::vector<Pixel> stack;

    static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int neighbours = connectivity == Connectivity::Four ? 4 : 8;
    const auto idx = [w](int x, int y) {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
    };

    // Raster-order seeding means each component's first pixel is its
    // minimum (y, x), which is what the tie-break below relies on.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (map.at(x, y) != label || owner[idx(x, y)] >= 0) continue;
            const int id = static_cast<int>(components.size());
            Component comp;
            comp.label = label;
            owner[idx(x, y)] = id;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                comp.touches_border.top |= p.y == 0;
                comp.touches_border.bottom |= p.y == h - 1;
                comp.touches_border.left |= p.x == 0;
                comp.touches_border.right |= p.x == w - 1;
                for (int k = 0; k < neighbours; ++k) {
                    const int nx = p.x + kDx[k];
                    const int ny = p.y + kDy[k];
                    if (!map.contains(nx, ny) || map.at(nx, ny) != label) continue;
                    auto& o = owner[idx(nx, ny)];
                    if (o >= 0) continue;
                    o = id;
                    stack.push_back({nx, ny});
                }
            }
            std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Pixel& a, const Pixel& b) {
                return std::pair(a.y, a.x) < std::pair(b.y, b.x);
            });
            components.push_back(std::move(comp));
        }
    }

    std::stable_sort(components.begin(), components.end(),
                     [](const Component& a, const Component& b) { return a.size() > b.size(); });
    return components;
}

} // namespace mvhinge
