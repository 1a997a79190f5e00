#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

struct Color {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Color&, const Color&) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class Marker { Circle, Square, TriangleUp, Diamond, TriangleDown, Cross };

enum class Anchor { Start, Middle, End };

/// Minimal drawing surface. Coordinates are pixels from the top-left corner.
class Canvas {
public:
    virtual ~Canvas() = default;

    [[nodiscard]] virtual int width() const noexcept = 0;
    [[nodiscard]] virtual int height() const noexcept = 0;

    virtual void fill_rect(Point top_left, Point bottom_right, Color color) = 0;
    virtual void stroke_rect(Point top_left, Point bottom_right, Color color, double thickness) = 0;
    virtual void polyline(const std::vector<Point>& points, Color color, double thickness) = 0;
    virtual void marker(Point at, Marker shape, Color color, double size) = 0;
    /// `at` is the text baseline. ASCII text only.
    virtual void text(Point at, std::string_view text, double size, Color color, Anchor anchor) = 0;
    /// Approximate advance width of `text` at `size`, used for layout.
    [[nodiscard]] virtual double text_width(std::string_view text, double size) const = 0;

    /// Encoded file contents (PNG bytes or SVG text).
    [[nodiscard]] virtual std::string encode() const = 0;
};

enum class ImageFormat { Png, Svg };

[[nodiscard]] std::string_view image_extension(ImageFormat format) noexcept;

/// Throws std::invalid_argument for non-positive or oversized dimensions.
[[nodiscard]] std::unique_ptr<Canvas> make_canvas(ImageFormat format, int width, int height);

}  // namespace pavsim
