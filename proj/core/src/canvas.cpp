#include "pavsim/canvas.hpp"

#include "pavsim/design.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <stdexcept>

namespace pavsim {

std::string_view image_extension(ImageFormat format) noexcept {
    return format == ImageFormat::Svg ? ".svg" : ".png";
}

namespace {

constexpr int kMaxPixels = 20000;

std::string hex(Color c) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "#";
    for (std::uint8_t v : {c.r, c.g, c.b}) {
        out += digits[v >> 4];
        out += digits[v & 0xF];
    }
    return out;
}

std::string num(double v) { return format_number(std::round(v * 100.0) / 100.0); }

std::string escape_xml(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<Point> marker_outline(Point at, Marker shape, double size) {
    const double h = size / 2.0;
    switch (shape) {
        case Marker::Square: return {{at.x - h, at.y - h}, {at.x + h, at.y - h}, {at.x + h, at.y + h}, {at.x - h, at.y + h}};
        case Marker::TriangleUp: return {{at.x, at.y - h}, {at.x + h, at.y + h}, {at.x - h, at.y + h}};
        case Marker::TriangleDown: return {{at.x - h, at.y - h}, {at.x + h, at.y - h}, {at.x, at.y + h}};
        case Marker::Diamond: return {{at.x, at.y - h}, {at.x + h, at.y}, {at.x, at.y + h}, {at.x - h, at.y}};
        case Marker::Circle:
        case Marker::Cross: break;
    }
    return {};
}

class SvgCanvas final : public Canvas {
public:
    SvgCanvas(int w, int h) : width_(w), height_(h) {}

    int width() const noexcept override { return width_; }
    int height() const noexcept override { return height_; }

    void fill_rect(Point a, Point b, Color color) override {
        body_ += "<rect x=\"" + num(a.x) + "\" y=\"" + num(a.y) + "\" width=\"" + num(b.x - a.x) + "\" height=\"" +
                 num(b.y - a.y) + "\" fill=\"" + hex(color) + "\"/>\n";
    }

    void stroke_rect(Point a, Point b, Color color, double thickness) override {
        body_ += "<rect x=\"" + num(a.x) + "\" y=\"" + num(a.y) + "\" width=\"" + num(b.x - a.x) + "\" height=\"" +
                 num(b.y - a.y) + "\" fill=\"none\" stroke=\"" + hex(color) + "\" stroke-width=\"" + num(thickness) +
                 "\"/>\n";
    }

    void polyline(const std::vector<Point>& points, Color color, double thickness) override {
        if (points.empty()) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + hex(color) + "\" stroke-width=\"" + num(thickness) +
                 "\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i) body_ += ' ';
            body_ += num(points[i].x) + ',' + num(points[i].y);
        }
        body_ += "\"/>\n";
    }

    void marker(Point at, Marker shape, Color color, double size) override {
        if (shape == Marker::Circle) {
            body_ += "<circle cx=\"" + num(at.x) + "\" cy=\"" + num(at.y) + "\" r=\"" + num(size / 2.0) +
                     "\" fill=\"" + hex(color) + "\"/>\n";
        } else if (shape == Marker::Cross) {
            const double h = size / 2.0;
            polyline({{at.x - h, at.y - h}, {at.x + h, at.y + h}}, color, 1.5);
            polyline({{at.x - h, at.y + h}, {at.x + h, at.y - h}}, color, 1.5);
        } else {
            body_ += "<polygon fill=\"" + hex(color) + "\" points=\"";
            const auto outline = marker_outline(at, shape, size);
            for (std::size_t i = 0; i < outline.size(); ++i) {
                if (i) body_ += ' ';
                body_ += num(outline[i].x) + ',' + num(outline[i].y);
            }
            body_ += "\"/>\n";
        }
    }

    void text(Point at, std::string_view text, double size, Color color, Anchor anchor) override {
        const char* a = anchor == Anchor::Start ? "start" : anchor == Anchor::Middle ? "middle" : "end";
        body_ += "<text x=\"" + num(at.x) + "\" y=\"" + num(at.y) + "\" font-family=\"sans-serif\" font-size=\"" +
                 num(size) + "\" text-anchor=\"" + a + "\" fill=\"" + hex(color) + "\">" + escape_xml(text) +
                 "</text>\n";
    }

    double text_width(std::string_view text, double size) const override {
        return 0.56 * size * static_cast<double>(text.size());
    }

    std::string encode() const override {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) + "\" height=\"" +
               std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) + ' ' +
               std::to_string(height_) + "\">\n" + body_ + "</svg>\n";
    }

private:
    int width_;
    int height_;
    std::string body_;
};

// Hershey simplex glyphs are about 22 px tall at scale 1.
constexpr double kHersheyHeight = 22.0;

class RasterCanvas final : public Canvas {
public:
    RasterCanvas(int w, int h) : image_(h, w, CV_8UC3, cv::Scalar(255, 255, 255)) {}

    int width() const noexcept override { return image_.cols; }
    int height() const noexcept override { return image_.rows; }

    void fill_rect(Point a, Point b, Color color) override {
        cv::rectangle(image_, px(a), px(b), bgr(color), cv::FILLED);
    }

    void stroke_rect(Point a, Point b, Color color, double thickness) override {
        cv::rectangle(image_, px(a), px(b), bgr(color), thick(thickness), cv::LINE_AA);
    }

    void polyline(const std::vector<Point>& points, Color color, double thickness) override {
        if (points.size() < 2) return;
        std::vector<cv::Point> pts;
        pts.reserve(points.size());
        for (const auto& p : points) pts.push_back(px(p));
        cv::polylines(image_, pts, false, bgr(color), thick(thickness), cv::LINE_AA);
    }

    void marker(Point at, Marker shape, Color color, double size) override {
        if (shape == Marker::Circle) {
            cv::circle(image_, px(at), std::max(1, static_cast<int>(std::lround(size / 2.0))), bgr(color), cv::FILLED,
                       cv::LINE_AA);
        } else if (shape == Marker::Cross) {
            const double h = size / 2.0;
            polyline({{at.x - h, at.y - h}, {at.x + h, at.y + h}}, color, 1.5);
            polyline({{at.x - h, at.y + h}, {at.x + h, at.y - h}}, color, 1.5);
        } else {
            std::vector<cv::Point> pts;
            for (const auto& p : marker_outline(at, shape, size)) pts.push_back(px(p));
            cv::fillConvexPoly(image_, pts, bgr(color), cv::LINE_AA);
        }
    }

    void text(Point at, std::string_view text, double size, Color color, Anchor anchor) override {
        const std::string s(text);
        const double scale = size / kHersheyHeight;
        const double w = text_width(text, size);
        double x = at.x;
        if (anchor == Anchor::Middle) x -= w / 2.0;
        if (anchor == Anchor::End) x -= w;
        cv::putText(image_, s, px({x, at.y}), cv::FONT_HERSHEY_SIMPLEX, scale, bgr(color), 1, cv::LINE_AA);
    }

    double text_width(std::string_view text, double size) const override {
        int baseline = 0;
        const cv::Size sz =
            cv::getTextSize(std::string(text), cv::FONT_HERSHEY_SIMPLEX, size / kHersheyHeight, 1, &baseline);
        return sz.width;
    }

    std::string encode() const override {
        std::vector<unsigned char> bytes;
        if (!cv::imencode(".png", image_, bytes)) {
            throw std::runtime_error("PNG encoding failed");
        }
        return {bytes.begin(), bytes.end()};
    }

private:
    static cv::Point px(Point p) {
        return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
    }
    static cv::Scalar bgr(Color c) { return {static_cast<double>(c.b), static_cast<double>(c.g), static_cast<double>(c.r)}; }
    static int thick(double t) { return std::max(1, static_cast<int>(std::lround(t))); }

    cv::Mat image_;
};

}  // namespace

std::unique_ptr<Canvas> make_canvas(ImageFormat format, int width, int height) {
    if (width <= 0 || height <= 0 || width > kMaxPixels || height > kMaxPixels) {
        throw std::invalid_argument("invalid image size " + std::to_string(width) + "x" + std::to_string(height) +
                                    " (each side must be between 1 and " + std::to_string(kMaxPixels) + " px)");
    }
    if (format == ImageFormat::Svg) {
        return std::make_unique<SvgCanvas>(width, height);
    }
    return std::make_unique<RasterCanvas>(width, height);
}

}  // namespace pavsim
