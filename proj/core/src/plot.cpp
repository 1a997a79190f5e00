#include "pavsim/plot.hpp"

#include "pavsim/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace pavsim {

namespace {

constexpr std::array<Color, 10> kPalette = {{
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}, {148, 103, 189},
    {140, 86, 75}, {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
}};

constexpr std::array<Marker, 6> kMarkers = {
    Marker::Circle, Marker::Square, Marker::TriangleUp, Marker::Diamond, Marker::TriangleDown, Marker::Cross,
};

constexpr Color kBlack{0, 0, 0};
constexpr Color kGrid{225, 225, 225};
constexpr Color kFrame{90, 90, 90};

struct RawLine {
    std::string label;
    std::vector<double> values;
};

bool many_groups(const SimulationResult& result, const SeriesFilter& filter) {
    std::size_t n = 0;
    for (const auto& g : result.groups) n += filter.accepts_group(g.name) ? 1 : 0;
    return n > 1;
}

std::vector<RawLine> raw_lines(const SimulationResult& result, std::size_t phase, const PlotOptions& options) {
    std::vector<RawLine> out;
    if (!options.filter.accepts_phase(phase + 1)) return out;
    const bool prefix = many_groups(result, options.filter);
    for (const auto& group : result.groups) {
        if (!options.filter.accepts_group(group.name) || phase >= group.phases.size()) continue;
        for (const auto& series : group.phases[phase].series) {
            if (!options.filter.accepts(series)) continue;
            const std::string label = prefix ? group.name + ": " + series.name : series.name;
            auto take = [&](FieldMask field, double Snapshot::*member, const std::string& name) {
                if (!(series.fields & field)) return;
                RawLine line{name, {}};
                line.values.reserve(series.points.size());
                for (const auto& p : series.points) line.values.push_back(p.*member);
                out.push_back(std::move(line));
            };
            switch (options.quantity) {
                case PlotQuantity::V: take(FieldV, &Snapshot::V, label); break;
                case PlotQuantity::Alpha: take(FieldAlpha, &Snapshot::alpha, label); break;
                case PlotQuantity::AlphaMackHall:
                    take(FieldAlphaMack, &Snapshot::alpha_mack, label + " alpha_mack");
                    take(FieldAlphaHall, &Snapshot::alpha_hall, label + " alpha_hall");
                    break;
                case PlotQuantity::AllAlphas:
                    take(FieldAlpha, &Snapshot::alpha, label + " alpha");
                    take(FieldAlphaMack, &Snapshot::alpha_mack, label + " alpha_mack");
                    take(FieldAlphaHall, &Snapshot::alpha_hall, label + " alpha_hall");
                    break;
            }
        }
    }
    return out;
}

// Style index of every label drawn in any phase, so a series keeps its colour
// from one phase image to the next.
std::map<std::string, std::size_t> style_index(const SimulationResult& result, const PlotOptions& options) {
    std::map<std::string, std::size_t> styles;
    for (std::size_t p = 0; p < phase_count(result); ++p) {
        for (auto& line : raw_lines(result, p, options)) styles.emplace(std::move(line.label), 0);
    }
    std::size_t i = 0;
    for (auto& [label, index] : styles) index = i++;
    return styles;
}

PlotLine styled(RawLine raw, std::size_t index) {
    return {std::move(raw.label), std::move(raw.values), kPalette[index % kPalette.size()],
            kMarkers[(index / kPalette.size()) % kMarkers.size()]};
}

std::vector<PlotLine> all_legend_entries(const SimulationResult& result, const PlotOptions& options) {
    std::vector<PlotLine> out;
    for (const auto& [label, index] : style_index(result, options)) out.push_back(styled({label, {}}, index));
    return out;
}

std::pair<int, int> image_size(const PlotOptions& options) {
    const double w = options.width_inches * options.dpi;
    if (!std::isfinite(w) || !(options.width_inches > 0.0) || !(options.dpi > 0.0) || w < 64.0 || w > 20000.0) {
        throw std::invalid_argument("invalid plot dimensions: output width " + format_number(options.width_inches) +
                                    " in at " + format_number(options.dpi) + " dpi");
    }
    const int width = static_cast<int>(std::lround(w));
    return {width, static_cast<int>(std::lround(0.75 * width))};
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    const double rounded = std::round(v / step) * step;
    return format_number(std::abs(rounded) < step * 1e-9 ? 0.0 : std::round(rounded * 1e6) / 1e6);
}

struct LegendLayout {
    double row_height;
    double swatch;
    double column_width;
    int columns;
    int rows;
};

LegendLayout legend_layout(const Canvas& canvas, const std::vector<PlotLine>& lines, double scale, double max_width,
                           double max_height) {
    LegendLayout l{};
    l.row_height = 18.0 * scale;
    l.swatch = 22.0 * scale;
    double widest = 0.0;
    for (const auto& line : lines) widest = std::max(widest, canvas.text_width(line.label, 12.0 * scale));
    l.column_width = l.swatch + 10.0 * scale + widest + 12.0 * scale;
    const int fit_rows = std::max(1, static_cast<int>((max_height - 10.0 * scale) / l.row_height));
    l.columns = std::max(1, static_cast<int>((lines.size() + fit_rows - 1) / fit_rows));
    l.columns = std::min(l.columns, std::max(1, static_cast<int>(max_width / l.column_width)));
    l.rows = static_cast<int>((lines.size() + l.columns - 1) / l.columns);
    return l;
}

void draw_legend(Canvas& canvas, const std::vector<PlotLine>& lines, Point origin, const LegendLayout& l,
                 double scale) {
    const double w = l.columns * l.column_width + 8.0 * scale;
    const double h = l.rows * l.row_height + 8.0 * scale;
    canvas.fill_rect(origin, {origin.x + w, origin.y + h}, {255, 255, 255});
    canvas.stroke_rect(origin, {origin.x + w, origin.y + h}, kFrame, 1.0);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int col = static_cast<int>(i) / l.rows;
        const int row = static_cast<int>(i) % l.rows;
        const double x = origin.x + 6.0 * scale + col * l.column_width;
        const double y = origin.y + 4.0 * scale + (row + 0.5) * l.row_height;
        canvas.polyline({{x, y}, {x + l.swatch, y}}, lines[i].color, 2.0 * scale);
        canvas.marker({x + l.swatch / 2.0, y}, lines[i].marker, lines[i].color, 7.0 * scale);
        canvas.text({x + l.swatch + 6.0 * scale, y + 4.0 * scale}, lines[i].label, 12.0 * scale, kBlack,
                    Anchor::Start);
    }
}

}  // namespace

std::size_t phase_count(const SimulationResult& result) noexcept {
    std::size_t n = 0;
    for (const auto& g : result.groups) n = std::max(n, g.phases.size());
    return n;
}

std::vector<PlotLine> phase_lines(const SimulationResult& result, std::size_t phase, const PlotOptions& options) {
    const auto styles = style_index(result, options);
    std::vector<PlotLine> out;
    for (auto& raw : raw_lines(result, phase, options)) {
        const std::size_t index = styles.at(raw.label);
        out.push_back(styled(std::move(raw), index));
    }
    std::sort(out.begin(), out.end(), [](const PlotLine& a, const PlotLine& b) { return a.label < b.label; });
    return out;
}

std::string render_phase_plot(const SimulationResult& result, std::size_t phase, const PlotOptions& options) {
    const auto [width, height] = image_size(options);
    auto canvas = make_canvas(options.format, width, height);
    const double scale = width / 800.0;
    const auto lines = phase_lines(result, phase, options);

    canvas->fill_rect({0, 0}, {static_cast<double>(width), static_cast<double>(height)}, {255, 255, 255});
    const double left = 70.0 * scale;
    const double right = width - 20.0 * scale;
    const double top = (options.show_title ? 45.0 : 20.0) * scale;
    const double bottom = height - 50.0 * scale;

    std::size_t trials = 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& line : lines) {
        trials = std::max(trials, line.values.size());
        for (double v : line.values) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    lo = std::min(lo, 0.0);
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    lo -= lo < 0.0 ? pad : 0.0;
    hi += pad;

    const double x_lo = 1.0;
    const double x_hi = std::max(2.0, static_cast<double>(trials));
    auto to_px = [&](double x, double y) {
        return Point{left + (x - x_lo) / (x_hi - x_lo) * (right - left), bottom - (y - lo) / (hi - lo) * (bottom - top)};
    };

    const double y_step = nice_step(hi - lo, 6);
    for (double y = std::ceil(lo / y_step) * y_step; y <= hi + 1e-12; y += y_step) {
        const Point a = to_px(x_lo, y);
        canvas->polyline({a, {right, a.y}}, kGrid, 1.0);
        canvas->text({left - 6.0 * scale, a.y + 4.0 * scale}, tick_label(y, y_step), 11.0 * scale, kBlack,
                     Anchor::End);
    }
    const double x_step = std::max(1.0, nice_step(x_hi - x_lo, 8));
    for (double x = x_lo; x <= x_hi + 1e-9; x += x_step) {
        const Point a = to_px(x, lo);
        canvas->polyline({a, {a.x, a.y + 5.0 * scale}}, kFrame, 1.0);
        canvas->text({a.x, a.y + 18.0 * scale}, format_number(std::round(x)), 11.0 * scale, kBlack, Anchor::Middle);
    }
    canvas->stroke_rect({left, top}, {right, bottom}, kFrame, 1.0);
    canvas->text({(left + right) / 2.0, height - 12.0 * scale}, "Trial", 13.0 * scale, kBlack, Anchor::Middle);
    const char* y_label = options.quantity == PlotQuantity::V ? "V" : "alpha";
    canvas->text({14.0 * scale, (top + bottom) / 2.0}, y_label, 13.0 * scale, kBlack, Anchor::Start);
    if (options.show_title) {
        canvas->text({width / 2.0, 28.0 * scale}, "Phase " + std::to_string(phase + 1), 16.0 * scale, kBlack,
                     Anchor::Middle);
    }

    for (const auto& line : lines) {
        std::vector<Point> pts;
        pts.reserve(line.values.size());
        for (std::size_t i = 0; i < line.values.size(); ++i) pts.push_back(to_px(static_cast<double>(i + 1), line.values[i]));
        canvas->polyline(pts, line.color, 1.8 * scale);
        if (line.values.size() <= 60) {
            for (const auto& p : pts) canvas->marker(p, line.marker, line.color, 6.0 * scale);
        }
    }

    if (!options.separate_legend && !lines.empty()) {
        const auto l = legend_layout(*canvas, lines, scale, right - left - 20.0 * scale, bottom - top - 20.0 * scale);
        const double w = l.columns * l.column_width + 8.0 * scale;
        draw_legend(*canvas, lines, {right - w - 10.0 * scale, top + 10.0 * scale}, l, scale);
    }
    return canvas->encode();
}

std::string render_legend(const SimulationResult& result, const PlotOptions& options) {
    const auto [width, unused] = image_size(options);
    (void)unused;
    const double scale = width / 800.0;
    const auto lines = all_legend_entries(result, options);
    // Measure with a throwaway canvas of the same backend.
    const auto probe = make_canvas(options.format, width, 1);
    const auto l = legend_layout(*probe, lines, scale, width - 20.0 * scale, 1e9);
    const int cols = std::max(1, static_cast<int>((width - 20.0 * scale) / l.column_width));
    LegendLayout grid = l;
    grid.columns = std::min<int>(cols, std::max<std::size_t>(1, lines.size()));
    grid.rows = std::max(1, static_cast<int>((lines.size() + grid.columns - 1) / grid.columns));
    const int height = static_cast<int>(std::ceil(grid.rows * grid.row_height + 28.0 * scale));
    auto canvas = make_canvas(options.format, width, height);
    canvas->fill_rect({0, 0}, {static_cast<double>(width), static_cast<double>(height)}, {255, 255, 255});
    if (!lines.empty()) draw_legend(*canvas, lines, {10.0 * scale, 10.0 * scale}, grid, scale);
    return canvas->encode();
}

std::vector<std::filesystem::path> save_phase_plots(const SimulationResult& result, const std::filesystem::path& base,
                                                    const PlotOptions& options) {
    (void)image_size(options);
    std::vector<std::filesystem::path> written;
    auto write = [&written](const std::filesystem::path& path, const std::string& bytes) {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            throw std::filesystem::filesystem_error("cannot write image", path,
                                                    std::make_error_code(std::errc::io_error));
        }
        written.push_back(path);
    };
    const std::string ext(image_extension(options.format));
    const std::string stem = base.string();
    for (std::size_t p = 0; p < phase_count(result); ++p) {
        if (!options.filter.accepts_phase(p + 1)) continue;
        write(stem + "_" + std::to_string(p + 1) + ext, render_phase_plot(result, p, options));
    }
    if (options.separate_legend) {
        write(stem + "_legend" + ext, render_legend(result, options));
    }
    return written;
}

}  // namespace pavsim
