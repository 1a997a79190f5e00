#pragma once

#include "pavsim/canvas.hpp"
#include "pavsim/engine.hpp"
#include "pavsim/export.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pavsim {

enum class PlotQuantity {
    V,
    /// The model's learning rate `alpha`.
    Alpha,
    /// `alpha_mack` and `alpha_hall` as two lines per series.
    AlphaMackHall,
    /// `alpha`, `alpha_mack` and `alpha_hall`, whichever the model tracks.
    AllAlphas,
};

struct PlotOptions {
    PlotQuantity quantity = PlotQuantity::V;
    SeriesFilter filter;
    bool show_title = false;
    /// Draw the legend in its own image instead of inside each plot.
    bool separate_legend = false;
    double width_inches = 8.0;
    double dpi = 100.0;
    ImageFormat format = ImageFormat::Png;
};

/// One plotted line: `group: series` when several groups are drawn.
struct PlotLine {
    std::string label;
    std::vector<double> values;
    Color color;
    Marker marker = Marker::Circle;
};

/// Lines of one phase (0-based). Colours and markers follow label sort order.
[[nodiscard]] std::vector<PlotLine> phase_lines(const SimulationResult& result, std::size_t phase,
                                                const PlotOptions& options);

/// Image of one phase. Width is `width_inches * dpi` px, height 3/4 of that.
/// Throws std::invalid_argument for invalid dimensions.
[[nodiscard]] std::string render_phase_plot(const SimulationResult& result, std::size_t phase,
                                            const PlotOptions& options);

/// Legend covering every line drawn in any phase.
[[nodiscard]] std::string render_legend(const SimulationResult& result, const PlotOptions& options);

/// Writes base_1 .. base_n (plus base_legend when `separate_legend`) with the
/// format's extension next to `base`. Returns the written paths.
std::vector<std::filesystem::path> save_phase_plots(const SimulationResult& result, const std::filesystem::path& base,
                                                    const PlotOptions& options);

[[nodiscard]] std::size_t phase_count(const SimulationResult& result) noexcept;

}  // namespace pavsim
