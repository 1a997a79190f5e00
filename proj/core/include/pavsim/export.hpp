#pragma once

#include "pavsim/engine.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

/// Chooses which series reach a plot or a CSV. Plots and exports built from
/// the same filter contain the same series.
struct SeriesFilter {
    bool stimuli = true;
    bool configural = true;
    bool compounds = true;
    bool trial_types = true;
    /// Restrict to these series names when non-empty.
    std::set<std::string> only;
    std::set<std::string> hidden;
    /// Restrict to these group names when non-empty.
    std::set<std::string> groups;
    /// 1-based phase number; every phase when unset.
    std::optional<std::size_t> phase;

    [[nodiscard]] bool accepts_group(std::string_view group) const;
    [[nodiscard]] bool accepts_phase(std::size_t phase_number) const;
    [[nodiscard]] bool accepts(const Series& series) const;
};

inline constexpr std::string_view kCsvHeader = "group,phase,series,index,V,V_E,V_I,alpha,alpha_mack,alpha_hall";

/// One row per series point: group, 1-based phase, series name, 1-based
/// index, then the six quantities. Quantities the model does not track are
/// empty cells. LF line endings; numbers in shortest round-trip form.
[[nodiscard]] std::string export_csv(const SimulationResult& result, const SeriesFilter& filter = {});

struct CsvRow {
    std::string group;
    std::size_t phase = 0;
    std::string series;
    std::size_t index = 0;
    std::optional<double> V;
    std::optional<double> V_E;
    std::optional<double> V_I;
    std::optional<double> alpha;
    std::optional<double> alpha_mack;
    std::optional<double> alpha_hall;

    friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

/// Reads text produced by export_csv. Throws ParseError on malformed input.
[[nodiscard]] std::vector<CsvRow> parse_csv_export(std::string_view text);

/// RFC 4180 quoting when the field holds a comma, quote, CR or LF.
[[nodiscard]] std::string csv_field(std::string_view text);

}  // namespace pavsim
