#include "pavsim/export.hpp"

#include "pavsim/design.hpp"

#include <charconv>

namespace pavsim {

bool SeriesFilter::accepts_group(std::string_view group) const {
    return groups.empty() || groups.contains(std::string(group));
}

bool SeriesFilter::accepts_phase(std::size_t phase_number) const { return !phase || *phase == phase_number; }

bool SeriesFilter::accepts(const Series& series) const {
    switch (series.kind) {
        case SeriesKind::Stimulus:
            if (!stimuli) return false;
            break;
        case SeriesKind::Configural:
            if (!configural) return false;
            break;
        case SeriesKind::Compound:
            if (!compounds) return false;
            break;
        case SeriesKind::TrialType:
            if (!trial_types) return false;
            break;
    }
    if (!only.empty() && !only.contains(series.name)) return false;
    return !hidden.contains(series.name);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string export_csv(const SimulationResult& result, const SeriesFilter& filter) {
    std::string out(kCsvHeader);
    out += '\n';
    auto cell = [&out](bool present, double value) {
        out += ',';
        if (present) out += format_number(value);
    };
    for (const auto& group : result.groups) {
        if (!filter.accepts_group(group.name)) continue;
        const std::string group_field = csv_field(group.name);
        for (std::size_t p = 0; p < group.phases.size(); ++p) {
            if (!filter.accepts_phase(p + 1)) continue;
            const std::string prefix = group_field + ',' + std::to_string(p + 1) + ',';
            for (const auto& series : group.phases[p].series) {
                if (!filter.accepts(series)) continue;
                const std::string name = csv_field(series.name);
                for (std::size_t i = 0; i < series.points.size(); ++i) {
                    const Snapshot& s = series.points[i];
                    out += prefix;
                    out += name;
                    out += ',';
                    out += std::to_string(i + 1);
                    cell(series.fields & FieldV, s.V);
                    cell(series.fields & FieldVE, s.V_E);
                    cell(series.fields & FieldVI, s.V_I);
                    cell(series.fields & FieldAlpha, s.alpha);
                    cell(series.fields & FieldAlphaMack, s.alpha_mack);
                    cell(series.fields & FieldAlphaHall, s.alpha_hall);
                    out += '\n';
                }
            }
        }
    }
    return out;
}

namespace {

std::vector<std::string> split_record(std::string_view text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                    continue;
                }
                quoted = false;
            } else {
                field += c;
            }
            ++pos;
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            ++pos;
            break;
        } else {
            field += c;
        }
        ++pos;
    }
    if (quoted) {
        throw ParseError(pos, "unterminated quoted field");
    }
    fields.push_back(std::move(field));
    return fields;
}

std::size_t parse_index(const std::string& text, std::size_t offset) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
        throw ParseError(offset, "expected a positive integer, got '" + text + "'");
    }
    return value;
}

std::optional<double> parse_cell(const std::string& text, std::size_t offset) {
    if (text.empty()) return std::nullopt;
    if (auto v = parse_number(text)) return v;
    // A diverged model writes inf or nan.
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(offset, "expected a number, got '" + text + "'");
    }
    return value;
}

}  // namespace

std::vector<CsvRow> parse_csv_export(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    const std::size_t header_end = text.find('\n');
    if (text.substr(0, header_end) != kCsvHeader) {
        throw ParseError(0, "missing CSV header");
    }
    pos = header_end == std::string_view::npos ? text.size() : header_end + 1;
    while (pos < text.size()) {
        const std::size_t start = pos;
        auto f = split_record(text, pos);
        if (f.size() != 10) {
            throw ParseError(start, "expected 10 fields, got " + std::to_string(f.size()));
        }
        CsvRow row;
        row.group = std::move(f[0]);
        row.phase = parse_index(f[1], start);
        row.series = std::move(f[2]);
        row.index = parse_index(f[3], start);
        row.V = parse_cell(f[4], start);
        row.V_E = parse_cell(f[5], start);
        row.V_I = parse_cell(f[6], start);
        row.alpha = parse_cell(f[7], start);
        row.alpha_mack = parse_cell(f[8], start);
        row.alpha_hall = parse_cell(f[9], start);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace pavsim
