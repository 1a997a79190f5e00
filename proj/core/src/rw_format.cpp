#include "pavsim/design.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace pavsim {

std::size_t ExperimentSpec::phase_count() const noexcept {
    std::size_t n = 0;
    for (const auto& g : groups) {
        n = std::max(n, g.phases.size());
    }
    return n;
}

void ExperimentSpec::pad_phases() {
    const std::size_t n = phase_count();
    for (auto& g : groups) {
        g.phases.resize(n);
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
}

// `alpha_D`, `alpha_mack_A'^2`, `salience_q(AB)`: the text after the last
// underscore names a stimulus.
bool is_per_stimulus_key(std::string_view key) {
    const auto underscore = key.rfind('_', key.find('('));
    if (underscore == std::string_view::npos || underscore + 1 >= key.size()) {
        return false;
    }
    try {
        (void)parse_stimulus(key.substr(underscore + 1));
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

void check_token(std::string_view token, std::string_view what, std::string_view forbidden) {
    if (token.find_first_of(forbidden) != std::string_view::npos) {
        throw std::invalid_argument(std::string(what) + " '" + std::string(token) +
                                    "' contains a character that the .rw format cannot store");
    }
}

}  // namespace

ExperimentSpec parse_rw_file(std::string_view content, std::vector<Diagnostic>* warnings) {
    ExperimentSpec spec;
    std::set<std::string, std::less<>> names;
    std::size_t line_no = 0;
    for (std::string_view line : split(content, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        if (trim(line).front() == '@') {
            std::string_view body = trim(line);
            body.remove_prefix(1);
            for (std::string_view pair : split(body, ';')) {
                if (trim(pair).empty()) {
                    continue;
                }
                const auto eq = pair.find('=');
                const std::string_view key = eq == std::string_view::npos ? std::string_view{} : trim(pair.substr(0, eq));
                if (eq == std::string_view::npos || key.empty()) {
                    throw ParseError(0, "malformed parameter '" + std::string(trim(pair)) + "', expected key=value")
                        .located(line_no, std::nullopt);
                }
                const std::string value(trim(pair.substr(eq + 1)));
                if (key == "model") {
                    spec.model_name = value;
                    continue;
                }
                auto [it, inserted] = spec.parameters.insert_or_assign(std::string(key), value);
                if (!inserted && warnings) {
                    warnings->push_back({0, "line " + std::to_string(line_no) + ": parameter '" + it->first +
                                                "' given more than once; last value wins"});
                }
            }
            continue;
        }

        const auto cells = split(line, '|');
        GroupSpec group;
        group.name = std::string(trim(cells.front()));
        if (group.name.empty()) {
            throw ParseError(0, "group name is empty").located(line_no, 0);
        }
        if (names.contains(group.name)) {
            throw ParseError(0, "duplicate group name '" + group.name + "'").located(line_no, 0);
        }
        names.insert(group.name);
        for (std::size_t cell = 1; cell < cells.size(); ++cell) {
            std::vector<Diagnostic> local;
            try {
                group.phases.push_back(parse_phase(cells[cell], warnings ? &local : nullptr));
            } catch (const ParseError& e) {
                throw e.located(line_no, cell);
            }
            if (warnings) {
                for (auto& w : local) {
                    warnings->push_back({w.offset, "line " + std::to_string(line_no) + ", cell " +
                                                       std::to_string(cell) + ": " + w.message});
                }
            }
        }
        spec.groups.push_back(std::move(group));
    }
    spec.pad_phases();
    return spec;
}

std::string serialize_rw_file(const ExperimentSpec& spec) {
    std::vector<std::string> lines;
    if (spec.model_name) {
        check_token(*spec.model_name, "model name", ";\n\r");
        lines.push_back("@model=" + *spec.model_name);
    }
    std::string globals;
    std::string per_stimulus;
    for (const auto& [key, value] : spec.parameters) {
        if (key.empty()) {
            throw std::invalid_argument("parameter key is empty");
        }
        check_token(key, "parameter key", "=;\n\r");
        check_token(value, "parameter value", ";\n\r");
        std::string& target = is_per_stimulus_key(key) ? per_stimulus : globals;
        if (!target.empty()) target += ';';
        target += key + "=" + value;
    }
    if (!globals.empty()) lines.push_back("@" + globals);
    if (!per_stimulus.empty()) lines.push_back("@" + per_stimulus);

    const std::size_t columns = spec.phase_count();
    for (const auto& group : spec.groups) {
        const std::string_view name = trim(group.name);
        if (name.empty() || name != group.name) {
            throw std::invalid_argument("group name '" + group.name + "' is empty or has surrounding whitespace");
        }
        check_token(group.name, "group name", "|\n\r");
        if (group.name.front() == '@') {
            throw std::invalid_argument("group name '" + group.name + "' cannot start with '@'");
        }
        std::string line = group.name;
        for (std::size_t i = 0; i < columns; ++i) {
            line += '|';
            if (i < group.phases.size()) {
                line += serialize_phase(group.phases[i]);
            }
        }
        lines.push_back(std::move(line));
    }

    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace pavsim
