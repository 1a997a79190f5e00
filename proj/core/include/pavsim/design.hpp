#pragma once

#include "pavsim/error.hpp"
#include "pavsim/stimulus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

/// Outcome of a trial: `++` double-strength US, `+` US present, `-` absent.
enum class Outcome { DoublePlus, Plus, Minus };

[[nodiscard]] std::string_view outcome_symbol(Outcome outcome) noexcept;

/// One trial: a set of plain stimuli followed by an outcome. Stimuli keep the
/// order they were written in; equality ignores that order.
struct TrialSpec {
    std::vector<StimulusId> stimuli;
    Outcome outcome = Outcome::Plus;

    /// `AX-` style text in written order.
    [[nodiscard]] std::string to_string() const;
    /// Sorted stimuli; two trials have the same type iff these and the
    /// outcomes match.
    [[nodiscard]] std::vector<StimulusId> sorted_stimuli() const;

    friend bool operator==(const TrialSpec& a, const TrialSpec& b);
};

struct TrialItem {
    std::uint32_t repeat = 1;
    TrialSpec trial;

    friend bool operator==(const TrialItem&, const TrialItem&) = default;
};

struct PhaseSpec {
    bool randomized = false;
    std::optional<double> beta_override;
    std::optional<double> lambda_override;
    std::vector<TrialItem> items;

    [[nodiscard]] bool empty() const noexcept { return items.empty(); }
    /// Repeat counts expanded in written order: `2A+/B-` -> A+, A+, B-.
    [[nodiscard]] std::vector<TrialSpec> expand() const;
    [[nodiscard]] std::size_t trial_count() const noexcept;

    friend bool operator==(const PhaseSpec&, const PhaseSpec&) = default;
};

/// Parses a phase cell such as `rand/beta=4/5A+/5C-`. Whitespace anywhere in
/// the text is ignored. Errors carry the byte offset into `text`.
[[nodiscard]] PhaseSpec parse_phase(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

/// Canonical text; `parse_phase(serialize_phase(p)) == p`.
[[nodiscard]] std::string serialize_phase(const PhaseSpec& phase);

struct GroupSpec {
    std::string name;
    std::vector<PhaseSpec> phases;

    friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// A whole design: groups (rows) by phases (columns), plus the `@` parameter
/// entries exactly as written. Unknown parameter keys are kept verbatim.
struct ExperimentSpec {
    std::vector<GroupSpec> groups;
    std::map<std::string, std::string> parameters;
    std::optional<std::string> model_name;

    [[nodiscard]] std::size_t phase_count() const noexcept;
    /// Appends empty phases so every group has `phase_count()` phases.
    void pad_phases();

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

/// Reads the pipe-separated `.rw` format. LF or CRLF line endings.
[[nodiscard]] ExperimentSpec parse_rw_file(std::string_view content,
                                           std::vector<Diagnostic>* warnings = nullptr);

/// Writes the `.rw` format with LF endings. Throws std::invalid_argument for
/// group names that cannot be represented (empty, `|`, newline, leading `@`).
[[nodiscard]] std::string serialize_rw_file(const ExperimentSpec& spec);

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double value);

/// Strict whole-string parse of a finite double; std::nullopt on any junk.
[[nodiscard]] std::optional<double> parse_number(std::string_view text);

}  // namespace pavsim
