#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

/// Identity of a conditioned stimulus: a letter A-Z with any number of primes
/// and an optional caret index (`A''^3`), or a configural cue `q(...)` that
/// stands for a specific compound of plain stimuli.
class StimulusId {
public:
    StimulusId() = default;

    /// Throws std::invalid_argument for a letter outside A-Z or caret 0.
    static StimulusId simple(char letter, std::uint32_t primes = 0,
                             std::optional<std::uint32_t> caret = std::nullopt);

    /// Constituents are sorted and de-duplicated. Requires at least two
    /// distinct plain stimuli.
    static StimulusId configural(std::vector<StimulusId> constituents);

    [[nodiscard]] bool is_configural() const noexcept { return !constituents_.empty(); }
    [[nodiscard]] char letter() const noexcept { return letter_; }
    [[nodiscard]] std::uint32_t primes() const noexcept { return primes_; }
    [[nodiscard]] std::optional<std::uint32_t> caret() const noexcept { return caret_; }
    [[nodiscard]] std::span<const StimulusId> constituents() const noexcept { return constituents_; }

    /// Canonical text: `A`, `B''`, `C'^12`, `q(AB)`.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const StimulusId& a, const StimulusId& b) noexcept;
    friend std::strong_ordering operator<=>(const StimulusId& a, const StimulusId& b) noexcept;

private:
    char letter_ = 'A';
    std::uint32_t primes_ = 0;
    std::optional<std::uint32_t> caret_;
    std::vector<StimulusId> constituents_;
};

/// Parses one stimulus name, consuming the whole text. Accepts `q(...)`.
/// Throws ParseError with the byte offset of the first bad character.
[[nodiscard]] StimulusId parse_stimulus(std::string_view text);

/// Reads one plain stimulus starting at `pos`, advancing it. Used by the
/// trial parser; does not accept configural names.
[[nodiscard]] StimulusId read_stimulus(std::string_view text, std::size_t& pos);

/// Concatenated canonical names, e.g. {A, X^1} -> "AX^1".
[[nodiscard]] std::string join_names(std::span<const StimulusId> ids);

}  // namespace pavsim
