#include "pavsim/stimulus.hpp"

#include "pavsim/error.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pavsim {

StimulusId StimulusId::simple(char letter, std::uint32_t primes, std::optional<std::uint32_t> caret) {
    if (letter < 'A' || letter > 'Z') {
        throw std::invalid_argument("stimulus letter must be A-Z");
    }
    if (caret && *caret == 0) {
        throw std::invalid_argument("caret index must be >= 1");
    }
    StimulusId id;
    id.letter_ = letter;
    id.primes_ = primes;
    id.caret_ = caret;
    return id;
}

StimulusId StimulusId::configural(std::vector<StimulusId> constituents) {
    for (const auto& c : constituents) {
        if (c.is_configural()) {
            throw std::invalid_argument("configural cues cannot contain configural cues");
        }
    }
    std::sort(constituents.begin(), constituents.end());
    constituents.erase(std::unique(constituents.begin(), constituents.end()), constituents.end());
    if (constituents.size() < 2) {
        throw std::invalid_argument("a configural cue needs at least two distinct stimuli");
    }
    StimulusId id;
    id.letter_ = 'q';
    id.constituents_ = std::move(constituents);
    return id;
}

std::string StimulusId::to_string() const {
    if (is_configural()) {
        return "q(" + join_names(constituents_) + ")";
    }
    std::string out(1, letter_);
    out.append(primes_, '\'');
    if (caret_) {
        out += '^';
        out += std::to_string(*caret_);
    }
    return out;
}

bool operator==(const StimulusId& a, const StimulusId& b) noexcept {
    return (a <=> b) == 0;
}

// Plain stimuli sort before configural cues; plain ones by (letter, primes,
// caret) with "no caret" first; configural ones lexicographically.
std::strong_ordering operator<=>(const StimulusId& a, const StimulusId& b) noexcept {
    if (a.is_configural() != b.is_configural()) {
        return a.is_configural() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.is_configural()) {
        return std::lexicographical_compare_three_way(a.constituents_.begin(), a.constituents_.end(),
                                                      b.constituents_.begin(), b.constituents_.end());
    }
    if (auto c = a.letter_ <=> b.letter_; c != 0) return c;
    if (auto c = a.primes_ <=> b.primes_; c != 0) return c;
    if (a.caret_.has_value() != b.caret_.has_value()) {
        return a.caret_.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.caret_) return *a.caret_ <=> *b.caret_;
    return std::strong_ordering::equal;
}

StimulusId read_stimulus(std::string_view text, std::size_t& pos) {
    if (pos >= text.size()) {
        throw ParseError(pos, "expected a stimulus letter A-Z");
    }
    const char c = text[pos];
    if (c >= 'a' && c <= 'z') {
        throw ParseError(pos, std::string("lowercase letter '") + c + "' is not a stimulus; use A-Z");
    }
    if (c >= '0' && c <= '9') {
        throw ParseError(pos, "digits are only allowed as a leading repeat count or after '^'");
    }
    if (c < 'A' || c > 'Z') {
        throw ParseError(pos, std::string("unexpected character '") + c + "', expected a stimulus letter A-Z");
    }
    ++pos;
    std::uint32_t primes = 0;
    while (pos < text.size() && text[pos] == '\'') {
        ++primes;
        ++pos;
    }
    std::optional<std::uint32_t> caret;
    if (pos < text.size() && text[pos] == '^') {
        ++pos;
        std::uint64_t value = 0;
        const std::size_t digits_start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            value = value * 10 + static_cast<std::uint64_t>(text[pos] - '0');
            if (value > std::numeric_limits<std::uint32_t>::max()) {
                throw ParseError(digits_start, "caret index is too large");
            }
            ++pos;
        }
        if (pos == digits_start) {
            throw ParseError(digits_start, "caret '^' must be followed by digits");
        }
        if (value == 0) {
            throw ParseError(digits_start, "caret index must be >= 1");
        }
        caret = static_cast<std::uint32_t>(value);
    }
    return StimulusId::simple(c, primes, caret);
}

StimulusId parse_stimulus(std::string_view text) {
    if (text.empty()) {
        throw ParseError(0, "empty stimulus name");
    }
    std::size_t pos = 0;
    if (text.size() >= 2 && text[0] == 'q' && text[1] == '(') {
        pos = 2;
        std::vector<StimulusId> parts;
        while (pos < text.size() && text[pos] != ')') {
            parts.push_back(read_stimulus(text, pos));
        }
        if (pos >= text.size()) {
            throw ParseError(text.size(), "missing ')' in configural cue");
        }
        const std::size_t close = pos++;
        if (pos != text.size()) {
            throw ParseError(pos, "unexpected text after configural cue");
        }
        auto sorted = parts;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.size() < 2) {
            throw ParseError(close, "configural cue needs at least two distinct stimuli");
        }
        return StimulusId::configural(std::move(parts));
    }
    StimulusId id = read_stimulus(text, pos);
    if (pos != text.size()) {
        const char c = text[pos];
        if (c >= '0' && c <= '9') {
            throw ParseError(pos, "digits must follow a caret '^'");
        }
        throw ParseError(pos, std::string("unexpected character '") + c + "' after stimulus name");
    }
    return id;
}

std::string join_names(std::span<const StimulusId> ids) {
    std::string out;
    for (const auto& id : ids) {
        out += id.to_string();
    }
    return out;
}

}  // namespace pavsim
