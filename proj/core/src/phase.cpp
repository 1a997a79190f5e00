#include "pavsim/design.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace pavsim {

std::string_view outcome_symbol(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::DoublePlus: return "++";
        case Outcome::Plus: return "+";
        case Outcome::Minus: return "-";
    }
    return "+";
}

std::string TrialSpec::to_string() const {
    return join_names(stimuli) + std::string(outcome_symbol(outcome));
}

std::vector<StimulusId> TrialSpec::sorted_stimuli() const {
    auto sorted = stimuli;
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

bool operator==(const TrialSpec& a, const TrialSpec& b) {
    return a.outcome == b.outcome && a.sorted_stimuli() == b.sorted_stimuli();
}

std::vector<TrialSpec> PhaseSpec::expand() const {
    std::vector<TrialSpec> out;
    out.reserve(trial_count());
    for (const auto& item : items) {
        for (std::uint32_t i = 0; i < item.repeat; ++i) {
            out.push_back(item.trial);
        }
    }
    return out;
}

std::size_t PhaseSpec::trial_count() const noexcept {
    std::size_t n = 0;
    for (const auto& item : items) {
        n += item.repeat;
    }
    return n;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

namespace {

// Whitespace-free copy of the input together with the original offset of
// every kept byte, so errors can point back into what the user typed.
struct Compacted {
    std::string text;
    std::vector<std::size_t> origin;

    [[nodiscard]] std::size_t map(std::size_t pos, std::size_t original_size) const {
        return pos < origin.size() ? origin[pos] : original_size;
    }
};

Compacted compact(std::string_view text) {
    Compacted out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(text[i]))) {
            out.text.push_back(text[i]);
            out.origin.push_back(i);
        }
    }
    return out;
}

TrialItem parse_trial(std::string_view text, std::size_t base, std::vector<Diagnostic>* warnings) {
    std::size_t pos = 0;
    std::uint64_t repeat = 0;
    bool has_repeat = false;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        repeat = repeat * 10 + static_cast<std::uint64_t>(text[pos] - '0');
        if (repeat > 10'000'000) {
            throw ParseError(base, "repeat count is too large");
        }
        has_repeat = true;
        ++pos;
    }
    if (has_repeat && repeat == 0) {
        throw ParseError(base, "repeat count must be >= 1");
    }

    TrialItem item;
    item.repeat = has_repeat ? static_cast<std::uint32_t>(repeat) : 1U;

    while (pos < text.size() && text[pos] != '+' && text[pos] != '-') {
        try {
            const std::size_t at = pos;
            StimulusId id = read_stimulus(text, pos);
            if (std::find(item.trial.stimuli.begin(), item.trial.stimuli.end(), id) != item.trial.stimuli.end()) {
                if (warnings) {
                    warnings->push_back({base + at, "duplicate stimulus " + id.to_string() + " in trial collapsed"});
                }
            } else {
                item.trial.stimuli.push_back(std::move(id));
            }
        } catch (const ParseError& e) {
            throw ParseError(base + e.offset(), e.detail());
        }
    }
    if (item.trial.stimuli.empty()) {
        throw ParseError(base + pos, pos < text.size() ? "trial has no stimuli before the US symbol"
                                                       : "expected a trial such as A+ or 3AB-");
    }
    if (pos >= text.size()) {
        throw ParseError(base + pos, "trial without US symbol (expected ++, + or -)");
    }
    if (text[pos] == '-') {
        item.trial.outcome = Outcome::Minus;
        ++pos;
    } else if (pos + 1 < text.size() && text[pos + 1] == '+') {
        item.trial.outcome = Outcome::DoublePlus;
        pos += 2;
    } else {
        item.trial.outcome = Outcome::Plus;
        ++pos;
    }
    if (pos != text.size()) {
        throw ParseError(base + pos, std::string("unexpected character '") + text[pos] + "' after US symbol");
    }
    return item;
}

PhaseSpec parse_compacted(std::string_view text, std::vector<Diagnostic>* warnings) {
    PhaseSpec phase;
    if (text.empty()) {
        return phase;
    }
    std::size_t start = 0;
    bool seen_rand = false;
    while (start <= text.size()) {
        std::size_t end = text.find('/', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view piece = text.substr(start, end - start);
        if (piece.empty()) {
            throw ParseError(start, "empty item between '/' separators");
        }
        const bool in_prefix = phase.items.empty();
        if (piece == "rand") {
            if (!in_prefix) {
                throw ParseError(start, "'rand' must come before the trials");
            }
            if (seen_rand) {
                throw ParseError(start, "duplicate 'rand' prefix");
            }
            seen_rand = true;
            phase.randomized = true;
        } else if (const auto eq = piece.find('='); eq != std::string_view::npos) {
            const std::string_view key = piece.substr(0, eq);
            const std::string_view value = piece.substr(eq + 1);
            if (key != "beta" && key != "lambda") {
                throw ParseError(start, "unknown prefix '" + std::string(key) + "' (expected rand, beta= or lambda=)");
            }
            if (!in_prefix) {
                throw ParseError(start, "'" + std::string(key) + "=' must come before the trials");
            }
            const auto number = parse_number(value);
            if (!number || !std::isfinite(*number)) {
                throw ParseError(start + eq + 1, "malformed number '" + std::string(value) + "'");
            }
            if (key == "beta") {
                if (phase.beta_override) throw ParseError(start, "duplicate 'beta=' prefix");
                if (*number <= 0.0) throw ParseError(start + eq + 1, "beta must be > 0");
                phase.beta_override = *number;
            } else {
                if (phase.lambda_override) throw ParseError(start, "duplicate 'lambda=' prefix");
                if (*number < 0.0) throw ParseError(start + eq + 1, "lambda must be >= 0");
                phase.lambda_override = *number;
            }
        } else {
            phase.items.push_back(parse_trial(piece, start, warnings));
        }
        if (end == text.size()) {
            break;
        }
        start = end + 1;
        if (start == text.size()) {
            throw ParseError(start, "trailing '/' with no item after it");
        }
    }
    return phase;
}

}  // namespace

PhaseSpec parse_phase(std::string_view text, std::vector<Diagnostic>* warnings) {
    const Compacted compacted = compact(text);
    std::vector<Diagnostic> local;
    try {
        PhaseSpec phase = parse_compacted(compacted.text, warnings ? &local : nullptr);
        if (warnings) {
            for (auto& w : local) {
                warnings->push_back({compacted.map(w.offset, text.size()), std::move(w.message)});
            }
        }
        return phase;
    } catch (const ParseError& e) {
        throw ParseError(compacted.map(e.offset(), text.size()), e.detail());
    }
}

std::string serialize_phase(const PhaseSpec& phase) {
    std::string out;
    auto append = [&out](std::string_view piece) {
        if (!out.empty()) {
            out += '/';
        }
        out += piece;
    };
    if (phase.randomized) append("rand");
    if (phase.beta_override) append("beta=" + format_number(*phase.beta_override));
    if (phase.lambda_override) append("lambda=" + format_number(*phase.lambda_override));
    for (const auto& item : phase.items) {
        const std::string count = item.repeat == 1 ? std::string() : std::to_string(item.repeat);
        append(count + item.trial.to_string());
    }
    return out;
}

}  // namespace pavsim
