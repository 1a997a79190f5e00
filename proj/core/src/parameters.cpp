#include "pavsim/parameters.hpp"

#include "pavsim/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace pavsim {

namespace {

constexpr std::array<ModelKind, 5> kModels = {
    ModelKind::RescorlaWagner, ModelKind::PearceKayeHall, ModelKind::MackintoshExtended,
    ModelKind::LePelleyHybrid, ModelKind::Mlab,
};

constexpr std::array<ParamInfo, 12> kParams = {{
    {Param::Alpha, "alpha", "α", "Initial learning rate of every CS without its own value"},
    {Param::AlphaMack, "alpha_mack", "αᴹ", "Initial Mackintosh attentional associability"},
    {Param::AlphaHall, "alpha_hall", "αᴴ", "Initial Hall salience associability"},
    {Param::Salience, "salience", "S", "Salience of every CS without its own value"},
    {Param::Lambda, "lambda", "λ", "Asymptote of learning on reinforced trials"},
    {Param::BetaPlus, "beta", "β⁺", "US learning rate on reinforced trials"},
    {Param::BetaMinus, "betan", "β⁻", "US learning rate on nonreinforced trials"},
    {Param::Gamma, "gamma", "γ", "Weight of the latest prediction error in Hall-style alpha updates"},
    {Param::ThetaE, "thetaE", "θᴱ", "Attention change rate on excitatory updates"},
    {Param::ThetaI, "thetaI", "θᴵ", "Attention change rate on inhibitory updates"},
    {Param::Decay, "decay", "d", "Exposure decay of the MLAB learning rate"},
    {Param::NumRandomRuns, "num_trials", "№", "Number of shuffled sequences averaged in randomised phases"},
}};

std::optional<bool> parse_bool(std::string_view s) {
    if (s == "1" || s == "true" || s == "True" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "False" || s == "no" || s == "off") return false;
    return std::nullopt;
}

}  // namespace

std::string_view model_name(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::RescorlaWagner: return "Rescorla Wagner";
        case ModelKind::PearceKayeHall: return "Pearce Kaye Hall";
        case ModelKind::MackintoshExtended: return "Mackintosh Extended";
        case ModelKind::LePelleyHybrid: return "Le Pelley's Hybrid";
        case ModelKind::Mlab: return "MLAB Model";
    }
    return "Rescorla Wagner";
}

std::optional<ModelKind> model_from_name(std::string_view name) noexcept {
    for (ModelKind k : kModels) {
        if (model_name(k) == name) return k;
    }
    return std::nullopt;
}

std::span<const ModelKind> all_models() noexcept { return kModels; }

std::span<const ParamInfo> parameter_table() noexcept { return kParams; }

const ParamInfo& info(Param p) noexcept { return kParams[static_cast<std::size_t>(p)]; }

std::optional<Param> param_from_key(std::string_view key) noexcept {
    for (const auto& p : kParams) {
        if (p.key == key) return p.param;
    }
    return std::nullopt;
}

bool Bounds::contains(double v) const noexcept {
    if (!std::isfinite(v)) return false;
    if (min && (min_exclusive ? v <= *min : v < *min)) return false;
    if (max && v > *max) return false;
    return true;
}

double ModelParameters::get(Param p) const noexcept {
    switch (p) {
        case Param::Alpha: return alpha;
        case Param::AlphaMack: return alpha_mack;
        case Param::AlphaHall: return alpha_hall;
        case Param::Salience: return salience;
        case Param::Lambda: return lambda;
        case Param::BetaPlus: return beta_plus;
        case Param::BetaMinus: return beta_minus;
        case Param::Gamma: return gamma;
        case Param::ThetaE: return theta_e;
        case Param::ThetaI: return theta_i;
        case Param::Decay: return decay;
        case Param::NumRandomRuns: return static_cast<double>(num_random_runs);
    }
    return 0.0;
}

void ModelParameters::set(Param p, double value) {
    switch (p) {
        case Param::Alpha: alpha = value; break;
        case Param::AlphaMack: alpha_mack = value; break;
        case Param::AlphaHall: alpha_hall = value; break;
        case Param::Salience: salience = value; break;
        case Param::Lambda: lambda = value; break;
        case Param::BetaPlus: beta_plus = value; break;
        case Param::BetaMinus: beta_minus = value; break;
        case Param::Gamma: gamma = value; break;
        case Param::ThetaE: theta_e = value; break;
        case Param::ThetaI: theta_i = value; break;
        case Param::Decay: decay = value; break;
        case Param::NumRandomRuns:
            if (!(value >= 1.0 && value <= 1e7) || value != std::floor(value)) {
                throw ValidationError("num_trials", "must be a whole number between 1 and 10000000");
            }
            num_random_runs = static_cast<std::uint32_t>(value);
            break;
    }
}

ModelParameters model_defaults(ModelKind kind) {
    ModelParameters p;
    p.lambda = 1.0;
    p.beta_plus = 0.5;
    p.beta_minus = 0.3;
    switch (kind) {
        case ModelKind::RescorlaWagner:
            p.alpha = 0.15;
            p.lambda = 0.8;
            break;
        case ModelKind::PearceKayeHall:
            p.alpha = 0.9;
            p.salience = 0.2;
            p.gamma = 0.1;
            break;
        case ModelKind::MackintoshExtended:
            p.alpha = 0.9;
            p.theta_e = 0.8;
            p.theta_i = 0.1;
            break;
        case ModelKind::LePelleyHybrid:
            p.alpha_mack = 0.9;
            p.alpha_hall = 0.9;
            p.gamma = 0.1;
            p.theta_e = 0.8;
            p.theta_i = 0.1;
            break;
        case ModelKind::Mlab:
            p.alpha = 0.5;
            p.decay = 0.05;
            break;
    }
    return p;
}

std::vector<Param> enabled_parameters(ModelKind kind) {
    using enum Param;
    switch (kind) {
        case ModelKind::RescorlaWagner:
            return {Alpha, Lambda, BetaPlus, BetaMinus, NumRandomRuns};
        case ModelKind::PearceKayeHall:
            return {Alpha, Salience, Lambda, BetaPlus, BetaMinus, Gamma, NumRandomRuns};
        case ModelKind::MackintoshExtended:
            return {Alpha, Lambda, BetaPlus, BetaMinus, ThetaE, ThetaI, NumRandomRuns};
        case ModelKind::LePelleyHybrid:
            return {AlphaMack, AlphaHall, Lambda, BetaPlus, BetaMinus, Gamma, ThetaE, ThetaI, NumRandomRuns};
        case ModelKind::Mlab:
            return {Alpha, Lambda, BetaPlus, BetaMinus, Decay, NumRandomRuns};
    }
    return {};
}

bool is_enabled(ModelKind kind, Param p) {
    const auto enabled = enabled_parameters(kind);
    return std::find(enabled.begin(), enabled.end(), p) != enabled.end();
}

ParamBounds parameter_bounds(ModelKind kind, Param p) {
    const Bounds non_negative{0.0, std::nullopt, false};
    const Bounds positive{0.0, std::nullopt, true};
    const Bounds unit{0.0, 1.0, false};
    switch (p) {
        case Param::Alpha:
            if (kind == ModelKind::MackintoshExtended) return {non_negative, {0.05, 1.0, false}};
            return {non_negative, unit};
        case Param::AlphaMack: return {non_negative, {0.05, 1.0, false}};
        case Param::AlphaHall: return {non_negative, {0.5, 1.0, false}};
        case Param::Salience: return {non_negative, unit};
        case Param::Lambda: return {non_negative, non_negative};
        case Param::BetaPlus:
        case Param::BetaMinus: return {positive, {0.0, 1.0, true}};
        case Param::Gamma:
        case Param::Decay: return {unit, unit};
        case Param::ThetaE:
        case Param::ThetaI: return {non_negative, unit};
        case Param::NumRandomRuns: return {{1.0, 1e7, false}, {1.0, 1e7, false}};
    }
    return {};
}

void apply_overrides(ModelParameters& params, const std::map<std::string, std::string>& entries,
                     std::vector<std::string>* warnings) {
    std::vector<FieldIssue> issues;
    for (const auto& [key, raw] : entries) {
        if (key == "configural_cues") {
            if (auto b = parse_bool(raw)) {
                params.configural_cues = *b;
            } else {
                issues.push_back({key, "expected true or false, got '" + raw + "'"});
            }
            continue;
        }
        const auto value = parse_number(raw);
        if (auto p = param_from_key(key)) {
            if (!value) {
                issues.push_back({key, "expected a number, got '" + raw + "'"});
                continue;
            }
            try {
                params.set(*p, *value);
            } catch (const ValidationError& e) {
                issues.insert(issues.end(), e.issues().begin(), e.issues().end());
            }
            continue;
        }
        if (key == "alpha0_gain") {
            if (value) {
                params.mlab_alpha0_gain = *value;
            } else {
                issues.push_back({key, "expected a number, got '" + raw + "'"});
            }
            continue;
        }

        struct PerCs {
            std::string_view prefix;
            std::map<StimulusId, double>* target;
        };
        // Longest prefixes first so `alpha_mack_A` is not read as `alpha_` + `mack_A`.
        const std::array<PerCs, 4> per_cs = {{
            {"alpha_mack_", &params.alpha_mack_per_cs},
            {"alpha_hall_", &params.alpha_hall_per_cs},
            {"salience_", &params.salience_per_cs},
            {"alpha_", &params.alpha_per_cs},
        }};
        bool handled = false;
        for (const auto& entry : per_cs) {
            if (!key.starts_with(entry.prefix)) continue;
            try {
                const StimulusId id = parse_stimulus(std::string_view(key).substr(entry.prefix.size()));
                if (!value) {
                    issues.push_back({key, "expected a number, got '" + raw + "'"});
                } else {
                    (*entry.target)[id] = *value;
                }
                handled = true;
            } catch (const ParseError&) {
                // Not a stimulus suffix; fall through to the unknown-key path.
            }
            break;
        }
        if (!handled && warnings) {
            warnings->push_back("unknown parameter '" + key + "' ignored");
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

std::vector<std::string> validate(const ModelParameters& params, ModelKind kind) {
    std::vector<FieldIssue> issues;
    std::vector<std::string> warnings;
    auto check = [&](const std::string& field, double value, const ParamBounds& b, bool enabled) {
        if (!b.hard.contains(value)) {
            issues.push_back({field, "value " + format_number(value) + " is out of bounds"});
        } else if (enabled && !b.soft.contains(value)) {
            warnings.push_back(field + "=" + format_number(value) + " is outside the model's range");
        }
    };
    for (const auto& p : kParams) {
        check(std::string(p.key), params.get(p.param), parameter_bounds(kind, p.param), is_enabled(kind, p.param));
    }
    auto check_map = [&](std::string_view prefix, const std::map<StimulusId, double>& values, Param p) {
        for (const auto& [id, v] : values) {
            check(std::string(prefix) + id.to_string(), v, parameter_bounds(kind, p), is_enabled(kind, p));
        }
    };
    check_map("alpha_", params.alpha_per_cs, Param::Alpha);
    check_map("alpha_mack_", params.alpha_mack_per_cs, Param::AlphaMack);
    check_map("alpha_hall_", params.alpha_hall_per_cs, Param::AlphaHall);
    check_map("salience_", params.salience_per_cs, Param::Salience);
    if (!std::isfinite(params.mlab_alpha0_gain)) {
        issues.push_back({"alpha0_gain", "must be finite"});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return warnings;
}

}  // namespace pavsim
