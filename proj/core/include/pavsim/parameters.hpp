#pragma once

#include "pavsim/error.hpp"
#include "pavsim/stimulus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

enum class ModelKind {
    RescorlaWagner,
    PearceKayeHall,
    MackintoshExtended,
    LePelleyHybrid,
    Mlab,
};

/// Display names, also accepted by the CLI and `@model=` lines:
/// "Rescorla Wagner", "Pearce Kaye Hall", "Mackintosh Extended",
/// "Le Pelley's Hybrid", "MLAB Model".
[[nodiscard]] std::string_view model_name(ModelKind kind) noexcept;
[[nodiscard]] std::optional<ModelKind> model_from_name(std::string_view name) noexcept;
[[nodiscard]] std::span<const ModelKind> all_models() noexcept;

/// Scalar parameters a model may read. Per-CS initial values are held in the
/// override maps of ModelParameters.
enum class Param {
    Alpha,
    AlphaMack,
    AlphaHall,
    Salience,
    Lambda,
    BetaPlus,
    BetaMinus,
    Gamma,
    ThetaE,
    ThetaI,
    Decay,
    NumRandomRuns,
};

struct ParamInfo {
    Param param;
    std::string_view key;     // `.rw` / JSON key
    std::string_view symbol;  // display symbol
    std::string_view description;
};

[[nodiscard]] std::span<const ParamInfo> parameter_table() noexcept;
[[nodiscard]] const ParamInfo& info(Param p) noexcept;
[[nodiscard]] std::optional<Param> param_from_key(std::string_view key) noexcept;

/// Closed interval unless `min_exclusive`; a missing side is unbounded.
struct Bounds {
    std::optional<double> min;
    std::optional<double> max;
    bool min_exclusive = false;

    [[nodiscard]] bool contains(double v) const noexcept;
};

/// `hard` is enforced by validation; leaving `soft` (the model's stated
/// range) only produces a warning.
struct ParamBounds {
    Bounds hard;
    Bounds soft;
};

struct ModelParameters {
    double alpha = 0.15;
    double alpha_mack = 0.9;
    double alpha_hall = 0.9;
    double salience = 0.2;
    double lambda = 0.8;
    double beta_plus = 0.5;
    double beta_minus = 0.3;
    double gamma = 0.1;
    double theta_e = 0.8;
    double theta_i = 0.1;
    double decay = 0.0;
    std::uint32_t num_random_runs = 500;
    bool configural_cues = false;
    /// Multiplies the initial-alpha term of the MLAB alpha law. 1 is the
    /// model as published; 0 turns MLAB into Rescorla-Wagner when decay is 0.
    double mlab_alpha0_gain = 1.0;

    std::map<StimulusId, double> alpha_per_cs;
    std::map<StimulusId, double> alpha_mack_per_cs;
    std::map<StimulusId, double> alpha_hall_per_cs;
    std::map<StimulusId, double> salience_per_cs;

    [[nodiscard]] double get(Param p) const noexcept;
    void set(Param p, double value);

    friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

/// Per-model defaults. Values not read by the model keep the shared defaults.
[[nodiscard]] ModelParameters model_defaults(ModelKind kind);
[[nodiscard]] std::vector<Param> enabled_parameters(ModelKind kind);
[[nodiscard]] bool is_enabled(ModelKind kind, Param p);
[[nodiscard]] ParamBounds parameter_bounds(ModelKind kind, Param p);

/// Applies `key=value` overrides (the `.rw` `@` entries, request bodies, CLI
/// flags). Keys: the ParamInfo keys, `configural_cues`, `alpha0_gain`, and
/// per-CS `alpha_X`, `alpha_mack_X`, `alpha_hall_X`, `salience_X`.
/// Unknown keys are reported as warnings and otherwise ignored; malformed
/// values throw ValidationError naming the key.
void apply_overrides(ModelParameters& params, const std::map<std::string, std::string>& entries,
                     std::vector<std::string>* warnings = nullptr);

/// Throws ValidationError listing every hard-bound violation. Returns
/// warnings for soft-bound violations of enabled parameters.
std::vector<std::string> validate(const ModelParameters& params, ModelKind kind);

}  // namespace pavsim
