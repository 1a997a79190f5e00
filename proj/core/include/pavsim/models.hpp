#pragma once

#include "pavsim/parameters.hpp"

#include <cstdint>

namespace pavsim {

/// Mutable learning state of one stimulus. Under Le Pelley's hybrid `alpha`
/// mirrors the effective rate `alpha_mack * alpha_hall`.
struct StimulusState {
    double V = 0.0;
    double V_E = 0.0;
    double V_I = 0.0;
    double alpha = 0.0;
    double alpha_mack = 0.0;
    double alpha_hall = 0.0;
    double salience = 0.0;
    double alpha0 = 0.0;

    friend bool operator==(const StimulusState&, const StimulusState&) = default;
};

/// Per-trial context shared by every stimulus present on the trial. The sums
/// run over present stimuli and are taken before any of them is updated.
struct RunParameters {
    double beta = 0.0;
    double lambda = 0.0;
    int sign = 1;
    double sigma = 0.0;
    double sigma_E = 0.0;
    double sigma_I = 0.0;
};

/// Trial-invariant constants the step functions read.
struct StepConstants {
    double gamma = 0.1;
    double theta_e = 0.8;
    double theta_i = 0.1;
    double decay = 0.0;
    double alpha0_gain = 1.0;
};

[[nodiscard]] StepConstants step_constants(const ModelParameters& params) noexcept;

[[nodiscard]] StimulusState rw_step(const StimulusState& s, const RunParameters& rp) noexcept;
[[nodiscard]] StimulusState pkh_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept;
[[nodiscard]] StimulusState me_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept;
[[nodiscard]] StimulusState lph_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept;
[[nodiscard]] StimulusState mlab_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept;

[[nodiscard]] StimulusState step(ModelKind kind, const StimulusState& s, const RunParameters& rp,
                                 const StepConstants& k) noexcept;

/// Bit set of the state quantities a model maintains.
enum Field : std::uint8_t {
    FieldV = 1U << 0,
    FieldVE = 1U << 1,
    FieldVI = 1U << 2,
    FieldAlpha = 1U << 3,
    FieldAlphaMack = 1U << 4,
    FieldAlphaHall = 1U << 5,
};
using FieldMask = std::uint8_t;

[[nodiscard]] FieldMask tracked_fields(ModelKind kind) noexcept;

inline constexpr double kMackintoshAlphaMin = 0.05;
inline constexpr double kHallAlphaMin = 0.5;

}  // namespace pavsim
