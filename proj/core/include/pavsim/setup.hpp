#pragma once

#include "pavsim/design.hpp"
#include "pavsim/parameters.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pavsim {

/// Everything needed to run an experiment, after precedence is applied.
struct SimulationSetup {
    ExperimentSpec spec;
    ModelKind model = ModelKind::RescorlaWagner;
    ModelParameters params;
    std::vector<std::string> warnings;
};

/// Model: `model_override`, else the spec's `@model`, else Rescorla Wagner.
/// Parameters: `overrides`, else the spec's `@` entries, else the model's
/// defaults. Throws ValidationError (fields `model` or the parameter key).
[[nodiscard]] SimulationSetup resolve_setup(ExperimentSpec spec, const std::optional<std::string>& model_override,
                                            const std::map<std::string, std::string>& overrides);

/// Distinct stimuli the design touches, counting configural cues when on.
[[nodiscard]] std::size_t count_stimuli(const ExperimentSpec& spec, bool configural_cues);

}  // namespace pavsim
