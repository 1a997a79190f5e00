#include "pavsim/setup.hpp"

#include "pavsim/engine.hpp"

#include <set>

namespace pavsim {

SimulationSetup resolve_setup(ExperimentSpec spec, const std::optional<std::string>& model_override,
                              const std::map<std::string, std::string>& overrides) {
    SimulationSetup setup;
    const std::string name = model_override.value_or(spec.model_name.value_or(std::string(model_name(ModelKind::RescorlaWagner))));
    const auto kind = model_from_name(name);
    if (!kind) {
        throw ValidationError("model", "unknown model '" + name + "'");
    }
    setup.model = *kind;
    setup.params = model_defaults(*kind);
    apply_overrides(setup.params, spec.parameters, &setup.warnings);
    apply_overrides(setup.params, overrides, &setup.warnings);
    auto soft = validate(setup.params, *kind);
    setup.warnings.insert(setup.warnings.end(), soft.begin(), soft.end());
    setup.spec = std::move(spec);
    return setup;
}

std::size_t count_stimuli(const ExperimentSpec& spec, bool configural_cues) {
    std::set<StimulusId> ids;
    for (const auto& g : spec.groups) {
        for (const auto& p : g.phases) {
            for (const auto& item : p.items) {
                for (auto& id : inject_configural_cues(item.trial, configural_cues)) ids.insert(std::move(id));
            }
        }
    }
    return ids.size();
}

}  // namespace pavsim
