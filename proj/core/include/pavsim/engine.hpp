#pragma once

#include "pavsim/design.hpp"
#include "pavsim/models.hpp"
#include "pavsim/parameters.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pavsim {

using StateMap = std::map<StimulusId, StimulusState>;

/// Pre-trial values of one series point. Compound and trial-type points hold
/// sums of V, V_E and V_I over the trial's stimuli.
struct Snapshot {
    double V = 0.0;
    double V_E = 0.0;
    double V_I = 0.0;
    double alpha = 0.0;
    double alpha_mack = 0.0;
    double alpha_hall = 0.0;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

enum class SeriesKind { Stimulus, Configural, Compound, TrialType };

[[nodiscard]] std::string_view series_kind_name(SeriesKind kind) noexcept;

struct Series {
    std::string name;
    SeriesKind kind = SeriesKind::Stimulus;
    FieldMask fields = FieldV;
    std::vector<Snapshot> points;

    friend bool operator==(const Series&, const Series&) = default;
};

struct PhaseResult {
    /// Stimuli in id order, configural cues, compounds by name, then trial
    /// types in the order they are first written in the phase.
    std::vector<Series> series;
    StateMap final_states;
    std::size_t trial_count = 0;
    bool randomized = false;

    [[nodiscard]] const Series* find(std::string_view name, SeriesKind kind) const noexcept;

    friend bool operator==(const PhaseResult&, const PhaseResult&) = default;
};

struct GroupResult {
    std::string name;
    std::vector<PhaseResult> phases;

    friend bool operator==(const GroupResult&, const GroupResult&) = default;
};

struct SimulationResult {
    ModelKind model = ModelKind::RescorlaWagner;
    std::vector<GroupResult> groups;

    [[nodiscard]] const GroupResult* group(std::string_view name) const noexcept;

    friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

struct RunOptions {
    std::uint64_t seed = 0;
    /// 0 means one worker per hardware thread.
    unsigned max_workers = 0;
    /// Polled between trials; when it reads true the run throws Cancelled.
    const std::atomic<bool>* cancel = nullptr;
    /// Called with (finished work units, total units). May run on a worker.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Identifies the shuffle stream of one randomised phase.
struct ShuffleKey {
    std::uint64_t seed = 0;
    std::string_view group;
    std::size_t phase_index = 0;
};

/// Simulates every group independently, carrying state across phases.
/// Throws ValidationError for out-of-bounds parameters.
[[nodiscard]] SimulationResult run_experiment(const ExperimentSpec& spec, const ModelParameters& params,
                                              ModelKind kind, const RunOptions& options = {});

/// False when a model diverged somewhere, leaving inf or NaN in the result.
[[nodiscard]] bool all_finite(const SimulationResult& result);

/// Runs the phase's trials in written order starting from `states`.
[[nodiscard]] PhaseResult run_phase_sequential(const StateMap& states, const PhaseSpec& phase,
                                               const ModelParameters& params, ModelKind kind,
                                               const RunOptions& options = {});

/// Averages `params.num_random_runs` shuffled orders of the phase.
[[nodiscard]] PhaseResult run_phase_randomized(const StateMap& states, const PhaseSpec& phase,
                                               const ModelParameters& params, ModelKind kind, const ShuffleKey& key,
                                               const RunOptions& options = {});

/// Trial order used by randomised run `run_index`, as indices into
/// `phase.expand()`.
[[nodiscard]] std::vector<std::size_t> shuffled_order(const PhaseSpec& phase, const ShuffleKey& key,
                                                      std::size_t run_index);

/// Stimuli taking part in a trial: its own, plus q(set) for compounds when
/// configural cues are on.
[[nodiscard]] std::vector<StimulusId> inject_configural_cues(const TrialSpec& trial, bool configural_enabled);

/// Sum of V over the set, plus V of q(set) when enabled and the set is a
/// compound. Missing stimuli count as 0.
[[nodiscard]] double compound_value(const StateMap& states, const std::vector<StimulusId>& set,
                                    bool configural_enabled);

/// State a stimulus starts with on first appearance.
[[nodiscard]] StimulusState initial_state(const StimulusId& id, const ModelParameters& params, ModelKind kind);

}  // namespace pavsim
