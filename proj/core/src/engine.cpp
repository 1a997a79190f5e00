#include "pavsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>

namespace pavsim {

std::string_view series_kind_name(SeriesKind kind) noexcept {
    switch (kind) {
        case SeriesKind::Stimulus: return "stimulus";
        case SeriesKind::Configural: return "configural";
        case SeriesKind::Compound: return "compound";
        case SeriesKind::TrialType: return "trial_type";
    }
    return "stimulus";
}

const Series* PhaseResult::find(std::string_view name, SeriesKind kind) const noexcept {
    for (const auto& s : series) {
        if (s.kind == kind && s.name == name) return &s;
    }
    return nullptr;
}

const GroupResult* SimulationResult::group(std::string_view name) const noexcept {
    for (const auto& g : groups) {
        if (g.name == name) return &g;
    }
    return nullptr;
}

StimulusState initial_state(const StimulusId& id, const ModelParameters& params, ModelKind kind) {
    auto lookup = [&id](const std::map<StimulusId, double>& per_cs) -> std::optional<double> {
        if (auto it = per_cs.find(id); it != per_cs.end()) return it->second;
        return std::nullopt;
    };
    StimulusState s;
    if (id.is_configural()) {
        double alpha = 1.0;
        double mack = 1.0;
        double hall = 1.0;
        for (const auto& c : id.constituents()) {
            const StimulusState part = initial_state(c, params, kind);
            alpha *= part.alpha;
            mack *= part.alpha_mack;
            hall *= part.alpha_hall;
        }
        s.alpha = lookup(params.alpha_per_cs).value_or(alpha);
        s.alpha_mack = lookup(params.alpha_mack_per_cs).value_or(mack);
        s.alpha_hall = lookup(params.alpha_hall_per_cs).value_or(hall);
    } else {
        s.alpha = lookup(params.alpha_per_cs).value_or(params.alpha);
        s.alpha_mack = lookup(params.alpha_mack_per_cs).value_or(params.alpha_mack);
        s.alpha_hall = lookup(params.alpha_hall_per_cs).value_or(params.alpha_hall);
    }
    if (kind == ModelKind::LePelleyHybrid) {
        s.alpha = s.alpha_mack * s.alpha_hall;
    }
    s.salience = lookup(params.salience_per_cs).value_or(params.salience);
    s.alpha0 = s.alpha;
    return s;
}

std::vector<StimulusId> inject_configural_cues(const TrialSpec& trial, bool configural_enabled) {
    std::vector<StimulusId> out = trial.stimuli;
    if (configural_enabled && trial.stimuli.size() >= 2) {
        out.push_back(StimulusId::configural(trial.stimuli));
    }
    return out;
}

double compound_value(const StateMap& states, const std::vector<StimulusId>& set, bool configural_enabled) {
    double total = 0.0;
    for (const auto& id : set) {
        if (auto it = states.find(id); it != states.end()) total += it->second.V;
    }
    if (configural_enabled && set.size() >= 2) {
        if (auto it = states.find(StimulusId::configural(set)); it != states.end()) total += it->second.V;
    }
    return total;
}

namespace {

constexpr std::uint32_t kNone = 0xFFFFFFFFU;

struct CompiledTrial {
    std::vector<std::uint32_t> members;
    std::uint32_t compound = kNone;
    std::uint32_t type = 0;
    RunParameters base;
};

// A phase with stimuli interned to dense indices, so the inner loop never
// touches a map.
struct CompiledPhase {
    std::vector<StimulusId> ids;
    std::vector<StimulusState> initial;
    std::vector<CompiledTrial> items;
    std::vector<std::uint32_t> sequence;  // expanded trials as item indices
    std::vector<std::size_t> appearances;
    std::vector<std::string> compound_names;
    std::vector<std::size_t> compound_counts;
    std::vector<std::string> type_names;
    std::vector<std::size_t> type_counts;
};

CompiledPhase compile(const StateMap& states, const PhaseSpec& phase, const ModelParameters& params,
                      ModelKind kind) {
    CompiledPhase out;
    std::vector<std::vector<StimulusId>> members(phase.items.size());
    std::map<StimulusId, std::uint32_t> index;
    for (std::size_t i = 0; i < phase.items.size(); ++i) {
        members[i] = inject_configural_cues(phase.items[i].trial, params.configural_cues);
        for (const auto& id : members[i]) index.emplace(id, 0);
    }
    for (auto& [id, slot] : index) {
        slot = static_cast<std::uint32_t>(out.ids.size());
        out.ids.push_back(id);
        auto it = states.find(id);
        out.initial.push_back(it != states.end() ? it->second : initial_state(id, params, kind));
    }
    out.appearances.assign(out.ids.size(), 0);

    std::map<std::string, std::uint32_t> compounds;
    for (const auto& item : phase.items) {
        if (item.trial.stimuli.size() >= 2) compounds.emplace(join_names(item.trial.sorted_stimuli()), 0);
    }
    for (auto& [name, slot] : compounds) {
        slot = static_cast<std::uint32_t>(out.compound_names.size());
        out.compound_names.push_back(name);
    }
    out.compound_counts.assign(out.compound_names.size(), 0);

    std::vector<TrialSpec> types;
    const double beta_plus = phase.beta_override.value_or(params.beta_plus);
    const double lambda = phase.lambda_override.value_or(params.lambda);
    for (std::size_t i = 0; i < phase.items.size(); ++i) {
        const auto& item = phase.items[i];
        CompiledTrial t;
        for (const auto& id : members[i]) t.members.push_back(index.at(id));
        if (item.trial.stimuli.size() >= 2) t.compound = compounds.at(join_names(item.trial.sorted_stimuli()));
        auto found = std::find(types.begin(), types.end(), item.trial);
        if (found == types.end()) {
            t.type = static_cast<std::uint32_t>(types.size());
            types.push_back(item.trial);
            out.type_names.push_back(item.trial.to_string());
            out.type_counts.push_back(0);
        } else {
            t.type = static_cast<std::uint32_t>(found - types.begin());
        }
        switch (item.trial.outcome) {
            case Outcome::DoublePlus: t.base = {2.0 * beta_plus, lambda, 1}; break;
            case Outcome::Plus: t.base = {beta_plus, lambda, 1}; break;
            case Outcome::Minus: t.base = {params.beta_minus, 0.0, -1}; break;
        }
        for (std::uint32_t r = 0; r < item.repeat; ++r) {
            out.sequence.push_back(static_cast<std::uint32_t>(i));
            for (auto m : t.members) ++out.appearances[m];
            if (t.compound != kNone) ++out.compound_counts[t.compound];
            ++out.type_counts[t.type];
        }
        out.items.push_back(std::move(t));
    }
    return out;
}

struct RunBuffers {
    std::vector<StimulusState> states;
    std::vector<std::vector<Snapshot>> stimuli;
    std::vector<std::vector<Snapshot>> compounds;
    std::vector<std::vector<Snapshot>> types;

    explicit RunBuffers(const CompiledPhase& phase)
        : states(phase.initial),
          stimuli(phase.ids.size()),
          compounds(phase.compound_names.size()),
          types(phase.type_names.size()) {
        for (std::size_t i = 0; i < stimuli.size(); ++i) stimuli[i].reserve(phase.appearances[i]);
        for (std::size_t i = 0; i < compounds.size(); ++i) compounds[i].reserve(phase.compound_counts[i]);
        for (std::size_t i = 0; i < types.size(); ++i) types[i].reserve(phase.type_counts[i]);
    }
};

void check_cancel(const RunOptions& options) {
    if (options.cancel != nullptr && options.cancel->load(std::memory_order_relaxed)) {
        throw Cancelled();
    }
}

void run_order(const CompiledPhase& phase, const std::vector<std::uint32_t>& order, ModelKind kind,
               const StepConstants& k, const RunOptions& options, RunBuffers& buf) {
    for (std::uint32_t item : order) {
        check_cancel(options);
        const CompiledTrial& t = phase.items[item];
        RunParameters rp = t.base;
        for (auto m : t.members) {
            rp.sigma += buf.states[m].V;
            rp.sigma_E += buf.states[m].V_E;
            rp.sigma_I += buf.states[m].V_I;
        }
        for (auto m : t.members) {
            const auto& s = buf.states[m];
            buf.stimuli[m].push_back({s.V, s.V_E, s.V_I, s.alpha, s.alpha_mack, s.alpha_hall});
        }
        const Snapshot sum{rp.sigma, rp.sigma_E, rp.sigma_I, 0.0, 0.0, 0.0};
        if (t.compound != kNone) buf.compounds[t.compound].push_back(sum);
        buf.types[t.type].push_back(sum);
        for (auto m : t.members) {
            buf.states[m] = step(kind, buf.states[m], rp, k);
        }
    }
}

PhaseResult assemble(const StateMap& incoming, const CompiledPhase& phase, const RunBuffers& buf, ModelKind kind,
                     bool randomized) {
    PhaseResult result;
    result.randomized = randomized;
    result.trial_count = phase.sequence.size();
    result.final_states = incoming;
    const FieldMask fields = tracked_fields(kind);
    const FieldMask sums = fields & (FieldV | FieldVE | FieldVI);
    for (std::size_t i = 0; i < phase.ids.size(); ++i) {
        result.final_states[phase.ids[i]] = buf.states[i];
        if (!phase.ids[i].is_configural()) {
            result.series.push_back({phase.ids[i].to_string(), SeriesKind::Stimulus, fields, buf.stimuli[i]});
        }
    }
    for (std::size_t i = 0; i < phase.ids.size(); ++i) {
        if (phase.ids[i].is_configural()) {
            result.series.push_back({phase.ids[i].to_string(), SeriesKind::Configural, fields, buf.stimuli[i]});
        }
    }
    for (std::size_t i = 0; i < phase.compound_names.size(); ++i) {
        result.series.push_back({phase.compound_names[i], SeriesKind::Compound, sums, buf.compounds[i]});
    }
    for (std::size_t i = 0; i < phase.type_names.size(); ++i) {
        result.series.push_back({phase.type_names[i], SeriesKind::TrialType, sums, buf.types[i]});
    }
    return result;
}

// Unbiased draw from [0, n) that gives the same stream on every platform,
// unlike std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % n;
    }
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::size_t> permutation(std::size_t n, const ShuffleKey& key, std::size_t run_index) {
    const std::uint64_t g = fnv1a(key.group);
    std::seed_seq seq{
        static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32),
        static_cast<std::uint32_t>(g),        static_cast<std::uint32_t>(g >> 32),
        static_cast<std::uint32_t>(key.phase_index), static_cast<std::uint32_t>(run_index),
        static_cast<std::uint32_t>(static_cast<std::uint64_t>(run_index) >> 32),
    };
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = bounded(rng, i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

void add_diff(Snapshot& acc, const Snapshot& x, const Snapshot& first) {
    acc.V += x.V - first.V;
    acc.V_E += x.V_E - first.V_E;
    acc.V_I += x.V_I - first.V_I;
    acc.alpha += x.alpha - first.alpha;
    acc.alpha_mack += x.alpha_mack - first.alpha_mack;
    acc.alpha_hall += x.alpha_hall - first.alpha_hall;
}

void finish_mean(Snapshot& out, const Snapshot& acc, double n) {
    out.V += acc.V / n;
    out.V_E += acc.V_E / n;
    out.V_I += acc.V_I / n;
    out.alpha += acc.alpha / n;
    out.alpha_mack += acc.alpha_mack / n;
    out.alpha_hall += acc.alpha_hall / n;
}

Snapshot as_snapshot(const StimulusState& s) { return {s.V, s.V_E, s.V_I, s.alpha, s.alpha_mack, s.alpha_hall}; }

// Mean over runs as first + sum(x - first) / n, accumulated in run order, so
// identical runs reproduce their common value exactly.
class Averager {
public:
    Averager(const RunBuffers& first, std::size_t runs) : mean_(first), runs_(runs) {
        auto zero = [](const std::vector<std::vector<Snapshot>>& v) {
            std::vector<std::vector<Snapshot>> out(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) out[i].assign(v[i].size(), Snapshot{});
            return out;
        };
        acc_stimuli_ = zero(first.stimuli);
        acc_compounds_ = zero(first.compounds);
        acc_types_ = zero(first.types);
        acc_states_.assign(first.states.size(), Snapshot{});
    }

    void add(const RunBuffers& run) {
        auto fold = [](std::vector<std::vector<Snapshot>>& acc, const std::vector<std::vector<Snapshot>>& x,
                       const std::vector<std::vector<Snapshot>>& first) {
            for (std::size_t i = 0; i < acc.size(); ++i) {
                for (std::size_t j = 0; j < acc[i].size(); ++j) add_diff(acc[i][j], x[i][j], first[i][j]);
            }
        };
        fold(acc_stimuli_, run.stimuli, mean_.stimuli);
        fold(acc_compounds_, run.compounds, mean_.compounds);
        fold(acc_types_, run.types, mean_.types);
        for (std::size_t i = 0; i < acc_states_.size(); ++i) {
            add_diff(acc_states_[i], as_snapshot(run.states[i]), as_snapshot(mean_.states[i]));
        }
    }

    RunBuffers finish() {
        const double n = static_cast<double>(runs_);
        auto apply = [n](std::vector<std::vector<Snapshot>>& out, const std::vector<std::vector<Snapshot>>& acc) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                for (std::size_t j = 0; j < out[i].size(); ++j) finish_mean(out[i][j], acc[i][j], n);
            }
        };
        apply(mean_.stimuli, acc_stimuli_);
        apply(mean_.compounds, acc_compounds_);
        apply(mean_.types, acc_types_);
        for (std::size_t i = 0; i < acc_states_.size(); ++i) {
            Snapshot s = as_snapshot(mean_.states[i]);
            finish_mean(s, acc_states_[i], n);
            auto& st = mean_.states[i];
            st.V = s.V;
            st.V_E = s.V_E;
            st.V_I = s.V_I;
            st.alpha = s.alpha;
            st.alpha_mack = s.alpha_mack;
            st.alpha_hall = s.alpha_hall;
        }
        return std::move(mean_);
    }

private:
    RunBuffers mean_;
    std::size_t runs_;
    std::vector<std::vector<Snapshot>> acc_stimuli_;
    std::vector<std::vector<Snapshot>> acc_compounds_;
    std::vector<std::vector<Snapshot>> acc_types_;
    std::vector<Snapshot> acc_states_;
};

unsigned worker_count(const RunOptions& options, std::size_t jobs) {
    unsigned w = options.max_workers != 0 ? options.max_workers : std::thread::hardware_concurrency();
    w = std::max(1U, w);
    return static_cast<unsigned>(std::min<std::size_t>(w, jobs));
}

struct Progress {
    std::function<void(std::size_t, std::size_t)> callback;
    std::size_t total = 0;
    std::atomic<std::size_t> done{0};

    void tick() {
        const std::size_t now = done.fetch_add(1) + 1;
        if (callback) callback(now, total);
    }
};

PhaseResult sequential_impl(const StateMap& states, const PhaseSpec& phase, const ModelParameters& params,
                            ModelKind kind, const RunOptions& options, Progress* progress) {
    const CompiledPhase compiled = compile(states, phase, params, kind);
    RunBuffers buf(compiled);
    run_order(compiled, compiled.sequence, kind, step_constants(params), options, buf);
    if (progress) progress->tick();
    return assemble(states, compiled, buf, kind, false);
}

PhaseResult randomized_impl(const StateMap& states, const PhaseSpec& phase, const ModelParameters& params,
                            ModelKind kind, const ShuffleKey& key, const RunOptions& options, Progress* progress) {
    const CompiledPhase compiled = compile(states, phase, params, kind);
    const StepConstants k = step_constants(params);
    const std::size_t runs = std::max<std::uint32_t>(1, params.num_random_runs);
    const unsigned workers = worker_count(options, runs);
    const std::size_t block = std::max<std::size_t>(64, 8 * static_cast<std::size_t>(workers));

    auto one_run = [&](std::size_t r) {
        const auto perm = permutation(compiled.sequence.size(), key, r);
        std::vector<std::uint32_t> order(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) order[i] = compiled.sequence[perm[i]];
        RunBuffers buf(compiled);
        run_order(compiled, order, kind, k, options, buf);
        if (progress) progress->tick();
        return buf;
    };

    std::optional<Averager> avg;
    for (std::size_t start = 0; start < runs; start += block) {
        const std::size_t count = std::min(block, runs - start);
        std::vector<std::optional<RunBuffers>> slots(count);
        if (workers <= 1) {
            for (std::size_t i = 0; i < count; ++i) slots[i].emplace(one_run(start + i));
        } else {
            std::exception_ptr error;
            std::mutex error_mutex;
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t i = w; i < count; i += workers) slots[i].emplace(one_run(start + i));
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            if (error) std::rethrow_exception(error);
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (!avg) {
                avg.emplace(*slots[i], runs);
            } else {
                avg->add(*slots[i]);
            }
        }
    }
    return assemble(states, compiled, avg->finish(), kind, true);
}

}  // namespace

std::vector<std::size_t> shuffled_order(const PhaseSpec& phase, const ShuffleKey& key, std::size_t run_index) {
    return permutation(phase.trial_count(), key, run_index);
}

PhaseResult run_phase_sequential(const StateMap& states, const PhaseSpec& phase, const ModelParameters& params,
                                 ModelKind kind, const RunOptions& options) {
    return sequential_impl(states, phase, params, kind, options, nullptr);
}

PhaseResult run_phase_randomized(const StateMap& states, const PhaseSpec& phase, const ModelParameters& params,
                                 ModelKind kind, const ShuffleKey& key, const RunOptions& options) {
    return randomized_impl(states, phase, params, kind, key, options, nullptr);
}

bool all_finite(const SimulationResult& result) {
    for (const auto& g : result.groups) {
        for (const auto& p : g.phases) {
            for (const auto& s : p.series) {
                for (const auto& pt : s.points) {
                    for (double v : {pt.V, pt.V_E, pt.V_I, pt.alpha, pt.alpha_mack, pt.alpha_hall}) {
                        if (!std::isfinite(v)) return false;
                    }
                }
            }
            for (const auto& [id, st] : p.final_states) {
                for (double v : {st.V, st.V_E, st.V_I, st.alpha, st.alpha_mack, st.alpha_hall}) {
                    if (!std::isfinite(v)) return false;
                }
            }
        }
    }
    return true;
}

SimulationResult run_experiment(const ExperimentSpec& spec, const ModelParameters& params, ModelKind kind,
                                const RunOptions& options) {
    (void)validate(params, kind);
    const std::size_t runs = std::max<std::uint32_t>(1, params.num_random_runs);
    Progress progress;
    progress.callback = options.progress;
    for (const auto& g : spec.groups) {
        for (const auto& p : g.phases) progress.total += p.randomized ? runs : 1;
    }

    SimulationResult result;
    result.model = kind;
    for (const auto& group : spec.groups) {
        GroupResult gr;
        gr.name = group.name;
        StateMap states;
        for (std::size_t p = 0; p < group.phases.size(); ++p) {
            const PhaseSpec& phase = group.phases[p];
            PhaseResult pr = phase.randomized
                                 ? randomized_impl(states, phase, params, kind, {options.seed, group.name, p},
                                                   options, &progress)
                                 : sequential_impl(states, phase, params, kind, options, &progress);
            states = pr.final_states;
            gr.phases.push_back(std::move(pr));
        }
        result.groups.push_back(std::move(gr));
    }
    return result;
}

}  // namespace pavsim
