#include "pavsim/service.hpp"

#include "pavsim/design.hpp"
#include "pavsim/engine.hpp"
#include "pavsim/export.hpp"
#include "pavsim/setup.hpp"

#include "json.hpp"

#include <cmath>
#include <set>

namespace pavsim {

using nlohmann::json;

namespace {

struct BadRequest {
    std::string message;
};

Reply json_reply(int status, const json& body) {
    return {status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace)};
}

Reply error_reply(int status, const std::vector<FieldIssue>& issues) {
    json errors = json::array();
    for (const auto& i : issues) errors.push_back({{"field", i.field}, {"message", i.message}});
    return json_reply(status, {{"errors", errors}});
}

Reply error_reply(int status, std::string field, std::string message) {
    return error_reply(status, {{std::move(field), std::move(message)}});
}

json parse_body(std::string_view body) {
    json doc = json::parse(body.begin(), body.end(), nullptr, false);
    if (doc.is_discarded()) throw BadRequest{"request body is not valid JSON"};
    if (!doc.is_object()) throw BadRequest{"request body must be a JSON object"};
    return doc;
}

std::string scalar_text(const json& v, const std::string& field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return v.dump();
    if (v.is_number_float()) return format_number(v.get<double>());
    throw ValidationError(field, "expected a number, string or boolean");
}

ValidationError parse_issue(const std::string& field, const ParseError& e) {
    return ValidationError(field, std::string(e.what()) + " (offset " + std::to_string(e.offset()) + ")");
}

ExperimentSpec read_experiment(const json& v) {
    if (v.is_string()) {
        try {
            return parse_rw_file(v.get<std::string>());
        } catch (const ParseError& e) {
            throw parse_issue("experiment", e);
        }
    }
    if (!v.is_object()) throw ValidationError("experiment", "expected .rw text or an object");
    if (auto rw = v.find("rw"); rw != v.end()) {
        if (!rw->is_string()) throw ValidationError("experiment.rw", "expected a string");
        try {
            return parse_rw_file(rw->get<std::string>());
        } catch (const ParseError& e) {
            throw parse_issue("experiment.rw", e);
        }
    }
    ExperimentSpec spec;
    const auto groups = v.find("groups");
    if (groups == v.end() || !groups->is_array()) {
        throw ValidationError("experiment.groups", "expected an array of groups");
    }
    std::vector<FieldIssue> issues;
    for (std::size_t g = 0; g < groups->size(); ++g) {
        const json& group = (*groups)[g];
        const std::string where = "experiment.groups[" + std::to_string(g) + "]";
        if (!group.is_object() || !group.contains("name") || !group["name"].is_string()) {
            issues.push_back({where + ".name", "expected a string"});
            continue;
        }
        GroupSpec gs;
        gs.name = group["name"].get<std::string>();
        if (gs.name.empty()) issues.push_back({where + ".name", "group name is empty"});
        for (const auto& other : spec.groups) {
            if (other.name == gs.name) issues.push_back({where + ".name", "duplicate group name '" + gs.name + "'"});
        }
        const json phases = group.value("phases", json::array());
        if (!phases.is_array()) {
            issues.push_back({where + ".phases", "expected an array of phase strings"});
            continue;
        }
        for (std::size_t p = 0; p < phases.size(); ++p) {
            const std::string field = where + ".phases[" + std::to_string(p) + "]";
            if (!phases[p].is_string()) {
                issues.push_back({field, "expected a string"});
                continue;
            }
            try {
                gs.phases.push_back(parse_phase(phases[p].get<std::string>()));
            } catch (const ParseError& e) {
                issues.push_back({field, e.detail() + " (offset " + std::to_string(e.offset()) + ")"});
            }
        }
        spec.groups.push_back(std::move(gs));
    }
    if (auto params = v.find("parameters"); params != v.end()) {
        if (!params->is_object()) {
            issues.push_back({"experiment.parameters", "expected an object"});
        } else {
            for (const auto& [key, value] : params->items()) {
                try {
                    spec.parameters[key] = scalar_text(value, "experiment.parameters." + key);
                } catch (const ValidationError& e) {
                    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
                }
            }
        }
    }
    if (auto model = v.find("model"); model != v.end() && model->is_string()) {
        spec.model_name = model->get<std::string>();
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    spec.pad_phases();
    return spec;
}

struct Request {
    ExperimentSpec spec;
    std::optional<std::string> model;
    std::map<std::string, std::string> overrides;
    std::uint64_t seed = 0;
    std::optional<std::string> request_id;
    SeriesFilter filter;
    /// Override keys that came from `options` rather than `parameters`.
    std::set<std::string> option_keys;
};

SeriesFilter read_filter(const json& v) {
    SeriesFilter f;
    if (!v.is_object()) throw ValidationError("filter", "expected an object");
    auto flag = [&](const char* key, bool& target) {
        if (auto it = v.find(key); it != v.end()) {
            if (!it->is_boolean()) throw ValidationError(std::string("filter.") + key, "expected a boolean");
            target = it->get<bool>();
        }
    };
    flag("stimuli", f.stimuli);
    flag("configural", f.configural);
    flag("compounds", f.compounds);
    flag("trial_types", f.trial_types);
    auto names = [&](const char* key, std::set<std::string>& target) {
        if (auto it = v.find(key); it != v.end()) {
            if (!it->is_array()) throw ValidationError(std::string("filter.") + key, "expected an array");
            for (const auto& n : *it) {
                if (!n.is_string()) throw ValidationError(std::string("filter.") + key, "expected strings");
                target.insert(n.get<std::string>());
            }
        }
    };
    names("only", f.only);
    names("hidden", f.hidden);
    names("groups", f.groups);
    if (auto it = v.find("phase"); it != v.end() && !it->is_null()) {
        if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0) {
            throw ValidationError("filter.phase", "expected a phase number >= 1");
        }
        f.phase = it->get<std::size_t>();
    }
    return f;
}

Request read_request(const json& doc) {
    Request r;
    const auto experiment = doc.find("experiment");
    if (experiment == doc.end()) throw ValidationError("experiment", "missing");
    r.spec = read_experiment(*experiment);
    if (auto m = doc.find("model"); m != doc.end() && !m->is_null()) {
        if (!m->is_string()) throw ValidationError("model", "expected a model name");
        r.model = m->get<std::string>();
    }
    std::vector<FieldIssue> issues;
    if (auto p = doc.find("parameters"); p != doc.end() && !p->is_null()) {
        if (!p->is_object()) throw ValidationError("parameters", "expected an object");
        for (const auto& [key, value] : p->items()) {
            try {
                r.overrides[key] = scalar_text(value, "parameters." + key);
            } catch (const ValidationError& e) {
                issues.insert(issues.end(), e.issues().begin(), e.issues().end());
            }
        }
    }
    if (auto o = doc.find("options"); o != doc.end() && !o->is_null()) {
        if (!o->is_object()) throw ValidationError("options", "expected an object");
        if (auto c = o->find("configural_cues"); c != o->end()) {
            if (c->is_boolean()) {
                r.overrides["configural_cues"] = c->get<bool>() ? "true" : "false";
                r.option_keys.insert("configural_cues");
            } else {
                issues.push_back({"options.configural_cues", "expected a boolean"});
            }
        }
        if (auto n = o->find("num_random_runs"); n != o->end()) {
            if (n->is_number_unsigned() && n->get<std::uint64_t>() >= 1) {
                r.overrides["num_trials"] = n->dump();
                r.option_keys.insert("num_trials");
            } else {
                issues.push_back({"options.num_random_runs", "expected an integer >= 1"});
            }
        }
        if (auto s = o->find("seed"); s != o->end()) {
            if (s->is_number_unsigned()) {
                r.seed = s->get<std::uint64_t>();
            } else {
                issues.push_back({"options.seed", "expected a non-negative integer"});
            }
        }
    }
    if (auto id = doc.find("request_id"); id != doc.end() && !id->is_null()) {
        if (id->is_string()) {
            r.request_id = id->get<std::string>();
        } else {
            issues.push_back({"request_id", "expected a string"});
        }
    }
    if (auto f = doc.find("filter"); f != doc.end() && !f->is_null()) {
        r.filter = read_filter(*f);
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return r;
}

// Validation names parameters by bare key; point each issue at the part of
// the request that supplied the value.
std::vector<FieldIssue> prefixed(const ValidationError& e, const Request& r) {
    std::vector<FieldIssue> out;
    for (auto issue : e.issues()) {
        const std::string& key = issue.field;
        if (r.option_keys.contains(key)) {
            issue.field = key == "num_trials" ? "options.num_random_runs" : "options." + key;
        } else if (r.overrides.contains(key)) {
            issue.field = "parameters." + key;
        } else if (key != "model") {
            issue.field = "experiment.parameters." + key;
        }
        out.push_back(std::move(issue));
    }
    return out;
}

json experiment_json(const ExperimentSpec& spec) {
    json groups = json::array();
    for (const auto& g : spec.groups) {
        json phases = json::array();
        for (const auto& p : g.phases) phases.push_back(serialize_phase(p));
        groups.push_back({{"name", g.name}, {"phases", std::move(phases)}});
    }
    return {{"groups", std::move(groups)},
            {"parameters", spec.parameters},
            {"model", spec.model_name ? json(*spec.model_name) : json(nullptr)}};
}

json series_json(const Series& s) {
    json fields = json::array();
    json out = {{"name", s.name}, {"kind", series_kind_name(s.kind)}};
    auto add = [&](FieldMask f, const char* key, double Snapshot::*member) {
        if (!(s.fields & f)) return;
        fields.push_back(key);
        json values = json::array();
        for (const auto& p : s.points) values.push_back(p.*member);
        out[key] = std::move(values);
    };
    add(FieldV, "V", &Snapshot::V);
    add(FieldVE, "V_E", &Snapshot::V_E);
    add(FieldVI, "V_I", &Snapshot::V_I);
    add(FieldAlpha, "alpha", &Snapshot::alpha);
    add(FieldAlphaMack, "alpha_mack", &Snapshot::alpha_mack);
    add(FieldAlphaHall, "alpha_hall", &Snapshot::alpha_hall);
    out["fields"] = std::move(fields);
    return out;
}

json state_json(const StimulusState& s, FieldMask fields) {
    json out = json::object();
    if (fields & FieldV) out["V"] = s.V;
    if (fields & FieldVE) out["V_E"] = s.V_E;
    if (fields & FieldVI) out["V_I"] = s.V_I;
    if (fields & FieldAlpha) out["alpha"] = s.alpha;
    if (fields & FieldAlphaMack) out["alpha_mack"] = s.alpha_mack;
    if (fields & FieldAlphaHall) out["alpha_hall"] = s.alpha_hall;
    return out;
}

json result_json(const SimulationResult& result, const SimulationSetup& setup) {
    json groups = json::array();
    const FieldMask fields = tracked_fields(result.model);
    for (const auto& g : result.groups) {
        json phases = json::array();
        for (std::size_t p = 0; p < g.phases.size(); ++p) {
            const auto& ph = g.phases[p];
            json series = json::array();
            for (const auto& s : ph.series) series.push_back(series_json(s));
            json finals = json::object();
            for (const auto& [id, st] : ph.final_states) finals[id.to_string()] = state_json(st, fields);
            phases.push_back({{"index", p + 1},
                              {"randomized", ph.randomized},
                              {"trial_count", ph.trial_count},
                              {"series", std::move(series)},
                              {"final_states", std::move(finals)}});
        }
        groups.push_back({{"name", g.name}, {"phases", std::move(phases)}});
    }
    json enabled = json::object();
    for (const auto& info : parameter_table()) enabled[std::string(info.key)] = is_enabled(setup.model, info.param);
    return {{"model", model_name(setup.model)},
            {"warnings", setup.warnings},
            {"enabled_parameters", std::move(enabled)},
            {"groups", std::move(groups)}};
}

json bounds_json(const Bounds& b) {
    json out = json::object();
    out["min"] = b.min ? json(*b.min) : json(nullptr);
    out["max"] = b.max ? json(*b.max) : json(nullptr);
    out["min_exclusive"] = b.min_exclusive;
    return out;
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}

Reply Service::run(std::string_view body, Output output) {
    Request request;
    std::shared_ptr<std::atomic<bool>> token;
    try {
        request = read_request(parse_body(body));
        SimulationSetup setup;
        try {
            setup = resolve_setup(std::move(request.spec), request.model, request.overrides);
        } catch (const ValidationError& e) {
            return error_reply(422, prefixed(e, request));
        }
        const std::size_t stimuli = count_stimuli(setup.spec, setup.params.configural_cues);
        if (stimuli > config_.max_stimuli) {
            return error_reply(422, "experiment",
                               "design uses " + std::to_string(stimuli) + " stimuli; the limit is " +
                                   std::to_string(config_.max_stimuli) +
                                   ". Run it with the command-line tool, where --max-workers spreads the work");
        }
        bool randomized = false;
        for (const auto& g : setup.spec.groups) {
            for (const auto& p : g.phases) randomized = randomized || p.randomized;
        }
        if (randomized && setup.params.num_random_runs > config_.max_random_runs) {
            return error_reply(422, "options.num_random_runs",
                               "at most " + std::to_string(config_.max_random_runs) +
                                   " randomised runs per request; lower the number of runs or use the "
                                   "command-line tool with --max-workers");
        }
        RunOptions options;
        options.seed = request.seed;
        options.max_workers = config_.max_workers;
        if (request.request_id) {
            token = std::make_shared<std::atomic<bool>>(false);
            std::lock_guard lock(mutex_);
            in_flight_[*request.request_id] = token;
        }
        options.cancel = token.get();
        SimulationResult result;
        try {
            result = run_experiment(setup.spec, setup.params, setup.model, options);
        } catch (...) {
            if (token) {
                std::lock_guard lock(mutex_);
                if (in_flight_[*request.request_id] == token) in_flight_.erase(*request.request_id);
            }
            throw;
        }
        if (token) {
            std::lock_guard lock(mutex_);
            if (in_flight_[*request.request_id] == token) in_flight_.erase(*request.request_id);
        }
        if (!all_finite(result)) {
            return error_reply(422, "result", "the simulation produced non-finite values; check the parameters");
        }
        if (output == Output::Csv) {
            return {200, "text/csv", pavsim::export_csv(result, request.filter)};
        }
        return json_reply(200, result_json(result, setup));
    } catch (const BadRequest& e) {
        return error_reply(400, "", e.message);
    } catch (const ValidationError& e) {
        return error_reply(422, e.issues());
    } catch (const Cancelled&) {
        return error_reply(409, "request_id", "simulation cancelled");
    } catch (const std::exception& e) {
        return error_reply(500, "", e.what());
    }
}

Reply Service::simulate(std::string_view body) { return run(body, Output::Json); }

Reply Service::export_csv(std::string_view body) { return run(body, Output::Csv); }

Reply Service::parse_phase(std::string_view body) const {
    try {
        const json doc = parse_body(body);
        const auto text = doc.find("text");
        if (text == doc.end() || !text->is_string()) return error_reply(422, "text", "expected a string");
        std::vector<Diagnostic> warnings;
        PhaseSpec phase;
        try {
            phase = pavsim::parse_phase(text->get<std::string>(), &warnings);
        } catch (const ParseError& e) {
            json err = {{"field", "text"}, {"message", e.detail()}, {"offset", e.offset()}};
            return json_reply(422, {{"errors", json::array({err})}});
        }
        json trials = json::array();
        for (const auto& item : phase.items) {
            json stimuli = json::array();
            for (const auto& id : item.trial.stimuli) stimuli.push_back(id.to_string());
            trials.push_back({{"repeat", item.repeat},
                              {"stimuli", std::move(stimuli)},
                              {"us", outcome_symbol(item.trial.outcome)},
                              {"text", item.trial.to_string()}});
        }
        json warn = json::array();
        for (const auto& w : warnings) warn.push_back({{"offset", w.offset}, {"message", w.message}});
        return json_reply(200, {{"randomized", phase.randomized},
                                {"beta", phase.beta_override ? json(*phase.beta_override) : json(nullptr)},
                                {"lambda", phase.lambda_override ? json(*phase.lambda_override) : json(nullptr)},
                                {"trials", std::move(trials)},
                                {"trial_count", phase.trial_count()},
                                {"canonical", serialize_phase(phase)},
                                {"warnings", std::move(warn)}});
    } catch (const BadRequest& e) {
        return error_reply(400, "", e.message);
    } catch (const std::exception& e) {
        return error_reply(500, "", e.what());
    }
}

Reply Service::parse_rw(std::string_view body) const {
    try {
        const json doc = parse_body(body);
        const auto text = doc.find("text");
        if (text == doc.end() || !text->is_string()) return error_reply(422, "text", "expected a string");
        std::vector<Diagnostic> warnings;
        ExperimentSpec spec;
        try {
            spec = parse_rw_file(text->get<std::string>(), &warnings);
        } catch (const ParseError& e) {
            json err = {{"field", "text"}, {"message", e.detail()}, {"offset", e.offset()}};
            err["line"] = e.line() ? json(*e.line()) : json(nullptr);
            err["cell"] = e.cell() ? json(*e.cell()) : json(nullptr);
            return json_reply(422, {{"errors", json::array({err})}});
        }
        spec.pad_phases();
        json out = experiment_json(spec);
        json warn = json::array();
        for (const auto& w : warnings) warn.push_back(w.message);
        out["warnings"] = std::move(warn);
        return json_reply(200, out);
    } catch (const BadRequest& e) {
        return error_reply(400, "", e.message);
    } catch (const std::exception& e) {
        return error_reply(500, "", e.what());
    }
}

Reply Service::serialize_rw(std::string_view body) const {
    try {
        const json doc = parse_body(body);
        const auto experiment = doc.find("experiment");
        if (experiment == doc.end()) return error_reply(422, "experiment", "missing");
        const ExperimentSpec spec = read_experiment(*experiment);
        try {
            return {200, "text/plain; charset=utf-8", serialize_rw_file(spec)};
        } catch (const std::invalid_argument& e) {
            return error_reply(422, "experiment.groups", e.what());
        }
    } catch (const BadRequest& e) {
        return error_reply(400, "", e.message);
    } catch (const ValidationError& e) {
        return error_reply(422, e.issues());
    } catch (const std::exception& e) {
        return error_reply(500, "", e.what());
    }
}

Reply Service::models() const {
    json list = json::array();
    for (ModelKind kind : all_models()) {
        const ModelParameters defaults = model_defaults(kind);
        json enabled = json::array();
        json values = json::object();
        json bounds = json::object();
        for (const auto& info : parameter_table()) {
            const std::string key(info.key);
            if (is_enabled(kind, info.param)) enabled.push_back(key);
            values[key] = defaults.get(info.param);
            const ParamBounds b = parameter_bounds(kind, info.param);
            bounds[key] = {{"hard", bounds_json(b.hard)}, {"soft", bounds_json(b.soft)}};
        }
        json params = json::array();
        for (const auto& info : parameter_table()) {
            params.push_back({{"key", info.key}, {"symbol", info.symbol}, {"description", info.description}});
        }
        list.push_back({{"name", model_name(kind)},
                        {"enabled", std::move(enabled)},
                        {"defaults", std::move(values)},
                        {"bounds", std::move(bounds)},
                        {"parameters", std::move(params)}});
    }
    return json_reply(200, {{"models", std::move(list)}});
}

Reply Service::cancel(std::string_view body) {
    try {
        const json doc = parse_body(body);
        const auto id = doc.find("request_id");
        if (id == doc.end() || !id->is_string()) return error_reply(422, "request_id", "expected a string");
        bool found = false;
        {
            std::lock_guard lock(mutex_);
            if (auto it = in_flight_.find(id->get<std::string>()); it != in_flight_.end()) {
                it->second->store(true);
                found = true;
            }
        }
        return json_reply(200, {{"cancelled", found}});
    } catch (const BadRequest& e) {
        return error_reply(400, "", e.message);
    }
}

Reply Service::handle(std::string_view method, std::string_view path, std::string_view body) {
    struct Route {
        std::string_view path;
        std::string_view method;
    };
    static constexpr Route routes[] = {
        {"/v1/simulate", "POST"}, {"/v1/export", "POST"},    {"/v1/parse-phase", "POST"}, {"/v1/parse-rw", "POST"},
        {"/v1/serialize", "POST"}, {"/v1/models", "GET"}, {"/v1/cancel", "POST"},
    };
    for (const auto& r : routes) {
        if (r.path != path) continue;
        if (r.method != method) return error_reply(405, "", "method not allowed");
        if (path == "/v1/simulate") return simulate(body);
        if (path == "/v1/export") return export_csv(body);
        if (path == "/v1/parse-phase") return parse_phase(body);
        if (path == "/v1/parse-rw") return parse_rw(body);
        if (path == "/v1/serialize") return serialize_rw(body);
        if (path == "/v1/models") return models();
        return cancel(body);
    }
    return error_reply(404, "", "no such endpoint");
}

}  // namespace pavsim
