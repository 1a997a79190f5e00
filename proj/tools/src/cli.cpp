#include "pavsim/cli.hpp"

#include "pavsim/design.hpp"
#include "pavsim/engine.hpp"
#include "pavsim/export.hpp"
#include "pavsim/plot.hpp"
#include "pavsim/setup.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace pavsim::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPerStimulusHelp = R"(Per-stimulus parameters (X is any stimulus name, e.g. A, B', C^2, q(AB)):
  --alpha-X α           Initial alpha of X.
  --alpha_mack-X αᴹ     Initial alpha_mack of X.
  --alpha_hall-X αᴴ     Initial alpha_hall of X.
  --saliences-X S       Salience of X.
  --habituations-X h    Accepted and ignored.

Exit status: 0 on success, 1 on invalid input, 2 on I/O failure.
Without --savefig, --print-results or --save-results, one PNG per phase is
written to a fresh temporary directory and the paths are printed.)";

struct PerStimulusFlag {
    std::string_view prefix;
    std::string_view key;  // empty: ignored flag
};

constexpr PerStimulusFlag kPerStimulusFlags[] = {
    {"--alpha_mack-", "alpha_mack_"},
    {"--alpha_hall-", "alpha_hall_"},
    {"--alpha-", "alpha_"},
    {"--saliences-", "salience_"},
    {"--habituations-", ""},
};

bool is_flag(const std::string& token) { return token.size() > 1 && token[0] == '-' && token != "-"; }

// Splits `--flag=value` into its two parts.
std::pair<std::string, std::optional<std::string>> split_inline(const std::string& token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) return {token, std::nullopt};
    return {token.substr(0, eq), token.substr(eq + 1)};
}

// Handles what CLI11 cannot express: per-stimulus flags whose names embed a
// stimulus, and the argparse-style greedy list flags whose last occurrence
// wins. Everything else is passed through.
std::vector<std::string> pre_scan(std::span<const std::string> args, Invocation& inv) {
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& token = args[i];
        if (token == "--") {
            rest.insert(rest.end(), args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
            break;
        }
        auto [name, inline_value] = split_inline(token);

        if (name == "--plot-experiments" || name == "--plot-stimuli") {
            std::vector<std::string> values;
            if (inline_value) values.push_back(*inline_value);
            while (!inline_value && i + 1 < args.size() && !is_flag(args[i + 1])) values.push_back(args[++i]);
            (name == "--plot-experiments" ? inv.plot_experiments : inv.plot_stimuli) = std::move(values);
            continue;
        }

        bool handled = false;
        for (const auto& flag : kPerStimulusFlags) {
            if (!name.starts_with(flag.prefix)) continue;
            const std::string stimulus = name.substr(flag.prefix.size());
            std::string canonical;
            try {
                canonical = parse_stimulus(stimulus).to_string();
            } catch (const ParseError&) {
                break;  // e.g. --alpha-mack, a regular flag
            }
            std::string value;
            if (inline_value) {
                value = *inline_value;
            } else if (i + 1 < args.size()) {
                value = args[++i];
            } else {
                throw UsageError(name + ": expected a value");
            }
            if (flag.key.empty()) {
                inv.warnings.push_back(name + " has no effect in any model and is ignored");
            } else {
                inv.parameters[std::string(flag.key) + canonical] = value;
            }
            handled = true;
            break;
        }
        if (!handled) rest.push_back(token);
    }
    return rest;
}

void build_app(CLI::App& app, Invocation& inv, std::optional<bool>& configural) {
    app.set_help_flag("-h,--help", "Print this help message and exit");
    app.footer(kPerStimulusHelp);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    app.add_option("experiment_file", inv.experiment_file, "Path to the .rw experiment file (- for stdin)");

    const std::string out_group = "Output parameters";
    app.add_option("--savefig", inv.savefig,
                   "Save one image per phase as filename_1.png ... filename_n.png (.svg for vector output)")
        ->type_name("filename")
        ->group(out_group);
    app.add_flag("--print-results", inv.print_results, "Print the results as CSV to standard output")
        ->group(out_group);
    app.add_option("--save-results", inv.save_results, "Save the results as CSV")
        ->type_name("filename")
        ->group(out_group);
    app.add_flag("--singular-legend", inv.singular_legend,
                 "Draw the legend in a separate image (filename_legend.png) instead of in each plot")
        ->group(out_group);
    app.add_flag("--show-title", inv.show_title, "Title each image with its phase")->group(out_group);
    app.add_option("--dpi", inv.dpi, "Dots per inch")->check(CLI::PositiveNumber)->group(out_group);
    app.add_option("--output-width", inv.output_width, "Width of the output in inches")
        ->check(CLI::PositiveNumber)
        ->group(out_group);

    const std::string plot_group = "Plotting parameters";
    app.add_option("--plot-phase", inv.plot_phase, "Plot a single phase (1-based)")
        ->type_name("phase_num")
        ->check(CLI::PositiveNumber)
        ->group(plot_group);
    // Consumed by pre_scan; declared here for the help text.
    app.add_option("--plot-experiments", "List of groups to plot")->type_name("[group ...]")->group(plot_group);
    app.add_option("--plot-stimuli", "List of stimuli, compound and simple, to plot")
        ->type_name("[conditioned_stimulus ...]")
        ->group(plot_group);
    app.add_flag("--plot-alpha,!--no-plot-alpha", inv.plot_alpha, "Plot alpha instead of V")->group(plot_group);
    app.add_flag("--plot-macknhall,!--no-plot-macknhall", inv.plot_macknhall, "Plot alpha_mack and alpha_hall")
        ->group(plot_group);
    app.add_flag("--plot-alphas,!--no-plot-alphas", inv.plot_alphas, "Plot alpha, alpha_mack and alpha_hall")
        ->group(plot_group);
    app.add_flag("--part-stimuli,!--no-part-stimuli", inv.part_stimuli,
                 "Also plot one series per trial type (stimuli with their US)")
        ->group(plot_group);

    const std::string model_group = "Experiment parameters";
    std::vector<std::string> names;
    for (ModelKind k : all_models()) names.emplace_back(model_name(k));
    app.add_option("--adaptive-type", inv.model, "Model to simulate")
        ->check(CLI::IsMember(names))
        ->group(model_group);

    struct Param {
        const char* flag;
        const char* key;
        const char* symbol;
        const char* help;
    };
    static constexpr Param params[] = {
        {"--alpha", "alpha", "α", "Alpha of stimuli without their own value"},
        {"--alpha-mack", "alpha_mack", "αᴹ", "Alpha_mack of stimuli without their own value"},
        {"--alpha-hall", "alpha_hall", "αᴴ", "Alpha_hall of stimuli without their own value"},
        {"--beta", "beta", "β⁺", "US learning rate on reinforced trials"},
        {"--beta-neg", "betan", "β⁻", "Learning rate on non-reinforced trials; follows --beta unless set here or in the file"},
        {"--lamda", "lambda", "λ", "Asymptote of learning"},
        {"--gamma", "gamma", "γ", "Weight of the latest prediction error in Hall-style alpha updates"},
        {"--thetaE", "thetaE", "θᴱ", "Rate of excitatory attention change"},
        {"--thetaI", "thetaI", "θᴵ", "Rate of inhibitory attention change"},
        {"--salience", "salience", "S", "Salience of stimuli without their own value"},
        {"--decay", "decay", "d", "Attention decay constant of the MLAB model"},
        {"--num-trials", "num_trials", "№", "Number of random orders averaged in randomised phases"},
    };
    for (const auto& p : params) {
        app.add_option_function<std::string>(
               p.flag, [&inv, key = p.key](const std::string& v) { inv.parameters[key] = v; }, p.help)
            ->type_name(p.symbol)
            ->group(model_group);
    }
    static constexpr const char* ignored[] = {"--habituation", "--xi-hall", "--rho", "--nu", "--kay"};
    for (const char* flag : ignored) {
        app.add_option_function<std::string>(
               flag,
               [&inv, flag](const std::string&) {
                   inv.warnings.push_back(std::string(flag) + " has no effect in any model and is ignored");
               },
               "Accepted and ignored")
            ->group(model_group);
    }
    app.add_flag("--configural-cues,!--no-configural-cues", configural, "Add a configural cue to every compound")
        ->group(model_group);
    app.add_option("--max-workers", inv.max_workers, "Worker threads for randomised phases (0: all cores)")
        ->group(model_group);
    app.add_option("--seed", inv.seed, "Seed of the trial-order shuffles")->group(model_group);
}

std::string read_all(std::istream& in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Series names as the engine writes them: canonical stimuli, compounds in
// sorted order, trial types as given.
void add_series_names(std::set<std::string>& only, const std::string& requested) {
    only.insert(requested);
    try {
        only.insert(parse_stimulus(requested).to_string());
        return;
    } catch (const ParseError&) {
    }
    try {
        const bool has_outcome = !requested.empty() && (requested.back() == '+' || requested.back() == '-');
        const PhaseSpec p = parse_phase(has_outcome ? requested : requested + "+");
        if (p.items.size() != 1) return;
        const TrialSpec& t = p.items[0].trial;
        only.insert(has_outcome ? t.to_string() : join_names(t.sorted_stimuli()));
    } catch (const ParseError&) {
    }
}

fs::path fresh_temp_dir() {
    std::string pattern = (fs::temp_directory_path() / "pavsim-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) {
        throw fs::filesystem_error("cannot create a temporary directory", pattern,
                                   std::error_code(errno, std::generic_category()));
    }
    return pattern;
}

std::pair<fs::path, ImageFormat> figure_base(const std::string& savefig) {
    fs::path base(savefig);
    std::string ext = base.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".svg") return {base.replace_extension(), ImageFormat::Svg};
    if (ext == ".png") base.replace_extension();
    return {base, ImageFormat::Png};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) {
        throw fs::filesystem_error("cannot write file", path, std::make_error_code(std::errc::io_error));
    }
}

}  // namespace

Invocation parse_arguments(std::span<const std::string> args) {
    Invocation inv;
    std::vector<std::string> rest = pre_scan(args, inv);
    CLI::App app{"Simulate Pavlovian conditioning experiments.", "pavsim"};
    std::optional<bool> configural;
    build_app(app, inv, configural);
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        inv.help = true;
        return inv;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (configural) inv.parameters["configural_cues"] = *configural ? "true" : "false";
    return inv;
}

std::string usage() {
    Invocation inv;
    std::optional<bool> configural;
    CLI::App app{"Simulate Pavlovian conditioning experiments.", "pavsim"};
    build_app(app, inv, configural);
    return app.help();
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
    if (inv.help) {
        out << usage();
        return Ok;
    }
    for (const auto& w : inv.warnings) err << "warning: " << w << '\n';
    if (!inv.experiment_file) {
        err << "error: no experiment file given (see --help)\n";
        return InvalidInput;
    }
    const std::string& path = *inv.experiment_file;

    std::string text;
    if (path == "-") {
        text = read_all(std::cin);
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            err << "error: cannot open " << path << '\n';
            return IoFailure;
        }
        text = read_all(in);
    }

    try {
        std::vector<Diagnostic> diagnostics;
        ExperimentSpec spec = parse_rw_file(text, &diagnostics);
        for (const auto& d : diagnostics) err << "warning: " << path << ": " << d.message << '\n';

        std::map<std::string, std::string> overrides = inv.parameters;
        if (overrides.contains("beta") && !overrides.contains("betan") && !spec.parameters.contains("betan")) {
            overrides["betan"] = overrides["beta"];
        }
        const SimulationSetup setup = resolve_setup(std::move(spec), inv.model, overrides);
        for (const auto& w : setup.warnings) err << "warning: " << w << '\n';

        RunOptions options;
        options.seed = inv.seed;
        options.max_workers = inv.max_workers;
        const SimulationResult result = run_experiment(setup.spec, setup.params, setup.model, options);
        if (!all_finite(result)) {
            err << "warning: the model diverged; some values are inf or nan\n";
        }

        SeriesFilter filter;
        filter.trial_types = inv.part_stimuli;
        filter.groups.insert(inv.plot_experiments.begin(), inv.plot_experiments.end());
        for (const auto& s : inv.plot_stimuli) add_series_names(filter.only, s);
        filter.phase = inv.plot_phase;

        const std::string csv = export_csv(result, filter);
        if (inv.print_results) out << csv;
        if (inv.save_results) write_file(*inv.save_results, csv);

        const bool plots = inv.savefig || (!inv.print_results && !inv.save_results);
        if (plots) {
            PlotOptions plot;
            plot.filter = filter;
            plot.show_title = inv.show_title;
            plot.separate_legend = inv.singular_legend;
            plot.dpi = inv.dpi;
            plot.width_inches = inv.output_width;
            if (inv.plot_alphas) {
                plot.quantity = PlotQuantity::AllAlphas;
            } else if (inv.plot_macknhall) {
                plot.quantity = PlotQuantity::AlphaMackHall;
            } else if (inv.plot_alpha) {
                plot.quantity = PlotQuantity::Alpha;
            }
            fs::path base;
            if (inv.savefig) {
                std::tie(base, plot.format) = figure_base(*inv.savefig);
            } else {
                base = fresh_temp_dir() / "phase";
            }
            for (const auto& p : save_phase_plots(result, base, plot)) out << p.string() << '\n';
        }
    } catch (const ParseError& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return InvalidInput;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return IoFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return InvalidInput;
    }
    return Ok;
}

int main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    Invocation inv;
    try {
        inv = parse_arguments(args);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nRun with --help for usage.\n";
        return InvalidInput;
    }
    return run(inv, out, err);
}

}  // namespace pavsim::cli
