#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pavsim::cli {

enum Exit : int { Ok = 0, InvalidInput = 1, IoFailure = 2 };

/// Bad command line. Maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Invocation {
    /// `-` reads the design from standard input.
    std::optional<std::string> experiment_file;

    std::optional<std::string> savefig;
    bool print_results = false;
    std::optional<std::string> save_results;
    bool singular_legend = false;
    bool show_title = false;
    double dpi = 100.0;
    /// Inches; the image is `output_width * dpi` pixels wide.
    double output_width = 8.0;

    std::optional<std::size_t> plot_phase;
    std::vector<std::string> plot_experiments;
    std::vector<std::string> plot_stimuli;
    bool plot_alpha = false;
    bool plot_macknhall = false;
    bool plot_alphas = false;
    bool part_stimuli = false;

    std::optional<std::string> model;
    /// Parameter overrides in `.rw` key vocabulary, e.g. `lambda`, `alpha_B'`.
    std::map<std::string, std::string> parameters;
    unsigned max_workers = 0;
    std::uint64_t seed = 0;

    std::vector<std::string> warnings;
    bool help = false;
};

/// Parses arguments (without the program name). A flag given twice keeps
/// its last value. Throws UsageError.
[[nodiscard]] Invocation parse_arguments(std::span<const std::string> args);

[[nodiscard]] std::string usage();

/// Runs an invocation; returns the process exit code.
int run(const Invocation& invocation, std::ostream& out, std::ostream& err);

/// parse_arguments + run, reporting usage errors on `err`.
int main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pavsim::cli
