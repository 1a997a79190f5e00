#include "pavsim/cli.hpp"
#include "pavsim/export.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pavsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::main(args, out, err);
    return {code, out.str(), err.str()};
}

cli::Invocation parse(std::vector<std::string> args) { return cli::parse_arguments(args); }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("pavsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name, std::ios::binary) << content;
        return path / name;
    }
};

}  // namespace

TEST(CliArgs, Defaults) {
    const auto inv = parse({"design.rw"});
    EXPECT_EQ(inv.experiment_file, "design.rw");
    EXPECT_FALSE(inv.print_results);
    EXPECT_EQ(inv.dpi, 100.0);
    EXPECT_EQ(inv.output_width, 8.0);
    EXPECT_TRUE(inv.parameters.empty());
    EXPECT_FALSE(inv.model.has_value());
}

TEST(CliArgs, LastOccurrenceWins) {
    const auto inv = parse({"x.rw", "--lamda", "0.5", "--dpi", "50", "--lamda", "0.9", "--dpi=70", "--adaptive-type",
                            "Pearce Kaye Hall", "--adaptive-type", "MLAB Model", "--plot-stimuli", "A", "B",
                            "--plot-stimuli", "C"});
    EXPECT_EQ(inv.parameters.at("lambda"), "0.9");
    EXPECT_EQ(inv.dpi, 70.0);
    EXPECT_EQ(inv.model, "MLAB Model");
    EXPECT_EQ(inv.plot_stimuli, std::vector<std::string>{"C"});
}

TEST(CliArgs, FlagPairs) {
    EXPECT_TRUE(parse({"x.rw", "--plot-alpha"}).plot_alpha);
    EXPECT_FALSE(parse({"x.rw", "--plot-alpha", "--no-plot-alpha"}).plot_alpha);
    EXPECT_TRUE(parse({"x.rw", "--no-part-stimuli", "--part-stimuli"}).part_stimuli);
    EXPECT_EQ(parse({"x.rw", "--configural-cues"}).parameters.at("configural_cues"), "true");
    EXPECT_EQ(parse({"x.rw", "--configural-cues", "--no-configural-cues"}).parameters.at("configural_cues"), "false");
    EXPECT_FALSE(parse({"x.rw"}).parameters.contains("configural_cues"));
}

TEST(CliArgs, ParameterFlagsUseFileKeys) {
    const auto inv = parse({"x.rw", "--alpha", "0.2", "--alpha-mack", "0.3", "--alpha-hall", "0.6", "--beta", "0.4",
                            "--beta-neg", "0.1", "--gamma", "0.2", "--thetaE", "0.5", "--thetaI", "0.05",
                            "--salience", "0.3", "--decay", "0.1", "--num-trials", "40"});
    const std::map<std::string, std::string> expected = {
        {"alpha", "0.2"},  {"alpha_mack", "0.3"}, {"alpha_hall", "0.6"}, {"beta", "0.4"},
        {"betan", "0.1"},  {"gamma", "0.2"},      {"thetaE", "0.5"},     {"thetaI", "0.05"},
        {"salience", "0.3"}, {"decay", "0.1"},    {"num_trials", "40"},
    };
    EXPECT_EQ(inv.parameters, expected);
}

TEST(CliArgs, PerStimulusFlags) {
    const auto inv = parse({"x.rw", "--alpha-B", "0.4", "--alpha_mack-C'", "0.2", "--alpha_hall-D^2=0.7",
                            "--saliences-A", "0.5", "--habituations-A", "1", "--alpha-B", "0.45"});
    EXPECT_EQ(inv.parameters.at("alpha_B"), "0.45");
    EXPECT_EQ(inv.parameters.at("alpha_mack_C'"), "0.2");
    EXPECT_EQ(inv.parameters.at("alpha_hall_D^2"), "0.7");
    EXPECT_EQ(inv.parameters.at("salience_A"), "0.5");
    EXPECT_EQ(inv.warnings.size(), 1u);
}

TEST(CliArgs, IgnoredFlagsWarn) {
    const auto inv = parse({"x.rw", "--rho", "1", "--nu", "2", "--kay", "3", "--xi-hall", "4", "--habituation", "5"});
    EXPECT_EQ(inv.warnings.size(), 5u);
    EXPECT_TRUE(inv.parameters.empty());
}

TEST(CliArgs, UsageErrors) {
    EXPECT_THROW((void)parse({"x.rw", "--adaptive-type", "Bogus"}), cli::UsageError);
    EXPECT_THROW((void)parse({"x.rw", "--dpi", "-3"}), cli::UsageError);
    EXPECT_THROW((void)parse({"x.rw", "--frobnicate"}), cli::UsageError);
    EXPECT_THROW((void)parse({"x.rw", "--alpha-B"}), cli::UsageError);
    EXPECT_THROW((void)parse({"x.rw", "--plot-phase", "0"}), cli::UsageError);
}

TEST(CliArgs, HelpListsEveryFlag) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* flag :
         {"--savefig", "--print-results", "--save-results", "--singular-legend", "--show-title", "--dpi",
          "--output-width", "--plot-phase", "--plot-experiments", "--plot-stimuli", "--plot-alpha",
          "--plot-macknhall", "--plot-alphas", "--part-stimuli", "--adaptive-type", "--alpha", "--alpha-mack",
          "--alpha-hall", "--beta", "--beta-neg", "--lamda", "--gamma", "--thetaE", "--thetaI", "--salience",
          "--habituation", "--xi-hall", "--rho", "--nu", "--kay", "--configural-cues", "--num-trials",
          "--alpha-X", "--alpha_mack-X", "--alpha_hall-X", "--saliences-X", "--habituations-X"}) {
        EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
    }
}

TEST(CliRun, PrintResultsMatchesSaveResults) {
    TempDir dir;
    const auto design = fixture_path("blocking.rw");
    const auto csv = dir.path / "r.csv";
    const auto printed = invoke({design, "--print-results", "--num-trials", "20"});
    ASSERT_EQ(printed.code, 0) << printed.err;
    const auto saved = invoke({design, "--save-results", csv.string(), "--num-trials", "20"});
    ASSERT_EQ(saved.code, 0) << saved.err;
    EXPECT_TRUE(saved.out.empty());
    EXPECT_EQ(printed.out, slurp(csv));
    EXPECT_EQ(printed.out.rfind(kCsvHeader, 0), 0u);
}

TEST(CliRun, ThreeAcquisitionTrials) {
    TempDir dir;
    const auto r = invoke({dir.write("g.rw", "G|3A+").string(), "--print-results"});
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_csv_export(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(*rows[1].V, 0.06);
}

TEST(CliRun, OverridesBeatTheFile) {
    TempDir dir;
    const auto design = dir.write("g.rw", "@model=Pearce Kaye Hall\n@lambda=0.5\nG|A+").string();
    auto rows = parse_csv_export(invoke({design, "--print-results", "--adaptive-type", "Rescorla Wagner",
                                         "--lamda", "1", "--alpha", "0.5", "--beta", "0.5"})
                                     .out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].V_E.has_value());
    rows = parse_csv_export(invoke({design, "--print-results", "--adaptive-type", "Rescorla Wagner", "--lamda", "1",
                                    "--alpha", "0.5", "--beta", "0.5", "--part-stimuli"})
                                .out);
    EXPECT_EQ(rows.size(), 2u);
}

TEST(CliRun, BetaNegFollowsBeta) {
    TempDir dir;
    const double v1 = 0.15 * 0.4 * 0.8;
    auto second_extinction_value = [&](const std::string& design, std::vector<std::string> extra) {
        std::vector<std::string> args{dir.write("g.rw", design).string(), "--print-results", "--plot-phase", "2",
                                      "--beta", "0.4"};
        args.insert(args.end(), extra.begin(), extra.end());
        return *parse_csv_export(invoke(args).out).at(1).V;
    };
    EXPECT_DOUBLE_EQ(second_extinction_value("G|A+|2A-", {}), v1 - 0.15 * 0.4 * v1);
    EXPECT_DOUBLE_EQ(second_extinction_value("G|A+|2A-", {"--beta-neg", "0.2"}), v1 - 0.15 * 0.2 * v1);
    EXPECT_DOUBLE_EQ(second_extinction_value("@betan=0.1\nG|A+|2A-", {}), v1 - 0.15 * 0.1 * v1);
}

TEST(CliRun, FiltersSelectSeries) {
    TempDir dir;
    const auto design = dir.write("g.rw", "G|2AB+|B-\nH|A+").string();
    auto rows = parse_csv_export(
        invoke({design, "--print-results", "--plot-experiments", "G", "--plot-stimuli", "B", "BA"}).out);
    std::set<std::string> names;
    for (const auto& row : rows) {
        EXPECT_EQ(row.group, "G");
        names.insert(row.series);
    }
    EXPECT_EQ(names, (std::set<std::string>{"AB", "B"}));
}

TEST(CliRun, ReadsStdinDash) {
    std::istringstream fake("G|2A+");
    auto* old = std::cin.rdbuf(fake.rdbuf());
    const auto r = invoke({"-", "--print-results"});
    std::cin.rdbuf(old);
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(parse_csv_export(r.out).size(), 2u);
}

TEST(CliRun, ExitCodes) {
    TempDir dir;
    EXPECT_EQ(invoke({}).code, cli::InvalidInput);
    EXPECT_EQ(invoke({"--frobnicate"}).code, cli::InvalidInput);
    EXPECT_EQ(invoke({(dir.path / "missing.rw").string(), "--print-results"}).code, cli::IoFailure);

    const auto bad = invoke({dir.write("bad.rw", "G|A+\nH|B*").string(), "--print-results"});
    EXPECT_EQ(bad.code, cli::InvalidInput);
    EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;

    const auto good = dir.write("good.rw", "G|A+").string();
    EXPECT_EQ(invoke({good, "--print-results", "--gamma", "7"}).code, cli::InvalidInput);
    EXPECT_EQ(invoke({good, "--print-results", "--lamda", "high"}).code, cli::InvalidInput);
    EXPECT_EQ(invoke({good, "--save-results", "/nonexistent-dir/x.csv"}).code, cli::IoFailure);
    EXPECT_EQ(invoke({good, "--savefig", "/nonexistent-dir/fig"}).code, cli::IoFailure);
    EXPECT_EQ(invoke({good, "--print-results"}).code, cli::Ok);
}

TEST(CliRun, WarningsGoToStderr) {
    TempDir dir;
    const auto r = invoke({dir.write("g.rw", "@kappa=2\nG|AA+").string(), "--print-results", "--rho", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("--rho"), std::string::npos);
    EXPECT_NE(r.err.find("kappa"), std::string::npos);
    EXPECT_EQ(r.out.rfind(kCsvHeader, 0), 0u);
}

TEST(CliRun, DivergenceWarns) {
    TempDir dir;
    const auto r = invoke({dir.write("g.rw", "G|20ABCD+").string(), "--print-results", "--adaptive-type",
                           "Mackintosh Extended"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("diverged"), std::string::npos);
}

TEST(CliRun, SavefigWritesOneImagePerPhase) {
    TempDir dir;
    const auto design = dir.write("g.rw", "G|2A+|A-|B+").string();
    const auto r = invoke({design, "--savefig", (dir.path / "fig.png").string(), "--singular-legend", "--dpi", "40"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name : {"fig_1.png", "fig_2.png", "fig_3.png", "fig_legend.png"}) {
        EXPECT_TRUE(fs::exists(dir.path / name)) << name;
        EXPECT_NE(r.out.find(name), std::string::npos);
    }
    ASSERT_EQ(invoke({design, "--savefig", (dir.path / "vec.svg").string(), "--plot-phase", "2"}).code, 0);
    EXPECT_TRUE(fs::exists(dir.path / "vec_2.svg"));
    EXPECT_FALSE(fs::exists(dir.path / "vec_1.svg"));
}

TEST(CliRun, DefaultWritesPlotsToATemporaryDirectory) {
    TempDir dir;
    const auto r = invoke({dir.write("g.rw", "G|A+|B+").string(), "--dpi", "30"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::vector<fs::path> paths;
    for (std::string line; std::getline(lines, line);) paths.emplace_back(line);
    ASSERT_EQ(paths.size(), 2u);
    for (const auto& p : paths) EXPECT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(paths[0].filename(), "phase_1.png");
    fs::remove_all(paths[0].parent_path());
}

TEST(CliRun, SeedChangesRandomisedResultsOnly) {
    TempDir dir;
    const auto design = dir.write("g.rw", "G|rand/5A+/5AB-").string();
    const auto a = invoke({design, "--print-results", "--num-trials", "3", "--seed", "1"});
    const auto b = invoke({design, "--print-results", "--num-trials", "3", "--seed", "2"});
    const auto c = invoke({design, "--print-results", "--num-trials", "3", "--seed", "1", "--max-workers", "3"});
    EXPECT_NE(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
}
