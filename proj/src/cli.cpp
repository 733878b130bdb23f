#include "gnmn/cli.hpp"

#include "gnmn/dynamics.hpp"
#include "gnmn/ingest.hpp"
#include "gnmn/metrics.hpp"
#include "gnmn/network.hpp"
#include "gnmn/scenario.hpp"

#include <CLI11.hpp>
#include <boost/crc.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef GNMN_VERSION
#define GNMN_VERSION "dev"
#endif

namespace gnmn::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool snapshots = false;
    std::size_t window = 7;
};

std::string crc32_hex(std::string_view bytes)
{
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    std::ostringstream ss;
    ss << std::hex << std::setw(8) << std::setfill('0') << crc.checksum();
    return ss.str();
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<fs::path> out_dir_or_env(const GlobalOptions& g)
{
    if (!g.out.empty())
        return fs::path(g.out);
    if (const char* env = std::getenv(kOutDirEnv); env && *env)
        return fs::path(env);
    return std::nullopt;
}

fs::path require_out_dir(const GlobalOptions& g)
{
    fs::path dir = out_dir_or_env(g).value_or(fs::path("."));
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    return f;
}

ScenarioConfig load_with_overrides(const GlobalOptions& g)
{
    if (g.config.empty())
        throw ConfigError("--config is required");
    ScenarioConfig c = load_config(g.config);
    if (g.seed)
        c.seed = *g.seed;
    return c;
}

void write_manifest(const fs::path& dir, const ScenarioConfig& config,
                    const std::vector<fs::path>& outputs, double seconds,
                    const std::vector<int>& clamp_ticks)
{
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : outputs) {
        const std::string bytes = slurp(p);
        files.push_back({{"file", p.filename().string()},
                         {"bytes", bytes.size()},
                         {"crc32", crc32_hex(bytes)}});
    }
    const std::string canonical = config_to_json(config);
    nlohmann::json m{{"config_hash", crc32_hex(canonical)},
                     {"config", nlohmann::json::parse(canonical)},
                     {"seed", config.seed},
                     {"code_version", GNMN_VERSION},
                     {"outputs", files},
                     {"wall_clock_seconds", seconds},
                     {"clamp_ticks", clamp_ticks}};
    auto f = open_output(dir / "manifest.json");
    f << m.dump(2) << '\n';
}

void write_gnuplot_script(std::ostream& out)
{
    out << "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set xlabel 'tick (days)'\n"
           "set ylabel 'individuals'\n"
           "set multiplot layout 2,1\n"
           "plot 'trajectory.csv' using 1:2 with lines, '' using 1:3 with lines, "
           "'' using 1:4 with lines\n"
           "set ylabel 'R_t'\n"
           "plot 'trajectory.csv' using 1:6 with lines\n"
           "unset multiplot\n";
}

int cmd_sample(const GlobalOptions& g, const std::string& csv, const SampleSpec& spec,
               std::ostream& out)
{
    auto records = load_population_csv(csv);
    apply_sampling(records, spec);
    if (auto dir = out_dir_or_env(g)) {
        fs::create_directories(*dir);
        auto f = open_output(*dir / "sample_report.json");
        write_sample_report_json(f, records, spec);
    } else {
        write_sample_report_json(out, records, spec);
    }
    return kOk;
}

int cmd_simulate(const GlobalOptions& g, bool gnuplot, std::ostream& out, std::ostream& err)
{
    const ScenarioConfig config = load_with_overrides(g);
    const fs::path dir = require_out_dir(g);
    const auto started = std::chrono::steady_clock::now();

    std::optional<std::ofstream> snapshots;
    std::vector<fs::path> outputs;
    if (g.snapshots) {
        outputs.push_back(dir / "snapshots.csv");
        snapshots.emplace(open_output(outputs.back()));
        write_snapshot_csv_header(*snapshots);
    }
    SnapshotSink sink;
    if (snapshots)
        sink = [&](const ContactSnapshot& snap, std::span<const Point2D>) {
            write_snapshot_csv_rows(*snapshots, snap);
        };

    const TrajectoryRecord traj = run_scenario(config, sink);
    if (snapshots)
        snapshots->close();

    outputs.push_back(dir / "trajectory.csv");
    {
        auto f = open_output(outputs.back());
        write_trajectory_csv(f, traj);
    }
    outputs.push_back(dir / "metrics.json");
    {
        auto f = open_output(outputs.back());
        write_metrics_json(f, make_report(traj));
    }
    outputs.push_back(dir / "run.log");
    {
        auto f = open_output(outputs.back());
        f << "nodes " << traj.n_nodes << ", ticks " << config.horizon << '\n';
        for (int t : traj.clamp_ticks)
            f << "tick " << t << ": negative fraction clamped and renormalized\n";
    }
    if (gnuplot) {
        outputs.push_back(dir / "plot.gp");
        auto f = open_output(outputs.back());
        write_gnuplot_script(f);
    }
    if (!traj.clamp_ticks.empty())
        err << "warning: nonnegativity guard fired on " << traj.clamp_ticks.size()
            << " tick(s); see run.log\n";

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_manifest(dir, config, outputs, seconds, traj.clamp_ticks);
    out << "wrote " << (dir / "trajectory.csv").string() << '\n';
    return kOk;
}

int cmd_degree_hist(const GlobalOptions& g, std::size_t bin_width, std::ostream& out)
{
    if (bin_width == 0)
        throw ConfigError("--bin-width must be >= 1");
    ScenarioConfig config = load_with_overrides(g);
    const fs::path dir = require_out_dir(g);
    const auto started = std::chrono::steady_clock::now();

    Scenario sc = build_scenario(config);
    const MobilityConfig mob = config.mobility();
    DegreeAccumulator acc(config.node_count());
    auto mobility = std::move(sc.mobility);
    for (int t = 0; t <= config.horizon; ++t) {
        if (t > 0)
            mobility = step_mobility(mobility, mob, sc.rng);
        const auto pos = positions_of(mobility);
        acc.add(build_snapshot(pos, config.threshold_distance, t));
    }

    std::vector<fs::path> outputs{dir / "degree_histogram.csv"};
    {
        auto f = open_output(outputs.back());
        write_histogram_csv(f, acc.histogram(bin_width));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_manifest(dir, config, outputs, seconds, {});
    out << "wrote " << outputs.back().string() << '\n';
    return kOk;
}

int cmd_compare(const GlobalOptions& g, const std::string& cases_path,
                const std::string& trajectory_path, std::ostream& out)
{
    const CaseSeries cases = load_cases_csv(cases_path);
    std::ifstream tin(trajectory_path);
    if (!tin)
        throw MissingFileError(trajectory_path);
    TrajectoryRecord traj;
    try {
        traj = read_trajectory_csv(tin);
    } catch (const std::runtime_error& ex) {
        throw IngestError(ex.what(), 0);
    }
    if (g.window < 1 || cases.entries.size() < 2 * g.window)
        throw IngestError("window of " + std::to_string(g.window) +
                              " days needs at least twice as many case rows; got " +
                              std::to_string(cases.entries.size()),
                          0);

    std::map<std::size_t, double> empirical;
    for (const auto& p : empirical_rt(cases, g.window))
        empirical[p.day] = p.value;
    std::map<std::size_t, double> model;
    for (const auto& row : traj.rows)
        if (row.tick >= 0 && std::isfinite(row.r_t))
            model[static_cast<std::size_t>(row.tick)] = row.r_t;

    const std::size_t days = std::max(cases.entries.size(), traj.rows.size());
    const fs::path dir = require_out_dir(g);
    const fs::path path = dir / "comparison.csv";
    auto f = open_output(path);
    f << "day,rt_empirical,rt_model\n";
    char buf[64];
    auto cell = [&](const std::map<std::size_t, double>& m, std::size_t d) -> std::string {
        auto it = m.find(d);
        if (it == m.end())
            return {};
        std::snprintf(buf, sizeof buf, "%.6f", it->second);
        return buf;
    };
    for (std::size_t d = 0; d < days; ++d)
        f << d << ',' << cell(empirical, d) << ',' << cell(model, d) << '\n';
    out << "wrote " << path.string() << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Distance-modulated SIR on geometric networks of mobile nodes"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Scenario JSON file");
    app.add_option("--seed", g.seed, "Override the config RNG seed");
    app.add_option("--out", g.out,
                   std::string("Output directory (default: $") + kOutDirEnv + ")");
    app.add_flag("--snapshots", g.snapshots, "Also export per-tick contact snapshots");
    app.add_option("--window", g.window, "Window in days for the empirical R_t")
        ->check(CLI::PositiveNumber);

    SampleSpec spec;
    std::string population_csv;
    auto* sample = app.add_subcommand("sample", "Sample sizes for a census/migration CSV");
    sample->add_option("population_csv", population_csv)->required();
    sample->add_option("--z", spec.z, "Standard-normal quantile");
    sample->add_option("--p", spec.p, "Proportion");
    sample->add_option("--e", spec.e, "Margin of error");

    bool gnuplot = false;
    auto* simulate = app.add_subcommand("simulate", "Run the network SIR for a scenario");
    simulate->add_flag("--gnuplot", gnuplot, "Also write a gnuplot script");

    std::size_t bin_width = 10;
    auto* hist = app.add_subcommand("degree-hist", "Accumulated contact-degree histogram");
    hist->add_option("--bin-width", bin_width, "Histogram bin width");

    std::string cases_path;
    std::string trajectory_path;
    auto* compare = app.add_subcommand("compare", "Empirical vs model R_t by day index");
    compare->add_option("--cases", cases_path, "Case CSV (date,confirmed,recovered)")->required();
    compare->add_option("--trajectory", trajectory_path, "Trajectory CSV from simulate")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sample) {
            try {
                spec.validate();
            } catch (const std::invalid_argument& ex) {
                throw ConfigError(ex.what());
            }
            return cmd_sample(g, population_csv, spec, out);
        }
        if (*simulate)
            return cmd_simulate(g, gnuplot, out, err);
        if (*hist)
            return cmd_degree_hist(g, bin_width, out);
        if (*compare)
            return cmd_compare(g, cases_path, trajectory_path, out);
    } catch (const ConfigError& ex) {
        err << "config error: " << ex.what() << '\n';
        return kConfigError;
    } catch (const IngestError& ex) {
        err << "input error: " << ex.what() << '\n';
        return kIngestError;
    } catch (const InstabilityError& ex) {
        err << "runtime error: " << ex.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& ex) {
        err << "runtime error: " << ex.what() << '\n';
        return kRuntimeError;
    }
    return kUsage;
}

} // namespace gnmn::cli
