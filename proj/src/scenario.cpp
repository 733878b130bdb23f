#include "gnmn/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gnmn {

using nlohmann::json;

void ScenarioConfig::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok)
            throw ConfigError("invalid config: " + what);
    };
    require(side_length > 0.0, "side_length must be > 0");
    require(connectivity_radius > 0.0, "connectivity_radius must be > 0");
    require(threshold_distance >= 0.0, "threshold_distance must be >= 0");
    require(sigma > 0.0, "sigma must be > 0");
    require(v_min >= 0.0 && v_min <= v_max, "need 0 <= v_min <= v_max");
    require(t_rest_min >= 0 && t_rest_min <= t_rest_max, "need 0 <= t_rest_min <= t_rest_max");
    require(travel_seconds_per_day > 0.0, "travel_seconds_per_day must be > 0");
    require(placement_side >= 0.0 && placement_side <= side_length,
            "placement_side must lie in [0, side_length]");
    require(beta >= 0.0 && mu >= 0.0, "beta and mu must be >= 0");
    require(dt > 0.0 && dt <= 1.0, "dt must lie in (0, 1]");
    require(horizon >= 1, "horizon must be >= 1");
    require(n_static >= 0 && n_migrated >= 0, "cohort sizes must be >= 0");
    require(n_static + n_migrated >= 1, "need at least one node");
    require(r_critical > 0.0, "r_critical must be > 0");
    require(cohort_size > 0.0, "cohort_size must be > 0");
    require(migrated_infected_fraction >= 0.0 && migrated_infected_fraction <= 1.0,
            "migrated_infected_fraction must lie in [0, 1]");
    require(initial_infection >= 0.0 && initial_infection <= 1.0,
            "initial_infection must lie in [0, 1]");
    require(threads >= 1, "threads must be >= 1");
    const double steps = 1.0 / dt;
    require(std::abs(steps - std::round(steps)) <= 1e-9 * steps, "dt must be 1/m for whole m");
}

std::size_t ScenarioConfig::seeded_count() const
{
    if (!seed_migrated_infected)
        return 0;
    return static_cast<std::size_t>(
        std::llround(migrated_infected_fraction * static_cast<double>(n_migrated)));
}

MobilityConfig ScenarioConfig::mobility() const
{
    MobilityConfig m;
    m.side_length = side_length;
    m.v_min = v_min;
    m.v_max = v_max;
    m.t_rest_min = t_rest_min;
    m.t_rest_max = t_rest_max;
    m.travel_seconds_per_day = travel_seconds_per_day;
    m.placement_side = placement_side;
    return m;
}

EpidemicParams ScenarioConfig::epidemic() const
{
    return {beta, mu, sigma, threshold_distance, dt};
}

NetworkRunSetup ScenarioConfig::run_setup() const
{
    NetworkRunSetup s;
    s.mobility = mobility();
    s.epidemic = epidemic();
    s.horizon = horizon;
    s.cohort_size = cohort_size;
    s.r_critical = r_critical;
    s.threads = threads;
    return s;
}

namespace {

json to_json_object(const ScenarioConfig& c)
{
    return json{{"side_length", c.side_length},
                {"connectivity_radius", c.connectivity_radius},
                {"threshold_distance", c.threshold_distance},
                {"sigma", c.sigma},
                {"v_min", c.v_min},
                {"v_max", c.v_max},
                {"t_rest_min", c.t_rest_min},
                {"t_rest_max", c.t_rest_max},
                {"travel_seconds_per_day", c.travel_seconds_per_day},
                {"placement_side", c.placement_side},
                {"beta", c.beta},
                {"mu", c.mu},
                {"dt", c.dt},
                {"horizon", c.horizon},
                {"n_static", c.n_static},
                {"n_migrated", c.n_migrated},
                {"seed", c.seed},
                {"r_critical", c.r_critical},
                {"cohort_size", c.cohort_size},
                {"seed_migrated_infected", c.seed_migrated_infected},
                {"migrated_infected_fraction", c.migrated_infected_fraction},
                {"initial_infection", c.initial_infection},
                {"threads", c.threads}};
}

template <class T>
void read_field(const json& j, const char* key, T& out)
{
    auto it = j.find(key);
    if (it == j.end())
        return;
    try {
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!it->is_number_integer())
                throw ConfigError(std::string("config key '") + key + "' must be an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean())
                throw ConfigError(std::string("config key '") + key + "' must be a boolean");
        } else {
            if (!it->is_number())
                throw ConfigError(std::string("config key '") + key + "' must be a number");
        }
        out = it->get<T>();
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config key '") + key + "': " + ex.what());
    }
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    ScenarioConfig c;
    const json known = to_json_object(c);
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw ConfigError("unknown config key '" + key + "'");

    read_field(j, "side_length", c.side_length);
    read_field(j, "connectivity_radius", c.connectivity_radius);
    c.threshold_distance = c.connectivity_radius;
    read_field(j, "threshold_distance", c.threshold_distance);
    read_field(j, "sigma", c.sigma);
    read_field(j, "v_min", c.v_min);
    read_field(j, "v_max", c.v_max);
    read_field(j, "t_rest_min", c.t_rest_min);
    read_field(j, "t_rest_max", c.t_rest_max);
    read_field(j, "travel_seconds_per_day", c.travel_seconds_per_day);
    read_field(j, "placement_side", c.placement_side);
    read_field(j, "beta", c.beta);
    read_field(j, "mu", c.mu);
    read_field(j, "dt", c.dt);
    read_field(j, "horizon", c.horizon);
    read_field(j, "n_static", c.n_static);
    read_field(j, "n_migrated", c.n_migrated);
    read_field(j, "seed", c.seed);
    read_field(j, "r_critical", c.r_critical);
    read_field(j, "cohort_size", c.cohort_size);
    read_field(j, "seed_migrated_infected", c.seed_migrated_infected);
    read_field(j, "migrated_infected_fraction", c.migrated_infected_fraction);
    read_field(j, "initial_infection", c.initial_infection);
    read_field(j, "threads", c.threads);
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& config)
{
    return to_json_object(config).dump();
}

Scenario build_scenario(const ScenarioConfig& config)
{
    config.validate();
    Scenario sc{{}, CompartmentState(config.node_count()), Rng(config.seed)};
    sc.mobility = init_mobility(config.mobility(), sc.rng, config.node_count());

    const std::size_t first_migrant = static_cast<std::size_t>(config.n_static);
    const std::size_t seeded = config.seeded_count();
    for (std::size_t k = 0; k < seeded; ++k) {
        const std::size_t a = first_migrant + k;
        sc.compartments.s[a] = 1.0 - config.initial_infection;
        sc.compartments.i[a] = config.initial_infection;
    }
    return sc;
}

TrajectoryRecord run_scenario(const ScenarioConfig& config, const SnapshotSink& sink)
{
    Scenario sc = build_scenario(config);
    return run_network_sir(sc.compartments, std::move(sc.mobility), sc.rng, config.run_setup(), sink);
}

} // namespace gnmn
