#ifndef GNMN_SCENARIO_HPP
#define GNMN_SCENARIO_HPP

#include "gnmn/dynamics.hpp"
#include "gnmn/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace gnmn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat scenario description. Defaults: 25 km square, r = d_T = 2 m,
/// 1-50 m/s, 2-115 rest days, 7724 nodes of which 2182 are migrants.
struct ScenarioConfig {
    double side_length = 25000.0;
    double connectivity_radius = 2.0;
    double threshold_distance = 2.0; // d_T
    double sigma = 2.0;
    double v_min = 1.0;
    double v_max = 50.0;
    int t_rest_min = 2;
    int t_rest_max = 115;
    double travel_seconds_per_day = 3600.0;
    double placement_side = 0.0; // 0: whole square
    double beta = 0.3;
    double mu = 0.1;
    double dt = 1.0;
    int horizon = 100;
    std::int64_t n_static = 5542;
    std::int64_t n_migrated = 2182;
    std::uint64_t seed = 1;
    double r_critical = 1.0;
    double cohort_size = 1.0;
    bool seed_migrated_infected = true;
    double migrated_infected_fraction = 0.01;
    double initial_infection = 1.0; // infected fraction of each seeded node
    int threads = 1;

    void validate() const;
    std::size_t node_count() const { return static_cast<std::size_t>(n_static + n_migrated); }
    std::size_t seeded_count() const;
    MobilityConfig mobility() const;
    EpidemicParams epidemic() const;
    NetworkRunSetup run_setup() const;
};

/// Parses a flat JSON object. Unknown keys and ill-typed values are rejected.
/// `threshold_distance` defaults to `connectivity_radius` when omitted.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON (sorted keys, every field present).
std::string config_to_json(const ScenarioConfig& config);

/// Initial mobility and compartments. Nodes [0, n_static) are static residents,
/// the rest migrants; the first seeded_count() migrants start infected.
struct Scenario {
    std::vector<MobilityState> mobility;
    CompartmentState compartments;
    Rng rng;
};

Scenario build_scenario(const ScenarioConfig& config);

TrajectoryRecord run_scenario(const ScenarioConfig& config, const SnapshotSink& sink = {});

} // namespace gnmn

#endif // GNMN_SCENARIO_HPP
