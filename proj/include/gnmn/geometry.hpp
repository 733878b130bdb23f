#ifndef GNMN_GEOMETRY_HPP
#define GNMN_GEOMETRY_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gnmn {

using Rng = std::mt19937_64;

/// A location inside the simulation square, in meters.
struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

double euclidean_distance(Point2D p, Point2D q);

enum class Phase { Resting, Traveling };

struct MobilityState {
    Point2D position;
    Point2D waypoint;
    double speed = 0.0;     // m/s, redrawn per leg
    int rest_remaining = 0; // days
    Phase phase = Phase::Resting;

    friend bool operator==(const MobilityState&, const MobilityState&) = default;
};

/// Parameters of the random-waypoint-with-rest process.
///
/// One tick is one day. A traveling node covers at most
/// `speed * travel_seconds_per_day` meters per tick, so the m/s speeds stay
/// meaningful at day resolution. `placement_side` is the side of a centered
/// sub-square used for the initial positions only; it defaults to the full
/// square, and waypoints are always drawn over the full square.
struct MobilityConfig {
    double side_length = 25000.0;
    double v_min = 1.0;
    double v_max = 50.0;
    int t_rest_min = 2;
    int t_rest_max = 115;
    double travel_seconds_per_day = 3600.0;
    double placement_side = 0.0; // <= 0 means side_length

    void validate() const;
    double effective_placement_side() const;
    double area() const { return side_length * side_length; }
};

std::vector<MobilityState> init_mobility(const MobilityConfig& config, Rng& rng, std::size_t n);
std::vector<MobilityState> init_mobility(const MobilityConfig& config, std::uint64_t rng_seed,
                                         std::size_t n);

/// Advances every node by one tick, consuming `rng` in ascending node order.
std::vector<MobilityState> step_mobility(std::span<const MobilityState> states,
                                         const MobilityConfig& config, Rng& rng);

std::vector<Point2D> positions_of(std::span<const MobilityState> states);
std::vector<double> speeds_of(std::span<const MobilityState> states);

} // namespace gnmn

#endif // GNMN_GEOMETRY_HPP
