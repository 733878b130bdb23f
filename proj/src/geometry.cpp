#include "gnmn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gnmn {

double euclidean_distance(Point2D p, Point2D q)
{
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return std::sqrt(dx * dx + dy * dy);
}

void MobilityConfig::validate() const
{
    if (!(side_length > 0.0))
        throw std::invalid_argument("side_length must be > 0");
    if (!(v_min >= 0.0) || !(v_max >= v_min))
        throw std::invalid_argument("speed range must satisfy 0 <= v_min <= v_max");
    if (t_rest_min < 0 || t_rest_max < t_rest_min)
        throw std::invalid_argument("rest range must satisfy 0 <= t_rest_min <= t_rest_max");
    if (!(travel_seconds_per_day > 0.0))
        throw std::invalid_argument("travel_seconds_per_day must be > 0");
    if (placement_side > side_length)
        throw std::invalid_argument("placement_side cannot exceed side_length");
}

double MobilityConfig::effective_placement_side() const
{
    return placement_side > 0.0 ? placement_side : side_length;
}

namespace {

double draw_coordinate(Rng& rng, double lo, double extent, double side)
{
    std::uniform_real_distribution<double> u(0.0, extent);
    // uniform_real_distribution may round up to its upper bound
    return std::clamp(lo + u(rng), 0.0, side);
}

Point2D draw_point(Rng& rng, double lo, double extent, double side)
{
    const double x = draw_coordinate(rng, lo, extent, side);
    const double y = draw_coordinate(rng, lo, extent, side);
    return {x, y};
}

double draw_speed(Rng& rng, const MobilityConfig& config)
{
    std::uniform_real_distribution<double> u(config.v_min, config.v_max);
    return config.v_min == config.v_max ? config.v_min : std::clamp(u(rng), config.v_min, config.v_max);
}

int draw_rest(Rng& rng, const MobilityConfig& config)
{
    std::uniform_int_distribution<int> u(config.t_rest_min, config.t_rest_max);
    return u(rng);
}

void depart(MobilityState& s, const MobilityConfig& config, Rng& rng)
{
    s.waypoint = draw_point(rng, 0.0, config.side_length, config.side_length);
    s.speed = draw_speed(rng, config);
    s.rest_remaining = 0;
    s.phase = Phase::Traveling;
}

} // namespace

std::vector<MobilityState> init_mobility(const MobilityConfig& config, Rng& rng, std::size_t n)
{
    config.validate();
    if (n == 0)
        throw std::invalid_argument("init_mobility requires at least one node");

    const double extent = config.effective_placement_side();
    const double lo = 0.5 * (config.side_length - extent);

    std::vector<MobilityState> states(n);
    for (auto& s : states) {
        s.position = draw_point(rng, lo, extent, config.side_length);
        s.waypoint = s.position;
        s.speed = draw_speed(rng, config);
        s.rest_remaining = draw_rest(rng, config);
        s.phase = Phase::Resting;
    }
    return states;
}

std::vector<MobilityState> init_mobility(const MobilityConfig& config, std::uint64_t rng_seed,
                                         std::size_t n)
{
    Rng rng(rng_seed);
    return init_mobility(config, rng, n);
}

std::vector<MobilityState> step_mobility(std::span<const MobilityState> states,
                                         const MobilityConfig& config, Rng& rng)
{
    std::vector<MobilityState> next(states.begin(), states.end());
    const double side = config.side_length;

    for (auto& s : next) {
        if (s.phase == Phase::Resting) {
            if (s.rest_remaining > 0)
                --s.rest_remaining;
            // departure takes effect from the next tick; position is fixed today
            if (s.rest_remaining == 0)
                depart(s, config, rng);
            continue;
        }

        const double remaining = euclidean_distance(s.position, s.waypoint);
        const double reach = s.speed * config.travel_seconds_per_day;
        if (remaining <= reach) {
            s.position = s.waypoint;
            s.phase = Phase::Resting;
            s.rest_remaining = draw_rest(rng, config);
            if (s.rest_remaining == 0)
                depart(s, config, rng);
        } else {
            const double f = reach / remaining;
            s.position.x = std::clamp(s.position.x + f * (s.waypoint.x - s.position.x), 0.0, side);
            s.position.y = std::clamp(s.position.y + f * (s.waypoint.y - s.position.y), 0.0, side);
        }
    }
    return next;
}

std::vector<Point2D> positions_of(std::span<const MobilityState> states)
{
    std::vector<Point2D> out;
    out.reserve(states.size());
    for (const auto& s : states)
        out.push_back(s.position);
    return out;
}

std::vector<double> speeds_of(std::span<const MobilityState> states)
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states)
        out.push_back(s.speed);
    return out;
}

} // namespace gnmn
