#ifndef GNMN_METRICS_HPP
#define GNMN_METRICS_HPP

#include "gnmn/dynamics.hpp"
#include "gnmn/geometry.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gnmn {

/// sum_i sum_j exp(-d_ij^2 / (2 sigma^2)) over all ordered pairs, self-pairs
/// included (each contributes 1). Large inputs use a grid and drop pairs
/// farther than 10 sigma, whose terms are below 2e-22.
double pairwise_kernel_sum(std::span<const Point2D> positions, double sigma, int threads = 1);

/// Plain double loop, no truncation.
double pairwise_kernel_sum_brute_force(std::span<const Point2D> positions, double sigma);

/// R0 = (beta/mu) (1/<k>) exp(-d_T^2/(2 sigma^2)) (1/N) sum_i sum_j exp(-d_ij^2/(2 sigma^2))
double r0(std::span<const Point2D> positions, const EpidemicParams& params, double k_mean);
double r0_from_kernel_sum(double kernel_sum, std::size_t n, const EpidemicParams& params,
                          double k_mean);

class NoFiniteThreshold : public std::runtime_error {
public:
    NoFiniteThreshold()
        : std::runtime_error("no finite critical infection rate: kernel mass is zero")
    {
    }
};

/// The beta at which r0 equals r_critical.
double beta_critical(std::span<const Point2D> positions, double mu, double sigma, double d_T,
                     double k_mean, double r_critical = 1.0);
double beta_critical_from_kernel_sum(double kernel_sum, std::size_t n, double mu, double sigma,
                                     double d_T, double k_mean, double r_critical = 1.0);

/// sum_i of the time integral of I_i, composite trapezoid over the recorded rows.
double epidemic_size(const TrajectoryRecord& trajectory);

/// Per-row (1/N) sum_i dI_i/dt / A. Central differences inside, one-sided at the ends.
std::vector<double> spreading_speed(const TrajectoryRecord& trajectory, double area);

/// R0 of the current geometry scaled by the susceptible fraction.
double effective_reproduction(double r0_now, double susceptible, double population);

std::vector<std::pair<int, double>> r_t_series(const TrajectoryRecord& trajectory);

struct MetricsReport {
    double r0 = 0.0;
    double beta_critical = 0.0;
    double epidemic_size = 0.0;
    std::vector<std::pair<int, double>> spreading_speed_series;
    std::vector<std::pair<int, double>> r_t_series;
};

MetricsReport make_report(const TrajectoryRecord& trajectory);
void write_metrics_json(std::ostream& out, const MetricsReport& report);

} // namespace gnmn

#endif // GNMN_METRICS_HPP
