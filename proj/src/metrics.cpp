#include "gnmn/metrics.hpp"

#include "cell_grid.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace gnmn {

namespace {

// exp(-50) ~ 1.9e-22: pairs beyond this many sigma cannot move a sum >= N.
constexpr double kCutoffSigmas = 10.0;
constexpr std::size_t kBruteForceLimit = 256;

double attenuation(double d2, double sigma)
{
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

void require_positive_sigma(double sigma)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be > 0");
}

} // namespace

double pairwise_kernel_sum_brute_force(std::span<const Point2D> positions, double sigma)
{
    require_positive_sigma(sigma);
    double total = 0.0;
    for (const auto& p : positions) {
        double row = 0.0;
        for (const auto& q : positions) {
            const double dx = p.x - q.x;
            const double dy = p.y - q.y;
            row += attenuation(dx * dx + dy * dy, sigma);
        }
        total += row;
    }
    return total;
}

double pairwise_kernel_sum(std::span<const Point2D> positions, double sigma, int threads)
{
    require_positive_sigma(sigma);
    if (positions.size() <= kBruteForceLimit)
        return pairwise_kernel_sum_brute_force(positions, sigma);

    const double cutoff = kCutoffSigmas * sigma;
    const double cutoff2 = cutoff * cutoff;
    const detail::CellGrid grid(positions, cutoff);
    std::vector<double> rows(positions.size(), 0.0);
    detail::parallel_chunks(positions.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Point2D p = positions[i];
            double row = 0.0;
            grid.for_each_candidate(i, [&](std::size_t j) {
                if (j <= i)
                    return;
                const double dx = p.x - positions[j].x;
                const double dy = p.y - positions[j].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 <= cutoff2)
                    row += attenuation(d2, sigma);
            });
            rows[i] = row;
        }
    });
    // diagonal terms are exactly 1, off-diagonal pairs counted once
    double half = 0.0;
    for (double r : rows)
        half += r;
    return static_cast<double>(positions.size()) + 2.0 * half;
}

double r0_from_kernel_sum(double kernel_sum, std::size_t n, const EpidemicParams& params,
                          double k_mean)
{
    require_positive_sigma(params.sigma);
    if (!(k_mean > 0.0))
        throw std::invalid_argument("r0: k_mean must be > 0");
    if (!(params.mu > 0.0))
        throw std::invalid_argument("r0: mu must be > 0");
    if (n == 0)
        throw std::invalid_argument("r0: need at least one node");
    const double threshold_term = attenuation(params.d_T * params.d_T, params.sigma);
    return (params.beta / params.mu) * (1.0 / k_mean) * threshold_term *
           (kernel_sum / static_cast<double>(n));
}

double r0(std::span<const Point2D> positions, const EpidemicParams& params, double k_mean)
{
    return r0_from_kernel_sum(pairwise_kernel_sum(positions, params.sigma), positions.size(),
                              params, k_mean);
}

double beta_critical_from_kernel_sum(double kernel_sum, std::size_t n, double mu, double sigma,
                                     double d_T, double k_mean, double r_critical)
{
    require_positive_sigma(sigma);
    if (!(mu > 0.0))
        throw std::invalid_argument("beta_critical: mu must be > 0");
    if (n == 0)
        throw std::invalid_argument("beta_critical: need at least one node");
    const double denominator = attenuation(d_T * d_T, sigma) * (kernel_sum / static_cast<double>(n));
    if (!(denominator > 0.0))
        throw NoFiniteThreshold();
    return r_critical * mu * k_mean / denominator;
}

double beta_critical(std::span<const Point2D> positions, double mu, double sigma, double d_T,
                     double k_mean, double r_critical)
{
    return beta_critical_from_kernel_sum(pairwise_kernel_sum(positions, sigma), positions.size(),
                                         mu, sigma, d_T, k_mean, r_critical);
}

double epidemic_size(const TrajectoryRecord& trajectory)
{
    const auto& rows = trajectory.rows;
    if (rows.empty())
        throw std::invalid_argument("epidemic_size: empty trajectory");
    double total = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k)
        total += 0.5 * (rows[k].I + rows[k - 1].I) * (rows[k].time - rows[k - 1].time);
    return total;
}

std::vector<double> spreading_speed(const TrajectoryRecord& trajectory, double area)
{
    if (!(area > 0.0))
        throw std::invalid_argument("spreading_speed: area must be > 0");
    const auto& rows = trajectory.rows;
    std::vector<double> out(rows.size(), 0.0);
    if (rows.size() < 2)
        return out;

    const double scale = 1.0 / (static_cast<double>(trajectory.n_nodes) * area);
    auto slope = [&](std::size_t a, std::size_t b) {
        return (rows[b].I - rows[a].I) / (rows[b].time - rows[a].time);
    };
    const std::size_t last = rows.size() - 1;
    out[0] = slope(0, 1) * scale;
    for (std::size_t k = 1; k < last; ++k)
        out[k] = slope(k - 1, k + 1) * scale;
    out[last] = slope(last - 1, last) * scale;
    return out;
}

double effective_reproduction(double r0_now, double susceptible, double population)
{
    if (!(population > 0.0))
        throw std::invalid_argument("population must be > 0");
    return r0_now * (susceptible / population);
}

std::vector<std::pair<int, double>> r_t_series(const TrajectoryRecord& trajectory)
{
    std::vector<std::pair<int, double>> out;
    out.reserve(trajectory.rows.size());
    for (const auto& row : trajectory.rows)
        out.emplace_back(row.tick, row.r_t);
    return out;
}

MetricsReport make_report(const TrajectoryRecord& trajectory)
{
    if (trajectory.rows.empty())
        throw std::invalid_argument("make_report: empty trajectory");
    MetricsReport report;
    report.r0 = trajectory.initial_r0;
    report.beta_critical = trajectory.rows.front().beta_critical;
    report.epidemic_size = epidemic_size(trajectory);
    for (const auto& row : trajectory.rows)
        report.spreading_speed_series.emplace_back(row.tick, row.spreading_speed);
    report.r_t_series = r_t_series(trajectory);
    return report;
}

namespace {

nlohmann::json number_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json series_json(const std::vector<std::pair<int, double>>& series)
{
    auto arr = nlohmann::json::array();
    for (const auto& [tick, v] : series)
        arr.push_back({{"tick", tick}, {"value", number_or_null(v)}});
    return arr;
}

} // namespace

void write_metrics_json(std::ostream& out, const MetricsReport& report)
{
    nlohmann::json j;
    j["r0"] = number_or_null(report.r0);
    j["beta_critical"] = number_or_null(report.beta_critical);
    j["epidemic_size"] = number_or_null(report.epidemic_size);
    j["spreading_speed_series"] = series_json(report.spreading_speed_series);
    j["r_t_series"] = series_json(report.r_t_series);
    out << j.dump(2) << '\n';
}

} // namespace gnmn
