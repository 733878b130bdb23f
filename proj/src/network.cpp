#include "gnmn/network.hpp"

#include "cell_grid.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace gnmn {

namespace {

void require_threshold(double d_T)
{
    if (!(d_T >= 0.0))
        throw std::invalid_argument("threshold distance must be >= 0");
}

// Row sums sum_{j != i} d_ij, accumulated in ascending j for every i.
std::vector<double> distance_row_sums(std::span<const Point2D> positions, int threads)
{
    const std::size_t n = positions.size();
    std::vector<double> sums(n, 0.0);

    if (threads <= 1) {
        // Symmetric half loop. Row i receives d_0i .. d_(i-1)i from earlier rows and
        // then d_i(i+1) .. d_i(n-1) here, i.e. the same order as a full row scan.
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Point2D p = positions[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = p.x - positions[j].x;
                const double dy = p.y - positions[j].y;
                row[j] = std::sqrt(dx * dx + dy * dy);
            }
            for (std::size_t j = i + 1; j < n; ++j)
                sums[j] += row[j];
            double acc = sums[i];
            for (std::size_t j = i + 1; j < n; ++j)
                acc += row[j];
            sums[i] = acc;
        }
        return sums;
    }

    detail::parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Point2D p = positions[i];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                const double dx = p.x - positions[j].x;
                const double dy = p.y - positions[j].y;
                acc += std::sqrt(dx * dx + dy * dy);
            }
            sums[i] = acc;
        }
    });
    return sums;
}

} // namespace

ContactSnapshot build_snapshot_brute_force(std::span<const Point2D> positions, double d_T, int tick)
{
    require_threshold(d_T);
    ContactSnapshot snap;
    snap.n = positions.size();
    snap.tick = tick;
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const double d = euclidean_distance(positions[i], positions[j]);
            if (d <= d_T)
                snap.pairs.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d});
        }
    return snap;
}

ContactSnapshot build_snapshot(std::span<const Point2D> positions, double d_T, int tick)
{
    require_threshold(d_T);
    ContactSnapshot snap;
    snap.n = positions.size();
    snap.tick = tick;
    if (positions.size() < 2)
        return snap;

    const detail::CellGrid grid(positions, d_T);
    std::vector<ContactPair> row;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        row.clear();
        grid.for_each_candidate(i, [&](std::size_t j) {
            if (j <= i)
                return;
            const double d = euclidean_distance(positions[i], positions[j]);
            if (d <= d_T)
                row.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d});
        });
        std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.j < b.j; });
        snap.pairs.insert(snap.pairs.end(), row.begin(), row.end());
    }
    return snap;
}

double estimate_edges(std::span<const Point2D> positions, std::span<const double> speeds,
                      double area, double d_T, double horizon)
{
    if (!(area > 0.0))
        throw std::invalid_argument("estimate_edges: area must be > 0");
    if (!(d_T > 0.0))
        throw std::invalid_argument("estimate_edges: d_T must be > 0");
    if (positions.size() != speeds.size())
        throw std::invalid_argument("estimate_edges: positions and speeds differ in length");

    const auto sums = distance_row_sums(positions, 1);
    double edges = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        edges += (sums[i] / area) * (speeds[i] * horizon / d_T);
    return edges;
}

DegreeEstimate average_degree(std::span<const Point2D> positions, double area, int threads)
{
    if (!(area > 0.0))
        throw std::invalid_argument("average_degree: area must be > 0");
    if (positions.empty())
        throw std::invalid_argument("average_degree: need at least one node");

    DegreeEstimate out;
    out.per_node = distance_row_sums(positions, threads);
    const double n = static_cast<double>(positions.size());
    double total = 0.0;
    for (auto& k : out.per_node) {
        k = n * k / area;
        total += k;
    }
    out.mean = total / n;
    return out;
}

DegreeAccumulator::DegreeAccumulator(std::size_t n)
    : degrees_(n, 0)
{
}

void DegreeAccumulator::add(const ContactSnapshot& snapshot)
{
    if (snapshot.n != degrees_.size())
        throw std::invalid_argument("snapshot node count does not match accumulator");
    for (const auto& p : snapshot.pairs) {
        ++degrees_[p.i];
        ++degrees_[p.j];
    }
    ++snapshots_;
}

DegreeHistogram DegreeAccumulator::histogram(std::size_t bin_width) const
{
    if (bin_width == 0)
        throw std::invalid_argument("bin_width must be >= 1");
    if (snapshots_ == 0)
        throw std::invalid_argument("degree histogram needs at least one snapshot");

    DegreeHistogram h;
    if (degrees_.empty())
        return h;

    const std::size_t max_degree = *std::max_element(degrees_.begin(), degrees_.end());
    const std::size_t nbins = max_degree / bin_width + 1;
    std::vector<std::size_t> counts(nbins, 0);
    double total = 0.0;
    for (auto d : degrees_) {
        ++counts[d / bin_width];
        total += static_cast<double>(d);
    }
    const double n = static_cast<double>(degrees_.size());
    h.mean_degree = total / n;
    h.bins.reserve(nbins);
    for (std::size_t b = 0; b < nbins; ++b)
        h.bins.push_back({b * bin_width, (b + 1) * bin_width, static_cast<double>(counts[b]) / n});
    return h;
}

DegreeHistogram degree_histogram(std::span<const ContactSnapshot> snapshots, std::size_t bin_width)
{
    if (snapshots.empty())
        throw std::invalid_argument("degree histogram needs at least one snapshot");
    DegreeAccumulator acc(snapshots.front().n);
    for (const auto& s : snapshots)
        acc.add(s);
    return acc.histogram(bin_width);
}

void write_snapshot_csv_header(std::ostream& out)
{
    out << "tick,i,j,d_ij\n";
}

void write_snapshot_csv_rows(std::ostream& out, const ContactSnapshot& snapshot)
{
    out << std::fixed << std::setprecision(6);
    for (const auto& p : snapshot.pairs)
        out << snapshot.tick << ',' << p.i << ',' << p.j << ',' << p.distance << '\n';
}

void write_histogram_csv(std::ostream& out, const DegreeHistogram& histogram)
{
    out << "bin_lo,bin_hi,probability\n";
    out << std::setprecision(12);
    out.unsetf(std::ios::floatfield);
    for (const auto& b : histogram.bins)
        out << b.lo << ',' << b.hi << ',' << b.probability << '\n';
}

} // namespace gnmn
