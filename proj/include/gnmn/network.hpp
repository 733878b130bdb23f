#ifndef GNMN_NETWORK_HPP
#define GNMN_NETWORK_HPP

#include "gnmn/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gnmn {

using NodeId = std::uint32_t;

struct ContactPair {
    NodeId i = 0;
    NodeId j = 0;
    double distance = 0.0;

    friend bool operator==(const ContactPair&, const ContactPair&) = default;
};

/// All node pairs within the threshold distance at one tick.
/// Pairs have i < j and are sorted by (i, j).
struct ContactSnapshot {
    std::size_t n = 0;
    std::vector<ContactPair> pairs;
    int tick = 0;
};

/// Grid-accelerated snapshot. The threshold is inclusive (d_ij <= d_T).
ContactSnapshot build_snapshot(std::span<const Point2D> positions, double d_T, int tick);

/// O(n^2) reference filter; defines the semantics of build_snapshot.
ContactSnapshot build_snapshot_brute_force(std::span<const Point2D> positions, double d_T,
                                           int tick);

/// Edge-count estimate E = sum_i (sum_{j!=i} d_ij / A) (v_i T / d_T).
/// `horizon` is in seconds so that v_i T is a length.
double estimate_edges(std::span<const Point2D> positions, std::span<const double> speeds,
                      double area, double d_T, double horizon);

struct DegreeEstimate {
    std::vector<double> per_node; // <k_i> = N sum_{j!=i} d_ij / A
    double mean = 0.0;
};

/// Distance-based average degree. Each row sum runs over j in ascending order,
/// so the result is bitwise independent of `threads`.
DegreeEstimate average_degree(std::span<const Point2D> positions, double area, int threads = 1);

struct DegreeBin {
    std::size_t lo = 0; // inclusive
    std::size_t hi = 0; // exclusive
    double probability = 0.0;
};

struct DegreeHistogram {
    std::vector<DegreeBin> bins;
    double mean_degree = 0.0;
};

/// Accumulates per-node contact counts over a sequence of snapshots.
class DegreeAccumulator {
public:
    explicit DegreeAccumulator(std::size_t n);

    void add(const ContactSnapshot& snapshot);
    const std::vector<std::size_t>& degrees() const { return degrees_; }
    DegreeHistogram histogram(std::size_t bin_width) const;

private:
    std::vector<std::size_t> degrees_;
    std::size_t snapshots_ = 0;
};

DegreeHistogram degree_histogram(std::span<const ContactSnapshot> snapshots, std::size_t bin_width);

void write_snapshot_csv_header(std::ostream& out);
void write_snapshot_csv_rows(std::ostream& out, const ContactSnapshot& snapshot);
void write_histogram_csv(std::ostream& out, const DegreeHistogram& histogram);

} // namespace gnmn

#endif // GNMN_NETWORK_HPP
