#ifndef GNMN_DYNAMICS_HPP
#define GNMN_DYNAMICS_HPP

#include "gnmn/geometry.hpp"
#include "gnmn/network.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnmn {

struct EpidemicParams {
    double beta = 0.0;  // per day
    double mu = 0.0;    // per day
    double sigma = 1.0; // kernel dispersion, meters
    double d_T = 2.0;   // threshold distance, meters
    double dt = 1.0;    // integration step, days

    void validate() const;
};

/// Per-node compartment fractions.
struct CompartmentState {
    std::vector<double> s;
    std::vector<double> i;
    std::vector<double> r;
    int tick = 0;

    CompartmentState() = default;
    explicit CompartmentState(std::size_t n)
        : s(n, 1.0), i(n, 0.0), r(n, 0.0)
    {
    }
    std::size_t size() const { return s.size(); }
};

/// Raised when an explicit step pushes a fraction outside [-0.1, 1.1].
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(int tick, std::size_t node, double value);
    int tick() const { return tick_; }
    std::size_t node() const { return node_; }

private:
    int tick_;
    std::size_t node_;
};

/// Gaussian distance attenuation gated by the threshold: 0 beyond d_T.
double kernel(double d, double sigma, double d_T);

struct StepOutcome {
    CompartmentState state;
    std::size_t clamped_nodes = 0; // nodes that needed the nonnegativity guard
};

/// One explicit Euler step of the distance-modulated network SIR.
///
///   force_i = beta <k> s_i sum_{j != i, d_ij <= d_T} kernel(d_ij) i_j
///   s_i -= dt force_i;  i_i += dt (force_i - mu i_i);  r_i += dt mu i_i
///
/// Neighbour terms are summed in ascending j. Negative fractions are clamped
/// to zero and the node's triple rescaled to sum to one.
StepOutcome advance_network_sir(const CompartmentState& state, const ContactSnapshot& snapshot,
                                double k_mean, const EpidemicParams& params, int threads = 1);

CompartmentState step_network_sir(const CompartmentState& state, const ContactSnapshot& snapshot,
                                  double k_mean, const EpidemicParams& params, int threads = 1);

struct TrajectoryRow {
    int tick = 0;
    double time = 0.0; // days
    double S = 0.0;
    double I = 0.0;
    double R = 0.0;
    double k_mean = 0.0;
    double r_t = 0.0;
    double beta_critical = 0.0;
    double spreading_speed = 0.0;
};

struct TrajectoryRecord {
    std::size_t n_nodes = 1;
    double cohort_size = 1.0; // individuals represented by one node
    std::vector<TrajectoryRow> rows;
    std::vector<int> clamp_ticks;
    double initial_r0 = 0.0;
};

struct NetworkRunSetup {
    MobilityConfig mobility;
    EpidemicParams epidemic;
    int horizon = 1; // ticks (days)
    double cohort_size = 1.0;
    double r_critical = 1.0;
    int threads = 1;
};

/// Called once per tick (including tick 0) with the current positions and snapshot.
using SnapshotSink = std::function<void(const ContactSnapshot&, std::span<const Point2D>)>;

/// Runs mobility, contact snapshots, the Euler SIR step and per-tick metrics.
/// Mobility consumes `rng`. Each tick spans one day split into 1/dt steps.
TrajectoryRecord run_network_sir(const CompartmentState& init,
                                 std::vector<MobilityState> mobility, Rng& rng,
                                 const NetworkRunSetup& setup, const SnapshotSink& sink = {});

/// Well-mixed SIR integrated with classical RK4. Rows are fractions.
TrajectoryRecord run_classical_sir(double s0, double i0, double r0, double beta, double mu,
                                   double dt, double horizon);

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& trajectory);
TrajectoryRecord read_trajectory_csv(std::istream& in);

} // namespace gnmn

#endif // GNMN_DYNAMICS_HPP
