#include "gnmn/dynamics.hpp"

#include "gnmn/metrics.hpp"
#include "parallel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace gnmn {

void EpidemicParams::validate() const
{
    if (!(beta >= 0.0))
        throw std::invalid_argument("beta must be >= 0");
    if (!(mu >= 0.0))
        throw std::invalid_argument("mu must be >= 0");
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be > 0");
    if (!(d_T >= 0.0))
        throw std::invalid_argument("d_T must be >= 0");
    if (!(dt > 0.0))
        throw std::invalid_argument("dt must be > 0");
}

InstabilityError::InstabilityError(int tick, std::size_t node, double value)
    : std::runtime_error("integrator unstable at tick " + std::to_string(tick) + ", node " +
                         std::to_string(node) + ": fraction " + std::to_string(value) +
                         " outside [-0.1, 1.1]; reduce dt or beta"),
      tick_(tick), node_(node)
{
}

double kernel(double d, double sigma, double d_T)
{
    if (d > d_T)
        return 0.0;
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

namespace {

constexpr double kUnstableLow = -0.1;
constexpr double kUnstableHigh = 1.1;

struct Neighbours {
    std::vector<std::size_t> start;
    std::vector<std::size_t> node;
    std::vector<double> weight;
};

// CSR adjacency with kernel weights. Walking the canonical (i, j) pair order
// and appending to both endpoints leaves every list in ascending node order.
Neighbours weighted_neighbours(const ContactSnapshot& snapshot, double sigma, double d_T)
{
    Neighbours nb;
    nb.start.assign(snapshot.n + 1, 0);
    for (const auto& p : snapshot.pairs) {
        ++nb.start[p.i + 1];
        ++nb.start[p.j + 1];
    }
    for (std::size_t k = 0; k < snapshot.n; ++k)
        nb.start[k + 1] += nb.start[k];
    nb.node.resize(nb.start.back());
    nb.weight.resize(nb.start.back());
    std::vector<std::size_t> fill(nb.start.begin(), nb.start.end() - 1);
    for (const auto& p : snapshot.pairs) {
        const double w = kernel(p.distance, sigma, d_T);
        nb.node[fill[p.i]] = p.j;
        nb.weight[fill[p.i]++] = w;
        nb.node[fill[p.j]] = p.i;
        nb.weight[fill[p.j]++] = w;
    }
    return nb;
}

void check_range(double v, int tick, std::size_t node)
{
    if (!(v >= kUnstableLow && v <= kUnstableHigh))
        throw InstabilityError(tick, node, v);
}

} // namespace

StepOutcome advance_network_sir(const CompartmentState& state, const ContactSnapshot& snapshot,
                                double k_mean, const EpidemicParams& params, int threads)
{
    params.validate();
    const std::size_t n = state.size();
    if (state.i.size() != n || state.r.size() != n)
        throw std::invalid_argument("compartment vectors differ in length");
    if (snapshot.n != n)
        throw std::invalid_argument("snapshot and state refer to different node counts");
    if (!(k_mean >= 0.0) || !std::isfinite(k_mean))
        throw std::invalid_argument("k_mean must be finite and >= 0");

    const Neighbours nb = weighted_neighbours(snapshot, params.sigma, params.d_T);
    const double rate = params.beta * k_mean;
    const double dt = params.dt;
    const int tick = state.tick + 1;

    StepOutcome out;
    out.state = CompartmentState(n);
    out.state.tick = tick;
    auto& next = out.state;
    std::vector<char> clamped(n, 0);

    detail::parallel_chunks(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t a = begin; a < end; ++a) {
            double pressure = 0.0;
            for (std::size_t k = nb.start[a]; k < nb.start[a + 1]; ++k)
                pressure += nb.weight[k] * state.i[nb.node[k]];
            const double force = rate * state.s[a] * pressure;

            double s = state.s[a] - dt * force;
            double i = state.i[a] + dt * (force - params.mu * state.i[a]);
            double r = state.r[a] + dt * params.mu * state.i[a];
            check_range(s, tick, a);
            check_range(i, tick, a);
            check_range(r, tick, a);

            if (s < 0.0 || i < 0.0 || r < 0.0) {
                s = std::max(s, 0.0);
                i = std::max(i, 0.0);
                r = std::max(r, 0.0);
                const double total = s + i + r;
                s /= total;
                i /= total;
                r /= total;
                clamped[a] = 1;
            }
            next.s[a] = s;
            next.i[a] = i;
            next.r[a] = r;
        }
    });

    for (char c : clamped)
        out.clamped_nodes += static_cast<std::size_t>(c);
    return out;
}

CompartmentState step_network_sir(const CompartmentState& state, const ContactSnapshot& snapshot,
                                  double k_mean, const EpidemicParams& params, int threads)
{
    return advance_network_sir(state, snapshot, k_mean, params, threads).state;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int substeps_per_day(double dt)
{
    const double steps = 1.0 / dt;
    const double rounded = std::round(steps);
    if (rounded < 1.0 || std::abs(steps - rounded) > 1e-9 * rounded)
        throw std::invalid_argument("network runs need dt = 1/m days for a whole number m");
    return static_cast<int>(rounded);
}

TrajectoryRow network_row(int tick, const CompartmentState& state, std::span<const Point2D> positions,
                          double k_mean, const NetworkRunSetup& setup, double* r0_out)
{
    TrajectoryRow row;
    row.tick = tick;
    row.time = static_cast<double>(tick);
    for (std::size_t a = 0; a < state.size(); ++a) {
        row.S += state.s[a];
        row.I += state.i[a];
        row.R += state.r[a];
    }
    row.S *= setup.cohort_size;
    row.I *= setup.cohort_size;
    row.R *= setup.cohort_size;
    row.k_mean = k_mean;

    const auto& ep = setup.epidemic;
    const double population = setup.cohort_size * static_cast<double>(state.size());
    row.r_t = kNaN;
    row.beta_critical = kNaN;
    if (ep.mu > 0.0 && k_mean > 0.0) {
        const double ksum = pairwise_kernel_sum(positions, ep.sigma, setup.threads);
        const double r0_now = r0_from_kernel_sum(ksum, positions.size(), ep, k_mean);
        if (r0_out)
            *r0_out = r0_now;
        row.r_t = effective_reproduction(r0_now, row.S, population);
        try {
            row.beta_critical = beta_critical_from_kernel_sum(ksum, positions.size(), ep.mu,
                                                              ep.sigma, ep.d_T, k_mean,
                                                              setup.r_critical);
        } catch (const NoFiniteThreshold&) {
            row.beta_critical = std::numeric_limits<double>::infinity();
        }
    }
    return row;
}

} // namespace

TrajectoryRecord run_network_sir(const CompartmentState& init, std::vector<MobilityState> mobility,
                                 Rng& rng, const NetworkRunSetup& setup, const SnapshotSink& sink)
{
    setup.mobility.validate();
    setup.epidemic.validate();
    if (setup.horizon < 1)
        throw std::invalid_argument("horizon must be >= 1");
    if (!(setup.cohort_size > 0.0))
        throw std::invalid_argument("cohort_size must be > 0");
    if (mobility.size() != init.size() || init.size() == 0)
        throw std::invalid_argument("mobility and compartment state must describe the same nodes");

    const int substeps = substeps_per_day(setup.epidemic.dt);
    const double area = setup.mobility.area();
    const double d_T = setup.epidemic.d_T;

    TrajectoryRecord record;
    record.n_nodes = init.size();
    record.cohort_size = setup.cohort_size;
    record.rows.reserve(static_cast<std::size_t>(setup.horizon) + 1);

    CompartmentState state = init;
    state.tick = 0;

    auto positions = positions_of(mobility);
    {
        const ContactSnapshot snap = build_snapshot(positions, d_T, 0);
        if (sink)
            sink(snap, positions);
        const double k = average_degree(positions, area, setup.threads).mean;
        double r0_initial = kNaN;
        record.rows.push_back(network_row(0, state, positions, k, setup, &r0_initial));
        record.initial_r0 = r0_initial;
    }

    for (int t = 1; t <= setup.horizon; ++t) {
        mobility = step_mobility(mobility, setup.mobility, rng);
        positions = positions_of(mobility);
        const ContactSnapshot snap = build_snapshot(positions, d_T, t);
        if (sink)
            sink(snap, positions);
        const double k = average_degree(positions, area, setup.threads).mean;

        bool clamped = false;
        for (int m = 0; m < substeps; ++m) {
            state.tick = t - 1;
            StepOutcome step = advance_network_sir(state, snap, k, setup.epidemic, setup.threads);
            clamped = clamped || step.clamped_nodes > 0;
            state = std::move(step.state);
        }
        state.tick = t;
        if (clamped)
            record.clamp_ticks.push_back(t);
        record.rows.push_back(network_row(t, state, positions, k, setup, nullptr));
    }

    const auto speeds = spreading_speed(record, area);
    for (std::size_t k = 0; k < speeds.size(); ++k)
        record.rows[k].spreading_speed = speeds[k];
    return record;
}

namespace {

struct Sir {
    double s, i, r;
};

Sir sir_rhs(const Sir& y, double beta, double mu)
{
    const double infection = beta * y.s * y.i;
    return {-infection, infection - mu * y.i, mu * y.i};
}

Sir axpy(const Sir& y, double h, const Sir& k)
{
    return {y.s + h * k.s, y.i + h * k.i, y.r + h * k.r};
}

} // namespace

TrajectoryRecord run_classical_sir(double s0, double i0, double r0, double beta, double mu,
                                   double dt, double horizon)
{
    if (!(beta >= 0.0) || !(mu >= 0.0))
        throw std::invalid_argument("rates must be >= 0");
    if (!(dt > 0.0))
        throw std::invalid_argument("dt must be > 0");
    if (!(horizon >= 0.0))
        throw std::invalid_argument("horizon must be >= 0");
    if (s0 < 0.0 || i0 < 0.0 || r0 < 0.0 || std::abs(s0 + i0 + r0 - 1.0) > 1e-9)
        throw std::invalid_argument("initial fractions must be >= 0 and sum to 1");

    const auto steps = static_cast<long>(std::llround(horizon / dt));
    TrajectoryRecord record;
    record.rows.reserve(static_cast<std::size_t>(steps) + 1);

    auto push = [&](long k, const Sir& y) {
        TrajectoryRow row;
        row.tick = static_cast<int>(k);
        row.time = static_cast<double>(k) * dt;
        row.S = y.s;
        row.I = y.i;
        row.R = y.r;
        row.k_mean = kNaN;
        row.r_t = mu > 0.0 ? beta * y.s / mu : kNaN;
        row.beta_critical = mu;
        record.rows.push_back(row);
    };

    Sir y{s0, i0, r0};
    push(0, y);
    for (long k = 1; k <= steps; ++k) {
        const Sir k1 = sir_rhs(y, beta, mu);
        const Sir k2 = sir_rhs(axpy(y, 0.5 * dt, k1), beta, mu);
        const Sir k3 = sir_rhs(axpy(y, 0.5 * dt, k2), beta, mu);
        const Sir k4 = sir_rhs(axpy(y, dt, k3), beta, mu);
        y.s += dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        y.i += dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
        y.r += dt / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
        push(k, y);
    }
    record.initial_r0 = mu > 0.0 ? beta / mu : kNaN;

    const auto speeds = spreading_speed(record, 1.0);
    for (std::size_t k = 0; k < speeds.size(); ++k)
        record.rows[k].spreading_speed = speeds[k];
    return record;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& trajectory)
{
    out << "tick,S,I,R,k_mean,R_t,beta_critical,spreading_speed\n";
    char buf[512];
    for (const auto& row : trajectory.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6e,%.6e\n", row.tick, row.S,
                      row.I, row.R, row.k_mean, row.r_t, row.beta_critical, row.spreading_speed);
        out << buf;
    }
}

TrajectoryRecord read_trajectory_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trajectory CSV is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "tick,S,I,R,k_mean,R_t,beta_critical,spreading_speed")
        throw std::runtime_error("trajectory CSV has an unexpected header: " + line);

    TrajectoryRecord record;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double x = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                                         ": non-numeric cell '" + cell + "'");
            v.push_back(x);
        }
        if (v.size() != 8)
            throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) +
                                     ": expected 8 columns");
        TrajectoryRow row;
        row.tick = static_cast<int>(v[0]);
        row.time = v[0];
        row.S = v[1];
        row.I = v[2];
        row.R = v[3];
        row.k_mean = v[4];
        row.r_t = v[5];
        row.beta_critical = v[6];
        row.spreading_speed = v[7];
        record.rows.push_back(row);
    }
    return record;
}

} // namespace gnmn
