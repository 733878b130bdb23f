#include "gnmn/dynamics.hpp"
#include "gnmn/network.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gnmn;

namespace {

CompartmentState two_node_state()
{
    CompartmentState st(2);
    st.s = {1.0, 0.5};
    st.i = {0.0, 0.5};
    st.r = {0.0, 0.0};
    return st;
}

ContactSnapshot line_snapshot(std::vector<Point2D> pts, double d_T)
{
    return build_snapshot(pts, d_T, 0);
}

NetworkRunSetup small_setup(double beta, double mu, double d_T, int horizon)
{
    NetworkRunSetup setup;
    setup.mobility.side_length = 400;
    setup.epidemic = {beta, mu, 20.0, d_T, 1.0};
    setup.horizon = horizon;
    return setup;
}

CompartmentState seeded(std::size_t n, std::size_t infected)
{
    CompartmentState st(n);
    for (std::size_t k = 0; k < infected; ++k) {
        st.s[k] = 0.0;
        st.i[k] = 1.0;
    }
    return st;
}

} // namespace

TEST_CASE("kernel values")
{
    CHECK(kernel(0.0, 3.0, 10.0) == 1.0);
    const double sigma = 2.0;
    const double half = sigma * std::sqrt(2.0 * std::log(2.0));
    CHECK(kernel(half, sigma, 10.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(kernel(5.0, sigma, 5.0) > 0.0);
    CHECK(kernel(5.0 + 1e-9, sigma, 5.0) == 0.0);
}

TEST_CASE("epidemic parameter validation")
{
    EpidemicParams p{0.1, 0.1, 1.0, 1.0, 1.0};
    CHECK_NOTHROW(p.validate());
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {-0.1, 0.1, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {0.1, 0.1, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("two-node Euler step by hand")
{
    const auto snap = line_snapshot({{0, 0}, {1, 0}}, 2.0);
    const EpidemicParams p{0.4, 0.1, 1.0, 2.0, 1.0};
    const auto next = step_network_sir(two_node_state(), snap, 0.5, p);

    const double force1 = 0.4 * 0.5 * 1.0 * std::exp(-0.5) * 0.5;
    CHECK(force1 == doctest::Approx(0.0606531).epsilon(1e-6));
    CHECK(next.s[0] == doctest::Approx(1.0 - force1).epsilon(1e-15));
    CHECK(next.i[0] == doctest::Approx(force1).epsilon(1e-15));
    CHECK(next.r[0] == 0.0);
    // node 2 has no infectious neighbour, so it only recovers
    CHECK(next.s[1] == 0.5);
    CHECK(next.i[1] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(next.r[1] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(next.tick == 1);
}

TEST_CASE("no infectious neighbours means pure recovery")
{
    CompartmentState st(3);
    st.s = {0.9, 0.8, 1.0};
    st.i = {0.1, 0.2, 0.0};
    st.r = {0.0, 0.0, 0.0};
    const EpidemicParams p{0.5, 0.2, 1.0, 0.0, 1.0};
    const auto snap = line_snapshot({{0, 0}, {10, 0}, {20, 0}}, 0.0);
    const auto next = step_network_sir(st, snap, 3.0, p);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(next.s[a] == st.s[a]);
        CHECK(next.i[a] == doctest::Approx(st.i[a] * 0.8).epsilon(1e-15));
    }
}

TEST_CASE("moving the infectious node away never raises infection")
{
    const EpidemicParams p{0.3, 0.1, 2.0, 10.0, 1.0};
    CompartmentState st(3);
    st.s = {1.0, 1.0, 0.0};
    st.i = {0.0, 0.0, 1.0};
    st.r = {0.0, 0.0, 0.0};
    double previous = 1.0;
    for (double x = 1.0; x <= 12.0; x += 0.5) {
        const auto snap = line_snapshot({{0, 0}, {-5, 0}, {x, 0}}, p.d_T);
        const double i0 = step_network_sir(st, snap, 1.0, p).i[0];
        CHECK(i0 <= previous);
        previous = i0;
    }
    CHECK(previous == 0.0);
}

TEST_CASE("halving dt shrinks the one-step gap quadratically")
{
    const auto snap = line_snapshot({{0, 0}, {1, 0}}, 2.0);
    auto gap = [&](double h) {
        const EpidemicParams full{0.4, 0.1, 1.0, 2.0, h};
        const EpidemicParams half{0.4, 0.1, 1.0, 2.0, h / 2};
        const auto one = step_network_sir(two_node_state(), snap, 0.5, full);
        const auto two = step_network_sir(step_network_sir(two_node_state(), snap, 0.5, half),
                                          snap, 0.5, half);
        return std::abs(one.i[0] - two.i[0]) + std::abs(one.i[1] - two.i[1]);
    };
    const double ratio = gap(0.1) / gap(0.05);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("overshoot is clamped or reported")
{
    const auto snap = line_snapshot({{0, 0}, {1, 0}}, 2.0);
    CompartmentState st(2);
    st.s = {1.0, 0.0};
    st.i = {0.0, 1.0};
    st.r = {0.0, 0.0};

    // force = 1.05: s dips to -0.05, inside the tolerated band
    const EpidemicParams mild{1.05, 0.0, 1e9, 2.0, 1.0};
    const auto out = advance_network_sir(st, snap, 1.0, mild);
    CHECK(out.clamped_nodes == 1);
    CHECK(out.state.s[0] == 0.0);
    CHECK(out.state.s[0] + out.state.i[0] + out.state.r[0] == doctest::Approx(1.0));

    const EpidemicParams wild{2.0, 0.0, 1e9, 2.0, 1.0};
    try {
        (void)advance_network_sir(st, snap, 1.0, wild);
        FAIL("expected InstabilityError");
    } catch (const InstabilityError& e) {
        CHECK(e.tick() == 1);
        CHECK(e.node() == 0);
    }
}

TEST_CASE("step input validation")
{
    const auto snap = line_snapshot({{0, 0}, {1, 0}}, 2.0);
    const EpidemicParams p{0.4, 0.1, 1.0, 2.0, 1.0};
    CHECK_THROWS_AS(step_network_sir(CompartmentState(3), snap, 0.5, p), std::invalid_argument);
    CHECK_THROWS_AS(step_network_sir(two_node_state(), snap, -1.0, p), std::invalid_argument);
    CHECK_THROWS_AS(step_network_sir(two_node_state(), snap, NAN, p), std::invalid_argument);
}

TEST_CASE("network run conserves mass and keeps fractions nonnegative")
{
    auto setup = small_setup(2e-4, 0.1, 30.0, 40);
    Rng rng(4);
    auto mob = init_mobility(setup.mobility, rng, 150);
    const auto rec = run_network_sir(seeded(150, 3), mob, rng, setup);
    REQUIRE(rec.rows.size() == 41);
    for (const auto& row : rec.rows) {
        CHECK(row.S + row.I + row.R == doctest::Approx(150.0).epsilon(1e-12));
        CHECK(row.S >= 0.0);
        CHECK(row.I >= 0.0);
    }
    for (std::size_t k = 1; k < rec.rows.size(); ++k)
        CHECK(rec.rows[k].R >= rec.rows[k - 1].R);
}

TEST_CASE("beta zero leaves S fixed and I non-increasing")
{
    auto setup = small_setup(0.0, 0.15, 30.0, 25);
    Rng rng(8);
    auto mob = init_mobility(setup.mobility, rng, 80);
    const auto rec = run_network_sir(seeded(80, 10), mob, rng, setup);
    for (std::size_t k = 1; k < rec.rows.size(); ++k) {
        CHECK(rec.rows[k].S == rec.rows[0].S);
        CHECK(rec.rows[k].I <= rec.rows[k - 1].I);
        CHECK(rec.rows[k].R >= rec.rows[k - 1].R);
    }
}

TEST_CASE("zero threshold decouples nodes exactly")
{
    const int horizon = 30;
    auto coupled = small_setup(0.5, 0.1, 0.0, horizon);
    auto free = small_setup(0.0, 0.1, 0.0, horizon);
    Rng ra(12);
    Rng rb(12);
    auto ma = init_mobility(coupled.mobility, ra, 60);
    auto mb = init_mobility(free.mobility, rb, 60);
    const auto a = run_network_sir(seeded(60, 6), ma, ra, coupled);
    const auto b = run_network_sir(seeded(60, 6), mb, rb, free);
    for (int t = 0; t <= horizon; ++t) {
        CHECK(a.rows[t].I == b.rows[t].I);
        CHECK(a.rows[t].I == doctest::Approx(6.0 * std::pow(0.9, t)).epsilon(1e-12));
    }
}

TEST_CASE("network run is deterministic and thread-independent")
{
    auto setup = small_setup(1e-4, 0.1, 40.0, 15);
    auto run = [&](int threads) {
        setup.threads = threads;
        Rng rng(99);
        auto mob = init_mobility(setup.mobility, rng, 120);
        std::ostringstream out;
        write_trajectory_csv(out, run_network_sir(seeded(120, 4), mob, rng, setup));
        return out.str();
    };
    const auto one = run(1);
    CHECK(one == run(1));
    CHECK(one == run(4));
}

TEST_CASE("network run bookkeeping")
{
    auto setup = small_setup(1e-4, 0.1, 40.0, 1);
    setup.cohort_size = 10.0;
    Rng rng(1);
    auto mob = init_mobility(setup.mobility, rng, 20);
    std::size_t calls = 0;
    const auto rec = run_network_sir(seeded(20, 1), mob, rng, setup,
                                     [&](const ContactSnapshot& s, std::span<const Point2D> p) {
                                         CHECK(s.tick == static_cast<int>(calls));
                                         CHECK(p.size() == 20);
                                         ++calls;
                                     });
    CHECK(calls == 2);
    REQUIRE(rec.rows.size() == 2);
    CHECK(rec.rows[0].I == 10.0);
    CHECK(rec.rows[0].S + rec.rows[0].I + rec.rows[0].R == doctest::Approx(200.0));
    CHECK(std::isfinite(rec.initial_r0));

    setup.epidemic.dt = 0.3;
    Rng rng2(1);
    auto mob2 = init_mobility(setup.mobility, rng2, 20);
    CHECK_THROWS_AS(run_network_sir(seeded(20, 1), mob2, rng2, setup), std::invalid_argument);
}

TEST_CASE("classical SIR")
{
    const auto flat = run_classical_sir(1.0, 0.0, 0.0, 0.3, 0.1, 0.1, 50);
    for (const auto& row : flat.rows) {
        CHECK(row.S == 1.0);
        CHECK(row.I == 0.0);
    }

    const auto rec = run_classical_sir(0.99, 0.01, 0.0, 0.3, 0.1, 0.05, 400);
    for (const auto& row : rec.rows)
        CHECK(row.S + row.I + row.R == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec.rows.back().R == doctest::Approx(oracle::final_size(0.99, 0.3, 0.1)).epsilon(1e-4));
    CHECK(rec.rows.back().time == doctest::Approx(400.0));
    CHECK(rec.initial_r0 == doctest::Approx(3.0));

    CHECK_THROWS_AS(run_classical_sir(0.5, 0.4, 0.0, 0.3, 0.1, 0.1, 10), std::invalid_argument);
    CHECK_THROWS_AS(run_classical_sir(0.99, 0.01, 0.0, -0.3, 0.1, 0.1, 10), std::invalid_argument);
}

TEST_CASE("trajectory csv round trip")
{
    auto setup = small_setup(1e-4, 0.1, 40.0, 5);
    Rng rng(3);
    auto mob = init_mobility(setup.mobility, rng, 30);
    const auto rec = run_network_sir(seeded(30, 2), mob, rng, setup);
    std::ostringstream first;
    write_trajectory_csv(first, rec);
    std::istringstream in(first.str());
    const auto back = read_trajectory_csv(in);
    REQUIRE(back.rows.size() == rec.rows.size());
    std::ostringstream second;
    write_trajectory_csv(second, back);
    CHECK(first.str() == second.str());

    std::istringstream bad("tick,S,I\n0,1,2\n");
    CHECK_THROWS(read_trajectory_csv(bad));
}
