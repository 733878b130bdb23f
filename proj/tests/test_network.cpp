#include "gnmn/network.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace gnmn;

namespace {

bool same_pairs(const ContactSnapshot& s,
                const std::vector<std::tuple<std::size_t, std::size_t, long double>>& ref)
{
    if (s.pairs.size() != ref.size())
        return false;
    for (std::size_t k = 0; k < ref.size(); ++k) {
        const auto& [i, j, d] = ref[k];
        if (s.pairs[k].i != i || s.pairs[k].j != j)
            return false;
        if (std::abs(s.pairs[k].distance - static_cast<double>(d)) > 1e-12 * (1 + d))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("snapshot threshold is inclusive and excludes self-pairs")
{
    std::vector<Point2D> two{{0, 0}, {3, 4}};
    auto s = build_snapshot(two, 5.0, 0);
    REQUIRE(s.pairs.size() == 1);
    CHECK(s.pairs[0].i == 0);
    CHECK(s.pairs[0].j == 1);
    CHECK(s.pairs[0].distance == doctest::Approx(5.0));
    CHECK(build_snapshot(two, 4.999, 0).pairs.empty());

    std::vector<Point2D> distinct{{0, 0}, {1, 0}, {0, 1}};
    CHECK(build_snapshot(distinct, 0.0, 0).pairs.empty());
    CHECK_THROWS_AS(build_snapshot(distinct, -1.0, 0), std::invalid_argument);
}

TEST_CASE("accelerated snapshot equals the double loop")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 200;
        const double side = 1000.0;
        const double d_T = 5.0 + static_cast<double>(rng() % 300);
        const auto pts = oracle::random_points(rng, n, side);
        const auto fast = build_snapshot(pts, d_T, trial);
        const auto slow = build_snapshot_brute_force(pts, d_T, trial);
        CHECK(fast.tick == trial);
        CHECK(fast.n == n);
        CHECK(fast.pairs == slow.pairs);
        CHECK(same_pairs(fast, oracle::pairs_within(pts, d_T)));
    }
}

TEST_CASE("snapshot handles coincident and clustered points")
{
    std::vector<Point2D> same(50, Point2D{7, 7});
    CHECK(build_snapshot(same, 0.0, 0).pairs.size() == 50 * 49 / 2);
    CHECK(build_snapshot(same, 1.0, 0).pairs == build_snapshot_brute_force(same, 1.0, 0).pairs);
}

TEST_CASE("edge estimate")
{
    std::vector<Point2D> two{{0, 0}, {10, 0}};
    std::vector<double> v{1, 1};
    CHECK(estimate_edges(two, v, 100, 5, 10) == doctest::Approx(0.4).epsilon(1e-14));

    std::vector<double> zero{0, 0};
    CHECK(estimate_edges(two, zero, 100, 5, 10) == 0.0);

    std::mt19937_64 rng(9);
    const auto pts = oracle::random_points(rng, 60, 500);
    std::vector<double> speeds(60);
    for (auto& s : speeds)
        s = 1 + static_cast<double>(rng() % 50);
    const double e = estimate_edges(pts, speeds, 250000, 2, 3600);
    std::vector<double> scaled = speeds;
    for (auto& s : scaled)
        s *= 3.0;
    CHECK(estimate_edges(pts, scaled, 250000, 2, 3600) == doctest::Approx(3 * e).epsilon(1e-12));

    std::vector<double> faster = speeds;
    faster[7] += 10;
    CHECK(estimate_edges(pts, faster, 250000, 2, 3600) >= e);
    CHECK(estimate_edges(pts, speeds, 250000, 4, 3600) <= e);

    CHECK_THROWS_AS(estimate_edges(pts, speeds, 0, 2, 3600), std::invalid_argument);
    CHECK_THROWS_AS(estimate_edges(pts, speeds, 1, 0, 3600), std::invalid_argument);
    std::vector<double> short_speeds(3, 1.0);
    CHECK_THROWS_AS(estimate_edges(pts, short_speeds, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("average degree")
{
    std::vector<Point2D> coincident(5, Point2D{1, 1});
    const auto z = average_degree(coincident, 10);
    for (double k : z.per_node)
        CHECK(k == 0.0);

    std::vector<Point2D> two{{0, 0}, {1, 0}};
    const auto d = average_degree(two, 4);
    CHECK(d.per_node[0] == doctest::Approx(0.5));
    CHECK(d.per_node[1] == doctest::Approx(0.5));
    CHECK(d.mean == doctest::Approx(0.5));

    std::mt19937_64 rng(17);
    const auto pts = oracle::random_points(rng, 50, 300);
    const auto est = average_degree(pts, 90000);
    const auto ref = oracle::degree(pts, 90000);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(std::abs(est.per_node[i] - static_cast<double>(ref[i])) <=
              1e-12 * static_cast<double>(ref[i]));
}

TEST_CASE("average degree is permutation-equivariant and thread-independent")
{
    std::mt19937_64 rng(23);
    auto pts = oracle::random_points(rng, 120, 1000);
    const auto base = average_degree(pts, 1e6);

    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point2D> shuffled(pts.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        shuffled[k] = pts[perm[k]];
    const auto moved = average_degree(shuffled, 1e6);
    for (std::size_t k = 0; k < perm.size(); ++k)
        CHECK(moved.per_node[k] == doctest::Approx(base.per_node[perm[k]]).epsilon(1e-12));
    CHECK(moved.mean == doctest::Approx(base.mean).epsilon(1e-12));

    for (int threads : {2, 3, 8}) {
        const auto par = average_degree(pts, 1e6, threads);
        CHECK(par.per_node == base.per_node);
        CHECK(par.mean == base.mean);
    }
}

TEST_CASE("degree histogram")
{
    ContactSnapshot empty{4, {}, 0};
    DegreeAccumulator acc(4);
    acc.add(empty);
    auto h = acc.histogram(5);
    REQUIRE(h.bins.size() == 1);
    CHECK(h.bins[0].lo == 0);
    CHECK(h.bins[0].hi == 5);
    CHECK(h.bins[0].probability == 1.0);

    std::vector<Point2D> tri{{0, 0}, {1, 0}, {0, 1}};
    auto snap = build_snapshot(tri, 2.0, 0);
    DegreeAccumulator acc3(3);
    acc3.add(snap);
    for (auto d : acc3.degrees())
        CHECK(d == 2);
    auto h3 = acc3.histogram(1);
    REQUIRE(h3.bins.size() == 3);
    CHECK(h3.bins[2].probability == 1.0);
    CHECK(h3.mean_degree == 2.0);

    std::vector<ContactSnapshot> snaps{snap, snap};
    auto h6 = degree_histogram(snaps, 1);
    CHECK(h6.bins.back().lo == 4);
    CHECK(h6.mean_degree == 4.0);

    CHECK_THROWS_AS(acc3.histogram(0), std::invalid_argument);
    CHECK_THROWS_AS(DegreeAccumulator(3).histogram(1), std::invalid_argument);
    CHECK_THROWS_AS(acc.add(snap), std::invalid_argument);
}

TEST_CASE("histogram probabilities sum to one")
{
    std::mt19937_64 rng(5);
    DegreeAccumulator acc(300);
    for (int t = 0; t < 10; ++t) {
        const auto pts = oracle::random_points(rng, 300, 200);
        acc.add(build_snapshot(pts, 15, t));
    }
    for (std::size_t w : {1u, 3u, 10u}) {
        const auto h = acc.histogram(w);
        double total = 0;
        for (const auto& b : h.bins)
            total += b.probability;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("csv writers")
{
    std::vector<Point2D> two{{0, 0}, {3, 4}};
    std::ostringstream out;
    write_snapshot_csv_header(out);
    write_snapshot_csv_rows(out, build_snapshot(two, 5, 2));
    CHECK(out.str() == "tick,i,j,d_ij\n2,0,1,5.000000\n");

    DegreeHistogram h{{{0, 2, 0.25}, {2, 4, 0.75}}, 2.1};
    std::ostringstream hs;
    write_histogram_csv(hs, h);
    CHECK(hs.str() == "bin_lo,bin_hi,probability\n0,2,0.25\n2,4,0.75\n");
}
