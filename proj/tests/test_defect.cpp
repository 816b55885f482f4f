#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <reachest/reachest.hpp>

#include "oracles.hpp"

using namespace reachest;

namespace {

const PointCloud kTwoPoints{Point{-1.0, 0.0}, Point{1.0, 0.0}};

void expect_profile_axioms(const DefectProfile& p)
{
    ASSERT_EQ(p.scales().front(), 0.0);
    EXPECT_EQ(p.values().front(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        EXPECT_LE(p.values()[i], p.scales()[i] + 1e-12);
        if (i > 0)
            EXPECT_GE(p.values()[i], p.values()[i - 1]);
    }
}

PointCloud regular_polygon(int m, double radius = 1.0)
{
    std::vector<double> flat;
    for (int i = 0; i < m; ++i)
    {
        flat.push_back(radius * std::cos(2 * M_PI * i / m));
        flat.push_back(radius * std::sin(2 * M_PI * i / m));
    }
    return PointCloud(std::move(flat), 2);
}

} // namespace

TEST(DefectConfig, Validation)
{
    DefectConfig c;
    EXPECT_NO_THROW(c.validate());
    c.order = 4;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.max_scale = 0.0;
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.grid = {0.0, 0.2, 0.1};
    EXPECT_THROW(c.validate(), InputError);
    c = {};
    c.triple_grid = 0;
    EXPECT_THROW(c.validate(), InputError);
}

TEST(DefectProfile, RejectsBrokenInvariants)
{
    EXPECT_THROW(DefectProfile({0.0, 1.0}, {0.0, 1.5}, 2), InputError);
    EXPECT_THROW(DefectProfile({0.0, 1.0}, {0.1, 0.5}, 2), InputError);
    EXPECT_THROW(DefectProfile({0.0, 0.5, 1.0}, {0.0, 0.4, 0.3}, 2), InputError);
    EXPECT_THROW(DefectProfile({0.0, 0.0}, {0.0, 0.0}, 2), InputError);
    EXPECT_NO_THROW(DefectProfile({0.0, 0.5, 1.0}, {0.0, 0.25, 0.25}, 2));
}

TEST(DefectProfile, DefaultGridHasZeroPlusTwoHundredScales)
{
    const auto p = defect_profile(kTwoPoints, {});
    ASSERT_EQ(p.size(), 201u);
    EXPECT_EQ(p.scales().front(), 0.0);
    EXPECT_DOUBLE_EQ(p.max_scale(), 1.0); // half the diameter
}

TEST(DefectProfile, TwoPointStep)
{
    DefectConfig c;
    c.grid = {0.0, 0.25, 0.5, 0.999, 1.0, 1.5, 3.0};
    for (int order : {2, 3})
    {
        c.order = order;
        const auto p = defect_profile(kTwoPoints, c);
        const std::vector<double> want = {0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
        for (std::size_t i = 0; i < want.size(); ++i)
            EXPECT_NEAR(p.values()[i], want[i], 1e-12) << "t = " << c.grid[i];
    }
}

TEST(DefectProfile, Errors)
{
    DefectConfig c;
    c.max_scale = -1.0;
    EXPECT_THROW(defect_profile(kTwoPoints, c), InputError);
}

TEST(DefectAt, Examples)
{
    const DefectConfig c;
    EXPECT_EQ(defect_at(kTwoPoints, 0.0, c), 0.0);
    EXPECT_EQ(defect_at(kTwoPoints, 0.5, c), 0.0);
    EXPECT_NEAR(defect_at(kTwoPoints, 1.5, c), 1.0, 1e-12);
    EXPECT_THROW(defect_at(kTwoPoints, -1.0, c), InputError);
}

TEST(DefectAt, AgreesWithProfileOnGrid)
{
    const auto cloud = oracle::random_cloud(120, 2, 21);
    DefectConfig c;
    c.max_scale = 0.8;
    c.grid_size = 20;
    const auto p = defect_profile(cloud, c);
    for (std::size_t i = 0; i < p.size(); i += 3)
        EXPECT_EQ(defect_at(cloud, p.scales()[i], c), p.values()[i]);
}

TEST(DefectAt, RegularPolygonMatchesOracle)
{
    const auto cloud = regular_polygon(12);
    DefectConfig c;
    c.order = 3;
    c.triple_grid = 60;
    const double got = defect_at(cloud, 0.3, c);
    // side 2 sin(pi/12) = 0.5176, so at t = 0.3 only adjacent pairs count;
    // their midpoints sit 0.2588 from both ends
    const double want = oracle::defect(oracle::rows(cloud), 0.3, 3, 600);
    EXPECT_NEAR(got, want, 1e-6);
    EXPECT_NEAR(got, std::sin(M_PI / 12), 1e-12);
}

TEST(DefectBruteforce, Examples)
{
    EXPECT_EQ(defect_bruteforce(PointCloud{Point{0.3, 0.4}}, 5.0, 3, 50), 0.0);
    EXPECT_NEAR(defect_bruteforce(kTwoPoints, 1.0, 2, 100), 1.0, 1e-12);
    const PointCloud square{Point{0.0, 0.0}, Point{1.0, 0.0}, Point{1.0, 1.0}, Point{0.0, 1.0}};
    EXPECT_NEAR(defect_bruteforce(square, std::sqrt(0.5), 4, 40), std::sqrt(0.5), 1e-9);
    EXPECT_NEAR(oracle::defect(oracle::rows(square), std::sqrt(0.5), 4, 40), std::sqrt(0.5), 1e-9);
}

TEST(DefectBruteforce, RejectsLargeClouds)
{
    EXPECT_THROW(defect_bruteforce(oracle::random_cloud(26, 2, 1), 0.5, 2, 10), InputError);
}

TEST(DefectBruteforce, MatchesTestOracle)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const auto cloud = oracle::random_cloud(7, 2, seed);
        for (double t : {0.2, 0.5, 1.0})
            EXPECT_NEAR(defect_bruteforce(cloud, t, 3, 30), oracle::defect(oracle::rows(cloud), t, 3, 30), 1e-12);
    }
}

TEST(DefectProfile, AxiomsOnRandomClouds)
{
    for (std::uint64_t seed = 1; seed <= 6; ++seed)
    {
        const std::size_t d = 2 + seed % 2;
        const auto cloud = oracle::random_cloud(150, d, seed);
        DefectConfig c;
        c.grid_size = 60;
        c.max_scale = 1.5 * min_enclosing_ball(cloud).radius;
        const auto p = defect_profile(cloud, c);
        expect_profile_axioms(p);
        // constant beyond rad(X)
        const double rad = min_enclosing_ball(cloud).radius;
        const auto i0 = p.index_at_or_above(rad);
        ASSERT_TRUE(i0.has_value());
        for (std::size_t i = *i0; i < p.size(); ++i)
            EXPECT_EQ(p.values()[i], p.values()[*i0]);
    }
}

TEST(DefectProfile, OrderThreeDominatesOrderTwo)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const auto cloud = oracle::random_cloud(40, 2, 100 + seed);
        DefectConfig c;
        c.grid_size = 40;
        const auto p2 = defect_profile(cloud, c);
        c.order = 3;
        const auto p3 = defect_profile(cloud, c);
        for (std::size_t i = 0; i < p2.size(); ++i)
            EXPECT_GE(p3.values()[i], p2.values()[i]);
    }
}

TEST(DefectProfile, PairOrderMatchesPairOracle)
{
    // order 2 is exact over pairs: compare with the oracle restricted to pairs
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
    {
        const auto cloud = oracle::random_cloud(10, 2, 200 + seed);
        for (double t : {0.1, 0.3, 0.6, 1.2})
        {
            const double got = defect_at(cloud, t, {});
            const double want = oracle::defect(oracle::rows(cloud), t, 2, 20000);
            EXPECT_GE(got, want - 1e-12);
            EXPECT_NEAR(got, want, 1e-4);
        }
    }
}

TEST(DefectProfile, ParallelScheduleDoesNotChangeResults)
{
    const auto cloud = oracle::random_cloud(300, 2, 31);
    DefectConfig c;
    c.max_scale = 0.3;
    auto a2 = defect_profile(cloud, c);
    c.workers = 3;
    EXPECT_EQ(a2.values(), defect_profile(cloud, c).values());
    c.order = 3;
    c.workers = 1;
    const auto a = defect_profile(cloud, c);
    c.workers = 4;
    const auto b = defect_profile(cloud, c);
    EXPECT_EQ(a.values(), b.values());
}

TEST(DefectProfile, StabilityUnderJitter)
{
    const double eps = 0.01;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const auto x = oracle::random_cloud(120, 2, 300 + seed);
        std::vector<double> flat = x.flat();
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            const double a = M_PI * u(rng), r = eps * std::abs(u(rng));
            flat[2 * i] += r * std::cos(a);
            flat[2 * i + 1] += r * std::sin(a);
        }
        const PointCloud xt(std::move(flat), 2);
        ASSERT_LE(hausdorff(x, xt), eps);
        DefectConfig c;
        c.grid = uniform_grid(1.0, 100);
        const auto hx = defect_profile(x, c);
        const auto ht = defect_profile(xt, c);
        for (std::size_t i = 0; i < hx.size(); ++i)
        {
            const double t = hx.scales()[i];
            if (t < eps)
                continue;
            const auto lo = ht.index_at_or_below(t - eps);
            const auto hi = ht.index_at_or_above(t + eps);
            ASSERT_TRUE(lo.has_value());
            EXPECT_LE(ht.values()[*lo] - 2 * eps, hx.values()[i]);
            if (hi)
                EXPECT_LE(hx.values()[i], ht.values()[*hi] + 2 * eps);
        }
    }
}

TEST(DefectProfile, CircleHalfScaleValue)
{
    const auto cloud = sample(Circle{1.0}, 2000, 1);
    const double covering = 0.5 * estimate_epsilon(cloud);
    const double h = defect_at(cloud, 0.5, {});
    EXPECT_NEAR(h, 1.0 - std::sqrt(0.75), 3 * covering);
}

TEST(FirstDiagonalTouch, Examples)
{
    const auto step = defect_profile(kTwoPoints, {});
    const auto t = first_diagonal_touch(step, 0.01);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, 1.0, 1e-12);

    std::vector<double> s = uniform_grid(1.0, 200), h;
    for (double x : s)
        h.push_back(x * x / 4);
    const DefectProfile quad(s, h, 2);
    EXPECT_FALSE(first_diagonal_touch(quad, 0.01).has_value());

    EXPECT_FALSE(first_diagonal_touch(step, 1.0).has_value());
    EXPECT_THROW(first_diagonal_touch(step, 0.0), InputError);
}
