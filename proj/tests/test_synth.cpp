#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <reachest/reachest.hpp>

#include "oracles.hpp"

using namespace reachest;

namespace {

double norm(PointView p)
{
    double s = 0.0;
    for (double v : p)
        s += v * v;
    return std::sqrt(s);
}

// Largest curvature of a planar parametrised curve, by central differences.
template <typename F>
double max_curvature(F&& curve, double a, double b, int steps)
{
    const double h = 1e-5;
    double best = 0.0;
    for (int i = 0; i <= steps; ++i)
    {
        const double s = steps ? a + (b - a) * i / steps : a;
        const auto m = curve(s - h), c = curve(s), p = curve(s + h);
        const double dx = (p[0] - m[0]) / (2 * h), dy = (p[1] - m[1]) / (2 * h);
        const double ddx = (p[0] - 2 * c[0] + m[0]) / (h * h), ddy = (p[1] - 2 * c[1] + m[1]) / (h * h);
        best = std::max(best, std::abs(dx * ddy - dy * ddx) / std::pow(dx * dx + dy * dy, 1.5));
    }
    return best;
}

} // namespace

TEST(BumpProfile, Examples)
{
    EXPECT_EQ(bump_profile(0.0).value, 1.0);
    for (double s : {1.0, -1.0, 2.0, -2.0})
        EXPECT_EQ(bump_profile(s).value, 0.0);
    EXPECT_NEAR(bump_profile(0.0).second_derivative_at_zero, -2.0, 1e-6);
}

TEST(BumpProfile, SecondDerivativeMatchesPlainDifference)
{
    const double h = 1e-4;
    const double fd = (bump_profile(h).value - 2 * bump_profile(0.0).value + bump_profile(-h).value) / (h * h);
    EXPECT_NEAR(fd, -2.0, 1e-6);
    EXPECT_NEAR(fd, bump_profile(0.3).second_derivative_at_zero, 1e-6);
}

TEST(BumpProfile, ShapeProperties)
{
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i)
    {
        const double s = i / 1000.0;
        const double v = bump_profile(s).value;
        EXPECT_EQ(v, bump_profile(-s).value);
        EXPECT_LE(v, prev);
        if (s < 1.0)
            EXPECT_GT(v, 0.0);
        prev = v;
    }
}

TEST(PerturbBump, Examples)
{
    const double g = 0.2;
    const PointCloud far{Point{2 * g, 0.0}, Point{0.0, -2 * g}};
    EXPECT_EQ(perturb_bump(far, g, 3), far);

    const auto apex = perturb_bump(PointCloud{Point{0.0, 0.0}}, g, 3);
    EXPECT_EQ(apex[0][0], 0.0);
    EXPECT_NEAR(apex[0][1], std::pow(g, 3), 1e-15);
}

TEST(PerturbBump, HalvingGammaDividesApexShiftByEight)
{
    auto cloud = sample(Circle{}, 500, 3);
    std::vector<double> flat = cloud.flat();
    flat.push_back(0.0);
    flat.push_back(0.0); // the origin is the bump centre
    const PointCloud c(flat, 2);
    const auto a = perturb_bump(c, 0.4, 3);
    const auto b = perturb_bump(c, 0.2, 3);
    const std::size_t last = c.size() - 1;
    EXPECT_NEAR(a[last][1] / b[last][1], 8.0, 1e-12);
}

TEST(PerturbBump, ConvergesToIdentity)
{
    const auto cloud = oracle::random_cloud(400, 3, 8, -0.3, 0.3);
    for (double g : {0.2, 0.1, 0.05})
    {
        const auto moved = perturb_bump(cloud, g, 3);
        double worst = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i)
            worst = std::max(worst, dist(cloud[i], moved[i]));
        EXPECT_LE(worst, std::pow(g, 3) + 1e-15);
    }
}

TEST(PerturbBump, Errors)
{
    EXPECT_THROW(perturb_bump(PointCloud{Point{0.0, 0.0}}, 0.0, 3), InputError);
    EXPECT_THROW(perturb_bump(PointCloud{Point{0.0}}, 0.1, 3), InputError);
}

TEST(Sample, CircleOnManifold)
{
    const auto c = sample(Circle{1.0}, 4, 7);
    ASSERT_EQ(c.size(), 4u);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(norm(c[i]), 1.0, 1e-12);
}

TEST(Sample, SphereMeanNearOrigin)
{
    const auto c = sample(Sphere{2, 1.0}, 1000, 1);
    ASSERT_EQ(c.dim(), 3u);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
    {
        EXPECT_NEAR(norm(c[i]), 1.0, 1e-12);
        for (int k = 0; k < 3; ++k)
            mean[k] += c[i][k] / 1000.0;
    }
    EXPECT_LT(std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]), 0.1);
}

TEST(Sample, BumpWithZeroGammaIsTheSphere)
{
    EXPECT_EQ(sample(BumpSphere{2, 1.0, 0.0, 3}, 300, 5), sample(Sphere{2, 1.0}, 300, 5));
    EXPECT_EQ(sample(BumpSphere{1, 1.0, 0.0, 3}, 300, 5), sample(Sphere{1, 1.0}, 300, 5));
}

TEST(Sample, Reproducible)
{
    const std::vector<ManifoldSpec> specs = {Circle{}, Sphere{}, Torus{}, BumpSphere{}, TwoSegmentBottleneck{},
                                             Dumbbell{}};
    for (const auto& s : specs)
    {
        EXPECT_EQ(sample(s, 200, 99), sample(s, 200, 99)) << describe(s);
        EXPECT_NE(sample(s, 200, 99), sample(s, 200, 100)) << describe(s);
    }
}

TEST(Sample, TorusOnManifoldAndAreaWeighted)
{
    const Torus t{0.5, 2.0};
    const auto c = sample(t, 4000, 2);
    std::size_t outer = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
    {
        const double rho = std::hypot(c[i][0], c[i][1]);
        EXPECT_NEAR(std::hypot(rho - t.major, c[i][2]), t.minor, 1e-12);
        outer += rho > t.major;
    }
    // outer half carries (pi A + 2 r) / (2 pi A) of the area
    const double want = (M_PI * 2.0 + 2 * 0.5) / (2 * M_PI * 2.0);
    EXPECT_NEAR(static_cast<double>(outer) / c.size(), want, 0.03);
}

TEST(Sample, TwoSegmentOnManifold)
{
    const auto c = sample(TwoSegmentBottleneck{1.0, 0.3}, 500, 1);
    for (std::size_t i = 0; i < c.size(); ++i)
    {
        EXPECT_EQ(std::abs(c[i][1]), 0.3);
        EXPECT_LE(std::abs(c[i][0]), 0.5);
    }
}

TEST(Sample, BumpSphereOnGraph)
{
    const BumpSphere b{1, 1.0, 0.2, 3};
    const auto c = sample(b, 4000, 3);
    double max_excess = 0.0;
    std::size_t in_bump = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
    {
        const double x = c[i][0], y = c[i][1];
        if (y > 0.9)
        {
            // y = cos(a) + gamma^k psi(|z - apex| / gamma), z = (sin a, cos a)
            const double a = std::asin(x);
            const double chord = 2 * std::sin(std::abs(a) / 2);
            const double want = std::cos(a) + std::pow(0.2, 3) * bump_profile(chord / 0.2).value;
            EXPECT_NEAR(y, want, 1e-12);
            in_bump += chord < 0.2;
        }
        else
            EXPECT_NEAR(norm(c[i]), 1.0, 1e-12);
        max_excess = std::max(max_excess, norm(c[i]) - 1.0);
    }
    EXPECT_GT(in_bump, 0u);
    EXPECT_LE(max_excess, 0.008 + 1e-12);
    EXPECT_GT(max_excess, 0.007);
}

TEST(Sample, DumbbellOnCurve)
{
    const Dumbbell s{1.0, 0.3, 1.0, 0.2};
    const auto L = detail::dumbbell_layout(s);
    const auto c = sample(s, 3000, 4);
    for (std::size_t i = 0; i < c.size(); ++i)
    {
        const double x = std::abs(c[i][0]), y = std::abs(c[i][1]);
        const double neck = (x <= s.neck_half_length + 1e-12) ? std::abs(y - s.neck) : INFINITY;
        const double fillet = std::abs(std::hypot(x - s.neck_half_length, y - s.neck - s.smoothing) - s.smoothing);
        const double lobe = std::abs(std::hypot(x - L.lobe_x, y) - s.lobe);
        EXPECT_LE(std::min({neck, fillet, lobe}), 1e-12);
        if (x <= s.neck_half_length)
            EXPECT_NEAR(y, s.neck, 1e-12);
    }
}

TEST(Sample, Errors)
{
    EXPECT_THROW(sample(Circle{-1.0}, 10, 1), InputError);
    EXPECT_THROW(sample(Torus{2.0, 1.0}, 10, 1), InputError);
    EXPECT_THROW(sample(Dumbbell{1.0, 1.5}, 10, 1), InputError);
    EXPECT_THROW(sample(BumpSphere{1, 1.0, 0.9, 3}, 10, 1), InputError);
    EXPECT_THROW(sample(Circle{}, 0, 1), InputError);
}

TEST(GroundTruth, Examples)
{
    const auto c = ground_truth(Circle{2.0});
    EXPECT_EQ(c.r_local.value, 2.0);
    EXPECT_EQ(c.r_wfs.value, 2.0);
    EXPECT_EQ(c.r.value, 2.0);

    EXPECT_EQ(ground_truth(Torus{0.5, 2.0}).r.value, 0.5);

    const auto b = ground_truth(BumpSphere{1, 1.0, 0.2, 3});
    EXPECT_NEAR(b.r_local.value, 1.0 / (1.0 + 2.0 * 0.2), 1e-6);
    EXPECT_EQ(b.r_local.bound, BoundKind::upper);
    EXPECT_EQ(b.r_wfs.bound, BoundKind::lower);

    const auto t = ground_truth(TwoSegmentBottleneck{1.0, 0.3});
    EXPECT_TRUE(std::isinf(t.r_local.value));
    EXPECT_EQ(t.r.value, 0.3);

    EXPECT_EQ(ground_truth(Dumbbell{1.0, 0.3}).r.value, 0.3);
}

TEST(GroundTruth, ReachIsMinOfParts)
{
    const std::vector<ManifoldSpec> specs = {Circle{3.0},         Sphere{3, 0.5},          Torus{0.5, 2.0},
                                             Torus{1.0, 1.5},     BumpSphere{2, 1, 0.3, 4}, TwoSegmentBottleneck{2, 0.1},
                                             Dumbbell{1.0, 0.3, 0.5}};
    for (const auto& s : specs)
    {
        const auto g = ground_truth(s);
        EXPECT_EQ(g.r.value, std::min(g.r_local.value, g.r_wfs.value)) << describe(s);
    }
}

TEST(GroundTruth, BumpBoundDecreasesInGamma)
{
    double prev = INFINITY;
    for (double g : {0.05, 0.1, 0.2, 0.3, 0.4})
    {
        const double v = ground_truth(BumpSphere{1, 1.0, g, 3}).r_local.value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(GroundTruth, BumpBoundAgreesWithCurvatureOracle)
{
    for (double g : {0.1, 0.2, 0.3})
    {
        const BumpSphere b{1, 1.0, g, 3};
        auto curve = [&](double a) {
            const double chord = 2 * std::sin(std::abs(a) / 2);
            return std::array<double, 2>{std::sin(a), std::cos(a) + std::pow(g, 3) * bump_profile(chord / g).value};
        };
        const double kappa = max_curvature(curve, -0.5, 0.5, 20000);
        EXPECT_LE(1.0 / kappa, ground_truth(b).r_local.value * (1 + 1e-4)) << "gamma " << g;
        // apex curvature 1 + c r gamma^(k-2)
        const double apex = max_curvature(curve, 0.0, 0.0, 0);
        EXPECT_NEAR(apex, 1.0 + 2.0 * g, 1e-3);
    }
}

TEST(GroundTruth, TorusLocalReachAgreesWithCurvatureOracle)
{
    // principal curvatures from the first and second fundamental forms
    for (const Torus t : {Torus{0.5, 2.0}, Torus{1.0, 1.5}})
    {
        double kmax = 0.0;
        const double h = 1e-4;
        auto X = [&](double th, double ph) {
            const double rho = t.major + t.minor * std::cos(th);
            return Eigen::Vector3d(rho * std::cos(ph), rho * std::sin(ph), t.minor * std::sin(th));
        };
        for (int i = 0; i < 720; ++i)
        {
            const double th = 2 * M_PI * i / 720, ph = 0.3;
            const Eigen::Vector3d Xu = (X(th + h, ph) - X(th - h, ph)) / (2 * h);
            const Eigen::Vector3d Xv = (X(th, ph + h) - X(th, ph - h)) / (2 * h);
            const Eigen::Vector3d Xuu = (X(th + h, ph) - 2 * X(th, ph) + X(th - h, ph)) / (h * h);
            const Eigen::Vector3d Xvv = (X(th, ph + h) - 2 * X(th, ph) + X(th, ph - h)) / (h * h);
            const Eigen::Vector3d Xuv =
                (X(th + h, ph + h) - X(th + h, ph - h) - X(th - h, ph + h) + X(th - h, ph - h)) / (4 * h * h);
            const Eigen::Vector3d nrm = Xu.cross(Xv).normalized();
            Eigen::Matrix2d I, II;
            I << Xu.dot(Xu), Xu.dot(Xv), Xu.dot(Xv), Xv.dot(Xv);
            II << Xuu.dot(nrm), Xuv.dot(nrm), Xuv.dot(nrm), Xvv.dot(nrm);
            const Eigen::EigenSolver<Eigen::Matrix2d> es(I.inverse() * II);
            for (int k = 0; k < 2; ++k)
                kmax = std::max(kmax, std::abs(es.eigenvalues()[k].real()));
        }
        EXPECT_NEAR(1.0 / kmax, ground_truth(t).r_local.value, 1e-4);
    }
}

TEST(GroundTruth, TorusTubeCentreIsAnEquidistantCriticalPoint)
{
    // a meridian circle of the torus has the tube centre as its enclosing
    // centre, at distance `minor` from the whole surface
    const Torus t{0.5, 2.0};
    std::vector<Point> meridian;
    for (int i = 0; i < 64; ++i)
    {
        const double th = 2 * M_PI * i / 64;
        meridian.push_back(Point{t.major + t.minor * std::cos(th), 0.0, t.minor * std::sin(th)});
    }
    const auto ball = min_enclosing_ball(meridian);
    EXPECT_NEAR(ball.radius, 0.5, 1e-12);
    const auto dense = sample(t, 20000, 1);
    const auto rows = oracle::rows(dense);
    // only the phi = 0 meridian is at exactly 0.5, so a finite sample
    // approaches it from above, to second order in the spacing
    const double d = oracle::nearest(rows, ball.center.coords());
    EXPECT_GE(d, 0.5 - 1e-12);
    EXPECT_LT(d, 0.5 + 1e-4);
}

TEST(Describe, NamesTheManifold)
{
    EXPECT_EQ(describe(Circle{2.0}), "circle radius=2");
    EXPECT_EQ(describe(Torus{0.5, 2.0}), "torus minor=0.5 major=2");
    EXPECT_EQ(ambient_dim(Sphere{3, 1.0}), 4u);
    EXPECT_EQ(intrinsic_dim(Torus{}), 2);
}
