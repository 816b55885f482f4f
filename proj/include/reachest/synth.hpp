#ifndef REACHEST_SYNTH_HPP
#define REACHEST_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "geom/point.hpp"

namespace reachest {

/// Seeded generator with fixed, platform-independent conversions.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal by the Box-Muller transform.
    double normal()
    {
        if (spare_)
        {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double rho = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = rho * std::sin(phi);
        return rho * std::cos(phi);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Bump profile

struct BumpValue
{
    double value = 0.0;
    double second_derivative_at_zero = 0.0;
};

namespace detail {

inline double psi(double s)
{
    const double a = std::abs(s);
    if (a >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

inline double psi_prime(double s)
{
    const double a = std::abs(s);
    if (a >= 1.0)
        return 0.0;
    const double q = 1.0 - s * s;
    return psi(s) * (-2.0 * s / (q * q));
}

// psi''(0) by a sixth-order central difference.
inline double psi_second_at_zero()
{
    static const double value = [] {
        const double h = 1e-3;
        const double f0 = psi(0.0), f1 = psi(h), f2 = psi(2 * h), f3 = psi(3 * h);
        return (2.0 * f3 - 27.0 * f2 + 270.0 * f1 - 490.0 * f0 + 270.0 * f1 - 27.0 * f2 + 2.0 * f3) /
               (180.0 * h * h);
    }();
    return value;
}

// sup |psi'| over [0, 1], on a fine grid.
inline double psi_prime_sup()
{
    static const double value = [] {
        double best = 0.0;
        for (int i = 0; i <= 100000; ++i)
            best = std::max(best, std::abs(psi_prime(i / 100000.0)));
        return best * (1.0 + 1e-6);
    }();
    return value;
}

} // namespace detail

/// psi(s) = exp(1 - 1/(1 - s^2)) on |s| < 1, zero elsewhere; also psi''(0).
inline BumpValue bump_profile(double s)
{
    return {detail::psi(s), detail::psi_second_at_zero()};
}

using BumpFunction = std::function<double(double)>;

/**
 * z -> z + gamma^k psi(|z - center| / gamma) e_last, applied to each point.
 * The center defaults to the origin.
 */
inline PointCloud perturb_bump(const PointCloud& cloud, double gamma, int k, const BumpFunction& psi = detail::psi,
                               std::optional<std::vector<double>> center = std::nullopt)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InputError("perturb_bump: gamma must be positive");
    if (k < 1)
        throw InputError("perturb_bump: order k must be positive");
    const std::size_t d = cloud.dim();
    if (d < 2)
        throw InputError("perturb_bump: cloud dimension must be at least 2");
    std::vector<double> c = center.value_or(std::vector<double>(d, 0.0));
    require_same_dim(c.size(), d, "perturb_bump");

    const double amp = std::pow(gamma, k);
    std::vector<double> flat = cloud.flat();
    for (std::size_t i = 0; i < cloud.size(); ++i)
    {
        double r2 = 0.0;
        for (std::size_t m = 0; m < d; ++m)
        {
            const double v = flat[i * d + m] - c[m];
            r2 += v * v;
        }
        const double s = std::sqrt(r2) / gamma;
        if (s < 1.0)
            flat[i * d + d - 1] += amp * psi(s);
    }
    return PointCloud(std::move(flat), d);
}

// ---------------------------------------------------------------------------
// Manifold specifications

/// Circle of the given radius centred at the origin of R^2.
struct Circle
{
    double radius = 1.0;
};

/// Round d-sphere in R^(d+1) centred at the origin.
struct Sphere
{
    int d = 2;
    double radius = 1.0;
};

/// Torus of revolution around the z axis: tube radius `minor`, centre-line radius `major`.
struct Torus
{
    double minor = 0.5;
    double major = 2.0;
};

/// d-sphere of radius r with a bump of width gamma and height gamma^k at its north pole.
struct BumpSphere
{
    int d = 1;
    double radius = 1.0;
    double gamma = 0.2;
    int k = 3;
};

/// Two parallel segments y = +-half_gap, x in [-length/2, length/2].
struct TwoSegmentBottleneck
{
    double length = 1.0;
    double half_gap = 0.3;
};

/**
 * Planar closed curve: two circular lobes of radius `lobe` joined by a
 * straight neck y = +-neck over |x| <= neck_half_length. Each neck end turns
 * into its lobe along a fillet arc of radius `smoothing` tangent to both.
 */
struct Dumbbell
{
    double lobe = 1.0;
    double neck = 0.3;
    double smoothing = 1.0;
    double neck_half_length = 0.2;
};

using ManifoldSpec = std::variant<Circle, Sphere, Torus, BumpSphere, TwoSegmentBottleneck, Dumbbell>;

enum class BoundKind
{
    exact,
    upper,
    lower
};

enum class Provenance
{
    analytic,
    oracle
};

struct TruthValue
{
    double value = 0.0;
    BoundKind bound = BoundKind::exact;
    Provenance provenance = Provenance::analytic;
};

/// Known reach quantities of a synthetic manifold; reach = min(local, wfs).
struct GroundTruth
{
    TruthValue r_local;
    TruthValue r_wfs;
    TruthValue r;
};

namespace detail {

inline void require_length(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw InputError(std::string(what) + " must be positive and finite");
}

// Derived layout of a dumbbell's upper-right quarter.
struct DumbbellLayout
{
    double lobe_x;       // lobe centre (lobe_x, 0)
    double fillet_angle; // fillet arc angle, measured from straight down
    double lobe_angle;   // polar angle about the lobe centre where the fillet meets it
    double quarter;      // arc length of one quarter
};

inline DumbbellLayout dumbbell_layout(const Dumbbell& s)
{
    const double r = s.lobe, w = s.neck, rho = s.smoothing, xf = s.neck_half_length;
    const double lobe_x = xf + std::sqrt((r + rho) * (r + rho) - (w + rho) * (w + rho));
    const double fillet_angle = std::acos((w + rho) / (r + rho));
    const double lobe_angle = std::atan2(w + rho, xf - lobe_x);
    return {lobe_x, fillet_angle, lobe_angle, xf + rho * fillet_angle + r * lobe_angle};
}

// Point at arc length u in [0, quarter] of the upper-right quarter, starting
// at (0, w) and ending at (lobe_x + r, 0).
inline void dumbbell_quarter_point(const Dumbbell& s, const DumbbellLayout& L, double u, double& x, double& y)
{
    const double r = s.lobe, w = s.neck, rho = s.smoothing, xf = s.neck_half_length;
    if (u <= xf)
    {
        x = u;
        y = w;
        return;
    }
    u -= xf;
    if (u <= rho * L.fillet_angle)
    {
        // fillet centre (xf, w + rho); start straight below it, turn counterclockwise
        const double a = u / rho;
        x = xf + rho * std::sin(a);
        y = w + rho - rho * std::cos(a);
        return;
    }
    u -= rho * L.fillet_angle;
    // lobe: polar angle decreasing from lobe_angle to 0
    const double theta = L.lobe_angle - u / r;
    x = L.lobe_x + r * std::cos(theta);
    y = r * std::sin(theta);
}

} // namespace detail

/// Throws InputError when a spec violates its invariants.
inline void validate(const ManifoldSpec& spec)
{
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>)
                detail::require_length(s.radius, "circle radius");
            else if constexpr (std::is_same_v<T, Sphere>)
            {
                if (s.d < 1)
                    throw InputError("sphere dimension must be positive");
                detail::require_length(s.radius, "sphere radius");
            }
            else if constexpr (std::is_same_v<T, Torus>)
            {
                detail::require_length(s.minor, "torus minor radius");
                detail::require_length(s.major, "torus major radius");
                if (!(s.major > s.minor))
                    throw InputError("torus major radius must exceed the minor radius");
            }
            else if constexpr (std::is_same_v<T, BumpSphere>)
            {
                if (s.d < 1)
                    throw InputError("bump sphere dimension must be positive");
                detail::require_length(s.radius, "bump sphere radius");
                if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma))
                    throw InputError("bump width gamma must be nonnegative");
                if (s.k < 3)
                    throw InputError("bump order k must be at least 3");
                if (!(s.gamma < s.radius))
                    throw InputError("bump width gamma must be smaller than the radius");
                if (!(std::pow(s.gamma, s.k - 1) * detail::psi_prime_sup() < 1.0))
                    throw InputError("bump too strong: gamma^(k-1) sup|psi'| must be below 1");
            }
            else if constexpr (std::is_same_v<T, TwoSegmentBottleneck>)
            {
                detail::require_length(s.length, "segment length");
                detail::require_length(s.half_gap, "half gap");
            }
            else if constexpr (std::is_same_v<T, Dumbbell>)
            {
                detail::require_length(s.lobe, "lobe radius");
                detail::require_length(s.neck, "neck half gap");
                detail::require_length(s.smoothing, "smoothing radius");
                detail::require_length(s.neck_half_length, "neck half length");
                if (!(s.neck < s.lobe))
                    throw InputError("dumbbell neck half gap must be smaller than the lobe radius");
            }
        },
        spec);
}

/// Ambient dimension of the samples.
inline std::size_t ambient_dim(const ManifoldSpec& spec)
{
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, BumpSphere>)
                return static_cast<std::size_t>(s.d) + 1;
            else if constexpr (std::is_same_v<T, Torus>)
                return 3;
            else
                return 2;
        },
        spec);
}

/// Intrinsic dimension of the manifold.
inline int intrinsic_dim(const ManifoldSpec& spec)
{
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Sphere> || std::is_same_v<T, BumpSphere>)
                return s.d;
            else if constexpr (std::is_same_v<T, Torus>)
                return 2;
            else
                return 1;
        },
        spec);
}

/// One-line description, e.g. "torus minor=0.5 major=2".
inline std::string describe(const ManifoldSpec& spec)
{
    std::ostringstream out;
    out.precision(17);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>)
                out << "circle radius=" << s.radius;
            else if constexpr (std::is_same_v<T, Sphere>)
                out << "sphere d=" << s.d << " radius=" << s.radius;
            else if constexpr (std::is_same_v<T, Torus>)
                out << "torus minor=" << s.minor << " major=" << s.major;
            else if constexpr (std::is_same_v<T, BumpSphere>)
                out << "bumpsphere d=" << s.d << " radius=" << s.radius << " gamma=" << s.gamma << " k=" << s.k;
            else if constexpr (std::is_same_v<T, TwoSegmentBottleneck>)
                out << "twosegment length=" << s.length << " half_gap=" << s.half_gap;
            else
                out << "dumbbell lobe=" << s.lobe << " neck=" << s.neck << " smoothing=" << s.smoothing
                    << " neck_half_length=" << s.neck_half_length;
        },
        spec);
    return out.str();
}

namespace detail {

inline void sphere_point(Rng& rng, int d, double radius, double* out)
{
    const std::size_t m = static_cast<std::size_t>(d) + 1;
    double n2 = 0.0;
    do
    {
        n2 = 0.0;
        for (std::size_t k = 0; k < m; ++k)
        {
            out[k] = rng.normal();
            n2 += out[k] * out[k];
        }
    } while (!(n2 > 1e-300));
    const double scale = radius / std::sqrt(n2);
    for (std::size_t k = 0; k < m; ++k)
        out[k] *= scale;
}

// Volume distortion of the bump map at a sphere point z (apex c = r e_last).
inline double bump_jacobian(const double* z, std::size_t m, const BumpSphere& s)
{
    double r2 = 0.0;
    for (std::size_t k = 0; k < m; ++k)
    {
        const double v = z[k] - (k + 1 == m ? s.radius : 0.0);
        r2 += v * v;
    }
    const double rr = std::sqrt(r2);
    if (!(rr > 0.0) || rr >= s.gamma)
        return 1.0;
    const double x_last = (z[m - 1] - s.radius) / s.gamma;
    const double grad_last = psi_prime(rr / s.gamma) * x_last / (rr / s.gamma);
    return 1.0 + std::pow(s.gamma, s.k - 1) * grad_last;
}

} // namespace detail

/**
 * n points drawn i.i.d. from the uniform distribution on the manifold,
 * reproducible from the seed.
 */
inline PointCloud sample(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed)
{
    validate(spec);
    if (n < 1)
        throw InputError("sample: n must be at least 1");
    const std::size_t m = ambient_dim(spec);
    std::vector<double> flat(n * m);
    Rng rng(seed);

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            for (std::size_t i = 0; i < n; ++i)
            {
                double* p = flat.data() + i * m;
                if constexpr (std::is_same_v<T, Circle>)
                {
                    const double a = 2.0 * std::numbers::pi * rng.uniform();
                    p[0] = s.radius * std::cos(a);
                    p[1] = s.radius * std::sin(a);
                }
                else if constexpr (std::is_same_v<T, Sphere>)
                    detail::sphere_point(rng, s.d, s.radius, p);
                else if constexpr (std::is_same_v<T, Torus>)
                {
                    // area element is proportional to major + minor cos(theta)
                    double theta = 0.0;
                    while (true)
                    {
                        theta = 2.0 * std::numbers::pi * rng.uniform();
                        if (rng.uniform() * (s.major + s.minor) <= s.major + s.minor * std::cos(theta))
                            break;
                    }
                    const double phi = 2.0 * std::numbers::pi * rng.uniform();
                    const double rho = s.major + s.minor * std::cos(theta);
                    p[0] = rho * std::cos(phi);
                    p[1] = rho * std::sin(phi);
                    p[2] = s.minor * std::sin(theta);
                }
                else if constexpr (std::is_same_v<T, BumpSphere>)
                {
                    if (s.gamma == 0.0)
                        detail::sphere_point(rng, s.d, s.radius, p);
                    else
                    {
                        const double jmax = 1.0 + std::pow(s.gamma, s.k - 1) * detail::psi_prime_sup();
                        do
                            detail::sphere_point(rng, s.d, s.radius, p);
                        while (rng.uniform() * jmax > detail::bump_jacobian(p, m, s));
                    }
                }
                else if constexpr (std::is_same_v<T, TwoSegmentBottleneck>)
                {
                    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
                    p[0] = s.length * (rng.uniform() - 0.5);
                    p[1] = side * s.half_gap;
                }
                else
                {
                    const auto L = detail::dumbbell_layout(s);
                    const double u = 4.0 * L.quarter * rng.uniform();
                    const int q = std::min(3, static_cast<int>(u / L.quarter));
                    double x = 0.0, y = 0.0;
                    detail::dumbbell_quarter_point(s, L, u - q * L.quarter, x, y);
                    p[0] = (q == 1 || q == 2) ? -x : x;
                    p[1] = (q >= 2) ? -y : y;
                }
            }
        },
        spec);

    if (const auto* b = std::get_if<BumpSphere>(&spec); b && b->gamma > 0.0)
    {
        std::vector<double> apex(m, 0.0);
        apex[m - 1] = b->radius;
        return perturb_bump(PointCloud(std::move(flat), m), b->gamma, b->k, detail::psi, apex);
    }
    return PointCloud(std::move(flat), m);
}

/// Analytic reach quantities (or bounds on them) for a spec.
inline GroundTruth ground_truth(const ManifoldSpec& spec)
{
    validate(spec);
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [&](const auto& s) -> GroundTruth {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Sphere>)
                return {{s.radius}, {s.radius}, {s.radius}};
            else if constexpr (std::is_same_v<T, Torus>)
            {
                // inner equator curvature 1/(major - minor); hole centre at distance major - minor
                const double v = std::min(s.minor, s.major - s.minor);
                return {{v}, {v}, {v}};
            }
            else if constexpr (std::is_same_v<T, BumpSphere>)
            {
                if (s.gamma == 0.0)
                    return {{s.radius}, {s.radius}, {s.radius}};
                const double c = -detail::psi_second_at_zero();
                const double upper = 1.0 / (1.0 / s.radius + c * s.radius * std::pow(s.gamma, s.k - 2));
                return {{upper, BoundKind::upper}, {s.radius, BoundKind::lower}, {upper, BoundKind::upper}};
            }
            else if constexpr (std::is_same_v<T, TwoSegmentBottleneck>)
                return {{inf}, {s.half_gap}, {s.half_gap}};
            else
            {
                const double loc = std::min(s.lobe, s.smoothing);
                return {{loc}, {s.neck}, {std::min(loc, s.neck)}};
            }
        },
        spec);
}

} // namespace reachest

#endif
