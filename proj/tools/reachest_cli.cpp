// reachest: sample synthetic manifolds, compute convexity defect profiles,
// estimate reach, and run Monte Carlo rate experiments.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <reachest/reachest.hpp>

namespace {

using namespace reachest;

struct SpecFlags
{
    std::string manifold = "circle";
    std::optional<double> radius, minor, major, gamma, neck, lobe, length, smoothing;
    std::optional<int> order;
    std::optional<int> d;
};

struct ParamFlags
{
    std::optional<double> epsilon, rmax, rmin, fmin, length_unit;
    int k = 3;
};

struct DefectFlags
{
    std::optional<double> max_scale;
    std::size_t grid_size = 200;
    int simplex_order = 2;
    int triple_grid = 15;
};

void add_spec_flags(CLI::App& app, SpecFlags& f)
{
    app.add_option("--manifold", f.manifold, "circle | sphere | torus | bumpsphere | twosegment | dumbbell")
        ->capture_default_str();
    app.add_option("--radius", f.radius, "circle, sphere or bump sphere radius");
    app.add_option("--minor", f.minor, "torus tube radius");
    app.add_option("--major", f.major, "torus centre-line radius");
    app.add_option("--gamma", f.gamma, "bump width");
    app.add_option("--order", f.order, "bump order k");
    app.add_option("--neck", f.neck, "half gap of the two-segment or dumbbell neck");
    app.add_option("--lobe", f.lobe, "dumbbell lobe radius");
    app.add_option("--length", f.length, "two-segment length");
    app.add_option("--smoothing", f.smoothing, "dumbbell fillet radius");
}

void add_param_flags(CLI::App& app, ParamFlags& f, std::optional<int>& d)
{
    app.add_option("--epsilon", f.epsilon, "Hausdorff error proxy (estimated from the cloud when absent)");
    app.add_option("--rmax", f.rmax, "upper cap on every estimate");
    app.add_option("--rmin", f.rmin, "lower reach bound (enables the epsilon check)");
    app.add_option("--fmin", f.fmin, "density lower bound; with --d gives the cap when --rmax is absent");
    app.add_option("--k", f.k, "regularity order (>= 3)")->capture_default_str();
    app.add_option("--d", d, "intrinsic dimension");
    app.add_option("--length-unit", f.length_unit, "unit for the Delta = eps^p rule");
}

void add_defect_flags(CLI::App& app, DefectFlags& f)
{
    app.add_option("--max-scale", f.max_scale, "largest scale (default: half the diameter)");
    app.add_option("--grid-size", f.grid_size, "number of positive grid scales")->capture_default_str();
    app.add_option("--simplex-order", f.simplex_order, "2: pairs, 3: pairs and sampled triangles")
        ->capture_default_str();
    app.add_option("--triple-grid", f.triple_grid, "barycentric subdivisions per triangle")->capture_default_str();
}

ManifoldSpec build_spec(const SpecFlags& f)
{
    const std::string& m = f.manifold;
    if (m == "circle")
        return Circle{f.radius.value_or(1.0)};
    if (m == "sphere")
        return Sphere{f.d.value_or(2), f.radius.value_or(1.0)};
    if (m == "torus")
        return Torus{f.minor.value_or(0.5), f.major.value_or(2.0)};
    if (m == "bumpsphere")
        return BumpSphere{f.d.value_or(1), f.radius.value_or(1.0), f.gamma.value_or(0.2), f.order.value_or(3)};
    if (m == "twosegment")
        return TwoSegmentBottleneck{f.length.value_or(1.0), f.neck.value_or(0.3)};
    if (m == "dumbbell")
    {
        Dumbbell s;
        s.lobe = f.lobe.value_or(1.0);
        s.neck = f.neck.value_or(0.3);
        s.smoothing = f.smoothing.value_or(s.lobe);
        return s;
    }
    throw InputError("unknown manifold '" + m + "'");
}

ModelParams build_params(const ParamFlags& f, const std::optional<int>& d)
{
    ModelParams p;
    p.k = f.k;
    p.d = d.value_or(1);
    p.r_min = f.rmin;
    p.epsilon = f.epsilon;
    p.f_min = f.fmin;
    p.length_unit = f.length_unit.value_or(1.0);
    if (f.rmax)
        p.r_max = *f.rmax;
    else if (f.fmin && d)
        p.r_max = rmax_from_density(*f.fmin, *d);
    else
        throw InputError("an upper cap is required: pass --rmax, or --fmin together with --d");
    p.validate();
    return p;
}

DefectConfig build_defect(const DefectFlags& f)
{
    DefectConfig c;
    c.order = f.simplex_order;
    c.triple_grid = f.triple_grid;
    c.max_scale = f.max_scale;
    c.grid_size = f.grid_size;
    c.validate();
    return c;
}

PointCloud load_cloud(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    try
    {
        return read_cloud_csv(in);
    }
    catch (const InputError& e)
    {
        throw InputError(path + ": " + e.what());
    }
}

// Runs `write` on the named file, or on stdout for an empty path.
template <typename F>
void with_output(const std::string& path, F&& write)
{
    if (path.empty())
    {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    write(out);
    if (!out)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reach estimation from point clouds via the convexity defect function"};
    app.require_subcommand(1);

    SpecFlags spec;
    ParamFlags params;
    DefectFlags defect;
    std::optional<int> d;
    std::string output;
    std::string input;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::size_t trials = 10;
    std::vector<std::size_t> n_grid;
    std::string summary_path;

    auto* sample_cmd = app.add_subcommand("sample", "write a synthetic point cloud as CSV");
    add_spec_flags(*sample_cmd, spec);
    sample_cmd->add_option("--d", d, "sphere dimension");
    sample_cmd->add_option("-n", n, "number of points")->capture_default_str();
    sample_cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    sample_cmd->add_option("-o", output, "output path (default: stdout)");

    auto* defect_cmd = app.add_subcommand("defect", "write the convexity defect profile of a cloud as t,h CSV");
    defect_cmd->add_option("input", input, "cloud CSV")->required();
    add_defect_flags(*defect_cmd, defect);
    defect_cmd->add_option("-o", output, "output path (default: stdout)");

    auto* reach_cmd = app.add_subcommand("reach", "estimate the reach of a cloud");
    reach_cmd->add_option("input", input, "cloud CSV")->required();
    add_param_flags(*reach_cmd, params, d);
    add_defect_flags(*reach_cmd, defect);
    reach_cmd->add_option("-o", output, "JSON output path (default: stdout)");

    auto* rates_cmd = app.add_subcommand("rates", "Monte Carlo error of the estimator across sample sizes");
    add_spec_flags(*rates_cmd, spec);
    add_param_flags(*rates_cmd, params, d);
    add_defect_flags(*rates_cmd, defect);
    rates_cmd->add_option("--n-grid", n_grid, "sample sizes (at least 3 distinct)")->delimiter(',')->required();
    rates_cmd->add_option("--trials", trials, "runs per sample size")->capture_default_str();
    rates_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    rates_cmd->add_option("-o", output, "per-run CSV path (default: stdout)");
    rates_cmd->add_option("--summary", summary_path, "summary JSON path (default: <output>.summary.json)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (sample_cmd->parsed())
        {
            const auto s = build_spec(spec);
            const auto cloud = sample(s, n, seed);
            with_output(output, [&](std::ostream& out) {
                write_cloud_csv(out, cloud,
                                {"reachest sample", "manifold: " + describe(s), "n: " + std::to_string(n),
                                 "seed: " + std::to_string(seed)});
            });
        }
        else if (defect_cmd->parsed())
        {
            const auto cloud = load_cloud(input);
            const auto profile = defect_profile(cloud, build_defect(defect));
            with_output(output, [&](std::ostream& out) { write_profile_csv(out, profile); });
        }
        else if (reach_cmd->parsed())
        {
            const auto cloud = load_cloud(input);
            const auto p = build_params(params, d);
            const auto est = reach(cloud, p, build_defect(defect));
            for (const auto& w : est.warnings)
                std::cerr << "warning: " << w << '\n';
            std::cout << format_decimal(est.r_hat) << '\n';
            with_output(output, [&](std::ostream& out) { out << to_json(est).dump(2) << '\n'; });
        }
        else if (rates_cmd->parsed())
        {
            RateConfig cfg;
            cfg.spec = build_spec(spec);
            cfg.n_grid = n_grid;
            cfg.trials = trials;
            cfg.base_seed = seed;
            if (!d)
                d = intrinsic_dim(cfg.spec);
            cfg.params = build_params(params, d);
            cfg.defect = build_defect(defect);
            const auto report = run_rates(cfg);
            const auto summary = rate_summary_json(report, cfg);
            with_output(output, [&](std::ostream& out) { write_rate_rows_csv(out, report); });
            if (summary_path.empty() && !output.empty())
                summary_path = output + ".summary.json";
            if (!summary_path.empty())
                with_output(summary_path, [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
            else
                std::cerr << summary.dump(2) << '\n';
        }
        return 0;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
