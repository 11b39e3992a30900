#include "polyvol/cli.hpp"

#include "polyvol/analytics.hpp"
#include "polyvol/exact.hpp"
#include "polyvol/expression.hpp"
#include "polyvol/generators.hpp"
#include "polyvol/inner_ball.hpp"
#include "polyvol/io.hpp"
#include "polyvol/transforms.hpp"
#include "polyvol/volume.hpp"
#include "polyvol/walks.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace polyvol {

namespace {

const std::map<std::string, WalkKind> kWalks{{"cdhr", WalkKind::CDHR}, {"rdhr", WalkKind::RDHR},
                                             {"baw", WalkKind::BaW},   {"biw", WalkKind::BiW},
                                             {"brdhr", WalkKind::BRDHR}, {"bcdhr", WalkKind::BCDHR}};

const std::map<std::string, VolumeAlgorithm> kAlgorithms{
    {"sob", VolumeAlgorithm::SOB}, {"cg", VolumeAlgorithm::CG}, {"cb", VolumeAlgorithm::CB}};

const std::map<std::string, SubGenerator> kGenerators{{"cube", SubGenerator::cube},
                                                      {"sphere", SubGenerator::sphere},
                                                      {"uniform", SubGenerator::uniform},
                                                      {"gaussian", SubGenerator::gaussian},
                                                      {"exponential", SubGenerator::exponential}};

const std::map<std::string, DirectBody> kBodies{{"unit-simplex", DirectBody::unit_simplex},
                                                {"canonical-simplex", DirectBody::canonical_simplex},
                                                {"ball", DirectBody::ball},
                                                {"hypersphere", DirectBody::hypersphere}};

const std::vector<std::string> kShapes{"cube",        "cross",       "simplex",    "prod-simplex",
                                       "skinny-cube", "rand-hpoly", "rand-vpoly", "rand-zonotope"};

template <typename T>
std::vector<std::string> keys(const std::map<std::string, T>& m)
{
    std::vector<std::string> k;
    for (const auto& [name, value] : m) k.push_back(name);
    return k;
}

// Volume settings shared by every subcommand that runs an engine.
struct VolumeFlags {
    std::string algo, walk;
    double error = 0;
    int walk_length = 0, win_len = 0;
    bool hpoly = false, rounding = false;
    CLI::Option *o_algo = nullptr, *o_error = nullptr, *o_walk = nullptr, *o_wl = nullptr, *o_win = nullptr,
                *o_hpoly = nullptr;

    void add_error(CLI::App* sub) { o_error = sub->add_option("--error", error, "Target relative error"); }

    void add_all(CLI::App* sub)
    {
        o_algo = sub->add_option("--algo", algo, "Engine")->check(CLI::IsMember(keys(kAlgorithms)));
        add_error(sub);
        o_walk = sub->add_option("--walk", walk, "Random walk")->check(CLI::IsMember(keys(kWalks)));
        o_wl = sub->add_option("--walk-length", walk_length, "Steps between recorded points");
        o_win = sub->add_option("--win-len", win_len, "Convergence window length");
        o_hpoly = sub->add_flag("--hpoly", hpoly, "Zonotopes: use the PCA box as the phase body");
        sub->add_flag("--rounding", rounding, "Round the body before estimating");
    }

    VolumeSettings<double> settings(std::uint64_t seed) const
    {
        VolumeSettings<double> s;
        s.seed = seed;
        s.rounding = rounding;
        if (o_algo && o_algo->count()) s.algorithm = kAlgorithms.at(algo);
        if (o_error && o_error->count()) s.error = error;
        if (o_walk && o_walk->count()) s.walk = kWalks.at(walk);
        if (o_wl && o_wl->count()) s.walk_length = walk_length;
        if (o_win && o_win->count()) s.win_len = win_len;
        if (o_hpoly && o_hpoly->count()) s.hpoly = hpoly;
        return s;
    }
};

void print(std::ostream& out, double v) { out << format_scientific(v) << '\n'; }

void print_row(std::ostream& out, const Vec<double>& v)
{
    for (Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_scientific(v(i));
    out << '\n';
}

std::string matrix_json(const Mat<double>& M)
{
    std::ostringstream s;
    s << '[';
    for (Index i = 0; i < M.rows(); ++i) {
        s << (i ? ", [" : "[");
        for (Index j = 0; j < M.cols(); ++j) s << (j ? ", " : "") << format_exact(M(i, j));
        s << ']';
    }
    s << ']';
    return s.str();
}

std::string vector_json(const Vec<double>& v)
{
    std::ostringstream s;
    s << '[';
    for (Index i = 0; i < v.size(); ++i) s << (i ? ", " : "") << format_exact(v(i));
    s << ']';
    return s.str();
}

Index find_date(const ReturnsMatrix& R, const std::string& date, const char* flag)
{
    for (std::size_t i = 0; i < R.dates.size(); ++i)
        if (R.dates[i] == date) return Index(i);
    throw InputError(std::string(flag) + ": date '" + date + "' not found in the returns file");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Volume estimation and sampling for convex polytopes", "polyvol"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    std::uint64_t seed = 0;
    std::function<void()> action;

    // generate
    std::string shape, rep = "h", gen = "uniform", output;
    Index dim = 0, count = 0;
    {
        CLI::App* sub = app.add_subcommand("generate", "Write a standard or random polytope");
        sub->add_option("shape", shape, "Family")->required()->check(CLI::IsMember(kShapes));
        sub->add_option("--dim", dim, "Dimension")->required();
        sub->add_option("--count", count, "Facets, vertices or generators for random families");
        sub->add_option("--rep", rep, "Representation of standard families")->check(CLI::IsMember({"h", "v"}));
        sub->add_option("--generator", gen, "Random generator")->check(CLI::IsMember(keys(kGenerators)));
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Output polytope file")->required();
        sub->callback([&] {
            action = [&] {
                const Representation r = rep == "v" ? Representation::V : Representation::H;
                Polytope<double> P;
                if (shape.rfind("rand-", 0) == 0) {
                    require(count >= 1, "generate: random families need --count");
                    const RandomKind kind = shape == "rand-hpoly"   ? RandomKind::rand_hpoly
                                            : shape == "rand-vpoly" ? RandomKind::rand_vpoly
                                                                    : RandomKind::rand_zonotope;
                    P = generate_random<double>(kind, dim, count, kGenerators.at(gen), seed);
                } else {
                    const StandardKind kind = shape == "cube"           ? StandardKind::cube
                                              : shape == "cross"        ? StandardKind::cross
                                              : shape == "simplex"      ? StandardKind::simplex
                                              : shape == "prod-simplex" ? StandardKind::prod_simplex
                                                                        : StandardKind::skinny_cube;
                    P = generate_standard<double>(kind, dim, r);
                }
                write_polytope(P, output);
            };
        });
    }

    // sample
    std::string file, dist_name = "uniform", mode_file;
    Index n = 0;
    int nburns = 0;
    double variance = 1;
    std::string walk_name;
    int walk_length = 0;
    {
        CLI::App* sub = app.add_subcommand("sample", "Random walk samples from a polytope");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->add_option("-n", n, "Number of points")->required();
        auto* o_walk = sub->add_option("--walk", walk_name, "Random walk")->check(CLI::IsMember(keys(kWalks)));
        auto* o_wl = sub->add_option("--walk-length", walk_length, "Steps between recorded points");
        sub->add_option("--distribution", dist_name, "Target")->check(CLI::IsMember({"uniform", "gaussian"}));
        sub->add_option("--variance", variance, "Gaussian variance");
        sub->add_option("--mode", mode_file, "Gaussian mode, CSV")->check(CLI::ExistingFile);
        auto* o_burn = sub->add_option("--nburns", nburns, "Discarded leading samples");
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Output points CSV")->required();
        sub->callback([&, o_walk, o_wl, o_burn] {
            action = [&, o_walk, o_wl, o_burn] {
                Polytope<double> P = read_polytope(file);
                Rng rng(seed);
                TargetDistribution<double> dist;
                if (dist_name == "gaussian") {
                    require(variance > 0, "sample: variance must be positive");
                    dist.kind = TargetDistribution<double>::Kind::gaussian;
                    dist.variance = variance;
                    if (!mode_file.empty()) dist.mode = read_vector(mode_file);
                }
                SampleMatrix<double> S = std::visit(
                    [&](const auto& q) {
                        WalkParams<double> params = default_walk_params(q, dist, rng);
                        if (o_walk->count()) params.walk = kWalks.at(walk_name);
                        if (o_wl->count()) params.walk_length = walk_length;
                        if (o_burn->count()) params.nburns = nburns;
                        return sample_points(q, n, dist, params, rng);
                    },
                    P);
                write_points(output, S.points);
            };
        });
    }

    // direct-sample
    std::string body;
    double radius = 1;
    {
        CLI::App* sub = app.add_subcommand("direct-sample", "Exact samples from simplices, balls and spheres");
        sub->add_option("--body", body, "Body")->required()->check(CLI::IsMember(keys(kBodies)));
        sub->add_option("--dim", dim, "Dimension")->required();
        sub->add_option("--radius", radius, "Radius of the ball or sphere");
        sub->add_option("-n", n, "Number of points")->required();
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Output points CSV")->required();
        sub->callback([&] {
            action = [&] {
                Rng rng(seed);
                write_points(output, direct_sampling<double>(kBodies.at(body), dim, radius, n, rng).points);
            };
        });
    }

    // volume
    VolumeFlags vf, vf_integrate, vf_approx, vf_linext;
    {
        CLI::App* sub = app.add_subcommand("volume", "Estimate the volume of a polytope");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        vf.add_all(sub);
        sub->add_option("--seed", seed, "Random seed");
        sub->callback([&] {
            action = [&] { print(out, volume(read_polytope(file), vf.settings(seed))); };
        });
    }

    // exact-volume
    {
        CLI::App* sub = app.add_subcommand("exact-volume", "Exact volume (zonotopes or stored volume)");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->callback([&] {
            action = [&] { print(out, exact_vol(read_polytope(file))); };
        });
    }

    // frustum
    std::string a_file;
    double z0 = 0;
    {
        CLI::App* sub = app.add_subcommand("frustum", "Share of the canonical simplex with a.x <= z0");
        sub->add_option("--a", a_file, "Coefficients, CSV")->required()->check(CLI::ExistingFile);
        sub->add_option("--z0", z0, "Right-hand side")->required();
        sub->callback([&] {
            action = [&] { print(out, frustum_of_simplex<double>(read_vector(a_file), z0)); };
        });
    }

    // round
    {
        CLI::App* sub = app.add_subcommand("round", "Round a polytope; writes the map to OUT.transform.json");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Output polytope file")->required();
        sub->callback([&] {
            action = [&] {
                RoundingResult<double> r = round_polytope(read_polytope(file), seed);
                write_polytope(r.rounded, output);
                std::ofstream side(output + ".transform.json");
                if (!side) throw InputError("cannot write '" + output + ".transform.json'");
                side << "{\n  \"T\": " << matrix_json(r.T) << ",\n  \"shift\": " << vector_json(r.shift)
                     << ",\n  \"det\": " << format_exact(r.det) << "\n}\n";
            };
        });
    }

    // rotate
    {
        CLI::App* sub = app.add_subcommand("rotate", "Apply a random rotation");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Output polytope file")->required();
        sub->callback([&] {
            action = [&] {
                write_polytope(rotate_polytope<double>(read_polytope(file), std::nullopt, seed).rotated, output);
            };
        });
    }

    // inner-ball
    {
        CLI::App* sub = app.add_subcommand("inner-ball", "Print an inscribed ball: center, then radius");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed");
        sub->callback([&] {
            action = [&] {
                Rng rng(seed);
                Ball<double> b = inner_ball(read_polytope(file), rng);
                print_row(out, b.center);
                print(out, b.radius);
            };
        });
    }

    // integrate
    std::string expr;
    {
        CLI::App* sub = app.add_subcommand("integrate", "Integrate an expression over a polytope");
        sub->add_option("file", file, "Polytope file")->required()->check(CLI::ExistingFile);
        sub->add_option("--expr", expr, "Integrand over x1..xd")->required();
        sub->add_option("-n", n, "Number of sample points")->required();
        vf_integrate.add_error(sub);
        sub->add_option("--seed", seed, "Random seed");
        sub->callback([&] {
            action = [&] {
                Polytope<double> P = read_polytope(file);
                Expression e = parse_expression(expr, dimension(P));
                Rng rng(seed);
                auto f = [&](const Vec<double>& x) { return eval_expression(e, x); };
                print(out, integrate_polytope(P, f, n, vf_integrate.settings(seed), rng));
            };
        });
    }

    // zonotope-approx
    bool fit_ratio = false;
    {
        CLI::App* sub = app.add_subcommand(
            "zonotope-approx", "PCA box over-approximation; prints its volume, or the fit ratio with --fit-ratio");
        sub->add_option("file", file, "Zonotope file")->required()->check(CLI::ExistingFile);
        sub->add_flag("--fit-ratio", fit_ratio, "Estimate (vol(box) / vol(Z))^(1/d)");
        vf_approx.add_error(sub);
        sub->add_option("--seed", seed, "Random seed");
        sub->add_option("-o,--output", output, "Write the box zonotope here");
        sub->callback([&] {
            action = [&] {
                Polytope<double> P = read_polytope(file);
                const auto* Z = std::get_if<Zonotope<double>>(&P);
                require(Z != nullptr, "zonotope-approx: input must be a zonotope");
                ZonotopeApproximation za = zonotope_approximation(*Z, fit_ratio, vf_approx.settings(seed));
                if (!output.empty()) write_polytope(za.reduced, output);
                print(out, za.fit_ratio ? *za.fit_ratio : *za.reduced.known_volume);
            };
        });
    }

    // count-linext
    Index nodes = 0;
    {
        CLI::App* sub = app.add_subcommand("count-linext", "Estimate the number of linear extensions of a DAG");
        sub->add_option("edges", file, "Edge list CSV, 1-based")->required()->check(CLI::ExistingFile);
        sub->add_option("--nodes", nodes, "Number of nodes")->required();
        vf_linext.add_error(sub);
        sub->add_option("--seed", seed, "Random seed");
        sub->callback([&] {
            action = [&] {
                const double eps = vf_linext.o_error->count() ? vf_linext.error : 0.1;
                print(out, count_linear_extensions(read_edges(file, nodes), eps, seed));
            };
        });
    }

    // copula / indicators
    std::string win_start, win_end;
    Index m = 0;
    int skip_rows = 0, nwarning = 0, ncrisis = 0;
    Index win_len = 0;
    std::vector<int> drop_cols;
    double band_frac = 0.2;
    auto add_returns_flags = [&](CLI::App* sub) {
        sub->add_option("returns", file, "Returns CSV")->required()->check(CLI::ExistingFile);
        sub->add_option("--skip-rows", skip_rows, "Leading lines to skip");
        sub->add_option("--drop-cols", drop_cols, "1-based columns to drop; -1 is the last")->delimiter(',');
        sub->add_option("--m", m, "Grid size")->required();
        sub->add_option("-n", n, "Number of portfolios")->required();
        sub->add_option("--band-frac", band_frac, "Half-width of the diagonal bands relative to m");
        sub->add_option("--seed", seed, "Random seed");
    };
    {
        CLI::App* sub = app.add_subcommand("copula", "Copula and indicator of one window; prints the indicator");
        add_returns_flags(sub);
        sub->add_option("--win-start", win_start, "First date of the window")->required();
        sub->add_option("--win-end", win_end, "Last date of the window")->required();
        sub->add_option("-o,--output", output, "Write the m x m grid as CSV");
        sub->callback([&] {
            action = [&] {
                ReturnsMatrix R = read_returns(file, skip_rows, drop_cols);
                const Index a = find_date(R, win_start, "--win-start"), b = find_date(R, win_end, "--win-end");
                require(a <= b, "copula: --win-start is after --win-end");
                Mat<double> rows = R.values.middleRows(a, b - a + 1);
                Mat<double> sigma = sample_covariance(rows);
                if ((sigma.diagonal().array() <= 0).any()) {
                    err << "warning: degenerate covariance, adding a 1e-10 ridge\n";
                    sigma += 1e-10 * Mat<double>::Identity(sigma.rows(), sigma.cols());
                }
                Rng rng(seed);
                CopulaGrid g = copula(compound_return(rows), std::nullopt, sigma, m, n, rng);
                if (!output.empty()) write_points(output, g.mass);
                print(out, indicator_from_copula(g, band_frac));
            };
        });
    }
    {
        CLI::App* sub = app.add_subcommand("indicators", "Crisis indicators of every window");
        add_returns_flags(sub);
        sub->add_option("--win-len", win_len, "Window length in rows")->required();
        sub->add_option("--nwarning", nwarning, "Run length that marks a warning")->required();
        sub->add_option("--ncrisis", ncrisis, "Run length that marks a crisis")->required();
        sub->add_option("-o,--output", output, "Output timeline CSV")->required();
        sub->callback([&] {
            action = [&] {
                ReturnsMatrix R = read_returns(file, skip_rows, drop_cols);
                Rng rng(seed);
                MarketTimeline tl = compute_indicators(R, win_len, m, n, nwarning, ncrisis, rng, band_frac);
                if (!tl.degenerate_windows.empty())
                    err << "warning: " << tl.degenerate_windows.size()
                        << " window(s) had a degenerate covariance, a 1e-10 ridge was added\n";
                write_timeline(output, tl);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }
    try {
        if (action) action();
        return 0;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace polyvol
