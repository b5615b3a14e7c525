#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcomb/network_sim.hpp"
#include "qcomb/realization.hpp"
#include "qcomb/tradeoff.hpp"

namespace {

using nlohmann::json;
using namespace qcomb;

constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;

/// 15-significant-digit decimal string (stable round-trip format for
/// report values).
std::string num15(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

struct PointSpec {
    std::optional<double> x, info, p;

    TradeoffPoint resolve(int d) const {
        int given = int(bool(x)) + int(bool(info)) + int(bool(p));
        if (given != 1)
            throw CLI::ValidationError(
                "exactly one of --x, --info, --p must be given");
        if (x) return point_from_x(*x, d);
        if (info) return point_from_info(*info, d);
        return optimal_seed_for_p(*p, d);
    }
};

void add_point_opts(CLI::App *cmd, PointSpec &spec) {
    auto *ox = cmd->add_option("--x", spec.x, "teleportation amplitude x in [0,1]");
    auto *oi = cmd->add_option("--info", spec.info, "information I in [0,1]");
    auto *op = cmd->add_option("--p", spec.p, "merit weight p in [0,1]");
    ox->excludes(oi)->excludes(op);
    oi->excludes(op);
}

json point_json(const TradeoffPoint &pt) {
    json j;
    j["x"] = num15(pt.x);
    j["y"] = num15(pt.y);
    j["F"] = num15(pt.F);
    j["G"] = num15(pt.G);
    j["I"] = num15(pt.I);
    j["D"] = num15(pt.D);
    if (pt.p) j["p"] = num15(*pt.p);
    return j;
}

/// Opens the output stream; nullopt path means stdout.
int with_output(const std::optional<std::string> &path,
                const std::function<int(std::ostream &)> &body) {
    if (!path) return body(std::cout);
    std::ofstream f(*path);
    if (!f) {
        std::cerr << "error: cannot open '" << *path << "' for writing\n";
        return kExitUsage;
    }
    int rc = body(f);
    f.flush();
    if (!f) {
        std::cerr << "error: write to '" << *path << "' failed\n";
        return kExitUsage;
    }
    return rc;
}

int cmd_curve(int d, int points, const std::optional<std::string> &out,
              const std::string &format) {
    return with_output(out, [&](std::ostream &os) {
        if (format == "csv") {
            write_curve_csv(os, d, points);
        } else {
            json rows = json::array();
            for (int i = 0; i < points; ++i) {
                double info = double(i) / double(points - 1);
                rows.push_back(point_json(point_from_info(info, d)));
            }
            json j;
            j["d"] = d;
            j["points"] = rows;
            os << j.dump(2) << '\n';
        }
        return 0;
    });
}

int cmd_verify(int d, const PointSpec &spec, std::size_t samples,
               std::uint64_t seed, int threads,
               const std::optional<std::string> &out) {
    TradeoffPoint pt = spec.resolve(d);
    MeanEstimate mf = mc_F(pt.x, pt.y, d, samples, seed, threads);
    MeanEstimate mg = mc_G(pt.x, pt.y, d, samples, seed + 1, threads);
    FGEstimate traj = estimate_FG_trajectories(pt.x, pt.y, d, samples,
                                               seed + 2, threads);
    auto check = [](double analytic, const MeanEstimate &e) {
        double tol = std::max(3.0 * e.stderr_, 5e-3);
        json j;
        j["analytic"] = num15(analytic);
        j["mc_mean"] = num15(e.mean);
        j["mc_stderr"] = num15(e.stderr_);
        j["tolerance"] = num15(tol);
        j["pass"] = std::abs(e.mean - analytic) <= tol;
        return j;
    };
    json rep;
    rep["d"] = d;
    rep["seed"] = seed;
    rep["samples"] = samples;
    rep["threads"] = threads;
    rep["point"] = point_json(pt);
    rep["curve_residual"] = num15(curve_residual(pt.I, pt.D, d));
    rep["checks"]["F_importance"] = check(pt.F, mf);
    rep["checks"]["G_importance"] = check(pt.G, mg);
    rep["checks"]["F_trajectory"] = check(pt.F, traj.f);
    rep["checks"]["G_trajectory"] = check(pt.G, traj.g);
    bool pass = std::abs(curve_residual(pt.I, pt.D, d)) <= 1e-12;
    for (const auto &[k, v] : rep["checks"].items())
        pass = pass && v["pass"].get<bool>();
    rep["pass"] = pass;
    int rc = with_output(out, [&](std::ostream &os) {
        os << rep.dump(2) << '\n';
        return 0;
    });
    if (rc != 0) return rc;
    return pass ? 0 : kExitVerifyFail;
}

int cmd_realize(int d, const PointSpec &spec,
                const std::optional<std::string> &out) {
    TradeoffPoint pt = spec.resolve(d);
    Comb comb = r_total(pt.x, pt.y, d);
    RealizedNetwork net;
    net.d = d;
    net.x = pt.x;
    net.y = pt.y;
    net.stages = realize(comb);
    Comb rec = recompose(net.stages, std::vector<int>(4, d));
    double rec_res = (rec.op.mat - comb.op.mat).norm();
    double max_iso = 0.0;
    for (const auto &st : net.stages)
        max_iso = std::max(max_iso, isometry_residual(st));
    bool pass = rec_res <= 1e-10 && max_iso <= 1e-10;

    json j = json::parse(network_to_json(net));
    j["point"] = point_json(pt);
    j["recomposition_residual"] = num15(rec_res);
    j["max_isometry_residual"] = num15(max_iso);
    j["pass"] = pass;
    int rc = with_output(out, [&](std::ostream &os) {
        os << j.dump(2) << '\n';
        return 0;
    });
    if (rc != 0) return rc;
    return pass ? 0 : kExitVerifyFail;
}

int cmd_trajectory(int d, const PointSpec &spec, std::size_t count,
                   std::uint64_t seed, const std::optional<std::string> &out) {
    TradeoffPoint pt = spec.resolve(d);
    return with_output(out, [&](std::ostream &os) {
        for (std::size_t i = 0; i < count; ++i) {
            Rng rng = make_rng(seed, i);
            Vector psi = random_pure_state(d, rng);
            Matrix u = haar_unitary(d, rng);
            Trajectory t = run_trajectory(psi, u, pt.x, pt.y, rng);
            os << trajectory_json_line(t, pt.x, pt.y, seed) << '\n';
        }
        return 0;
    });
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"quantum-comb trade-off toolkit"};
    app.require_subcommand(1);

    int d = 2;
    int points = 101;
    std::size_t samples = 100000;
    std::uint64_t seed = 1234;
    int threads = 1;
    std::optional<std::string> out;
    std::string format = "csv";
    PointSpec spec;

    auto add_common = [&](CLI::App *cmd, bool with_point) {
        cmd->add_option("--d", d, "Hilbert space dimension")
            ->check(CLI::Range(2, 6));
        cmd->add_option("--out", out, "output path (default: stdout)");
        if (with_point) add_point_opts(cmd, spec);
    };

    auto *curve = app.add_subcommand("curve", "emit the trade-off curve");
    add_common(curve, false);
    curve->add_option("--points", points, "number of points uniform in I")
        ->check(CLI::Range(2, 1000000));
    curve->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto *verify = app.add_subcommand(
        "verify", "analytic vs Monte Carlo report at one point");
    add_common(verify, true);
    verify->add_option("--samples", samples, "Monte Carlo samples")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--threads", threads, "worker threads")
        ->check(CLI::Range(1, 256));

    auto *realize_cmd = app.add_subcommand(
        "realize", "dump the isometric network at one point");
    add_common(realize_cmd, true);

    auto *traj = app.add_subcommand("trajectory", "sample trajectories");
    add_common(traj, true);
    traj->add_option("--samples", samples, "number of trajectories")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    traj->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (curve->parsed()) return cmd_curve(d, points, out, format);
        if (verify->parsed())
            return cmd_verify(d, spec, samples, seed, threads, out);
        if (realize_cmd->parsed()) return cmd_realize(d, spec, out);
        if (traj->parsed()) return cmd_trajectory(d, spec, samples, seed, out);
    } catch (const CLI::ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitVerifyFail;
    }
    return kExitUsage;
}
