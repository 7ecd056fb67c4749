#include "epicost/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "epicost/cost.hpp"
#include "epicost/csv.hpp"
#include "epicost/degree_dist.hpp"
#include "epicost/epidemic.hpp"
#include "epicost/graph.hpp"
#include "epicost/immunize.hpp"
#include "epicost/prng.hpp"
#include "epicost/rmt.hpp"

namespace epicost {

namespace {

struct CommonOpts {
    std::string dist_text;
    std::string edge_list;
    long long n = 0;
    double delta = 0.6;
    double beta = 0.0;
    double alpha = 0.2;
    double cd = 1.0;
    long long runs = 100;
    long long max_steps = 100000;
    std::uint64_t seed = 1;
    std::string out;
};

void add_model_options(CLI::App* cmd, CommonOpts& o, bool with_graph_source) {
    if (with_graph_source) {
        cmd->add_option("--dist", o.dist_text,
                        "degree distribution (pointmass:W, exponential:RATE, "
                        "pareto:SHAPE[:SCALE], empirical:PATH)");
        cmd->add_option("--edge-list", o.edge_list, "load graph from an edge list file");
        cmd->add_option("--n", o.n, "node count for generated graphs");
    }
    cmd->add_option("--delta", o.delta, "per-step recovery probability");
    cmd->add_option("--beta", o.beta, "per-neighbor per-step infection probability");
    cmd->add_option("--alpha", o.alpha, "initially infected fraction");
    cmd->add_option("--cd", o.cd, "cost per infected node per step");
    cmd->add_option("--seed", o.seed, "master seed; all child seeds derive from it");
    cmd->add_option("--out", o.out, "output CSV path (stdout when omitted)");
    static std::string config_path_doc_only;
    cmd->add_option("--config", config_path_doc_only,
                    "flat key=value config file; flags override it");
}

// Expands "--config FILE" in place: every key=value line becomes "--key value"
// unless the flag already appears explicitly, so command-line values win.
void apply_config_overlay(std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        const std::string path = args[i + 1];
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        std::vector<std::string> inject;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos || line[start] == '#') continue;
            const auto eq = line.find('=', start);
            if (eq == std::string::npos)
                throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno) +
                                            ": expected key=value");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(start, eq - start));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno) +
                                            ": empty key");
            const std::string flag = "--" + key;
            if (std::find(args.begin(), args.end(), flag) == args.end()) {
                inject.push_back(flag);
                inject.push_back(value);
            }
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                   args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        args.insert(args.begin() + (args.empty() ? 0 : 1), inject.begin(), inject.end());
        return;
    }
}

EpidemicParams params_of(const CommonOpts& o) {
    return EpidemicParams{o.delta, o.beta, o.alpha, o.cd};
}

Graph build_graph(const CommonOpts& o) {
    if (!o.edge_list.empty()) return Graph::load_edge_list(o.edge_list);
    if (o.dist_text.empty() || o.n < 1)
        throw CLI::ValidationError("graph source", "need --edge-list or both --dist and --n");
    const DistributionSpec dist = DistributionSpec::parse(o.dist_text);
    const Eigen::VectorXd w = sample_weights(dist, o.n, child_seed(o.seed, 0));
    return Graph::generate(w, child_seed(o.seed, 1));
}

void echo_config(CsvWriter& csv, const std::string& command, const CommonOpts& o) {
    csv.comment(kVersion);
    csv.comment("command = " + command);
    if (!o.dist_text.empty()) csv.comment("dist = " + o.dist_text);
    if (!o.edge_list.empty()) csv.comment("edge_list = " + o.edge_list);
    if (o.n > 0) csv.comment("n = " + std::to_string(o.n));
    csv.comment("delta = " + CsvWriter::format(o.delta));
    csv.comment("beta = " + CsvWriter::format(o.beta));
    csv.comment("alpha = " + CsvWriter::format(o.alpha));
    csv.comment("cd = " + CsvWriter::format(o.cd));
    csv.comment("seed = " + std::to_string(o.seed));
}

int emit(const CsvWriter& csv, const std::string& out) {
    if (out.empty()) {
        std::cout << csv.body();
        return kExitOk;
    }
    try {
        csv.write_atomic(out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

void cost_row(CsvWriter& csv, const CostReport& r) {
    csv.row({to_string(r.method), CsvWriter::format(r.value), CsvWriter::format(r.lambda_max),
             r.stable ? "1" : "0", CsvWriter::format(r.diagnostic), "ok"});
}

const std::vector<std::string> kCostColumns = {"method", "value",      "lambda_max",
                                               "stable", "diagnostic", "status"};

// ---- sweep ------------------------------------------------------------

struct Axis {
    std::string name;
    std::vector<double> values;
};

Axis parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--axis", "expected name=start:stop:step");
    Axis axis;
    axis.name = text.substr(0, eq);
    const std::string range = text.substr(eq + 1);
    double start = 0, stop = 0, step = 0;
    const auto c1 = range.find(':');
    const auto c2 = range.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw CLI::ValidationError("--axis", "expected name=start:stop:step");
    try {
        start = std::stod(range.substr(0, c1));
        stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(range.substr(c2 + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--axis", "bad number in '" + text + "'");
    }
    if (!(step > 0.0) || stop < start)
        throw CLI::ValidationError("--axis", "need step > 0 and stop >= start");
    for (double v = start; v <= stop + 0.5 * step * 1e-9 + 1e-15; v += step)
        axis.values.push_back(v);
    return axis;
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EPICOST_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 2;
}

struct SweepCell {
    double beta, p, delta, alpha, theta;
    bool has_p, has_theta;
};

struct SweepRow {
    std::vector<double> axis_values;
    double v_bar = 0.0;
    double lambda_max = std::numeric_limits<double>::quiet_NaN();
    double linear = 0.0, mc_mean = 0.0, mc_stderr = 0.0, rel_error = 0.0;
    std::int64_t truncated = 0;
    bool unstable = false;
    std::string error;
};

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"SIS epidemic cost engine: simulation, linear-model solves, "
                 "asymptotic formulas, spectral bounds and immunization studies"};
    app.require_subcommand(1);

    // ---- generate ----
    CommonOpts gen_o;
    auto* gen = app.add_subcommand("generate", "sample a random graph and write its edge list");
    add_model_options(gen, gen_o, true);

    // ---- cost ----
    CommonOpts cost_o;
    auto* cost_cmd = app.add_subcommand(
        "cost", "deterministic per-node cost: linear solve, spectral bound, closed form");
    add_model_options(cost_cmd, cost_o, true);

    // ---- bound ----
    CommonOpts bound_o;
    auto* bound_cmd = app.add_subcommand("bound", "spectral upper bound only");
    add_model_options(bound_cmd, bound_o, true);

    // ---- simulate ----
    CommonOpts sim_o;
    std::string trajectory_out, model_trajectory_out, model_kind = "linear";
    long long model_steps = 100;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo cost from the stochastic process");
    add_model_options(sim, sim_o, true);
    sim->add_option("--runs", sim_o.runs, "number of independent sample paths");
    sim->add_option("--max-steps", sim_o.max_steps, "step cap per sample path");
    sim->add_option("--trajectory-out", trajectory_out, "CSV of run 0 (t, infected_count)");
    sim->add_option("--model-trajectory-out", model_trajectory_out,
                    "CSV of the probability model (t, mean_P)");
    sim->add_option("--model", model_kind, "probability model for --model-trajectory-out")
        ->check(CLI::IsMember({"linear", "nonlinear"}));
    sim->add_option("--model-steps", model_steps, "steps for --model-trajectory-out");

    // ---- asymptotic ----
    CommonOpts asy_o;
    double asy_kappa = -1.0;
    bool kappa_zero = false;
    auto* asy = app.add_subcommand("asymptotic", "large-graph cost formula");
    add_model_options(asy, asy_o, true);
    asy->add_option("--kappa", asy_kappa, "scaling constant; default sqrt(beta)/(delta sqrt(v_bar))");
    asy->add_flag("--kappa-zero", kappa_zero, "use the vanishing-infection-rate branch");

    // ---- verify ----
    CommonOpts ver_o;
    std::string study = "wigner";
    std::string n_list_text = "500,1000,2000";
    long long ver_samples = 20;
    double er_p = 0.0, bnp = 0.0;
    auto* ver = app.add_subcommand("verify", "random-matrix verification studies");
    add_model_options(ver, ver_o, true);
    ver->add_option("--study", study, "wigner | resolvent | offdiag")
        ->check(CLI::IsMember({"wigner", "resolvent", "offdiag"}));
    ver->add_option("--n-list", n_list_text, "comma-separated node counts");
    ver->add_option("--samples", ver_samples, "draws per study point");
    ver->add_option("--er-p", er_p, "homogeneous family: per-n weights n*p");
    ver->add_option("--bnp", bnp, "hold beta*n*p fixed across the n list (with --er-p)");

    // ---- immunize ----
    CommonOpts imm_o;
    double cv = 1.0;
    std::string pi_grid_text = "0:1:0.01";
    long long sim_runs = 0;
    double imm_p = 0.0;
    auto* imm = app.add_subcommand("immunize", "social cost and optimal one-shot immunization");
    add_model_options(imm, imm_o, true);
    imm->add_option("--p", imm_p, "edge probability of the homogeneous network");
    imm->add_option("--cv", cv, "immunization cost per node");
    imm->add_option("--pi-grid", pi_grid_text, "start:stop:step grid over pi");
    imm->add_option("--simulate-runs", sim_runs, "Monte Carlo runs per grid point (0 = skip)");

    // ---- sweep ----
    CommonOpts sw_o;
    std::vector<std::string> axis_texts;
    int sw_workers = 0;
    double sw_p = 0.0, sw_theta = 0.0;
    auto* sw = app.add_subcommand("sweep", "grid experiments, e.g. the model-error heatmap");
    add_model_options(sw, sw_o, true);
    sw->add_option("--axis", axis_texts, "axis name=start:stop:step (beta, p, delta, alpha, theta)")
        ->expected(-1);
    sw->add_option("--runs", sw_o.runs, "Monte Carlo runs per cell");
    sw->add_option("--max-steps", sw_o.max_steps, "step cap per sample path");
    sw->add_option("--p", sw_p, "edge probability when p is not an axis");
    sw->add_option("--theta", sw_theta, "Pareto shape when theta is not an axis");
    sw->add_option("--workers", sw_workers, "concurrent cells (default $EPICOST_WORKERS or 2)");

    try {
        apply_config_overlay(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("epicost");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            const Graph g = build_graph(gen_o);
            if (gen_o.out.empty())
                throw CLI::ValidationError("--out", "generate requires an output path");
            g.save_edge_list(gen_o.out);
            std::cout << "n=" << g.size() << " edges=" << g.edge_count()
                      << " clamped_pairs=" << g.clamped_pairs() << '\n';
            return kExitOk;
        }

        if (*cost_cmd) {
            const Graph g = build_graph(cost_o);
            const EpidemicParams p = params_of(cost_o);
            CsvWriter csv;
            echo_config(csv, "cost", cost_o);
            csv.columns(kCostColumns);
            cost_row(csv, linear_cost(g, p));
            cost_row(csv, spectral_bound(g, p));
            if (!cost_o.dist_text.empty()) {
                const DistributionSpec dist = DistributionSpec::parse(cost_o.dist_text);
                if (const auto* pm = std::get_if<PointMass>(&dist.kind())) {
                    CostReport er;
                    er.method = CostMethod::er_closed_form;
                    er.value = er_exact_cost(cost_o.beta * pm->w0, p.delta, p.alpha, p.cost_per_step);
                    er.lambda_max = 1.0 - p.delta + cost_o.beta * pm->w0;
                    er.stable = true;
                    cost_row(csv, er);
                }
            }
            return emit(csv, cost_o.out);
        }

        if (*bound_cmd) {
            const Graph g = build_graph(bound_o);
            CsvWriter csv;
            echo_config(csv, "bound", bound_o);
            csv.columns(kCostColumns);
            cost_row(csv, spectral_bound(g, params_of(bound_o)));
            return emit(csv, bound_o.out);
        }

        if (*sim) {
            const Graph g = build_graph(sim_o);
            const EpidemicParams p = params_of(sim_o);
            const double lm = 1.0 - p.delta + p.beta * spectral_radius(g);
            const MonteCarloCost mc =
                monte_carlo_cost(g, p, sim_o.runs, child_seed(sim_o.seed, 2), sim_o.max_steps);
            CsvWriter csv;
            echo_config(csv, "simulate", sim_o);
            csv.comment("runs = " + std::to_string(sim_o.runs));
            csv.comment("max_steps = " + std::to_string(sim_o.max_steps));
            csv.columns({"method", "value", "lambda_max", "stable", "diagnostic", "truncated_runs",
                         "status"});
            csv.row({"monte_carlo", CsvWriter::format(mc.mean), CsvWriter::format(lm),
                     lm < 1.0 ? "1" : "0", CsvWriter::format(mc.standard_error),
                     CsvWriter::format(mc.truncated_runs),
                     mc.truncated_runs > 0 ? "truncated" : "ok"});
            if (!trajectory_out.empty()) {
                const SamplePath path = simulate_sis(
                    g, p, child_seed(child_seed(sim_o.seed, 2), 0), sim_o.max_steps);
                CsvWriter traj;
                echo_config(traj, "simulate --trajectory-out", sim_o);
                traj.columns({"t", "infected_count"});
                for (std::size_t t = 0; t < path.infected_count.size(); ++t)
                    traj.row({std::to_string(t), CsvWriter::format(path.infected_count[t])});
                const int rc = emit(traj, trajectory_out);
                if (rc != kExitOk) return rc;
            }
            if (!model_trajectory_out.empty()) {
                CsvWriter traj;
                echo_config(traj, "simulate --model-trajectory-out", sim_o);
                traj.comment("model = " + model_kind);
                traj.columns({"t", "mean_P"});
                if (model_kind == "linear") {
                    const auto states = iterate_linear(g, p, model_steps);
                    for (std::size_t t = 0; t < states.size(); ++t)
                        traj.row({std::to_string(t), CsvWriter::format(states[t].mean())});
                } else {
                    const auto states = iterate_nonlinear(g, p, model_steps);
                    for (std::size_t t = 0; t < states.probabilities.size(); ++t)
                        traj.row({std::to_string(t),
                                  CsvWriter::format(states.probabilities[t].mean())});
                }
                const int rc = emit(traj, model_trajectory_out);
                if (rc != kExitOk) return rc;
            }
            return emit(csv, sim_o.out);
        }

        if (*asy) {
            if (asy_o.dist_text.empty())
                throw CLI::ValidationError("--dist", "asymptotic requires a distribution");
            const DistributionSpec dist = DistributionSpec::parse(asy_o.dist_text);
            const ScaledDistribution scaled(dist, asy_o.beta);
            double kappa;
            if (kappa_zero)
                kappa = 0.0;
            else if (asy_kappa >= 0.0)
                kappa = asy_kappa;
            else
                kappa = kappa_for(asy_o.beta, asy_o.delta, scaled.moments().mean);
            const CostReport r =
                asymptotic_cost(scaled, asy_o.delta, asy_o.alpha, asy_o.cd, kappa);
            CsvWriter csv;
            echo_config(csv, "asymptotic", asy_o);
            csv.comment("kappa = " + CsvWriter::format(kappa));
            csv.comment("v_bar = " + CsvWriter::format(scaled.moments().mean));
            csv.comment("truncation_mass = " + CsvWriter::format(scaled.truncation_mass()));
            csv.columns(kCostColumns);
            cost_row(csv, r);
            return emit(csv, asy_o.out);
        }

        if (*ver) {
            std::vector<Eigen::Index> n_list;
            std::stringstream ss(n_list_text);
            std::string tok;
            while (std::getline(ss, tok, ',')) n_list.push_back(std::stoll(tok));
            CsvWriter csv;
            echo_config(csv, "verify", ver_o);
            csv.comment("study = " + study);
            csv.comment("samples = " + std::to_string(ver_samples));
            auto dist_for = [&](Eigen::Index n) {
                if (er_p > 0.0)
                    return DistributionSpec(PointMass{static_cast<double>(n) * er_p});
                return DistributionSpec::parse(ver_o.dist_text);
            };
            auto beta_for = [&](Eigen::Index n) {
                if (er_p > 0.0 && bnp > 0.0) return bnp / (static_cast<double>(n) * er_p);
                return ver_o.beta;
            };

            if (study == "wigner") {
                csv.columns({"n", "sample", "offdiag_mean", "offdiag_var", "min_eig", "max_eig",
                             "seed"});
                for (Eigen::Index n : n_list)
                    for (long long s = 0; s < ver_samples; ++s) {
                        const auto seed = child_seed(ver_o.seed, 1000 * n + s);
                        const RmtSample smp = RmtSample::draw(dist_for(n), n, beta_for(n), seed);
                        const Eigen::MatrixXd c = wigner_matrix(smp);
                        double mean = 0.0, var = 0.0;
                        const double cnt = static_cast<double>(n) * (n - 1);
                        for (Eigen::Index i = 0; i < n; ++i)
                            for (Eigen::Index j = 0; j < n; ++j)
                                if (i != j) mean += c(i, j);
                        mean /= cnt;
                        for (Eigen::Index i = 0; i < n; ++i)
                            for (Eigen::Index j = 0; j < n; ++j)
                                if (i != j) var += (c(i, j) - mean) * (c(i, j) - mean);
                        var /= cnt;
                        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                            c, Eigen::EigenvaluesOnly);
                        csv.row({CsvWriter::format(static_cast<std::int64_t>(n)),
                                 std::to_string(s), CsvWriter::format(mean),
                                 CsvWriter::format(var),
                                 CsvWriter::format(es.eigenvalues().minCoeff()),
                                 CsvWriter::format(es.eigenvalues().maxCoeff()),
                                 std::to_string(seed)});
                    }
            } else if (study == "resolvent") {
                csv.columns({"n", "sample", "t11", "t1v", "tvv", "theory_t11", "theory_t1v",
                             "theory_tvv", "seed"});
                for (Eigen::Index n : n_list) {
                    const DistributionSpec dist = dist_for(n);
                    const double beta = beta_for(n);
                    const ScaledDistribution scaled(dist, beta);
                    const double v_bar = scaled.moments().mean;
                    const double kap = std::sqrt(beta / (ver_o.delta * ver_o.delta * v_bar));
                    const FixedPointResult fp = solve_fixed_point(scaled, kap);
                    const double th_t11 = (1.0 + kap * kap * fp.value * fp.value) / ver_o.delta;
                    const double th_t1v = fp.value / ver_o.delta;
                    const double th_tvv =
                        kap == 0.0 ? scaled.moments().second_moment / ver_o.delta
                                   : (1.0 - v_bar / fp.value) / (ver_o.delta * kap * kap);
                    for (long long s = 0; s < ver_samples; ++s) {
                        const auto seed = child_seed(ver_o.seed, 1000 * n + s);
                        const RmtSample smp = RmtSample::draw(dist, n, beta, seed);
                        const ResolventTerms t = resolvent_terms(smp, ver_o.delta);
                        csv.row({CsvWriter::format(static_cast<std::int64_t>(n)),
                                 std::to_string(s), CsvWriter::format(t.t11),
                                 CsvWriter::format(t.t1v), CsvWriter::format(t.tvv),
                                 CsvWriter::format(th_t11), CsvWriter::format(th_t1v),
                                 CsvWriter::format(th_tvv), std::to_string(seed)});
                    }
                }
            } else {
                csv.columns({"n", "k", "sample", "gap", "median_gap", "seed"});
                for (Eigen::Index n : n_list) {
                    const auto seed = child_seed(ver_o.seed, static_cast<std::uint64_t>(n));
                    const GapStudy gs = offdiag_trace_gap_study(
                        dist_for(n), beta_for(n), ver_o.delta, n,
                        static_cast<int>(ver_samples), seed);
                    for (int k = 1; k <= 3; ++k)
                        for (std::size_t s = 0; s < gs.gaps[k - 1].size(); ++s)
                            csv.row({CsvWriter::format(static_cast<std::int64_t>(n)),
                                     std::to_string(k), std::to_string(s),
                                     CsvWriter::format(gs.gaps[k - 1][s]),
                                     CsvWriter::format(gs.median_gap[k - 1]),
                                     std::to_string(seed)});
                }
            }
            return emit(csv, ver_o.out);
        }

        if (*imm && !imm_o.edge_list.empty()) {
            // fixed-graph mode for real networks: delete floor(pi n) random
            // nodes and solve on the induced subgraph
            const EpidemicParams p = params_of(imm_o);
            const Graph g = Graph::load_edge_list(imm_o.edge_list);
            const Axis grid = parse_axis("pi=" + pi_grid_text);
            CsvWriter csv;
            echo_config(csv, "immunize", imm_o);
            csv.comment("cv = " + CsvWriter::format(cv));
            csv.comment("mode = fixed-graph node deletion");
            csv.columns({"pi", "S_calculated", "S_simulated", "stderr", "regime", "status"});
            std::uint64_t cell = 0;
            for (double pi : grid.values) {
                pi = std::min(pi, 1.0);
                std::string calc = "", simv = "", se = "", status = "ok";
                const auto cs = child_seed(imm_o.seed, cell++);
                if (pi >= 1.0) {
                    calc = CsvWriter::format(cv);
                    csv.row({CsvWriter::format(pi), calc, simv, se, "-", status});
                    continue;
                }
                const Graph reduced = delete_random_nodes(g, pi, child_seed(cs, 0));
                try {
                    calc = CsvWriter::format(pi * cv + (1.0 - pi) * linear_cost(reduced, p).value);
                } catch (const instability_error&) {
                    status = "unstable";
                }
                if (sim_runs > 0) {
                    const MonteCarloCost mc =
                        monte_carlo_cost(reduced, p, sim_runs, child_seed(cs, 2), imm_o.max_steps);
                    simv = CsvWriter::format(pi * cv + (1.0 - pi) * mc.mean);
                    se = CsvWriter::format((1.0 - pi) * mc.standard_error);
                }
                csv.row({CsvWriter::format(pi), calc, simv, se, "-", status});
            }
            return emit(csv, imm_o.out);
        }

        if (*imm) {
            if (!(imm_p > 0.0))
                throw CLI::ValidationError("--p", "immunize requires --p or --edge-list");
            const EpidemicParams p = params_of(imm_o);
            const Axis grid = parse_axis("pi=" + pi_grid_text);
            const OptimalPi opt = er_optimal_pi(static_cast<double>(imm_o.n), imm_p, p, cv);
            CsvWriter csv;
            echo_config(csv, "immunize", imm_o);
            csv.comment("p = " + CsvWriter::format(imm_p));
            csv.comment("cv = " + CsvWriter::format(cv));
            csv.comment("pi_opt = " + CsvWriter::format(opt.pi));
            csv.comment("regime = " + to_string(opt.regime));
            csv.comment("a = " + CsvWriter::format(opt.a) + ", b = " + CsvWriter::format(opt.b) +
                        ", c = " + CsvWriter::format(opt.c));
            csv.columns({"pi", "S_calculated", "S_simulated", "stderr", "regime", "status"});
            std::uint64_t cell = 0;
            for (double pi : grid.values) {
                pi = std::min(pi, 1.0);
                std::string calc = "", simv = "", se = "", status = "ok";
                try {
                    calc = CsvWriter::format(er_social_cost(pi, static_cast<double>(imm_o.n),
                                                            imm_p, p, cv));
                } catch (const instability_error&) {
                    status = "unstable";
                }
                if (sim_runs > 0 && status == "ok" && pi < 1.0) {
                    const auto removed = static_cast<Eigen::Index>(
                        std::floor(pi * static_cast<double>(imm_o.n)));
                    const Eigen::Index nn = imm_o.n - removed;
                    const auto cs = child_seed(imm_o.seed, cell);
                    const Eigen::VectorXd w = Eigen::VectorXd::Constant(
                        nn, static_cast<double>(nn) * imm_p);
                    const Graph g = Graph::generate(w, child_seed(cs, 1));
                    const MonteCarloCost mc =
                        monte_carlo_cost(g, p, sim_runs, child_seed(cs, 2), imm_o.max_steps);
                    simv = CsvWriter::format(pi * cv + (1.0 - pi) * mc.mean);
                    se = CsvWriter::format((1.0 - pi) * mc.standard_error);
                } else if (sim_runs > 0 && pi >= 1.0) {
                    simv = CsvWriter::format(cv);
                    se = "0";
                }
                csv.row({CsvWriter::format(pi), calc, simv, se, to_string(opt.regime), status});
                ++cell;
            }
            return emit(csv, imm_o.out);
        }

        if (*sw) {
            if (axis_texts.empty())
                throw CLI::ValidationError("--axis", "sweep requires at least one axis");
            if (axis_texts.size() > 2)
                throw CLI::ValidationError("--axis", "at most two axes are supported");
            std::vector<Axis> axes;
            for (const auto& t : axis_texts) axes.push_back(parse_axis(t));
            for (const auto& a : axes)
                if (a.name != "beta" && a.name != "p" && a.name != "delta" &&
                    a.name != "alpha" && a.name != "theta")
                    throw CLI::ValidationError("--axis", "unknown axis '" + a.name + "'");
            if (sw_o.n < 1) throw CLI::ValidationError("--n", "sweep requires --n");

            const std::size_t n_outer = axes[0].values.size();
            const std::size_t n_inner = axes.size() == 2 ? axes[1].values.size() : 1;
            const std::size_t cells = n_outer * n_inner;
            std::vector<SweepRow> rows(cells);

            auto run_cell = [&](std::size_t idx) {
                SweepRow& row = rows[idx];
                SweepCell cell{sw_o.beta, sw_p, sw_o.delta, sw_o.alpha, sw_theta,
                               sw_p > 0.0, sw_theta > 0.0};
                const std::size_t oi = idx / n_inner;
                const std::size_t ii = idx % n_inner;
                for (std::size_t a = 0; a < axes.size(); ++a) {
                    const double v = a == 0 ? axes[0].values[oi] : axes[1].values[ii];
                    row.axis_values.push_back(v);
                    if (axes[a].name == "beta") cell.beta = v;
                    else if (axes[a].name == "p") { cell.p = v; cell.has_p = true; }
                    else if (axes[a].name == "delta") cell.delta = v;
                    else if (axes[a].name == "alpha") cell.alpha = v;
                    else { cell.theta = v; cell.has_theta = true; }
                }
                try {
                    DistributionSpec dist = [&]() {
                        if (cell.has_p)
                            return DistributionSpec(
                                PointMass{static_cast<double>(sw_o.n) * cell.p});
                        if (cell.has_theta) return DistributionSpec(Pareto{cell.theta});
                        if (sw_o.dist_text.empty())
                            throw std::invalid_argument("sweep: need --dist, --p or a p/theta axis");
                        return DistributionSpec::parse(sw_o.dist_text);
                    }();
                    const EpidemicParams p{cell.delta, cell.beta, cell.alpha, sw_o.cd};
                    const auto cs = child_seed(sw_o.seed, idx);
                    const Eigen::VectorXd w = sample_weights(dist, sw_o.n, child_seed(cs, 0));
                    const Graph g = Graph::generate(w, child_seed(cs, 1));
                    row.v_bar = cell.beta * w.mean();
                    const CostReport lin = linear_cost(g, p);
                    row.lambda_max = lin.lambda_max;
                    row.linear = lin.value;
                    const MonteCarloCost mc =
                        monte_carlo_cost(g, p, sw_o.runs, child_seed(cs, 2), sw_o.max_steps);
                    row.mc_mean = mc.mean;
                    row.mc_stderr = mc.standard_error;
                    row.truncated = mc.truncated_runs;
                    row.rel_error = std::abs(mc.mean - lin.value) / lin.value;
                } catch (const instability_error& e) {
                    row.unstable = true;
                    row.lambda_max = e.lambda_max();
                }
            };

            const int workers = std::min<int>(worker_count(sw_workers), static_cast<int>(cells));
            std::atomic<std::size_t> next{0};
            std::mutex log_mutex;
            auto drain = [&]() {
                for (;;) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= cells) return;
                    run_cell(idx);
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::cerr << "cell " << idx + 1 << "/" << cells
                              << (rows[idx].unstable ? " unstable" : "") << '\n';
                }
            };
            std::vector<std::thread> pool;
            for (int wkr = 1; wkr < workers; ++wkr) pool.emplace_back(drain);
            drain();
            for (auto& t : pool) t.join();

            CsvWriter csv;
            echo_config(csv, "sweep", sw_o);
            csv.comment("runs = " + std::to_string(sw_o.runs));
            csv.comment("max_steps = " + std::to_string(sw_o.max_steps));
            std::vector<std::string> cols;
            for (const auto& a : axes) cols.push_back(a.name);
            for (const auto& c : {"v_bar", "lambda_max", "linear", "mc_mean", "mc_stderr",
                                  "rel_error", "truncated_runs", "status"})
                cols.push_back(c);
            csv.columns(cols);
            for (const auto& row : rows) {
                std::vector<std::string> fields;
                for (double v : row.axis_values) fields.push_back(CsvWriter::format(v));
                fields.push_back(CsvWriter::format(row.v_bar));
                fields.push_back(CsvWriter::format(row.lambda_max));
                if (row.unstable) {
                    fields.insert(fields.end(), {"", "", "", "", "0", "unstable"});
                } else {
                    fields.push_back(CsvWriter::format(row.linear));
                    fields.push_back(CsvWriter::format(row.mc_mean));
                    fields.push_back(CsvWriter::format(row.mc_stderr));
                    fields.push_back(CsvWriter::format(row.rel_error));
                    fields.push_back(CsvWriter::format(row.truncated));
                    fields.push_back("ok");
                }
                csv.row(fields);
            }
            return emit(csv, sw_o.out);
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const instability_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInstability;
    } catch (const inapplicable_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInstability;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInstability;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args));
}

}  // namespace epicost
