// Command-line front end: fit | tune | simulate | bench | verify.
// Exit codes: 0 ok, 2 usage, 3 data, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "piq/io.hpp"
#include "piq/model_selection.hpp"
#include "piq/oracle.hpp"
#include "piq/parallel.hpp"
#include "piq/rng.hpp"
#include "piq/simulate.hpp"
#include "piq/solvers.hpp"

namespace {

using namespace piq;
using nlohmann::json;

struct SolverFlags {
    std::string solver = "iq-bcd";
    std::string loss = "quadratic";
    Index q_gamma = 0;
    Index q_beta = -1;
    double nu = 1e-4;
    double nu_beta = 1e-4;
    double lambda = -1.0;
    std::string beta_rule = "soft";
    std::string cooling = "quad";
    Index horizon = 200;
    Index upper = -1; // default: n (gamma) / p (beta)
    Index max_iters = 2000;
    std::uint64_t seed = 0;
    bool standardize = false;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--solver", flags.solver, "iq-bcd|mm-joint|bcd|mm");
    cmd->add_option("--loss", flags.loss, "quadratic|logistic|huber:<delta>|hhinge:<delta>");
    cmd->add_option("--q-gamma", flags.q_gamma, "outlier budget (<= n/2)");
    cmd->add_option("--q-beta", flags.q_beta, "coefficient budget (bcd solver)");
    cmd->add_option("--nu", flags.nu, "gamma ridge parameter (default 1e-4)");
    cmd->add_option("--nu-beta", flags.nu_beta, "beta ridge parameter");
    cmd->add_option("--lambda", flags.lambda, "beta penalty level (mm/bcd)");
    cmd->add_option("--beta-rule", flags.beta_rule, "soft|hard");
    cmd->add_option("--cooling", flags.cooling, "const|quad|sig|log");
    cmd->add_option("--horizon", flags.horizon, "cooling horizon T");
    cmd->add_option("--upper", flags.upper, "cooling start budget (default n)");
    cmd->add_option("--max-iters", flags.max_iters, "iteration cap after cooling");
    cmd->add_option("--seed", flags.seed, "base RNG seed");
}

FitConfig make_config(const SolverFlags& flags, Index n, Index p) {
    FitConfig config;
    config.solver = parse_solver(flags.solver);
    config.q_gamma = flags.q_gamma;
    if (flags.q_beta >= 0) config.q_beta = flags.q_beta;
    config.nu = flags.nu;
    config.nu_beta = flags.nu_beta;
    if (flags.lambda >= 0.0) config.lambda = flags.lambda;
    config.beta_rule =
        flags.beta_rule == "hard" ? ThresholdKind::hard : ThresholdKind::soft;
    config.max_iters = flags.max_iters;
    config.seed = flags.seed;
    config.standardized = flags.standardize;

    const CoolingKind kind = parse_cooling(flags.cooling);
    const Index horizon =
        kind == CoolingKind::constant ? 1 : std::max<Index>(flags.horizon, 1);
    const Index upper =
        flags.upper >= 0 ? flags.upper : std::max(n, config.q_gamma);
    config.gamma_schedule =
        CoolingSchedule::make(kind, std::min(upper, n), config.q_gamma, horizon);
    if (config.q_beta)
        config.beta_schedule =
            CoolingSchedule::make(kind, p, *config.q_beta, horizon);
    return config;
}

std::string flags_json(const SolverFlags& flags) {
    json j;
    j["solver"] = flags.solver;
    j["loss"] = flags.loss;
    j["q_gamma"] = flags.q_gamma;
    if (flags.q_beta >= 0) j["q_beta"] = flags.q_beta;
    j["nu"] = flags.nu;
    j["nu_beta"] = flags.nu_beta;
    if (flags.lambda >= 0.0) j["lambda"] = flags.lambda;
    j["cooling"] = flags.cooling;
    j["horizon"] = flags.horizon;
    j["max_iters"] = flags.max_iters;
    j["seed"] = flags.seed;
    j["standardize"] = flags.standardize;
    return j.dump();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::data, "cannot open output file: " + path);
    out << content;
}

int cmd_fit(const std::string& input, const std::string& response,
            const SolverFlags& flags, const std::string& out_path, bool timing) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(input, std::ios::binary);
    require(in.good(), ErrorKind::data, "cannot open file: " + input);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    Dataset data = parse_csv(content, response, input);
    if (flags.standardize) standardize_columns(data.X);

    const LossModel loss = parse_loss(flags.loss);
    const FitConfig config = make_config(flags, data.n(), data.p());
    const Estimate est = fit_piq(data, loss, config);

    RunManifest manifest;
    manifest.command = "fit";
    manifest.config_json = flags_json(flags);
    manifest.seed = flags.seed;
    manifest.input_digest = fnv1a64(content);
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_output(out_path, estimate_to_jsonl(est, manifest, timing));
    if (!est.converged)
        std::cerr << "fit: iteration cap reached before the stopping rule "
                     "(converged=false recorded in the output)\n";
    return 0;
}

int cmd_tune(const std::string& input, const std::string& response,
             const SolverFlags& flags, const std::string& grid_text,
             const std::string& criterion_text, int jobs, const std::string& out_path,
             bool timing) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream in(input, std::ios::binary);
    require(in.good(), ErrorKind::data, "cannot open file: " + input);
    std::stringstream buffer;
    buffer << in.rdbuf();
    Dataset data = parse_csv(buffer.str(), response, input);
    if (flags.standardize) standardize_columns(data.X);

    std::vector<Index> grid;
    std::stringstream gs(grid_text);
    std::string tok;
    while (std::getline(gs, tok, ',')) {
        try {
            grid.push_back(static_cast<Index>(std::stol(tok)));
        } catch (...) {
            throw_error(ErrorKind::usage, "cannot parse grid entry: " + tok);
        }
    }
    require(!grid.empty(), ErrorKind::usage, "empty tuning grid");

    const LossModel loss = parse_loss(flags.loss);
    SolverFlags base_flags = flags;
    base_flags.q_gamma = grid.front();
    const FitConfig base = make_config(base_flags, data.n(), data.p());
    const TuneResult result =
        tune_q(data, loss, base, grid, parse_criterion(criterion_text), jobs);

    RunManifest manifest;
    manifest.command = "tune";
    manifest.config_json = flags_json(flags);
    manifest.seed = flags.seed;
    manifest.input_digest = fnv1a64(buffer.str());
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string out = "# " + manifest.to_json_line(timing) + "\n";
    out += "# selected q = " + std::to_string(result.best_q) + "\n";
    out += tune_to_csv(result);
    write_output(out_path, out);
    return 0;
}

int cmd_simulate(int example, Index n, Index p, Index o_star, double rho, int reps,
                 std::uint64_t seed, int jobs, const std::string& out_path,
                 bool timing) {
    const SimSpec spec = example_spec(example, n, p, o_star, rho, seed);
    const FitConfig config = benchmark_fit_config(spec, seed);
    const ReplicationTable table =
        run_replications(spec, benchmark_loss(spec), config, reps, jobs);

    RunManifest manifest;
    manifest.command = "simulate";
    json j;
    j["example"] = example;
    j["n"] = n;
    j["p"] = p;
    j["o_star"] = o_star;
    j["rho"] = rho;
    j["reps"] = reps;
    j["q_gamma"] = config.q_gamma;
    manifest.config_json = j.dump();
    manifest.seed = seed;

    const std::string label = "ex" + std::to_string(example) + "_o" +
                              std::to_string(o_star);
    std::string out = "# " + manifest.to_json_line(timing) + "\n";
    out += replication_table_to_csv(table, label, timing);
    write_output(out_path, out);
    return 0;
}

int cmd_bench(bool full, std::uint64_t seed, int jobs, int reps_override,
              const std::string& out_path) {
    struct Setting {
        int example;
        Index n, p, o_star;
        int reps;
    };
    std::vector<Setting> settings;
    if (full) {
        for (Index o : {10, 50, 100, 150, 200}) settings.push_back({1, 1000, 10, o, 50});
        for (Index o : {30, 60, 90, 120, 150}) settings.push_back({2, 1000, 10, o, 50});
        for (Index o : {10, 20, 30, 40}) settings.push_back({3, 200, 1000, o, 50});
        for (Index o : {10, 20, 30, 40}) settings.push_back({4, 200, 1000, o, 50});
    } else {
        settings = {{1, 500, 10, 25, 20}, {1, 500, 10, 50, 20}, {2, 500, 10, 60, 20},
                    {3, 200, 300, 10, 20}, {4, 200, 300, 10, 20}};
    }

    std::ostringstream out;
    out << "example,n,p,o_star,reps,Err,M,JD,FA,M_beta,FA_beta,JD_beta,T\n";
    for (const Setting& s : settings) {
        const int reps = reps_override > 0 ? reps_override : s.reps;
        const SimSpec spec = example_spec(s.example, s.n, s.p, s.o_star, 0.5, seed);
        const FitConfig config = benchmark_fit_config(spec, seed);
        const ReplicationTable table =
            run_replications(spec, benchmark_loss(spec), config, reps, jobs);
        out << s.example << ',' << s.n << ',' << s.p << ',' << s.o_star << ',' << reps
            << ',' << table.err_mean << ',' << table.masking_percent << ','
            << table.jd_percent << ',' << table.false_alarm_mean << ',';
        if (table.has_beta_metrics)
            out << table.beta_masking_percent << ',' << table.beta_false_alarm_mean
                << ',' << table.beta_jd_percent;
        else
            out << ",,";
        out << ',' << table.total_seconds << '\n';
        std::cerr << "bench: example " << s.example << " o*=" << s.o_star << " done ("
                  << table.total_seconds << " s)\n";
    }
    write_output(out_path, out.str());
    return 0;
}

int cmd_verify(std::uint64_t seed, Index n, Index p, Index q,
               const std::string& out_path) {
    std::ostringstream out;

    // quantile-threshold optimality on random draws
    {
        Rng rng(seed);
        int worst_exponent = -400;
        double worst_gap = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            VectorXd s(n);
            for (Index i = 0; i < n; ++i) s(i) = rng.normal();
            auto [xi, tie] = quantile_threshold(s, {q, 1e-4});
            const double mine =
                0.5 * (s - xi).squaredNorm() + 0.5e-4 * xi.squaredNorm();
            double best = mine;
            for_each_subset(n, q, [&](const std::vector<Index>& support) {
                VectorXd cand = VectorXd::Zero(n);
                for (Index i : support) cand(i) = s(i) / (1.0 + 1e-4);
                best = std::min(best, 0.5 * (s - cand).squaredNorm() +
                                          0.5e-4 * cand.squaredNorm());
                return true;
            });
            worst_gap = std::max(worst_gap, mine - best);
        }
        json j;
        j["record"] = "quantile_threshold_optimality";
        j["trials"] = 50;
        j["worst_gap"] = worst_gap;
        j["pass"] = worst_gap <= 1e-12;
        (void)worst_exponent;
        out << j.dump() << '\n';
    }

    // trimming equivalence on a seeded instance
    {
        SimSpec spec = example_spec(1, n, p, 1, 0.5, seed);
        const SimInstance inst = generate(spec);
        const auto joint = oracle::joint_min_exhaustive(inst.data, LossModel::quadratic(), q);
        const auto trimmed =
            oracle::trimmed_min_exhaustive(inst.data, LossModel::quadratic(), q);
        json j;
        j["record"] = "trimming_equivalence";
        j["joint_value"] = joint.value;
        j["trimmed_value"] = trimmed.value;
        j["gap"] = std::abs(joint.value - trimmed.value);
        j["enumerated"] = trimmed.enumerated;
        j["optimal_supports"] = trimmed.optimal_supports.size();
        j["pass"] = std::abs(joint.value - trimmed.value) <= 1e-8;
        out << j.dump() << '\n';
    }

    // restricted isometry margin of the seeded design
    {
        SimSpec spec = example_spec(1, n, p, 0, 0.5, seed);
        const SimInstance inst = generate(spec);
        const auto rip = oracle::rip_margin(inst.data.X, std::min<Index>(q + 1, n), 4.0,
                                            1e-4);
        json j;
        j["record"] = "rip_margin";
        j["epsilon"] = rip.epsilon;
        j["kappa"] = rip.kappa;
        j["support_size"] = rip.support_size;
        j["satisfied"] = rip.satisfied;
        out << j.dump() << '\n';
    }

    write_output(out_path, out.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier-resistant estimation via progressive quantile thresholding"};
    app.require_subcommand(1);

    SolverFlags flags;
    std::string input, response, out_path, grid_text = "10,20,30";
    std::string criterion_text = "sfpic";
    bool timing = false;
    int jobs = default_jobs();

    auto* fit = app.add_subcommand("fit", "fit a model to a CSV dataset");
    fit->add_option("--input", input, "CSV file")->required();
    fit->add_option("--response", response, "response column (name or 0-based index)")
        ->required();
    add_solver_flags(fit, flags);
    fit->add_flag("--standardize", flags.standardize,
                  "column-standardize X before fitting (recorded in metadata)");
    fit->add_option("--out", out_path, "output file (default stdout)");
    fit->add_flag("--timing", timing, "include wall-clock fields in the output");

    auto* tune = app.add_subcommand("tune", "select the outlier budget on a grid");
    tune->add_option("--input", input, "CSV file")->required();
    tune->add_option("--response", response, "response column")->required();
    add_solver_flags(tune, flags);
    tune->add_flag("--standardize", flags.standardize, "column-standardize X");
    tune->add_option("--grid", grid_text, "comma-separated gamma budgets");
    tune->add_option("--criterion", criterion_text, "pic|pic0|sfpic");
    tune->add_option("--jobs", jobs, "parallel grid cells");
    tune->add_option("--out", out_path, "output file (default stdout)");
    tune->add_flag("--timing", timing, "include wall-clock fields");

    int example = 1, reps = 20;
    Index sim_n = 500, sim_p = 10, sim_ostar = 25;
    double sim_rho = 0.5;
    auto* simulate = app.add_subcommand("simulate", "run a benchmark example");
    simulate->add_option("--example", example, "1|2|3|4")->required();
    simulate->add_option("--n", sim_n, "samples");
    simulate->add_option("--p", sim_p, "predictors");
    simulate->add_option("--ostar", sim_ostar, "planted outliers");
    simulate->add_option("--rho", sim_rho, "design correlation");
    simulate->add_option("--reps", reps, "replications");
    simulate->add_option("--seed", flags.seed, "base seed");
    simulate->add_option("--jobs", jobs, "parallel replications");
    simulate->add_option("--out", out_path, "output CSV (default stdout)");
    simulate->add_flag("--timing", timing, "include the T column");

    bool full = false;
    int bench_reps = 0;
    auto* bench = app.add_subcommand("bench", "run the benchmark table suite");
    bench->add_flag("--full", full, "full-scale settings (n=1000/p=1000, 50 reps)");
    bench->add_option("--reps", bench_reps, "override replication count");
    bench->add_option("--seed", flags.seed, "base seed");
    bench->add_option("--jobs", jobs, "parallel replications");
    bench->add_option("--out", out_path, "output CSV (default stdout)");

    Index vn = 8, vp = 2, vq = 2;
    auto* verify = app.add_subcommand("verify", "small-instance oracle report");
    verify->add_option("--seed", flags.seed, "seed");
    verify->add_option("--n", vn, "instance size (kept small; exhaustive)");
    verify->add_option("--p", vp, "predictors");
    verify->add_option("--q", vq, "budget");
    verify->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(input, response, flags, out_path, timing);
        if (tune->parsed())
            return cmd_tune(input, response, flags, grid_text, criterion_text, jobs,
                            out_path, timing);
        if (simulate->parsed())
            return cmd_simulate(example, sim_n, sim_p, sim_ostar, sim_rho, reps,
                                flags.seed, jobs, out_path, timing);
        if (bench->parsed())
            return cmd_bench(full, flags.seed, jobs, bench_reps, out_path);
        if (verify->parsed()) return cmd_verify(flags.seed, vn, vp, vq, out_path);
    } catch (const piq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
