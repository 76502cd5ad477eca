#include "piq/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "piq/parallel.hpp"
#include "piq/rng.hpp"

namespace piq {

namespace {

VectorXd pattern_to_length(std::initializer_list<double> pattern, Index p) {
    VectorXd beta = VectorXd::Zero(p);
    Index j = 0;
    for (double v : pattern) {
        if (j >= p) break;
        beta(j++) = v;
    }
    return beta;
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

} // namespace

void SimSpec::validate() const {
    require(n >= 1 && p >= 1, ErrorKind::usage, "sim spec: need n >= 1, p >= 1");
    require(rho >= 0.0 && rho < 1.0, ErrorKind::usage, "sim spec: rho in [0, 1)");
    require(o_star >= 0 && 2 * o_star <= n, ErrorKind::usage,
            "sim spec: o_star must satisfy o* <= n/2");
    require(beta_star.size() == p, ErrorKind::dimension,
            "sim spec: beta_star length != p");
    require(noise_sigma >= 0.0, ErrorKind::usage, "sim spec: noise_sigma >= 0");
}

SimSpec example_spec(ExampleId id, Index n, Index p, Index o_star, double rho,
                     std::uint64_t seed) {
    SimSpec spec;
    spec.example = id;
    spec.n = n;
    spec.p = p;
    spec.rho = rho;
    spec.o_star = o_star;
    spec.seed = seed;
    switch (id) {
    case ExampleId::ex1_reg_lowdim:
        spec.beta_star =
            pattern_to_length({1, 1, 0.5, 0.5, -1.5, -1.5, -1, -1, 1, 1}, p);
        spec.gamma_magnitude = 5.0;
        spec.task = Task::regression;
        break;
    case ExampleId::ex2_cls_lowdim:
        spec.beta_star =
            pattern_to_length({3, 3, 1.5, 1.5, 3, 3, -3, -3, 3, 3}, p);
        spec.gamma_magnitude = -90.0;
        spec.task = Task::classification;
        break;
    case ExampleId::ex3_reg_highdim:
        spec.beta_star = pattern_to_length({1, 0.5, 0, 0, -0.5, -1}, p);
        spec.gamma_magnitude = 5.0;
        spec.task = Task::regression;
        break;
    case ExampleId::ex4_cls_highdim:
        spec.beta_star = pattern_to_length({3, 1.5, 3}, p);
        spec.gamma_magnitude = -45.0;
        spec.task = Task::classification;
        break;
    case ExampleId::custom:
        spec.beta_star = VectorXd::Zero(p);
        break;
    }
    return spec;
}

SimSpec example_spec(int number, Index n, Index p, Index o_star, double rho,
                     std::uint64_t seed) {
    switch (number) {
    case 1: return example_spec(ExampleId::ex1_reg_lowdim, n, p, o_star, rho, seed);
    case 2: return example_spec(ExampleId::ex2_cls_lowdim, n, p, o_star, rho, seed);
    case 3: return example_spec(ExampleId::ex3_reg_highdim, n, p, o_star, rho, seed);
    case 4: return example_spec(ExampleId::ex4_cls_highdim, n, p, o_star, rho, seed);
    default:
        throw_error(ErrorKind::usage, "example number must be 1..4");
    }
}

MatrixXd covariance_matrix(CovKind kind, Index p, double rho) {
    MatrixXd sigma(p, p);
    switch (kind) {
    case CovKind::toeplitz:
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j)
                sigma(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
        break;
    case CovKind::equicorrelated:
        sigma.setConstant(rho);
        sigma.diagonal().setOnes();
        break;
    case CovKind::blocked: {
        // Two equal-size blocks, equally correlated within, independent across.
        sigma.setZero();
        const Index half = p / 2;
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j) {
                const bool same_block = (i < half) == (j < half);
                if (i == j)
                    sigma(i, j) = 1.0;
                else if (same_block)
                    sigma(i, j) = rho;
            }
        break;
    }
    }
    return sigma;
}

SimInstance generate(const SimSpec& spec) {
    spec.validate();
    const Index n = spec.n, p = spec.p;

    const MatrixXd sigma = covariance_matrix(spec.covariance, p, spec.rho);
    Eigen::LLT<MatrixXd> llt(sigma);
    require(llt.info() == Eigen::Success, ErrorKind::numeric,
            "sim spec: covariance matrix is not positive definite");
    const MatrixXd chol_lower = llt.matrixL();

    Rng rng(spec.seed);
    SimInstance inst;
    inst.data.X.resize(n, p);
    VectorXd z(p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) z(j) = rng.normal();
        inst.data.X.row(i) = (chol_lower * z).transpose();
    }
    if (spec.leverage_rows)
        for (Index i = 0; i < spec.o_star; ++i)
            inst.data.X.row(i).setConstant(spec.leverage_value);

    inst.beta_star = spec.beta_star;
    inst.gamma_star = VectorXd::Zero(n);
    for (Index i = 0; i < spec.o_star; ++i) {
        inst.gamma_star(i) = spec.gamma_magnitude;
        inst.outlier_indices.push_back(i);
    }

    const VectorXd eta = inst.data.X * inst.beta_star + inst.gamma_star;
    inst.data.y.resize(n);
    if (spec.task == Task::regression) {
        for (Index i = 0; i < n; ++i)
            inst.data.y(i) = eta(i) + spec.noise_sigma * rng.normal();
    } else {
        for (Index i = 0; i < n; ++i)
            inst.data.y(i) = rng.bernoulli(sigmoid(eta(i))) ? 1.0 : 0.0;
    }
    inst.data.validate();
    return inst;
}

MetricsReport evaluate(const Estimate& fit, const SimInstance& truth, Task task,
                       const Dataset* test_set) {
    const Index n = truth.data.n(), p = truth.data.p();
    require(fit.beta.size() == p && fit.gamma.size() == n, ErrorKind::dimension,
            "evaluate: fit dimensions do not match the instance");

    MetricsReport report;
    const Index o_star = static_cast<Index>(truth.outlier_indices.size());
    std::set<Index> detected(fit.support_gamma.begin(), fit.support_gamma.end());
    Index missed = 0;
    for (Index i : truth.outlier_indices)
        if (!detected.count(i)) ++missed;
    report.masking_rate =
        o_star > 0 ? static_cast<double>(missed) / static_cast<double>(o_star) : 0.0;
    report.jd = (missed == 0);
    Index spurious = 0;
    std::set<Index> truth_set(truth.outlier_indices.begin(), truth.outlier_indices.end());
    for (Index i : fit.support_gamma)
        if (!truth_set.count(i)) ++spurious;
    report.false_alarm = n > o_star
                             ? static_cast<double>(spurious) / static_cast<double>(n - o_star)
                             : 0.0;

    if (task == Task::regression) {
        report.err = (fit.beta - truth.beta_star).squaredNorm() / static_cast<double>(p);
    } else {
        require(test_set != nullptr, ErrorKind::usage,
                "evaluate: classification needs a clean test set");
        Index wrong = 0;
        const VectorXd scores = test_set->X * fit.beta;
        for (Index i = 0; i < test_set->n(); ++i) {
            const double pred = scores(i) > 0.0 ? 1.0 : 0.0;
            if (pred != test_set->y(i)) ++wrong;
        }
        report.err = static_cast<double>(wrong) / static_cast<double>(test_set->n());
    }

    // Variable-selection metrics when the truth is sparse in beta.
    Index s_star = 0;
    for (Index j = 0; j < p; ++j)
        if (truth.beta_star(j) != 0.0) ++s_star;
    if (s_star < p) {
        Index bmissed = 0, bspurious = 0;
        for (Index j = 0; j < p; ++j) {
            const bool in_truth = truth.beta_star(j) != 0.0;
            const bool in_fit = fit.beta(j) != 0.0;
            if (in_truth && !in_fit) ++bmissed;
            if (!in_truth && in_fit) ++bspurious;
        }
        report.beta_masking =
            s_star > 0 ? static_cast<double>(bmissed) / static_cast<double>(s_star) : 0.0;
        report.beta_jd = (bmissed == 0);
        report.beta_false_alarm =
            static_cast<double>(bspurious) / static_cast<double>(p - s_star);
    }
    return report;
}

void ReplicationTable::aggregate() {
    const double r = static_cast<double>(reps.size());
    if (reps.empty()) return;
    err_mean = 0.0;
    masking_percent = 0.0;
    jd_percent = 0.0;
    false_alarm_mean = 0.0;
    beta_masking_percent = 0.0;
    beta_jd_percent = 0.0;
    beta_false_alarm_mean = 0.0;
    total_seconds = 0.0;
    has_beta_metrics = true;
    for (const MetricsReport& m : reps) {
        err_mean += m.err / r;
        masking_percent += 100.0 * m.masking_rate / r;
        jd_percent += m.jd ? 100.0 / r : 0.0;
        false_alarm_mean += m.false_alarm / r;
        total_seconds += m.runtime_seconds;
        if (m.beta_masking) {
            beta_masking_percent += 100.0 * (*m.beta_masking) / r;
            beta_jd_percent += *m.beta_jd ? 100.0 / r : 0.0;
            beta_false_alarm_mean += *m.beta_false_alarm / r;
        } else {
            has_beta_metrics = false;
        }
    }
}

FitConfig benchmark_fit_config(const SimSpec& spec, std::uint64_t seed) {
    Index s_star = 0;
    for (Index j = 0; j < spec.p; ++j)
        if (spec.beta_star(j) != 0.0) ++s_star;
    const bool sparse_beta = s_star > 0 && s_star < spec.p && spec.p > spec.n;

    FitConfig config;
    config.nu = 1e-4;
    config.seed = seed;
    config.q_gamma = static_cast<Index>(
        std::ceil(1.5 * static_cast<double>(spec.o_star)));
    if (spec.o_star == 0) config.q_gamma = std::max<Index>(spec.n / 10, 1);
    config.q_gamma = std::min(config.q_gamma, spec.n / 2);

    if (sparse_beta) {
        config.q_beta =
            static_cast<Index>(std::ceil(1.5 * static_cast<double>(s_star)));
        config.solver = SolverKind::bcd_general;
        // Staged schedules: the gamma budget plunges early (logarithmic) and
        // the beta budget finishes late, so the coefficient support settles on
        // released clean samples instead of absorbing the leverage rows.
        config.gamma_schedule = CoolingSchedule::make(CoolingKind::logarithmic,
                                                      spec.n, config.q_gamma, 100);
        config.beta_schedule = CoolingSchedule::make(CoolingKind::quadratic, spec.p,
                                                     *config.q_beta, 300);
        config.max_iters = 8000;
    } else if (spec.task == Task::regression) {
        config.solver = SolverKind::iq_bcd_regression;
        config.gamma_schedule = CoolingSchedule::make(CoolingKind::quadratic, spec.n,
                                                      config.q_gamma, 200);
    } else {
        config.solver = SolverKind::bcd_general;
        config.gamma_schedule = CoolingSchedule::make(CoolingKind::logarithmic, spec.n,
                                                      config.q_gamma, 200);
    }
    return config;
}

LossModel benchmark_loss(const SimSpec& spec) {
    return spec.task == Task::regression ? LossModel::quadratic()
                                         : LossModel::logistic();
}

ReplicationTable run_replications(const SimSpec& spec, const LossModel& loss,
                                  const FitConfig& config, int reps, int jobs,
                                  Index test_size) {
    require(reps >= 1, ErrorKind::usage, "run_replications: reps >= 1");
    ReplicationTable table;
    table.reps.resize(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
        SimSpec rep_spec = spec;
        rep_spec.seed = derive_seed(spec.seed, r);
        const SimInstance inst = generate(rep_spec);

        FitConfig rep_config = config;
        rep_config.seed = rep_spec.seed;

        const auto start = std::chrono::steady_clock::now();
        const Estimate fit = fit_piq(inst.data, loss, rep_config);
        const auto stop = std::chrono::steady_clock::now();

        std::optional<Dataset> test;
        if (spec.task == Task::classification) {
            SimSpec clean = rep_spec;
            clean.o_star = 0;
            clean.n = test_size;
            clean.seed = derive_seed(spec.seed, 1000000 + r);
            test = generate(clean).data;
        }
        MetricsReport report =
            evaluate(fit, inst, spec.task, test ? &*test : nullptr);
        report.runtime_seconds =
            std::chrono::duration<double>(stop - start).count();
        table.reps[r] = report;
    });

    table.aggregate();
    return table;
}

} // namespace piq
