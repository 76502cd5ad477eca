#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "piq/dataset.hpp"
#include "piq/losses.hpp"
#include "piq/solvers.hpp"

namespace piq {

enum class ExampleId { ex1_reg_lowdim, ex2_cls_lowdim, ex3_reg_highdim, ex4_cls_highdim, custom };
enum class CovKind { toeplitz, equicorrelated, blocked };
enum class Task { regression, classification };

/// Generator settings. The example presets carry the benchmark coefficient
/// patterns, leverage rows fixed at [3,...,3], and the planted shift sizes.
struct SimSpec {
    ExampleId example = ExampleId::custom;
    Index n = 100;
    Index p = 10;
    double rho = 0.5;           // design correlation in [0, 1)
    Index o_star = 0;           // planted outliers
    VectorXd beta_star;         // length p
    double gamma_magnitude = 5.0;
    double leverage_value = 3.0;
    bool leverage_rows = true; // false: response-shift outliers on unmodified rows
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;
    CovKind covariance = CovKind::toeplitz;
    Task task = Task::regression;

    void validate() const;
};

/// Preset for the benchmark examples (1: n>p regression, 2: n>p classification,
/// 3: p>n sparse regression, 4: p>n sparse classification).
SimSpec example_spec(ExampleId id, Index n, Index p, Index o_star, double rho,
                     std::uint64_t seed);

SimSpec example_spec(int number, Index n, Index p, Index o_star, double rho,
                     std::uint64_t seed);

struct SimInstance {
    Dataset data;
    VectorXd beta_star;
    VectorXd gamma_star;
    std::vector<Index> outlier_indices;
};

/// Deterministic given the settings (including seed).
SimInstance generate(const SimSpec& spec);

MatrixXd covariance_matrix(CovKind kind, Index p, double rho);

struct MetricsReport {
    double masking_rate = 0.0; // missed true outliers / o*
    bool jd = false;           // joint detection: zero misses
    double false_alarm = 0.0;  // spurious detections / (n - o*)
    double err = 0.0;          // mean square error on beta, or test misclassification
    double runtime_seconds = 0.0;
    // Variable-selection counterparts, filled when beta_star is sparse.
    std::optional<double> beta_masking;
    std::optional<bool> beta_jd;
    std::optional<double> beta_false_alarm;
};

MetricsReport evaluate(const Estimate& fit, const SimInstance& truth, Task task,
                       const Dataset* test_set = nullptr);

struct ReplicationTable {
    std::vector<MetricsReport> reps;
    double err_mean = 0.0;
    double masking_percent = 0.0;
    double jd_percent = 0.0;
    double false_alarm_mean = 0.0;
    double beta_masking_percent = 0.0;
    double beta_jd_percent = 0.0;
    double beta_false_alarm_mean = 0.0;
    bool has_beta_metrics = false;
    double total_seconds = 0.0;

    void aggregate();
};

/// Fits `reps` independent draws of the generator settings (parallel, seeds
/// derived from the base seed) and aggregates the benchmark metrics.
ReplicationTable run_replications(const SimSpec& spec, const LossModel& loss,
                                  const FitConfig& config, int reps, int jobs = 1,
                                  Index test_size = 2000);

/// Solver configuration used for the benchmark tables: BCD-type solvers,
/// budgets at 1.5x the planted cardinalities, cooling from the full budget
/// over 200 iterations. Doubly-sparse settings stage the schedules (gamma
/// cools fast, beta finishes late) to keep the leverage clusters detectable.
FitConfig benchmark_fit_config(const SimSpec& spec, std::uint64_t seed);

LossModel benchmark_loss(const SimSpec& spec);

} // namespace piq
