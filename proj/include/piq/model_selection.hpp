#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "piq/dataset.hpp"
#include "piq/losses.hpp"
#include "piq/solvers.hpp"

namespace piq {

enum class Criterion { pic, pic_gamma_only, scale_free };

std::string criterion_name(Criterion c);
Criterion parse_criterion(const std::string& text); // pic|pic0|sfpic

struct PicScore {
    double loss_term = 0.0;
    double penalty_term = 0.0;
    double total = 0.0;
    Criterion variant = Criterion::pic;
    double a = 0.0;      // multiplier A (pic variants)
    double alpha1 = 0.0; // scale-free constants
    double alpha2 = 0.0;
};

/// Complexity penalty o + o log(en/o) + s + s log(ep/s), with 0 log 0 = 0.
double pic_penalty(Index s, Index o, Index n, Index p);

/// Gamma-only reduction o + o log(en/o).
double pic_penalty_gamma(Index o, Index n);

/// loss(fit) + A * penalty evaluated at the fitted supports.
PicScore pic_score(const Estimate& fit, const Dataset& data, const LossModel& loss,
                   double A, bool gamma_only = false);

/// (n-p) log(RSS) + alpha1*|gamma|_0 + alpha2*|gamma|_0 log(en/|gamma|_0);
/// quadratic loss, n > p, RSS > 0.
PicScore scale_free_pic(const Estimate& fit, const Dataset& data, double alpha1 = 5.5,
                        double alpha2 = 1.0);

struct TuneResult {
    Index best_q = 0;
    std::vector<Index> grid;
    std::vector<PicScore> scores;
    std::vector<Estimate> fits;
};

/// Fits the grid of gamma budgets and returns the criterion argmin; ties go to
/// the smaller q. Grid cells run in parallel with per-cell derived seeds.
TuneResult tune_q(const Dataset& data, const LossModel& loss, const FitConfig& base,
                  const std::vector<Index>& q_grid, Criterion criterion, int jobs = 1,
                  double A = 2.0);

} // namespace piq
