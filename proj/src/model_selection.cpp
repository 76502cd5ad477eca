#include "piq/model_selection.hpp"

#include <algorithm>
#include <cmath>

#include "piq/parallel.hpp"
#include "piq/rng.hpp"

namespace piq {

namespace {

const double kE = std::exp(1.0);

double xlog(double x, double arg) { return x > 0.0 ? x * std::log(arg) : 0.0; }

/// Robust noise-scale plug-in for the dispersion-sensitive PIC variants:
/// 1.4826 * MAD of the clean-sample residuals of the most conservative fit on
/// the grid. Losses without a dispersion parameter use 1.
double preliminary_scale_sq(const Dataset& data, const LossModel& loss,
                            const Estimate& widest_fit) {
    if (loss.kind != LossKind::quadratic) return 1.0;
    const VectorXd r = data.y - data.X * widest_fit.beta - widest_fit.gamma;
    std::vector<double> clean;
    clean.reserve(static_cast<std::size_t>(r.size()));
    for (Index i = 0; i < r.size(); ++i)
        if (widest_fit.gamma(i) == 0.0) clean.push_back(r(i));
    if (clean.size() < 2) return 1.0;
    auto median_of = [](std::vector<double> v) {
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + mid, v.end());
        double m = v[mid];
        if (v.size() % 2 == 0) {
            std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
            m = 0.5 * (m + v[mid - 1]);
        }
        return m;
    };
    const double med = median_of(clean);
    for (double& x : clean) x = std::abs(x - med);
    const double mad = median_of(clean);
    const double sigma = 1.4826 * mad;
    return sigma > 0.0 ? sigma * sigma : 1.0;
}

} // namespace

std::string criterion_name(Criterion c) {
    switch (c) {
    case Criterion::pic: return "pic";
    case Criterion::pic_gamma_only: return "pic0";
    case Criterion::scale_free: return "sfpic";
    }
    return "?";
}

Criterion parse_criterion(const std::string& text) {
    if (text == "pic") return Criterion::pic;
    if (text == "pic0") return Criterion::pic_gamma_only;
    if (text == "sfpic") return Criterion::scale_free;
    throw_error(ErrorKind::usage,
                "unknown criterion '" + text + "'; expected pic|pic0|sfpic");
}

double pic_penalty(Index s, Index o, Index n, Index p) {
    require(o >= 0 && o <= n && s >= 0 && s <= p, ErrorKind::usage,
            "pic_penalty: cardinalities out of range");
    const double od = static_cast<double>(o), sd = static_cast<double>(s);
    const double nd = static_cast<double>(n), pd = static_cast<double>(p);
    return od + xlog(od, kE * nd / od) + sd + xlog(sd, kE * pd / sd);
}

double pic_penalty_gamma(Index o, Index n) {
    require(o >= 0 && o <= n, ErrorKind::usage, "pic_penalty: cardinality out of range");
    const double od = static_cast<double>(o), nd = static_cast<double>(n);
    return od + xlog(od, kE * nd / od);
}

PicScore pic_score(const Estimate& fit, const Dataset& data, const LossModel& loss,
                   double A, bool gamma_only) {
    require(A > 0.0, ErrorKind::usage, "pic_score: A must be > 0");
    PicScore score;
    score.variant = gamma_only ? Criterion::pic_gamma_only : Criterion::pic;
    score.a = A;
    score.loss_term = loss_value(loss, data.X * fit.beta + fit.gamma, data.y);
    const Index o = static_cast<Index>(fit.support_gamma.size());
    const Index s = static_cast<Index>(fit.support_beta.size());
    score.penalty_term = A * (gamma_only ? pic_penalty_gamma(o, data.n())
                                         : pic_penalty(s, o, data.n(), data.p()));
    score.total = score.loss_term + score.penalty_term;
    return score;
}

PicScore scale_free_pic(const Estimate& fit, const Dataset& data, double alpha1,
                        double alpha2) {
    const Index n = data.n(), p = data.p();
    require(n > p, ErrorKind::usage, "scale-free criterion requires n > p");
    auto it = fit.metadata.find("loss");
    require(it == fit.metadata.end() || it->second == "quadratic", ErrorKind::unsupported,
            "scale-free criterion is defined for the quadratic loss");
    const double rss = (data.X * fit.beta + fit.gamma - data.y).squaredNorm();
    require(rss > 0.0, ErrorKind::numeric,
            "scale-free criterion: zero residual sum of squares makes log(RSS) singular");
    PicScore score;
    score.variant = Criterion::scale_free;
    score.alpha1 = alpha1;
    score.alpha2 = alpha2;
    const Index o = static_cast<Index>(fit.support_gamma.size());
    const double od = static_cast<double>(o);
    score.loss_term = static_cast<double>(n - p) * std::log(rss);
    score.penalty_term =
        alpha1 * od + alpha2 * xlog(od, kE * static_cast<double>(n) / od);
    score.total = score.loss_term + score.penalty_term;
    return score;
}

TuneResult tune_q(const Dataset& data, const LossModel& loss, const FitConfig& base,
                  const std::vector<Index>& q_grid, Criterion criterion, int jobs,
                  double A) {
    require(!q_grid.empty(), ErrorKind::usage, "tune_q: empty grid");
    for (Index q : q_grid)
        require(2 * q <= data.n(), ErrorKind::usage, "tune_q: grid entry exceeds n/2");

    TuneResult result;
    result.grid = q_grid;
    result.fits.resize(q_grid.size());
    result.scores.resize(q_grid.size());

    parallel_for(q_grid.size(), jobs, [&](std::size_t cell) {
        FitConfig config = base;
        config.q_gamma = q_grid[cell];
        if (base.gamma_schedule) {
            CoolingSchedule gs = *base.gamma_schedule;
            gs.lower = q_grid[cell];
            gs.upper = std::max(gs.upper, gs.lower);
            config.gamma_schedule = gs;
        }
        config.seed = derive_seed(base.seed, cell);
        result.fits[cell] = fit_piq(data, loss, config);
    });

    // Dispersion plug-in from the widest fit (most conservative trimming).
    std::size_t widest = 0;
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (q_grid[i] > q_grid[widest]) widest = i;
    const double scale_sq = (criterion == Criterion::scale_free)
                                ? 1.0
                                : preliminary_scale_sq(data, loss, result.fits[widest]);

    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        switch (criterion) {
        case Criterion::pic:
            result.scores[i] = pic_score(result.fits[i], data, loss, A * scale_sq, false);
            break;
        case Criterion::pic_gamma_only:
            result.scores[i] = pic_score(result.fits[i], data, loss, A * scale_sq, true);
            break;
        case Criterion::scale_free:
            result.scores[i] = scale_free_pic(result.fits[i], data);
            break;
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < q_grid.size(); ++i) {
        const double si = result.scores[i].total, sb = result.scores[best].total;
        if (si < sb || (si == sb && q_grid[i] < q_grid[best])) best = i;
    }
    result.best_q = q_grid[best];
    return result;
}

} // namespace piq
