#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "piq/error.hpp"

namespace piq {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Response vector y (length n) plus design matrix X (n x p). Immutable after
/// construction; shared read-only across workers.
struct Dataset {
    MatrixXd X;
    VectorXd y;
    std::optional<std::vector<std::string>> feature_names;
    std::optional<std::vector<std::string>> sample_ids;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    void validate() const {
        require(X.rows() >= 1 && X.cols() >= 1, ErrorKind::data,
                "dataset: need n >= 1 and p >= 1");
        require(y.size() == X.rows(), ErrorKind::dimension,
                "dataset: y length does not match X rows");
        require(X.allFinite() && y.allFinite(), ErrorKind::data,
                "dataset: non-finite entries");
        if (feature_names)
            require(static_cast<Index>(feature_names->size()) == X.cols(),
                    ErrorKind::dimension, "dataset: feature_names length != p");
        if (sample_ids)
            require(static_cast<Index>(sample_ids->size()) == X.rows(),
                    ErrorKind::dimension, "dataset: sample_ids length != n");
    }
};

/// Implicit view of the augmented design [X/sqrt(rho), I]; products are formed
/// as X*beta (scaled) plus gamma, never as a materialized n x (p+n) matrix.
class AugmentedDesign {
public:
    explicit AugmentedDesign(const MatrixXd& X, double rho = 1.0)
        : X_(&X), inv_sqrt_rho_(1.0 / std::sqrt(rho)) {
        require(rho > 0.0, ErrorKind::usage, "augmented design: rho must be > 0");
    }

    /// X*beta/sqrt(rho) + gamma.
    VectorXd apply(const Eigen::Ref<const VectorXd>& beta,
                   const Eigen::Ref<const VectorXd>& gamma) const {
        return inv_sqrt_rho_ * (*X_ * beta) + gamma;
    }

    const MatrixXd& base() const { return *X_; }
    double scale() const { return inv_sqrt_rho_; }

private:
    const MatrixXd* X_;
    double inv_sqrt_rho_;
};

/// Column-standardizes X in place (mean 0, sample sd 1); constant columns are
/// centered only. Returns (means, sds) for metadata.
std::pair<VectorXd, VectorXd> standardize_columns(MatrixXd& X);

} // namespace piq
