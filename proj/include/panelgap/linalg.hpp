#pragma once

#include <Eigen/Dense>

namespace panelgap {

struct SvdResult {
    Eigen::MatrixXd u;  // m x k, orthonormal columns
    Eigen::VectorXd s;  // k singular values, descending
    Eigen::MatrixXd v;  // n x k, orthonormal columns
};

// Thin SVD, k = min(m, n). Throws on non-finite entries.
SvdResult svd(const Eigen::MatrixXd& m);

// Singular-value soft-thresholding: u * diag(max(s - threshold, 0)) * v'.
// Exact minimizer of 0.5*||X - m||_F^2 + threshold*||X||_*.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double threshold);

// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& m);

}  // namespace panelgap
