#include "panelgap/linalg.hpp"

#include <stdexcept>

namespace panelgap {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* where) {
    if (!m.allFinite())
        throw std::invalid_argument(std::string(where) + ": non-finite entry");
}

}  // namespace

SvdResult svd(const Eigen::MatrixXd& m) {
    require_finite(m, "svd");
    Eigen::JacobiSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("svt: negative threshold");
    require_finite(m, "svt");
    Eigen::JacobiSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = dec.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        s[k] = std::max(s[k] - threshold, 0.0);
        if (s[k] > 0.0) rank = static_cast<int>(k) + 1;
    }
    if (rank == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
    return dec.matrixU().leftCols(rank) * s.head(rank).asDiagonal() *
           dec.matrixV().leftCols(rank).transpose();
}

double nuclear_norm(const Eigen::MatrixXd& m) {
    require_finite(m, "nuclear_norm");
    Eigen::JacobiSVD<Eigen::MatrixXd> dec(m);
    return dec.singularValues().sum();
}

}  // namespace panelgap
