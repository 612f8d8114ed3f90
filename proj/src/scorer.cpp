#include "symtree/scorer.hpp"

#include <cmath>

namespace symtree {

OlsScorer::OlsScorer(const Eigen::VectorXd& y) : residual_(y) {
    basis_.resize(y.size(), 8);
    mae_ = residual_.cwiseAbs().mean();
}

void OlsScorer::orthogonal_component(const Eigen::VectorXd& col, Eigen::VectorXd& u,
                                     double& rho) const {
    u = col;
    if (k_ > 0) {
        const auto basis = basis_.leftCols(k_);
        u.noalias() -= basis * (basis.transpose() * col);
        u.noalias() -= basis * (basis.transpose() * u);
    }
    rho = u.norm();
    const double col_norm = col.norm();
    if (!(rho > kRankThreshold * col_norm)) rho = -1.0;  // dependent (or NaN)
}

double OlsScorer::mae_with(const Eigen::VectorXd& col) const {
    Eigen::VectorXd u;
    double rho;
    orthogonal_component(col, u, rho);
    if (rho <= 0.0) return mae_;
    const double alpha = u.dot(residual_) / rho;
    return (residual_ - (alpha / rho) * u).cwiseAbs().mean();
}

void OlsScorer::add_column(const Eigen::VectorXd& col) {
    Eigen::VectorXd u;
    double rho;
    orthogonal_component(col, u, rho);
    if (rho <= 0.0) return;
    const double alpha = u.dot(residual_) / rho;
    residual_ -= (alpha / rho) * u;
    mae_ = residual_.cwiseAbs().mean();
    if (k_ == basis_.cols()) basis_.conservativeResize(Eigen::NoChange, basis_.cols() * 2);
    basis_.col(k_) = u / rho;
    ++k_;
}

}  // namespace symtree
