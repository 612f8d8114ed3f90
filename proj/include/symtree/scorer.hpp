// Incremental least-squares scorer.
//
// Maintains an orthonormal basis of the columns accepted so far plus the
// residual of the target against that basis. Scoring a candidate column
// costs O(rows * columns) instead of a full refit; the resulting MAE is
// the same quantity a full least-squares fit of the extended column set
// would produce (predictions of a least-squares fit are unique even when
// the weights are not).
//
// mae_with() and add_column() run the identical floating-point sequence,
// so scoring a column and then committing it leaves current_mae() equal
// to the previously returned value, bit for bit. The search relies on
// this to keep its accept/reject decisions reproducible.
#pragma once

#include <Eigen/Dense>

#include "symtree/fit.hpp"

namespace symtree {

class OlsScorer {
public:
    explicit OlsScorer(const Eigen::VectorXd& y);

    /// MAE after extending the basis with this column, without committing.
    /// A column (numerically) dependent on the current basis cannot change
    /// the fit; the current MAE is returned unchanged in that case.
    double mae_with(const Eigen::VectorXd& col) const;

    /// Commit a column. Dependent columns are ignored.
    void add_column(const Eigen::VectorXd& col);

    double current_mae() const { return mae_; }
    Eigen::Index basis_size() const { return k_; }

private:
    // Returns the component of col orthogonal to the basis (two
    // Gram-Schmidt passes) and its norm; rho <= 0 flags dependence.
    void orthogonal_component(const Eigen::VectorXd& col, Eigen::VectorXd& u, double& rho) const;

    Eigen::MatrixXd basis_;   // rows x capacity; first k_ columns valid
    Eigen::Index k_ = 0;
    Eigen::VectorXd residual_;
    double mae_ = 0.0;
};

}  // namespace symtree
