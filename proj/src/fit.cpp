#include "symtree/fit.hpp"

#include <cmath>
#include <limits>

namespace symtree {

DesignMatrix design_matrix(std::span<const Term> terms, const Eigen::MatrixXd& X) {
    const auto n = X.rows();
    const auto m = static_cast<Eigen::Index>(terms.size());
    DesignMatrix out;
    out.values.resize(n, m + 1);
    for (Eigen::Index j = 0; j < m; ++j) {
        out.values.col(j) = eval_term_column(terms[static_cast<std::size_t>(j)], X);
    }
    out.values.col(m).setOnes();
    out.finite = out.values.allFinite();
    return out;
}

Eigen::VectorXd solve_least_squares(Eigen::MatrixXd design, const Eigen::VectorXd& y,
                                    std::size_t* rank_out) {
    // Equilibrate columns to unit norm before factoring. Term columns span
    // enormous magnitude ranges (a degree-16 monomial on [-5, 5] dwarfs a
    // sine column), which would make the pivot-based rank threshold
    // meaningless and let near-dependent directions inflate the weights.
    // Scaling back afterwards preserves the least-squares minimizer.
    const Eigen::Index cols = design.cols();
    Eigen::VectorXd scale(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double norm = design.col(j).norm();
        scale[j] = norm > 0.0 ? 1.0 / norm : 1.0;
        design.col(j) *= scale[j];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankThreshold);
    cod.compute(design);
    if (rank_out) *rank_out = static_cast<std::size_t>(cod.rank());
    Eigen::VectorXd coeffs = cod.solve(y);
    coeffs.array() *= scale.array();
    return coeffs;
}

FitResult fit(std::vector<Term> terms, const Dataset& data) {
    if (data.n() == 0) throw EmptyDataError("fit: empty dataset");
    DesignMatrix design = design_matrix(terms, data.X);
    if (!design.finite)
        throw IndeterminateError("fit: design matrix has non-finite entries");

    std::size_t rank = 0;
    const Eigen::VectorXd coeffs = solve_least_squares(std::move(design.values), data.y, &rank);

    const auto m = static_cast<Eigen::Index>(terms.size());
    FitResult result;
    result.expression.dim = static_cast<std::size_t>(data.d());
    result.expression.terms = std::move(terms);
    result.expression.weights.assign(coeffs.data(), coeffs.data() + m);
    result.expression.intercept = coeffs[m];
    result.rank = static_cast<std::size_t>(cod.rank());
    result.train_mae = mae(result.expression, data);
    result.score = score_from_mae(result.train_mae);
    return result;
}

double mae(const Expression& expr, const Dataset& data) {
    if (static_cast<std::size_t>(data.d()) != expr.dim)
        throw std::invalid_argument("mae: dataset dimension mismatch");
    const Eigen::VectorXd predictions = eval_expression_column(expr, data.X);
    return (predictions - data.y).cwiseAbs().mean();
}

double score(const Expression& expr, const Dataset& data) {
    return score_from_mae(mae(expr, data));
}

double score_from_mae(double mae_value) {
    if (!std::isfinite(mae_value)) return 0.0;
    return 1.0 / (1.0 + mae_value);
}

}  // namespace symtree
