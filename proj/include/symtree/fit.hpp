// Ordinary least squares over the term design matrix, and the MAE-based
// score that drives the search.
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "symtree/expression.hpp"

namespace symtree {

/// Pivot magnitudes below this fraction of the largest pivot count as
/// zero when determining numerical rank.
inline constexpr double kRankThreshold = 1e-10;

struct FitResult {
    Expression expression;
    double train_mae = 0.0;
    double score = 0.0;  // 1 / (1 + train_mae), exactly
    std::size_t rank = 0;
};

struct DesignMatrix {
    Eigen::MatrixXd values;  // n x (m+1); last column all ones (intercept)
    bool finite = true;
};

/// Column j holds eval_term(terms[j], row) for each row of X; the final
/// column is the intercept. finite is false iff any entry is non-finite.
DesignMatrix design_matrix(std::span<const Term> terms, const Eigen::MatrixXd& X);

/// Least-squares fit of the terms (plus intercept) to the data. Uses a
/// column-pivoted orthogonal decomposition; rank-deficient systems
/// resolve to the minimum-norm solution. Deterministic: identical inputs
/// give bit-identical weights.
///
/// Throws IndeterminateError when the design matrix has non-finite
/// entries and EmptyDataError on an empty dataset.
FitResult fit(std::vector<Term> terms, const Dataset& data);

/// Mean absolute error of the fitted expression on the data. Non-finite
/// when any prediction is non-finite.
double mae(const Expression& expr, const Dataset& data);

/// 1 / (1 + mae); 0 when the MAE is non-finite (worst possible score).
double score(const Expression& expr, const Dataset& data);

/// The score corresponding to a precomputed MAE value.
double score_from_mae(double mae_value);

}  // namespace symtree
