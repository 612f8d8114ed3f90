// Interaction-Transformation expressions.
//
// A model is a weighted sum of terms plus an intercept. Each term applies
// a one-dimensional transformation function to a monomial interaction of
// the input variables: t(prod_i x_i^k_i) with integer exponents k_i.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace symtree {

/// Thrown when a fit is attempted over a design matrix containing
/// non-finite entries (candidate terms must be pre-filtered instead).
class IndeterminateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an operation receives an empty dataset.
class EmptyDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Transform : std::uint8_t {
    Identity,
    Sin,
    Cos,
    Tan,
    SqrtAbs,
    Log,
    Log1p,
};

inline constexpr Transform kAllTransforms[] = {
    Transform::Identity, Transform::Sin,  Transform::Cos,  Transform::Tan,
    Transform::SqrtAbs,  Transform::Log,  Transform::Log1p,
};

/// Canonical lowercase name used in serialized models.
std::string_view transform_name(Transform t);

/// Inverse of transform_name. Throws std::invalid_argument on unknown names.
Transform transform_from_name(std::string_view name);

/// Apply the scalar map. Domain violations (log of a non-positive value,
/// 0^-1, ...) yield a non-finite result; this never throws.
double apply_transform(Transform t, double z);

/// x^k by exponentiation-by-squaring; k may be negative. 0^0 == 1.
double eval_power(double x, int k);

/// Exponents outside [-kMaxExponent, kMaxExponent] are rejected when
/// expressions are constructed or deserialized; the search drops such
/// candidates before they reach a model.
inline constexpr int kMaxExponent = 64;

struct Term {
    std::vector<int> exponents;
    Transform transform = Transform::Identity;

    std::size_t dim() const { return exponents.size(); }

    bool operator==(const Term& other) const {
        return transform == other.transform && exponents == other.exponents;
    }

    /// True when every exponent is within the supported range.
    bool in_exponent_range() const;
};

struct TermHash {
    std::size_t operator()(const Term& t) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        mix(static_cast<std::uint64_t>(t.transform));
        for (int k : t.exponents) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
        return static_cast<std::size_t>(h);
    }
};

/// A fitted (or fittable) IT model: ordered terms, matching weights, and
/// an intercept. Immutable by convention once built; evaluation is pure.
struct Expression {
    std::size_t dim = 0;
    std::vector<Term> terms;
    std::vector<double> weights;
    double intercept = 0.0;

    /// Checks the structural invariants: weight/term counts match, all
    /// coefficients finite, term dimensions equal dim, exponents in range,
    /// no duplicate terms. Throws std::invalid_argument on violation.
    void validate() const;
};

/// Training or test data: n rows of d explanatory variables plus targets.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    Dataset(Eigen::MatrixXd x_in, Eigen::VectorXd y_in);

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
};

/// The d identity terms x_0 ... x_{d-1}: the root model of the search.
std::vector<Term> make_linear_terms(std::size_t d);

/// t(prod x_i^k_i) at one point. Non-finite results propagate as
/// non-finite values; never throws on domain violations.
double eval_term(const Term& term, std::span<const double> x);

/// intercept + sum_i w_i * eval_term(term_i, x).
double eval_expression(const Expression& expr, std::span<const double> x);

/// Column vector of one term over every row of X.
Eigen::VectorXd eval_term_column(const Term& term, const Eigen::MatrixXd& X);

/// Predictions of expr over every row of X.
Eigen::VectorXd eval_expression_column(const Expression& expr, const Eigen::MatrixXd& X);

/// Node count of the canonical expression tree. Per term: a weight leaf,
/// a multiply node, a transform node unless the transform is the
/// identity, and the monomial subtree (variable leaf per nonzero
/// exponent, pow node + exponent leaf when |k| != 1, multiply nodes
/// joining the factors; a constant leaf when all exponents are zero).
/// Terms and the intercept leaf (when nonzero) are joined by addition
/// nodes. An empty constant-zero expression counts as a single leaf.
std::size_t expression_size(const Expression& expr);

/// Human-readable infix form, weights at 6 significant digits.
std::string render(const Expression& expr);

}  // namespace symtree
