#include "symtree/expression.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace symtree {

std::string_view transform_name(Transform t) {
    switch (t) {
        case Transform::Identity: return "id";
        case Transform::Sin: return "sin";
        case Transform::Cos: return "cos";
        case Transform::Tan: return "tan";
        case Transform::SqrtAbs: return "sqrtabs";
        case Transform::Log: return "log";
        case Transform::Log1p: return "log1p";
    }
    throw std::invalid_argument("transform_name: unknown transform tag");
}

Transform transform_from_name(std::string_view name) {
    for (Transform t : kAllTransforms) {
        if (transform_name(t) == name) return t;
    }
    throw std::invalid_argument("unknown transform name: " + std::string(name));
}

double apply_transform(Transform t, double z) {
    switch (t) {
        case Transform::Identity: return z;
        case Transform::Sin: return std::sin(z);
        case Transform::Cos: return std::cos(z);
        case Transform::Tan: return std::tan(z);
        case Transform::SqrtAbs: return std::sqrt(std::fabs(z));
        case Transform::Log: return z > 0.0 ? std::log(z) : std::numeric_limits<double>::quiet_NaN();
        case Transform::Log1p: return z > -1.0 ? std::log1p(z) : std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double eval_power(double x, int k) {
    if (k == 0) return 1.0;
    const bool negative = k < 0;
    // |k| as unsigned to avoid overflow on INT_MIN.
    unsigned int e = negative ? -static_cast<unsigned int>(k) : static_cast<unsigned int>(k);
    double base = x;
    double result = 1.0;
    while (e > 0) {
        if (e & 1u) result *= base;
        base *= base;
        e >>= 1;
    }
    return negative ? 1.0 / result : result;
}

bool Term::in_exponent_range() const {
    for (int k : exponents) {
        if (k > kMaxExponent || k < -kMaxExponent) return false;
    }
    return true;
}

void Expression::validate() const {
    if (dim == 0) throw std::invalid_argument("Expression: dim must be >= 1");
    if (terms.size() != weights.size())
        throw std::invalid_argument("Expression: weight count must match term count");
    if (!std::isfinite(intercept)) throw std::invalid_argument("Expression: non-finite intercept");
    std::unordered_set<Term, TermHash> seen;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].dim() != dim)
            throw std::invalid_argument("Expression: term dimension mismatch");
        if (!terms[i].in_exponent_range())
            throw std::invalid_argument("Expression: term exponent out of range");
        if (!std::isfinite(weights[i]))
            throw std::invalid_argument("Expression: non-finite weight");
        if (!seen.insert(terms[i]).second)
            throw std::invalid_argument("Expression: duplicate term");
    }
}

Dataset::Dataset(Eigen::MatrixXd x_in, Eigen::VectorXd y_in)
    : X(std::move(x_in)), y(std::move(y_in)) {
    if (X.rows() == 0) throw EmptyDataError("Dataset: no rows");
    if (X.cols() == 0) throw std::invalid_argument("Dataset: no columns");
    if (X.rows() != y.size())
        throw std::invalid_argument("Dataset: row count must match target count");
    if (!X.allFinite() || !y.allFinite())
        throw std::invalid_argument("Dataset: non-finite entries");
}

std::vector<Term> make_linear_terms(std::size_t d) {
    if (d == 0) throw std::invalid_argument("make_linear_terms: dimension must be >= 1");
    std::vector<Term> terms(d);
    for (std::size_t i = 0; i < d; ++i) {
        terms[i].exponents.assign(d, 0);
        terms[i].exponents[i] = 1;
        terms[i].transform = Transform::Identity;
    }
    return terms;
}

double eval_term(const Term& term, std::span<const double> x) {
    if (x.size() != term.exponents.size())
        throw std::invalid_argument("eval_term: point dimension mismatch");
    double product = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int k = term.exponents[i];
        if (k != 0) product *= eval_power(x[i], k);
    }
    return apply_transform(term.transform, product);
}

double eval_expression(const Expression& expr, std::span<const double> x) {
    if (x.size() != expr.dim)
        throw std::invalid_argument("eval_expression: point dimension mismatch");
    double acc = expr.intercept;
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
        acc += expr.weights[i] * eval_term(expr.terms[i], x);
    }
    return acc;
}

Eigen::VectorXd eval_term_column(const Term& term, const Eigen::MatrixXd& X) {
    if (static_cast<std::size_t>(X.cols()) != term.exponents.size())
        throw std::invalid_argument("eval_term_column: dimension mismatch");
    Eigen::VectorXd col(X.rows());
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(r, c);
        col[r] = eval_term(term, row);
    }
    return col;
}

Eigen::VectorXd eval_expression_column(const Expression& expr, const Eigen::MatrixXd& X) {
    if (static_cast<std::size_t>(X.cols()) != expr.dim)
        throw std::invalid_argument("eval_expression_column: dimension mismatch");
    Eigen::VectorXd out(X.rows());
    std::vector<double> row(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) row[static_cast<std::size_t>(c)] = X(r, c);
        out[r] = eval_expression(expr, row);
    }
    return out;
}

namespace {

std::size_t monomial_node_count(const Term& term) {
    std::size_t factors = 0;
    std::size_t nodes = 0;
    for (int k : term.exponents) {
        if (k == 0) continue;
        ++factors;
        nodes += 1;                              // variable leaf
        if (k != 1 && k != -1) nodes += 2;       // pow node + exponent leaf
    }
    if (factors == 0) return 1;                  // constant leaf
    return nodes + (factors - 1);                // joining multiplies
}

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%#.6g", w);
    return buf;
}

std::string render_term(const Term& term) {
    std::string product;
    std::size_t factors = 0;
    for (std::size_t i = 0; i < term.exponents.size(); ++i) {
        const int k = term.exponents[i];
        if (k == 0) continue;
        if (factors > 0) product += '*';
        product += 'x';
        product += std::to_string(i);
        if (k != 1) {
            product += '^';
            product += std::to_string(k);
        }
        ++factors;
    }
    if (factors == 0) product = "1";
    if (term.transform == Transform::Identity) return product;
    std::string out(transform_name(term.transform));
    out += '(';
    out += product;
    out += ')';
    return out;
}

}  // namespace

std::size_t expression_size(const Expression& expr) {
    std::size_t summands = expr.terms.size();
    std::size_t nodes = 0;
    for (const Term& term : expr.terms) {
        nodes += 2;  // weight leaf + multiply
        if (term.transform != Transform::Identity) nodes += 1;
        nodes += monomial_node_count(term);
    }
    if (expr.intercept != 0.0) {
        nodes += 1;
        ++summands;
    }
    if (summands == 0) return 1;  // constant zero
    return nodes + (summands - 1);
}

std::string render(const Expression& expr) {
    std::string out;
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
        const double w = expr.weights[i];
        if (out.empty()) {
            out += format_weight(w);
        } else {
            out += w < 0.0 ? " - " : " + ";
            out += format_weight(std::fabs(w));
        }
        out += '*';
        out += render_term(expr.terms[i]);
    }
    if (expr.intercept != 0.0 || expr.terms.empty()) {
        if (out.empty()) {
            out = format_weight(expr.intercept);
        } else {
            out += expr.intercept < 0.0 ? " - " : " + ";
            out += format_weight(std::fabs(expr.intercept));
        }
    }
    return out;
}

}  // namespace symtree
