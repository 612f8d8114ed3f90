#include "symtree/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "symtree/rng.hpp"

namespace symtree {

namespace {

double f1(const double* x) {
    const double v = x[0];
    return v * v * v + v * v + 5.0 * v;
}
double f2(const double* x) {
    const double v = x[0];
    const double v2 = v * v;
    return v2 * v2 + v2 * v + v2 + v;
}
double f3(const double* x) {
    const double v = x[0];
    const double v2 = v * v;
    const double v3 = v2 * v;
    return v2 * v3 + v2 * v2 + v3 + v2 + v;
}
double f4(const double* x) {
    const double v = x[0];
    const double v2 = v * v;
    const double v3 = v2 * v;
    return v3 * v3 + v2 * v3 + v2 * v2 + v3 + v2 + v;
}
double f5(const double* x) { return std::sin(x[0] * x[0]) * std::cos(x[0]) - 1.0; }
double f6(const double* x) { return std::sin(x[0]) + std::sin(x[0] + x[0] * x[0]); }
double f7(const double* x) { return std::log(x[0] + 1.0) + std::log(x[0] * x[0] + 1.0); }
double f8(const double* x) { return 5.0 * std::sqrt(std::fabs(x[0])); }
double f9(const double* x) { return std::sin(x[0]) + std::sin(x[1] * x[1]); }
double f10(const double* x) { return 6.0 * std::sin(x[0]) * std::cos(x[1]); }
double f11(const double* x) { return 2.0 - 2.1 * std::cos(9.8 * x[0]) * std::sin(1.3 * x[1]); }
double f12(const double* x) {
    const double a = x[0] - 1.0;
    const double b = x[1] - 2.5;
    return std::exp(-a * a) / (1.2 + b * b);
}
double f13(const double* x) {
    double acc = 5.0;
    for (int i = 0; i < 5; ++i) {
        const double v = x[i] - 3.0;
        acc += v * v;
    }
    return 10.0 / acc;
}
double f14(const double* x) { return x[0] * x[1] * x[2] * x[3] * x[4]; }
double f15(const double* x) {
    const double v = x[0];
    const double v2 = v * v;
    const double v3 = v2 * v;
    return v3 * v3 / (v3 + v2 + 1.0);
}
double f16(const double* x) {
    const double v = x[0];
    return v / (1.0 - std::log(v * v + v + 1.0));
}
double f17(const double* x) {
    const double v = x[0];
    return 100.0 + std::log(v * v) + 5.0 * std::sqrt(std::fabs(v));
}

const std::vector<BenchmarkSpec>& benchmark_table() {
    static const std::vector<BenchmarkSpec> specs = {
        {"F1", 1, -5.0, 5.0, 600, true, f1},
        {"F2", 1, -5.0, 5.0, 600, true, f2},
        {"F3", 1, -5.0, 5.0, 600, true, f3},
        {"F4", 1, -5.0, 5.0, 600, true, f4},
        {"F5", 1, -5.0, 5.0, 600, false, f5},
        {"F6", 1, -5.0, 5.0, 600, false, f6},
        {"F7", 1, 0.0, 2.0, 600, true, f7},
        {"F8", 1, -5.0, 5.0, 600, true, f8},
        {"F9", 2, -5.0, 5.0, 600, true, f9},
        {"F10", 2, -5.0, 5.0, 600, false, f10},
        {"F11", 2, -5.0, 5.0, 600, false, f11},
        {"F12", 2, -5.0, 5.0, 600, false, f12},
        {"F13", 5, -5.0, 5.0, 600, false, f13},
        {"F14", 5, -5.0, 5.0, 600, true, f14},
        {"F15", 1, -5.0, 5.0, 600, false, f15},
        {"F16", 1, -5.0, 5.0, 600, false, f16},
        {"F17", 1, -5.0, 5.0, 600, true, f17},
    };
    return specs;
}

Term identity_term(std::vector<int> exponents) {
    Term t;
    t.exponents = std::move(exponents);
    t.transform = Transform::Identity;
    return t;
}

Term transformed_term(std::vector<int> exponents, Transform f) {
    Term t;
    t.exponents = std::move(exponents);
    t.transform = f;
    return t;
}

Expression make_expression(std::size_t dim, std::vector<Term> terms,
                           std::vector<double> weights, double intercept) {
    Expression e;
    e.dim = dim;
    e.terms = std::move(terms);
    e.weights = std::move(weights);
    e.intercept = intercept;
    e.validate();
    return e;
}

// All exponent vectors of the given dimension with total degree in
// [1, order], in graded lexicographic order (degree ascending, then
// lexicographic).
std::vector<std::vector<int>> enumerate_monomials(std::size_t dim, std::size_t order) {
    std::vector<std::vector<int>> out;
    for (int degree = 1; degree <= static_cast<int>(order); ++degree) {
        std::vector<std::vector<int>> level;
        std::vector<int> vec(dim, 0);
        auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
            if (pos + 1 == dim) {
                vec[pos] = remaining;
                level.push_back(vec);
                return;
            }
            for (int k = 0; k <= remaining; ++k) {
                vec[pos] = k;
                self(self, pos + 1, remaining - k);
            }
        };
        emit(emit, 0, degree);
        std::sort(level.begin(), level.end());
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

}  // namespace

std::vector<std::string> benchmark_ids() {
    std::vector<std::string> ids;
    for (const BenchmarkSpec& spec : benchmark_table()) ids.push_back(spec.id);
    return ids;
}

const BenchmarkSpec& benchmark(std::string_view id) {
    for (const BenchmarkSpec& spec : benchmark_table()) {
        if (spec.id == id) return spec;
    }
    throw std::invalid_argument("unknown benchmark id: " + std::string(id));
}

std::pair<Dataset, Dataset> sample(const BenchmarkSpec& spec, std::uint64_t seed) {
    std::size_t index = 0;
    const auto& table = benchmark_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].id == spec.id) index = i + 1;
    }
    Xoshiro256 rng(derive_seed(seed, index));

    const auto n = static_cast<Eigen::Index>(spec.n_samples);
    const auto d = static_cast<Eigen::Index>(spec.dim);
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    std::vector<double> row(spec.dim);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            X(r, c) = rng.uniform(spec.sample_lo, spec.sample_hi);
            row[static_cast<std::size_t>(c)] = X(r, c);
        }
        y[r] = spec.target(row.data());
    }
    const Eigen::Index half = n / 2;
    Dataset train(X.topRows(half), y.head(half));
    Dataset test(X.bottomRows(n - half), y.tail(n - half));
    return {std::move(train), std::move(test)};
}

void PolySpec::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("PolySpec: dim must be in {1,2,3}");
    if (order < 1 || order > 4)
        throw std::invalid_argument("PolySpec: order must be in {1,2,3,4}");
    if (n_base_terms < 1 || n_base_terms > 4)
        throw std::invalid_argument("PolySpec: n_base_terms must be in {1,2,3,4}");
    if (n_base_terms > poly_term_pool_size(dim, order))
        throw std::invalid_argument("PolySpec: not enough distinct monomials for n_base_terms");
    if (n_train == 0 || n_test == 0) throw std::invalid_argument("PolySpec: empty split");
    if (!(range_lo < range_hi)) throw std::invalid_argument("PolySpec: empty sampling range");
}

std::size_t poly_term_pool_size(std::size_t dim, std::size_t order) {
    // C(order + dim, dim) - 1: all monomials of total degree <= order,
    // minus the constant one.
    std::size_t num = 1;
    for (std::size_t i = 1; i <= dim; ++i) num = num * (order + i) / i;
    return num - 1;
}

PolyInstance random_polynomial(const PolySpec& spec) {
    spec.validate();
    Xoshiro256 rng(spec.seed);

    const std::vector<std::vector<int>> pool = enumerate_monomials(spec.dim, spec.order);
    std::vector<std::size_t> top_degree;  // indices of degree == order monomials
    for (std::size_t i = 0; i < pool.size(); ++i) {
        int degree = 0;
        for (int k : pool[i]) degree += k;
        if (degree == static_cast<int>(spec.order)) top_degree.push_back(i);
    }

    // Pick one full-degree monomial, then the rest without replacement.
    std::vector<std::size_t> chosen;
    chosen.push_back(top_degree[rng.uniform_index(top_degree.size())]);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i != chosen[0]) others.push_back(i);
    }
    for (std::size_t k = 1; k < spec.n_base_terms; ++k) {
        const std::size_t pick = rng.uniform_index(others.size());
        chosen.push_back(others[pick]);
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::sort(chosen.begin(), chosen.end());  // graded-lex term order

    std::vector<Term> terms;
    std::vector<double> weights;
    for (std::size_t idx : chosen) {
        terms.push_back(identity_term(pool[idx]));
        const double magnitude = rng.uniform(0.5, 5.0);
        const bool negative = rng.uniform01() < 0.5;
        weights.push_back(negative ? -magnitude : magnitude);
    }
    Expression target = make_expression(spec.dim, std::move(terms), std::move(weights), 0.0);

    auto draw = [&](std::size_t rows) {
        const auto n = static_cast<Eigen::Index>(rows);
        const auto d = static_cast<Eigen::Index>(spec.dim);
        Eigen::MatrixXd X(n, d);
        Eigen::VectorXd y(n);
        std::vector<double> row(spec.dim);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                X(r, c) = rng.uniform(spec.range_lo, spec.range_hi);
                row[static_cast<std::size_t>(c)] = X(r, c);
            }
            y[r] = eval_expression(target, row);
        }
        return Dataset(std::move(X), std::move(y));
    };
    Dataset train = draw(spec.n_train);
    Dataset test = draw(spec.n_test);
    return {std::move(target), std::move(train), std::move(test)};
}

bool recovered(const Expression& found, const Expression& target, double coeff_tol) {
    if (found.dim != target.dim) return false;
    std::unordered_map<Term, double, TermHash> found_terms;
    for (std::size_t i = 0; i < found.terms.size(); ++i) {
        if (std::fabs(found.weights[i]) < coeff_tol) continue;  // negligible term
        found_terms.emplace(found.terms[i], found.weights[i]);
    }
    if (found_terms.size() != target.terms.size()) return false;
    for (std::size_t i = 0; i < target.terms.size(); ++i) {
        auto it = found_terms.find(target.terms[i]);
        if (it == found_terms.end()) return false;
        if (!(std::fabs(it->second - target.weights[i]) <= coeff_tol)) return false;
    }
    return std::fabs(found.intercept - target.intercept) < coeff_tol;
}

std::optional<Expression> expressible_witness(std::string_view id) {
    if (id == "F1") {
        return make_expression(1, {identity_term({1}), identity_term({2}), identity_term({3})},
                               {5.0, 1.0, 1.0}, 0.0);
    }
    if (id == "F2") {
        return make_expression(
            1, {identity_term({1}), identity_term({2}), identity_term({3}), identity_term({4})},
            {1.0, 1.0, 1.0, 1.0}, 0.0);
    }
    if (id == "F3") {
        return make_expression(1,
                               {identity_term({1}), identity_term({2}), identity_term({3}),
                                identity_term({4}), identity_term({5})},
                               {1.0, 1.0, 1.0, 1.0, 1.0}, 0.0);
    }
    if (id == "F4") {
        return make_expression(1,
                               {identity_term({1}), identity_term({2}), identity_term({3}),
                                identity_term({4}), identity_term({5}), identity_term({6})},
                               {1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, 0.0);
    }
    if (id == "F8") {
        return make_expression(1, {transformed_term({1}, Transform::SqrtAbs)}, {5.0}, 0.0);
    }
    if (id == "F9") {
        return make_expression(
            2, {transformed_term({1, 0}, Transform::Sin), transformed_term({0, 2}, Transform::Sin)},
            {1.0, 1.0}, 0.0);
    }
    if (id == "F14") {
        return make_expression(5, {identity_term({1, 1, 1, 1, 1})}, {1.0}, 0.0);
    }
    if (id == "F17") {
        return make_expression(
            1, {transformed_term({2}, Transform::Log), transformed_term({1}, Transform::SqrtAbs)},
            {1.0, 5.0}, 100.0);
    }
    return std::nullopt;
}

}  // namespace symtree
