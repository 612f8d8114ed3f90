// Benchmark targets, seeded dataset generation, the random-polynomial
// family and the exact-recovery check.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symtree/expression.hpp"

namespace symtree {

struct BenchmarkSpec {
    std::string id;                     // F1 .. F17
    std::size_t dim = 1;
    double sample_lo = -5.0;            // per-variable uniform sampling range
    double sample_hi = 5.0;
    std::size_t n_samples = 600;        // split in half: train then test
    bool expressible = false;
    double (*target)(const double*) = nullptr;

    double eval(const std::vector<double>& x) const { return target(x.data()); }
};

/// All benchmark ids, in order.
std::vector<std::string> benchmark_ids();

/// Lookup by id ("F1" .. "F17"). Throws std::invalid_argument otherwise.
const BenchmarkSpec& benchmark(std::string_view id);

/// Draw n_samples points i.i.d. uniform over the spec's range (row by
/// row, coordinate by coordinate, xoshiro256** seeded via derive_seed of
/// the user seed and the benchmark index), evaluate the target exactly
/// and split: first half train, second half test. Deterministic per seed.
std::pair<Dataset, Dataset> sample(const BenchmarkSpec& spec, std::uint64_t seed);

struct PolySpec {
    std::size_t dim = 1;           // {1, 2, 3}
    std::size_t order = 1;         // {1, 2, 3, 4}: maximum total degree
    std::size_t n_base_terms = 1;  // {1, 2, 3, 4}
    std::uint64_t seed = 0;
    std::size_t n_train = 2500;
    std::size_t n_test = 1500;
    double range_lo = 0.0;
    double range_hi = 1.0;

    void validate() const;
};

/// Number of distinct monomials with total degree in [1, order]; a
/// PolySpec is satisfiable only when n_base_terms does not exceed it.
std::size_t poly_term_pool_size(std::size_t dim, std::size_t order);

struct PolyInstance {
    Expression target;  // Identity terms only, intercept 0
    Dataset train;
    Dataset test;
};

/// A random polynomial with exactly n_base_terms distinct non-negative
/// integer monomials, total degree capped at order and attained by at
/// least one term; coefficients uniform over [-5,-0.5] u [0.5,5].
/// Exponent vectors are drawn without replacement from the graded
/// lexicographic enumeration of the pool (degree-order term first).
/// Datasets are uniform over [0,1]^dim, training rows drawn before test
/// rows. Deterministic per spec.
PolyInstance random_polynomial(const PolySpec& spec);

/// True iff, after dropping found terms with |weight| < coeff_tol, the
/// term-key sets match exactly, every matched weight is within coeff_tol
/// of the target's, and the intercepts differ by less than coeff_tol.
/// Order-insensitive.
bool recovered(const Expression& found, const Expression& target, double coeff_tol = 1e-4);

/// Hand-written IT form of an expressible benchmark target, when one
/// exists under the fixed transformation set (F7 has none).
std::optional<Expression> expressible_witness(std::string_view id);

}  // namespace symtree
