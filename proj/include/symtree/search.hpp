// SymTree: breadth-first greedy search over IT expressions.
//
// The root node is the linear model over the raw variables. Each
// iteration expands every leaf: candidate terms are generated by the
// interaction, inverse-interaction and transformation operators, filtered
// against the parent's score, and distributed across child nodes by a
// sequential greedy pass. Children are simplified by dropping terms whose
// fitted coefficient falls below tau. The best-scoring leaf wins.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "symtree/fit.hpp"

namespace symtree {

std::vector<Transform> default_transforms();  // sin, cos, tan, sqrtabs, log, log1p

struct SearchConfig {
    double tau = 1e-6;
    std::size_t min_i = 1;          // inverse operator applies when iteration > min_i
    std::size_t min_t = 5;          // transformation operator applies when iteration > min_t
    std::size_t extra_iters = 0;    // additional budget on top of min_i + min_t
    std::vector<Transform> transforms = default_transforms();
    std::optional<std::size_t> max_terms_per_node;  // cap on filtered candidates per expansion
    std::optional<std::size_t> max_leaves;          // cap on live leaves per iteration

    std::size_t total_iterations() const { return min_i + min_t + extra_iters; }

    /// tau > 0, Identity not in transforms, caps >= 1 when present.
    void validate() const;
};

struct SearchNode {
    FitResult fit;
    std::size_t depth = 0;            // iteration at which the node was created
    std::uint64_t creation_index = 0; // global creation order, root = 0

    // Memo: operator gates (inverse, transformation) under which an
    // expansion of this node produced no children. Re-expanding under the
    // same gates is a no-op and is skipped.
    std::optional<std::pair<bool, bool>> saturated_gates;

    double score() const { return fit.score; }
    const std::vector<Term>& terms() const { return fit.expression.terms; }
};

/// Every unordered pair (i, j) with i <= j, emitted as (P_i + P_j, id) in
/// lexicographic (i, j) order: exactly n(n+1)/2 candidates.
std::vector<Term> interaction(std::span<const Term> terms);

/// Every ordered pair (i, j) with i != j, emitted as (P_i - P_j, id) in
/// lexicographic (i, j) order: exactly n(n-1) candidates.
std::vector<Term> inverse_interaction(std::span<const Term> terms);

/// Every (P_i, f) for f in transforms, term-major and transform-minor,
/// skipping outputs equal to their source term: at most m*n candidates.
std::vector<Term> transformation(std::span<const Term> terms,
                                 std::span<const Transform> transforms);

/// Removes, in order: candidates duplicating a node term or an earlier
/// candidate; candidates whose column over the training data contains a
/// non-finite value; candidates that do not strictly improve the node's
/// score. Survivor order is preserved.
std::vector<Term> filter_candidates(const SearchNode& node, std::vector<Term> candidates,
                                    const Dataset& train);

/// One greedy pass: candidates are appended in order and kept only when
/// the refit score strictly improves; the rest form the unused list.
std::pair<SearchNode, std::vector<Term>> greedy_search(const SearchNode& node,
                                                       std::vector<Term> candidates,
                                                       const Dataset& train);

/// Drops every term with |weight| < tau and refits. A node with no such
/// weight is returned unchanged; the intercept is never removed.
SearchNode simplify(const SearchNode& node, double tau, const Dataset& train);

/// Hooks for instrumentation of a search run. Callbacks may fire from
/// several threads when runs execute concurrently (grid search);
/// implementations must synchronize.
class SearchObserver {
public:
    virtual ~SearchObserver() = default;

    struct ExpandEvent {
        std::uint64_t run_id = 0;
        std::size_t iteration = 0;
        const SearchNode* parent = nullptr;
        /// Candidates surviving the filter (and the candidate cap).
        std::span<const Term> filtered;
        /// Per child: the candidates accepted by its greedy pass,
        /// recorded before simplification.
        std::span<const std::vector<Term>> accepted_per_child;
        /// Children after simplification; empty when the node expanded to
        /// itself.
        std::span<const SearchNode> children;
    };

    virtual void on_expand(const ExpandEvent& /*event*/) {}
    virtual void on_iteration(std::uint64_t /*run_id*/, std::size_t /*iteration*/,
                              double /*best_leaf_score*/) {}
};

/// Full expansion of one node: operator application (gated by the
/// iteration), filtering, repeated greedy passes and per-child
/// simplification. Returns {node} when no candidate survives.
std::vector<SearchNode> expand(const SearchNode& node, const SearchConfig& cfg,
                               const Dataset& train, std::size_t iteration);

/// The SymTree driver: fits the linear root, expands every leaf for
/// total_iterations() iterations and returns the best leaf (highest
/// score, then fewest terms, then earliest creation). Stops early once a
/// leaf's score is within 1e-12 of the maximum attainable value 1.
SearchNode run(const Dataset& train, const SearchConfig& cfg,
               SearchObserver* observer = nullptr, std::uint64_t run_id = 0);

/// Runs every config and returns the one whose result maximizes the
/// training score (ties resolve to the earliest grid entry). Configs run
/// on a worker pool; results are merged in grid order, so the outcome is
/// identical to a sequential sweep. threads == 0 picks the hardware
/// concurrency.
std::pair<SearchConfig, SearchNode> grid_search(const Dataset& train,
                                                std::span<const SearchConfig> grid,
                                                unsigned threads = 0,
                                                SearchObserver* observer = nullptr);

/// Small default grid for desk-scale runs: tau in {1e-6, 1e-3},
/// min_i in {1, 3, 5}, min_t in {5, 7}, extra in {0, 2}.
std::vector<SearchConfig> desk_grid();

/// The full 1350-config sweep: tau in {1e-6 .. 1e-2}, min_i in [1, 10),
/// min_t in [5, 10), extra in [0, 5].
std::vector<SearchConfig> full_grid();

}  // namespace symtree
