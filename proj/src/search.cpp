#include "symtree/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "symtree/scorer.hpp"

namespace symtree {

namespace {

// Leaves whose score reaches this value cannot be improved by any later
// iteration (score is capped at 1), so the run stops early.
constexpr double kPerfectScore = 1.0 - 1e-12;

struct CachedColumn {
    Eigen::VectorXd values;
    bool finite = true;
};

// Per-run state: the training split, a cache of term columns over it and
// the node creation counter. Single-threaded by construction; concurrency
// lives at the grid level where every run owns its own context.
class SearchContext {
public:
    explicit SearchContext(const Dataset& train)
        : train_(train), ones_(Eigen::VectorXd::Ones(train.n())) {}

    const Dataset& train() const { return train_; }

    const CachedColumn& column(const Term& term) {
        auto it = cache_.find(term);
        if (it != cache_.end()) return it->second;
        CachedColumn col;
        col.values = eval_term_column(term, train_.X);
        col.finite = col.values.allFinite();
        return cache_.emplace(term, std::move(col)).first->second;
    }

    /// Orthogonal state of a node's model: intercept column first, then
    /// the term columns in stored order.
    OlsScorer make_scorer(std::span<const Term> terms) {
        OlsScorer scorer(train_.y);
        scorer.add_column(ones_);
        for (const Term& t : terms) scorer.add_column(column(t).values);
        return scorer;
    }

    /// Authoritative fit of a term set, reusing cached columns. Produces
    /// the same result as fit(terms, train), bit for bit: the design is
    /// assembled from the same eval_term_column values and the training
    /// MAE accumulates predictions in the same order as eval_expression.
    FitResult materialize(std::vector<Term> terms) {
        const auto n = train_.n();
        const auto m = static_cast<Eigen::Index>(terms.size());
        Eigen::MatrixXd design(n, m + 1);
        for (Eigen::Index j = 0; j < m; ++j)
            design.col(j) = column(terms[static_cast<std::size_t>(j)]).values;
        design.col(m).setOnes();

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
        cod.setThreshold(kRankThreshold);
        cod.compute(design);
        const Eigen::VectorXd coeffs = cod.solve(train_.y);

        FitResult result;
        result.expression.dim = static_cast<std::size_t>(train_.d());
        result.expression.terms = std::move(terms);
        result.expression.weights.assign(coeffs.data(), coeffs.data() + m);
        result.expression.intercept = coeffs[m];
        result.rank = static_cast<std::size_t>(cod.rank());

        Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, result.expression.intercept);
        for (Eigen::Index j = 0; j < m; ++j)
            pred += result.expression.weights[static_cast<std::size_t>(j)] * design.col(j);
        result.train_mae = (pred - train_.y).cwiseAbs().mean();
        result.score = score_from_mae(result.train_mae);
        return result;
    }

    std::uint64_t next_creation_index() { return ++creation_counter_; }

private:
    const Dataset& train_;
    Eigen::VectorXd ones_;
    std::unordered_map<Term, CachedColumn, TermHash> cache_;
    std::uint64_t creation_counter_ = 0;
};

struct ScoredCandidate {
    Term term;
    const Eigen::VectorXd* column = nullptr;
    double gs_mae = 0.0;
};

std::vector<Term> terms_of(const std::vector<ScoredCandidate>& candidates) {
    std::vector<Term> out;
    out.reserve(candidates.size());
    for (const ScoredCandidate& c : candidates) out.push_back(c.term);
    return out;
}

// Filter rules, in order: duplicate keys, non-finite columns over the
// training data, then candidates that do not strictly improve the
// parent's score. Survivor order is preserved; each survivor keeps its
// column pointer and candidate MAE for reuse.
std::vector<ScoredCandidate> filter_scored(SearchContext& ctx, const SearchNode& node,
                                           const OlsScorer& parent_state,
                                           std::vector<Term> candidates) {
    std::unordered_set<Term, TermHash> seen(node.terms().begin(), node.terms().end());
    const double parent_mae = parent_state.current_mae();
    std::vector<ScoredCandidate> out;
    for (Term& cand : candidates) {
        if (!seen.insert(cand).second) continue;
        const CachedColumn& col = ctx.column(cand);
        if (!col.finite) continue;
        const double cand_mae = parent_state.mae_with(col.values);
        if (!(cand_mae < parent_mae)) continue;
        out.push_back({std::move(cand), &col.values, cand_mae});
    }
    return out;
}

struct GreedyOutcome {
    std::vector<Term> child_terms;  // node terms followed by the accepted candidates
    std::vector<Term> accepted;
    std::vector<ScoredCandidate> unused;
};

// One sequential pass: a candidate is kept iff appending it strictly
// lowers the MAE of the model built so far. The scorer guarantees that
// scoring and committing a column agree bitwise, so a candidate that
// passed the filter is always accepted when it is scored against the
// unchanged parent state; every pass therefore consumes at least one
// candidate.
GreedyOutcome greedy_pass(const SearchNode& node, const OlsScorer& parent_state,
                          std::vector<ScoredCandidate> candidates) {
    OlsScorer state = parent_state;
    double current_mae = state.current_mae();
    GreedyOutcome out;
    out.child_terms = node.terms();
    for (ScoredCandidate& cand : candidates) {
        const double cand_mae = state.mae_with(*cand.column);
        if (cand_mae < current_mae) {
            state.add_column(*cand.column);
            current_mae = state.current_mae();
            out.child_terms.push_back(cand.term);
            out.accepted.push_back(std::move(cand.term));
        } else {
            out.unused.push_back(std::move(cand));
        }
    }
    return out;
}

SearchNode simplify_impl(SearchContext& ctx, SearchNode node, double tau) {
    const Expression& expr = node.fit.expression;
    std::vector<Term> kept;
    kept.reserve(expr.terms.size());
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
        if (std::fabs(expr.weights[i]) >= tau) kept.push_back(expr.terms[i]);
    }
    if (kept.size() == expr.terms.size()) return node;
    node.fit = ctx.materialize(std::move(kept));
    return node;
}

// Truncate to the cap keeping the best-scoring candidates (lowest
// candidate MAE, earlier index on ties); relative order among the kept
// candidates is preserved.
void apply_candidate_cap(std::vector<ScoredCandidate>& candidates, std::size_t cap) {
    if (candidates.size() <= cap) return;
    std::vector<std::size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].gs_mae < candidates[b].gs_mae;
    });
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::vector<ScoredCandidate> kept;
    kept.reserve(cap);
    for (std::size_t i : idx) kept.push_back(std::move(candidates[i]));
    candidates = std::move(kept);
}

std::vector<SearchNode> expand_impl(SearchContext& ctx, const SearchNode& node,
                                    const SearchConfig& cfg, std::size_t iteration,
                                    SearchObserver* observer, std::uint64_t run_id) {
    std::vector<Term> raw = interaction(node.terms());
    if (iteration > cfg.min_i) {
        std::vector<Term> inv = inverse_interaction(node.terms());
        raw.insert(raw.end(), std::make_move_iterator(inv.begin()),
                   std::make_move_iterator(inv.end()));
    }
    if (iteration > cfg.min_t) {
        std::vector<Term> trans = transformation(node.terms(), cfg.transforms);
        raw.insert(raw.end(), std::make_move_iterator(trans.begin()),
                   std::make_move_iterator(trans.end()));
    }
    // Exponents beyond the supported range cannot form a valid expression.
    std::erase_if(raw, [](const Term& t) { return !t.in_exponent_range(); });

    OlsScorer parent_state = ctx.make_scorer(node.terms());
    std::vector<ScoredCandidate> remaining =
        filter_scored(ctx, node, parent_state, std::move(raw));
    if (cfg.max_terms_per_node) apply_candidate_cap(remaining, *cfg.max_terms_per_node);

    std::vector<Term> filtered_terms;
    if (observer) filtered_terms = terms_of(remaining);

    std::vector<SearchNode> children;
    std::vector<std::vector<Term>> accepted_per_child;
    while (!remaining.empty()) {
        GreedyOutcome pass = greedy_pass(node, parent_state, std::move(remaining));
        if (pass.accepted.empty()) break;  // unreachable; guards termination
        SearchNode child;
        child.fit = ctx.materialize(std::move(pass.child_terms));
        child.depth = iteration;
        child.creation_index = ctx.next_creation_index();
        child = simplify_impl(ctx, std::move(child), cfg.tau);
        children.push_back(std::move(child));
        accepted_per_child.push_back(std::move(pass.accepted));
        remaining = std::move(pass.unused);
    }

    if (observer) {
        SearchObserver::ExpandEvent event;
        event.run_id = run_id;
        event.iteration = iteration;
        event.parent = &node;
        event.filtered = filtered_terms;
        event.accepted_per_child = accepted_per_child;
        event.children = children;
        observer->on_expand(event);
    }

    if (children.empty()) return {node};
    return children;
}

bool better_leaf(const SearchNode& a, const SearchNode& b) {
    if (a.score() != b.score()) return a.score() > b.score();
    if (a.terms().size() != b.terms().size()) return a.terms().size() < b.terms().size();
    return a.creation_index < b.creation_index;
}

double best_leaf_score(const std::vector<SearchNode>& leaves) {
    double best = 0.0;
    for (const SearchNode& leaf : leaves) best = std::max(best, leaf.score());
    return best;
}

struct TermListHash {
    std::size_t operator()(const std::vector<Term>& terms) const {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        TermHash term_hash;
        for (const Term& t : terms) h = h * 0x100000001b3ULL ^ term_hash(t);
        return static_cast<std::size_t>(h);
    }
};

// Search paths regularly converge on the same expression; duplicate
// leaves would expand into identical subtrees forever after. Keeping only
// the first of each identical term list leaves the final argmax result
// unchanged (duplicates tie on score and term count) while cutting the
// frontier, often by an exponential factor.
void dedup_leaves(std::vector<SearchNode>& leaves) {
    std::unordered_set<std::vector<Term>, TermListHash> seen;
    std::vector<SearchNode> kept;
    kept.reserve(leaves.size());
    for (SearchNode& leaf : leaves) {
        if (seen.insert(leaf.terms()).second) kept.push_back(std::move(leaf));
    }
    leaves = std::move(kept);
}

// Keep the cap best-scoring leaves (prune the lowest-scoring ones, later
// creation losing ties); surviving leaves keep their relative order.
void apply_leaf_cap(std::vector<SearchNode>& leaves, std::size_t cap) {
    if (leaves.size() <= cap) return;
    std::vector<std::size_t> idx(leaves.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return better_leaf(leaves[a], leaves[b]);
    });
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::vector<SearchNode> kept;
    kept.reserve(cap);
    for (std::size_t i : idx) kept.push_back(std::move(leaves[i]));
    leaves = std::move(kept);
}

}  // namespace

std::vector<Transform> default_transforms() {
    return {Transform::Sin,     Transform::Cos, Transform::Tan,
            Transform::SqrtAbs, Transform::Log, Transform::Log1p};
}

void SearchConfig::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("SearchConfig: tau must be > 0");
    for (Transform t : transforms) {
        if (t == Transform::Identity)
            throw std::invalid_argument("SearchConfig: Identity cannot be a transformation");
    }
    if (max_terms_per_node && *max_terms_per_node == 0)
        throw std::invalid_argument("SearchConfig: max_terms_per_node must be >= 1");
    if (max_leaves && *max_leaves == 0)
        throw std::invalid_argument("SearchConfig: max_leaves must be >= 1");
}

std::vector<Term> interaction(std::span<const Term> terms) {
    const std::size_t n = terms.size();
    std::vector<Term> out;
    out.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Term t;
            t.transform = Transform::Identity;
            t.exponents.resize(terms[i].exponents.size());
            for (std::size_t k = 0; k < t.exponents.size(); ++k)
                t.exponents[k] = terms[i].exponents[k] + terms[j].exponents[k];
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<Term> inverse_interaction(std::span<const Term> terms) {
    const std::size_t n = terms.size();
    std::vector<Term> out;
    out.reserve(n > 0 ? n * (n - 1) : 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            Term t;
            t.transform = Transform::Identity;
            t.exponents.resize(terms[i].exponents.size());
            for (std::size_t k = 0; k < t.exponents.size(); ++k)
                t.exponents[k] = terms[i].exponents[k] - terms[j].exponents[k];
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<Term> transformation(std::span<const Term> terms,
                                 std::span<const Transform> transforms) {
    std::vector<Term> out;
    out.reserve(terms.size() * transforms.size());
    for (const Term& source : terms) {
        for (Transform f : transforms) {
            if (f == source.transform) continue;  // would reproduce the source
            Term t;
            t.exponents = source.exponents;
            t.transform = f;
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<Term> filter_candidates(const SearchNode& node, std::vector<Term> candidates,
                                    const Dataset& train) {
    SearchContext ctx(train);
    OlsScorer parent_state = ctx.make_scorer(node.terms());
    return terms_of(filter_scored(ctx, node, parent_state, std::move(candidates)));
}

std::pair<SearchNode, std::vector<Term>> greedy_search(const SearchNode& node,
                                                       std::vector<Term> candidates,
                                                       const Dataset& train) {
    SearchContext ctx(train);
    OlsScorer parent_state = ctx.make_scorer(node.terms());
    std::vector<ScoredCandidate> scored;
    scored.reserve(candidates.size());
    for (Term& cand : candidates) {
        const CachedColumn& col = ctx.column(cand);
        scored.push_back({std::move(cand), &col.values, 0.0});
    }
    GreedyOutcome pass = greedy_pass(node, parent_state, std::move(scored));
    if (pass.accepted.empty()) return {node, terms_of(pass.unused)};
    SearchNode child;
    child.fit = ctx.materialize(std::move(pass.child_terms));
    child.depth = node.depth;
    child.creation_index = node.creation_index;
    return {std::move(child), terms_of(pass.unused)};
}

SearchNode simplify(const SearchNode& node, double tau, const Dataset& train) {
    SearchContext ctx(train);
    return simplify_impl(ctx, node, tau);
}

std::vector<SearchNode> expand(const SearchNode& node, const SearchConfig& cfg,
                               const Dataset& train, std::size_t iteration) {
    SearchContext ctx(train);
    return expand_impl(ctx, node, cfg, iteration, nullptr, 0);
}

SearchNode run(const Dataset& train, const SearchConfig& cfg, SearchObserver* observer,
               std::uint64_t run_id) {
    cfg.validate();
    SearchContext ctx(train);

    SearchNode root;
    root.fit = ctx.materialize(make_linear_terms(static_cast<std::size_t>(train.d())));
    root.depth = 0;
    root.creation_index = 0;
    std::vector<SearchNode> leaves;
    leaves.push_back(std::move(root));

    const std::size_t total = cfg.total_iterations();
    for (std::size_t iteration = 1; iteration <= total; ++iteration) {
        if (best_leaf_score(leaves) >= kPerfectScore) break;
        const std::pair<bool, bool> gates{iteration > cfg.min_i, iteration > cfg.min_t};

        std::vector<SearchNode> next;
        next.reserve(leaves.size());
        for (SearchNode& leaf : leaves) {
            if (leaf.saturated_gates == gates) {
                next.push_back(std::move(leaf));  // would expand to itself again
                continue;
            }
            const std::uint64_t leaf_index = leaf.creation_index;
            std::vector<SearchNode> children =
                expand_impl(ctx, leaf, cfg, iteration, observer, run_id);
            if (children.size() == 1 && children[0].creation_index == leaf_index)
                children[0].saturated_gates = gates;
            for (SearchNode& child : children) next.push_back(std::move(child));
        }
        leaves = std::move(next);
        dedup_leaves(leaves);
        if (cfg.max_leaves) apply_leaf_cap(leaves, *cfg.max_leaves);
        if (observer) observer->on_iteration(run_id, iteration, best_leaf_score(leaves));
    }

    const SearchNode* best = &leaves.front();
    for (const SearchNode& leaf : leaves) {
        if (better_leaf(leaf, *best)) best = &leaf;
    }
    return *best;
}

std::pair<SearchConfig, SearchNode> grid_search(const Dataset& train,
                                                std::span<const SearchConfig> grid,
                                                unsigned threads, SearchObserver* observer) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");

    std::vector<std::optional<SearchNode>> results(grid.size());
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, grid.size()));

    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= grid.size()) return;
            try {
                results[i] = run(train, grid[i], observer, static_cast<std::uint64_t>(i));
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i]->score() > results[best]->score()) best = i;
    }
    return {grid[best], std::move(*results[best])};
}

std::vector<SearchConfig> desk_grid() {
    std::vector<SearchConfig> grid;
    for (double tau : {1e-6, 1e-3}) {
        for (std::size_t min_i : {1u, 3u, 5u}) {
            for (std::size_t min_t : {5u, 7u}) {
                for (std::size_t extra : {0u, 2u}) {
                    SearchConfig cfg;
                    cfg.tau = tau;
                    cfg.min_i = min_i;
                    cfg.min_t = min_t;
                    cfg.extra_iters = extra;
                    grid.push_back(std::move(cfg));
                }
            }
        }
    }
    return grid;
}

std::vector<SearchConfig> full_grid() {
    std::vector<SearchConfig> grid;
    for (double tau : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
        for (std::size_t min_i = 1; min_i < 10; ++min_i) {
            for (std::size_t min_t = 5; min_t < 10; ++min_t) {
                for (std::size_t extra = 0; extra <= 5; ++extra) {
                    SearchConfig cfg;
                    cfg.tau = tau;
                    cfg.min_i = min_i;
                    cfg.min_t = min_t;
                    cfg.extra_iters = extra;
                    grid.push_back(std::move(cfg));
                }
            }
        }
    }
    return grid;
}

}  // namespace symtree
