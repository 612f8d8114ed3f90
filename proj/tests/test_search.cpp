#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "symtree/benchmarks.hpp"
#include "symtree/rng.hpp"
#include "symtree/search.hpp"
#include "oracles.hpp"
#include "validators.hpp"

using namespace symtree;

namespace {

Term term_of(std::vector<int> exponents, Transform f = Transform::Identity) {
    Term t;
    t.exponents = std::move(exponents);
    t.transform = f;
    return t;
}

Dataset dataset_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    Eigen::MatrixXd x(xs.size(), 1);
    Eigen::VectorXd y(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x(static_cast<Eigen::Index>(i), 0) = xs[i];
        y(static_cast<Eigen::Index>(i)) = ys[i];
    }
    return Dataset(std::move(x), std::move(y));
}

Dataset sampled_1d(std::uint64_t seed, std::size_t n, double lo, double hi,
                   double (*f)(double)) {
    Xoshiro256 rng(seed);
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = rng.uniform(lo, hi);
        x(static_cast<Eigen::Index>(i), 0) = v;
        y(static_cast<Eigen::Index>(i)) = f(v);
    }
    return Dataset(std::move(x), std::move(y));
}

SearchNode fitted_node(std::vector<Term> terms, const Dataset& train) {
    SearchNode node;
    node.fit = fit(std::move(terms), train);
    return node;
}

std::set<std::vector<int>> exponent_set(std::span<const Term> terms) {
    std::set<std::vector<int>> out;
    for (const Term& t : terms) out.insert(t.exponents);
    return out;
}

}  // namespace

TEST_CASE("interaction enumerates unordered pairs including self-pairs") {
    const auto candidates = interaction(make_linear_terms(3));
    REQUIRE(candidates.size() == 6);
    CHECK(candidates[0] == term_of({2, 0, 0}));
    CHECK(candidates[1] == term_of({1, 1, 0}));
    CHECK(candidates[2] == term_of({1, 0, 1}));
    CHECK(candidates[3] == term_of({0, 2, 0}));  // t2 + t2: vector addition
    CHECK(candidates[4] == term_of({0, 1, 1}));
    CHECK(candidates[5] == term_of({0, 0, 2}));

    const std::vector<Term> single = {term_of({1})};
    const auto self_only = interaction(single);
    REQUIRE(self_only.size() == 1);
    CHECK(self_only[0] == term_of({2}));

    const auto pairs2 = interaction(make_linear_terms(2));
    REQUIRE(pairs2.size() == 3);
    CHECK(pairs2[0] == term_of({2, 0}));
    CHECK(pairs2[1] == term_of({1, 1}));
    CHECK(pairs2[2] == term_of({0, 2}));
}

TEST_CASE("inverse interaction enumerates ordered pairs without self-pairs") {
    const auto candidates = inverse_interaction(make_linear_terms(3));
    REQUIRE(candidates.size() == 6);
    CHECK(candidates[0] == term_of({1, -1, 0}));
    CHECK(candidates[1] == term_of({1, 0, -1}));
    CHECK(candidates[2] == term_of({-1, 1, 0}));
    CHECK(candidates[3] == term_of({0, 1, -1}));
    CHECK(candidates[4] == term_of({-1, 0, 1}));
    CHECK(candidates[5] == term_of({0, -1, 1}));

    const std::vector<Term> single = {term_of({1})};
    CHECK(inverse_interaction(single).empty());

    const std::vector<Term> two = {term_of({2, 0}), term_of({1, 0})};
    const auto diffs = inverse_interaction(two);
    REQUIRE(diffs.size() == 2);
    CHECK(diffs[0] == term_of({1, 0}));
    CHECK(diffs[1] == term_of({-1, 0}));
}

TEST_CASE("transformation replaces the transform, skipping no-ops") {
    const std::vector<Transform> sin_log = {Transform::Sin, Transform::Log};
    const auto candidates = transformation(make_linear_terms(3), sin_log);
    REQUIRE(candidates.size() == 6);
    CHECK(candidates[0] == term_of({1, 0, 0}, Transform::Sin));
    CHECK(candidates[1] == term_of({1, 0, 0}, Transform::Log));
    CHECK(candidates[2] == term_of({0, 1, 0}, Transform::Sin));
    CHECK(candidates[3] == term_of({0, 1, 0}, Transform::Log));
    CHECK(candidates[4] == term_of({0, 0, 1}, Transform::Sin));
    CHECK(candidates[5] == term_of({0, 0, 1}, Transform::Log));

    const std::vector<Term> already_sin = {term_of({1}, Transform::Sin)};
    const std::vector<Transform> sin_only = {Transform::Sin};
    CHECK(transformation(already_sin, sin_only).empty());

    const std::vector<Term> plain = {term_of({2, 1})};
    const std::vector<Transform> cos_only = {Transform::Cos};
    const auto replaced = transformation(plain, cos_only);
    REQUIRE(replaced.size() == 1);
    CHECK(replaced[0] == term_of({2, 1}, Transform::Cos));
}

TEST_CASE("operator output counts follow the candidate formulas") {
    Xoshiro256 rng(21);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{9}}) {
        std::vector<Term> terms;
        for (std::size_t i = 0; i < n; ++i) {
            terms.push_back(term_of({static_cast<int>(i + 1), static_cast<int>(rng.uniform_index(3))}));
        }
        CHECK(interaction(terms).size() == n * (n + 1) / 2);
        CHECK(inverse_interaction(terms).size() == n * (n - 1));
        const auto transforms = default_transforms();
        CHECK(transformation(terms, transforms).size() <= transforms.size() * n);
    }
}

TEST_CASE("filter_candidates drops duplicates, domain violations and non-improvers") {
    // y = x0^2 over an asymmetric grid; x1 spans negative values so log(x1)
    // is undefined on some rows.
    Xoshiro256 rng(31);
    Eigen::MatrixXd x(40, 2);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        x(i, 0) = rng.uniform(-5.0, 5.0);
        x(i, 1) = rng.uniform(-5.0, 5.0);
        y(i) = x(i, 0) * x(i, 0);
    }
    const Dataset train(x, y);
    const SearchNode node = fitted_node(make_linear_terms(2), train);

    std::vector<Term> candidates = {
        term_of({1, 0}),                  // duplicate of a node term -> rule (a)
        term_of({0, 1}, Transform::Log),  // log of a negative value -> rule (b)
        term_of({2, 0}),                  // genuinely improves -> retained
        term_of({2, 0}),                  // duplicate of an earlier candidate -> rule (a)
    };
    const auto kept = filter_candidates(node, std::move(candidates), train);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0] == term_of({2, 0}));
}

TEST_CASE("filter_candidates rejects columns dependent on the node") {
    // Only two distinct x values: every term column lies in span{1, x},
    // so nothing can improve the linear fit.
    const Dataset train = dataset_1d({0, 0, 1, 1}, {0, 1, 2, 5});
    const SearchNode node = fitted_node(make_linear_terms(1), train);
    CHECK(node.fit.train_mae > 0.1);  // the line cannot fit this data

    std::vector<Term> candidates = {term_of({2}), term_of({3}), term_of({1}, Transform::SqrtAbs)};
    CHECK(filter_candidates(node, std::move(candidates), train).empty());
}

TEST_CASE("greedy_search on an empty candidate list is a no-op") {
    const Dataset train = dataset_1d({1, 2, 3}, {1, 2, 3});
    const SearchNode node = fitted_node(make_linear_terms(1), train);
    const auto [child, unused] = greedy_search(node, {}, train);
    CHECK(unused.empty());
    CHECK(child.terms() == node.terms());
    CHECK(child.score() == node.score());
}

TEST_CASE("greedy_search accepts a strictly improving candidate") {
    const Dataset train = sampled_1d(8, 60, -5.0, 5.0, [](double v) { return v * v; });
    const SearchNode node = fitted_node(make_linear_terms(1), train);
    const auto [child, unused] = greedy_search(node, {term_of({2})}, train);
    CHECK(unused.empty());
    REQUIRE(child.terms().size() == 2);
    CHECK(child.terms()[1] == term_of({2}));
    CHECK(child.fit.train_mae < 1e-8);
    CHECK(child.score() > node.score());
}

TEST_CASE("greedy_search banks redundant candidates into the unused list") {
    // y = x^2 + x^3; the second x^2 candidate duplicates the first
    // exactly, so it cannot strictly improve once the first is accepted.
    const Dataset train = sampled_1d(9, 60, -5.0, 5.0, [](double v) { return v * v + v * v * v; });
    const SearchNode node = fitted_node(make_linear_terms(1), train);

    std::vector<Term> candidates = {term_of({2}), term_of({2}), term_of({3})};
    const auto [child, unused] = greedy_search(node, std::move(candidates), train);
    REQUIRE(unused.size() == 1);
    CHECK(unused[0] == term_of({2}));
    CHECK(child.fit.train_mae < 1e-8);
    CHECK(exponent_set(child.terms()) == std::set<std::vector<int>>{{1}, {2}, {3}});

    for (const Term& t : unused) {
        // the unused list never overlaps the child's terms as a list
        // position; here the child does hold an equal-keyed term, which is
        // exactly why this duplicate was banked
        CHECK(std::count(child.terms().begin(), child.terms().end(), t) == 1);
    }
}

TEST_CASE("simplify is a no-op when every weight clears tau") {
    const Dataset train = sampled_1d(10, 50, -5.0, 5.0, [](double v) { return 3.0 * v + 1.0; });
    const SearchNode node = fitted_node(make_linear_terms(1), train);
    const SearchNode same = simplify(node, 1e-6, train);
    CHECK(same.terms() == node.terms());
    CHECK(same.fit.train_mae == node.fit.train_mae);
    CHECK(same.fit.expression.weights == node.fit.expression.weights);
}

TEST_CASE("simplify drops negligible weights and refits") {
    // y = 5x exactly: the x^2 term fits with weight ~1e-16
    const Dataset train = sampled_1d(11, 50, -5.0, 5.0, [](double v) { return 5.0 * v; });
    SearchNode node = fitted_node({term_of({1}), term_of({2})}, train);
    REQUIRE(std::fabs(node.fit.expression.weights[1]) < 1e-6);

    const SearchNode simplified = simplify(node, 1e-6, train);
    REQUIRE(simplified.terms().size() == 1);
    CHECK(simplified.terms()[0] == term_of({1}));
    CHECK(simplified.fit.expression.weights[0] == doctest::Approx(5.0).epsilon(1e-10));

    // idempotent once no weight is below tau
    const SearchNode again = simplify(simplified, 1e-6, train);
    CHECK(again.terms() == simplified.terms());
    CHECK(again.fit.train_mae == simplified.fit.train_mae);
}

TEST_CASE("dropping a negligible term moves the MAE by a bounded amount") {
    Xoshiro256 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = oracles::random_instance(rng, 40, 2);
        const Dataset train(inst.X, inst.y);
        SearchNode node = fitted_node(make_linear_terms(2), train);

        const double tau = 1e-6;
        // force a negligible weight by appending a term and shrinking its
        // fitted coefficient below tau artificially via a tiny target
        // perturbation: instead, check the bound on the actual drop
        SearchNode wide = fitted_node({term_of({1, 0}), term_of({0, 1}), term_of({2, 0})}, train);
        if (std::fabs(wide.fit.expression.weights[2]) >= tau) continue;
        const double max_column = eval_term_column(term_of({2, 0}), train.X).cwiseAbs().maxCoeff();
        const SearchNode thin = simplify(wide, tau, train);
        CHECK(std::fabs(thin.fit.train_mae - wide.fit.train_mae) < 10.0 * tau * max_column);
        (void)node;
    }
}

TEST_CASE("expand returns the node itself when every candidate is filtered") {
    const Dataset train = dataset_1d({0, 0, 1, 1}, {0, 1, 2, 5});
    SearchNode node = fitted_node(make_linear_terms(1), train);
    node.creation_index = 0;

    SearchConfig cfg;
    cfg.min_i = 0;
    cfg.min_t = 0;
    cfg.extra_iters = 1;
    const auto children = expand(node, cfg, train, 1);
    REQUIRE(children.size() == 1);
    CHECK(children[0].terms() == node.terms());
    CHECK(children[0].score() == node.score());
    CHECK(children[0].creation_index == node.creation_index);
}

TEST_CASE("expand yields a single child when all candidates are accepted") {
    const Dataset train = sampled_1d(12, 80, -5.0, 5.0, [](double v) { return v * v; });
    const SearchNode node = fitted_node(make_linear_terms(1), train);

    SearchConfig cfg;
    cfg.tau = 1e-300;  // keep every accepted term visible
    cfg.min_i = 1;
    cfg.min_t = 5;
    const auto children = expand(node, cfg, train, 1);  // interaction only: {x^2}
    REQUIRE(children.size() == 1);
    CHECK(exponent_set(children[0].terms()) == std::set<std::vector<int>>{{1}, {2}});
    CHECK(children[0].fit.train_mae < 1e-8);
    CHECK(children[0].depth == 1);
}

TEST_CASE("expand partitions filtered candidates across children") {
    // y = exp(x/5): not IT-expressible, so no exact-fit plateaus; several
    // candidates improve the linear fit alone but become redundant after
    // the first greedy acceptances and must seed later children.
    const Dataset train = sampled_1d(1, 120, -5.0, 5.0, [](double v) {
        return std::exp(v / 5.0);
    });
    const SearchNode node = fitted_node(make_linear_terms(1), train);

    SearchConfig cfg;
    cfg.tau = 1e-300;  // keep the pre-simplification term sets observable
    cfg.min_i = 1;
    cfg.min_t = 0;  // transformations active at iteration 1
    const std::size_t iteration = 1;

    // reproduce the filtered candidate list through the public surface
    std::vector<Term> raw = interaction(node.terms());
    auto trans = transformation(node.terms(), cfg.transforms);
    raw.insert(raw.end(), trans.begin(), trans.end());
    const std::vector<Term> filtered = filter_candidates(node, raw, train);
    REQUIRE(filtered.size() >= 2);

    const auto children = expand(node, cfg, train, iteration);
    REQUIRE(children.size() >= 2);

    // every filtered candidate appears in exactly one child
    std::vector<Term> accepted;
    for (const SearchNode& child : children) {
        for (const Term& t : child.terms()) {
            if (std::find(node.terms().begin(), node.terms().end(), t) == node.terms().end())
                accepted.push_back(t);
        }
        CHECK(child.score() > node.score());
    }
    CHECK(accepted.size() == filtered.size());
    for (const Term& t : filtered)
        CHECK(std::count(accepted.begin(), accepted.end(), t) == 1);

    // the first greedy pass absorbs the strongest candidates
    CHECK(children[0].fit.train_mae < node.fit.train_mae / 2.0);
}

TEST_CASE("run returns the root when the target is already linear") {
    Xoshiro256 rng(14);
    Eigen::MatrixXd x(60, 2);
    Eigen::VectorXd y(60);
    for (Eigen::Index i = 0; i < 60; ++i) {
        x(i, 0) = rng.uniform(-5.0, 5.0);
        x(i, 1) = rng.uniform(-5.0, 5.0);
        y(i) = 2.0 * x(i, 0) - x(i, 1) + 1.0;
    }
    const Dataset train(x, y);

    SearchConfig cfg;
    cfg.min_i = 2;
    cfg.min_t = 5;
    const SearchNode best = run(train, cfg);
    CHECK(best.terms().size() == 2);
    CHECK(best.fit.train_mae < 1e-10);
    CHECK(best.fit.expression.intercept == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(best.depth == 0);
}

TEST_CASE("run with a zero iteration budget returns the root") {
    const Dataset train = sampled_1d(15, 40, -5.0, 5.0, [](double v) { return v * v; });
    SearchConfig cfg;
    cfg.min_i = 0;
    cfg.min_t = 0;
    cfg.extra_iters = 0;
    const SearchNode best = run(train, cfg);
    CHECK(best.terms() == make_linear_terms(1));
    CHECK(best.depth == 0);
}

TEST_CASE("run recovers a noiseless cubic") {
    const Dataset train = sampled_1d(16, 300, -5.0, 5.0, [](double v) {
        return v * v * v + v * v + 5.0 * v;
    });
    SearchConfig cfg;
    cfg.tau = 1e-6;
    cfg.min_i = 1;
    cfg.min_t = 5;
    const SearchNode best = run(train, cfg);
    CHECK(best.fit.train_mae < 1e-9);
    CHECK(exponent_set(best.terms()) == std::set<std::vector<int>>{{1}, {2}, {3}});
    for (const Term& t : best.terms()) CHECK(t.transform == Transform::Identity);
}

TEST_CASE("run is deterministic") {
    const Dataset train = sampled_1d(17, 200, -5.0, 5.0, [](double v) {
        return std::sin(v) + 0.3 * v * v;
    });
    SearchConfig cfg;
    cfg.tau = 1e-3;
    cfg.min_i = 1;
    cfg.min_t = 2;
    cfg.extra_iters = 1;

    const SearchNode a = run(train, cfg);
    const SearchNode b = run(train, cfg);
    REQUIRE(a.terms().size() == b.terms().size());
    CHECK(a.terms() == b.terms());
    for (std::size_t i = 0; i < a.terms().size(); ++i) {
        CHECK(std::memcmp(&a.fit.expression.weights[i], &b.fit.expression.weights[i],
                          sizeof(double)) == 0);
    }
    CHECK(a.fit.train_mae == b.fit.train_mae);
    CHECK(a.creation_index == b.creation_index);
}

TEST_CASE("run upholds the tree invariants under observation") {
    const auto& spec = benchmark("F5");
    auto [train, test] = sample(spec, 7);
    (void)test;

    SearchConfig cfg;
    cfg.tau = 1e-3;
    cfg.min_i = 1;
    cfg.min_t = 3;
    cfg.extra_iters = 0;

    testing::PropertyValidator validator;
    const SearchNode best = run(train, cfg, &validator);
    CHECK(validator.expansions() > 0);
    CHECK(validator.child_score_violations() == 0);
    CHECK(validator.coverage_violations() == 0);
    CHECK(validator.monotone_violations() == 0);
    CHECK(best.score() > 0.0);
}

TEST_CASE("candidate cap keeps the best-scoring candidates") {
    const Dataset train = sampled_1d(18, 100, -5.0, 5.0, [](double v) {
        return v * v + 0.05 * v * v * v;
    });
    const SearchNode node = fitted_node(make_linear_terms(1), train);

    SearchConfig capped;
    capped.tau = 1e-300;
    capped.min_i = 0;  // inverse yields nothing on one term; interaction gives x^2
    capped.min_t = 0;  // transformations give six more candidates
    capped.max_terms_per_node = 1;
    const auto children = expand(node, capped, train, 1);
    std::size_t total_accepted = 0;
    for (const SearchNode& child : children)
        total_accepted += child.terms().size() - node.terms().size();
    CHECK(total_accepted == 1);  // only the single best candidate survived the cap
}

TEST_CASE("leaf cap bounds the frontier") {
    const Dataset train = sampled_1d(19, 150, -5.0, 5.0, [](double v) {
        return std::sin(v * v) * std::cos(v) - 1.0;
    });
    SearchConfig cfg;
    cfg.tau = 1e-3;
    cfg.min_i = 1;
    cfg.min_t = 1;
    cfg.extra_iters = 1;
    cfg.max_leaves = 2;
    const SearchNode best = run(train, cfg);  // must terminate quickly and stay valid
    CHECK(best.score() > 0.0);
}

TEST_CASE("grid_search picks the best training score with earliest-entry ties") {
    const Dataset train = sampled_1d(20, 200, -5.0, 5.0, [](double v) {
        return v * v * v + v * v + 5.0 * v;
    });

    SearchConfig weak;  // zero-budget config: root only
    weak.min_i = 0;
    weak.min_t = 0;
    weak.extra_iters = 0;

    SearchConfig strong;
    strong.min_i = 1;
    strong.min_t = 5;

    const std::vector<SearchConfig> single = {weak};
    const auto [cfg_single, node_single] = grid_search(train, single);
    CHECK(cfg_single.total_iterations() == 0);
    CHECK(node_single.terms() == make_linear_terms(1));

    const std::vector<SearchConfig> both = {weak, strong};
    const auto [cfg_best, node_best] = grid_search(train, both, 2);
    CHECK(cfg_best.total_iterations() == strong.total_iterations());
    CHECK(node_best.fit.train_mae < 1e-9);

    // exact ties resolve to the earliest grid entry
    const std::vector<SearchConfig> tied = {weak, weak};
    const auto [cfg_tie, node_tie] = grid_search(train, tied, 2);
    (void)cfg_tie;
    CHECK(node_tie.terms() == make_linear_terms(1));
}

TEST_CASE("grid constructors match their documented shapes") {
    const auto desk = desk_grid();
    CHECK(desk.size() == 24);
    const auto full = full_grid();
    CHECK(full.size() == 1350);

    for (const auto& cfg : desk) {
        CHECK((cfg.tau == 1e-6 || cfg.tau == 1e-3));
        CHECK(cfg.transforms == default_transforms());
        CHECK_FALSE(cfg.max_terms_per_node.has_value());
        CHECK_FALSE(cfg.max_leaves.has_value());
    }
    std::set<double> taus;
    std::set<std::size_t> min_is, min_ts, extras;
    for (const auto& cfg : full) {
        taus.insert(cfg.tau);
        min_is.insert(cfg.min_i);
        min_ts.insert(cfg.min_t);
        extras.insert(cfg.extra_iters);
    }
    CHECK(taus == std::set<double>{1e-6, 1e-5, 1e-4, 1e-3, 1e-2});
    CHECK(min_is == std::set<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(min_ts == std::set<std::size_t>{5, 6, 7, 8, 9});
    CHECK(extras == std::set<std::size_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("search config validation") {
    SearchConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    SearchConfig bad_tau;
    bad_tau.tau = 0.0;
    CHECK_THROWS_AS(bad_tau.validate(), std::invalid_argument);

    SearchConfig identity;
    identity.transforms = {Transform::Identity};
    CHECK_THROWS_AS(identity.validate(), std::invalid_argument);

    SearchConfig zero_cap;
    zero_cap.max_terms_per_node = 0;
    CHECK_THROWS_AS(zero_cap.validate(), std::invalid_argument);
}
