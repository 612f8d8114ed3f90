// Scratch single-config profiler (not part of the test suite).
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "symtree/benchmarks.hpp"
#include "symtree/search.hpp"

using namespace symtree;

namespace {

struct Stats : SearchObserver {
    std::size_t expansions = 0;
    std::size_t max_terms = 0;
    std::size_t total_filtered = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void on_expand(const ExpandEvent& ev) override {
        ++expansions;
        total_filtered += ev.filtered.size();
        for (const SearchNode& c : ev.children) max_terms = std::max(max_terms, c.terms().size());
    }
    void on_iteration(std::uint64_t, std::size_t iteration, double best) override {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("  it=%zu best=%.6f expansions=%zu max_terms=%zu filtered_total=%zu t=%.1fs\n",
                    iteration, best, expansions, max_terms, total_filtered, s);
        std::fflush(stdout);
    }
};

}  // namespace

int main(int argc, char** argv) {
    const auto& spec = benchmark(argv[1]);
    auto [train, test] = sample(spec, 1);
    SearchConfig cfg;
    cfg.tau = std::atof(argv[2]);
    cfg.min_i = std::strtoull(argv[3], nullptr, 10);
    cfg.min_t = std::strtoull(argv[4], nullptr, 10);
    cfg.extra_iters = std::strtoull(argv[5], nullptr, 10);
    Stats stats;
    const auto t0 = std::chrono::steady_clock::now();
    SearchNode best = run(train, cfg, &stats);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s cfg=(%g,%zu,%zu,%zu): train=%.6g test=%.6g terms=%zu wall=%.1fs\n",
                spec.id.c_str(), cfg.tau, cfg.min_i, cfg.min_t, cfg.extra_iters,
                best.fit.train_mae, mae(best.fit.expression, test), best.terms().size(), s);
    return 0;
}
