// Command implementations behind the CLI. Each returns a process exit
// code: 0 success, 2 usage/validation error, 3 data error, 4 internal
// numeric failure. Output files and stdout text are byte-reproducible
// for a fixed seed (wall_ms is reported as 0 unless timing is enabled).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "symtree/search.hpp"

namespace symtree::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

struct CommonOptions {
    std::uint64_t seed = 1;
    bool use_full_grid = false;
    std::optional<std::size_t> max_terms;
    std::optional<std::size_t> max_leaves;
    bool timing = false;   // measure wall_ms; off by default so reports stay byte-stable
    unsigned threads = 0;  // grid-search workers; 0 = hardware concurrency
};

/// Desk grid by default, the full 1350-config sweep with use_full_grid;
/// caps applied to every entry.
std::vector<SearchConfig> build_grid(const CommonOptions& common);

struct FitOptions {
    std::string dataset_path;
    std::string out_path;                   // model JSON; empty = don't write
    double test_fraction = 0.5;             // seeded shuffle split; 0 = train on all rows
    std::optional<std::size_t> target_col;  // default: last column
    CommonOptions common;
};

struct BenchmarkOptions {
    std::vector<std::string> ids;  // empty = all benchmarks
    std::string out_path;          // report CSV; empty = stdout
    CommonOptions common;
};

struct PolyrecOptions {
    std::vector<std::size_t> dims{1, 2, 3};
    std::vector<std::size_t> orders{1, 2, 3, 4};
    std::vector<std::size_t> bases{1, 2, 3, 4};
    std::size_t trials = 5;
    std::string out_path;  // recovery-count CSV; empty = stdout
    CommonOptions common;
};

struct PredictOptions {
    std::string model_path;
    std::string dataset_path;
    std::string out_path;  // predictions CSV; empty = stdout
};

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int run_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err);
int run_polyrec(const PolyrecOptions& options, std::ostream& out, std::ostream& err);
int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err);

}  // namespace symtree::cli
