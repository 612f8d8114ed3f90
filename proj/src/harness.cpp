#include "symtree/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "symtree/benchmarks.hpp"
#include "symtree/io.hpp"
#include "symtree/rng.hpp"

namespace symtree::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point start) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count());
}

// Stream tag for the fit command's train/test shuffle.
constexpr std::uint64_t kSplitTag = 0x73706C6974ULL;  // "split"

RunReport make_report(std::string id, const SearchConfig& cfg, const SearchNode& node,
                      double test_mae, std::uint64_t wall_ms) {
    RunReport report;
    report.id = std::move(id);
    report.tau = cfg.tau;
    report.min_i = cfg.min_i;
    report.min_t = cfg.min_t;
    report.extra_iters = cfg.extra_iters;
    report.train_mae = node.fit.train_mae;
    report.test_mae = test_mae;
    report.n_terms = node.terms().size();
    report.expr_size = expression_size(node.fit.expression);
    report.wall_ms = wall_ms;
    report.expression_str = render(node.fit.expression);
    report.expression_json = expression_to_json(node.fit.expression);
    return report;
}

int write_text(const std::string& path, const std::string& text, std::ostream& out,
               std::ostream& err) {
    if (path.empty()) {
        out << text;
        return kExitOk;
    }
    std::ofstream file(path);
    if (!file) {
        err << "error: cannot write " << path << "\n";
        return kExitUsage;
    }
    file << text;
    return kExitOk;
}

bool all_finite(const Table& table) {
    for (const auto& row : table.rows) {
        for (double v : row) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<SearchConfig> build_grid(const CommonOptions& common) {
    std::vector<SearchConfig> grid = common.use_full_grid ? full_grid() : desk_grid();
    for (SearchConfig& cfg : grid) {
        cfg.max_terms_per_node = common.max_terms;
        cfg.max_leaves = common.max_leaves;
    }
    return grid;
}

int run_fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
    if (options.test_fraction < 0.0 || options.test_fraction >= 1.0) {
        err << "error: --test-fraction must be in [0, 1)\n";
        return kExitUsage;
    }

    Table table;
    try {
        table = read_csv_file(options.dataset_path);
    } catch (const ParseError& e) {
        err << "error: " << options.dataset_path << ": " << e.what() << "\n";
        return kExitUsage;
    }
    const std::size_t target_col = options.target_col.value_or(table.n_cols() - 1);
    if (table.n_cols() < 2 || target_col >= table.n_cols()) {
        err << "error: target column out of range\n";
        return kExitUsage;
    }
    if (table.rows.empty()) {
        err << "error: dataset has no data rows\n";
        return kExitData;
    }
    if (!all_finite(table)) {
        err << "error: dataset contains non-finite values\n";
        return kExitData;
    }

    try {
        const Dataset full = table_to_dataset(table, target_col);

        // Seeded shuffle split: the first (1 - fraction) of the permuted
        // rows train, the remainder tests. A zero-row test split reuses
        // the training data for reporting.
        const std::size_t n = static_cast<std::size_t>(full.n());
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Xoshiro256 rng(derive_seed(options.common.seed, kSplitTag));
        rng.shuffle(order);
        std::size_t n_test = static_cast<std::size_t>(
            std::llround(options.test_fraction * static_cast<double>(n)));
        n_test = std::min(n_test, n - 1);
        const std::size_t n_train = n - n_test;

        auto subset = [&](std::size_t begin, std::size_t count) {
            Eigen::MatrixXd X(count, full.d());
            Eigen::VectorXd y(count);
            for (std::size_t i = 0; i < count; ++i) {
                X.row(static_cast<Eigen::Index>(i)) =
                    full.X.row(static_cast<Eigen::Index>(order[begin + i]));
                y[static_cast<Eigen::Index>(i)] = full.y[static_cast<Eigen::Index>(order[begin + i])];
            }
            return Dataset(std::move(X), std::move(y));
        };
        const Dataset train = subset(0, n_train);

        const std::vector<SearchConfig> grid = build_grid(options.common);
        const Clock::time_point start = Clock::now();
        auto [cfg, node] = grid_search(train, grid, options.common.threads);
        const std::uint64_t wall_ms = options.common.timing ? elapsed_ms(start) : 0;

        double test_mae = node.fit.train_mae;
        if (n_test > 0) {
            const Dataset test = subset(n_train, n_test);
            test_mae = mae(node.fit.expression, test);
        }

        RunReport report =
            make_report(options.dataset_path, cfg, node, test_mae, wall_ms);
        if (!options.out_path.empty())
            write_expression_file(options.out_path, node.fit.expression);

        out << "expression: " << report.expression_str << "\n";
        out << "train_mae: " << format_g6(report.train_mae) << "\n";
        out << "test_mae: " << format_g6(report.test_mae) << "\n";
        out << kReportHeader << "\n" << report_row(report) << "\n";
        return kExitOk;
    } catch (const EmptyDataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err) {
    std::vector<std::string> ids = options.ids.empty() ? benchmark_ids() : options.ids;
    for (const std::string& id : ids) {
        try {
            benchmark(id);
        } catch (const std::invalid_argument&) {
            err << "error: unknown benchmark id '" << id << "'; valid ids:";
            for (const std::string& valid : benchmark_ids()) err << ' ' << valid;
            err << "\n";
            return kExitUsage;
        }
    }

    try {
        const std::vector<SearchConfig> grid = build_grid(options.common);
        std::string text(kReportHeader);
        text += '\n';
        for (const std::string& id : ids) {
            const BenchmarkSpec& spec = benchmark(id);
            auto [train, test] = sample(spec, options.common.seed);
            const Clock::time_point start = Clock::now();
            auto [cfg, node] = grid_search(train, grid, options.common.threads);
            const std::uint64_t wall_ms = options.common.timing ? elapsed_ms(start) : 0;
            const double test_mae = mae(node.fit.expression, test);
            text += report_row(make_report(id, cfg, node, test_mae, wall_ms));
            text += '\n';
        }
        return write_text(options.out_path, text, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run_polyrec(const PolyrecOptions& options, std::ostream& out, std::ostream& err) {
    auto validate_set = [&](const std::vector<std::size_t>& values, std::size_t lo, std::size_t hi,
                            const char* name) {
        if (values.empty()) {
            err << "error: --" << name << " must not be empty\n";
            return false;
        }
        for (std::size_t v : values) {
            if (v < lo || v > hi) {
                err << "error: --" << name << " value " << v << " outside [" << lo << ", " << hi
                    << "]\n";
                return false;
            }
        }
        return true;
    };
    if (!validate_set(options.dims, 1, 3, "dims") || !validate_set(options.orders, 1, 4, "orders") ||
        !validate_set(options.bases, 1, 4, "bases")) {
        return kExitUsage;
    }

    std::vector<std::size_t> dims = options.dims;
    std::vector<std::size_t> orders = options.orders;
    std::vector<std::size_t> bases = options.bases;
    for (auto* v : {&dims, &orders, &bases}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }

    try {
        const std::vector<SearchConfig> grid = build_grid(options.common);
        std::string text = "dim,order";
        for (std::size_t base : bases) text += ",base" + std::to_string(base);
        text += '\n';

        for (std::size_t dim : dims) {
            for (std::size_t order : orders) {
                text += std::to_string(dim) + "," + std::to_string(order);
                for (std::size_t base : bases) {
                    text += ',';
                    if (base > poly_term_pool_size(dim, order)) {
                        text += "--";  // no such polynomial family
                        continue;
                    }
                    if (options.trials == 0) continue;
                    std::size_t hits = 0;
                    for (std::size_t trial = 0; trial < options.trials; ++trial) {
                        PolySpec spec;
                        spec.dim = dim;
                        spec.order = order;
                        spec.n_base_terms = base;
                        spec.seed = derive_seed(options.common.seed,
                                                (((dim << 8 | order) << 8 | base) << 16) | trial);
                        PolyInstance instance = random_polynomial(spec);
                        auto [cfg, node] =
                            grid_search(instance.train, grid, options.common.threads);
                        if (recovered(node.fit.expression, instance.target)) ++hits;
                    }
                    text += std::to_string(hits);
                }
                text += '\n';
            }
        }
        return write_text(options.out_path, text, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run_predict(const PredictOptions& options, std::ostream& out, std::ostream& err) {
    Expression model;
    Table table;
    try {
        model = read_expression_file(options.model_path);
        table = read_csv_file(options.dataset_path);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    // Inputs may carry a trailing target column; it is ignored.
    if (table.n_cols() != model.dim && table.n_cols() != model.dim + 1) {
        err << "error: dataset has " << table.n_cols() << " columns; model expects " << model.dim
            << " variables\n";
        return kExitUsage;
    }

    std::string text = "prediction\n";
    std::vector<double> point(model.dim);
    for (const auto& row : table.rows) {
        std::copy_n(row.begin(), model.dim, point.begin());
        const double value = eval_expression(model, point);
        text += std::isfinite(value) ? format_full(value) : "nan";
        text += '\n';
    }
    return write_text(options.out_path, text, out, err);
}

}  // namespace symtree::cli
