// symtree: fit IT expressions to CSV data, reproduce the benchmark and
// polynomial-recovery experiments, and evaluate saved models.
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "symtree/harness.hpp"

namespace {

void add_common_flags(CLI::App* cmd, symtree::cli::CommonOptions& common) {
    cmd->add_option("--seed", common.seed, "PRNG seed for sampling and splits");
    cmd->add_flag("--full-grid", common.use_full_grid,
                  "sweep the full 1350-config grid instead of the desk grid");
    cmd->add_option("--max-terms", [&common](const CLI::results_t& values) {
        common.max_terms = std::stoull(values[0]);
        return true;
    }, "cap on filtered candidates per node expansion")->expected(1);
    cmd->add_option("--max-leaves", [&common](const CLI::results_t& values) {
        common.max_leaves = std::stoull(values[0]);
        return true;
    }, "cap on live leaves per search iteration")->expected(1);
    cmd->add_flag("--timing", common.timing,
                  "report measured wall_ms (reports are no longer byte-stable)");
    cmd->add_option("--threads", common.threads, "grid-search worker threads (0 = auto)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SymTree symbolic regression over Interaction-Transformation expressions"};
    app.require_subcommand(1);

    symtree::cli::FitOptions fit_options;
    std::optional<std::size_t> target_col;
    CLI::App* fit = app.add_subcommand("fit", "fit a model to a CSV dataset");
    fit->add_option("dataset", fit_options.dataset_path, "CSV with header; last column is the target")
        ->required();
    fit->add_option("--out", fit_options.out_path, "write the fitted model JSON here");
    fit->add_option("--test-fraction", fit_options.test_fraction,
                    "held-out fraction for the reported test MAE (default 0.5)");
    fit->add_option("--target-col", [&target_col](const CLI::results_t& values) {
        target_col = std::stoull(values[0]);
        return true;
    }, "0-based index of the target column")->expected(1);
    add_common_flags(fit, fit_options.common);

    symtree::cli::BenchmarkOptions bench_options;
    CLI::App* bench = app.add_subcommand("benchmark", "run the benchmark suite");
    bench->add_option("--ids", bench_options.ids, "benchmark ids (default: all of F1..F17)")
        ->delimiter(',');
    bench->add_option("--out", bench_options.out_path, "report CSV path (default: stdout)");
    add_common_flags(bench, bench_options.common);

    symtree::cli::PolyrecOptions poly_options;
    CLI::App* poly = app.add_subcommand("polyrec", "random-polynomial recovery counts");
    poly->add_option("--dims", poly_options.dims, "dimensions to test (subset of 1,2,3)")
        ->delimiter(',');
    poly->add_option("--orders", poly_options.orders, "polynomial orders (subset of 1..4)")
        ->delimiter(',');
    poly->add_option("--bases", poly_options.bases, "term counts (subset of 1..4)")
        ->delimiter(',');
    poly->add_option("--trials", poly_options.trials, "seeded trials per cell (default 5)");
    poly->add_option("--out", poly_options.out_path, "recovery-count CSV path (default: stdout)");
    add_common_flags(poly, poly_options.common);

    symtree::cli::PredictOptions predict_options;
    CLI::App* predict = app.add_subcommand("predict", "evaluate a saved model on a CSV dataset");
    predict->add_option("model", predict_options.model_path, "model JSON path")->required();
    predict->add_option("dataset", predict_options.dataset_path, "input CSV path")->required();
    predict->add_option("--out", predict_options.out_path, "predictions CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : symtree::cli::kExitUsage;
    }

    fit_options.target_col = target_col;

    if (fit->parsed()) return symtree::cli::run_fit(fit_options, std::cout, std::cerr);
    if (bench->parsed()) return symtree::cli::run_benchmark(bench_options, std::cout, std::cerr);
    if (poly->parsed()) return symtree::cli::run_polyrec(poly_options, std::cout, std::cerr);
    if (predict->parsed()) return symtree::cli::run_predict(predict_options, std::cout, std::cerr);
    return symtree::cli::kExitUsage;
}
