// File formats: CSV datasets (header x0,...,x{d-1},y), model JSON and the
// run-report CSV.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "symtree/expression.hpp"

namespace symtree {

/// Thrown on malformed CSV or JSON input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;  // rectangular

    std::size_t n_cols() const { return header.size(); }
};

/// Parse a headed CSV of doubles. Throws ParseError on ragged rows,
/// non-numeric fields or a missing header.
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

/// Split a parsed table into a dataset using the given target column.
/// Throws ParseError when the column is out of range or the table has
/// fewer than two columns, and std::invalid_argument on non-finite data.
Dataset table_to_dataset(const Table& table, std::size_t target_col);

/// Dataset CSV with header x0,...,x{d-1},y; floats at 17 significant
/// digits (round-trip exact).
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Model JSON: {"dim": d, "intercept": r, "terms": [{"exponents": [...],
/// "transform": "sin", "weight": r}, ...]}.
std::string expression_to_json(const Expression& expr);
Expression expression_from_json(const std::string& text);
Expression read_expression_file(const std::string& path);
void write_expression_file(const std::string& path, const Expression& expr);

struct RunReport {
    std::string id;  // benchmark id or dataset path
    double tau = 0.0;
    std::size_t min_i = 0;
    std::size_t min_t = 0;
    std::size_t extra_iters = 0;
    double train_mae = 0.0;
    double test_mae = 0.0;
    std::size_t n_terms = 0;
    std::size_t expr_size = 0;
    std::uint64_t wall_ms = 0;
    std::string expression_str;
    std::string expression_json;
};

inline constexpr std::string_view kReportHeader =
    "id,tau,min_i,min_t,extra_iters,train_mae,test_mae,n_terms,expr_size,wall_ms,expr";

/// One CSV row in the report column order (MAE at 6 significant digits).
std::string report_row(const RunReport& report);

/// Format a double at 17 significant digits (round-trip exact).
std::string format_full(double v);

/// Format a double at 6 significant digits.
std::string format_g6(double v);

}  // namespace symtree
