#include "symtree/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace symtree {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_double(const std::string& field, std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0')) {
        throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    return value;
}

}  // namespace

Table read_csv(std::istream& in) {
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> fields = split_line(line);
        if (line_no == 1) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& field : fields) row.push_back(parse_double(field, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ParseError("empty CSV: missing header row");
    return table;
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return read_csv(in);
}

Dataset table_to_dataset(const Table& table, std::size_t target_col) {
    if (table.n_cols() < 2) throw ParseError("dataset needs at least one variable and a target");
    if (target_col >= table.n_cols())
        throw ParseError("target column " + std::to_string(target_col) + " out of range");
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto d = static_cast<Eigen::Index>(table.n_cols() - 1);
    Eigen::MatrixXd X(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == target_col) {
                y[r] = row[j];
            } else {
                X(r, c++) = row[j];
            }
        }
    }
    return Dataset(std::move(X), std::move(y));
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (Eigen::Index c = 0; c < data.d(); ++c) out << 'x' << c << ',';
    out << "y\n";
    for (Eigen::Index r = 0; r < data.n(); ++r) {
        for (Eigen::Index c = 0; c < data.d(); ++c) out << format_full(data.X(r, c)) << ',';
        out << format_full(data.y[r]) << '\n';
    }
}

std::string expression_to_json(const Expression& expr) {
    nlohmann::json doc;
    doc["dim"] = expr.dim;
    doc["intercept"] = expr.intercept;
    doc["terms"] = nlohmann::json::array();
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
        nlohmann::json term;
        term["exponents"] = expr.terms[i].exponents;
        term["transform"] = transform_name(expr.terms[i].transform);
        term["weight"] = expr.weights[i];
        doc["terms"].push_back(std::move(term));
    }
    return doc.dump(2) + "\n";
}

Expression expression_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    Expression expr;
    try {
        expr.dim = doc.at("dim").get<std::size_t>();
        expr.intercept = doc.at("intercept").get<double>();
        for (const auto& term_doc : doc.at("terms")) {
            Term term;
            term.exponents = term_doc.at("exponents").get<std::vector<int>>();
            term.transform = transform_from_name(term_doc.at("transform").get<std::string>());
            expr.terms.push_back(std::move(term));
            expr.weights.push_back(term_doc.at("weight").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    try {
        expr.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    return expr;
}

Expression read_expression_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return expression_from_json(buffer.str());
}

void write_expression_file(const std::string& path, const Expression& expr) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << expression_to_json(expr);
}

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string report_row(const RunReport& r) {
    std::string row;
    row += r.id;
    row += ',';
    row += format_g6(r.tau);
    row += ',';
    row += std::to_string(r.min_i);
    row += ',';
    row += std::to_string(r.min_t);
    row += ',';
    row += std::to_string(r.extra_iters);
    row += ',';
    row += format_g6(r.train_mae);
    row += ',';
    row += format_g6(r.test_mae);
    row += ',';
    row += std::to_string(r.n_terms);
    row += ',';
    row += std::to_string(r.expr_size);
    row += ',';
    row += std::to_string(r.wall_ms);
    row += ',';
    row += r.expression_str;
    return row;
}

}  // namespace symtree
