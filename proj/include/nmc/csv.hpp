#ifndef NMC_CSV_HPP
#define NMC_CSV_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "nmc/dataset.hpp"
#include "nmc/errors.hpp"
#include "nmc/gaussian.hpp"

namespace nmc {

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline bool is_missing(const std::string& f) {
    if (f.empty()) return true;
    std::string low;
    for (char c : f) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return low == "na" || low == "nan" || low == "null";
}

} // namespace detail

// Tabular sample input: header row with variable names, one row per sample.
// Rows with missing fields are rejected (counted); non-numeric fields are an
// input error.
struct CsvData {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns; // [variable][sample]
    bool all_integer = true;
    int rejected_rows = 0;
    int n() const { return static_cast<int>(columns.size()); }
    int m() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
};

inline CsvData read_csv(std::istream& in) {
    CsvData out;
    std::string line;
    if (!std::getline(in, line)) throw invalid_input("csv: empty file");
    out.names = detail::split_csv_line(line);
    if (out.names.empty()) throw invalid_input("csv: empty header");
    out.columns.resize(out.names.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != out.names.size())
            throw invalid_input("csv: line " + std::to_string(lineno) + " has " +
                                std::to_string(fields.size()) + " fields, expected " +
                                std::to_string(out.names.size()));
        if (std::any_of(fields.begin(), fields.end(), detail::is_missing)) {
            ++out.rejected_rows;
            continue;
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            char* end = nullptr;
            row[i] = std::strtod(fields[i].c_str(), &end);
            if (end == fields[i].c_str() || *end != '\0' || !std::isfinite(row[i]))
                throw invalid_input("csv: non-numeric value '" + fields[i] + "' for " + out.names[i] +
                                    " on line " + std::to_string(lineno));
            if (std::abs(row[i] - std::round(row[i])) > 1e-9) out.all_integer = false;
        }
        for (std::size_t i = 0; i < fields.size(); ++i) out.columns[i].push_back(row[i]);
    }
    if (out.m() == 0) throw invalid_input("csv: no usable sample rows");
    return out;
}

// bins == 0 keeps integer categories as-is (real values are an error);
// bins >= 2 discretizes every column.
inline Dataset dataset_from_csv(const CsvData& csv, int bins, BinScheme scheme) {
    if (bins == 0) {
        if (!csv.all_integer)
            throw invalid_input("csv: real-valued columns require --bins to discretize");
        std::vector<std::vector<long long>> raw(csv.n());
        for (int i = 0; i < csv.n(); ++i) {
            raw[i].reserve(csv.m());
            for (double v : csv.columns[i]) raw[i].push_back(static_cast<long long>(std::llround(v)));
        }
        return make_dataset(raw, csv.names);
    }
    return discretize(csv.columns, bins, scheme, csv.names);
}

// Plain numeric n x n matrix, comma or whitespace separated, '#' comments.
inline CorrelationMatrix read_correlation_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream ls(t);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof())
            throw invalid_input("correlation csv: malformed line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw invalid_input("correlation csv: empty file");
    const std::size_t n = rows.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw invalid_input("correlation csv: row " + std::to_string(i + 1) + " has " +
                                std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return CorrelationMatrix(m);
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << m(i, j);
        }
        out << "\n";
    }
    return out.str();
}

} // namespace nmc

#endif
