#pragma once

#include "lrinorm/profile.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lrinorm::io {

/// Dense CSV: one row per line, comma separated, '.' decimal, no header.
inline Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed number '" + cell + "'");
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size())
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed number '" + cell + "'");
            row.push_back(v);
        }
        if (row.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty row");
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": ragged row (" +
                                     std::to_string(row.size()) + " vs " +
                                     std::to_string(rows.front().size()) + " columns)");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data");
    Matrix M(rows.size(), rows.front().size());
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
    return M;
}

/// 17 significant digits, enough for an exact double round-trip.
inline void write_csv_matrix(const std::string& path, const Matrix& M) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[40];
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            out << buf << (j + 1 < M.cols() ? "," : "");
        }
        out << '\n';
    }
}

/// Coordinate mask, one "i j" pair per line, 1-based; '%' and '#' start
/// comment lines. Returned pairs are 0-based.
inline std::vector<std::pair<Index, Index>> read_mask(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::pair<Index, Index>> mask;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '%' || line[first] == '#') continue;
        std::stringstream ss(line);
        long long i = 0, j = 0;
        if (!(ss >> i >> j))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected two 1-based indices");
        std::string rest;
        if (ss >> rest)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing tokens");
        if (i < 1 || j < 1)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": indices are 1-based");
        mask.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1));
    }
    return mask;
}

/// Fixed-point rendering with `sig` significant digits; zero prints as "0".
inline std::string format_significant(double v, int sig = 16) {
    if (v == 0.0) return "0";
    if (!std::isfinite(v)) return std::to_string(v);
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(v))));
    const int decimals = std::clamp(sig - 1 - exponent, 0, 400);
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

}  // namespace lrinorm::io
