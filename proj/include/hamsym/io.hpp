// io.hpp - plain-text numeric interchange. Matrices are CSV rows; complex
// entries occupy two adjacent columns as a "re,im" pair. Lines starting with
// '#' and blank lines are skipped on read.

#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamsym::io {

using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// ------------------------------- formatting ---------------------------------

// Shortest round-trippable decimal form.
inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void append_row(std::string& out, const double* vals, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
        if (i > 0) out += ',';
        out += format_value(vals[i]);
    }
    out += '\n';
}

// ------------------------------- raw parsing --------------------------------

inline std::vector<std::vector<double>> parse_numeric_rows(std::istream& in,
                                                           const std::string& what) {
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        // tolerate a header row of column names on otherwise numeric files
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) { numeric = false; break; }
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty()) continue;  // header line
            throw std::runtime_error(what + ": non-numeric data at line " + std::to_string(lineno));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error(what + ": ragged row at line " + std::to_string(lineno));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::vector<double>> parse_numeric_rows_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_numeric_rows(in, path);
}

// ----------------------------- real matrices --------------------------------

inline std::string write_real_matrix(const Matrix& m) {
    std::string out;
    std::vector<double> row(static_cast<size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<size_t>(c)] = m(r, c);
        append_row(out, row.data(), m.cols());
    }
    return out;
}

inline Matrix read_real_matrix(std::istream& in, const std::string& what = "matrix") {
    const auto rows = parse_numeric_rows(in, what);
    if (rows.empty()) throw std::runtime_error(what + ": no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

// ---------------------------- complex matrices -------------------------------

inline std::string write_complex_matrix(const CMatrix& m) {
    std::string out;
    std::vector<double> row(static_cast<size_t>(2 * m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row[static_cast<size_t>(2 * c)] = m(r, c).real();
            row[static_cast<size_t>(2 * c + 1)] = m(r, c).imag();
        }
        append_row(out, row.data(), 2 * m.cols());
    }
    return out;
}

inline CMatrix read_complex_matrix(std::istream& in, const std::string& what = "complex matrix") {
    const auto rows = parse_numeric_rows(in, what);
    if (rows.empty()) throw std::runtime_error(what + ": no data rows");
    if (rows.front().size() % 2 != 0) {
        throw std::runtime_error(what + ": odd column count, expected re,im pairs");
    }
    CMatrix m(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(rows.front().size() / 2));
    for (size_t r = 0; r < rows.size(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(static_cast<Eigen::Index>(r), c) = {rows[r][static_cast<size_t>(2 * c)],
                                                  rows[r][static_cast<size_t>(2 * c + 1)]};
        }
    }
    return m;
}

// Vectors serialize as single-column matrices, one entry per line.
inline std::string write_complex_vector(const CVector& v) {
    return write_complex_matrix(v);
}

inline CVector read_complex_vector(std::istream& in, const std::string& what = "complex vector") {
    const CMatrix m = read_complex_matrix(in, what);
    if (m.cols() != 1) throw std::runtime_error(what + ": expected a single complex column");
    return m.col(0);
}

inline std::string write_real_vector(const Vector& v) {
    return write_real_matrix(v);
}

inline Vector read_real_vector(std::istream& in, const std::string& what = "vector") {
    const Matrix m = read_real_matrix(in, what);
    if (m.cols() != 1) throw std::runtime_error(what + ": expected a single column");
    return m.col(0);
}

// ------------------------------- file helpers -------------------------------

inline void write_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace hamsym::io
