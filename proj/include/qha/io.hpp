#pragma once
// File formats: matrices and sampled symbols as plain text with exact
// round-trip (17 significant digits regenerate the double bit for bit),
// plus a small CSV writer for report data.

#include "qha/common.hpp"
#include "qha/phase_transforms.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qha {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline void write_complex_body(std::ostream& out, const Mat& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j) out << ' ';
            out << format_real(a(i, j).real()) << ' ' << format_real(a(i, j).imag());
        }
        out << '\n';
    }
}

inline Mat read_complex_body(std::istream& in, long rows, long cols,
                             const std::string& what) {
    Mat a(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im))
                throw std::runtime_error(what + ": truncated sample block at row " +
                                         std::to_string(i));
            a(i, j) = cplx(re, im);
        }
    return a;
}

}  // namespace detail

// Matrix file: "qha-matrix 1", "rows cols", then row-major re/im pairs.
inline void write_matrix(const std::string& path, const Mat& a) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "qha-matrix 1\n" << a.rows() << ' ' << a.cols() << '\n';
    detail::write_complex_body(out, a);
    if (!out) throw std::runtime_error(path + ": write failed");
}

inline Mat read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic;
    int version = 0;
    long rows = 0, cols = 0;
    if (!(in >> magic >> version) || magic != "qha-matrix")
        throw std::runtime_error(path + ": not a qha-matrix file");
    if (version != 1)
        throw std::runtime_error(path + ": unsupported version " +
                                 std::to_string(version));
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw std::runtime_error(path + ": bad shape header");
    return detail::read_complex_body(in, rows, cols, path);
}

// Symbol file: "qha-grid-symbol 1", "extent points provenance warning", body.
inline void write_grid_symbol(const std::string& path, const GridSymbol& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    std::string prov = f.provenance.empty() ? "-" : f.provenance;
    for (char& c : prov)
        if (std::isspace(static_cast<unsigned char>(c))) c = '_';
    out << "qha-grid-symbol 1\n"
        << format_real(f.grid.extent) << ' ' << f.grid.points << ' ' << prov << ' '
        << (f.boundary_warning ? 1 : 0) << '\n';
    detail::write_complex_body(out, f.samples);
    if (!out) throw std::runtime_error(path + ": write failed");
}

inline GridSymbol read_grid_symbol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "qha-grid-symbol")
        throw std::runtime_error(path + ": not a qha-grid-symbol file");
    if (version != 1)
        throw std::runtime_error(path + ": unsupported version " +
                                 std::to_string(version));
    GridSymbol f;
    int warn = 0;
    if (!(in >> f.grid.extent >> f.grid.points >> f.provenance >> warn))
        throw std::runtime_error(path + ": bad symbol header");
    check_grid(f.grid);
    f.boundary_warning = warn != 0;
    f.samples = detail::read_complex_body(in, f.grid.points, f.grid.points, path);
    return f;
}

// CSV with quoting for the odd text cell; numbers should already be formatted.
inline void write_csv(const std::string& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    auto cell = [&out](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            out << s;
            return;
        }
        out << '"';
        for (char c : s) {
            if (c == '"') out << '"';
            out << c;
        }
        out << '"';
    };
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j) out << ',';
        cell(columns[j]);
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            cell(row[j]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace qha
