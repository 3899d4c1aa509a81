#include "lpsum/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lpsum {

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool parse_double(std::string_view tok, double& out) {
    // std::from_chars<double> handles leading/trailing junk detection for us.
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    while (last != first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
    if (first == last) return false;
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

MatrixF load_csv(const std::string& path, bool skip_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_header && lineno == 1) continue;
        if (line.empty()) continue;
        std::size_t ncols = 0;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string_view tok(line.data() + pos,
                                 (comma == std::string::npos ? line.size() : comma) - pos);
            double v;
            if (!parse_double(tok, v)) {
                throw ParseError(path, lineno, "unparsable field '" + std::string(tok) + "'");
            }
            if (!std::isfinite(v)) {
                throw ParseError(path, lineno, "non-finite entry");
            }
            values.push_back(v);
            ++ncols;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols == 0) {
            cols = ncols;
        } else if (ncols != cols) {
            throw ParseError(path, lineno,
                             "row has " + std::to_string(ncols) + " fields, expected " +
                                 std::to_string(cols));
        }
        ++rows;
    }
    return MatrixF(rows, cols, std::move(values));
}

MatrixF load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
    ++lineno;
    std::istringstream head(line);
    std::string banner, object, fmt, field, symmetry;
    head >> banner >> object >> fmt >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix") {
        throw ParseError(path, lineno, "not a MatrixMarket matrix header");
    }
    const bool coordinate = fmt == "coordinate";
    if (!coordinate && fmt != "array") {
        throw ParseError(path, lineno, "unsupported format '" + fmt + "'");
    }
    if (field != "real" && field != "integer") {
        throw ParseError(path, lineno, "unsupported field '" + field + "'");
    }
    if (symmetry != "general") {
        throw ParseError(path, lineno, "unsupported symmetry '" + symmetry + "'");
    }
    // Skip comments, read the size line.
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream size_line(line);
    std::size_t nrows = 0, ncols = 0, nnz = 0;
    if (coordinate) {
        if (!(size_line >> nrows >> ncols >> nnz)) {
            throw ParseError(path, lineno, "bad coordinate size line");
        }
    } else {
        if (!(size_line >> nrows >> ncols)) {
            throw ParseError(path, lineno, "bad array size line");
        }
    }
    MatrixF m(nrows, ncols);
    if (coordinate) {
        std::size_t seen = 0;
        while (seen < nnz) {
            if (!std::getline(in, line)) {
                throw ParseError(path, lineno, "expected " + std::to_string(nnz) +
                                                   " entries, file ended after " +
                                                   std::to_string(seen));
            }
            ++lineno;
            if (line.empty() || line[0] == '%') continue;
            std::istringstream entry(line);
            std::size_t i, j;
            double v;
            if (!(entry >> i >> j >> v)) {
                throw ParseError(path, lineno, "bad coordinate entry");
            }
            if (i < 1 || i > nrows || j < 1 || j > ncols) {
                throw ParseError(path, lineno, "coordinate out of range");
            }
            if (!std::isfinite(v)) throw ParseError(path, lineno, "non-finite entry");
            m(i - 1, j - 1) = v;
            ++seen;
        }
    } else {
        // Array variant stores column-major dense values.
        for (std::size_t j = 0; j < ncols; ++j) {
            for (std::size_t i = 0; i < nrows; ++i) {
                double v;
                if (!(in >> v)) {
                    throw ParseError(path, lineno, "array data ended early");
                }
                if (!std::isfinite(v)) throw ParseError(path, lineno, "non-finite entry");
                m(i, j) = v;
            }
        }
    }
    return m;
}

}  // namespace

MatrixF load_matrix(const std::string& path, MatrixFormat format, bool skip_header) {
    switch (format) {
        case MatrixFormat::csv: return load_csv(path, skip_header);
        case MatrixFormat::matrix_market: return load_matrix_market(path);
    }
    throw std::logic_error("unreachable matrix format");
}

void save_csv(const MatrixF& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[64];
    for (MatrixF::Index i = 0; i < m.rows(); ++i) {
        for (MatrixF::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out << buf;
            if (j + 1 < m.cols()) out << ',';
        }
        out << '\n';
    }
}

MatrixFormat format_from_name(const std::string& name) {
    if (name == "csv") return MatrixFormat::csv;
    if (name == "mm" || name == "matrix-market") return MatrixFormat::matrix_market;
    throw std::invalid_argument("unknown matrix format '" + name + "'");
}

}  // namespace lpsum
