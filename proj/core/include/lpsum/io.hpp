#pragma once

#include <string>

#include "lpsum/matrix.hpp"

namespace lpsum {

enum class MatrixFormat { csv, matrix_market };

/// Parse error carrying the 1-based line number of the offending input line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Load a dense matrix from a CSV file (comma separated, no header unless
/// skip_header) or a Matrix Market file (`coordinate` and `array` variants of
/// `matrix ... real general`). Ragged rows, unparsable fields, and non-finite
/// entries raise ParseError with the line number.
MatrixF load_matrix(const std::string& path, MatrixFormat format,
                    bool skip_header = false);

/// Write CSV with 17 significant digits, so load_matrix reads it back
/// bit-identically.
void save_csv(const MatrixF& m, const std::string& path);

MatrixFormat format_from_name(const std::string& name);  // "csv" | "mm"

}  // namespace lpsum
