#pragma once

#include "tilepath/types.hpp"

#include <string>

namespace tilepath {

/// I/O failure (missing file, malformed content).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix files come in two formats, auto-detected on load:
///  - CSV: row-major, comma-separated, no header;
///  - binary: magic "TPTH", u32 rows, u32 cols, then rows*cols f64 values
///    row-major, all little-endian.
Matrix load_matrix(const std::string& path);
void save_matrix_csv(const std::string& path, const Matrix& m);
void save_matrix_binary(const std::string& path, const Matrix& m);

/// A vector file is a single-row or single-column matrix.
Vector load_vector(const std::string& path);

std::string format_double(double v);  // shortest round-trip formatting

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tilepath
