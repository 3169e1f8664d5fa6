#pragma once

#include <string>

#include "rsvd/dense_matrix.hpp"

namespace rsvd {

enum class MatrixFormat { MatrixMarketArray, RawF64, Ppm };

// Accepts "mm", "matrixmarket", "mtx", "raw", "rawf64", "ppm".
MatrixFormat matrix_format_from_name(const std::string& name);
const char* matrix_format_name(MatrixFormat format);

// Loads a dense matrix. Malformed input raises FormatError whose byte
// offset points at the offending byte; truncation points at the file end.
// The PPM reader stacks the R, G, B planes of an h x w image vertically
// into a 3h x w matrix with values on the [0, 255] scale.
DenseMatrix load_matrix(const std::string& path, MatrixFormat format);

// Writes the matrix in the given format. PPM output needs a row count
// divisible by 3 and clamps values to [0, 255] before rounding.
void save_matrix(const DenseMatrix& a, const std::string& path,
                 MatrixFormat format);

}  // namespace rsvd
