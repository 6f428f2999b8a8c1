#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "accurt/sparse_matrix.hpp"

namespace accurt {

/// Matrix Market "coordinate real general" files. Values are written with 17
/// significant digits so reading them back restores every bit.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);

SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace accurt
