#include "accurt/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace accurt {

namespace {

std::string lowercase(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.size() << ' ' << a.size() << ' ' << a.nonzeros() << '\n';
  const auto off = a.row_offsets();
  const auto col = a.col_indices();
  const auto val = a.values();
  char buf[64];
  for (Index i = 0; i < a.size(); ++i) {
    for (int p = off[i]; p < off[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", val[p]);
      out << i + 1 << ' ' << col[p] + 1 << ' ' << buf << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_matrix_market(out, a);
  if (!out) throw Error("failed writing " + path.string());
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("matrix market: empty input");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lowercase(object) != "matrix" ||
      lowercase(format) != "coordinate") {
    throw Error("matrix market: expected a coordinate matrix banner, got '" + line + "'");
  }
  field = lowercase(field);
  symmetry = lowercase(symmetry);
  if ((field != "real" && field != "integer") || symmetry != "general") {
    throw Error("matrix market: only real general matrices are supported");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] != '%') break;
  }
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz) || rows < 0 || nnz < 0) {
      throw Error("matrix market: bad size line " + std::to_string(line_no));
    }
  }
  if (rows != cols) throw DimensionError("matrix market: matrix is not square");

  std::vector<Triplet> entries;
  entries.reserve(nnz);
  while (static_cast<long>(entries.size()) < nnz && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream row(line);
    long i = 0, j = 0;
    double v = 0.0;
    if (!(row >> i >> j >> v)) {
      throw Error("matrix market: malformed entry on line " + std::to_string(line_no));
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw Error("matrix market: index out of range on line " + std::to_string(line_no));
    }
    entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
  }
  if (static_cast<long>(entries.size()) != nnz) {
    throw Error("matrix market: expected " + std::to_string(nnz) + " entries, found " +
                std::to_string(entries.size()));
  }
  return SparseMatrix::from_triplets(rows, entries);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_matrix_market(in);
}

}  // namespace accurt
