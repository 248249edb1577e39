#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bamg/sparse.hpp"

namespace bamg {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw IoError(path.string() + ": expected a MatrixMarket coordinate matrix");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "double" && field != "integer") {
    throw IoError(path.string() + ": unsupported field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric") {
    throw IoError(path.string() + ": unsupported symmetry '" + symmetry + "'");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  Index nrows = 0, ncols = 0, nnz = 0;
  if (!(size_line >> nrows >> ncols >> nnz)) throw IoError(path.string() + ": bad size line");
  std::vector<Triplet> entries;
  entries.reserve(symmetry == "symmetric" ? 2 * nnz : nnz);
  for (Index k = 0; k < nnz; ++k) {
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError(path.string() + ": truncated entry list");
    if (i == 0 || j == 0 || i > nrows || j > ncols) {
      throw IoError(path.string() + ": index out of range at entry " + std::to_string(k + 1));
    }
    entries.push_back({i - 1, j - 1, v});
    if (symmetry == "symmetric" && i != j) entries.push_back({j - 1, i - 1, v});
  }
  return SparseMatrix::from_triplets(nrows, ncols, std::move(entries));
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write " + path.string());
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%zu %zu %zu\n", m.rows(), m.cols(), m.nnz());
  for (Index i = 0; i < m.rows(); ++i) {
    const auto c = m.row_cols(i);
    const auto v = m.row_values(i);
    for (Index k = 0; k < c.size(); ++k) std::fprintf(f, "%zu %zu %.17g\n", i + 1, c[k] + 1, v[k]);
  }
  if (std::fclose(f) != 0) throw IoError("failed writing " + path.string());
}

}  // namespace bamg
