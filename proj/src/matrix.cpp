#include "gatenet/matrix.hpp"

#include <cmath>

namespace gatenet {

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m((int)rows.size(), rows.size() ? (int)rows.begin()->size() : 0);
  int r = 0;
  for (const auto& row : rows) {
    if ((int)row.size() != m.cols())
      throw std::invalid_argument("ragged initializer");
    int c = 0;
    for (double v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace gatenet
