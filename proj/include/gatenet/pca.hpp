#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gatenet/matrix.hpp"

namespace gatenet {

/// Top-2 principal-component decomposition of row vectors.
/// Directions carry a deterministic sign: first nonzero coordinate positive.
struct Pca2d {
  std::vector<double> mean;        ///< column means, length d
  Matrix components;               ///< d x 2, descending eigenvalue order
  std::vector<double> eigenvalues; ///< length 2
  Matrix projected;                ///< n x 2 mean-centered projection
};

/// Eigen-decomposition of the sample covariance via cyclic Jacobi sweeps.
/// Requires >= 2 rows and >= 2 columns; throws std::domain_error when the
/// covariance is identically zero.
Pca2d pca_2d(const Matrix& x);

struct PcaRow {
  std::string id;
  int label = 0;
  double pc1 = 0.0;
  double pc2 = 0.0;
  int epoch = 0;
};

/// CSV with header id,label,pc1,pc2,epoch.
void write_pca_csv(const std::filesystem::path& path,
                   const std::vector<PcaRow>& rows);

}  // namespace gatenet
