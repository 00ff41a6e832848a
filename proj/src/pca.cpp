#include "gatenet/pca.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "gatenet/kernels.hpp"
#include "gatenet/netlist_io.hpp"

namespace gatenet {
namespace {

/// Cyclic Jacobi on a symmetric matrix; returns eigenvalues on a's diagonal
/// and accumulates rotations into v (starts identity).
void jacobi_eigen(Matrix& a, Matrix& v) {
  int d = a.rows();
  v = Matrix(d, d);
  for (int i = 0; i < d; ++i) v.at(i, i) = 1.0;

  double frob = 0;
  for (size_t i = 0; i < a.size(); ++i) frob += a.data()[i] * a.data()[i];
  frob = std::sqrt(frob);
  const double stop = 1e-14 * frob;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += a.at(p, q) * a.at(p, q);
    if (std::sqrt(2 * off) <= stop) break;

    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double apq = a.at(p, q);
        if (apq == 0.0) continue;
        double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < d; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < d; ++k) {
          double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

Pca2d pca_2d(const Matrix& x) {
  int n = x.rows(), d = x.cols();
  if (n < 2) throw std::invalid_argument("pca_2d: need at least 2 rows");
  if (d < 2) throw std::invalid_argument("pca_2d: need at least 2 columns");

  Pca2d out;
  out.mean.assign((size_t)d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out.mean[(size_t)j] += x.at(i, j);
  for (double& m : out.mean) m /= (double)n;

  Matrix centered(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      centered.at(i, j) = x.at(i, j) - out.mean[(size_t)j];

  Matrix cov(d, d);
  kernels::active().gemm_tn(centered.data(), centered.data(), cov.data(), d, n,
                            d, false);
  for (size_t i = 0; i < cov.size(); ++i) cov.data()[i] /= (double)(n - 1);

  double frob = 0;
  for (size_t i = 0; i < cov.size(); ++i) frob += cov.data()[i] * cov.data()[i];
  if (frob == 0.0) throw std::domain_error("pca_2d: rank-0 input");

  Matrix v;
  jacobi_eigen(cov, v);

  std::vector<int> order((size_t)d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cov.at(a, a) > cov.at(b, b); });

  out.components = Matrix(d, 2);
  out.eigenvalues.resize(2);
  for (int k = 0; k < 2; ++k) {
    int col = order[(size_t)k];
    out.eigenvalues[(size_t)k] = cov.at(col, col);
    double sign = 1.0;
    for (int i = 0; i < d; ++i) {
      if (v.at(i, col) != 0.0) {
        sign = v.at(i, col) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (int i = 0; i < d; ++i) out.components.at(i, k) = sign * v.at(i, col);
  }

  out.projected = Matrix(n, 2);
  kernels::active().gemm_nn(centered.data(), out.components.data(),
                            out.projected.data(), n, d, 2, false);
  return out;
}

void write_pca_csv(const std::filesystem::path& path,
                   const std::vector<PcaRow>& rows) {
  std::string out = "id,label,pc1,pc2,epoch\n";
  char buf[96];
  for (const PcaRow& r : rows) {
    snprintf(buf, sizeof buf, ",%d,%.9f,%.9f,%d\n", r.label, r.pc1, r.pc2,
             r.epoch);
    out += r.id;
    out += buf;
  }
  write_file_atomic(path, out);
}

}  // namespace gatenet
