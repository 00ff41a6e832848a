#include "gatenet/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gatenet/kernels.hpp"
#include "gatenet/nn_ops.hpp"

namespace gatenet::nn {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return (int)nodes_.size() - 1;
}

Tape::Node& Tape::at(int id) {
  if (id < 0 || (size_t)id >= nodes_.size())
    throw std::out_of_range("tape: bad node id");
  return nodes_[id];
}

const Tape::Node& Tape::at(int id) const {
  if (id < 0 || (size_t)id >= nodes_.size())
    throw std::out_of_range("tape: bad node id");
  return nodes_[id];
}

int Tape::constant(Matrix m) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(m);
  return push(std::move(n));
}

int Tape::param(const Matrix& m) {
  Node n;
  n.op = Op::Param;
  n.value = m;
  n.needs_grad = true;
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  require(va.cols() == vb.rows(), "tape matmul: inner dimensions differ");
  Node n;
  n.op = Op::MatMul;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = Matrix(va.rows(), vb.cols());
  kernels::active().gemm_nn(va.data(), vb.data(), n.value.data(), va.rows(),
                            va.cols(), vb.cols(), false);
  return push(std::move(n));
}

int Tape::matmul_zskip(int a, int b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  require(at(a).op == Op::Constant,
          "tape matmul_zskip: left factor must be a constant");
  require(va.rows() == va.cols(), "tape matmul_zskip: left factor must be square");
  require(va.cols() == vb.rows(), "tape matmul_zskip: inner dimensions differ");
  Node n;
  n.op = Op::MatMulZskip;
  n.a = a;
  n.b = b;
  n.needs_grad = at(b).needs_grad;
  n.value = Matrix(va.rows(), vb.cols());
  kernels::active().gemm_zskip(va.data(), vb.data(), n.value.data(), va.rows(),
                               va.cols(), vb.cols(), false);
  return push(std::move(n));
}

int Tape::relu(int a) {
  const Matrix& va = at(a).value;
  Node n;
  n.op = Op::Relu;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = Matrix(va.rows(), va.cols());
  kernels::active().relu(va.data(), n.value.data(), va.size());
  return push(std::move(n));
}

int Tape::add_row_vec(int a, int b) {
  const Matrix& va = at(a).value;
  const Matrix& vb = at(b).value;
  require(vb.rows() == 1 && vb.cols() == va.cols(),
          "tape add_row_vec: b must be 1 x cols(a)");
  Node n;
  n.op = Op::AddRowVec;
  n.a = a;
  n.b = b;
  n.needs_grad = at(a).needs_grad || at(b).needs_grad;
  n.value = va;
  for (int i = 0; i < va.rows(); ++i)
    kernels::active().axpy(1.0, vb.data(), n.value.data() + (size_t)i * va.cols(),
                           (size_t)va.cols());
  return push(std::move(n));
}

int Tape::mean_pool_rows(int a) {
  const Matrix& va = at(a).value;
  require(va.rows() >= 1, "tape mean_pool_rows: empty input");
  Node n;
  n.op = Op::MeanPoolRows;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = Matrix(1, va.cols());
  for (int i = 0; i < va.rows(); ++i)
    for (int j = 0; j < va.cols(); ++j) n.value.at(0, j) += va.at(i, j);
  const double inv = 1.0 / (double)va.rows();
  kernels::active().scale(inv, n.value.data(), n.value.size());
  return push(std::move(n));
}

int Tape::l2_normalize_row(int a) {
  const Matrix& va = at(a).value;
  require(va.rows() == 1, "tape l2_normalize_row: input must be one row");
  const double n2 =
      kernels::active().dot(va.data(), va.data(), (size_t)va.cols());
  if (n2 == 0.0)
    throw std::domain_error("tape l2_normalize_row: zero vector");
  Node n;
  n.op = Op::L2NormalizeRow;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = va;
  kernels::active().scale(1.0 / std::sqrt(n2), n.value.data(),
                          n.value.size());
  return push(std::move(n));
}

int Tape::sigmoid(int a) {
  const Matrix& va = at(a).value;
  Node n;
  n.op = Op::Sigmoid;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = Matrix(va.rows(), va.cols());
  for (size_t i = 0; i < va.size(); ++i)
    n.value.data()[i] = nn::sigmoid(va.data()[i]);
  return push(std::move(n));
}

int Tape::stack_rows(const std::vector<int>& rows) {
  require(!rows.empty(), "tape stack_rows: no rows");
  const int cols = at(rows[0]).value.cols();
  Node n;
  n.op = Op::StackRows;
  n.srcs = rows;
  n.value = Matrix((int)rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    const Matrix& r = at(rows[i]).value;
    require(r.rows() == 1 && r.cols() == cols,
            "tape stack_rows: rows must all be 1 x same-cols");
    std::copy(r.data(), r.data() + cols, n.value.data() + i * (size_t)cols);
    n.needs_grad = n.needs_grad || at(rows[i]).needs_grad;
  }
  return push(std::move(n));
}

int Tape::supcon_loss(int z, std::vector<int> labels, double tau) {
  const Matrix& vz = at(z).value;
  require((size_t)vz.rows() == labels.size(),
          "tape supcon_loss: labels length mismatch");
  Node n;
  n.op = Op::SupConLoss;
  n.a = z;
  n.labels = std::move(labels);
  n.tau = tau;
  n.needs_grad = at(z).needs_grad;
  n.value = Matrix(1, 1);
  n.value.at(0, 0) = nn::supcon_loss(vz, n.labels, tau);
  return push(std::move(n));
}

int Tape::bce_loss(int yhat, std::vector<double> targets) {
  const Matrix& vy = at(yhat).value;
  require(vy.cols() == 1, "tape bce_loss: predictions must be a column");
  require((size_t)vy.rows() == targets.size(),
          "tape bce_loss: targets length mismatch");
  Node n;
  n.op = Op::BceLoss;
  n.a = yhat;
  n.targets = std::move(targets);
  n.needs_grad = at(yhat).needs_grad;
  n.value = Matrix(1, 1);
  std::vector<double> col(vy.data(), vy.data() + vy.rows());
  n.value.at(0, 0) = nn::bce_loss(col, n.targets);
  return push(std::move(n));
}

int Tape::half_sum_squares(int a) {
  const Matrix& va = at(a).value;
  Node n;
  n.op = Op::HalfSumSquares;
  n.a = a;
  n.needs_grad = at(a).needs_grad;
  n.value = Matrix(1, 1);
  n.value.at(0, 0) =
      0.5 * kernels::active().dot(va.data(), va.data(), va.size());
  return push(std::move(n));
}

const Matrix& Tape::value(int id) const { return at(id).value; }

double Tape::scalar(int id) const {
  const Matrix& v = at(id).value;
  require(v.rows() == 1 && v.cols() == 1, "tape scalar: node is not 1x1");
  return v.at(0, 0);
}

Matrix& Tape::grad_buf(int id) {
  Node& n = at(id);
  if (n.grad.rows() == 0) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

const Matrix& Tape::grad(int id) const {
  const Node& n = at(id);
  require(n.needs_grad, "tape grad: node does not require gradients");
  require(n.grad.rows() != 0, "tape grad: run backward first");
  return n.grad;
}

void Tape::backward(int loss) {
  const Node& ln = at(loss);
  require(ln.value.rows() == 1 && ln.value.cols() == 1,
          "tape backward: loss must be 1x1");
  require(ln.needs_grad, "tape backward: loss does not depend on any param");
  for (int i = 0; i <= loss; ++i)
    if (nodes_[i].needs_grad) grad_buf(i);
  grad_buf(loss).at(0, 0) = 1.0;

  const auto& ops = kernels::active();
  for (int i = loss; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::Constant:
      case Op::Param:
        break;
      case Op::MatMul: {
        const Matrix& va = at(n.a).value;
        const Matrix& vb = at(n.b).value;
        if (at(n.a).needs_grad)
          ops.gemm_nt(g.data(), vb.data(), grad_buf(n.a).data(), g.rows(),
                      g.cols(), vb.rows(), true);
        if (at(n.b).needs_grad)
          ops.gemm_tn(va.data(), g.data(), grad_buf(n.b).data(), va.cols(),
                      va.rows(), g.cols(), true);
        break;
      }
      case Op::MatMulZskip: {
        // left factor is constant and symmetric, so d(b) = s * g
        const Matrix& vs = at(n.a).value;
        if (at(n.b).needs_grad)
          ops.gemm_zskip(vs.data(), g.data(), grad_buf(n.b).data(), vs.rows(),
                         vs.cols(), g.cols(), true);
        break;
      }
      case Op::Relu:
        ops.relu_backward(n.value.data(), g.data(), grad_buf(n.a).data(),
                          n.value.size());
        break;
      case Op::AddRowVec: {
        if (at(n.a).needs_grad)
          ops.axpy(1.0, g.data(), grad_buf(n.a).data(), g.size());
        if (at(n.b).needs_grad) {
          Matrix& db = grad_buf(n.b);
          for (int r = 0; r < g.rows(); ++r)
            ops.axpy(1.0, g.data() + (size_t)r * g.cols(), db.data(),
                     (size_t)g.cols());
        }
        break;
      }
      case Op::MeanPoolRows: {
        Matrix& da = grad_buf(n.a);
        const double inv = 1.0 / (double)da.rows();
        for (int r = 0; r < da.rows(); ++r)
          ops.axpy(inv, g.data(), da.data() + (size_t)r * da.cols(),
                   (size_t)da.cols());
        break;
      }
      case Op::L2NormalizeRow: {
        const Matrix& va = at(n.a).value;
        const double norm =
            std::sqrt(ops.dot(va.data(), va.data(), (size_t)va.cols()));
        const double gy = ops.dot(g.data(), n.value.data(), (size_t)g.cols());
        Matrix& da = grad_buf(n.a);
        for (int j = 0; j < g.cols(); ++j)
          da.at(0, j) += (g.at(0, j) - gy * n.value.at(0, j)) / norm;
        break;
      }
      case Op::Sigmoid: {
        Matrix& da = grad_buf(n.a);
        for (size_t k = 0; k < g.size(); ++k) {
          const double y = n.value.data()[k];
          da.data()[k] += g.data()[k] * y * (1.0 - y);
        }
        break;
      }
      case Op::StackRows: {
        for (size_t r = 0; r < n.srcs.size(); ++r)
          if (at(n.srcs[r]).needs_grad)
            ops.axpy(1.0, g.data() + r * (size_t)g.cols(),
                     grad_buf(n.srcs[r]).data(), (size_t)g.cols());
        break;
      }
      case Op::SupConLoss: {
        const Matrix& z = at(n.a).value;
        const int m = z.rows();
        const double gs = g.at(0, 0);
        Matrix w(m, m);
        std::vector<double> sim(m);
        for (int r = 0; r < m; ++r) {
          int npos = 0;
          for (int c = 0; c < m; ++c)
            if (c != r && n.labels[c] == n.labels[r]) ++npos;
          if (npos == 0) continue;
          double mx = -1e300;
          for (int c = 0; c < m; ++c) {
            if (c == r) continue;
            sim[c] = ops.dot(z.row(r), z.row(c), (size_t)z.cols()) / n.tau;
            mx = std::max(mx, sim[c]);
          }
          double denom = 0.0;
          for (int c = 0; c < m; ++c)
            if (c != r) denom += std::exp(sim[c] - mx);
          for (int c = 0; c < m; ++c) {
            if (c == r) continue;
            double v = std::exp(sim[c] - mx) / denom;
            if (n.labels[c] == n.labels[r]) v -= 1.0 / (double)npos;
            w.at(r, c) = v / n.tau;
          }
        }
        // d(z) = (w + w^T) z
        Matrix wsym(m, m);
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c)
            wsym.at(r, c) = w.at(r, c) + w.at(c, r);
        Matrix dz(m, z.cols());
        ops.gemm_nn(wsym.data(), z.data(), dz.data(), m, m, z.cols(), false);
        ops.axpy(gs, dz.data(), grad_buf(n.a).data(), dz.size());
        break;
      }
      case Op::BceLoss: {
        const Matrix& yhat = at(n.a).value;
        Matrix& da = grad_buf(n.a);
        const double gs = g.at(0, 0);
        const int m = yhat.rows();
        for (int r = 0; r < m; ++r) {
          const double raw = yhat.at(r, 0);
          if (raw < 1e-7 || raw > 1.0 - 1e-7) continue;  // clamp is flat
          da.at(r, 0) +=
              gs * (raw - n.targets[r]) / (raw * (1.0 - raw) * (double)m);
        }
        break;
      }
      case Op::HalfSumSquares: {
        const Matrix& va = at(n.a).value;
        ops.axpy(g.at(0, 0), va.data(), grad_buf(n.a).data(), va.size());
        break;
      }
    }
  }
}

}  // namespace gatenet::nn
