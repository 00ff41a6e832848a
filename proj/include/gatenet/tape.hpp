#pragma once

#include <vector>

#include "gatenet/matrix.hpp"

namespace gatenet::nn {

/// Reverse-mode tape covering exactly the operations the training stacks
/// need. Values are computed eagerly as nodes are recorded; backward() walks
/// the records in reverse and accumulates adjoints into every node reachable
/// from a Param.
class Tape {
 public:
  int constant(Matrix m);
  int param(const Matrix& m);

  int matmul(int a, int b);
  /// Same product, but the forward (and the adjoint of b) skip zero entries
  /// of value(a). Meant for the sparse normalized-adjacency factor, which is
  /// symmetric; a must be a constant square matrix.
  int matmul_zskip(int a, int b);
  int relu(int a);
  int add_row_vec(int a, int b);  ///< b is 1 x cols, broadcast over rows
  int mean_pool_rows(int a);      ///< 1 x cols
  int l2_normalize_row(int a);    ///< a is 1 x cols
  int sigmoid(int a);
  int stack_rows(const std::vector<int>& rows);  ///< each 1 x cols
  int supcon_loss(int z, std::vector<int> labels, double tau);
  int bce_loss(int yhat, std::vector<double> targets);  ///< yhat is m x 1
  int half_sum_squares(int a);  ///< 0.5 * sum of squared entries

  const Matrix& value(int id) const;
  double scalar(int id) const;  ///< value of a 1x1 node

  /// Seeds d(loss)/d(loss)=1 and accumulates adjoints; loss must be 1x1.
  void backward(int loss);
  /// Adjoint of a node after backward(); zero matrix if the node was not
  /// reached.
  const Matrix& grad(int id) const;

 private:
  enum class Op {
    Constant,
    Param,
    MatMul,
    MatMulZskip,
    Relu,
    AddRowVec,
    MeanPoolRows,
    L2NormalizeRow,
    Sigmoid,
    StackRows,
    SupConLoss,
    BceLoss,
    HalfSumSquares,
  };
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    std::vector<int> srcs;        // StackRows
    std::vector<int> labels;      // SupConLoss
    std::vector<double> targets;  // BceLoss
    double tau = 0.0;
  };
  int push(Node n);
  Node& at(int id);
  const Node& at(int id) const;
  Matrix& grad_buf(int id);

  std::vector<Node> nodes_;
};

}  // namespace gatenet::nn
