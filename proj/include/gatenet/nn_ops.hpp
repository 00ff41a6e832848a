#pragma once

#include <utility>
#include <vector>

#include "gatenet/circuit.hpp"
#include "gatenet/inf.hpp"
#include "gatenet/matrix.hpp"

namespace gatenet::nn {

/// Symmetric degree-normalized adjacency with self-loops over local indices:
/// D^{-1/2} (A or A^T or I) D^{-1/2}.
Matrix normalize_adjacency(int dim,
                           const std::vector<std::pair<int, int>>& edges);
Matrix normalize_adjacency(const AdjacencyMatrix& a);

/// Same, with the graph's source-circuit ids mapped to local indices.
Matrix inf_normalized_adjacency(const InfGraph& inf);

/// n x 9 one-hot cell-type features, rows in inf.nodes order.
Matrix inf_one_hot(const InfGraph& inf);

Matrix matmul(const Matrix& a, const Matrix& b);

/// ReLU(S * H * theta).
Matrix gcn_layer_forward(const Matrix& h, const Matrix& s,
                         const Matrix& theta);

std::vector<double> mean_pool(const Matrix& h);

/// v / ||v||; throws std::domain_error on the zero vector.
std::vector<double> l2_normalize(const std::vector<double>& v);

/// Supervised contrastive loss over unit-vector rows of z, summed over
/// anchors; anchors with no same-class partner contribute 0.
double supcon_loss(const Matrix& z, const std::vector<int>& labels,
                   double tau);

/// Mean binary cross-entropy with predictions clamped to [1e-7, 1-1e-7].
double bce_loss(const std::vector<double>& yhat, const std::vector<double>& y);

double sigmoid(double x);

}  // namespace gatenet::nn
