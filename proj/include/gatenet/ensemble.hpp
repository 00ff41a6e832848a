#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gatenet/baseline_features.hpp"
#include "gatenet/inf.hpp"

namespace gatenet {

/// Binary decision tree stored as a flat node array. feature == -1 marks a
/// leaf; interior nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;

  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  int predict(const std::vector<double>& x) const;
  bool operator==(const DecisionTree&) const = default;
};

struct GaussianNb {
  std::vector<double> prior;              ///< per class
  std::vector<std::vector<double>> mean;  ///< [class][feature]
  std::vector<std::vector<double>> var;

  int predict(const std::vector<double>& x) const;
  bool operator==(const GaussianNb&) const = default;
};

struct Stump {
  int feature = 0;
  double threshold = 0.0;
  int polarity = 1;  ///< class in {-1,+1} assigned to x[feature] <= threshold
  double alpha = 0.0;

  bool operator==(const Stump&) const = default;
};

struct AdaBoost {
  std::vector<Stump> stumps;

  int predict(const std::vector<double>& x) const;
  bool operator==(const AdaBoost&) const = default;
};

/// Baseline net classifier. kurihara9 votes with the forest alone; hoque10
/// takes the majority of forest, naive Bayes, and boosting.
struct EnsembleModel {
  std::string scheme;
  std::vector<DecisionTree> forest;
  GaussianNb nb;
  AdaBoost boost;

  int predict(const std::vector<double>& x) const;
  bool operator==(const EnsembleModel&) const = default;
};

struct EnsembleConfig {
  int trees = 100;
  uint64_t seed = 0;
};

/// Bootstrap-bagged gini forest + Gaussian naive Bayes + stump boosting,
/// all on the same rows. Throws if only one class is present.
EnsembleModel train_ensemble(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& y,
                             const EnsembleConfig& cfg,
                             const std::string& scheme);

/// INF verdict: trigger iff strictly more than `frac` of its nodes' feature
/// rows are classified as trigger nets. `features` must cover every INF node.
int classify_inf_by_net_votes(const EnsembleModel& model, const InfGraph& inf,
                              const std::vector<NetFeatureVector>& features,
                              double frac = 0.05);

void save_ensemble(const std::filesystem::path& path,
                   const EnsembleModel& model);
EnsembleModel load_ensemble(const std::filesystem::path& path);

}  // namespace gatenet
