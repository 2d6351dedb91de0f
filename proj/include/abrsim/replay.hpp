#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "abrsim/common.hpp"
#include "abrsim/types.hpp"

namespace abrsim {

/// Flat binary sum tree over a fixed number of leaves. Values must stay
/// non-negative; the root tracks their sum under incremental updates.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves);

  void set(std::size_t leaf, double value);
  double get(std::size_t leaf) const { return nodes_[base_ + leaf]; }
  double total() const { return nodes_[1]; }
  std::size_t leaves() const { return leaves_; }

  /// Leaf whose cumulative prefix interval contains `mass` in [0, total).
  std::size_t find(double mass) const;

  /// Exact recomputation of the root from the leaves (test oracle).
  double recompute_total() const;

 private:
  std::size_t leaves_;
  std::size_t base_;  // index of first leaf node
  std::vector<double> nodes_;
};

struct Transition {
  Observation s = Observation::Zero();
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  double r = 0.0;
  Observation s2 = Observation::Zero();
  bool done = false;
};

struct PerSample {
  std::vector<std::size_t> indices;
  std::vector<Transition> transitions;
  Eigen::VectorXd is_weights;
};

/// Proportional prioritized replay: sampling probability p_i^alpha / sum,
/// importance weights (N * P(i))^-beta normalized by the batch maximum.
class PerBuffer {
 public:
  explicit PerBuffer(std::size_t capacity = 1u << 17, double alpha = 0.6, double eps = 1e-6);

  /// New transitions enter at the running maximum priority.
  void insert(const Transition& t);

  PerSample sample(std::size_t n, double beta, Rng& rng) const;

  /// p_i = |td_error_i| + eps for the sampled batch.
  void update_priorities(const std::vector<std::size_t>& indices,
                         const std::vector<double>& td_errors);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double alpha() const { return alpha_; }
  double max_priority() const { return max_priority_; }
  const SumTree& tree() const { return tree_; }
  double priority_of(std::size_t index) const;

 private:
  std::size_t capacity_;
  double alpha_;
  double eps_;
  double max_priority_ = 1.0;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> storage_;
  std::vector<double> priorities_;  // raw p_i (before alpha)
  SumTree tree_;                    // stores p_i^alpha
};

}  // namespace abrsim
