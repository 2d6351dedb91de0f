#pragma once

#include <Eigen/Dense>
#include <deque>

#include "abrsim/common.hpp"

namespace abrsim {

/// One finished chunk transfer. idle_wait is time spent waiting for the
/// chunk to become available at the source before bytes could flow.
struct ChunkDownload {
  double size_mb = 0.0;
  double download_time_s = 0.0;
  double idle_wait_s = 0.0;
};

/// Chunk-based sliding-window moving average of throughput. Samples whose
/// idle share exceeds the discard threshold are production-limited and do
/// not enter the window.
class SlidingWindowEstimator {
 public:
  explicit SlidingWindowEstimator(int window = 10, double idle_discard_frac = 0.1)
      : window_(window), idle_discard_frac_(idle_discard_frac) {}

  /// Returns true when the measurement entered the window.
  bool record_chunk(const ChunkDownload& d);

  /// Arithmetic mean of the window. Throws when no sample was accepted yet.
  double measure_mbps() const;

  bool has_measurement() const { return !samples_.empty(); }
  int sample_count() const { return static_cast<int>(samples_.size()); }

 private:
  int window_;
  double idle_discard_frac_;
  std::deque<double> samples_;
};

/// Recursive-least-squares one-step-ahead predictor over the last `order`
/// bandwidth measurements (newest first). Weights start at [1, 0, ...] so
/// the initial prediction is "same as the last measurement".
class RlsFilter {
 public:
  explicit RlsFilter(int order = 5, double forgetting = 0.999, double delta = 0.01);

  bool ready() const { return have_history_; }

  /// dot(weights, history), clamped to the prediction floor (0.01 Mbps).
  double predict_mbps() const;

  /// One RLS step against the observed measurement; returns the a-priori
  /// prediction error. The first call seeds the history with the
  /// measurement itself.
  double update(double actual_mbps);

  int order() const { return order_; }
  double forgetting() const { return forgetting_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& inverse_correlation() const { return inv_corr_; }
  const Eigen::VectorXd& history() const { return history_; }

  /// Overwrite filter state (e.g. when restoring a saved session).
  void set_state(const Eigen::VectorXd& weights, const Eigen::VectorXd& history);

  static constexpr double kPredictionFloorMbps = 0.01;

 private:
  void reinitialize_covariance();

  int order_;
  double forgetting_;
  double delta_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd inv_corr_;
  Eigen::VectorXd history_;  // history_(0) is the newest measurement
  bool have_history_ = false;
};

}  // namespace abrsim
