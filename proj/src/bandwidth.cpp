#include "abrsim/bandwidth.hpp"

#include <Eigen/Cholesky>
#include <numeric>

namespace abrsim {

bool SlidingWindowEstimator::record_chunk(const ChunkDownload& d) {
  if (!(d.size_mb > 0.0) || !(d.download_time_s > 0.0) || d.idle_wait_s < 0.0)
    throw ValidationError("record_chunk: invalid chunk download record");
  if (d.idle_wait_s > idle_discard_frac_ * d.download_time_s) return false;
  samples_.push_back(d.size_mb / d.download_time_s);
  while (static_cast<int>(samples_.size()) > window_) samples_.pop_front();
  return true;
}

double SlidingWindowEstimator::measure_mbps() const {
  if (samples_.empty()) throw ValidationError("measure: no accepted throughput samples");
  const double sum = std::accumulate(samples_.begin(), samples_.end(), 0.0);
  return sum / static_cast<double>(samples_.size());
}

RlsFilter::RlsFilter(int order, double forgetting, double delta)
    : order_(order), forgetting_(forgetting), delta_(delta) {
  if (order < 1) throw ValidationError("RlsFilter: order must be >= 1");
  if (!(forgetting > 0.0) || forgetting > 1.0)
    throw ValidationError("RlsFilter: forgetting factor must lie in (0, 1]");
  weights_ = Eigen::VectorXd::Zero(order_);
  weights_(0) = 1.0;
  history_ = Eigen::VectorXd::Zero(order_);
  reinitialize_covariance();
}

void RlsFilter::reinitialize_covariance() {
  inv_corr_ = Eigen::MatrixXd::Identity(order_, order_) / delta_;
}

void RlsFilter::set_state(const Eigen::VectorXd& weights, const Eigen::VectorXd& history) {
  if (weights.size() != order_ || history.size() != order_)
    throw ValidationError("RlsFilter: state size mismatch");
  weights_ = weights;
  history_ = history;
  have_history_ = true;
}

double RlsFilter::predict_mbps() const {
  if (!have_history_) throw ValidationError("RlsFilter: predict before any measurement");
  const double p = weights_.dot(history_);
  return p < kPredictionFloorMbps ? kPredictionFloorMbps : p;
}

double RlsFilter::update(double actual_mbps) {
  if (!have_history_) {
    history_.setConstant(actual_mbps);  // pad until `order` real measurements exist
    have_history_ = true;
  }
  const Eigen::VectorXd x = history_;
  const double err = actual_mbps - weights_.dot(x);

  const Eigen::VectorXd px = inv_corr_ * x;
  const double denom = forgetting_ + x.dot(px);
  const Eigen::VectorXd gain = px / denom;
  weights_ += gain * err;
  inv_corr_ = (inv_corr_ - gain * px.transpose()) / forgetting_;
  // Symmetrize, then recover from any numeric loss of positive definiteness.
  inv_corr_ = ((inv_corr_ + inv_corr_.transpose()) * 0.5).eval();
  if (!inv_corr_.allFinite() ||
      Eigen::LLT<Eigen::MatrixXd>(inv_corr_).info() != Eigen::Success) {
    reinitialize_covariance();
  }

  // Shift the new measurement into the history ring.
  for (int i = order_ - 1; i > 0; --i) history_(i) = history_(i - 1);
  history_(0) = actual_mbps;
  return err;
}

}  // namespace abrsim
