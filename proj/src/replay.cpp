#include "abrsim/replay.hpp"

#include <algorithm>
#include <cmath>

namespace abrsim {

SumTree::SumTree(std::size_t leaves) : leaves_(leaves) {
  if (leaves == 0) throw ValidationError("SumTree: need at least one leaf");
  base_ = 1;
  while (base_ < leaves) base_ <<= 1;
  nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t leaf, double value) {
  if (leaf >= leaves_) throw ValidationError("SumTree: leaf out of range");
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ValidationError("SumTree: value must be finite and non-negative");
  std::size_t i = base_ + leaf;
  const double delta = value - nodes_[i];
  for (; i >= 1; i >>= 1) nodes_[i] += delta;
  nodes_[base_ + leaf] = value;  // keep the leaf exact
}

std::size_t SumTree::find(double mass) const {
  std::size_t i = 1;
  while (i < base_) {
    const std::size_t left = 2 * i;
    if (mass < nodes_[left]) {
      i = left;
    } else {
      mass -= nodes_[left];
      i = left + 1;
    }
  }
  std::size_t leaf = i - base_;
  if (leaf >= leaves_) leaf = leaves_ - 1;  // rounding landed past the last leaf
  return leaf;
}

double SumTree::recompute_total() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < leaves_; ++i) sum += nodes_[base_ + i];
  return sum;
}

PerBuffer::PerBuffer(std::size_t capacity, double alpha, double eps)
    : capacity_(capacity), alpha_(alpha), eps_(eps), tree_(capacity) {
  if (capacity == 0) throw ValidationError("PerBuffer: capacity must be positive");
  if (alpha < 0.0) throw ValidationError("PerBuffer: alpha must be non-negative");
  if (!(eps > 0.0)) throw ValidationError("PerBuffer: eps must be positive");
  storage_.resize(capacity);
  priorities_.assign(capacity, 0.0);
}

void PerBuffer::insert(const Transition& t) {
  storage_[next_] = t;
  priorities_[next_] = max_priority_;
  tree_.set(next_, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

double PerBuffer::priority_of(std::size_t index) const {
  if (index >= size_) throw ValidationError("PerBuffer: index out of range");
  return priorities_[index];
}

PerSample PerBuffer::sample(std::size_t n, double beta, Rng& rng) const {
  if (size_ == 0) throw ValidationError("PerBuffer: sample from empty buffer");
  if (n == 0) throw ValidationError("PerBuffer: sample size must be positive");
  PerSample out;
  out.indices.resize(n);
  out.transitions.resize(n);
  out.is_weights.resize(static_cast<long>(n));

  const double total = tree_.total();
  const double stratum = total / static_cast<double>(n);
  const double N = static_cast<double>(size_);
  double max_w = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mass = (static_cast<double>(k) + rng.uniform()) * stratum;
    std::size_t idx = tree_.find(std::min(mass, total * (1.0 - 1e-12)));
    if (idx >= size_) idx = size_ - 1;
    out.indices[k] = idx;
    out.transitions[k] = storage_[idx];
    const double p = tree_.get(idx) / total;
    const double w = std::pow(N * std::max(p, 1e-300), -beta);
    out.is_weights(static_cast<long>(k)) = w;
    max_w = std::max(max_w, w);
  }
  if (max_w > 0.0) out.is_weights /= max_w;
  return out;
}

void PerBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                  const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size())
    throw ValidationError("PerBuffer: indices/td_errors size mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t idx = indices[k];
    if (idx >= size_) throw ValidationError("PerBuffer: update index out of range");
    const double p = std::abs(td_errors[k]) + eps_;
    priorities_[idx] = p;
    tree_.set(idx, std::pow(p, alpha_));
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace abrsim
