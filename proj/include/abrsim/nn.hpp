#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "abrsim/common.hpp"

namespace abrsim::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense network with tanh hidden layers and a linear output layer.
/// Batched evaluation treats matrix columns as samples.
struct Mlp {
  std::vector<int> sizes;       // e.g. {10, 128, 128, 2}
  std::vector<Matrix> weights;  // weights[l] is sizes[l+1] x sizes[l]
  std::vector<Vector> biases;

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
  bool all_finite() const;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init, zero biases.
  static Mlp random(const std::vector<int>& sizes, Rng& rng);
  static Mlp zeros(const std::vector<int>& sizes);
};

/// Per-layer post-activation values recorded by a cached forward pass;
/// acts[0] is the input batch.
struct ForwardCache {
  std::vector<Matrix> acts;
};

Matrix forward(const Mlp& net, const Matrix& x);
Matrix forward(const Mlp& net, const Matrix& x, ForwardCache& cache);
Vector forward(const Mlp& net, const Vector& x);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Gradients zeros_like(const Mlp& net);
  bool all_finite() const;
  void scale(double s);
};

/// Exact reverse-mode gradients for the scalar objective whose derivative
/// w.r.t. the network output batch is `upstream` (output_size x batch).
/// When input_grad is given it receives d(objective)/d(input batch).
Gradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& upstream,
                   Matrix* input_grad = nullptr);

struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;

  static AdamState for_net(const Mlp& net, double lr = 3e-4);
};

/// One bias-corrected Adam update. Throws on non-finite gradients so a
/// diverging run aborts instead of poisoning the parameters.
void adam_step(Mlp& params, const Gradients& grads, AdamState& state);

/// Flatten helpers (row-major per layer, weights then bias), used by the
/// checkpoint format and by finite-difference tests.
Vector flatten(const Mlp& net);
void unflatten(const Vector& theta, Mlp& net);
Vector flatten(const Gradients& grads);

std::string to_json_string(const Mlp& net);
Mlp mlp_from_json_string(const std::string& text);

}  // namespace abrsim::nn
