#include "abrsim/nn.hpp"

#include <cmath>

#include <json.hpp>

namespace abrsim::nn {

bool Mlp::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

Mlp Mlp::random(const std::vector<int>& sizes, Rng& rng) {
  if (sizes.size() < 2) throw ValidationError("Mlp: need at least input and output sizes");
  Mlp net;
  net.sizes = sizes;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    if (in < 1 || out < 1) throw ValidationError("Mlp: layer sizes must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Matrix w(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) w(i, j) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(out));
  }
  return net;
}

Mlp Mlp::zeros(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ValidationError("Mlp: need at least input and output sizes");
  Mlp net;
  net.sizes = sizes;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    net.weights.push_back(Matrix::Zero(sizes[l + 1], sizes[l]));
    net.biases.push_back(Vector::Zero(sizes[l + 1]));
  }
  return net;
}

Matrix forward(const Mlp& net, const Matrix& x) {
  if (x.rows() != net.input_size())
    throw ValidationError("forward: input has wrong dimension");
  Matrix a = x;
  for (int l = 0; l < net.num_layers(); ++l) {
    Matrix z = (net.weights[l] * a).colwise() + net.biases[l];
    a = (l + 1 < net.num_layers()) ? z.array().tanh().matrix() : z;
  }
  return a;
}

Matrix forward(const Mlp& net, const Matrix& x, ForwardCache& cache) {
  if (x.rows() != net.input_size())
    throw ValidationError("forward: input has wrong dimension");
  cache.acts.clear();
  cache.acts.reserve(net.num_layers() + 1);
  cache.acts.push_back(x);
  for (int l = 0; l < net.num_layers(); ++l) {
    Matrix z = (net.weights[l] * cache.acts.back()).colwise() + net.biases[l];
    cache.acts.push_back((l + 1 < net.num_layers()) ? z.array().tanh().matrix() : z);
  }
  return cache.acts.back();
}

Vector forward(const Mlp& net, const Vector& x) {
  return forward(net, Matrix(x)).col(0);
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (int l = 0; l < net.num_layers(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return g;
}

bool Gradients::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

void Gradients::scale(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
}

Gradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& upstream,
                   Matrix* input_grad) {
  const int L = net.num_layers();
  if (static_cast<int>(cache.acts.size()) != L + 1)
    throw ValidationError("backward: cache does not match network");
  if (upstream.rows() != net.output_size() || upstream.cols() != cache.acts[0].cols())
    throw ValidationError("backward: upstream gradient has wrong shape");

  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  Matrix delta = upstream;  // d objective / d pre-activation of layer l
  for (int l = L - 1; l >= 0; --l) {
    g.weights[l] = delta * cache.acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      // Through the tanh of the previous layer: act' = 1 - act^2.
      delta = (net.weights[l].transpose() * delta).cwiseProduct(
          (1.0 - cache.acts[l].array().square()).matrix());
    } else if (input_grad) {
      *input_grad = net.weights[0].transpose() * delta;
    }
  }
  return g;
}

AdamState AdamState::for_net(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (int l = 0; l < net.num_layers(); ++l) {
    s.m_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.v_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    s.m_b.push_back(Vector::Zero(net.biases[l].size()));
    s.v_b.push_back(Vector::Zero(net.biases[l].size()));
  }
  return s;
}

void adam_step(Mlp& params, const Gradients& grads, AdamState& state) {
  if (!grads.all_finite()) throw Error("adam_step: non-finite gradient, aborting");
  if (grads.weights.size() != params.weights.size())
    throw ValidationError("adam_step: gradient shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t l = 0; l < params.weights.size(); ++l) {
    state.m_w[l] = state.beta1 * state.m_w[l] + (1.0 - state.beta1) * grads.weights[l];
    state.v_w[l] =
        state.beta2 * state.v_w[l] + (1.0 - state.beta2) * grads.weights[l].array().square().matrix();
    params.weights[l].array() -= state.lr * (state.m_w[l].array() / bc1) /
                                 ((state.v_w[l].array() / bc2).sqrt() + state.eps);

    state.m_b[l] = state.beta1 * state.m_b[l] + (1.0 - state.beta1) * grads.biases[l];
    state.v_b[l] =
        state.beta2 * state.v_b[l] + (1.0 - state.beta2) * grads.biases[l].array().square().matrix();
    params.biases[l].array() -= state.lr * (state.m_b[l].array() / bc1) /
                                ((state.v_b[l].array() / bc2).sqrt() + state.eps);
  }
}

Vector flatten(const Mlp& net) {
  long total = 0;
  for (size_t l = 0; l < net.weights.size(); ++l)
    total += net.weights[l].size() + net.biases[l].size();
  Vector theta(total);
  long at = 0;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    const auto& w = net.weights[l];
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) theta(at++) = w(i, j);
    for (long i = 0; i < net.biases[l].size(); ++i) theta(at++) = net.biases[l](i);
  }
  return theta;
}

void unflatten(const Vector& theta, Mlp& net) {
  long at = 0;
  for (size_t l = 0; l < net.weights.size(); ++l) {
    auto& w = net.weights[l];
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) w(i, j) = theta(at++);
    for (long i = 0; i < net.biases[l].size(); ++i) net.biases[l](i) = theta(at++);
  }
  if (at != theta.size()) throw ValidationError("unflatten: size mismatch");
}

Vector flatten(const Gradients& grads) {
  long total = 0;
  for (size_t l = 0; l < grads.weights.size(); ++l)
    total += grads.weights[l].size() + grads.biases[l].size();
  Vector v(total);
  long at = 0;
  for (size_t l = 0; l < grads.weights.size(); ++l) {
    const auto& w = grads.weights[l];
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) v(at++) = w(i, j);
    for (long i = 0; i < grads.biases[l].size(); ++i) v(at++) = grads.biases[l](i);
  }
  return v;
}

std::string to_json_string(const Mlp& net) {
  nlohmann::json j;
  j["sizes"] = net.sizes;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (const auto& w : net.weights) {
    std::vector<double> row_major(w.size());
    long at = 0;
    for (long i = 0; i < w.rows(); ++i)
      for (long jx = 0; jx < w.cols(); ++jx) row_major[at++] = w(i, jx);
    j["weights"].push_back(row_major);
  }
  for (const auto& b : net.biases)
    j["biases"].push_back(std::vector<double>(b.data(), b.data() + b.size()));
  return j.dump();
}

Mlp mlp_from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mlp JSON parse error: ") + e.what());
  }
  try {
    Mlp net = Mlp::zeros(j.at("sizes").get<std::vector<int>>());
    const auto& jw = j.at("weights");
    const auto& jb = j.at("biases");
    if (jw.size() != net.weights.size() || jb.size() != net.biases.size())
      throw ParseError("mlp JSON: layer count mismatch");
    for (size_t l = 0; l < net.weights.size(); ++l) {
      auto w = jw[l].get<std::vector<double>>();
      if (static_cast<long>(w.size()) != net.weights[l].size())
        throw ParseError("mlp JSON: weight size mismatch");
      long at = 0;
      for (long i = 0; i < net.weights[l].rows(); ++i)
        for (long jx = 0; jx < net.weights[l].cols(); ++jx) net.weights[l](i, jx) = w[at++];
      auto b = jb[l].get<std::vector<double>>();
      if (static_cast<long>(b.size()) != net.biases[l].size())
        throw ParseError("mlp JSON: bias size mismatch");
      for (long i = 0; i < net.biases[l].size(); ++i) net.biases[l](i) = b[i];
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mlp JSON schema violation: ") + e.what());
  }
}

}  // namespace abrsim::nn
