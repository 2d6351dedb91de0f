#include <doctest.h>

#include <cmath>

#include "abrsim/nn.hpp"

using namespace abrsim;
using nn::Matrix;
using nn::Mlp;
using nn::Vector;

TEST_CASE("zero network maps everything to zero") {
  const Mlp net = Mlp::zeros({3, 4, 2});
  const Vector y = nn::forward(net, Vector(Vector::Ones(3)));
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("1->1 affine network") {
  Mlp net = Mlp::zeros({1, 1});
  net.weights[0](0, 0) = 2.0;
  net.biases[0](0) = 1.0;
  Vector x(1);
  x << 3.0;
  CHECK(nn::forward(net, x)(0) == doctest::Approx(7.0));
}

TEST_CASE("outputs stay finite for bounded inputs and weights") {
  Rng rng(3);
  const Mlp net = Mlp::random({10, 32, 32, 2}, rng);
  for (int i = 0; i < 50; ++i) {
    Vector x(10);
    for (int k = 0; k < 10; ++k) x(k) = rng.uniform();
    const Vector y = nn::forward(net, x);
    CHECK(y.allFinite());
  }
}

TEST_CASE("forward rejects wrong input sizes") {
  const Mlp net = Mlp::zeros({3, 2});
  CHECK_THROWS_AS(nn::forward(net, Vector(Vector::Ones(4))), ValidationError);
}

TEST_CASE("linear derivative: d(w*x)/dw = x") {
  Mlp net = Mlp::zeros({1, 1});
  net.weights[0](0, 0) = 0.5;
  Matrix x(1, 1);
  x << 3.0;
  nn::ForwardCache cache;
  nn::forward(net, x, cache);
  const nn::Gradients g = nn::backward(net, cache, Matrix::Ones(1, 1));
  CHECK(g.weights[0](0, 0) == doctest::Approx(3.0));
  CHECK(g.biases[0](0) == doctest::Approx(1.0));
}

TEST_CASE("zero upstream produces zero gradients") {
  Rng rng(5);
  const Mlp net = Mlp::random({4, 8, 3}, rng);
  Matrix x(4, 6);
  for (int i = 0; i < x.size(); ++i) x(i / 6, i % 6) = rng.uniform(-1.0, 1.0);
  nn::ForwardCache cache;
  nn::forward(net, x, cache);
  const nn::Gradients g = nn::backward(net, cache, Matrix::Zero(3, 6));
  for (const auto& w : g.weights) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
  for (const auto& b : g.biases) CHECK(b.cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// Scalar objective L(theta) = u . f(x; theta) for a fixed random u.
double objective(const Mlp& net, const Matrix& x, const Vector& u) {
  const Matrix y = nn::forward(net, x);
  double L = 0.0;
  for (long c = 0; c < y.cols(); ++c) L += u.dot(y.col(c));
  return L;
}

}  // namespace

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(11);
  Mlp net = Mlp::random({6, 16, 16, 2}, rng);
  Matrix x(6, 4);
  for (long i = 0; i < x.rows(); ++i)
    for (long j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  Vector u(2);
  u << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);

  nn::ForwardCache cache;
  nn::forward(net, x, cache);
  Matrix upstream(2, 4);
  for (long c = 0; c < 4; ++c) upstream.col(c) = u;
  Matrix input_grad;
  const nn::Gradients g = nn::backward(net, cache, upstream, &input_grad);
  const Vector ga = nn::flatten(g);

  Vector theta = nn::flatten(net);
  const double h = 1e-5;
  Rng pick(999);
  for (int k = 0; k < 60; ++k) {
    const long i = static_cast<long>(pick.uniform() * theta.size());
    Vector tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    nn::unflatten(tp, net);
    const double Lp = objective(net, x, u);
    nn::unflatten(tm, net);
    const double Lm = objective(net, x, u);
    nn::unflatten(theta, net);
    const double fd = (Lp - Lm) / (2.0 * h);
    const double rel = std::abs(fd - ga(i)) / std::max(1e-8, std::abs(fd));
    CHECK(rel < 1e-4);
  }

  SUBCASE("input gradients agree with finite differences too") {
    for (int k = 0; k < 10; ++k) {
      const long r = static_cast<long>(pick.uniform() * x.rows());
      const long c = static_cast<long>(pick.uniform() * x.cols());
      Matrix xp = x, xm = x;
      xp(r, c) += h;
      xm(r, c) -= h;
      const double fd = (objective(net, xp, u) - objective(net, xm, u)) / (2.0 * h);
      const double rel = std::abs(fd - input_grad(r, c)) / std::max(1e-8, std::abs(fd));
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  Rng rng(7);
  Mlp net = Mlp::random({3, 5, 2}, rng);
  const Vector before = nn::flatten(net);
  nn::AdamState adam = nn::AdamState::for_net(net);
  nn::adam_step(net, nn::Gradients::zeros_like(net), adam);
  CHECK((nn::flatten(net) - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam: first step moves by about the learning rate") {
  Mlp net = Mlp::zeros({1, 1});
  nn::AdamState adam = nn::AdamState::for_net(net, 1e-3);
  nn::Gradients g = nn::Gradients::zeros_like(net);
  g.weights[0](0, 0) = 0.37;  // any constant gradient
  nn::adam_step(net, g, adam);
  CHECK(std::abs(net.weights[0](0, 0)) == doctest::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("adam walks down a quadratic bowl") {
  // f(w) = w^2, df/dw = 2w, starting at w = 5
  Mlp net = Mlp::zeros({1, 1});
  net.weights[0](0, 0) = 5.0;
  nn::AdamState adam = nn::AdamState::for_net(net, 0.1);
  for (int i = 0; i < 200; ++i) {
    nn::Gradients g = nn::Gradients::zeros_like(net);
    g.weights[0](0, 0) = 2.0 * net.weights[0](0, 0);
    nn::adam_step(net, g, adam);
  }
  CHECK(std::abs(net.weights[0](0, 0)) < 0.5);
}

TEST_CASE("adam rejects non-finite gradients") {
  Mlp net = Mlp::zeros({1, 1});
  nn::AdamState adam = nn::AdamState::for_net(net);
  nn::Gradients g = nn::Gradients::zeros_like(net);
  g.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nn::adam_step(net, g, adam), Error);
}

TEST_CASE("mlp json round trip is bit exact") {
  Rng rng(13);
  const Mlp net = Mlp::random({10, 128, 128, 2}, rng);
  const Mlp copy = nn::mlp_from_json_string(nn::to_json_string(net));
  CHECK(copy.sizes == net.sizes);
  const Vector a = nn::flatten(net), b = nn::flatten(copy);
  REQUIRE(a.size() == b.size());
  for (long i = 0; i < a.size(); ++i) CHECK(a(i) == b(i));
}

TEST_CASE("backward validates shapes") {
  Rng rng(17);
  const Mlp net = Mlp::random({4, 6, 2}, rng);
  Matrix x = Matrix::Ones(4, 3);
  nn::ForwardCache cache;
  nn::forward(net, x, cache);
  CHECK_THROWS_AS(nn::backward(net, cache, Matrix::Ones(3, 3)), ValidationError);
  CHECK_THROWS_AS(nn::backward(net, cache, Matrix::Ones(2, 5)), ValidationError);
}
