#include "abrsim/sac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace abrsim::sac {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
constexpr double kLog2 = 0.6931471805599453;
}  // namespace

void SacConfig::validate() const {
  if (gamma < 0.0 || gamma >= 1.0) throw ValidationError("sac: gamma must lie in [0,1)");
  if (rho < 0.0 || rho > 1.0) throw ValidationError("sac: rho must lie in [0,1]");
  if (entropy_alpha < 0.0) throw ValidationError("sac: entropy alpha must be >= 0");
  if (batch < 1) throw ValidationError("sac: batch must be >= 1");
  if (updates_per_round < 0 || round_every < 1)
    throw ValidationError("sac: bad update cadence");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0))
    throw ValidationError("sac: learning rates must be positive");
  if (workers < 1 || workers > 5) throw ValidationError("sac: workers must lie in [1,5]");
  if (episodes < 1) throw ValidationError("sac: episodes must be >= 1");
  if (buffer_capacity == 0) throw ValidationError("sac: buffer capacity must be positive");
  if (hidden.empty()) throw ValidationError("sac: need at least one hidden layer");
  if (log_std_min >= log_std_max) throw ValidationError("sac: bad log-std clamp range");
  if (sync_interval < 1) throw ValidationError("sac: sync interval must be >= 1");
}

PolicyParams PolicyParams::init(const SacConfig& cfg, Rng& rng) {
  PolicyParams p;
  std::vector<int> actor_sizes{kObservationDim};
  for (int h : cfg.hidden) actor_sizes.push_back(h);
  actor_sizes.push_back(2 * kActionDim);  // means then log-stds
  std::vector<int> critic_sizes{kObservationDim + kActionDim};
  for (int h : cfg.hidden) critic_sizes.push_back(h);
  critic_sizes.push_back(1);

  p.actor = nn::Mlp::random(actor_sizes, rng);
  p.critic1 = nn::Mlp::random(critic_sizes, rng);
  p.critic2 = nn::Mlp::random(critic_sizes, rng);
  p.target1 = p.critic1;
  p.target2 = p.critic2;
  p.log_std_min = cfg.log_std_min;
  p.log_std_max = cfg.log_std_max;
  return p;
}

bool PolicyParams::all_finite() const {
  return actor.all_finite() && critic1.all_finite() && critic2.all_finite() &&
         target1.all_finite() && target2.all_finite();
}

double log1m_tanh2(double u) {
  const double a = std::abs(u);
  return 2.0 * (kLog2 - a - std::log1p(std::exp(-2.0 * a)));
}

BatchedSample sample_actions_batch(const PolicyParams& p, const nn::Matrix& states, Rng& rng) {
  const long B = states.cols();
  BatchedSample bs;
  const nn::Matrix head = nn::forward(p.actor, states, bs.actor_cache);  // 4 x B
  bs.mean = head.topRows(kActionDim);
  const nn::Matrix raw_log_std = head.bottomRows(kActionDim);
  bs.log_std = raw_log_std.cwiseMax(p.log_std_min).cwiseMin(p.log_std_max);
  bs.clamp_mask = ((raw_log_std.array() > p.log_std_min) &&
                   (raw_log_std.array() < p.log_std_max))
                      .cast<double>()
                      .matrix();
  bs.std = bs.log_std.array().exp().matrix();

  bs.xi.resize(kActionDim, B);
  for (long b = 0; b < B; ++b)
    for (int d = 0; d < kActionDim; ++d) bs.xi(d, b) = rng.gaussian();

  bs.u = bs.mean + bs.std.cwiseProduct(bs.xi);
  bs.tanh_u = bs.u.array().tanh().matrix();
  bs.actions01 = ((bs.tanh_u.array() + 1.0) * 0.5).matrix();

  bs.logp.resize(B);
  for (long b = 0; b < B; ++b) {
    double lp = 0.0;
    for (int d = 0; d < kActionDim; ++d) {
      lp += -0.5 * bs.xi(d, b) * bs.xi(d, b) - bs.log_std(d, b) - 0.5 * kLog2Pi;
      // a = (tanh(u)+1)/2, so |da/du| = (1 - tanh^2 u)/2.
      lp -= log1m_tanh2(bs.u(d, b)) - kLog2;
    }
    bs.logp(b) = lp;
  }
  return bs;
}

PolicySample policy_sample(const PolicyParams& p, const Observation& s, Rng& rng) {
  nn::Matrix states(kObservationDim, 1);
  states.col(0) = s;
  const BatchedSample bs = sample_actions_batch(p, states, rng);
  PolicySample out;
  out.action = Action(bs.actions01(0, 0), bs.actions01(1, 0));
  out.log_prob = bs.logp(0);
  return out;
}

Action policy_mean_action(const PolicyParams& p, const Observation& s) {
  const nn::Vector head = nn::forward(p.actor, nn::Vector(s));
  return Action((std::tanh(head(0)) + 1.0) * 0.5, (std::tanh(head(1)) + 1.0) * 0.5);
}

SacLearner::SacLearner(SacConfig cfg, Rng& init_rng)
    : cfg_(cfg), params_(PolicyParams::init(cfg, init_rng)),
      adam_actor_(nn::AdamState::for_net(params_.actor, cfg.actor_lr)),
      adam_critic1_(nn::AdamState::for_net(params_.critic1, cfg.critic_lr)),
      adam_critic2_(nn::AdamState::for_net(params_.critic2, cfg.critic_lr)) {
  cfg_.validate();
}

SacLearner::SacLearner(SacConfig cfg, PolicyParams params)
    : cfg_(cfg), params_(std::move(params)),
      adam_actor_(nn::AdamState::for_net(params_.actor, cfg.actor_lr)),
      adam_critic1_(nn::AdamState::for_net(params_.critic1, cfg.critic_lr)),
      adam_critic2_(nn::AdamState::for_net(params_.critic2, cfg.critic_lr)) {
  cfg_.validate();
}

namespace {

void stack_states(const std::vector<Transition>& batch, bool next, nn::Matrix& out) {
  out.resize(kObservationDim, static_cast<long>(batch.size()));
  for (size_t b = 0; b < batch.size(); ++b) out.col(static_cast<long>(b)) = next ? batch[b].s2 : batch[b].s;
}

nn::Matrix stack_q_input(const nn::Matrix& states, const nn::Matrix& actions) {
  nn::Matrix q_in(states.rows() + actions.rows(), states.cols());
  q_in.topRows(states.rows()) = states;
  q_in.bottomRows(actions.rows()) = actions;
  return q_in;
}

}  // namespace

nn::Vector SacLearner::q_targets(const std::vector<Transition>& batch, Rng& rng) const {
  const long B = static_cast<long>(batch.size());
  nn::Matrix s2;
  stack_states(batch, true, s2);
  const BatchedSample next_a = sample_actions_batch(params_, s2, rng);
  const nn::Matrix q_in = stack_q_input(s2, next_a.actions01);
  const nn::Matrix q1 = nn::forward(params_.target1, q_in);
  const nn::Matrix q2 = nn::forward(params_.target2, q_in);

  nn::Vector y(B);
  for (long b = 0; b < B; ++b) {
    const double qmin = std::min(q1(0, b), q2(0, b));
    const double soft = qmin - cfg_.entropy_alpha * next_a.logp(b);
    const double mask = batch[b].done ? 0.0 : 1.0;
    y(b) = batch[b].r + cfg_.gamma * mask * soft;
  }
  return y;
}

std::vector<double> SacLearner::critic_update(const std::vector<Transition>& batch,
                                              const nn::Vector& y, const nn::Vector& is_weights,
                                              double* loss_out) {
  const long B = static_cast<long>(batch.size());
  if (y.size() != B || is_weights.size() != B)
    throw ValidationError("critic_update: batch size mismatch");
  nn::Matrix s;
  stack_states(batch, false, s);
  nn::Matrix a(kActionDim, B);
  for (long b = 0; b < B; ++b) a.col(b) = batch[b].a;
  const nn::Matrix q_in = stack_q_input(s, a);

  nn::ForwardCache cache1, cache2;
  const nn::Matrix q1 = nn::forward(params_.critic1, q_in, cache1);
  const nn::Matrix q2 = nn::forward(params_.critic2, q_in, cache2);

  // TD errors against the first critic, captured before its update.
  std::vector<double> td(static_cast<size_t>(B));
  for (long b = 0; b < B; ++b) td[static_cast<size_t>(b)] = std::abs(y(b) - q1(0, b));

  double loss = 0.0;
  nn::Matrix upstream(1, B);
  const double inv_b = 1.0 / static_cast<double>(B);

  const nn::Matrix* qs[2] = {&q1, &q2};
  nn::ForwardCache* caches[2] = {&cache1, &cache2};
  nn::Mlp* critics[2] = {&params_.critic1, &params_.critic2};
  nn::AdamState* adams[2] = {&adam_critic1_, &adam_critic2_};
  for (int i = 0; i < 2; ++i) {
    for (long b = 0; b < B; ++b) {
      const double diff = (*qs[i])(0, b) - y(b);
      loss += is_weights(b) * diff * diff * inv_b;
      upstream(0, b) = 2.0 * is_weights(b) * diff * inv_b;
    }
    const nn::Gradients g = nn::backward(*critics[i], *caches[i], upstream);
    if (!g.all_finite()) throw Error("critic_update: non-finite loss gradient");
    nn::adam_step(*critics[i], g, *adams[i]);
  }
  if (loss_out) *loss_out = 0.5 * loss;
  return td;
}

double SacLearner::actor_update(const std::vector<Transition>& batch, Rng& rng,
                                double* entropy_out) {
  const long B = static_cast<long>(batch.size());
  nn::Matrix s;
  stack_states(batch, false, s);
  BatchedSample bs = sample_actions_batch(params_, s, rng);
  const nn::Matrix q_in = stack_q_input(s, bs.actions01);

  nn::ForwardCache cache1, cache2;
  const nn::Matrix q1 = nn::forward(params_.critic1, q_in, cache1);
  const nn::Matrix q2 = nn::forward(params_.critic2, q_in, cache2);

  const double inv_b = 1.0 / static_cast<double>(B);
  double objective = 0.0;
  // Route 1/B through the elementwise-minimum critic only.
  nn::Matrix up1 = nn::Matrix::Zero(1, B), up2 = nn::Matrix::Zero(1, B);
  for (long b = 0; b < B; ++b) {
    const double qmin = std::min(q1(0, b), q2(0, b));
    objective += (qmin - cfg_.entropy_alpha * bs.logp(b)) * inv_b;
    if (q1(0, b) <= q2(0, b))
      up1(0, b) = inv_b;
    else
      up2(0, b) = inv_b;
  }

  nn::Matrix in_grad1, in_grad2;
  nn::backward(params_.critic1, cache1, up1, &in_grad1);
  nn::backward(params_.critic2, cache2, up2, &in_grad2);
  // dJ/da, rows below the observation block of the critic input.
  const nn::Matrix q_a =
      in_grad1.bottomRows(kActionDim) + in_grad2.bottomRows(kActionDim);

  // Chain through a = (tanh(u)+1)/2 with u = mean + std*xi, and through the
  // log-prob terms: d logp/d mean = 2 tanh(u), d logp/d log_std =
  // 2 tanh(u) std xi - 1 (the Gaussian parts cancel under reparameterization).
  const double alpha = cfg_.entropy_alpha;
  nn::Matrix d_mean(kActionDim, B), d_log_std(kActionDim, B);
  for (long b = 0; b < B; ++b) {
    for (int d = 0; d < kActionDim; ++d) {
      const double t = bs.tanh_u(d, b);
      const double dadu = 0.5 * (1.0 - t * t);
      const double sxi = bs.std(d, b) * bs.xi(d, b);
      const double dq_du = q_a(d, b) * dadu;  // q_a already carries 1/B
      d_mean(d, b) = dq_du - alpha * inv_b * (2.0 * t);
      d_log_std(d, b) =
          (dq_du * sxi - alpha * inv_b * (2.0 * t * sxi - 1.0)) * bs.clamp_mask(d, b);
    }
  }

  // Ascent: hand Adam the gradient of -J.
  nn::Matrix upstream(2 * kActionDim, B);
  upstream.topRows(kActionDim) = -d_mean;
  upstream.bottomRows(kActionDim) = -d_log_std;
  const nn::Gradients g = nn::backward(params_.actor, bs.actor_cache, upstream);
  if (!std::isfinite(objective) || !g.all_finite())
    throw Error("actor_update: non-finite objective");
  nn::adam_step(params_.actor, g, adam_actor_);

  if (entropy_out) *entropy_out = -bs.logp.mean();
  return objective;
}

void SacLearner::polyak_update() {
  const double rho = cfg_.rho;
  auto mix = [rho](nn::Mlp& target, const nn::Mlp& online) {
    for (size_t l = 0; l < target.weights.size(); ++l) {
      target.weights[l] = rho * target.weights[l] + (1.0 - rho) * online.weights[l];
      target.biases[l] = rho * target.biases[l] + (1.0 - rho) * online.biases[l];
    }
  };
  mix(params_.target1, params_.critic1);
  mix(params_.target2, params_.critic2);
}

UpdateStats SacLearner::update(PerBuffer& buffer, double beta, Rng& rng) {
  const PerSample batch = buffer.sample(static_cast<std::size_t>(cfg_.batch), beta, rng);
  const nn::Vector y = q_targets(batch.transitions, rng);

  UpdateStats stats;
  const std::vector<double> td =
      critic_update(batch.transitions, y, batch.is_weights, &stats.critic_loss);
  buffer.update_priorities(batch.indices, td);
  stats.actor_objective = actor_update(batch.transitions, rng, &stats.entropy);
  polyak_update();
  stats.mean_q = y.mean();
  return stats;
}

namespace {

nlohmann::json config_to_json(const SacConfig& c) {
  return nlohmann::json{{"gamma", c.gamma},
                        {"rho", c.rho},
                        {"entropy_alpha", c.entropy_alpha},
                        {"batch", c.batch},
                        {"updates_per_round", c.updates_per_round},
                        {"round_every", c.round_every},
                        {"actor_lr", c.actor_lr},
                        {"critic_lr", c.critic_lr},
                        {"sync_interval", c.sync_interval},
                        {"workers", c.workers},
                        {"seed", c.seed},
                        {"buffer_capacity", c.buffer_capacity},
                        {"per_alpha", c.per_alpha},
                        {"per_beta0", c.per_beta0},
                        {"per_eps", c.per_eps},
                        {"start_steps", c.start_steps},
                        {"update_after", c.update_after},
                        {"episodes", c.episodes},
                        {"hidden", c.hidden},
                        {"log_std_min", c.log_std_min},
                        {"log_std_max", c.log_std_max}};
}

SacConfig config_from_json(const nlohmann::json& j) {
  SacConfig c;
  c.gamma = j.at("gamma").get<double>();
  c.rho = j.at("rho").get<double>();
  c.entropy_alpha = j.at("entropy_alpha").get<double>();
  c.batch = j.at("batch").get<int>();
  c.updates_per_round = j.at("updates_per_round").get<int>();
  c.round_every = j.at("round_every").get<int>();
  c.actor_lr = j.at("actor_lr").get<double>();
  c.critic_lr = j.at("critic_lr").get<double>();
  c.sync_interval = j.at("sync_interval").get<int>();
  c.workers = j.at("workers").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
  c.per_alpha = j.at("per_alpha").get<double>();
  c.per_beta0 = j.at("per_beta0").get<double>();
  c.per_eps = j.at("per_eps").get<double>();
  c.start_steps = j.at("start_steps").get<int>();
  c.update_after = j.at("update_after").get<int>();
  c.episodes = j.at("episodes").get<int>();
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.log_std_min = j.at("log_std_min").get<double>();
  c.log_std_max = j.at("log_std_max").get<double>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const PolicyParams& params, const SacConfig& cfg,
                     const std::string& rng_state) {
  nlohmann::json j;
  j["version"] = 1;
  j["actor"] = nlohmann::json::parse(nn::to_json_string(params.actor));
  j["critic1"] = nlohmann::json::parse(nn::to_json_string(params.critic1));
  j["critic2"] = nlohmann::json::parse(nn::to_json_string(params.critic2));
  j["target1"] = nlohmann::json::parse(nn::to_json_string(params.target1));
  j["target2"] = nlohmann::json::parse(nn::to_json_string(params.target2));
  j["log_std_min"] = params.log_std_min;
  j["log_std_max"] = params.log_std_max;
  j["config"] = config_to_json(cfg);
  j["rng_state"] = rng_state;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint parse error: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported checkpoint version");
    Checkpoint ck;
    ck.params.actor = nn::mlp_from_json_string(j.at("actor").dump());
    ck.params.critic1 = nn::mlp_from_json_string(j.at("critic1").dump());
    ck.params.critic2 = nn::mlp_from_json_string(j.at("critic2").dump());
    ck.params.target1 = nn::mlp_from_json_string(j.at("target1").dump());
    ck.params.target2 = nn::mlp_from_json_string(j.at("target2").dump());
    ck.params.log_std_min = j.at("log_std_min").get<double>();
    ck.params.log_std_max = j.at("log_std_max").get<double>();
    ck.config = config_from_json(j.at("config"));
    ck.rng_state = j.at("rng_state").get<std::string>();
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint schema violation: ") + e.what());
  }
}

namespace {

std::unique_ptr<Controller> make_sac_controller(const std::string& checkpoint_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  return std::make_unique<SacPolicyController>(std::move(ck.params));
}

}  // namespace

void install_sac_controller() { register_sac_controller_factory(&make_sac_controller); }

}  // namespace abrsim::sac
