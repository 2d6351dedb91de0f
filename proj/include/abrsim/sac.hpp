#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abrsim/controllers.hpp"
#include "abrsim/nn.hpp"
#include "abrsim/replay.hpp"
#include "abrsim/types.hpp"

namespace abrsim::sac {

constexpr int kActionDim = 2;

struct SacConfig {
  double gamma = 0.99;
  double rho = 0.995;
  double entropy_alpha = 0.2;
  int batch = 256;
  int updates_per_round = 1;
  int round_every = 2;  // env steps per update round
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  int sync_interval = 200;  // worker snapshot refresh, in env steps
  int workers = 1;
  std::uint64_t seed = 1;
  std::size_t buffer_capacity = 1u << 17;
  double per_alpha = 0.6;
  double per_beta0 = 0.4;
  double per_eps = 1e-6;
  int start_steps = 2000;
  int update_after = 1000;
  int episodes = 300;
  std::vector<int> hidden = {128, 128};
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  void validate() const;
};

/// Actor (obs -> 2 means + 2 log-stds) plus twin critics and their
/// polyak-averaged targets (obs+action -> 1).
struct PolicyParams {
  nn::Mlp actor;
  nn::Mlp critic1, critic2;
  nn::Mlp target1, target2;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  static PolicyParams init(const SacConfig& cfg, Rng& rng);
  bool all_finite() const;
};

struct PolicySample {
  Action action;
  double log_prob = 0.0;
};

/// Reparameterized draw squashed to [0,1]^2; log_prob carries the
/// tanh-and-affine change-of-variables correction.
PolicySample policy_sample(const PolicyParams& p, const Observation& s, Rng& rng);

/// Deterministic mode: squashed mean, no log-prob.
Action policy_mean_action(const PolicyParams& p, const Observation& s);

/// log(1 - tanh(u)^2), evaluated stably for large |u|.
double log1m_tanh2(double u);

/// Batched reparameterized sample with everything the actor update needs.
struct BatchedSample {
  nn::Matrix mean;        // 2 x B
  nn::Matrix log_std;     // clamped, 2 x B
  nn::Matrix std;         // 2 x B
  nn::Matrix xi;          // unit normal draws, 2 x B
  nn::Matrix u;           // pre-squash, 2 x B
  nn::Matrix tanh_u;      // 2 x B
  nn::Matrix actions01;   // (tanh(u)+1)/2, 2 x B
  nn::Matrix clamp_mask;  // 1 where raw log-std is strictly inside bounds
  nn::Vector logp;        // B
  nn::ForwardCache actor_cache;
};
BatchedSample sample_actions_batch(const PolicyParams& p, const nn::Matrix& states, Rng& rng);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
  double entropy = 0.0;
  double mean_q = 0.0;
};

/// Owns the optimizer state and performs the per-batch update block:
/// targets, twin-critic regression, PER priority refresh, policy ascent,
/// polyak averaging.
class SacLearner {
 public:
  SacLearner(SacConfig cfg, Rng& init_rng);
  SacLearner(SacConfig cfg, PolicyParams params);

  const PolicyParams& params() const { return params_; }
  PolicyParams& mutable_params() { return params_; }
  const SacConfig& config() const { return cfg_; }

  UpdateStats update(PerBuffer& buffer, double beta, Rng& rng);

  /// y = r + gamma (1-d) (min_i Q_targ_i(s', a') - alpha log pi(a'|s')).
  nn::Vector q_targets(const std::vector<Transition>& batch, Rng& rng) const;

  /// Importance-weighted MSE step on both critics; returns |y - Q1(s,a)|.
  std::vector<double> critic_update(const std::vector<Transition>& batch, const nn::Vector& y,
                                    const nn::Vector& is_weights, double* loss_out = nullptr);

  /// One ascent step on E[min Q(s, a_theta(s)) - alpha log pi]; returns the
  /// objective value (entropy estimate via entropy_out).
  double actor_update(const std::vector<Transition>& batch, Rng& rng,
                      double* entropy_out = nullptr);

  void polyak_update();

 private:
  SacConfig cfg_;
  PolicyParams params_;
  nn::AdamState adam_actor_, adam_critic1_, adam_critic2_;
};

/// Full-model checkpoint: networks, config echo, RNG state.
struct Checkpoint {
  PolicyParams params;
  SacConfig config;
  std::string rng_state;
};

void save_checkpoint(const std::string& path, const PolicyParams& params, const SacConfig& cfg,
                     const std::string& rng_state);
Checkpoint load_checkpoint(const std::string& path);

/// Makes "sac:<checkpoint>" resolvable through make_controller.
void install_sac_controller();

/// Deterministic-policy controller around a trained actor.
class SacPolicyController : public Controller {
 public:
  explicit SacPolicyController(PolicyParams params) : params_(std::move(params)) {}
  Action decide(const ControllerContext& ctx) override {
    return policy_mean_action(params_, ctx.normalized);
  }
  std::string name() const override { return "sac"; }

 private:
  PolicyParams params_;
};

}  // namespace abrsim::sac
