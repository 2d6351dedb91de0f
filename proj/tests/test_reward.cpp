#include <doctest.h>

#include <cmath>
#include <vector>

#include "abrsim/reward.hpp"

using namespace abrsim;

namespace {

StepOutcome outcome(double vmaf, double energy_j, bool stall, double stall_s, double latency,
                    double speed, double vmaf_prev) {
  StepOutcome o;
  o.vmaf = vmaf;
  o.vmaf_prev = vmaf_prev;
  o.data_energy_j = energy_j;  // keep the split trivial: all data, no playback
  o.playback_energy_j = 0.0;
  o.stall_event = stall;
  o.stall_duration_s = stall_s;
  o.latency_s = latency;
  o.speed = speed;
  return o;
}

StepOutcome random_outcome(Rng& rng) {
  StepOutcome o;
  o.vmaf = rng.uniform(0.0, 100.0);
  o.vmaf_prev = rng.uniform(0.0, 100.0);
  o.data_energy_j = rng.uniform(0.0, 3.0);
  o.playback_energy_j = rng.uniform(0.0, 3.0);
  o.stall_event = rng.uniform() < 0.3;
  o.stall_duration_s = o.stall_event ? rng.uniform(0.0, 6.0) : 0.0;
  o.latency_s = rng.uniform(0.0, 20.0);
  o.speed = rng.uniform(0.9, 1.1);
  o.bitrate_kbps = rng.uniform(300.0, 8000.0);
  o.downloaded_mb = rng.uniform(0.05, 2.0);
  return o;
}

}  // namespace

TEST_CASE("step reward: all penalties vanish") {
  const RewardWeights w;
  CHECK(step_reward(outcome(100, 0, false, 0, 0, 1.0, 100), w) == doctest::Approx(2.0));
}

TEST_CASE("step reward: full-length stall subtracts exactly k3 + k4") {
  const RewardWeights w;
  const double base = step_reward(outcome(100, 0, false, 0, 0, 1.0, 100), w);
  const double stalled = step_reward(outcome(100, 0, true, 4.0, 0, 1.0, 100), w);
  CHECK(base - stalled == doctest::Approx(w.k3 + w.k4).epsilon(1e-12));
}

TEST_CASE("step reward hand evaluation with defaults") {
  const RewardWeights w;
  // 2*0.8/1.5 - 0.3*(1/5) - 0.2*1 - 1*0.1 = 0.70667
  const double r = step_reward(outcome(80, 2.0, false, 0, 2.0, 1.1, 90), w);
  CHECK(r == doctest::Approx(0.706667).epsilon(1e-4));
}

TEST_CASE("step reward monotonicity properties") {
  const RewardWeights w;
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    StepOutcome o = random_outcome(rng);
    const double r = step_reward(o, w);

    StepOutcome better = o;
    better.vmaf = std::min(100.0, o.vmaf + rng.uniform(0.0, 20.0));
    better.vmaf_prev = better.vmaf - (o.vmaf - o.vmaf_prev);  // keep |delta| fixed
    CHECK(step_reward(better, w) >= r - 1e-12);

    StepOutcome costlier = o;
    costlier.data_energy_j += rng.uniform(0.0, 2.0);
    CHECK(step_reward(costlier, w) <= r + 1e-12);

    StepOutcome laggier = o;
    laggier.latency_s += rng.uniform(0.0, 5.0);
    CHECK(step_reward(laggier, w) <= r + 1e-12);

    StepOutcome stallier = o;
    stallier.stall_duration_s += rng.uniform(0.0, 2.0);
    CHECK(step_reward(stallier, w) <= r + 1e-12);

    StepOutcome jumpier = o;
    jumpier.vmaf_prev = o.vmaf + std::abs(o.vmaf - o.vmaf_prev) + rng.uniform(0.0, 10.0);
    CHECK(step_reward(jumpier, w) <= r + 1e-12);
  }
}

TEST_CASE("session qoe single-segment hand value") {
  const QoECoefficients c;
  std::vector<StepOutcome> outs{outcome(80, 0, false, 0, 2.0, 1.0, 80)};
  // 0.077*4 - 1.249*2 = -2.190
  CHECK(session_qoe(outs, c) == doctest::Approx(-2.190).epsilon(1e-4));
}

TEST_CASE("session qoe: clean perfect session keeps only the quality term") {
  const QoECoefficients c;
  for (int T : {1, 10, 300}) {
    std::vector<StepOutcome> outs(T, outcome(100, 0, false, 0, 0, 1.0, 100));
    CHECK(session_qoe(outs, c) == doctest::Approx(0.077 * 5.0 * T).epsilon(1e-9));
  }
}

TEST_CASE("session qoe: one extra stall event costs exactly gamma") {
  const QoECoefficients c;
  Rng rng(13);
  std::vector<StepOutcome> outs;
  for (int i = 0; i < 50; ++i) outs.push_back(random_outcome(rng));
  outs[20].stall_event = false;
  outs[20].stall_duration_s = 0.0;
  const double before = session_qoe(outs, c);
  outs[20].stall_event = true;  // zero-duration event: only the count changes
  const double after = session_qoe(outs, c);
  CHECK(before - after == doctest::Approx(2.897).epsilon(1e-9));
}

TEST_CASE("session qoe rejects empty input") {
  CHECK_THROWS_AS(session_qoe({}, QoECoefficients{}), ValidationError);
}

TEST_CASE("energy efficiency") {
  CHECK(energy_efficiency(50.0, 1.0) == doctest::Approx(50.0));
  CHECK(energy_efficiency(50.0, 2.0) == doctest::Approx(25.0));
  CHECK(energy_efficiency(0.0, 3.7) == 0.0);
  CHECK_THROWS_AS(energy_efficiency(50.0, 0.0), ValidationError);
}

TEST_CASE("summarize computes the session metric table") {
  const QoECoefficients c;
  SUBCASE("constant vmaf 90") {
    std::vector<StepOutcome> outs(40, outcome(90, 1.0, false, 0, 2.0, 1.0, 90));
    const SessionSummary s = summarize(outs, c);
    CHECK(s.quality_level == doctest::Approx(4.5));
    CHECK(s.smoothness == 0.0);
    CHECK(s.freezing_events == 0);
    CHECK(s.energy_kj == doctest::Approx(0.040));
  }
  SUBCASE("data volume in megabits") {
    std::vector<StepOutcome> outs;
    for (int i = 0; i < 300; ++i) {
      StepOutcome o = outcome(80, 1.0, false, 0, 2.0, 1.0, 80);
      o.bitrate_kbps = 3000;
      o.downloaded_mb = 3.0;  // 3 Mbps for 1 s
      outs.push_back(o);
    }
    const SessionSummary s = summarize(outs, c);
    CHECK(s.data_dl_mb == doctest::Approx(900.0));
    CHECK(s.mean_bitrate_mbps == doctest::Approx(3.0));
  }
}

TEST_CASE("qoe matches an independent recomputation") {
  const QoECoefficients c;
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StepOutcome> outs;
    const int T = 1 + static_cast<int>(rng.uniform() * 120);
    for (int i = 0; i < T; ++i) outs.push_back(random_outcome(rng));

    // straight re-read of the formula, accumulated in a different order
    double qoe = 0.0;
    for (int i = 0; i < T; ++i) qoe += c.alpha * outs[i].vmaf / 20.0;
    for (int i = 0; i < T; ++i) qoe -= c.beta * outs[i].stall_duration_s;
    int events = 0;
    for (int i = 0; i < T; ++i) events += outs[i].stall_event ? 1 : 0;
    qoe -= c.gamma * events;
    double lat = 0.0;
    for (int i = 0; i < T; ++i) lat += outs[i].latency_s;
    qoe -= c.sigma * lat / T;
    for (int i = 0; i < T; ++i) qoe -= c.mu * std::abs(1.0 - outs[i].speed);
    for (int i = 1; i < T; ++i)
      qoe -= c.omega * std::abs(outs[i].vmaf - outs[i - 1].vmaf) / 20.0;

    CHECK(session_qoe(outs, c) == doctest::Approx(qoe).epsilon(1e-9));
  }
}

TEST_CASE("reward standardizer tracks running moments") {
  RewardStandardizer s;
  Rng rng(8);
  double sum = 0.0, sum2 = 0.0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const double r = rng.gaussian(3.0, 2.0);
    sum += r;
    sum2 += r * r;
    s.push(r);
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-9));
  CHECK(s.stddev() == doctest::Approx(std::sqrt(var)).epsilon(1e-6));
}
