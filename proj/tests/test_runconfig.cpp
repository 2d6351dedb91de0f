#include <doctest.h>

#include "abrsim/runconfig.hpp"

using namespace abrsim;

TEST_CASE("defaults parse and validate") {
  RunConfig cfg;
  cfg.validate();
  CHECK(cfg.reward.k1 == 2.0);
  CHECK(cfg.qoe.gamma == 2.897);
  CHECK(cfg.sac.batch == 256);
  CHECK(cfg.session.session_segments == 300);
}

TEST_CASE("key=value text overrides defaults") {
  const RunConfig cfg = RunConfig::from_text(
      "# comment line\n"
      "seed = 99\n"
      "abr = meanstd\n"
      "session.segments = 50   # trailing comment\n"
      "reward.k2 = 0.75\n"
      "qoe.omega = 2.0\n"
      "energy.alpha_net = 1.5\n"
      "sac.hidden = 64,64,32\n"
      "session.trace_wrap = false\n");
  CHECK(cfg.seed == 99);
  CHECK(cfg.abr == "meanstd");
  CHECK(cfg.session.session_segments == 50);
  CHECK(cfg.reward.k2 == 0.75);
  CHECK(cfg.qoe.omega == 2.0);
  CHECK(cfg.energy.alpha_net == 1.5);
  CHECK(cfg.sac.hidden == std::vector<int>{64, 64, 32});
  CHECK(cfg.session.trace_wrap == false);
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(RunConfig::from_text("nosuch.key = 1\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("reward.k1 = banana\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("session.trace_wrap = maybe\n"), ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("reward.k1\n"), ParseError);
}

TEST_CASE("echo is complete and round-trips") {
  RunConfig cfg;
  cfg.seed = 1234;
  cfg.reward.k5 = 0.45;
  cfg.sac.episodes = 42;
  const std::string echo = cfg.echo();
  const RunConfig back = RunConfig::from_text(echo);
  CHECK(back.seed == 1234);
  CHECK(back.reward.k5 == 0.45);
  CHECK(back.sac.episodes == 42);
  CHECK(back.echo() == echo);
}

TEST_CASE("validation propagates to nested configs") {
  RunConfig cfg;
  cfg.session.resume_buffer_s = 2.0;  // above startup buffer
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  RunConfig cfg2;
  cfg2.sac.workers = 9;
  CHECK_THROWS_AS(cfg2.validate(), ValidationError);
}
