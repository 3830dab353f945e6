#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "lgp/dsl.hpp"
#include "lgp/match.hpp"
#include "lgp/training.hpp"

using namespace lgp;

TEST_CASE("wilson interval matches hand-computed fixtures") {
  auto [lo1, hi1] = wilson_interval(60.0, 100);
  CHECK(lo1 == Catch::Approx(50.200258679106).epsilon(1e-9));
  CHECK(hi1 == Catch::Approx(69.059871356754).epsilon(1e-9));

  auto [lo2, hi2] = wilson_interval(0.0, 1);
  CHECK(lo2 == Catch::Approx(0.0).margin(1e-12));
  CHECK(hi2 == Catch::Approx(79.345068562276).epsilon(1e-9));

  // 95 wins and 13 draws of 200 games: draw-adjusted successes 101.5.
  auto [lo3, hi3] = wilson_interval(95 + 0.5 * 13, 200);
  CHECK(lo3 == Catch::Approx(43.872709645576).epsilon(1e-9));
  CHECK(hi3 == Catch::Approx(57.599022364859).epsilon(1e-9));

  CHECK_THROWS_AS(wilson_interval(0.0, 0), ContractError);
}

TEST_CASE("match bookkeeping is conserved and consistent") {
  GameSpec spec = load_builtin("gomoku-9");
  MatchStats stats =
      run_match(spec, AgentSpec::random_agent(), AgentSpec::random_agent(), 31, 77);

  CHECK(stats.games == 31);
  CHECK(stats.wins_a + stats.wins_b + stats.draws == 31);
  CHECK(stats.a_first_wins + stats.a_first_losses + stats.a_first_draws == 16);
  CHECK(stats.a_second_wins + stats.a_second_losses + stats.a_second_draws == 15);
  CHECK(stats.a_first_wins + stats.a_second_wins == stats.wins_a);
  CHECK(stats.a_first_draws + stats.a_second_draws == stats.draws);
  REQUIRE(stats.records.size() == 31);

  double successes = stats.wins_a + 0.5 * stats.draws;
  CHECK(stats.win_percentage_a == Catch::Approx(100.0 * successes / 31));
  CHECK(stats.wilson_low <= stats.win_percentage_a);
  CHECK(stats.wilson_high >= stats.win_percentage_a);
  CHECK(stats.mean_game_length > 0.0);

  long plies = 0;
  for (int i = 0; i < 31; ++i) {
    const GameRecord& rec = stats.records[i];
    CHECK(rec.index == i);
    CHECK(rec.a_seat == (i % 2 == 0 ? 1 : 2));
    CHECK(rec.seed == 77 + static_cast<uint64_t>(i / 2));
    CHECK(rec.plies > 0);
    plies += rec.plies;
  }
  CHECK(stats.mean_game_length == Catch::Approx(static_cast<double>(plies) / 31));
}

TEST_CASE("matches are reproducible for a fixed base seed") {
  GameSpec spec = load_builtin("breakthrough-6");
  AgentSpec uct = AgentSpec::pure_uct(8, 1);
  MatchStats s1 = run_match(spec, uct, AgentSpec::random_agent(), 6, 123);
  MatchStats s2 = run_match(spec, uct, AgentSpec::random_agent(), 6, 123);

  REQUIRE(s1.records.size() == s2.records.size());
  for (size_t i = 0; i < s1.records.size(); ++i) {
    CHECK(s1.records[i].score_a == s2.records[i].score_a);
    CHECK(s1.records[i].plies == s2.records[i].plies);
  }
  CHECK(s1.win_percentage_a == s2.win_percentage_a);

  MatchStats s3 = run_match(spec, uct, AgentSpec::random_agent(), 6, 124);
  bool identical = true;
  for (size_t i = 0; i < s3.records.size(); ++i)
    identical = identical && s1.records[i].plies == s3.records[i].plies &&
                s1.records[i].score_a == s3.records[i].score_a;
  CHECK(!identical);
}

TEST_CASE("paired seats make a self-match exactly symmetric") {
  GameSpec spec = load_builtin("gomoku-9");
  AgentSpec uct = AgentSpec::pure_uct(8, 1);
  MatchStats stats = run_match(spec, uct, uct, 2, 555);

  // Both games share a seed; the seat-1 stream drives the same deterministic
  // agent in each, so game 1 is game 0 with the roles relabeled.
  REQUIRE(stats.records.size() == 2);
  CHECK(stats.records[0].plies == stats.records[1].plies);
  CHECK(stats.records[0].score_a == -stats.records[1].score_a);
  CHECK(stats.wins_a == stats.wins_b);
  CHECK(stats.draws % 2 == 0);
  CHECK(stats.win_percentage_a == Catch::Approx(50.0));

  MatchStats big = run_match(spec, uct, uct, 10, 9000);
  CHECK(big.wins_a == big.wins_b);
  CHECK(big.win_percentage_a == Catch::Approx(50.0));
}

TEST_CASE("random self-play lands near even over a thousand games") {
  GameSpec spec = load_builtin("gomoku-9");
  MatchStats stats =
      run_match(spec, AgentSpec::random_agent(), AgentSpec::random_agent(), 1000, 2024);
  CHECK(stats.win_percentage_a >= 44.0);
  CHECK(stats.win_percentage_a <= 56.0);
  CHECK(stats.wins_a + stats.wins_b + stats.draws == 1000);
}

TEST_CASE("search depth beats chance decisively") {
  GameSpec spec = load_builtin("gomoku-9");
  MatchStats stats =
      run_match(spec, AgentSpec::pure_uct(50, 2), AgentSpec::random_agent(), 20, 31337);
  CHECK(stats.win_percentage_a >= 70.0);
}

TEST_CASE("checkpoint agents play and game mismatches are rejected") {
  GameSpec gomoku = load_builtin("gomoku-9");
  Codec codec = Codec::build(gomoku);
  NetworkConfig ncfg;
  ncfg.trunk_channels = 8;
  ncfg.residual_blocks = 1;
  ncfg.value_hidden = 8;
  Net net = init_network(codec, ncfg, 77);
  OptimizerState opt = OptimizerState::zeros(net.params);
  std::string path = "/tmp/lgp_match_agent.lpgc";
  save_checkpoint(make_training_checkpoint(net, opt, gomoku, codec), path);

  AgentSpec trained = AgentSpec::puct_checkpoint(path, 4);
  MatchStats stats = run_match(gomoku, trained, AgentSpec::random_agent(), 2, 5);
  CHECK(stats.records.size() == 2);

  GameSpec hex = load_builtin("hex-5");
  CHECK_THROWS_AS(run_match(hex, trained, AgentSpec::random_agent(), 2, 5), ConfigError);
  AgentSpec missing = AgentSpec::puct_checkpoint("/tmp/does_not_exist.lpgc", 4);
  CHECK_THROWS_AS(run_match(gomoku, missing, AgentSpec::random_agent(), 2, 5), IoError);

  std::filesystem::remove(path);
}

TEST_CASE("degenerate match configurations are rejected") {
  GameSpec spec = load_builtin("gomoku-9");
  CHECK_THROWS_AS(
      run_match(spec, AgentSpec::random_agent(), AgentSpec::random_agent(), 0, 1),
      ContractError);
  AgentSpec bad_uct = AgentSpec::pure_uct(0, 1);
  CHECK_THROWS_AS(run_match(spec, bad_uct, AgentSpec::random_agent(), 2, 1), ConfigError);
  AgentSpec bad_rollouts = AgentSpec::pure_uct(10, 0);
  CHECK_THROWS_AS(run_match(spec, bad_rollouts, AgentSpec::random_agent(), 2, 1),
                  ConfigError);
}
