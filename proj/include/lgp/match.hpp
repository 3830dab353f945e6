#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lgp/engine.hpp"
#include "lgp/net.hpp"
#include "lgp/search.hpp"
#include "lgp/tensor.hpp"

namespace lgp {

enum class AgentKind { Random, PureUct, PuctCheckpoint };

struct AgentSpec {
  AgentKind kind = AgentKind::Random;
  int iterations = 0;
  int rollouts_per_iteration = 0;
  std::string checkpoint_path;

  static AgentSpec random_agent() { return AgentSpec{AgentKind::Random, 0, 0, {}}; }
  static AgentSpec pure_uct(int iterations = 800, int rollouts = 10) {
    return AgentSpec{AgentKind::PureUct, iterations, rollouts, {}};
  }
  static AgentSpec puct_checkpoint(std::string path, int iterations = 40) {
    return AgentSpec{AgentKind::PuctCheckpoint, iterations, 0, std::move(path)};
  }
  std::string describe() const {
    switch (kind) {
      case AgentKind::Random:
        return "random";
      case AgentKind::PureUct:
        return "pure-uct(" + std::to_string(iterations) + "x" +
               std::to_string(rollouts_per_iteration) + ")";
      case AgentKind::PuctCheckpoint:
        return "puct(" + std::to_string(iterations) + ", " + checkpoint_path + ")";
    }
    return "?";
  }
};

// One game from the score sheet, from agent a's point of view.
struct GameRecord {
  int index = 0;
  uint64_t seed = 0;
  Player a_seat = 1;
  double score_a = 0.0;  // -1 loss, 0 draw, +1 win
  int plies = 0;
};

struct MatchStats {
  int games = 0;
  int wins_a = 0;
  int wins_b = 0;
  int draws = 0;
  // Draws count as half a win, so 50% means dead even.
  double win_percentage_a = 0.0;
  double wilson_low = 0.0;   // 95% confidence bounds on win_percentage_a
  double wilson_high = 0.0;
  int a_first_wins = 0, a_first_losses = 0, a_first_draws = 0;
  int a_second_wins = 0, a_second_losses = 0, a_second_draws = 0;
  double mean_game_length = 0.0;
  std::vector<GameRecord> records;
};

// 95% Wilson score interval for a draw-adjusted success rate, in percent.
inline std::pair<double, double> wilson_interval(double successes, int n) {
  if (n < 1) throw ContractError("confidence interval needs at least one game");
  const double z = 1.959963984540054;
  double p = successes / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {100.0 * std::max(0.0, center - half), 100.0 * std::min(1.0, center + half)};
}

namespace detail {

// An agent instantiated for play: checkpoint-backed agents own their network.
class MatchAgent {
 public:
  MatchAgent(const GameSpec& spec, const Codec& codec, const AgentSpec& as) : spec_(as) {
    if (as.kind == AgentKind::PuctCheckpoint) {
      Checkpoint ckpt = load_checkpoint(as.checkpoint_path);
      net_ = std::make_unique<Net>(load_network(ckpt, spec, codec));
      evaluator_ = std::make_unique<NetEvaluator>(spec, codec, *net_);
    }
    if (as.kind != AgentKind::Random && as.iterations < 1)
      throw ConfigError("search agents need at least one iteration");
    if (as.kind == AgentKind::PureUct && as.rollouts_per_iteration < 1)
      throw ConfigError("pure-uct agents need at least one rollout per iteration");
  }

  Move choose(const GameSpec& spec, const Codec& codec, const GameState& st,
              const std::vector<Move>& legal, uint64_t seed) const {
    if (spec_.kind == AgentKind::Random) {
      std::mt19937_64 rng(seed);
      return legal[uniform_index(rng, legal.size())];
    }
    SearchConfig cfg;
    cfg.mode = spec_.kind == AgentKind::PureUct ? SearchMode::PureUct : SearchMode::Puct;
    cfg.iterations = spec_.iterations;
    cfg.rollouts_per_iteration = spec_.kind == AgentKind::PureUct ? spec_.rollouts_per_iteration : 1;
    cfg.temperature = 0.0;  // strongest play: argmax by visit count
    return search(spec, codec, st, cfg, evaluator_.get(), seed).chosen;
  }

 private:
  AgentSpec spec_;
  std::unique_ptr<Net> net_;
  std::unique_ptr<NetEvaluator> evaluator_;
};

}  // namespace detail

// Plays a head-to-head match. Games come in pairs sharing a seed with seats
// swapped, so a systematic first-move advantage cancels; per-seat move seeds
// depend only on the game seed and the seat, never on the opponent.
inline MatchStats run_match(const GameSpec& spec, const AgentSpec& a, const AgentSpec& b,
                            int games, uint64_t base_seed) {
  if (games < 1) throw ContractError("a match needs at least one game");
  Codec codec = Codec::build(spec);
  detail::MatchAgent agent_a(spec, codec, a);
  detail::MatchAgent agent_b(spec, codec, b);

  MatchStats stats;
  stats.games = games;
  long total_plies = 0;
  for (int i = 0; i < games; ++i) {
    uint64_t game_seed = base_seed + static_cast<uint64_t>(i / 2);
    Player a_seat = (i % 2 == 0) ? 1 : 2;
    std::mt19937_64 seat_stream[2] = {std::mt19937_64(mix_seed(game_seed, 1)),
                                      std::mt19937_64(mix_seed(game_seed, 2))};

    GameState st = initial_state(spec);
    int cap = 4 * spec.tables.total_sites;
    int plies = 0;
    std::optional<Outcome> result;
    std::vector<Move> legal;
    while (!(result = outcome_or_moves(spec, st, legal))) {
      if (plies >= cap) {
        result = Outcome::draw();
        break;
      }
      uint64_t move_seed = seat_stream[st.mover - 1]();
      const detail::MatchAgent& agent = (st.mover == a_seat) ? agent_a : agent_b;
      Move m = agent.choose(spec, codec, st, legal, move_seed);
      apply_in_place(spec, st, m);
      ++plies;
    }

    GameRecord rec;
    rec.index = i;
    rec.seed = game_seed;
    rec.a_seat = a_seat;
    rec.score_a = result->for_seat(a_seat);
    rec.plies = plies;
    stats.records.push_back(rec);
    total_plies += plies;

    if (rec.score_a > 0)
      ++stats.wins_a;
    else if (rec.score_a < 0)
      ++stats.wins_b;
    else
      ++stats.draws;
    if (a_seat == 1) {
      if (rec.score_a > 0) ++stats.a_first_wins;
      else if (rec.score_a < 0) ++stats.a_first_losses;
      else ++stats.a_first_draws;
    } else {
      if (rec.score_a > 0) ++stats.a_second_wins;
      else if (rec.score_a < 0) ++stats.a_second_losses;
      else ++stats.a_second_draws;
    }
  }

  double successes = stats.wins_a + 0.5 * stats.draws;
  stats.win_percentage_a = 100.0 * successes / games;
  auto [lo, hi] = wilson_interval(successes, games);
  stats.wilson_low = lo;
  stats.wilson_high = hi;
  stats.mean_game_length = static_cast<double>(total_plies) / games;
  return stats;
}

}  // namespace lgp
