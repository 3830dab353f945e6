#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "lgp/engine.hpp"
#include "lgp/net.hpp"
#include "lgp/tensor.hpp"

namespace lgp {

namespace detail {

// Unbiased bounded draw; rejection keeps it exact and portable.
inline size_t uniform_index(std::mt19937_64& rng, size_t n) {
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<size_t>(x % n);
}

inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;  // open (0, 1)
}

inline double normal01(std::mt19937_64& rng) {
  double u = uniform01(rng), v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

// Marsaglia-Tsang gamma sampler, written out so draws are identical on every
// platform (the standard library's distribution sequences are not pinned).
inline double gamma_draw(std::mt19937_64& rng, double alpha) {
  if (alpha < 1.0) return gamma_draw(rng, alpha + 1.0) * std::pow(uniform01(rng), 1.0 / alpha);
  double d = alpha - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = normal01(rng);
    double v = 1.0 + c * x;
    if (v <= 0) continue;
    v = v * v * v;
    double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace detail

// Uniform random playout. Returns the terminal score from the perspective of
// the seat to move in the input state; a playout that survives 4x the site
// count in plies is scored 0.
inline double random_rollout(const GameSpec& spec, GameState st, std::mt19937_64& rng) {
  Player seat = st.mover;
  int cap = 4 * spec.tables.total_sites;
  std::vector<Move> moves;
  for (int ply = 0; ply <= cap; ++ply) {
    if (auto end = outcome_or_moves(spec, st, moves)) return end->for_seat(seat);
    apply_in_place(spec, st, moves[detail::uniform_index(rng, moves.size())]);
  }
  return 0.0;
}

// Position evaluator seen by the search: one prior per move (aliased moves
// share their logit's probability) plus a value for the mover. Instances may
// hold scratch buffers — use one per thread; the data they read is immutable.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double evaluate(const GameState& st, const std::vector<Move>& moves,
                          std::vector<double>& priors) = 0;
};

// Priors flat over the distinct legal logits, value always 0; the weakest
// honest prior and the reference point for search tests.
class UniformEvaluator : public Evaluator {
 public:
  UniformEvaluator(const GameSpec& spec, const Codec& codec) : spec_(spec), codec_(codec) {}

  double evaluate(const GameState&, const std::vector<Move>& moves,
                  std::vector<double>& priors) override {
    flats_.clear();
    for (const Move& m : moves)
      flats_.push_back(flat_logit(encode_move(spec_, codec_.grid, codec_.move, m), codec_.grid));
    std::vector<int> distinct = flats_;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    priors.assign(moves.size(), 1.0 / static_cast<double>(distinct.size()));
    return 0.0;
  }

 private:
  const GameSpec& spec_;
  const Codec& codec_;
  std::vector<int> flats_;
};

// Network-backed evaluator: encodes the state, runs the policy/value heads,
// and hands each move the probability of its logit.
class NetEvaluator : public Evaluator {
 public:
  NetEvaluator(const GameSpec& spec, const Codec& codec, const Net& net)
      : spec_(spec), codec_(codec), net_(net) {
    if (net.C != codec.state.C || net.H != codec.grid.height || net.W != codec.grid.width ||
        net.A != codec.move.A)
      throw ConfigError("network shape does not match the game's tensor layouts");
  }

  double evaluate(const GameState& st, const std::vector<Move>& moves,
                  std::vector<double>& priors) override {
    flats_.resize(moves.size());
    for (size_t i = 0; i < moves.size(); ++i)
      flats_[i] = flat_logit(encode_move(spec_, codec_.grid, codec_.move, moves[i]), codec_.grid);
    legal_ = flats_;
    std::sort(legal_.begin(), legal_.end());
    legal_.erase(std::unique(legal_.begin(), legal_.end()), legal_.end());

    StateTensor x = encode_state(spec_, codec_.grid, codec_.state, st);
    Evaluation ev = forward(net_, x, legal_, ws_);
    priors.resize(moves.size());
    for (size_t i = 0; i < moves.size(); ++i) {
      size_t k = std::lower_bound(legal_.begin(), legal_.end(), flats_[i]) - legal_.begin();
      priors[i] = ev.probs[k];
    }
    return ev.value;
  }

 private:
  const GameSpec& spec_;
  const Codec& codec_;
  const Net& net_;
  Workspace ws_;
  std::vector<int> flats_, legal_;
};

enum class SearchMode { PureUct, Puct };

struct DirichletNoise {
  double alpha = 0.0;  // <= 0 selects 10 / (root branching)
  double weight = 0.25;
};

struct SearchConfig {
  SearchMode mode = SearchMode::PureUct;
  int iterations = 400;
  int rollouts_per_iteration = 10;      // pure mode only
  double exploration_constant = 0.0;    // 0 selects the per-mode default
  std::optional<DirichletNoise> dirichlet;  // self-play root exploration
  double temperature = 0.0;
};

struct SearchResult {
  std::map<Move, int> visits;
  Move chosen = Move::pass_move();
  double value_estimate = 0.0;
  std::map<int, double> logit_targets;  // flat logit -> normalized visit mass
};

namespace detail {

constexpr double kUctDefaultExploration = 1.4142135623730951;  // sqrt 2
constexpr double kPuctDefaultExploration = 1.5;

struct SearchNode {
  GameState state;
  Move edge = Move::pass_move();
  double prior = 0.0;
  int first_child = -1;
  int num_children = 0;
  int visits = 0;
  double value_sum = 0.0;  // accumulated from this node's mover's perspective
  bool expanded = false;
  std::optional<Outcome> terminal;
};

}  // namespace detail

// Monte Carlo tree search over distinct moves. Aliased moves get their own
// branches and visit counts; only the reported logit targets re-merge them.
inline SearchResult search(const GameSpec& spec, const Codec& codec, const GameState& root_state,
                           const SearchConfig& cfg, Evaluator* evaluator, uint64_t seed) {
  if (cfg.iterations < 1) throw ContractError("search: iterations must be positive");
  bool puct = cfg.mode == SearchMode::Puct;
  if (puct && !evaluator) throw ContractError("puct search requires an evaluator");
  if (!puct && cfg.rollouts_per_iteration < 1)
    throw ContractError("pure uct requires rollouts_per_iteration >= 1");
  double c = cfg.exploration_constant > 0
                 ? cfg.exploration_constant
                 : (puct ? detail::kPuctDefaultExploration : detail::kUctDefaultExploration);

  std::mt19937_64 rng(seed);
  std::vector<detail::SearchNode> arena;
  arena.reserve(static_cast<size_t>(cfg.iterations) + 2);
  detail::SearchNode root_node;
  root_node.state = root_state;
  arena.push_back(std::move(root_node));

  std::vector<Move> moves;
  std::vector<double> priors;

  // Creates the children of arena[at]; records the terminal outcome instead
  // when the position is over. Returns the evaluator value in puct mode.
  auto expand = [&](int at) -> double {
    detail::SearchNode& n = arena[at];
    n.expanded = true;
    if (auto end = outcome_or_moves(spec, n.state, moves)) {
      n.terminal = *end;
      return 0.0;
    }
    double value = 0.0;
    if (puct)
      value = evaluator->evaluate(n.state, moves, priors);
    else
      priors.assign(moves.size(), 0.0);
    int first = static_cast<int>(arena.size());
    int count = static_cast<int>(moves.size());
    for (size_t i = 0; i < moves.size(); ++i) {
      detail::SearchNode child;
      child.state = apply(spec, arena[at].state, moves[i]);
      child.edge = moves[i];
      child.prior = priors[i];
      arena.push_back(std::move(child));
    }
    arena[at].first_child = first;
    arena[at].num_children = count;
    return value;
  };

  expand(0);
  if (arena[0].terminal) throw ContractError("search called on a terminal state");

  if (puct && cfg.dirichlet) {
    double alpha = cfg.dirichlet->alpha > 0
                       ? cfg.dirichlet->alpha
                       : 10.0 / static_cast<double>(arena[0].num_children);
    double w = cfg.dirichlet->weight;
    std::vector<double> noise(arena[0].num_children);
    double total = 0.0;
    for (double& x : noise) total += (x = detail::gamma_draw(rng, alpha));
    for (int i = 0; i < arena[0].num_children; ++i) {
      detail::SearchNode& child = arena[arena[0].first_child + i];
      child.prior = (1.0 - w) * child.prior + w * noise[i] / total;
    }
  }

  auto select_child = [&](int at) {
    const detail::SearchNode& n = arena[at];
    int best = n.first_child;
    double best_score = -1e300;
    for (int i = 0; i < n.num_children; ++i) {
      const detail::SearchNode& child = arena[n.first_child + i];
      double score;
      if (puct) {
        double q = child.visits ? -child.value_sum / child.visits : 0.0;
        score = q + c * child.prior * std::sqrt(static_cast<double>(n.visits)) /
                        (1.0 + child.visits);
      } else {
        if (child.visits == 0) return n.first_child + i;  // first untried, in move order
        score = -child.value_sum / child.visits +
                c * std::sqrt(std::log(static_cast<double>(std::max(n.visits, 1))) / child.visits);
      }
      if (score > best_score) {
        best_score = score;
        best = n.first_child + i;
      }
    }
    return best;
  };

  std::vector<int> path;
  for (int it = 0; it < cfg.iterations; ++it) {
    path.clear();
    int cur = 0;
    path.push_back(cur);
    double leaf_value = 0.0;
    while (true) {
      detail::SearchNode& n = arena[cur];
      if (n.terminal) {
        // Exact game outcome, re-backed on every later visit.
        leaf_value = n.terminal->for_seat(n.state.mover);
        break;
      }
      if (!n.expanded) {
        double v = expand(cur);
        detail::SearchNode& fresh = arena[cur];  // expand may reallocate
        if (fresh.terminal) {
          leaf_value = fresh.terminal->for_seat(fresh.state.mover);
        } else if (puct) {
          leaf_value = v;
        } else {
          double sum = 0.0;
          for (int r = 0; r < cfg.rollouts_per_iteration; ++r)
            sum += random_rollout(spec, fresh.state, rng);
          leaf_value = sum / cfg.rollouts_per_iteration;
        }
        break;
      }
      cur = select_child(cur);
      path.push_back(cur);
    }
    Player leaf_mover = arena[path.back()].state.mover;
    for (int idx : path) {
      detail::SearchNode& n = arena[idx];
      n.visits += 1;
      n.value_sum += n.state.mover == leaf_mover ? leaf_value : -leaf_value;
    }
  }

  SearchResult result;
  const detail::SearchNode& root = arena[0];
  long total_visits = 0;
  std::map<int, long> logit_visits;
  for (int i = 0; i < root.num_children; ++i) {
    const detail::SearchNode& child = arena[root.first_child + i];
    result.visits[child.edge] = child.visits;
    total_visits += child.visits;
    int flat = flat_logit(encode_move(spec, codec.grid, codec.move, child.edge), codec.grid);
    logit_visits[flat] += child.visits;
  }
  if (total_visits > 0)
    for (const auto& [flat, v] : logit_visits)
      result.logit_targets[flat] = static_cast<double>(v) / static_cast<double>(total_visits);
  result.value_estimate = root.visits ? root.value_sum / root.visits : 0.0;

  // Move choice: sample visits^(1/T), collapsing to argmax at temperature 0.
  int chosen_index = 0;
  if (cfg.temperature <= 0.0) {
    int best_visits = -1;
    for (int i = 0; i < root.num_children; ++i) {
      int v = arena[root.first_child + i].visits;
      if (v > best_visits) {
        best_visits = v;
        chosen_index = i;
      }
    }
  } else {
    std::vector<double> logw(root.num_children);
    double best = -1e300;
    for (int i = 0; i < root.num_children; ++i) {
      int v = arena[root.first_child + i].visits;
      logw[i] = v > 0 ? std::log(static_cast<double>(v)) / cfg.temperature : -1e300;
      best = std::max(best, logw[i]);
    }
    double total = 0.0;
    for (double& x : logw) total += (x = std::exp(x - best));
    double u = detail::uniform01(rng) * total;
    double acc = 0.0;
    for (int i = 0; i < root.num_children; ++i) {
      acc += logw[i];
      if (u <= acc) {
        chosen_index = i;
        break;
      }
    }
  }
  result.chosen = arena[root.first_child + chosen_index].edge;
  return result;
}

}  // namespace lgp
