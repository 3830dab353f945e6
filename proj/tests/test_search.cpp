#include <map>
#include <random>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "lgp/dsl.hpp"
#include "lgp/engine.hpp"
#include "lgp/search.hpp"

using namespace lgp;

// Plays placements by target site through the legal-move list.
static GameState place_seq(const GameSpec& spec, GameState st, const std::vector<SiteId>& tos) {
  for (SiteId to : tos) {
    bool made = false;
    for (const Move& m : legal_moves(spec, st))
      if (m.kind == Move::Kind::Play && m.from == kNoSite && m.to == to) {
        st = apply(spec, st, m);
        made = true;
        break;
      }
    REQUIRE(made);
  }
  return st;
}

// Gomoku with one immediate winning placement for the mover: four stones on
// row 0 (sites 0..3), the fifth at site 4 still open.
static GameState one_ply_win_fixture(const GameSpec& spec) {
  return place_seq(spec, initial_state(spec), {0, 72, 1, 73, 2, 74, 3, 76});
}

static GameState konane_alias_fixture(const GameSpec& spec) {
  GameState st = initial_state(spec);
  for (auto& p : st.piece) p = 0;
  st.piece[0] = 1;
  for (SiteId s : {1, 8, 6, 13}) st.piece[s] = 2;
  st.move_number = 4;
  st.last_moves = {Move::pass_move(), Move::pass_move()};
  st.mover = 1;
  return st;
}

TEST_CASE("single-iteration search picks a legal move with one visit") {
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  SearchConfig cfg;
  cfg.iterations = 1;
  cfg.rollouts_per_iteration = 1;
  SearchResult r = search(spec, codec, initial_state(spec), cfg, nullptr, 7);
  long total = 0;
  for (const auto& [m, v] : r.visits) total += v;
  REQUIRE(total == 1);
  REQUIRE(r.visits.count(r.chosen) == 1);
  auto legal = legal_moves(spec, initial_state(spec));
  REQUIRE(std::find(legal.begin(), legal.end(), r.chosen) != legal.end());
}

TEST_CASE("visit conservation and bounded values in both modes") {
  GameSpec spec = load_builtin("breakthrough-6");
  Codec codec = Codec::build(spec);
  GameState st = initial_state(spec);
  UniformEvaluator uniform(spec, codec);

  SearchConfig pure;
  pure.iterations = 60;
  pure.rollouts_per_iteration = 2;
  SearchConfig puct;
  puct.mode = SearchMode::Puct;
  puct.iterations = 60;

  for (const SearchConfig* cfg : {&pure, &puct}) {
    SearchResult r = search(spec, codec, st, *cfg, &uniform, 11);
    long total = 0;
    for (const auto& [m, v] : r.visits) {
      REQUIRE(v >= 0);
      total += v;
    }
    REQUIRE(total == cfg->iterations);
    REQUIRE(r.value_estimate >= -1.0);
    REQUIRE(r.value_estimate <= 1.0);
    double target_sum = 0;
    for (const auto& [flat, t] : r.logit_targets) target_sum += t;
    REQUIRE_THAT(target_sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("search rejects terminal states and puct without an evaluator") {
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  GameState won = place_seq(spec, initial_state(spec), {0, 72, 1, 73, 2, 74, 3, 76, 4});
  REQUIRE(outcome(spec, won).has_value());
  SearchConfig cfg;
  cfg.iterations = 10;
  REQUIRE_THROWS_AS(search(spec, codec, won, cfg, nullptr, 1), ContractError);

  SearchConfig puct;
  puct.mode = SearchMode::Puct;
  REQUIRE_THROWS_AS(search(spec, codec, initial_state(spec), puct, nullptr, 1), ContractError);
}

TEST_CASE("search results are seed-deterministic") {
  GameSpec spec = load_builtin("hex-5");
  Codec codec = Codec::build(spec);
  GameState st = apply(spec, initial_state(spec), legal_moves(spec, initial_state(spec))[9]);
  UniformEvaluator uniform(spec, codec);

  SearchConfig cfg;
  cfg.mode = SearchMode::Puct;
  cfg.iterations = 80;
  cfg.dirichlet = DirichletNoise{};
  cfg.temperature = 1.0;
  SearchResult a = search(spec, codec, st, cfg, &uniform, 123);
  SearchResult b = search(spec, codec, st, cfg, &uniform, 123);
  REQUIRE(a.visits == b.visits);
  REQUIRE(a.chosen == b.chosen);
  REQUIRE(a.value_estimate == b.value_estimate);
  REQUIRE(a.logit_targets == b.logit_targets);

  SearchConfig pure;
  pure.iterations = 50;
  pure.rollouts_per_iteration = 3;
  SearchResult c = search(spec, codec, st, pure, nullptr, 9);
  SearchResult d = search(spec, codec, st, pure, nullptr, 9);
  REQUIRE(c.visits == d.visits);
  REQUIRE(c.chosen == d.chosen);
}

TEST_CASE("temperature zero breaks visit ties by move order") {
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  GameState st = initial_state(spec);
  SearchConfig cfg;
  cfg.iterations = 2;  // two children, one visit each
  cfg.rollouts_per_iteration = 1;
  SearchResult r = search(spec, codec, st, cfg, nullptr, 3);
  int max_visits = 0;
  for (const auto& [m, v] : r.visits) max_visits = std::max(max_visits, v);
  REQUIRE(max_visits == 1);
  REQUIRE(r.chosen == legal_moves(spec, st).front());
}

TEST_CASE("aliased moves keep distinct branches but one combined target") {
  GameSpec spec = load_builtin("konane-6");
  Codec codec = Codec::build(spec);
  GameState st = konane_alias_fixture(spec);
  UniformEvaluator uniform(spec, codec);

  SearchConfig cfg;
  cfg.mode = SearchMode::Puct;
  cfg.iterations = 90;
  SearchResult r = search(spec, codec, st, cfg, &uniform, 17);

  // Six distinct moves in the tree, three alias classes in the targets.
  REQUIRE(r.visits.size() == 6);
  REQUIRE(r.logit_targets.size() == 3);

  // For every class: normalized target times total visits equals the exact
  // integer visit sum of its members.
  auto classes = logit_partition(spec, codec.grid, codec.move, legal_moves(spec, st));
  long total = 0;
  for (const auto& [m, v] : r.visits) total += v;
  REQUIRE(total == cfg.iterations);
  for (const auto& [flat, members] : classes) {
    long member_sum = 0;
    for (const Move& m : members) member_sum += r.visits.at(m);
    REQUIRE(r.logit_targets.at(flat) ==
            static_cast<double>(member_sum) / static_cast<double>(total));
  }
}

namespace {

// Hands almost all prior mass to one designated move.
class SpikeEvaluator : public Evaluator {
 public:
  explicit SpikeEvaluator(Move spike) : spike_(spike) {}
  double evaluate(const GameState&, const std::vector<Move>& moves,
                  std::vector<double>& priors) override {
    priors.assign(moves.size(), 0.001);
    for (size_t i = 0; i < moves.size(); ++i)
      if (moves[i] == spike_) priors[i] = 0.95;
    return 0.0;
  }

 private:
  Move spike_;
};

}  // namespace

TEST_CASE("puct follows strong priors") {
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  GameState st = initial_state(spec);
  Move spike = legal_moves(spec, st)[40];  // center placement
  SpikeEvaluator eval(spike);
  SearchConfig cfg;
  cfg.mode = SearchMode::Puct;
  cfg.iterations = 100;
  SearchResult r = search(spec, codec, st, cfg, &eval, 5);
  int spike_visits = r.visits.at(spike);
  for (const auto& [m, v] : r.visits)
    if (!(m == spike)) REQUIRE(spike_visits > v);
  REQUIRE(r.chosen == spike);
}

TEST_CASE("terminal children dominate through exact outcome backups") {
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  GameState st = one_ply_win_fixture(spec);
  UniformEvaluator uniform(spec, codec);
  SearchConfig cfg;
  cfg.mode = SearchMode::Puct;
  cfg.iterations = 200;
  SearchResult r = search(spec, codec, st, cfg, &uniform, 1);

  Move win = Move::pass_move();
  for (const Move& m : legal_moves(spec, st))
    if (m.to == 4) win = m;
  REQUIRE(r.chosen == win);
  int win_visits = r.visits.at(win);
  for (const auto& [m, v] : r.visits)
    if (!(m == win)) REQUIRE(win_visits > v);
  REQUIRE(r.value_estimate > 0.5);
}

TEST_CASE("pure uct finds the one-ply gomoku win across seeds") {
  // Reduced-seed twin of the acceptance fixture (400 iterations, 10 rollouts,
  // >= 95/100 there); here 20 seeds keep the suite fast.
  GameSpec spec = load_builtin("gomoku-9");
  Codec codec = Codec::build(spec);
  GameState st = one_ply_win_fixture(spec);
  Move win = Move::pass_move();
  for (const Move& m : legal_moves(spec, st))
    if (m.to == 4) win = m;

  SearchConfig cfg;
  cfg.iterations = 400;
  cfg.rollouts_per_iteration = 10;
  int hits = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SearchResult r = search(spec, codec, st, cfg, nullptr, seed);
    if (r.chosen == win) ++hits;
  }
  REQUIRE(hits >= 19);
}

TEST_CASE("dirichlet noise perturbs the search but stays seeded") {
  GameSpec spec = load_builtin("hex-5");
  Codec codec = Codec::build(spec);
  GameState st = initial_state(spec);
  UniformEvaluator uniform(spec, codec);
  SearchConfig noisy;
  noisy.mode = SearchMode::Puct;
  noisy.iterations = 120;
  noisy.dirichlet = DirichletNoise{};
  SearchConfig quiet = noisy;
  quiet.dirichlet.reset();

  SearchResult n1 = search(spec, codec, st, noisy, &uniform, 31);
  SearchResult n2 = search(spec, codec, st, noisy, &uniform, 31);
  SearchResult q = search(spec, codec, st, quiet, &uniform, 31);
  REQUIRE(n1.visits == n2.visits);
  REQUIRE_FALSE(n1.visits == q.visits);
}

TEST_CASE("network evaluator rejects a mismatched game") {
  GameSpec hex = load_builtin("hex-5");
  Codec chex = Codec::build(hex);
  Net net = init_network(chex, NetworkConfig{}, 2);
  GameSpec bt = load_builtin("breakthrough-6");
  Codec cbt = Codec::build(bt);
  REQUIRE_THROWS_AS(NetEvaluator(bt, cbt, net), ConfigError);
  REQUIRE_NOTHROW(NetEvaluator(hex, chex, net));
}

TEST_CASE("puct with a real network runs end to end deterministically") {
  GameSpec spec = load_builtin("hex-5");
  Codec codec = Codec::build(spec);
  Net net = init_network(codec, NetworkConfig{}, 77);
  NetEvaluator eval_a(spec, codec, net), eval_b(spec, codec, net);
  SearchConfig cfg;
  cfg.mode = SearchMode::Puct;
  cfg.iterations = 40;
  GameState st = initial_state(spec);
  SearchResult a = search(spec, codec, st, cfg, &eval_a, 13);
  SearchResult b = search(spec, codec, st, cfg, &eval_b, 13);
  REQUIRE(a.visits == b.visits);
  REQUIRE(a.chosen == b.chosen);
  REQUIRE(a.value_estimate == b.value_estimate);
}

TEST_CASE("random rollouts: terminal passthrough, determinism, forced loss") {
  GameSpec gomoku = load_builtin("gomoku-9");
  GameState won = place_seq(gomoku, initial_state(gomoku), {0, 72, 1, 73, 2, 74, 3, 76, 4});
  std::mt19937_64 rng(1);
  // Terminal input: seat 1 just won, and it is seat 2's turn.
  REQUIRE(random_rollout(gomoku, won, rng) == -1.0);

  // Identical seeds give identical playout results.
  GameState st = initial_state(gomoku);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 r1(seed), r2(seed);
    REQUIRE(random_rollout(gomoku, st, r1) == random_rollout(gomoku, st, r2));
    REQUIRE(r1() == r2());  // same amount of randomness consumed
  }

  // Squava position where every remaining placement completes an exact-3
  // line for the mover: sites 2, 14, and 20 are open; each closes a 3-line
  // whose 4-extension is blocked. The rollout must return the mover's loss.
  GameSpec squava = load_builtin("squava");
  GameState trap = initial_state(squava);
  for (SiteId s = 0; s < 25; ++s) trap.piece[s] = 2;
  for (SiteId s : {0, 1, 10, 15, 12, 13}) trap.piece[s] = 1;
  for (SiteId s : {2, 14, 20}) trap.piece[s] = 0;
  trap.mover = 1;
  trap.move_number = 22;
  trap.last_moves = {Move::pass_move(), Move::pass_move()};
  REQUIRE(legal_moves(squava, trap).size() == 3);
  for (uint64_t seed = 0; seed < 8; ++seed) {
    std::mt19937_64 r(seed);
    REQUIRE(random_rollout(squava, trap, r) == -1.0);
  }
}

TEST_CASE("uniform evaluator spreads priors over distinct logits") {
  GameSpec spec = load_builtin("konane-6");
  Codec codec = Codec::build(spec);
  GameState st = konane_alias_fixture(spec);
  UniformEvaluator uniform(spec, codec);
  auto moves = legal_moves(spec, st);
  std::vector<double> priors;
  double value = uniform.evaluate(st, moves, priors);
  REQUIRE(value == 0.0);
  REQUIRE(priors.size() == 6);
  for (double p : priors) REQUIRE(p == 1.0 / 3.0);  // three alias classes
}
