#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lgp/dsl.hpp"
#include "lgp/training.hpp"

using namespace lgp;
namespace fs = std::filesystem;

namespace {

NetworkConfig tiny_net() {
  NetworkConfig cfg;
  cfg.trunk_channels = 8;
  cfg.residual_blocks = 1;
  cfg.value_hidden = 8;
  return cfg;
}

TrainConfig tiny_train() {
  TrainConfig cfg;
  cfg.network = tiny_net();
  cfg.selfplay_iterations = 8;
  cfg.batch_size = 8;
  cfg.steps_per_game = 3;
  cfg.steps_per_checkpoint = 3;
  cfg.total_steps = 6;
  cfg.buffer_capacity = 128;
  cfg.seed = 11;
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fresh_dir(const std::string& name) {
  fs::path dir = fs::path("/tmp") / name;
  fs::remove_all(dir);
  return dir.string();
}

std::vector<nlohmann::json> read_metrics(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<nlohmann::json> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  return lines;
}

}  // namespace

TEST_CASE("self-play games record alternating movers and normalized targets") {
  GameSpec spec = load_builtin("hex-5");
  Codec codec = Codec::build(spec);
  TrainConfig cfg = tiny_train();
  Net net = init_network(codec, cfg.network, 5);

  Trajectory traj = selfplay_game(spec, codec, net, cfg, 42);
  REQUIRE(traj.game_name == "hex-5");
  REQUIRE(traj.seed == 42);
  REQUIRE(!traj.steps.empty());
  // Hex cannot end in a draw; the length cap is nowhere near reachable.
  REQUIRE(traj.final_outcome != Outcome::draw());

  for (size_t i = 0; i < traj.steps.size(); ++i) {
    const TrajectoryStep& step = traj.steps[i];
    CHECK(step.mover == static_cast<Player>(1 + i % 2));
    CHECK(step.x.C == codec.state.C);
    double sum = 0.0;
    for (const auto& [flat, mass] : step.logit_targets) {
      CHECK(mass >= 0.0);
      sum += mass;
    }
    CHECK(sum == Catch::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("self-play trajectories are reproducible per seed") {
  GameSpec spec = load_builtin("hex-5");
  Codec codec = Codec::build(spec);
  TrainConfig cfg = tiny_train();
  Net net = init_network(codec, cfg.network, 5);

  Trajectory a = selfplay_game(spec, codec, net, cfg, 9);
  Trajectory b = selfplay_game(spec, codec, net, cfg, 9);
  REQUIRE(a.steps.size() == b.steps.size());
  REQUIRE(a.final_outcome == b.final_outcome);
  for (size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].logit_targets == b.steps[i].logit_targets);
    CHECK(a.steps[i].x.data == b.steps[i].x.data);
  }

  Trajectory c = selfplay_game(spec, codec, net, cfg, 10);
  bool same = a.steps.size() == c.steps.size();
  if (same)
    for (size_t i = 0; i < a.steps.size(); ++i)
      same = same && a.steps[i].logit_targets == c.steps[i].logit_targets;
  CHECK(!same);
}

TEST_CASE("training samples carry the outcome from each mover's perspective") {
  TrajectoryStep step;
  step.logit_targets = {{3, 0.25}, {7, 0.75}};
  step.mover = 2;
  TrainSample s = to_train_sample(step, Outcome::win_for(1));
  CHECK(s.z == -1.0);
  REQUIRE(s.legal == std::vector<int>{3, 7});
  CHECK(s.target[0] == Catch::Approx(0.25f));
  CHECK(s.target[1] == Catch::Approx(0.75f));

  step.mover = 1;
  CHECK(to_train_sample(step, Outcome::win_for(1)).z == 1.0);
  CHECK(to_train_sample(step, Outcome::draw()).z == 0.0);
}

TEST_CASE("replay buffer evicts strictly oldest-first at capacity") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    TrainSample s;
    s.z = i;
    buf.push(s);
    CHECK(buf.size() <= 3);
  }
  REQUIRE(buf.size() == 3);
  CHECK(buf.at(0).z == 2.0);
  CHECK(buf.at(1).z == 3.0);
  CHECK(buf.at(2).z == 4.0);

  std::mt19937_64 r1(7), r2(7);
  auto b1 = buf.sample_batch(10, r1);
  auto b2 = buf.sample_batch(10, r2);
  REQUIRE(b1.size() == 10);
  for (size_t i = 0; i < b1.size(); ++i) CHECK(b1[i].z == b2[i].z);

  CHECK_THROWS_AS(ReplayBuffer(0), ContractError);
  ReplayBuffer empty(4);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(empty.sample_batch(1, rng), ContractError);
}

TEST_CASE("zero training steps emit exactly the initial checkpoint") {
  GameSpec spec = load_builtin("hex-5");
  TrainConfig cfg = tiny_train();
  cfg.total_steps = 0;
  std::string dir = fresh_dir("lgp_train_zero");

  TrainReport report = train(spec, cfg, dir);
  CHECK(report.steps == 0);
  CHECK(report.games == 0);
  CHECK(report.final_checkpoint == dir + "/checkpoint-000000.lpgc");
  REQUIRE(fs::exists(report.final_checkpoint));

  int checkpoints = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".lpgc") ++checkpoints;
  CHECK(checkpoints == 1);
  CHECK(read_metrics(dir + "/metrics.jsonl").empty());
  CHECK(read_file(dir + "/config.txt").find("game=hex-5") != std::string::npos);

  // The initial checkpoint restores to the freshly initialized network.
  Codec codec = Codec::build(spec);
  Net fresh = init_network(codec, cfg.network, cfg.seed);
  Net loaded = load_network(load_checkpoint(report.final_checkpoint), spec, codec);
  CHECK(loaded.params == fresh.params);
}

TEST_CASE("single-worker training reruns are bit-identical") {
  GameSpec spec = load_builtin("hex-5");
  TrainConfig cfg = tiny_train();
  std::string d1 = fresh_dir("lgp_train_det1");
  std::string d2 = fresh_dir("lgp_train_det2");

  TrainReport r1 = train(spec, cfg, d1);
  TrainReport r2 = train(spec, cfg, d2);
  CHECK(r1.steps == cfg.total_steps);
  CHECK(r1.games == r2.games);

  CHECK(read_file(d1 + "/metrics.jsonl") == read_file(d2 + "/metrics.jsonl"));
  CHECK(read_file(d1 + "/config.txt") == read_file(d2 + "/config.txt"));
  for (const char* name : {"checkpoint-000000.lpgc", "checkpoint-000003.lpgc",
                           "checkpoint-000006.lpgc"}) {
    INFO(name);
    REQUIRE(fs::exists(d1 + "/" + name));
    CHECK(read_file(d1 + "/" + name) == read_file(d2 + "/" + name));
  }
}

TEST_CASE("metrics log reports every step with a bounded buffer") {
  GameSpec spec = load_builtin("hex-5");
  TrainConfig cfg = tiny_train();
  cfg.buffer_capacity = 24;  // smaller than the samples a few games produce
  cfg.total_steps = 8;
  cfg.steps_per_checkpoint = 4;
  std::string dir = fresh_dir("lgp_train_metrics");

  TrainReport report = train(spec, cfg, dir);
  auto lines = read_metrics(dir + "/metrics.jsonl");
  REQUIRE(lines.size() == 8);
  int games_seen = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    CHECK(line["step"] == static_cast<int>(i) + 1);
    CHECK(line["buffer_size"].get<int>() <= 24);
    CHECK(line["policy_loss"].get<double>() > 0.0);
    CHECK(line["value_loss"].get<double>() >= 0.0);
    CHECK(line["total_loss"].get<double>() >=
          line["policy_loss"].get<double>() + line["value_loss"].get<double>());
    CHECK(line["games"].get<int>() >= games_seen);
    games_seen = line["games"].get<int>();
  }
  CHECK(games_seen == report.games);

  // Checkpoints at 0, 4, 8; snapshot version advances after each publish.
  for (const char* name :
       {"checkpoint-000000.lpgc", "checkpoint-000004.lpgc", "checkpoint-000008.lpgc"})
    CHECK(fs::exists(dir + "/" + std::string(name)));
  CHECK(lines.front()["snapshot"] == 0);
  CHECK(lines.back()["snapshot"].get<int>() >= 1);

  // Final checkpoint metadata records the step and restores cleanly.
  Checkpoint ckpt = load_checkpoint(report.final_checkpoint);
  CHECK(ckpt.meta.at("step") == "8");
  Codec codec = Codec::build(spec);
  OptimizerState opt;
  Net net = load_network(ckpt, spec, codec, &opt);
  CHECK(net.params.arrays.size() == opt.velocity.size());
}

TEST_CASE("a brief training run reduces the loss it started with") {
  GameSpec spec = load_builtin("hex-5");
  TrainConfig cfg = tiny_train();
  cfg.selfplay_iterations = 24;
  cfg.batch_size = 16;
  cfg.steps_per_game = 6;
  cfg.total_steps = 60;
  cfg.steps_per_checkpoint = 30;
  cfg.buffer_capacity = 512;
  cfg.learning_rate = 0.02;
  cfg.seed = 3;
  std::string dir = fresh_dir("lgp_train_smoke");

  TrainReport report = train(spec, cfg, dir);
  REQUIRE(report.steps == 60);
  CHECK(report.last_total_loss < report.first_total_loss);
}

TEST_CASE("multi-worker training produces the requested number of steps") {
  GameSpec spec = load_builtin("hex-5");
  TrainConfig cfg = tiny_train();
  cfg.workers = 2;
  cfg.total_steps = 4;
  cfg.steps_per_game = 2;
  cfg.steps_per_checkpoint = 2;
  std::string dir = fresh_dir("lgp_train_workers");

  TrainReport report = train(spec, cfg, dir);
  CHECK(report.steps == 4);
  CHECK(read_metrics(dir + "/metrics.jsonl").size() == 4);
  CHECK(fs::exists(report.final_checkpoint));
}

TEST_CASE("invalid training configs are rejected up front") {
  TrainConfig cfg = tiny_train();
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_train();
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = tiny_train();
  cfg.total_steps = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
