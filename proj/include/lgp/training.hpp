#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lgp/engine.hpp"
#include "lgp/net.hpp"
#include "lgp/search.hpp"
#include "lgp/tensor.hpp"

namespace lgp {

// One self-play game, recorded move by move for training.
struct TrajectoryStep {
  StateTensor x;
  std::map<int, double> logit_targets;
  Player mover = 1;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Outcome final_outcome;
  std::string game_name;
  uint64_t seed = 0;
};

// Oldest-first bounded sample store.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("replay buffer capacity must be positive");
  }

  void push(TrainSample sample) {
    entries_.push_back(std::move(sample));
    if (entries_.size() > capacity_) entries_.pop_front();
  }

  size_t size() const { return entries_.size(); }
  size_t capacity() const { return capacity_; }
  const TrainSample& at(size_t i) const { return entries_[i]; }

  std::vector<TrainSample> sample_batch(size_t n, std::mt19937_64& rng) const {
    if (entries_.empty()) throw ContractError("cannot sample from an empty replay buffer");
    std::vector<TrainSample> batch;
    batch.reserve(n);
    for (size_t i = 0; i < n; ++i)
      batch.push_back(entries_[detail::uniform_index(rng, entries_.size())]);
    return batch;
  }

 private:
  size_t capacity_;
  std::deque<TrainSample> entries_;
};

struct TrainConfig {
  int selfplay_iterations = 400;   // search iterations per self-play move
  int workers = 1;
  int buffer_capacity = 4096;
  int batch_size = 64;
  int steps_per_checkpoint = 1000;
  int total_steps = 10000;
  int steps_per_game = 8;          // optimizer steps paced per ingested game
  int temperature_plies = 8;       // temperature 1.0 below this ply, then 0
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  uint64_t seed = 1;
  // Training default: a compact trunk. Self-play game volume matters more
  // than raw capacity on desk-scale budgets, and network cost sets the pace.
  NetworkConfig network{16, 3, 16};

  void validate() const {
    if (selfplay_iterations < 1 || workers < 1 || buffer_capacity < 1 || batch_size < 1 ||
        steps_per_checkpoint < 1 || total_steps < 0 || steps_per_game < 1 ||
        temperature_plies < 0)
      throw ConfigError("training config fields must be positive");
  }
};

// Plays one complete game with network-guided search, exploration noise on,
// and the self-play temperature schedule. A game hitting the length cap is
// scored as a draw but still recorded.
inline Trajectory selfplay_game(const GameSpec& spec, const Codec& codec, const Net& net,
                                const TrainConfig& config, uint64_t seed) {
  NetEvaluator evaluator(spec, codec, net);
  Trajectory traj;
  traj.game_name = spec.name;
  traj.seed = seed;

  GameState st = initial_state(spec);
  int cap = 4 * spec.tables.total_sites;
  int ply = 0;
  std::optional<Outcome> result;
  while (!(result = outcome(spec, st))) {
    if (ply >= cap) {
      result = Outcome::draw();
      break;
    }
    SearchConfig cfg;
    cfg.mode = SearchMode::Puct;
    cfg.iterations = config.selfplay_iterations;
    cfg.dirichlet = DirichletNoise{};
    cfg.temperature = ply < config.temperature_plies ? 1.0 : 0.0;
    SearchResult r = search(spec, codec, st, cfg, &evaluator, mix_seed(seed, ply));

    TrajectoryStep step;
    step.x = encode_state(spec, codec.grid, codec.state, st);
    step.logit_targets = std::move(r.logit_targets);
    step.mover = st.mover;
    traj.steps.push_back(std::move(step));

    st = apply(spec, st, r.chosen);
    ++ply;
  }
  traj.final_outcome = *result;
  return traj;
}

inline TrainSample to_train_sample(const TrajectoryStep& step, const Outcome& final_outcome) {
  TrainSample s;
  s.x = step.x;
  s.legal.reserve(step.logit_targets.size());
  s.target.reserve(step.logit_targets.size());
  for (const auto& [flat, mass] : step.logit_targets) {
    s.legal.push_back(flat);
    s.target.push_back(static_cast<float>(mass));
  }
  s.z = final_outcome.for_seat(step.mover);
  return s;
}

struct TrainReport {
  int steps = 0;
  int games = 0;
  double first_total_loss = 0.0;
  double last_total_loss = 0.0;
  std::string final_checkpoint;
  std::string metrics_path;
};

namespace detail {

// Latest published network, immutable once swapped in.
class SnapshotStore {
 public:
  SnapshotStore(std::shared_ptr<const Net> net, int version) : net_(std::move(net)), version_(version) {}

  std::pair<std::shared_ptr<const Net>, int> get() const {
    std::lock_guard<std::mutex> lock(mu_);
    return {net_, version_};
  }
  void publish(std::shared_ptr<const Net> net, int version) {
    std::lock_guard<std::mutex> lock(mu_);
    net_ = std::move(net);
    version_ = version;
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Net> net_;
  int version_;
};

// Bounded trajectory hand-off from workers to the trainer; closing wakes
// every blocked worker.
class TrajectoryQueue {
 public:
  explicit TrajectoryQueue(size_t cap) : cap_(cap) {}

  bool push(Trajectory traj) {
    std::unique_lock<std::mutex> lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < cap_ || closed_; });
    if (closed_) return false;
    items_.push_back(std::move(traj));
    not_empty_.notify_one();
    return true;
  }

  std::optional<Trajectory> pop() {
    std::unique_lock<std::mutex> lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    Trajectory traj = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return traj;
  }

  void close() {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<Trajectory> items_;
  size_t cap_;
  bool closed_ = false;
};

inline std::string checkpoint_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "checkpoint-%06d.lpgc", step);
  return buf;
}

}  // namespace detail

// The training loop: self-play games feed the replay buffer, the optimizer
// consumes uniform minibatches, checkpoints and a JSON-lines metrics log are
// written under `outdir`. With workers = 1 everything runs on the calling
// thread in a fixed order, so reruns are bit-identical; more workers trade
// that for throughput.
inline TrainReport train(const GameSpec& spec, const TrainConfig& config,
                         const std::string& outdir, std::FILE* echo = nullptr) {
  config.validate();
  Codec codec = Codec::build(spec);
  std::filesystem::create_directories(outdir);

  Net net = init_network(codec, config.network, config.seed);
  OptimizerState opt = OptimizerState::zeros(net.params);
  ReplayBuffer buffer(static_cast<size_t>(config.buffer_capacity));
  std::mt19937_64 sample_rng(mix_seed(config.seed, 0x7261696e));

  // Serialize the effective run configuration next to the outputs.
  {
    std::FILE* f = std::fopen((outdir + "/config.txt").c_str(), "w");
    if (!f) throw IoError("cannot write " + outdir + "/config.txt");
    std::fprintf(f,
                 "game=%s\nselfplay_iterations=%d\nworkers=%d\nbuffer_capacity=%d\n"
                 "batch_size=%d\nsteps_per_checkpoint=%d\ntotal_steps=%d\nsteps_per_game=%d\n"
                 "temperature_plies=%d\nlearning_rate=%.10g\nmomentum=%.10g\n"
                 "weight_decay=%.10g\nseed=%llu\ntrunk_channels=%d\nresidual_blocks=%d\n"
                 "value_hidden=%d\n",
                 spec.name.c_str(), config.selfplay_iterations, config.workers,
                 config.buffer_capacity, config.batch_size, config.steps_per_checkpoint,
                 config.total_steps, config.steps_per_game, config.temperature_plies,
                 config.learning_rate, config.momentum, config.weight_decay,
                 static_cast<unsigned long long>(config.seed), config.network.trunk_channels,
                 config.network.residual_blocks, config.network.value_hidden);
    std::fclose(f);
  }

  std::FILE* metrics = std::fopen((outdir + "/metrics.jsonl").c_str(), "w");
  if (!metrics) throw IoError("cannot write " + outdir + "/metrics.jsonl");

  int snapshot_version = 0;
  auto write_checkpoint = [&](int step) {
    Checkpoint ckpt = make_training_checkpoint(net, opt, spec, codec, {{"step", std::to_string(step)}});
    std::string path = outdir + "/" + detail::checkpoint_name(step);
    save_checkpoint(ckpt, path);
    return path;
  };

  TrainReport report;
  report.metrics_path = outdir + "/metrics.jsonl";
  report.final_checkpoint = write_checkpoint(0);

  detail::SnapshotStore store(std::make_shared<Net>(net), 0);
  detail::TrajectoryQueue queue(4);
  std::atomic<long> next_game{0};
  std::atomic<bool> stop{false};
  std::vector<std::thread> workers;

  bool threaded = config.workers > 1;
  if (threaded) {
    for (int w = 0; w < config.workers; ++w)
      workers.emplace_back([&] {
        while (!stop.load(std::memory_order_relaxed)) {
          long index = next_game.fetch_add(1, std::memory_order_relaxed);
          auto [snapshot, version] = store.get();
          Trajectory traj =
              selfplay_game(spec, codec, *snapshot, config, mix_seed(config.seed, 1 + index));
          if (!queue.push(std::move(traj))) return;
        }
      });
  }

  auto next_trajectory = [&]() -> Trajectory {
    if (threaded) {
      auto traj = queue.pop();
      if (!traj) throw ContractError("trajectory queue closed early");
      return std::move(*traj);
    }
    long index = next_game.fetch_add(1);
    return selfplay_game(spec, codec, net, config, mix_seed(config.seed, 1 + index));
  };

  int step = 0;
  bool first_loss_recorded = false;
  Workspace ws;
  Gradients grads = zero_gradients(net.params);
  while (step < config.total_steps) {
    Trajectory traj = next_trajectory();
    ++report.games;
    for (const TrajectoryStep& s : traj.steps) buffer.push(to_train_sample(s, traj.final_outcome));
    if (buffer.size() < static_cast<size_t>(config.batch_size)) continue;

    for (int k = 0; k < config.steps_per_game && step < config.total_steps; ++k) {
      std::vector<TrainSample> batch = buffer.sample_batch(config.batch_size, sample_rng);
      LossParts loss = loss_and_gradients(net, batch, config.weight_decay, grads, ws);
      optimizer_step(net.params, grads, opt, config.learning_rate, config.momentum);
      ++step;

      if (!first_loss_recorded) {
        report.first_total_loss = loss.total();
        first_loss_recorded = true;
      }
      report.last_total_loss = loss.total();
      std::fprintf(metrics,
                   "{\"step\":%d,\"policy_loss\":%.10g,\"value_loss\":%.10g,"
                   "\"total_loss\":%.10g,\"buffer_size\":%zu,\"games\":%d,\"snapshot\":%d}\n",
                   step, loss.policy, loss.value, loss.total(), buffer.size(), report.games,
                   snapshot_version);
      std::fflush(metrics);

      if (step % config.steps_per_checkpoint == 0 || step == config.total_steps) {
        report.final_checkpoint = write_checkpoint(step);
        ++snapshot_version;
        store.publish(std::make_shared<Net>(net), snapshot_version);
        if (echo)
          std::fprintf(echo,
                       "step %d/%d  loss %.4f (policy %.4f, value %.4f)  "
                       "buffer %zu  games %d  -> %s\n",
                       step, config.total_steps, loss.total(), loss.policy, loss.value,
                       buffer.size(), report.games, report.final_checkpoint.c_str());
      }
    }
  }
  report.steps = step;

  stop.store(true);
  queue.close();
  for (std::thread& t : workers) t.join();
  std::fclose(metrics);
  return report;
}

}  // namespace lgp
