#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lgp/dsl.hpp"
#include "lgp/engine.hpp"
#include "lgp/match.hpp"
#include "lgp/tensor.hpp"
#include "lgp/training.hpp"

namespace {

// Resolves a game argument: a built-in name first, then a file path.
lgp::GameSpec resolve_game(const std::string& arg) {
  const auto& builtins = lgp::builtin_games();
  if (auto it = builtins.find(arg); it != builtins.end()) return lgp::parse_game(it->second);
  std::ifstream in(arg);
  if (!in) throw lgp::IoError("no built-in game or readable file named '" + arg + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return lgp::parse_game(buf.str());
}

int cmd_games() {
  for (const auto& [name, source] : lgp::builtin_games()) std::printf("%s\n", name.c_str());
  return 0;
}

int cmd_parse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lgp::IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  lgp::GameSpec spec = lgp::parse_game(buf.str());
  std::printf("%s", lgp::print_game(spec).c_str());
  return 0;
}

const char* channel_tag_name(lgp::ChannelTag tag) {
  switch (tag) {
    case lgp::ChannelTag::PiecePresence: return "piece-presence";
    case lgp::ChannelTag::PieceBottom: return "piece-from-bottom";
    case lgp::ChannelTag::PieceTop: return "piece-from-top";
    case lgp::ChannelTag::StackHeight: return "stack-height";
    case lgp::ChannelTag::PieceCount: return "piece-count";
    case lgp::ChannelTag::Amount: return "amount";
    case lgp::ChannelTag::Mover: return "mover";
    case lgp::ChannelTag::LocalState: return "local-state";
    case lgp::ChannelTag::Swap: return "swap";
    case lgp::ChannelTag::ContainerMask: return "container-mask";
    case lgp::ChannelTag::LastFrom: return "last-from";
    case lgp::ChannelTag::LastTo: return "last-to";
  }
  return "?";
}

int cmd_inspect(const std::string& game) {
  lgp::GameSpec spec = resolve_game(game);
  std::printf("%s\n", lgp::print_game(spec).c_str());
  std::printf("players: %d\n", spec.num_players);
  std::printf("sites: %d\n", spec.tables.total_sites);
  for (const auto& c : spec.containers) {
    std::printf("container %s: %zu sites%s\n", c.name.c_str(), c.sites.size(),
                c.kind == lgp::ContainerKind::Hand ? " (hand)" : "");
  }
  std::printf("axes: %d\n", spec.tables.num_axes);
  std::printf("flags:%s%s%s%s%s\n", spec.flags.uses_swap_rule ? " swap" : "",
              spec.flags.is_stacking ? " stacking" : "", spec.flags.uses_counts ? " counts" : "",
              spec.flags.uses_amounts ? " amounts" : "",
              spec.flags.placement_only ? " placement-only" : "");
  lgp::Codec codec = lgp::Codec::build(spec);
  std::printf("grid: %d rows x %d cols", codec.grid.height, codec.grid.width);
  if (codec.grid.dummy_row >= 0) std::printf(", dummy row %d", codec.grid.dummy_row);
  if (codec.grid.dummy_col >= 0) std::printf(", dummy col %d", codec.grid.dummy_col);
  std::printf("\n");
  std::printf("state tensor: %d x %d x %d\n", codec.state.C, codec.grid.height, codec.grid.width);
  for (size_t i = 0; i < codec.state.channels.size(); ++i) {
    const lgp::ChannelSpec& ch = codec.state.channels[i];
    std::printf("  channel %2zu: %s", i, channel_tag_name(ch.tag));
    if (ch.a || ch.b) std::printf(" (%d, %d)", ch.a, ch.b);
    std::printf("\n");
  }
  std::printf("move logits: %d x %d x %d (%s), %d total\n", codec.move.A, codec.grid.height,
              codec.grid.width,
              codec.move.mode == lgp::MoveChannelLayout::Mode::Placement ? "placement" : "from-to",
              codec.logit_count());
  std::printf("layout fingerprint: %016llx\n",
              static_cast<unsigned long long>(lgp::layout_fingerprint(spec, codec)));
  lgp::GameState st = lgp::initial_state(spec);
  std::printf("initial moves: %zu\n", lgp::legal_moves(spec, st).size());
  std::printf("%s", lgp::state_to_text(spec, st).c_str());
  return 0;
}

int cmd_perft(const std::string& game, int depth) {
  lgp::GameSpec spec = resolve_game(game);
  lgp::GameState st = lgp::initial_state(spec);
  for (int d = 0; d <= depth; ++d) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t n = lgp::perft(spec, st, d);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("depth %d: %llu nodes (%.3f s)\n", d, static_cast<unsigned long long>(n), secs);
  }
  return 0;
}

// Training configs are plain key=value lines; '#' starts a comment.
lgp::TrainConfig load_train_config(const std::string& path) {
  lgp::TrainConfig cfg;
  std::ifstream in(path);
  if (!in) throw lgp::IoError("cannot open training config '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw lgp::ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "selfplay_iterations") cfg.selfplay_iterations = std::stoi(value);
      else if (key == "workers") cfg.workers = std::stoi(value);
      else if (key == "buffer_capacity") cfg.buffer_capacity = std::stoi(value);
      else if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "steps_per_checkpoint") cfg.steps_per_checkpoint = std::stoi(value);
      else if (key == "total_steps") cfg.total_steps = std::stoi(value);
      else if (key == "steps_per_game") cfg.steps_per_game = std::stoi(value);
      else if (key == "temperature_plies") cfg.temperature_plies = std::stoi(value);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
      else if (key == "momentum") cfg.momentum = std::stod(value);
      else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "trunk_channels") cfg.network.trunk_channels = std::stoi(value);
      else if (key == "residual_blocks") cfg.network.residual_blocks = std::stoi(value);
      else if (key == "value_hidden") cfg.network.value_hidden = std::stoi(value);
      else
        throw lgp::ConfigError(path + ":" + std::to_string(lineno) +
                               ": unknown training config key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw lgp::ConfigError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    } catch (const std::out_of_range&) {
      throw lgp::ConfigError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

int cmd_train(const std::string& game, const std::string& config_path, std::string outdir,
              int seed_override) {
  lgp::GameSpec spec = resolve_game(game);
  lgp::TrainConfig cfg;
  if (!config_path.empty()) cfg = load_train_config(config_path);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  if (outdir.empty()) outdir = "runs/" + spec.name;
  cfg.validate();

  std::printf("training %s -> %s\n", spec.name.c_str(), outdir.c_str());
  std::printf("  %d total steps, batch %d, %d search iterations per self-play move\n",
              cfg.total_steps, cfg.batch_size, cfg.selfplay_iterations);
  lgp::TrainReport report = lgp::train(spec, cfg, outdir, stdout);
  std::printf("done: %d steps over %d games\n", report.steps, report.games);
  if (report.steps > 0)
    std::printf("loss %.4f -> %.4f\n", report.first_total_loss, report.last_total_loss);
  std::printf("final checkpoint: %s\n", report.final_checkpoint.c_str());
  std::printf("metrics: %s\n", report.metrics_path.c_str());
  return 0;
}

// Agent grammar: "random", "uct:<iterations>x<rollouts>", "puct:<iterations>[:<checkpoint>]".
lgp::AgentSpec parse_agent(const std::string& text, const std::string& default_ckpt) {
  if (text == "random") return lgp::AgentSpec::random_agent();
  auto bad = [&] { return lgp::ConfigError("bad agent spec '" + text + "'"); };
  if (text.rfind("uct:", 0) == 0) {
    std::string rest = text.substr(4);
    size_t x = rest.find('x');
    if (x == std::string::npos) throw bad();
    try {
      return lgp::AgentSpec::pure_uct(std::stoi(rest.substr(0, x)), std::stoi(rest.substr(x + 1)));
    } catch (const std::exception&) {
      throw bad();
    }
  }
  if (text.rfind("puct:", 0) == 0) {
    std::string rest = text.substr(5);
    size_t colon = rest.find(':');
    std::string iters = colon == std::string::npos ? rest : rest.substr(0, colon);
    std::string path = colon == std::string::npos ? default_ckpt : rest.substr(colon + 1);
    if (path.empty())
      throw lgp::ConfigError("agent '" + text + "' needs a checkpoint (use --ckpt or puct:N:path)");
    try {
      return lgp::AgentSpec::puct_checkpoint(path, std::stoi(iters));
    } catch (const lgp::ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw bad();
    }
  }
  throw bad();
}

void print_match_table(const lgp::AgentSpec& a, const lgp::AgentSpec& b,
                       const lgp::MatchStats& s) {
  std::printf("+----------------------------+----------------------+\n");
  std::printf("| agent a                    | %-20s |\n", a.describe().c_str());
  std::printf("| agent b                    | %-20s |\n", b.describe().c_str());
  std::printf("| games                      | %-20d |\n", s.games);
  std::printf("| a wins / b wins / draws    | %-4d / %-4d / %-6d |\n", s.wins_a, s.wins_b,
              s.draws);
  std::printf("| a as first (w/l/d)         | %-4d / %-4d / %-6d |\n", s.a_first_wins,
              s.a_first_losses, s.a_first_draws);
  std::printf("| a as second (w/l/d)        | %-4d / %-4d / %-6d |\n", s.a_second_wins,
              s.a_second_losses, s.a_second_draws);
  std::printf("| a win %% (draws = 0.5)      | %-20.2f |\n", s.win_percentage_a);
  char ci[64];
  std::snprintf(ci, sizeof ci, "[%.2f%%, %.2f%%]", s.wilson_low, s.wilson_high);
  std::printf("| 95%% CI (Wilson)            | %-20s |\n", ci);
  std::printf("| mean game length           | %-20.1f |\n", s.mean_game_length);
  std::printf("+----------------------------+----------------------+\n");
}

void write_match_report(const std::string& path, const lgp::GameSpec& spec,
                        const lgp::AgentSpec& a, const lgp::AgentSpec& b,
                        const lgp::MatchStats& s, uint64_t base_seed) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw lgp::IoError("cannot write report '" + path + "'");
  for (const lgp::GameRecord& r : s.records)
    std::fprintf(f,
                 "{\"game\":%d,\"seed\":%llu,\"a_seat\":%d,\"score_a\":%g,\"plies\":%d}\n",
                 r.index, static_cast<unsigned long long>(r.seed), static_cast<int>(r.a_seat),
                 r.score_a, r.plies);
  std::fprintf(f,
               "{\"summary\":true,\"game_name\":\"%s\",\"agent_a\":\"%s\",\"agent_b\":\"%s\","
               "\"base_seed\":%llu,\"games\":%d,\"wins_a\":%d,\"wins_b\":%d,\"draws\":%d,"
               "\"win_percentage_a\":%.10g,\"wilson_low\":%.10g,\"wilson_high\":%.10g,"
               "\"mean_game_length\":%.10g}\n",
               spec.name.c_str(), a.describe().c_str(), b.describe().c_str(),
               static_cast<unsigned long long>(base_seed), s.games, s.wins_a, s.wins_b, s.draws,
               s.win_percentage_a, s.wilson_low, s.wilson_high, s.mean_game_length);
  std::fclose(f);
}

int cmd_eval(const std::string& game, const std::string& ckpt, bool protocol_preset,
             std::string agent_a, std::string agent_b, int games, uint64_t seed,
             std::string report_path) {
  lgp::GameSpec spec = resolve_game(game);
  if (protocol_preset) {
    if (ckpt.empty()) throw lgp::ConfigError("--paper-protocol needs --ckpt");
    agent_a = "puct:40";
    agent_b = "uct:800x10";
    if (games == 0) games = 300;
  }
  if (games == 0) games = 100;
  if (agent_a.empty()) agent_a = ckpt.empty() ? "random" : "puct:40";
  if (agent_b.empty()) agent_b = "uct:800x10";
  lgp::AgentSpec a = parse_agent(agent_a, ckpt);
  lgp::AgentSpec b = parse_agent(agent_b, ckpt);

  std::printf("evaluating %s: %s vs %s, %d games, seed %llu\n", spec.name.c_str(),
              a.describe().c_str(), b.describe().c_str(), games,
              static_cast<unsigned long long>(seed));
  lgp::MatchStats stats = lgp::run_match(spec, a, b, games, seed);
  print_match_table(a, b, stats);

  if (report_path.empty()) report_path = "eval-" + spec.name + ".jsonl";
  write_match_report(report_path, spec, a, b, stats, seed);
  std::printf("report: %s\n", report_path.c_str());
  return 0;
}

int cmd_play(const std::string& game, const std::string& ckpt, int human_seat) {
  lgp::GameSpec spec = resolve_game(game);
  lgp::Codec codec = lgp::Codec::build(spec);
  lgp::AgentSpec agent_spec =
      ckpt.empty() ? lgp::AgentSpec::pure_uct() : lgp::AgentSpec::puct_checkpoint(ckpt);
  lgp::detail::MatchAgent agent(spec, codec, agent_spec);
  std::printf("you are seat %d; the engine plays %s\n", human_seat,
              agent_spec.describe().c_str());

  lgp::GameState st = lgp::initial_state(spec);
  std::mt19937_64 seed_stream(std::random_device{}());
  std::optional<lgp::Outcome> result;
  std::vector<lgp::Move> legal;
  while (!(result = lgp::outcome_or_moves(spec, st, legal))) {
    std::printf("\n%s", lgp::state_to_text(spec, st).c_str());
    if (st.mover == human_seat) {
      for (size_t i = 0; i < legal.size(); ++i)
        std::printf("  %zu) %s\n", i, lgp::format_move(legal[i]).c_str());
      std::printf("move> ");
      std::fflush(stdout);
      std::string line;
      if (!std::getline(std::cin, line)) {
        std::printf("\nbye\n");
        return 0;
      }
      size_t choice = legal.size();
      try {
        choice = std::stoul(line);
      } catch (const std::exception&) {
        for (size_t i = 0; i < legal.size(); ++i)
          if (lgp::format_move(legal[i]) == line) choice = i;
      }
      if (choice >= legal.size()) {
        std::printf("enter a move number or its exact text\n");
        continue;
      }
      lgp::apply_in_place(spec, st, legal[choice]);
    } else {
      lgp::Move m = agent.choose(spec, codec, st, legal, seed_stream());
      std::printf("engine plays %s\n", lgp::format_move(m).c_str());
      lgp::apply_in_place(spec, st, m);
    }
  }
  std::printf("\n%s", lgp::state_to_text(spec, st).c_str());
  double you = result->for_seat(human_seat);
  std::printf(you > 0 ? "you win\n" : you < 0 ? "engine wins\n" : "draw\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ludemic game engine and training stack"};
  app.require_subcommand(1);

  app.add_subcommand("games", "list built-in games");

  auto* parse = app.add_subcommand("parse", "parse a game file and print its canonical form");
  std::string parse_path;
  parse->add_option("file", parse_path, "game description file")->required();

  auto* inspect = app.add_subcommand("inspect", "describe a game and its tensor layouts");
  std::string inspect_game;
  inspect->add_option("game", inspect_game, "built-in name or game file")->required();

  auto* perft = app.add_subcommand("perft", "count move paths to a fixed depth");
  std::string perft_game;
  int perft_depth = 0;
  perft->add_option("game", perft_game, "built-in name or game file")->required();
  perft->add_option("depth", perft_depth, "maximum depth")->required()->check(CLI::Range(0, 16));

  auto* train = app.add_subcommand("train", "run self-play training");
  std::string train_game, train_config, train_out;
  int train_seed = -1;
  train->add_option("game", train_game, "built-in name or game file")->required();
  train->add_option("--config", train_config, "key=value training config file");
  train->add_option("--out", train_out, "output directory (default runs/<game>)");
  train->add_option("--seed", train_seed, "override the config seed");

  auto* eval = app.add_subcommand("eval", "run a head-to-head match");
  std::string eval_game, eval_ckpt, eval_a, eval_b, eval_report;
  int eval_games = 0;
  uint64_t eval_seed = 1;
  bool eval_protocol = false;
  eval->add_option("game", eval_game, "built-in name or game file")->required();
  eval->add_option("--ckpt", eval_ckpt, "checkpoint for puct agents without an explicit path");
  eval->add_flag("--paper-protocol", eval_protocol,
                 "standard preset: puct 40 iterations vs pure-uct 800x10, 300 games");
  eval->add_option("--agent-a", eval_a, "agent a: random | uct:IxR | puct:I[:ckpt]");
  eval->add_option("--agent-b", eval_b, "agent b (same grammar; default uct:800x10)");
  eval->add_option("--games", eval_games, "number of games")->check(CLI::Range(0, 1000000));
  eval->add_option("--seed", eval_seed, "base seed (game pairs share seeds)");
  eval->add_option("--report", eval_report, "JSON-lines report path (default eval-<game>.jsonl)");

  auto* play = app.add_subcommand("play", "play against the engine in the terminal");
  std::string play_game, play_ckpt;
  int play_seat = 1;
  play->add_option("game", play_game, "built-in name or game file")->required();
  play->add_option("--ckpt", play_ckpt, "checkpoint to play against (default: pure-uct 800x10)");
  play->add_option("--seat", play_seat, "your seat")->check(CLI::Range(1, 2));

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("games")) return cmd_games();
    if (app.got_subcommand("parse")) return cmd_parse(parse_path);
    if (app.got_subcommand("inspect")) return cmd_inspect(inspect_game);
    if (app.got_subcommand("perft")) return cmd_perft(perft_game, perft_depth);
    if (app.got_subcommand("train")) return cmd_train(train_game, train_config, train_out, train_seed);
    if (app.got_subcommand("eval"))
      return cmd_eval(eval_game, eval_ckpt, eval_protocol, eval_a, eval_b, eval_games, eval_seed,
                      eval_report);
    if (app.got_subcommand("play")) return cmd_play(play_game, play_ckpt, play_seat);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lgp: %s\n", e.what());
    return 1;
  }
  return 0;
}
