#include <random>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "lgp/dsl.hpp"

using namespace lgp;

TEST_CASE("all built-in games parse") {
  const auto& games = builtin_games();
  for (const char* name : {"hex-5", "hex-11", "gomoku-9", "yavalath", "squava",
                           "breakthrough-6", "breakthrough-8", "konane-6"}) {
    INFO(name);
    REQUIRE(games.count(name) == 1);
    GameSpec spec = parse_game(games.at(name));
    REQUIRE(spec.name == name);
    REQUIRE(spec.num_players == 2);
  }
}

TEST_CASE("flag inference on built-ins") {
  GameSpec hex = load_builtin("hex-5");
  REQUIRE(hex.flags.uses_swap_rule);
  REQUIRE(hex.flags.placement_only);
  REQUIRE_FALSE(hex.flags.is_stacking);

  GameSpec bt = load_builtin("breakthrough-6");
  REQUIRE_FALSE(bt.flags.uses_swap_rule);
  REQUIRE_FALSE(bt.flags.placement_only);

  for (const char* placement : {"gomoku-9", "yavalath", "squava"}) {
    INFO(placement);
    REQUIRE(load_builtin(placement).flags.placement_only);
  }
  REQUIRE_FALSE(load_builtin("konane-6").flags.placement_only);
}

TEST_CASE("piece shorthand expands per player") {
  GameSpec hex = load_builtin("hex-5");
  REQUIRE(hex.piece_types.size() == 2);
  REQUIRE(hex.piece_types[0] == PieceType{"stone", 1});
  REQUIRE(hex.piece_types[1] == PieceType{"stone", 2});
}

TEST_CASE("print round trips for every built-in") {
  for (const auto& [name, source] : builtin_games()) {
    INFO(name);
    GameSpec a = parse_game(source);
    GameSpec b = parse_game(print_game(a));
    REQUIRE(a == b);
  }
}

TEST_CASE("unbalanced input errors at end of input") {
  try {
    parse_game("(game");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line == 1);
    REQUIRE(e.col == 6);
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_game("(game \"x\"\n  (players 2)\n  bogus)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.line == 3);
    REQUIRE(std::string(e.what()).find("unknown game form") != std::string::npos);
  }
}

TEST_CASE("semantic validation failures") {
  // Play clause references a piece nobody declared.
  REQUIRE_THROWS_AS(
      parse_game(R"((game "bad" (players 2) (board (square 3 3))
                     (pieces (piece "stone" each))
                     (rules (play (place-empty "ghost")) (end (line 3 win)))))"),
      ParseError);
  // Line of length 1 is degenerate.
  REQUIRE_THROWS_AS(
      parse_game(R"((game "bad" (players 2) (board (square 3 3))
                     (pieces (piece "stone" each))
                     (rules (play (place-empty "stone")) (end (line 1 win)))))"),
      ParseError);
  // Movement needs a square board.
  REQUIRE_THROWS_AS(
      parse_game(R"((game "bad" (players 2) (board (hex-rhombus 4))
                     (pieces (piece "stone" each))
                     (rules (play (step-move "stone" (dirs any) (onto empty)))
                            (end (no-moves lose)))))"),
      ParseError);
  // Connect ends are undefined on hexhex boards.
  REQUIRE_THROWS_AS(
      parse_game(R"((game "bad" (players 2) (board (hex-hex 3))
                     (pieces (piece "stone" each))
                     (rules (play (place-empty "stone"))
                            (end (connect (P1 north south) (P2 west east))))))"),
      ParseError);
  // Only two players are supported.
  REQUIRE_THROWS_AS(
      parse_game(R"((game "bad" (players 3) (board (square 3 3))
                     (pieces (piece "stone" each))
                     (rules (play (place-empty "stone")) (end (line 3 win)))))"),
      ParseError);
}

TEST_CASE("containers and tables come out of finalize") {
  GameSpec hex = load_builtin("hex-5");
  REQUIRE(hex.containers.size() == 1);
  REQUIRE(hex.containers[0].sites.size() == 25);
  REQUIRE(hex.tables.total_sites == 25);
  REQUIRE(hex.tables.num_axes == 3);

  GameSpec bt = load_builtin("breakthrough-6");
  REQUIRE(bt.tables.num_axes == 4);
  REQUIRE(bt.tables.at(0, 0) == 0);
  REQUIRE(bt.tables.at(5, 5) == 35);
  REQUIRE(bt.tables.at(6, 0) == kNoSite);

  GameSpec hands = parse_game(R"((game "with-hands" (players 2)
    (board (square 9 9) (hands 7))
    (pieces (piece "stone" each))
    (rules (play (place-empty "stone")) (end (line 5 win)))))");
  REQUIRE(hands.containers.size() == 3);
  REQUIRE(hands.tables.total_sites == 81 + 14);
  REQUIRE(hands.tables.container_offset[1] == 81);
  REQUIRE(hands.tables.container_of[85] == 1);
  REQUIRE(hands.tables.container_of[90] == 2);
}

// Parsing must be total: arbitrary bytes produce either a spec or a
// ParseError, never a crash or a different exception type.
TEST_CASE("fuzzed inputs never escape the error contract") {
  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> len_dist(0, 200);
  std::uniform_int_distribution<int> byte_dist(0, 255);
  const std::string charset = "()\"; abcdefgh0123456789-\n\t";
  std::uniform_int_distribution<size_t> char_dist(0, charset.size() - 1);

  for (int trial = 0; trial < 2000; ++trial) {
    std::string input;
    int len = len_dist(rng);
    bool structured = trial % 2 == 0;
    for (int i = 0; i < len; ++i)
      input += structured ? charset[char_dist(rng)] : static_cast<char>(byte_dist(rng));
    try {
      parse_game(input);
    } catch (const ParseError&) {
      // expected for nearly every input
    }
  }

  // Mutations of a real game source.
  const std::string base = builtin_games().at("breakthrough-6");
  std::uniform_int_distribution<size_t> pos_dist(0, base.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string input = base;
    for (int edits = 0; edits < 3; ++edits)
      input[pos_dist(rng)] = charset[char_dist(rng)];
    try {
      parse_game(input);
    } catch (const ParseError&) {
    }
  }
}
