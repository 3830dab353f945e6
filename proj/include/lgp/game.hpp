#pragma once

// Game model: declarative description (board, pieces, rule tree, flags) plus
// derived lookup tables (adjacency, line axes, edge masks, piece resolution)
// built by finalize_spec. The declarative part has value equality; tables are
// deterministic functions of it and excluded from comparison.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lgp/common.hpp"
#include "lgp/geometry.hpp"

namespace lgp {

enum class LudemeKind {
  PlaceEmpty,
  StepMove,
  HopCapture,
  LineEnd,
  ConnectEnd,
  ReachEnd,
  NoMovesEnd,
  SwapMeta,
  StartPlace,
};

enum class Dir { Forward, ForwardDiagonal, Orthogonal, Diagonal, Any };
enum class OntoRule { Empty, Enemy, EmptyOrEnemy };
enum class Polarity { Win, Lose, Draw };

// Board edges by lattice extreme: North = max row, South = row 0,
// West = min column, East = max column.
enum class Edge { North, South, West, East };

struct RegionSpec {
  enum class Kind { All, Rows, Checkerboard, Sites };
  Kind kind = Kind::All;
  std::vector<int> values;  // row list / parity / explicit site ids
  bool operator==(const RegionSpec&) const = default;
};

// One rule unit. Fields are kind-specific; unused ones keep defaults so that
// value equality is well-defined across kinds.
struct Ludeme {
  LudemeKind kind = LudemeKind::PlaceEmpty;
  std::string piece;                  // PlaceEmpty / StepMove / HopCapture / StartPlace
  Player player = 0;                  // StartPlace owner
  RegionSpec region;                  // StartPlace
  std::vector<Dir> dirs;              // StepMove
  OntoRule onto = OntoRule::Empty;    // StepMove
  bool opening_removals = false;      // HopCapture: each side removes one stone first
  bool chain_any_direction = false;   // HopCapture: multi-jumps may change direction
  int length = 0;                     // LineEnd
  bool exact = false;                 // LineEnd: maximal run must equal length
  Polarity polarity = Polarity::Win;  // LineEnd / NoMovesEnd
  std::array<Edge, 2> edges_p1{Edge::North, Edge::North};  // ConnectEnd pair; ReachEnd uses [0]
  std::array<Edge, 2> edges_p2{Edge::North, Edge::North};
  bool operator==(const Ludeme&) const = default;
};

struct PieceType {
  std::string name;
  Player owner = 0;  // color, 1-based
  bool operator==(const PieceType&) const = default;
};

struct BoardDecl {
  enum class Kind { Square, HexRhombus, HexHex };
  Kind kind = Kind::Square;
  int rows = 0, cols = 0;  // square dims; hex tilings use rows as size/side
  int hand_capacity = 0;   // 0 = no hands, else one hand of this size per player
  bool operator==(const BoardDecl&) const = default;
};

struct RuleTree {
  std::vector<Ludeme> start;  // StartPlace entries
  std::vector<Ludeme> play;   // move generators, evaluated in order
  std::vector<Ludeme> end;    // end conditions, evaluated in order
  std::vector<Ludeme> meta;   // SwapMeta
  bool operator==(const RuleTree&) const = default;
};

struct GameFlags {
  bool uses_swap_rule = false;
  bool is_stacking = false;   // not expressible in the DSL; synthetic specs set it
  bool uses_counts = false;   // same
  bool uses_amounts = false;  // same
  bool placement_only = false;
  bool operator==(const GameFlags&) const = default;
};

// Everything move generation and end evaluation need as O(1)/O(deg) lookups.
// Main-board sites use global ids (container offset 0).
struct GameTables {
  int total_sites = 0;
  int main_sites = 0;
  std::vector<int> container_offset;  // per container; last entry = total_sites
  std::vector<int> container_of;      // global site -> container index
  Tiling tiling = Tiling::Square;
  int lat_rows = 0, lat_cols = 0;
  std::vector<std::pair<int, int>> lattice;  // main site -> (row, col|q)
  std::vector<int> site_at;                  // row * lat_cols + col -> main site or -1
  std::vector<std::vector<SiteId>> ortho, diag;
  // Line axes: square boards have 4 (E, N, NE, NW), hex boards 3.
  int num_axes = 0;
  std::vector<std::vector<SiteId>> axis_next, axis_prev;  // [axis][main site]
  std::array<std::vector<uint8_t>, 4> edge_mask;          // [Edge][main site]
  // piece type index per (play-ludeme, color), -1 when that color lacks the piece.
  std::vector<std::array<int16_t, 3>> play_piece;

  SiteId at(int row, int col) const {
    if (row < 0 || row >= lat_rows || col < 0 || col >= lat_cols) return kNoSite;
    return site_at[row * lat_cols + col];
  }
};

struct GameSpec {
  std::string name;
  int num_players = 2;
  BoardDecl board;
  std::vector<PieceType> piece_types;
  RuleTree rules;
  GameFlags flags;
  // Derived by finalize_spec:
  std::vector<Container> containers;
  GameTables tables;

  bool operator==(const GameSpec& o) const {
    return name == o.name && num_players == o.num_players && board == o.board &&
           piece_types == o.piece_types && rules == o.rules && flags == o.flags;
  }

  int piece_index(const std::string& pname, Player owner) const {
    for (size_t i = 0; i < piece_types.size(); ++i)
      if (piece_types[i].owner == owner && piece_types[i].name == pname)
        return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline Container build_main_board(const BoardDecl& b) {
  switch (b.kind) {
    case BoardDecl::Kind::Square:
      return generate_square(b.rows, b.cols);
    case BoardDecl::Kind::HexRhombus:
      return generate_hex_rhombus(b.rows);
    case BoardDecl::Kind::HexHex:
      return generate_hex_hex(b.rows);
  }
  throw ConfigError("unknown board kind");
}

inline void build_tables(GameSpec& spec) {
  GameTables& t = spec.tables;
  t = GameTables{};
  const Container& main = spec.containers.front();
  t.main_sites = static_cast<int>(main.sites.size());
  t.tiling = main.tiling;
  t.container_offset.clear();
  int off = 0;
  for (const Container& c : spec.containers) {
    t.container_offset.push_back(off);
    for (size_t i = 0; i < c.sites.size(); ++i)
      t.container_of.push_back(static_cast<int>(t.container_offset.size()) - 1);
    off += static_cast<int>(c.sites.size());
  }
  t.container_offset.push_back(off);
  t.total_sites = off;

  t.lattice = main.lattice;
  t.lat_rows = 0;
  t.lat_cols = 0;
  for (auto [r, q] : t.lattice) {
    t.lat_rows = std::max(t.lat_rows, r + 1);
    t.lat_cols = std::max(t.lat_cols, q + 1);
  }
  t.site_at.assign(static_cast<size_t>(t.lat_rows) * t.lat_cols, kNoSite);
  for (int s = 0; s < t.main_sites; ++s) {
    auto [r, q] = t.lattice[s];
    t.site_at[r * t.lat_cols + q] = s;
  }

  t.ortho.resize(t.main_sites);
  t.diag.resize(t.main_sites);
  for (int s = 0; s < t.main_sites; ++s) {
    t.ortho[s].assign(main.sites[s].orthogonal_neighbors.begin(),
                      main.sites[s].orthogonal_neighbors.end());
    t.diag[s].assign(main.sites[s].diagonal_neighbors.begin(),
                     main.sites[s].diagonal_neighbors.end());
  }

  const bool hex = t.tiling != Tiling::Square;
  static constexpr std::pair<int, int> kSquareAxes[4] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  static constexpr std::pair<int, int> kHexAxes[3] = {{0, 1}, {1, 0}, {1, -1}};
  t.num_axes = hex ? 3 : 4;
  t.axis_next.assign(t.num_axes, std::vector<SiteId>(t.main_sites, kNoSite));
  t.axis_prev.assign(t.num_axes, std::vector<SiteId>(t.main_sites, kNoSite));
  for (int a = 0; a < t.num_axes; ++a) {
    auto [dr, dq] = hex ? kHexAxes[a] : kSquareAxes[a];
    for (int s = 0; s < t.main_sites; ++s) {
      auto [r, q] = t.lattice[s];
      t.axis_next[a][s] = t.at(r + dr, q + dq);
      t.axis_prev[a][s] = t.at(r - dr, q - dq);
    }
  }
  // Hex adjacency is not lattice-rectangular; restrict axis steps to actual
  // neighbors so lines never cross gaps (relevant for hexhex row ends).
  if (hex) {
    for (int a = 0; a < t.num_axes; ++a) {
      for (int s = 0; s < t.main_sites; ++s) {
        auto ok = [&](SiteId n) {
          if (n == kNoSite) return false;
          for (SiteId m : t.ortho[s])
            if (m == n) return true;
          return false;
        };
        if (!ok(t.axis_next[a][s])) t.axis_next[a][s] = kNoSite;
        if (!ok(t.axis_prev[a][s])) t.axis_prev[a][s] = kNoSite;
      }
    }
  }

  for (auto& m : t.edge_mask) m.assign(t.main_sites, 0);
  int rmax = t.lat_rows - 1, cmax = t.lat_cols - 1;
  for (int s = 0; s < t.main_sites; ++s) {
    auto [r, q] = t.lattice[s];
    if (r == rmax) t.edge_mask[static_cast<int>(Edge::North)][s] = 1;
    if (r == 0) t.edge_mask[static_cast<int>(Edge::South)][s] = 1;
    if (q == 0) t.edge_mask[static_cast<int>(Edge::West)][s] = 1;
    if (q == cmax) t.edge_mask[static_cast<int>(Edge::East)][s] = 1;
  }

  t.play_piece.assign(spec.rules.play.size(), {int16_t{-1}, int16_t{-1}, int16_t{-1}});
  for (size_t i = 0; i < spec.rules.play.size(); ++i)
    for (Player c = 1; c <= 2; ++c)
      t.play_piece[i][c] = static_cast<int16_t>(spec.piece_index(spec.rules.play[i].piece, c));
}

}  // namespace detail

// Validates the declarative spec, derives flags that follow from the rule
// tree (swap, placement_only), and builds containers + tables. Throws
// ConfigError on semantic problems. Stacking/counts/amounts flags are left
// as provided (the DSL cannot express them; synthetic specs set them).
inline void finalize_spec(GameSpec& spec) {
  if (spec.name.empty()) throw ConfigError("game has no name");
  if (spec.num_players < 1) throw ConfigError("players must be >= 1");
  if (spec.board.rows < 1 || (spec.board.kind == BoardDecl::Kind::Square && spec.board.cols < 1))
    throw ConfigError("board dimensions must be positive");
  if (spec.board.hand_capacity < 0) throw ConfigError("hand capacity must be positive");
  {
    long long n = 0;
    long long r = spec.board.rows;
    switch (spec.board.kind) {
      case BoardDecl::Kind::Square: n = r * spec.board.cols; break;
      case BoardDecl::Kind::HexRhombus: n = r * r; break;
      case BoardDecl::Kind::HexHex: n = 3 * r * r - 3 * r + 1; break;
    }
    n += static_cast<long long>(spec.board.hand_capacity) * spec.num_players;
    if (n > 1000000) throw ConfigError("board too large");
  }
  if (spec.piece_types.empty()) throw ConfigError("game declares no piece types");
  for (const PieceType& p : spec.piece_types) {
    if (p.owner < 1 || p.owner > spec.num_players)
      throw ConfigError("piece '" + p.name + "' owner out of range");
    if (p.name.empty()) throw ConfigError("piece with empty name");
  }
  for (size_t i = 0; i < spec.piece_types.size(); ++i)
    for (size_t j = i + 1; j < spec.piece_types.size(); ++j)
      if (spec.piece_types[i] == spec.piece_types[j])
        throw ConfigError("duplicate piece type '" + spec.piece_types[i].name + "'");

  if (spec.rules.play.empty()) throw ConfigError("rules have no play clause entries");

  const bool square = spec.board.kind == BoardDecl::Kind::Square;
  const bool hexhex = spec.board.kind == BoardDecl::Kind::HexHex;
  for (const Ludeme& l : spec.rules.play) {
    if (l.kind == LudemeKind::StepMove || l.kind == LudemeKind::HopCapture) {
      if (!square)
        throw ConfigError("movement ludemes require a square board");
    }
    for (Player c = 1; c <= std::min(spec.num_players, 2); ++c)
      if (spec.piece_index(l.piece, c) < 0)
        throw ConfigError("play clause references unknown piece '" + l.piece +
                          "' for player " + std::to_string(c));
  }
  for (const Ludeme& l : spec.rules.end) {
    if (l.kind == LudemeKind::LineEnd) {
      if (l.length < 2) throw ConfigError("line length must be >= 2");
      if (l.polarity == Polarity::Draw) throw ConfigError("line polarity must be win or lose");
    }
    if ((l.kind == LudemeKind::ConnectEnd || l.kind == LudemeKind::ReachEnd) && hexhex)
      throw ConfigError("connect/reach ends are not defined for hexhex boards");
  }
  for (const Ludeme& l : spec.rules.start) {
    if (l.player < 1 || l.player > spec.num_players)
      throw ConfigError("start placement player out of range");
    if (spec.piece_index(l.piece, l.player) < 0)
      throw ConfigError("start clause references unknown piece '" + l.piece + "'");
    if (l.region.kind == RegionSpec::Kind::Checkerboard &&
        (l.region.values.size() != 1 || l.region.values[0] < 0 || l.region.values[0] > 1))
      throw ConfigError("checkerboard region takes parity 0 or 1");
  }

  spec.flags.uses_swap_rule = false;
  for (const Ludeme& l : spec.rules.meta)
    if (l.kind == LudemeKind::SwapMeta) spec.flags.uses_swap_rule = true;
  spec.flags.placement_only = true;
  for (const Ludeme& l : spec.rules.play)
    if (l.kind != LudemeKind::PlaceEmpty) spec.flags.placement_only = false;

  spec.containers.clear();
  spec.containers.push_back(detail::build_main_board(spec.board));
  if (spec.board.hand_capacity > 0) {
    for (Player p = 1; p <= spec.num_players; ++p)
      spec.containers.push_back(make_hand(spec.board.hand_capacity, p));
    // Site ids are global across containers.
    SiteId next = static_cast<SiteId>(spec.containers.front().sites.size());
    for (size_t ci = 1; ci < spec.containers.size(); ++ci)
      for (Site& s : spec.containers[ci].sites) s.id = next++;
  }

  detail::build_tables(spec);
}

// Seat <-> color mapping under the swap rule: before any swap they coincide;
// after a swap the two players exchange colors.
inline Player color_of_seat(Player seat, bool swap_occurred) {
  return swap_occurred ? 3 - seat : seat;
}

inline Player seat_of_color(Player color, bool swap_occurred) {
  return swap_occurred ? 3 - color : color;
}

}  // namespace lgp
