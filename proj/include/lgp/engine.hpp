#pragma once

// Forward model: initial state, legal move generation, move application,
// terminal detection, perft. States are immutable values; apply returns a
// copy, and the *_in_place variants reuse buffers for hot loops.

#include <algorithm>
#include <optional>
#include <sstream>
#include <tuple>

#include "lgp/game.hpp"

namespace lgp {

struct Move {
  enum class Kind : uint8_t { Pass = 0, Swap = 1, Play = 2 };
  Kind kind = Kind::Play;
  SiteId from = kNoSite;  // kNoSite for placements
  SiteId to = kNoSite;
  uint8_t l_min = 0, l_max = 0;  // stack levels; always 0 in non-stacking games
  // Piece type index placed at `to` (-1 = removal only). Deterministically
  // derived from (state, from, to) by move generation; kept on the move so
  // apply never re-derives rules.
  int16_t piece = -1;
  // Captured/removed sites beyond the vacated from-site, sorted ascending.
  // Distinct jump paths with different capture sets stay distinct moves.
  std::vector<SiteId> effects;

  static Move pass_move() { return Move{Kind::Pass, kNoSite, kNoSite, 0, 0, -1, {}}; }
  static Move swap_move() { return Move{Kind::Swap, kNoSite, kNoSite, 0, 0, -1, {}}; }

  bool operator==(const Move&) const = default;
  // Documented move order: kind, from, to, l_min, l_max, then the piece and
  // effect-list tie-breakers (only reachable for aliased capture chains).
  friend bool operator<(const Move& a, const Move& b) {
    return std::tie(a.kind, a.from, a.to, a.l_min, a.l_max, a.piece, a.effects) <
           std::tie(b.kind, b.from, b.to, b.l_min, b.l_max, b.piece, b.effects);
  }
};

struct GameState {
  Player mover = 1;  // seat to move
  int move_number = 0;
  bool swap_occurred = false;
  std::vector<int16_t> piece;               // per global site: 0 empty, else 1 + type index
  std::vector<int16_t> count;               // count games only
  std::vector<std::vector<int16_t>> stack;  // stacking games only; bottom first
  std::vector<uint8_t> local_state;         // per global site
  std::vector<int32_t> amounts;             // per player, amount games only
  std::vector<Move> last_moves;             // up to 2, most recent last
  bool operator==(const GameState&) const = default;
};

struct Outcome {
  std::array<double, 2> score{0.0, 0.0};  // per seat, in {-1, 0, +1}
  bool operator==(const Outcome&) const = default;
  double for_seat(Player seat) const { return score[seat - 1]; }
  static Outcome win_for(Player seat) {
    Outcome o;
    o.score[seat - 1] = 1.0;
    o.score[2 - seat] = -1.0;
    return o;
  }
  static Outcome draw() { return Outcome{}; }
};

inline Player color_to_move(const GameState& st) {
  return color_of_seat(st.mover, st.swap_occurred);
}

// Owner color of a site-content value (1 + piece type index).
inline Player cell_owner(const GameSpec& spec, int16_t cell) {
  return spec.piece_types[cell - 1].owner;
}

inline uint64_t state_hash(const GameState& st) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const void* p, size_t n) { h = fnv1a64(p, n, h); };
  int32_t header[3] = {st.mover, st.move_number, st.swap_occurred ? 1 : 0};
  mix(header, sizeof header);
  mix(st.piece.data(), st.piece.size() * sizeof(int16_t));
  mix(st.count.data(), st.count.size() * sizeof(int16_t));
  for (const auto& s : st.stack) mix(s.data(), s.size() * sizeof(int16_t));
  mix(st.local_state.data(), st.local_state.size());
  mix(st.amounts.data(), st.amounts.size() * sizeof(int32_t));
  for (const Move& m : st.last_moves) {
    int32_t mh[6] = {static_cast<int32_t>(m.kind), m.from, m.to, m.l_min, m.l_max, m.piece};
    mix(mh, sizeof mh);
    mix(m.effects.data(), m.effects.size() * sizeof(SiteId));
  }
  return h;
}

inline GameState initial_state(const GameSpec& spec) {
  GameState st;
  const int n = spec.tables.total_sites;
  if (spec.flags.is_stacking)
    st.stack.assign(n, {});
  else
    st.piece.assign(n, 0);
  if (spec.flags.uses_counts) st.count.assign(n, 0);
  st.local_state.assign(n, 0);
  if (spec.flags.uses_amounts) st.amounts.assign(spec.num_players, 0);

  for (const Ludeme& l : spec.rules.start) {
    int type = spec.piece_index(l.piece, l.player);
    for (int s = 0; s < spec.tables.main_sites; ++s) {
      auto [r, c] = spec.tables.lattice[s];
      bool in_region = false;
      switch (l.region.kind) {
        case RegionSpec::Kind::All:
          in_region = true;
          break;
        case RegionSpec::Kind::Rows:
          in_region = std::find(l.region.values.begin(), l.region.values.end(), r) !=
                      l.region.values.end();
          break;
        case RegionSpec::Kind::Checkerboard:
          in_region = (r + c) % 2 == l.region.values[0];
          break;
        case RegionSpec::Kind::Sites:
          in_region = std::find(l.region.values.begin(), l.region.values.end(), s) !=
                      l.region.values.end();
          break;
      }
      if (!in_region) continue;
      if (spec.flags.is_stacking)
        st.stack[s].push_back(static_cast<int16_t>(type));
      else
        st.piece[s] = static_cast<int16_t>(1 + type);
      if (spec.flags.uses_counts) st.count[s] = 1;
    }
  }
  return st;
}

namespace detail {

inline void require_playable(const GameSpec& spec) {
  if (spec.flags.is_stacking || spec.flags.uses_counts)
    throw ContractError("the engine only plays non-stacking, non-count games");
  if (spec.num_players != 2) throw ContractError("the engine only plays 2-player games");
}

inline constexpr std::pair<int, int> kOrthoSteps[4] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
inline constexpr std::pair<int, int> kDiagSteps[4] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

inline void resolve_dirs(const Ludeme& l, Player color, std::vector<std::pair<int, int>>& out) {
  out.clear();
  const int f = color == 1 ? 1 : -1;
  for (Dir d : l.dirs) {
    switch (d) {
      case Dir::Forward:
        out.push_back({f, 0});
        break;
      case Dir::ForwardDiagonal:
        out.push_back({f, -1});
        out.push_back({f, 1});
        break;
      case Dir::Orthogonal:
        out.insert(out.end(), std::begin(kOrthoSteps), std::end(kOrthoSteps));
        break;
      case Dir::Diagonal:
        out.insert(out.end(), std::begin(kDiagSteps), std::end(kDiagSteps));
        break;
      case Dir::Any:
        out.insert(out.end(), std::begin(kOrthoSteps), std::end(kOrthoSteps));
        out.insert(out.end(), std::begin(kDiagSteps), std::end(kDiagSteps));
        break;
    }
  }
}

// Konane opening removal cells: board center(s) plus the four corners.
inline void opening_cells(const GameTables& t, std::vector<SiteId>& out) {
  out.clear();
  int rmax = t.lat_rows - 1, cmax = t.lat_cols - 1;
  std::vector<int> rows_c, cols_c;
  if (t.lat_rows % 2 == 0) {
    rows_c = {t.lat_rows / 2 - 1, t.lat_rows / 2};
  } else {
    rows_c = {t.lat_rows / 2};
  }
  if (t.lat_cols % 2 == 0) {
    cols_c = {t.lat_cols / 2 - 1, t.lat_cols / 2};
  } else {
    cols_c = {t.lat_cols / 2};
  }
  for (int r : rows_c)
    for (int c : cols_c) out.push_back(t.at(r, c));
  for (auto [r, c] : {std::pair{0, 0}, std::pair{0, cmax}, std::pair{rmax, 0},
                      std::pair{rmax, cmax}})
    out.push_back(t.at(r, c));
}

// Depth-first enumeration of jump chains from `from`. Each completed hop is
// a legal stopping point and emits one move. `removed` doubles as the
// capture set and the occupancy override for cells vacated mid-chain.
inline void gen_jumps(const GameSpec& spec, const GameState& st, Player color, SiteId from,
                      int16_t type, SiteId cur, std::vector<SiteId>& removed,
                      std::vector<Move>& out) {
  const GameTables& t = spec.tables;
  auto empty_now = [&](SiteId s) {
    if (s == from) return true;  // the jumper has left its origin
    if (st.piece[s] == 0) return true;
    return std::find(removed.begin(), removed.end(), s) != removed.end();
  };
  auto [r, c] = t.lattice[cur];
  for (auto [dr, dc] : kOrthoSteps) {
    SiteId over = t.at(r + dr, c + dc);
    SiteId land = t.at(r + 2 * dr, c + 2 * dc);
    if (over == kNoSite || land == kNoSite) continue;
    if (st.piece[over] == 0 || cell_owner(spec, st.piece[over]) == color) continue;
    if (std::find(removed.begin(), removed.end(), over) != removed.end()) continue;
    if (!empty_now(land) || land == from) continue;
    removed.push_back(over);
    Move m;
    m.kind = Move::Kind::Play;
    m.from = from;
    m.to = land;
    m.piece = type;
    m.effects = removed;
    std::sort(m.effects.begin(), m.effects.end());
    out.push_back(std::move(m));
    gen_jumps(spec, st, color, from, type, land, removed, out);
    removed.pop_back();
  }
}

inline void gen_moves(const GameSpec& spec, const GameState& st, std::vector<Move>& out) {
  out.clear();
  const GameTables& t = spec.tables;
  const Player color = color_to_move(st);

  if (spec.flags.uses_swap_rule && st.move_number == 1) out.push_back(Move::swap_move());

  std::vector<std::pair<int, int>> dirs;
  std::vector<SiteId> scratch;
  for (size_t li = 0; li < spec.rules.play.size(); ++li) {
    const Ludeme& l = spec.rules.play[li];
    const int16_t type = t.play_piece[li][color];
    const int16_t own_cell = static_cast<int16_t>(1 + type);
    switch (l.kind) {
      case LudemeKind::PlaceEmpty: {
        for (SiteId s = 0; s < t.main_sites; ++s) {
          if (st.piece[s] != 0) continue;
          Move m;
          m.kind = Move::Kind::Play;
          m.from = kNoSite;
          m.to = s;
          m.piece = type;
          out.push_back(std::move(m));
        }
        break;
      }
      case LudemeKind::StepMove: {
        resolve_dirs(l, color, dirs);
        for (SiteId s = 0; s < t.main_sites; ++s) {
          if (st.piece[s] != own_cell) continue;
          auto [r, c] = t.lattice[s];
          for (auto [dr, dc] : dirs) {
            SiteId to = t.at(r + dr, c + dc);
            if (to == kNoSite) continue;
            int16_t occ = st.piece[to];
            bool ok = false;
            switch (l.onto) {
              case OntoRule::Empty:
                ok = occ == 0;
                break;
              case OntoRule::Enemy:
                ok = occ != 0 && cell_owner(spec, occ) != color;
                break;
              case OntoRule::EmptyOrEnemy:
                ok = occ == 0 || cell_owner(spec, occ) != color;
                break;
            }
            if (!ok) continue;
            Move m;
            m.kind = Move::Kind::Play;
            m.from = s;
            m.to = to;
            m.piece = type;
            out.push_back(std::move(m));
          }
        }
        break;
      }
      case LudemeKind::HopCapture: {
        if (l.opening_removals && st.move_number <= 1) {
          if (st.move_number == 0) {
            opening_cells(t, scratch);
          } else {
            // Second removal: orthogonally adjacent to the first gap.
            scratch.clear();
            SiteId hole = st.last_moves.back().to;
            for (SiteId n : t.ortho[hole]) scratch.push_back(n);
          }
          std::sort(scratch.begin(), scratch.end());
          scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
          for (SiteId s : scratch) {
            if (s == kNoSite || st.piece[s] != own_cell) continue;
            Move m;
            m.kind = Move::Kind::Play;
            m.from = s;
            m.to = s;
            m.piece = -1;  // removal: the site ends up empty
            out.push_back(std::move(m));
          }
          break;
        }
        std::vector<SiteId> removed;
        for (SiteId s = 0; s < t.main_sites; ++s) {
          if (st.piece[s] != own_cell) continue;
          removed.clear();
          gen_jumps(spec, st, color, s, type, s, removed, out);
        }
        break;
      }
      default:
        throw ContractError("non-play ludeme in play clause");
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

// End evaluation for the condition classes triggered by the most recent
// play move (lines, connections, reached edges). The losing polarity takes
// precedence when one move triggers both kinds.
inline std::optional<Outcome> eval_move_end(const GameSpec& spec, const GameState& st) {
  if (st.last_moves.empty()) return std::nullopt;
  const Move& m = st.last_moves.back();
  if (m.kind != Move::Kind::Play || m.to == kNoSite || m.piece < 0) return std::nullopt;
  const GameTables& t = spec.tables;
  if (m.to >= t.main_sites) return std::nullopt;
  const int16_t cell = st.piece[m.to];
  if (cell == 0) return std::nullopt;
  const Player color = cell_owner(spec, cell);
  const Player seat = seat_of_color(color, st.swap_occurred);

  auto same_color = [&](SiteId s) {
    return st.piece[s] != 0 && cell_owner(spec, st.piece[s]) == color;
  };

  bool win = false, lose = false;
  for (const Ludeme& l : spec.rules.end) {
    switch (l.kind) {
      case LudemeKind::LineEnd: {
        for (int a = 0; a < t.num_axes && !(win && lose); ++a) {
          int run = 1;
          for (SiteId s = t.axis_next[a][m.to]; s != kNoSite && same_color(s);
               s = t.axis_next[a][s])
            ++run;
          for (SiteId s = t.axis_prev[a][m.to]; s != kNoSite && same_color(s);
               s = t.axis_prev[a][s])
            ++run;
          bool hit = l.exact ? run == l.length : run >= l.length;
          if (!hit) continue;
          (l.polarity == Polarity::Lose ? lose : win) = true;
        }
        break;
      }
      case LudemeKind::ConnectEnd: {
        const auto& edges = color == 1 ? l.edges_p1 : l.edges_p2;
        const auto& mask_a = t.edge_mask[static_cast<int>(edges[0])];
        const auto& mask_b = t.edge_mask[static_cast<int>(edges[1])];
        thread_local std::vector<uint8_t> seen;
        thread_local std::vector<SiteId> queue;
        seen.assign(t.main_sites, 0);
        queue.clear();
        queue.push_back(m.to);
        seen[m.to] = 1;
        bool touch_a = false, touch_b = false;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
          SiteId s = queue[qi];
          touch_a = touch_a || mask_a[s];
          touch_b = touch_b || mask_b[s];
          for (SiteId n : t.ortho[s]) {
            if (seen[n] || !same_color(n)) continue;
            seen[n] = 1;
            queue.push_back(n);
          }
        }
        if (touch_a && touch_b) win = true;
        break;
      }
      case LudemeKind::ReachEnd: {
        Edge target = (color == 1 ? l.edges_p1 : l.edges_p2)[0];
        if (t.edge_mask[static_cast<int>(target)][m.to]) win = true;
        break;
      }
      case LudemeKind::NoMovesEnd:
        break;  // handled where move generation runs
      default:
        throw ContractError("non-end ludeme in end clause");
    }
  }
  if (lose) return Outcome::win_for(3 - seat);
  if (win) return Outcome::win_for(seat);
  return std::nullopt;
}

inline Outcome no_moves_outcome(const GameSpec& spec, const GameState& st) {
  for (const Ludeme& l : spec.rules.end) {
    if (l.kind != LudemeKind::NoMovesEnd) continue;
    switch (l.polarity) {
      case Polarity::Lose:
        return Outcome::win_for(3 - st.mover);
      case Polarity::Win:
        return Outcome::win_for(st.mover);
      case Polarity::Draw:
        return Outcome::draw();
    }
  }
  return Outcome::draw();  // default: a stuck position is a draw
}

}  // namespace detail

// Terminal check and move generation fused: returns the outcome for a
// terminal state (moves left empty), or nullopt with `moves` filled with the
// legal moves in documented order.
inline std::optional<Outcome> outcome_or_moves(const GameSpec& spec, const GameState& st,
                                               std::vector<Move>& moves) {
  detail::require_playable(spec);
  moves.clear();
  if (auto end = detail::eval_move_end(spec, st)) return end;
  detail::gen_moves(spec, st, moves);
  if (moves.empty()) return detail::no_moves_outcome(spec, st);
  return std::nullopt;
}

inline std::optional<Outcome> outcome(const GameSpec& spec, const GameState& st) {
  thread_local std::vector<Move> scratch;
  auto result = outcome_or_moves(spec, st, scratch);
  scratch.clear();
  return result;
}

inline std::vector<Move> legal_moves(const GameSpec& spec, const GameState& st) {
  std::vector<Move> moves;
  if (outcome_or_moves(spec, st, moves)) throw ContractError("legal_moves called on a terminal state");
  return moves;
}

// Applies `move` to `st` in place. Performs structural legality checks
// (sites in range, expected occupancy) with diagnostics; full membership in
// legal_moves is the caller's contract.
inline void apply_in_place(const GameSpec& spec, GameState& st, const Move& move) {
  detail::require_playable(spec);
  const GameTables& t = spec.tables;
  const Player color = color_to_move(st);
  auto illegal = [&](const std::string& why) {
    throw ContractError("illegal move: " + why);
  };

  switch (move.kind) {
    case Move::Kind::Pass:
      break;
    case Move::Kind::Swap:
      if (!spec.flags.uses_swap_rule || st.move_number != 1 || st.swap_occurred)
        illegal("swap is only available as the second move of a swap-rule game");
      st.swap_occurred = true;
      break;
    case Move::Kind::Play: {
      if (move.to < 0 || move.to >= t.total_sites) illegal("to-site out of range");
      if (move.from != kNoSite) {
        if (move.from < 0 || move.from >= t.total_sites) illegal("from-site out of range");
        if (st.piece[move.from] == 0) illegal("from-site is empty");
        if (cell_owner(spec, st.piece[move.from]) != color) illegal("from-site is not the mover's");
      } else if (st.piece[move.to] != 0) {
        illegal("placement target is occupied");
      }
      for (SiteId e : move.effects) {
        if (e < 0 || e >= t.total_sites) illegal("effect site out of range");
        if (st.piece[e] == 0) illegal("effect site is empty");
      }
      if (move.from != kNoSite) {
        st.piece[move.from] = 0;
        st.local_state[move.from] = 0;
      }
      for (SiteId e : move.effects) {
        st.piece[e] = 0;
        st.local_state[e] = 0;
      }
      if (move.piece >= 0) {
        st.piece[move.to] = static_cast<int16_t>(1 + move.piece);
        st.local_state[move.to] = 0;
      }
      break;
    }
  }
  st.last_moves.push_back(move);
  if (st.last_moves.size() > 2) st.last_moves.erase(st.last_moves.begin());
  ++st.move_number;
  st.mover = 3 - st.mover;
}

inline GameState apply(const GameSpec& spec, const GameState& st, const Move& move) {
  GameState next = st;
  apply_in_place(spec, next, move);
  return next;
}

inline uint64_t perft(const GameSpec& spec, const GameState& st, int depth) {
  if (depth == 0) return 1;
  std::vector<Move> moves;
  if (outcome_or_moves(spec, st, moves)) return 1;
  if (depth == 1) return moves.size();
  uint64_t total = 0;
  GameState child;
  for (const Move& m : moves) {
    child = st;
    apply_in_place(spec, child, m);
    total += perft(spec, child, depth - 1);
  }
  return total;
}

// Move notation for logs and the play command: `pass`, `swap`, `to` for
// placements, `from-to` for movements, `fromx` for opening removals.
inline std::string format_move(const Move& m) {
  switch (m.kind) {
    case Move::Kind::Pass:
      return "pass";
    case Move::Kind::Swap:
      return "swap";
    case Move::Kind::Play:
      break;
  }
  if (m.from == kNoSite) return std::to_string(m.to);
  if (m.from == m.to && m.piece < 0) return std::to_string(m.from) + "x";
  std::string s = std::to_string(m.from) + "-" + std::to_string(m.to);
  return s;
}

// Textual state dump, one site per token in global id order: `.` for empty,
// `<piece><owner>` otherwise, with `:n` count and `@k` local-state suffixes
// when present. Main-board rows become lines; each hand gets its own line.
inline std::string state_to_text(const GameSpec& spec, const GameState& st) {
  const GameTables& t = spec.tables;
  std::ostringstream os;
  os << "mover=" << st.mover << " move=" << st.move_number << " swap=" << (st.swap_occurred ? 1 : 0)
     << "\n";
  auto token = [&](SiteId s) {
    std::string tok;
    if (spec.flags.is_stacking) {
      if (st.stack[s].empty()) return std::string(".");
      for (size_t i = 0; i < st.stack[s].size(); ++i) {
        const PieceType& p = spec.piece_types[st.stack[s][i]];
        if (i) tok += '|';
        tok += p.name + std::to_string(p.owner);
      }
    } else if (st.piece[s] == 0) {
      tok = ".";
    } else {
      const PieceType& p = spec.piece_types[st.piece[s] - 1];
      tok = p.name + std::to_string(p.owner);
    }
    if (spec.flags.uses_counts && st.count[s] > 1) tok += ":" + std::to_string(st.count[s]);
    if (st.local_state[s] != 0) tok += "@" + std::to_string(st.local_state[s]);
    return tok;
  };
  int row = 0;
  bool first_in_row = true;
  for (SiteId s = 0; s < t.main_sites; ++s) {
    if (t.lattice[s].first != row) {
      os << "\n";
      row = t.lattice[s].first;
      first_in_row = true;
    }
    if (!first_in_row) os << ' ';
    os << token(s);
    first_in_row = false;
  }
  os << "\n";
  for (size_t ci = 1; ci < spec.containers.size(); ++ci) {
    os << spec.containers[ci].name << ":";
    for (int off = t.container_offset[ci]; off < t.container_offset[ci + 1]; ++off)
      os << ' ' << token(off);
    os << "\n";
  }
  return os.str();
}

}  // namespace lgp
