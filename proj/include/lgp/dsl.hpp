#pragma once

// The .lgd game description language: S-expressions with `;` comments.
// parse_game binds the tree into a GameSpec and finalizes it; print_game
// emits canonical source that parses back to an equal spec. The grammar is
// documented in docs/game-language.md.

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lgp/game.hpp"

namespace lgp {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct SExpr {
  enum class Type { List, Atom, Str };
  Type type = Type::List;
  std::string text;  // Atom / Str payload
  std::vector<SExpr> items;
  int line = 1, col = 1;

  bool is_atom(const char* s) const { return type == Type::Atom && text == s; }
  const SExpr& at(size_t i, const char* what) const {
    if (i >= items.size())
      throw ParseError(std::string("missing ") + what, line, col);
    return items[i];
  }
};

namespace detail {

class SexprReader {
 public:
  explicit SexprReader(const std::string& src) : src_(src) {}

  // Reads exactly one toplevel expression and requires end-of-input after it.
  SExpr read_single() {
    SExpr e = read(0);
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  static constexpr int kMaxDepth = 256;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read(int depth) {
    if (depth > kMaxDepth) fail("expression nested too deeply");
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    SExpr e;
    e.line = line_;
    e.col = col_;
    char c = src_[pos_];
    if (c == '(') {
      advance();
      e.type = SExpr::Type::List;
      while (true) {
        skip_ws();
        if (pos_ >= src_.size()) fail("unclosed '('");
        if (src_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read(depth + 1));
      }
    }
    if (c == ')') fail("unmatched ')'");
    if (c == '"') {
      advance();
      e.type = SExpr::Type::Str;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') fail("newline in string literal");
        e.text += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size()) fail("unterminated string literal");
      advance();
      return e;
    }
    e.type = SExpr::Type::Atom;
    while (pos_ < src_.size()) {
      char a = src_[pos_];
      if (a == '(' || a == ')' || a == '"' || a == ';' || a == ' ' || a == '\t' ||
          a == '\r' || a == '\n')
        break;
      e.text += a;
      advance();
    }
    return e;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

inline const SExpr& expect_list(const SExpr& e, const char* head) {
  if (e.type != SExpr::Type::List || e.items.empty() || !e.items[0].is_atom(head))
    throw ParseError(std::string("expected (") + head + " ...)", e.line, e.col);
  return e;
}

inline bool is_form(const SExpr& e, const char* head) {
  return e.type == SExpr::Type::List && !e.items.empty() && e.items[0].is_atom(head);
}

inline std::string expect_string(const SExpr& e, const char* what) {
  if (e.type != SExpr::Type::Str)
    throw ParseError(std::string("expected a quoted ") + what, e.line, e.col);
  return e.text;
}

inline int expect_int(const SExpr& e, const char* what) {
  if (e.type == SExpr::Type::Atom) {
    char* endp = nullptr;
    long v = std::strtol(e.text.c_str(), &endp, 10);
    if (endp && *endp == '\0' && !e.text.empty() && v >= -1000000 && v <= 1000000)
      return static_cast<int>(v);
  }
  throw ParseError(std::string("expected an integer ") + what, e.line, e.col);
}

inline Player expect_player(const SExpr& e) {
  if (e.is_atom("P1")) return 1;
  if (e.is_atom("P2")) return 2;
  throw ParseError("expected P1 or P2", e.line, e.col);
}

inline Edge expect_edge(const SExpr& e) {
  if (e.is_atom("north")) return Edge::North;
  if (e.is_atom("south")) return Edge::South;
  if (e.is_atom("west")) return Edge::West;
  if (e.is_atom("east")) return Edge::East;
  throw ParseError("expected an edge (north/south/west/east)", e.line, e.col);
}

inline Polarity expect_polarity(const SExpr& e) {
  if (e.is_atom("win")) return Polarity::Win;
  if (e.is_atom("lose")) return Polarity::Lose;
  if (e.is_atom("draw")) return Polarity::Draw;
  throw ParseError("expected win, lose or draw", e.line, e.col);
}

inline RegionSpec bind_region(const SExpr& e) {
  RegionSpec r;
  if (e.is_atom("all")) {
    r.kind = RegionSpec::Kind::All;
    return r;
  }
  if (is_form(e, "rows")) {
    r.kind = RegionSpec::Kind::Rows;
    if (e.items.size() < 2) throw ParseError("(rows ...) needs at least one row", e.line, e.col);
    for (size_t i = 1; i < e.items.size(); ++i)
      r.values.push_back(expect_int(e.items[i], "row"));
    return r;
  }
  if (is_form(e, "checkerboard")) {
    r.kind = RegionSpec::Kind::Checkerboard;
    r.values.push_back(expect_int(e.at(1, "parity"), "parity"));
    return r;
  }
  if (is_form(e, "sites")) {
    r.kind = RegionSpec::Kind::Sites;
    if (e.items.size() < 2) throw ParseError("(sites ...) needs at least one site", e.line, e.col);
    for (size_t i = 1; i < e.items.size(); ++i)
      r.values.push_back(expect_int(e.items[i], "site id"));
    return r;
  }
  throw ParseError("expected a region (rows/checkerboard/sites/all)", e.line, e.col);
}

inline Ludeme bind_play_ludeme(const SExpr& e) {
  Ludeme l;
  if (is_form(e, "place-empty")) {
    l.kind = LudemeKind::PlaceEmpty;
    l.piece = expect_string(e.at(1, "piece name"), "piece name");
    if (e.items.size() != 2) throw ParseError("(place-empty ...) takes one piece", e.line, e.col);
    return l;
  }
  if (is_form(e, "step-move")) {
    l.kind = LudemeKind::StepMove;
    l.piece = expect_string(e.at(1, "piece name"), "piece name");
    const SExpr& dirs = expect_list(e.at(2, "(dirs ...)"), "dirs");
    if (dirs.items.size() < 2) throw ParseError("(dirs ...) needs a direction", dirs.line, dirs.col);
    for (size_t i = 1; i < dirs.items.size(); ++i) {
      const SExpr& d = dirs.items[i];
      if (d.is_atom("forward"))
        l.dirs.push_back(Dir::Forward);
      else if (d.is_atom("forward-diagonal"))
        l.dirs.push_back(Dir::ForwardDiagonal);
      else if (d.is_atom("orthogonal"))
        l.dirs.push_back(Dir::Orthogonal);
      else if (d.is_atom("diagonal"))
        l.dirs.push_back(Dir::Diagonal);
      else if (d.is_atom("any"))
        l.dirs.push_back(Dir::Any);
      else
        throw ParseError("unknown direction '" + d.text + "'", d.line, d.col);
    }
    const SExpr& onto = expect_list(e.at(3, "(onto ...)"), "onto");
    const SExpr& o = onto.at(1, "onto rule");
    if (o.is_atom("empty"))
      l.onto = OntoRule::Empty;
    else if (o.is_atom("enemy"))
      l.onto = OntoRule::Enemy;
    else if (o.is_atom("empty-or-enemy"))
      l.onto = OntoRule::EmptyOrEnemy;
    else
      throw ParseError("unknown onto rule '" + o.text + "'", o.line, o.col);
    if (e.items.size() != 4) throw ParseError("(step-move ...) has extra forms", e.line, e.col);
    return l;
  }
  if (is_form(e, "hop-capture")) {
    l.kind = LudemeKind::HopCapture;
    l.piece = expect_string(e.at(1, "piece name"), "piece name");
    for (size_t i = 2; i < e.items.size(); ++i) {
      const SExpr& opt = e.items[i];
      if (is_form(opt, "opening")) {
        if (!opt.at(1, "opening mode").is_atom("center-or-corner"))
          throw ParseError("unknown opening mode", opt.line, opt.col);
        l.opening_removals = true;
      } else if (is_form(opt, "chain")) {
        if (!opt.at(1, "chain mode").is_atom("any-direction"))
          throw ParseError("unknown chain mode", opt.line, opt.col);
        l.chain_any_direction = true;
      } else {
        throw ParseError("unknown hop-capture option", opt.line, opt.col);
      }
    }
    return l;
  }
  throw ParseError("unknown play ludeme", e.line, e.col);
}

inline Ludeme bind_end_ludeme(const SExpr& e) {
  Ludeme l;
  if (is_form(e, "line")) {
    l.kind = LudemeKind::LineEnd;
    l.length = expect_int(e.at(1, "line length"), "line length");
    l.polarity = expect_polarity(e.at(2, "polarity"));
    if (e.items.size() == 4) {
      if (!e.items[3].is_atom("exact"))
        throw ParseError("expected 'exact'", e.items[3].line, e.items[3].col);
      l.exact = true;
    } else if (e.items.size() != 3) {
      throw ParseError("(line length polarity [exact])", e.line, e.col);
    }
    return l;
  }
  if (is_form(e, "connect")) {
    l.kind = LudemeKind::ConnectEnd;
    for (size_t i = 1; i <= 2; ++i) {
      const SExpr& side = e.at(i, "player edge pair");
      if (side.type != SExpr::Type::List || side.items.size() != 3)
        throw ParseError("expected (P<n> edge edge)", side.line, side.col);
      Player p = expect_player(side.items[0]);
      std::array<Edge, 2> pair = {expect_edge(side.items[1]), expect_edge(side.items[2])};
      (p == 1 ? l.edges_p1 : l.edges_p2) = pair;
    }
    return l;
  }
  if (is_form(e, "reach")) {
    l.kind = LudemeKind::ReachEnd;
    for (size_t i = 1; i <= 2; ++i) {
      const SExpr& side = e.at(i, "player edge");
      if (side.type != SExpr::Type::List || side.items.size() != 2)
        throw ParseError("expected (P<n> edge)", side.line, side.col);
      Player p = expect_player(side.items[0]);
      Edge edge = expect_edge(side.items[1]);
      (p == 1 ? l.edges_p1 : l.edges_p2)[0] = edge;
    }
    return l;
  }
  if (is_form(e, "no-moves")) {
    l.kind = LudemeKind::NoMovesEnd;
    l.polarity = expect_polarity(e.at(1, "polarity"));
    return l;
  }
  throw ParseError("unknown end condition", e.line, e.col);
}

}  // namespace detail

inline GameSpec parse_game(const std::string& text) {
  detail::SexprReader reader(text);
  SExpr root = reader.read_single();
  detail::expect_list(root, "game");

  GameSpec spec;
  spec.name = detail::expect_string(root.at(1, "game name"), "game name");

  bool saw_players = false, saw_board = false, saw_pieces = false, saw_rules = false;
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& form = root.items[i];
    if (detail::is_form(form, "players")) {
      spec.num_players = detail::expect_int(form.at(1, "player count"), "player count");
      if (spec.num_players != 2)
        throw ParseError("only 2-player games are supported", form.line, form.col);
      saw_players = true;
    } else if (detail::is_form(form, "board")) {
      const SExpr& tiling = form.at(1, "tiling");
      if (detail::is_form(tiling, "square")) {
        spec.board.kind = BoardDecl::Kind::Square;
        spec.board.rows = detail::expect_int(tiling.at(1, "rows"), "rows");
        spec.board.cols = tiling.items.size() > 2
                              ? detail::expect_int(tiling.items[2], "cols")
                              : spec.board.rows;
      } else if (detail::is_form(tiling, "hex-rhombus")) {
        spec.board.kind = BoardDecl::Kind::HexRhombus;
        spec.board.rows = spec.board.cols = detail::expect_int(tiling.at(1, "size"), "size");
      } else if (detail::is_form(tiling, "hex-hex")) {
        spec.board.kind = BoardDecl::Kind::HexHex;
        spec.board.rows = spec.board.cols = detail::expect_int(tiling.at(1, "side"), "side");
      } else {
        throw ParseError("unknown tiling", tiling.line, tiling.col);
      }
      for (size_t j = 2; j < form.items.size(); ++j) {
        const SExpr& extra = detail::expect_list(form.items[j], "hands");
        spec.board.hand_capacity = detail::expect_int(extra.at(1, "capacity"), "capacity");
        if (spec.board.hand_capacity < 1)
          throw ParseError("hand capacity must be positive", extra.line, extra.col);
      }
      saw_board = true;
    } else if (detail::is_form(form, "pieces")) {
      for (size_t j = 1; j < form.items.size(); ++j) {
        const SExpr& p = detail::expect_list(form.items[j], "piece");
        std::string name = detail::expect_string(p.at(1, "piece name"), "piece name");
        const SExpr& owner = p.at(2, "owner");
        if (owner.is_atom("each")) {
          for (Player q = 1; q <= 2; ++q) spec.piece_types.push_back({name, q});
        } else {
          spec.piece_types.push_back({name, detail::expect_player(owner)});
        }
      }
      saw_pieces = true;
    } else if (detail::is_form(form, "rules")) {
      bool saw_play = false, saw_end = false;
      for (size_t j = 1; j < form.items.size(); ++j) {
        const SExpr& clause = form.items[j];
        if (detail::is_form(clause, "start")) {
          for (size_t k = 1; k < clause.items.size(); ++k) {
            const SExpr& pl = detail::expect_list(clause.items[k], "place");
            Ludeme l;
            l.kind = LudemeKind::StartPlace;
            l.piece = detail::expect_string(pl.at(1, "piece name"), "piece name");
            l.player = detail::expect_player(pl.at(2, "owner"));
            l.region = detail::bind_region(pl.at(3, "region"));
            spec.rules.start.push_back(std::move(l));
          }
        } else if (detail::is_form(clause, "play")) {
          if (saw_play) throw ParseError("duplicate play clause", clause.line, clause.col);
          for (size_t k = 1; k < clause.items.size(); ++k)
            spec.rules.play.push_back(detail::bind_play_ludeme(clause.items[k]));
          saw_play = true;
        } else if (detail::is_form(clause, "end")) {
          for (size_t k = 1; k < clause.items.size(); ++k)
            spec.rules.end.push_back(detail::bind_end_ludeme(clause.items[k]));
          saw_end = true;
        } else {
          throw ParseError("unknown rules clause", clause.line, clause.col);
        }
      }
      if (!saw_play) throw ParseError("rules need a play clause", form.line, form.col);
      if (!saw_end) throw ParseError("rules need an end clause", form.line, form.col);
      saw_rules = true;
    } else if (detail::is_form(form, "meta")) {
      for (size_t j = 1; j < form.items.size(); ++j) {
        detail::expect_list(form.items[j], "swap");
        Ludeme l;
        l.kind = LudemeKind::SwapMeta;
        spec.rules.meta.push_back(l);
      }
    } else {
      throw ParseError("unknown game form", form.line, form.col);
    }
  }
  if (!saw_players) throw ParseError("missing (players ...)", root.line, root.col);
  if (!saw_board) throw ParseError("missing (board ...)", root.line, root.col);
  if (!saw_pieces) throw ParseError("missing (pieces ...)", root.line, root.col);
  if (!saw_rules) throw ParseError("missing (rules ...)", root.line, root.col);

  try {
    finalize_spec(spec);
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), root.line, root.col);
  }
  return spec;
}

namespace detail {

inline const char* edge_name(Edge e) {
  switch (e) {
    case Edge::North: return "north";
    case Edge::South: return "south";
    case Edge::West: return "west";
    case Edge::East: return "east";
  }
  return "?";
}

inline const char* dir_name(Dir d) {
  switch (d) {
    case Dir::Forward: return "forward";
    case Dir::ForwardDiagonal: return "forward-diagonal";
    case Dir::Orthogonal: return "orthogonal";
    case Dir::Diagonal: return "diagonal";
    case Dir::Any: return "any";
  }
  return "?";
}

inline const char* polarity_name(Polarity p) {
  switch (p) {
    case Polarity::Win: return "win";
    case Polarity::Lose: return "lose";
    case Polarity::Draw: return "draw";
  }
  return "?";
}

inline void print_region(std::ostream& os, const RegionSpec& r) {
  switch (r.kind) {
    case RegionSpec::Kind::All:
      os << "all";
      return;
    case RegionSpec::Kind::Rows:
      os << "(rows";
      for (int v : r.values) os << ' ' << v;
      os << ')';
      return;
    case RegionSpec::Kind::Checkerboard:
      os << "(checkerboard " << r.values[0] << ')';
      return;
    case RegionSpec::Kind::Sites:
      os << "(sites";
      for (int v : r.values) os << ' ' << v;
      os << ')';
      return;
  }
}

}  // namespace detail

// Canonical source form: parse_game(print_game(s)) compares equal to s.
// Piece owners are printed explicitly (the "each" shorthand is one-way).
inline std::string print_game(const GameSpec& spec) {
  std::ostringstream os;
  os << "(game \"" << spec.name << "\"\n";
  os << "  (players " << spec.num_players << ")\n";
  os << "  (board ";
  switch (spec.board.kind) {
    case BoardDecl::Kind::Square:
      os << "(square " << spec.board.rows << " " << spec.board.cols << ")";
      break;
    case BoardDecl::Kind::HexRhombus:
      os << "(hex-rhombus " << spec.board.rows << ")";
      break;
    case BoardDecl::Kind::HexHex:
      os << "(hex-hex " << spec.board.rows << ")";
      break;
  }
  if (spec.board.hand_capacity > 0) os << " (hands " << spec.board.hand_capacity << ")";
  os << ")\n";
  os << "  (pieces";
  for (const PieceType& p : spec.piece_types)
    os << " (piece \"" << p.name << "\" P" << p.owner << ")";
  os << ")\n";
  os << "  (rules\n";
  if (!spec.rules.start.empty()) {
    os << "    (start";
    for (const Ludeme& l : spec.rules.start) {
      os << " (place \"" << l.piece << "\" P" << l.player << " ";
      detail::print_region(os, l.region);
      os << ")";
    }
    os << ")\n";
  }
  os << "    (play";
  for (const Ludeme& l : spec.rules.play) {
    switch (l.kind) {
      case LudemeKind::PlaceEmpty:
        os << " (place-empty \"" << l.piece << "\")";
        break;
      case LudemeKind::StepMove: {
        os << " (step-move \"" << l.piece << "\" (dirs";
        for (Dir d : l.dirs) os << ' ' << detail::dir_name(d);
        os << ") (onto ";
        os << (l.onto == OntoRule::Empty ? "empty"
                                         : l.onto == OntoRule::Enemy ? "enemy" : "empty-or-enemy");
        os << "))";
        break;
      }
      case LudemeKind::HopCapture:
        os << " (hop-capture \"" << l.piece << "\"";
        if (l.opening_removals) os << " (opening center-or-corner)";
        if (l.chain_any_direction) os << " (chain any-direction)";
        os << ")";
        break;
      default:
        throw ContractError("non-play ludeme in play clause");
    }
  }
  os << ")\n";
  os << "    (end";
  for (const Ludeme& l : spec.rules.end) {
    switch (l.kind) {
      case LudemeKind::LineEnd:
        os << " (line " << l.length << ' ' << detail::polarity_name(l.polarity);
        if (l.exact) os << " exact";
        os << ")";
        break;
      case LudemeKind::ConnectEnd:
        os << " (connect (P1 " << detail::edge_name(l.edges_p1[0]) << ' '
           << detail::edge_name(l.edges_p1[1]) << ") (P2 " << detail::edge_name(l.edges_p2[0])
           << ' ' << detail::edge_name(l.edges_p2[1]) << "))";
        break;
      case LudemeKind::ReachEnd:
        os << " (reach (P1 " << detail::edge_name(l.edges_p1[0]) << ") (P2 "
           << detail::edge_name(l.edges_p2[0]) << "))";
        break;
      case LudemeKind::NoMovesEnd:
        os << " (no-moves " << detail::polarity_name(l.polarity) << ")";
        break;
      default:
        throw ContractError("non-end ludeme in end clause");
    }
  }
  os << "))";
  if (spec.flags.uses_swap_rule) os << "\n  (meta (swap))";
  os << ")\n";
  return os.str();
}

// Built-in game descriptions. Rule choices follow the standard published
// rules for each game; where those are silent (stalemate handling, opening
// details) the choice is noted in the file's comments.
inline const std::map<std::string, std::string>& builtin_games() {
  static const std::map<std::string, std::string> games = {
      {"hex-5", R"(; Hex on a 5x5 rhombus of hexagons. Players alternate placing stones;
; the first player to connect their two opposite board edges wins. The
; swap rule lets the second player take over the opening move. Standard
; rules; draws are impossible.
(game "hex-5"
  (players 2)
  (board (hex-rhombus 5))
  (pieces (piece "stone" each))
  (rules
    (play (place-empty "stone"))
    (end (connect (P1 north south) (P2 west east))))
  (meta (swap)))
)"},
      {"hex-11", R"(; Hex on the standard 11x11 rhombus. See hex-5 for rule notes.
(game "hex-11"
  (players 2)
  (board (hex-rhombus 11))
  (pieces (piece "stone" each))
  (rules
    (play (place-empty "stone"))
    (end (connect (P1 north south) (P2 west east))))
  (meta (swap)))
)"},
      {"gomoku-9", R"(; Gomoku (five in a row) on a 9x9 board, freestyle scoring: a run of
; five or more stones wins. A full board with no winner is a draw.
(game "gomoku-9"
  (players 2)
  (board (square 9 9))
  (pieces (piece "stone" each))
  (rules
    (play (place-empty "stone"))
    (end (line 5 win))))
)"},
      {"yavalath", R"(; Yavalath on a hexhex board of side 5. Four or more in a row wins, but
; completing a run of exactly three loses on the spot -- the losing check
; takes precedence when one placement creates both on different axes.
; A full board is a draw.
(game "yavalath"
  (players 2)
  (board (hex-hex 5))
  (pieces (piece "stone" each))
  (rules
    (play (place-empty "stone"))
    (end (line 3 lose exact) (line 4 win))))
)"},
      {"squava", R"(; Squava on a 5x5 board: four in a row wins, exactly three in a row
; loses, with the losing check taking precedence. Full board draws.
(game "squava"
  (players 2)
  (board (square 5 5))
  (pieces (piece "stone" each))
  (rules
    (play (place-empty "stone"))
    (end (line 3 lose exact) (line 4 win))))
)"},
      {"breakthrough-6", R"(; Breakthrough on 6x6 with two full rows of pawns per side. Pawns step
; one cell straight or diagonally forward; only diagonal steps may
; capture. Reaching the opponent's home row wins. The standard rules
; never stall, but a blocked player here loses (house ruling).
(game "breakthrough-6"
  (players 2)
  (board (square 6 6))
  (pieces (piece "pawn" each))
  (rules
    (start (place "pawn" P1 (rows 0 1)) (place "pawn" P2 (rows 4 5)))
    (play
      (step-move "pawn" (dirs forward) (onto empty))
      (step-move "pawn" (dirs forward-diagonal) (onto empty-or-enemy)))
    (end (reach (P1 north) (P2 south)) (no-moves lose))))
)"},
      {"breakthrough-8", R"(; Breakthrough on the standard 8x8 board. See breakthrough-6 for notes.
(game "breakthrough-8"
  (players 2)
  (board (square 8 8))
  (pieces (piece "pawn" each))
  (rules
    (start (place "pawn" P1 (rows 0 1)) (place "pawn" P2 (rows 6 7)))
    (play
      (step-move "pawn" (dirs forward) (onto empty))
      (step-move "pawn" (dirs forward-diagonal) (onto empty-or-enemy)))
    (end (reach (P1 north) (P2 south)) (no-moves lose))))
)"},
      {"konane-6", R"(; Konane on 6x6. The board starts full in a checkerboard pattern. Black
; first removes one of their own stones from the board's center or a
; corner; White then removes one of theirs orthogonally adjacent to the
; gap. Afterwards players capture by jumping orthogonally over an enemy
; stone into an empty cell, removing it; a jump sequence may continue,
; change direction between hops (house variant), or stop after any hop.
; Whoever cannot capture on their turn loses.
(game "konane-6"
  (players 2)
  (board (square 6 6))
  (pieces (piece "stone" each))
  (rules
    (start (place "stone" P1 (checkerboard 0)) (place "stone" P2 (checkerboard 1)))
    (play (hop-capture "stone" (opening center-or-corner) (chain any-direction)))
    (end (no-moves lose))))
)"},
  };
  return games;
}

// Convenience: parse one built-in by name.
inline GameSpec load_builtin(const std::string& name) {
  const auto& games = builtin_games();
  auto it = games.find(name);
  if (it == games.end()) throw ConfigError("unknown game '" + name + "'");
  return parse_game(it->second);
}

}  // namespace lgp
