#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lgp/engine.hpp"
#include "lgp/game.hpp"

namespace lgp {

// Injective placement of every global site into a rectangular grid. The main
// board occupies rows/columns ranked by site coordinates; every further
// container is appended as one extra row or column behind a single dummy
// separator line that no site occupies.
struct GridMap {
  int width = 0;   // columns
  int height = 0;  // rows
  std::vector<std::pair<int, int>> placement;  // site id -> (row, col)
  int dummy_row = -1;                          // -1 when absent
  int dummy_col = -1;
  std::vector<SiteId> cell_to_site;  // row-major, kNoSite for unmapped cells

  SiteId site_at(int row, int col) const {
    if (row < 0 || row >= height || col < 0 || col >= width) return kNoSite;
    return cell_to_site[row * width + col];
  }
};

namespace detail {

// Ranks values after chain-merging: sorted values whose adjacent gap is
// below the tolerance share one rank.
inline std::vector<int> tolerance_ranks(const std::vector<double>& values, double tol) {
  std::vector<int> order(values.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
  std::vector<int> rank(values.size(), 0);
  int next = -1;
  double prev = 0.0;
  for (size_t i = 0; i < order.size(); ++i) {
    double v = values[order[i]];
    if (next < 0 || v - prev >= tol) ++next;
    rank[order[i]] = next;
    prev = v;
  }
  return rank;
}

}  // namespace detail

inline GridMap build_grid(const GameSpec& spec) {
  constexpr double kTol = 1e-5;
  if (spec.containers.empty()) throw ContractError("build_grid: no containers");
  const Container& main = spec.containers.front();

  std::vector<double> xs(main.sites.size()), ys(main.sites.size());
  for (size_t i = 0; i < main.sites.size(); ++i) {
    xs[i] = main.sites[i].x;
    ys[i] = main.sites[i].y;
  }
  std::vector<int> col_rank = detail::tolerance_ranks(xs, kTol);
  std::vector<int> row_rank = detail::tolerance_ranks(ys, kTol);
  int w = col_rank.empty() ? 0 : *std::max_element(col_rank.begin(), col_rank.end()) + 1;
  int h = row_rank.empty() ? 0 : *std::max_element(row_rank.begin(), row_rank.end()) + 1;

  GridMap grid;
  grid.placement.assign(spec.tables.total_sites, {-1, -1});
  for (size_t i = 0; i < main.sites.size(); ++i)
    grid.placement[main.sites[i].id] = {row_rank[i], col_rank[i]};

  int extras = static_cast<int>(spec.containers.size()) - 1;
  if (extras == 0) {
    grid.width = w;
    grid.height = h;
  } else {
    int max_cap = 0;
    for (size_t ci = 1; ci < spec.containers.size(); ++ci)
      max_cap = std::max(max_cap, static_cast<int>(spec.containers[ci].sites.size()));
    // Appending rows grows the grid by width cells per line, columns by
    // height cells; take the cheaper feasible orientation, rows on ties.
    bool rows_fit = max_cap <= w;
    bool cols_fit = max_cap <= h;
    if (!rows_fit && !cols_fit)
      throw ConfigError("unsupported layout: hand capacity " + std::to_string(max_cap) +
                        " exceeds both grid dimensions " + std::to_string(w) + "x" +
                        std::to_string(h));
    bool as_rows = rows_fit && (!cols_fit || w <= h);
    if (as_rows) {
      grid.width = w;
      grid.height = h + 1 + extras;
      grid.dummy_row = h;
      for (int ci = 1; ci <= extras; ++ci) {
        const Container& c = spec.containers[ci];
        for (size_t i = 0; i < c.sites.size(); ++i)
          grid.placement[c.sites[i].id] = {h + ci, static_cast<int>(i)};
      }
    } else {
      grid.width = w + 1 + extras;
      grid.height = h;
      grid.dummy_col = w;
      for (int ci = 1; ci <= extras; ++ci) {
        const Container& c = spec.containers[ci];
        for (size_t i = 0; i < c.sites.size(); ++i)
          grid.placement[c.sites[i].id] = {static_cast<int>(i), w + ci};
      }
    }
  }

  grid.cell_to_site.assign(static_cast<size_t>(grid.width) * grid.height, kNoSite);
  for (SiteId s = 0; s < spec.tables.total_sites; ++s) {
    auto [r, c] = grid.placement[s];
    if (r < 0) throw ContractError("build_grid: unplaced site");
    SiteId& cell = grid.cell_to_site[r * grid.width + c];
    if (cell != kNoSite) throw ContractError("build_grid: placement not injective");
    cell = s;
  }
  return grid;
}

enum class ChannelTag {
  PiecePresence,  // a = piece type
  PieceBottom,    // a = piece type, b = layer from the bottom
  PieceTop,       // a = piece type, b = layer from the top
  StackHeight,
  PieceCount,
  Amount,  // a = player - 1
  Mover,   // a = player - 1
  LocalState,  // a = bucket 0..5, the last meaning >= 5
  Swap,
  ContainerMask,  // a = container index
  LastFrom,       // a = move age, 0 = most recent
  LastTo,
};

struct ChannelSpec {
  ChannelTag tag;
  int a = 0;
  int b = 0;
  bool operator==(const ChannelSpec&) const = default;
};

struct StateChannelLayout {
  static constexpr int kBottomLayers = 5;
  static constexpr int kTopLayers = 5;
  std::vector<ChannelSpec> channels;
  int C = 0;
};

inline StateChannelLayout state_layout(const GameSpec& spec) {
  StateChannelLayout layout;
  auto add = [&](ChannelTag tag, int a = 0, int b = 0) { layout.channels.push_back({tag, a, b}); };
  int types = static_cast<int>(spec.piece_types.size());
  for (int t = 0; t < types; ++t) {
    if (spec.flags.is_stacking) {
      for (int m = 0; m < StateChannelLayout::kBottomLayers; ++m) add(ChannelTag::PieceBottom, t, m);
      for (int n = 0; n < StateChannelLayout::kTopLayers; ++n) add(ChannelTag::PieceTop, t, n);
    } else {
      add(ChannelTag::PiecePresence, t);
    }
  }
  if (spec.flags.is_stacking) add(ChannelTag::StackHeight);
  if (spec.flags.uses_counts) add(ChannelTag::PieceCount);
  if (spec.flags.uses_amounts)
    for (int p = 0; p < spec.num_players; ++p) add(ChannelTag::Amount, p);
  if (spec.num_players > 1)
    for (int p = 0; p < spec.num_players; ++p) add(ChannelTag::Mover, p);
  for (int v = 0; v <= 5; ++v) add(ChannelTag::LocalState, v);
  if (spec.flags.uses_swap_rule) add(ChannelTag::Swap);
  for (size_t ci = 0; ci < spec.containers.size(); ++ci)
    add(ChannelTag::ContainerMask, static_cast<int>(ci));
  for (int k = 0; k < 2; ++k) {
    add(ChannelTag::LastFrom, k);
    add(ChannelTag::LastTo, k);
  }
  layout.C = static_cast<int>(layout.channels.size());
  return layout;
}

struct MoveChannelLayout {
  enum class Mode { Placement, FromTo };
  Mode mode = Mode::Placement;
  int A = 3;
  int pass_channel = 0;
  int swap_channel = 1;
  int delta_clip = 3;  // from-to spatial window half-width
  int level_clip = 0;  // 2 for stacking games
};

inline MoveChannelLayout move_layout(const GameSpec& spec) {
  MoveChannelLayout layout;
  if (spec.flags.placement_only) {
    layout.mode = MoveChannelLayout::Mode::Placement;
    layout.A = 3;
    layout.level_clip = 0;
  } else {
    layout.mode = MoveChannelLayout::Mode::FromTo;
    layout.level_clip = spec.flags.is_stacking ? 2 : 0;
    int d = 2 * layout.delta_clip + 1;
    int l = layout.level_clip + 1;
    layout.A = 2 + d * d * l * l;
  }
  return layout;
}

// Channel-major, then row, then column.
struct StateTensor {
  int C = 0, H = 0, W = 0;
  std::vector<float> data;

  float& at(int c, int r, int col) { return data[(static_cast<size_t>(c) * H + r) * W + col]; }
  float at(int c, int r, int col) const { return data[(static_cast<size_t>(c) * H + r) * W + col]; }
};

inline StateTensor encode_state(const GameSpec& spec, const GridMap& grid,
                                const StateChannelLayout& layout, const GameState& st) {
  StateTensor t;
  t.C = layout.C;
  t.H = grid.height;
  t.W = grid.width;
  t.data.assign(static_cast<size_t>(t.C) * t.H * t.W, 0.0f);

  int total = spec.tables.total_sites;
  auto set_site = [&](int c, SiteId s, float v) {
    auto [r, col] = grid.placement[s];
    t.at(c, r, col) = v;
  };
  auto fill_mapped = [&](int c, float v) {
    for (SiteId s = 0; s < total; ++s) set_site(c, s, v);
  };

  for (int c = 0; c < layout.C; ++c) {
    const ChannelSpec& ch = layout.channels[c];
    switch (ch.tag) {
      case ChannelTag::PiecePresence: {
        int16_t cell = static_cast<int16_t>(1 + ch.a);
        for (SiteId s = 0; s < total; ++s)
          if (st.piece[s] == cell) set_site(c, s, 1.0f);
        break;
      }
      case ChannelTag::PieceBottom: {
        int16_t cell = static_cast<int16_t>(1 + ch.a);
        for (SiteId s = 0; s < total; ++s) {
          const auto& stack = st.stack[s];
          if (static_cast<int>(stack.size()) > ch.b && stack[ch.b] == cell) set_site(c, s, 1.0f);
        }
        break;
      }
      case ChannelTag::PieceTop: {
        int16_t cell = static_cast<int16_t>(1 + ch.a);
        for (SiteId s = 0; s < total; ++s) {
          const auto& stack = st.stack[s];
          int idx = static_cast<int>(stack.size()) - 1 - ch.b;
          if (idx >= 0 && stack[idx] == cell) set_site(c, s, 1.0f);
        }
        break;
      }
      case ChannelTag::StackHeight:
        for (SiteId s = 0; s < total; ++s)
          if (!st.stack[s].empty()) set_site(c, s, static_cast<float>(st.stack[s].size()));
        break;
      case ChannelTag::PieceCount:
        for (SiteId s = 0; s < total; ++s)
          if (st.count[s] != 0) set_site(c, s, static_cast<float>(st.count[s]));
        break;
      case ChannelTag::Amount:
        fill_mapped(c, static_cast<float>(st.amounts[ch.a]));
        break;
      case ChannelTag::Mover:
        if (st.mover == ch.a + 1) fill_mapped(c, 1.0f);
        break;
      case ChannelTag::LocalState:
        for (SiteId s = 0; s < total; ++s)
          if (std::min<int>(st.local_state[s], 5) == ch.a) set_site(c, s, 1.0f);
        break;
      case ChannelTag::Swap:
        if (st.swap_occurred) fill_mapped(c, 1.0f);
        break;
      case ChannelTag::ContainerMask:
        for (const Site& site : spec.containers[ch.a].sites) set_site(c, site.id, 1.0f);
        break;
      case ChannelTag::LastFrom:
      case ChannelTag::LastTo: {
        int n = static_cast<int>(st.last_moves.size());
        if (ch.a >= n) break;
        const Move& m = st.last_moves[n - 1 - ch.a];
        if (m.kind != Move::Kind::Play) break;
        SiteId s = ch.tag == ChannelTag::LastTo ? m.to : m.from;
        if (s != kNoSite) set_site(c, s, 1.0f);
        break;
      }
    }
  }
  return t;
}

struct LogitIndex {
  int channel = 0;
  int row = 0;
  int col = 0;
};

inline int flat_logit(const LogitIndex& idx, const GridMap& grid) {
  return (idx.channel * grid.height + idx.row) * grid.width + idx.col;
}

inline int logit_count(const MoveChannelLayout& layout, const GridMap& grid) {
  return layout.A * grid.height * grid.width;
}

namespace detail {

inline int clip(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

}  // namespace detail

inline LogitIndex encode_move(const GameSpec&, const GridMap& grid,
                              const MoveChannelLayout& layout, const Move& move) {
  if (move.kind == Move::Kind::Pass) return {layout.pass_channel, 0, 0};
  if (move.kind == Move::Kind::Swap) return {layout.swap_channel, 0, 0};

  auto [to_row, to_col] = grid.placement[move.to];
  if (to_row < 0) throw ContractError("encode_move: unmapped to-site");
  if (layout.mode == MoveChannelLayout::Mode::Placement) return {2, to_row, to_col};

  SiteId from = move.from == kNoSite ? move.to : move.from;
  auto [from_row, from_col] = grid.placement[from];
  if (from_row < 0) throw ContractError("encode_move: unmapped from-site");
  int m = layout.delta_clip, n = layout.level_clip;
  int dx = detail::clip(to_row - from_row, -m, m) + m;
  int dy = detail::clip(to_col - from_col, -m, m) + m;
  int lo = detail::clip(move.l_min, 0, n);
  int span = detail::clip(move.l_max - move.l_min, 0, n);
  int channel = 2 + ((dx * (2 * m + 1) + dy) * (n + 1) + lo) * (n + 1) + span;
  return {channel, to_row, to_col};
}

inline std::map<int, std::vector<Move>> logit_partition(const GameSpec& spec, const GridMap& grid,
                                                        const MoveChannelLayout& layout,
                                                        const std::vector<Move>& moves) {
  std::map<int, std::vector<Move>> classes;
  for (const Move& m : moves) classes[flat_logit(encode_move(spec, grid, layout, m), grid)].push_back(m);
  return classes;
}

// Everything a network or search needs to talk tensors about one game.
struct Codec {
  GridMap grid;
  StateChannelLayout state;
  MoveChannelLayout move;

  static Codec build(const GameSpec& spec) {
    return {build_grid(spec), state_layout(spec), move_layout(spec)};
  }
  int logit_count() const { return lgp::logit_count(move, grid); }
};

// Stable digest of the tensor interface a checkpoint was trained against.
inline uint64_t layout_fingerprint(const GameSpec& spec, const Codec& codec) {
  uint64_t h = fnv1a64(spec.name);
  auto mix = [&](int v) {
    int64_t x = v;
    h = fnv1a64(&x, sizeof x, h);
  };
  mix(codec.grid.width);
  mix(codec.grid.height);
  mix(codec.grid.dummy_row);
  mix(codec.grid.dummy_col);
  for (auto [r, c] : codec.grid.placement) {
    mix(r);
    mix(c);
  }
  mix(codec.state.C);
  for (const ChannelSpec& ch : codec.state.channels) {
    mix(static_cast<int>(ch.tag));
    mix(ch.a);
    mix(ch.b);
  }
  mix(static_cast<int>(codec.move.mode));
  mix(codec.move.A);
  mix(codec.move.level_clip);
  return h;
}

// Text form of a flattened tensor: one value per token, channel-major.
inline std::string tensor_to_text(const StateTensor& t) {
  std::string out;
  char buf[32];
  for (size_t i = 0; i < t.data.size(); ++i) {
    float v = t.data[i];
    if (v == static_cast<long>(v))
      std::snprintf(buf, sizeof buf, "%ld", static_cast<long>(v));
    else
      std::snprintf(buf, sizeof buf, "%g", v);
    out += buf;
    out += (i + 1) % static_cast<size_t>(t.W) == 0 ? '\n' : ' ';
  }
  return out;
}

}  // namespace lgp
