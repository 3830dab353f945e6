#pragma once

// Board containers: sites with physical coordinates in [0,1]^2 plus adjacency.
// Three tilings (square, hex rhombus, hexhex) and adjacency-free hands.
// Coordinates are normalized by dividing each axis by its maximum raw value;
// a degenerate axis (single row/column) maps to 0.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lgp/common.hpp"

namespace lgp {

enum class ContainerKind { MainBoard, Hand };
enum class Tiling { Square, HexRhombus, HexHex, None };

struct Site {
  int id = 0;  // container-local index
  double x = 0.0, y = 0.0;
  std::vector<int> orthogonal_neighbors;
  std::vector<int> diagonal_neighbors;  // square tilings only
};

struct Container {
  std::string name;
  ContainerKind kind = ContainerKind::MainBoard;
  Tiling tiling = Tiling::None;
  Player owner = 0;  // hands only
  int rows = 0, cols = 0;  // square: lattice dims; hex rhombus: size x size; hexhex: row count
  std::vector<Site> sites;
  // Integer lattice coordinate per site: (row, col) for square, (row, q) for
  // hex tilings. Empty for hands. Used by rules (directions, lines, edges).
  std::vector<std::pair<int, int>> lattice;
};

namespace detail {

inline double axis_norm(double raw, double raw_max) {
  return raw_max > 0.0 ? raw / raw_max : 0.0;
}

}  // namespace detail

inline Container generate_square(int rows, int cols) {
  Container c;
  c.name = "board";
  c.kind = ContainerKind::MainBoard;
  c.tiling = Tiling::Square;
  c.rows = rows;
  c.cols = cols;
  c.sites.resize(static_cast<size_t>(rows) * cols);
  c.lattice.resize(c.sites.size());
  for (int r = 0; r < rows; ++r) {
    for (int col = 0; col < cols; ++col) {
      int id = r * cols + col;
      Site& s = c.sites[id];
      s.id = id;
      s.x = detail::axis_norm(col, cols - 1);
      s.y = detail::axis_norm(r, rows - 1);
      c.lattice[id] = {r, col};
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          int nr = r + dr, nc = col + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          int nid = nr * cols + nc;
          if (dr == 0 || dc == 0)
            s.orthogonal_neighbors.push_back(nid);
          else
            s.diagonal_neighbors.push_back(nid);
        }
      }
    }
  }
  return c;
}

// Six axial neighbor offsets (dr, dq) shared by both hex tilings.
inline constexpr std::pair<int, int> kHexOffsets[6] = {
    {0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, -1}, {-1, 1}};

// size x size rhombus of hexagons. Row r, column c sits at staggered raw
// position (c + 0.5*r, r*sqrt(3)/2); all six neighbors are "orthogonal".
inline Container generate_hex_rhombus(int size) {
  Container c;
  c.name = "board";
  c.kind = ContainerKind::MainBoard;
  c.tiling = Tiling::HexRhombus;
  c.rows = size;
  c.cols = size;
  c.sites.resize(static_cast<size_t>(size) * size);
  c.lattice.resize(c.sites.size());
  const double xmax = 1.5 * (size - 1);
  const double ymax = (size - 1) * std::sqrt(3.0) / 2.0;
  for (int r = 0; r < size; ++r) {
    for (int q = 0; q < size; ++q) {
      int id = r * size + q;
      Site& s = c.sites[id];
      s.id = id;
      s.x = detail::axis_norm(q + 0.5 * r, xmax);
      s.y = detail::axis_norm(r * std::sqrt(3.0) / 2.0, ymax);
      c.lattice[id] = {r, q};
      for (auto [dr, dq] : kHexOffsets) {
        int nr = r + dr, nq = q + dq;
        if (nr < 0 || nr >= size || nq < 0 || nq >= size) continue;
        s.orthogonal_neighbors.push_back(nr * size + nq);
      }
    }
  }
  return c;
}

// Hexagonal board of hexagons with the given side length: 3*side^2-3*side+1
// sites over axial rows r in [0, 2*side-2], with per-row q ranges.
inline Container generate_hex_hex(int side) {
  Container c;
  c.name = "board";
  c.kind = ContainerKind::MainBoard;
  c.tiling = Tiling::HexHex;
  c.rows = 2 * side - 1;
  c.cols = 2 * side - 1;
  const int center = side - 1;
  auto q_lo = [&](int r) { return std::max(0, center - r); };
  auto q_hi = [&](int r) { return std::min(2 * center, 3 * center - r); };
  std::vector<std::vector<int>> id_at(c.rows, std::vector<int>(2 * center + 1, -1));
  for (int r = 0; r < c.rows; ++r) {
    for (int q = q_lo(r); q <= q_hi(r); ++q) {
      int id = static_cast<int>(c.sites.size());
      id_at[r][q] = id;
      Site s;
      s.id = id;
      s.x = q + 0.5 * r;  // raw; normalized below once maxima are known
      s.y = r * std::sqrt(3.0) / 2.0;
      c.sites.push_back(std::move(s));
      c.lattice.emplace_back(r, q);
    }
  }
  double xmax = 0.0, ymax = 0.0;
  for (const Site& s : c.sites) {
    xmax = std::max(xmax, s.x);
    ymax = std::max(ymax, s.y);
  }
  for (Site& s : c.sites) {
    s.x = detail::axis_norm(s.x, xmax);
    s.y = detail::axis_norm(s.y, ymax);
  }
  for (size_t i = 0; i < c.sites.size(); ++i) {
    auto [r, q] = c.lattice[i];
    for (auto [dr, dq] : kHexOffsets) {
      int nr = r + dr, nq = q + dq;
      if (nr < 0 || nr >= c.rows) continue;
      if (nq < 0 || nq > 2 * center) continue;
      int nid = id_at[nr][nq];
      if (nid >= 0) c.sites[i].orthogonal_neighbors.push_back(nid);
    }
  }
  return c;
}

inline Container make_hand(int capacity, Player owner) {
  Container c;
  c.name = "hand" + std::to_string(owner);
  c.kind = ContainerKind::Hand;
  c.tiling = Tiling::None;
  c.owner = owner;
  c.sites.resize(capacity);
  for (int i = 0; i < capacity; ++i) {
    c.sites[i].id = i;
    c.sites[i].x = detail::axis_norm(i, capacity - 1);
    c.sites[i].y = 0.0;
  }
  return c;
}

}  // namespace lgp
