#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dtnlab {

struct GridMeta {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> gaps;  // removed (row, col) coordinates
};

/// Cell-partitioned geography: valid cells, the adjacency sets B_c, and the
/// maximum degree J. Immutable after construction; safe to share between
/// concurrent runs.
class CellTopology {
 public:
  /// Wraps an explicit adjacency list. Throws if the invariants
  /// (symmetry, no self loops, connectivity) do not hold.
  static CellTopology from_adjacency(std::vector<std::vector<int>> adjacency) {
    CellTopology t;
    t.adjacency_ = std::move(adjacency);
    for (auto& nbrs : t.adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    t.validate();
    return t;
  }

  /// Rectangular grid with optional gap cells removed. Cells that share an
  /// edge are adjacent; valid cells are indexed row-major.
  static CellTopology build_grid(int rows, int cols,
                                 const std::vector<std::pair<int, int>>& gaps = {}) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("grid dimensions must be positive");
    std::vector<std::vector<char>> gap(rows, std::vector<char>(cols, 0));
    for (auto [r, c] : gaps) {
      if (r < 0 || r >= rows || c < 0 || c >= cols)
        throw std::invalid_argument("gap (" + std::to_string(r) + "," +
                                    std::to_string(c) + ") out of bounds");
      if (gap[r][c]) throw std::invalid_argument("duplicate gap");
      gap[r][c] = 1;
    }
    std::vector<std::vector<int>> id(rows, std::vector<int>(cols, -1));
    int next = 0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!gap[r][c]) id[r][c] = next++;
    if (next == 0) throw std::invalid_argument("all cells removed");

    CellTopology t;
    t.adjacency_.resize(next);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (gap[r][c]) continue;
        if (r + 1 < rows && !gap[r + 1][c]) {
          t.adjacency_[id[r][c]].push_back(id[r + 1][c]);
          t.adjacency_[id[r + 1][c]].push_back(id[r][c]);
        }
        if (c + 1 < cols && !gap[r][c + 1]) {
          t.adjacency_[id[r][c]].push_back(id[r][c + 1]);
          t.adjacency_[id[r][c + 1]].push_back(id[r][c]);
        }
      }
    }
    for (auto& nbrs : t.adjacency_) std::sort(nbrs.begin(), nbrs.end());
    t.grid_ = GridMeta{rows, cols, gaps};
    t.validate();  // rejects gap layouts that disconnect the valid cells
    return t;
  }

  int cell_count() const { return static_cast<int>(adjacency_.size()); }

  const std::vector<int>& neighbors(int cell) const { return adjacency_[cell]; }

  bool adjacent(int a, int b) const {
    const auto& nbrs = adjacency_[a];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  /// J, the maximum number of adjacent cells of any cell.
  int max_degree() const {
    int j = 0;
    for (const auto& nbrs : adjacency_) j = std::max<int>(j, nbrs.size());
    return j;
  }

  const std::optional<GridMeta>& grid() const { return grid_; }

  /// Checks all structural invariants; throws describing the first violation.
  void validate() const {
    const int c = cell_count();
    if (c < 1) throw std::invalid_argument("topology has no cells");
    for (int i = 0; i < c; ++i) {
      for (int n : adjacency_[i]) {
        if (n < 0 || n >= c)
          throw std::invalid_argument("adjacency references unknown cell");
        if (n == i) throw std::invalid_argument("self-adjacency at cell " +
                                                std::to_string(i));
        if (!adjacent(n, i))
          throw std::invalid_argument("asymmetric adjacency between cells " +
                                      std::to_string(i) + " and " +
                                      std::to_string(n));
      }
    }
    // Connectivity: a single user must be able to visit every cell.
    std::vector<char> seen(c, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int n : adjacency_[v]) {
        if (!seen[n]) {
          seen[n] = 1;
          ++reached;
          stack.push_back(n);
        }
      }
    }
    if (reached != c && c > 1)
      throw std::invalid_argument("topology is disconnected");
  }

 private:
  std::vector<std::vector<int>> adjacency_;
  std::optional<GridMeta> grid_;
};

}  // namespace dtnlab
