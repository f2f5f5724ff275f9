#include "macsort/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace macsort {
namespace {

bool allowed(double c) { return std::isfinite(c); }

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Hungarian method with potentials for n <= m. Returns col index per row.
std::vector<int> solve_dense(const CostMatrix& a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) col_of_row[p[j] - 1] = j - 1;
  }
  return col_of_row;
}

// Solves one block whose forbidden entries were replaced by a dominating penalty.
void solve_block(const CostMatrix& cost, const std::vector<int>& rows, const std::vector<int>& cols,
                 std::vector<std::pair<int, int>>& out) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  double abs_sum = 0.0;
  for (int r : rows) {
    for (int c : cols) {
      if (allowed(cost(r, c))) abs_sum += std::fabs(cost(r, c));
    }
  }
  // Any matching with one more allowed pair beats every matching with fewer.
  const double penalty = 2.0 * abs_sum + 1.0;

  const bool transpose = nr > nc;
  CostMatrix block(transpose ? nc : nr, transpose ? nr : nc);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nc; ++j) {
      const double c = cost(rows[i], cols[j]);
      const double value = allowed(c) ? c : penalty;
      if (transpose) {
        block(j, i) = value;
      } else {
        block(i, j) = value;
      }
    }
  }
  const auto solution = solve_dense(block);
  for (int k = 0; k < static_cast<int>(solution.size()); ++k) {
    if (solution[k] < 0) continue;
    const int r = transpose ? rows[solution[k]] : rows[k];
    const int c = transpose ? cols[k] : cols[solution[k]];
    if (allowed(cost(r, c))) out.emplace_back(r, c);
  }
}

}  // namespace

Assignment linear_assignment(const CostMatrix& cost) {
  const int nr = static_cast<int>(cost.rows());
  const int nc = static_cast<int>(cost.cols());
  Assignment result;

  // Rows are nodes [0, nr), columns are [nr, nr + nc).
  DisjointSets sets(nr + nc);
  std::vector<char> row_live(nr, 0), col_live(nc, 0);
  for (int r = 0; r < nr; ++r) {
    for (int c = 0; c < nc; ++c) {
      if (allowed(cost(r, c))) {
        sets.unite(r, nr + c);
        row_live[r] = 1;
        col_live[c] = 1;
      }
    }
  }

  std::vector<std::vector<int>> block_rows(nr + nc), block_cols(nr + nc);
  for (int r = 0; r < nr; ++r) {
    if (row_live[r]) block_rows[sets.find(r)].push_back(r);
  }
  for (int c = 0; c < nc; ++c) {
    if (col_live[c]) block_cols[sets.find(nr + c)].push_back(c);
  }
  for (int root = 0; root < nr + nc; ++root) {
    if (!block_rows[root].empty()) solve_block(cost, block_rows[root], block_cols[root], result.matches);
  }

  std::sort(result.matches.begin(), result.matches.end());
  std::vector<char> row_used(nr, 0), col_used(nc, 0);
  for (const auto& [r, c] : result.matches) {
    row_used[r] = 1;
    col_used[c] = 1;
    result.total_cost += cost(r, c);
  }
  for (int r = 0; r < nr; ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (int c = 0; c < nc; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

}  // namespace macsort
