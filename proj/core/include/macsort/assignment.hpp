#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace macsort {

using CostMatrix = Eigen::MatrixXd;

struct Assignment {
  std::vector<std::pair<int, int>> matches;  ///< (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;                   ///< sum of matched entries in row order
};

/// Rectangular minimum-cost assignment. Entries that are +inf (or NaN) are
/// forbidden. Among all one-to-one matchings over allowed entries, the result
/// has the largest number of pairs and, among those, the smallest total cost.
///
/// The matrix is split into independent blocks along its allowed entries and
/// each block is solved with the shortest-augmenting-path Hungarian method.
/// Ties resolve deterministically by scan order.
Assignment linear_assignment(const CostMatrix& cost);

}  // namespace macsort
