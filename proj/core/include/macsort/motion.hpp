#pragma once

#include <cstddef>
#include <deque>

#include <Eigen/Dense>

#include "macsort/geometry.hpp"

namespace macsort {

using StateVector = Eigen::Matrix<double, 7, 1>;
using StateMatrix = Eigen::Matrix<double, 7, 7>;

/// Noise model for the constant-velocity box filter.
/// Diagonals are ordered [u, v, s, r, du, dv, ds] for the state and [u, v, s, r]
/// for the measurement.
struct KalmanParams {
  Eigen::Matrix<double, 4, 1> measurement_noise{1.0, 1.0, 10.0, 10.0};
  StateVector process_noise = (StateVector() << 1.0, 1.0, 1.0, 1.0, 1e-2, 1e-2, 1e-4).finished();
  StateVector initial_variance = (StateVector() << 10.0, 10.0, 10.0, 10.0, 1e3, 1e3, 1e3).finished();
};

/// State [u, v, s, r, du, dv, ds] with covariance.
struct KalmanState {
  StateVector x = StateVector::Zero();
  StateMatrix P = StateMatrix::Identity();

  /// Throws InvalidState when the scale or aspect has drifted non-positive.
  BBox box() const;
  double vu() const { return x(4); }
  double vv() const { return x(5); }
};

KalmanState kf_init(const Detection& det, const KalmanParams& params = {});
KalmanState kf_init(const BBox& box, const KalmanParams& params = {});

/// Constant-velocity step. A scale velocity that would drive s non-positive is
/// zeroed first.
KalmanState kf_predict(const KalmanState& state, const KalmanParams& params = {});

/// Joseph-form measurement update with z = [u, v, s, r]. Throws InvalidState if
/// the innovation covariance cannot be inverted.
KalmanState kf_update(const KalmanState& state, const BBox& measurement,
                      const KalmanParams& params = {});
KalmanState kf_update(const KalmanState& state, const Detection& det,
                      const KalmanParams& params = {});

struct Observation {
  int frame = 0;
  BBox box;
};

/// Bounded record of matched observations, oldest first.
class ObservationHistory {
 public:
  explicit ObservationHistory(std::size_t capacity = 30);

  /// Throws NonMonotonicFrame unless `frame` is after the newest entry.
  void push(int frame, const BBox& box);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Observation& back() const { return entries_.back(); }
  const Observation& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<Observation>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<Observation> entries_;
};

/// Observation-centric re-update after an occlusion gap.
///
/// `last_observed` is the filter state right after the newest observation in
/// `history`; `det` arrives `gap` frames later. The gap is bridged with
/// virtual boxes interpolated linearly in (u, v, s) with the aspect ratio of
/// `det`, and the filter is replayed over them, ending with `det` itself.
KalmanState ocr_reupdate(const KalmanState& last_observed, const ObservationHistory& history,
                         const BBox& det, int gap, const KalmanParams& params = {});
KalmanState ocr_reupdate(const KalmanState& last_observed, const ObservationHistory& history,
                         const Detection& det, int gap, const KalmanParams& params = {});

/// Angle in [0, pi] between the track heading (second-newest to newest
/// observation) and the heading from the newest observation to `det`.
/// Zero when fewer than two observations exist or either heading has no length.
double velocity_direction_cost(const ObservationHistory& history, const BBox& det);
double velocity_direction_cost(const ObservationHistory& history, const Detection& det);

}  // namespace macsort
