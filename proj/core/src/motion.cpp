#include "macsort/motion.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "macsort/errors.hpp"

namespace macsort {
namespace {

using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasMatrix = Eigen::Matrix<double, 4, 4>;
using GainMatrix = Eigen::Matrix<double, 7, 4>;

StateMatrix transition() {
  StateMatrix F = StateMatrix::Identity();
  F(0, 4) = 1.0;
  F(1, 5) = 1.0;
  F(2, 6) = 1.0;
  return F;
}

MeasVector measurement_of(const BBox& b) {
  const Xysr z = bbox_to_xysr(b);
  return {z.u, z.v, z.s, z.r};
}

}  // namespace

BBox KalmanState::box() const { return xysr_to_bbox({x(0), x(1), x(2), x(3)}); }

KalmanState kf_init(const BBox& box, const KalmanParams& params) {
  KalmanState st;
  st.x.head<4>() = measurement_of(box);
  st.x.tail<3>().setZero();
  st.P = params.initial_variance.asDiagonal();
  return st;
}

KalmanState kf_init(const Detection& det, const KalmanParams& params) {
  return kf_init(det.bbox, params);
}

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params) {
  static const StateMatrix F = transition();
  KalmanState out = state;
  if (out.x(2) + out.x(6) <= 0.0) out.x(6) = 0.0;
  out.x = F * out.x;
  out.P = F * out.P * F.transpose();
  out.P.diagonal() += params.process_noise;
  out.P = (0.5 * (out.P + out.P.transpose())).eval();
  return out;
}

KalmanState kf_update(const KalmanState& state, const BBox& measurement, const KalmanParams& params) {
  const MeasVector z = measurement_of(measurement);
  const MeasVector y = z - state.x.head<4>();

  MeasMatrix S = state.P.topLeftCorner<4, 4>();
  S.diagonal() += params.measurement_noise;
  Eigen::LLT<MeasMatrix> llt(S);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidState, "innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, with H selecting the first four state components.
  const GainMatrix PHt = state.P.leftCols<4>();
  const GainMatrix K = llt.solve(PHt.transpose()).transpose();

  KalmanState out;
  out.x = state.x + K * y;

  StateMatrix IKH = StateMatrix::Identity();
  IKH.leftCols<4>() -= K;
  out.P = IKH * state.P * IKH.transpose() + K * params.measurement_noise.asDiagonal() * K.transpose();
  out.P = (0.5 * (out.P + out.P.transpose())).eval();
  return out;
}

KalmanState kf_update(const KalmanState& state, const Detection& det, const KalmanParams& params) {
  return kf_update(state, det.bbox, params);
}

ObservationHistory::ObservationHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::ConfigError, "history capacity must be positive");
}

void ObservationHistory::push(int frame, const BBox& box) {
  if (!entries_.empty() && frame <= entries_.back().frame) {
    throw Error(ErrorCode::NonMonotonicFrame, "observation for frame " + std::to_string(frame) +
                                                  " after frame " + std::to_string(entries_.back().frame));
  }
  entries_.push_back({frame, box});
  if (entries_.size() > capacity_) entries_.pop_front();
}

KalmanState ocr_reupdate(const KalmanState& last_observed, const ObservationHistory& history,
                         const BBox& det, int gap, const KalmanParams& params) {
  if (history.empty()) throw Error(ErrorCode::InvalidState, "re-update needs an observation history");
  if (gap < 1) throw Error(ErrorCode::InvalidState, "re-update gap must be >= 1");

  const Xysr from = bbox_to_xysr(history.back().box);
  const Xysr to = bbox_to_xysr(det);
  KalmanState st = last_observed;
  for (int k = 1; k <= gap; ++k) {
    st = kf_predict(st, params);
    if (k == gap) {
      st = kf_update(st, det, params);
    } else {
      const double t = static_cast<double>(k) / gap;
      const Xysr virt{from.u + (to.u - from.u) * t, from.v + (to.v - from.v) * t,
                      from.s + (to.s - from.s) * t, to.r};
      st = kf_update(st, xysr_to_bbox(virt), params);
    }
  }
  return st;
}

KalmanState ocr_reupdate(const KalmanState& last_observed, const ObservationHistory& history,
                         const Detection& det, int gap, const KalmanParams& params) {
  return ocr_reupdate(last_observed, history, det.bbox, gap, params);
}

double velocity_direction_cost(const ObservationHistory& history, const BBox& det) {
  if (history.size() < 2) return 0.0;
  const BBox& prev = history[history.size() - 2].box;
  const BBox& last = history.back().box;
  const double tu = last.u - prev.u;
  const double tv = last.v - prev.v;
  const double du = det.u - last.u;
  const double dv = det.v - last.v;
  constexpr double kMinLength = 1e-9;
  if (std::hypot(tu, tv) < kMinLength || std::hypot(du, dv) < kMinLength) return 0.0;

  double diff = std::fabs(std::atan2(tv, tu) - std::atan2(dv, du));
  if (diff > std::numbers::pi) diff = 2.0 * std::numbers::pi - diff;
  return diff;
}

double velocity_direction_cost(const ObservationHistory& history, const Detection& det) {
  return velocity_direction_cost(history, det.bbox);
}

}  // namespace macsort
