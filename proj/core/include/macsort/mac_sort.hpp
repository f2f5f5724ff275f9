#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "macsort/assignment.hpp"
#include "macsort/geometry.hpp"
#include "macsort/motion.hpp"

namespace macsort {

struct AssocConfig {
  double lambda = 0.2;      ///< weight of the direction-consistency cost
  double theta_deg = 45.0;  ///< homogeneity crossover angle, in (0, 90]
  double iou_gate = 0.1;    ///< pairs below this IoU are never matched
  int max_age = 30;
  int min_hits = 3;
  double ema_alpha = 0.9;   ///< track appearance smoothing
  bool use_appearance = true;
  bool use_direction = true;
  /// Freezes the appearance weight (the motion weight becomes 2 - value)
  /// instead of deriving it from detection homogeneity. Used for ablations.
  std::optional<double> fixed_appearance_weight;
  KalmanParams kalman;
  std::size_t history_capacity = 30;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Mean cosine of the unit-normalized detection embeddings to their mean.
/// Falls back to cos(theta) (neutral weights) for fewer than two embeddings or
/// a vanishing mean. Throws DimensionMismatch on mixed dimensions.
double compute_mu_det(std::span<const Embedding> embeddings, double theta_deg);
double compute_mu_det(std::span<const Detection> detections, double theta_deg);

struct AdaptiveWeights {
  double appearance = 1.0;  ///< (1 - mu_det) / (1 - cos theta)
  double motion = 1.0;      ///< 2 - appearance
};

AdaptiveWeights adaptive_weights(double mu_det, double theta_deg);

enum class TrackStatus { Tentative, Confirmed, Removed };

struct Track {
  int id = 0;
  KalmanState state;           ///< current estimate (predicted for this frame once stepped)
  KalmanState last_observed;   ///< posterior right after the newest observation
  ObservationHistory history;
  Embedding appearance;        ///< unit-norm running average
  BBox predicted;              ///< box read from `state` after this frame's prediction
  int hits = 0;
  int age = 0;
  int time_since_update = 0;
  TrackStatus status = TrackStatus::Tentative;
};

/// All cost terms are [0, 1] costs to minimize. Rows index tracks, columns
/// detections. `iou` holds 1 - IoU, `direction` holds lambda * angle / pi and
/// `appearance` holds (1 - cos) / 2; `total` combines them with the weights
/// and carries +inf for gated pairs.
struct CostBreakdown {
  CostMatrix iou;
  CostMatrix direction;
  CostMatrix appearance;
  double mu_det = 0.0;
  AdaptiveWeights weights;
  CostMatrix total;
};

/// Tracks must already be predicted to the current frame. Detection
/// embeddings are normalized internally, so their scale does not matter.
CostBreakdown build_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                                const AssocConfig& config);

/// Same, with the weights supplied by the caller.
CostBreakdown build_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                                const AssocConfig& config, double mu_det, AdaptiveWeights weights);

struct TrackOutput {
  int id = 0;
  BBox box;

  friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

/// Per-sequence tracker. Confined to one thread.
class MacSortTracker {
 public:
  explicit MacSortTracker(AssocConfig config = {});

  /// Processes one frame. Returns the confirmed tracks matched in this frame.
  /// Throws NonMonotonicFrame unless `frame` is after the previous one.
  std::vector<TrackOutput> step(int frame, std::span<const Detection> detections);

  /// Live (non-removed) tracks in birth order.
  const std::vector<Track>& tracks() const { return tracks_; }
  const CostBreakdown& last_costs() const { return last_costs_; }
  const AssocConfig& config() const { return config_; }
  int next_id() const { return next_id_; }

 private:
  AssocConfig config_;
  std::vector<Track> tracks_;
  CostBreakdown last_costs_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool started_ = false;
};

}  // namespace macsort
