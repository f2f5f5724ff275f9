#include "macsort/mac_sort.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "macsort/errors.hpp"

namespace macsort {
namespace {

double cos_deg(double deg) { return std::cos(deg * std::numbers::pi / 180.0); }

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

// Cosine of two unit-or-zero vectors; zero vectors give 0.
double unit_cosine(const Embedding& a, const Embedding& b) {
  if (a.empty()) return 0.0;
  return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

}  // namespace

void AssocConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(theta_deg > 0.0 && theta_deg <= 90.0)) fail("theta_deg must lie in (0, 90]");
  if (!(iou_gate >= 0.0 && iou_gate <= 1.0)) fail("iou_gate must lie in [0, 1]");
  if (max_age < 0) fail("max_age must be >= 0");
  if (min_hits < 1) fail("min_hits must be >= 1");
  if (!(ema_alpha >= 0.0 && ema_alpha <= 1.0)) fail("ema_alpha must lie in [0, 1]");
  if (history_capacity < 2) fail("history_capacity must be >= 2");
  if (fixed_appearance_weight && !(*fixed_appearance_weight >= 0.0)) {
    fail("fixed appearance weight must be >= 0");
  }
}

double compute_mu_det(std::span<const Embedding> embeddings, double theta_deg) {
  const double neutral = cos_deg(theta_deg);
  if (embeddings.empty()) return neutral;
  const std::size_t dim = embeddings.front().dim();
  for (const auto& e : embeddings) require_same_dim(dim, e.dim());
  if (embeddings.size() <= 1) return neutral;

  std::vector<Embedding> unit;
  unit.reserve(embeddings.size());
  for (const auto& e : embeddings) unit.push_back(e.normalized());

  std::vector<double> mean(dim, 0.0);
  for (const auto& e : unit) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += e[k];
  }
  const double count = static_cast<double>(unit.size());
  for (auto& x : mean) x /= count;
  const Embedding mu(std::move(mean));
  if (mu.norm() < kDegenerateNorm) return neutral;

  double acc = 0.0;
  for (const auto& e : unit) acc += cosine_or_zero(e, mu);
  return acc / count;
}

double compute_mu_det(std::span<const Detection> detections, double theta_deg) {
  std::vector<Embedding> embeddings;
  embeddings.reserve(detections.size());
  for (const auto& d : detections) embeddings.push_back(d.embedding);
  return compute_mu_det(embeddings, theta_deg);
}

AdaptiveWeights adaptive_weights(double mu_det, double theta_deg) {
  AdaptiveWeights w;
  w.appearance = (1.0 - mu_det) / (1.0 - cos_deg(theta_deg));
  w.motion = 2.0 - w.appearance;
  return w;
}

CostBreakdown build_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                                const AssocConfig& config) {
  const double mu = compute_mu_det(detections, config.theta_deg);
  AdaptiveWeights w = adaptive_weights(mu, config.theta_deg);
  if (config.fixed_appearance_weight) {
    w.appearance = *config.fixed_appearance_weight;
    w.motion = 2.0 - w.appearance;
  }
  return build_cost_matrix(tracks, detections, config, mu, w);
}

CostBreakdown build_cost_matrix(std::span<const Track> tracks, std::span<const Detection> detections,
                                const AssocConfig& config, double mu_det, AdaptiveWeights weights) {
  const auto rows = static_cast<Eigen::Index>(tracks.size());
  const auto cols = static_cast<Eigen::Index>(detections.size());
  CostBreakdown out;
  out.mu_det = mu_det;
  out.weights = weights;
  out.iou.resize(rows, cols);
  out.direction.resize(rows, cols);
  out.appearance.resize(rows, cols);
  out.total.resize(rows, cols);

  std::vector<Embedding> unit;
  unit.reserve(detections.size());
  for (const auto& d : detections) unit.push_back(d.embedding.normalized());

  constexpr double kForbidden = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < rows; ++m) {
    const Track& t = tracks[m];
    const bool has_appearance = !t.appearance.empty();
    for (Eigen::Index n = 0; n < cols; ++n) {
      const Detection& d = detections[n];
      if (has_appearance) require_same_dim(t.appearance.dim(), d.embedding.dim());

      const double overlap = iou(t.predicted, d.bbox);
      const double iou_cost = 1.0 - overlap;
      const double dir_cost = config.lambda * velocity_direction_cost(t.history, d.bbox) / std::numbers::pi;
      const double app_cost = (1.0 - unit_cosine(t.appearance, unit[n])) / 2.0;

      out.iou(m, n) = iou_cost;
      out.direction(m, n) = dir_cost;
      out.appearance(m, n) = app_cost;

      if (overlap < config.iou_gate) {
        out.total(m, n) = kForbidden;
        continue;
      }
      double total = weights.motion * iou_cost;
      if (config.use_direction) total += dir_cost;
      if (config.use_appearance) total += weights.appearance * app_cost;
      out.total(m, n) = total;
    }
  }
  return out;
}

MacSortTracker::MacSortTracker(AssocConfig config) : config_(std::move(config)) { config_.validate(); }

std::vector<TrackOutput> MacSortTracker::step(int frame, std::span<const Detection> detections) {
  if (started_ && frame <= last_frame_) {
    throw Error(ErrorCode::NonMonotonicFrame,
                "frame " + std::to_string(frame) + " after frame " + std::to_string(last_frame_));
  }
  const int elapsed = started_ ? frame - last_frame_ : 1;
  started_ = true;
  last_frame_ = frame;

  std::vector<Detection> dets(detections.begin(), detections.end());
  for (auto& d : dets) d.embedding = d.embedding.normalized();

  for (auto& t : tracks_) {
    for (int k = 0; k < elapsed; ++k) t.state = kf_predict(t.state, config_.kalman);
    t.age += elapsed;
    t.time_since_update += elapsed;
    try {
      t.predicted = t.state.box();
    } catch (const Error&) {
      t.status = TrackStatus::Removed;
    }
  }
  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::Removed; });

  last_costs_ = build_cost_matrix(tracks_, dets, config_);
  const Assignment assignment = linear_assignment(last_costs_.total);

  for (const auto& [m, n] : assignment.matches) {
    Track& t = tracks_[m];
    const Detection& d = dets[n];
    if (t.time_since_update > 1) {
      t.state = ocr_reupdate(t.last_observed, t.history, d.bbox, t.time_since_update, config_.kalman);
    } else {
      t.state = kf_update(t.state, d.bbox, config_.kalman);
    }
    t.last_observed = t.state;
    t.history.push(frame, d.bbox);
    if (!d.embedding.degenerate()) {
      if (t.appearance.empty() || t.appearance.degenerate()) {
        t.appearance = d.embedding;
      } else {
        std::vector<double> blend(t.appearance.dim());
        for (std::size_t k = 0; k < blend.size(); ++k) {
          blend[k] = config_.ema_alpha * t.appearance[k] + (1.0 - config_.ema_alpha) * d.embedding[k];
        }
        t.appearance = Embedding(std::move(blend)).normalized();
      }
    }
    t.hits += 1;
    t.time_since_update = 0;
    if (t.hits >= config_.min_hits) t.status = TrackStatus::Confirmed;
  }

  std::erase_if(tracks_, [this](const Track& t) { return t.time_since_update > config_.max_age; });

  for (int n : assignment.unmatched_cols) {
    const Detection& d = dets[n];
    Track t{.id = next_id_++,
            .state = kf_init(d.bbox, config_.kalman),
            .last_observed = {},
            .history = ObservationHistory(config_.history_capacity),
            .appearance = d.embedding,
            .predicted = d.bbox,
            .hits = 1};
    t.last_observed = t.state;
    t.history.push(frame, d.bbox);
    if (t.hits >= config_.min_hits) t.status = TrackStatus::Confirmed;
    tracks_.push_back(std::move(t));
  }

  std::vector<TrackOutput> outputs;
  for (const auto& t : tracks_) {
    if (t.time_since_update == 0 && t.status == TrackStatus::Confirmed) {
      outputs.push_back({t.id, t.state.box()});
    }
  }
  return outputs;
}

}  // namespace macsort
