#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "macsort/geometry.hpp"

namespace macsort {

struct TrackedBox {
  int id = 0;
  BBox box;
};

/// Boxes per frame; frames[i] holds frame i + 1. Ids are unique within a frame.
struct TrackSequence {
  std::vector<std::vector<TrackedBox>> frames;

  int num_frames() const { return static_cast<int>(frames.size()); }
  /// Grows the sequence as needed. `frame` is 1-based.
  void add(int frame, int id, const BBox& box);
};

struct MetricsConfig {
  double iou_threshold = 0.5;
  /// Average HOTA over thresholds 0.05, 0.10, ..., 0.95 instead of using iou_threshold.
  bool hota_sweep = false;
};

struct MetricsReport {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  double mota = 0.0;
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  long id_switches = 0;
  long mostly_tracked = 0;
  long mostly_lost = 0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long num_gt = 0;
  long num_pred = 0;
  long gt_tracks = 0;
  long pred_tracks = 0;
};

/// One frame of CLEAR matching, as (gt index, pred index) pairs.
///
/// `previous` maps gt id to the pred id it was last matched with. Such pairs
/// are kept first when their IoU still reaches the threshold; the rest are
/// matched by maximum total IoU over pairs reaching the threshold.
std::vector<std::pair<int, int>> match_frame(const std::vector<TrackedBox>& gt,
                                             const std::vector<TrackedBox>& pred,
                                             double iou_threshold,
                                             const std::map<int, int>& previous = {});

/// CLEAR-MOT, identity and HOTA metrics of `pred` against `gt`.
/// Throws FrameMismatch when `pred` has boxes past the last gt frame and
/// DuplicateId when an id repeats within one frame.
MetricsReport evaluate(const TrackSequence& gt, const TrackSequence& pred,
                       const MetricsConfig& config = {});

std::string report_to_text(const MetricsReport& report);
std::string report_to_json(const MetricsReport& report);

}  // namespace macsort
