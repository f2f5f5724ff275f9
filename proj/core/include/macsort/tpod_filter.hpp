#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "macsort/geometry.hpp"

namespace macsort {

/// One box returned for a text prompt. `index` is the row position inside the
/// prompt's detection list for the frame and survives filtering, so callers can
/// tell which input rows ended up where.
struct PromptBox {
  BBox box;
  Embedding feature;
  double score = 0.0;
  std::size_t index = 0;
};

using PromptDetections = std::vector<PromptBox>;

struct TpodConfig {
  int kappa1 = 9;
  int kappa2 = 3;
  int short_window_frames = 3;
  double detection_threshold = 0.2;
  /// A general box counts as overlapping a prompt box when IoU exceeds this.
  double overlap_threshold = 0.0;
  /// Accept unclassified boxes while the memory is still empty.
  bool cold_start_passthrough = true;
  /// Store LSM-rescued boxes in memory as well as include-strategy TPs.
  bool memory_includes_rescued = true;

  void validate() const;
};

struct IeResult {
  PromptDetections tps;
  PromptDetections unclassified;
  PromptDetections dropped;
};

/// Include/exclude classification of general-prompt boxes. A box overlapping
/// both prompt sets goes to the side with the larger IoU; ties are dropped.
IeResult ie_classify(const PromptDetections& general, const PromptDetections& include,
                     const PromptDetections& exclude, double overlap_threshold);

struct MemoryEntry {
  BBox box;
  Embedding feature;
  double score = 0.0;
  int frame = 0;
  std::size_t index = 0;
};

/// Long/short memory of high-confidence true positives.
///
/// `long_band()` keeps the kappa1 best-scoring boxes since the first update;
/// `short_band()` keeps the kappa2 best from the frames inside the sliding
/// window (the last `window_frames` frame indices). Both are sorted by score
/// descending; ties fall back to earlier frame, then lower index.
class MemoryBank {
 public:
  explicit MemoryBank(int kappa1 = 9, int kappa2 = 3, int window_frames = 3);

  const std::vector<MemoryEntry>& long_band() const { return long_; }
  const std::vector<MemoryEntry>& short_band() const { return short_; }
  int kappa1() const { return kappa1_; }
  int kappa2() const { return kappa2_; }
  bool empty() const { return long_.empty(); }

  /// Throws NonMonotonicFrame when `frame` precedes the previous update.
  void update(const PromptDetections& accepted, int frame);

 private:
  int kappa1_;
  int kappa2_;
  int window_frames_;
  int last_frame_ = 0;
  bool seen_frame_ = false;
  std::vector<MemoryEntry> long_;
  std::vector<MemoryEntry> short_;
  std::deque<MemoryEntry> window_;
};

/// Returns a copy of `memory` advanced by one frame.
MemoryBank memory_update(MemoryBank memory, const PromptDetections& accepted_tps, int frame);

struct LsmSimilarityProfile {
  std::vector<double> sim_long;   ///< per unclassified box, mean cosine vs long band
  std::vector<double> sim_short;  ///< per unclassified box, mean cosine vs short band
  double mean_long = 0.0;         ///< mean of sim_long over all unclassified boxes
  double mean_short = 0.0;
};

/// Averages run over the actual band occupancy. Throws EmptyMemory when either
/// band is empty and EmptyInput when `unclassified` is empty.
LsmSimilarityProfile lsm_similarity_profile(const MemoryBank& memory,
                                            const PromptDetections& unclassified);

struct LsmResult {
  PromptDetections tps;
  PromptDetections fps;
};

/// A box is rejected only when it falls strictly below the aggregate on both bands.
LsmResult lsm_classify(const LsmSimilarityProfile& profile, const PromptDetections& unclassified);

struct TpodFrameResult {
  PromptDetections final_tps;  ///< include-strategy TPs and rescued boxes, in input row order
  PromptDetections ie_tps;
  PromptDetections dropped;    ///< removed by the exclude prompt
  PromptDetections rescued;    ///< unclassified boxes accepted by memory (or cold start)
  PromptDetections rejected;   ///< unclassified boxes rejected by memory
};

/// One frame of the prompt filter: include/exclude classification, then
/// memory-based classification of the unclassified boxes, then memory update.
TpodFrameResult tpod_frame(const PromptDetections& general, const PromptDetections& include,
                           const PromptDetections& exclude, MemoryBank& memory, int frame,
                           const TpodConfig& config = {});

/// Sequence-local filter state (one per sequence, single-threaded).
class TpodFilter {
 public:
  explicit TpodFilter(TpodConfig config = {});

  TpodFrameResult process(int frame, const PromptDetections& general,
                          const PromptDetections& include, const PromptDetections& exclude);

  const MemoryBank& memory() const { return memory_; }
  const TpodConfig& config() const { return config_; }

 private:
  TpodConfig config_;
  MemoryBank memory_;
};

}  // namespace macsort
