#include "macsort/tpod_filter.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "macsort/errors.hpp"

namespace macsort {
namespace {

bool entry_before(const MemoryEntry& a, const MemoryEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.frame != b.frame) return a.frame < b.frame;
  return a.index < b.index;
}

void check_dims(const PromptDetections& set, std::optional<std::size_t>& dim) {
  for (const auto& p : set) {
    if (!dim) {
      dim = p.feature.dim();
    } else if (*dim != p.feature.dim()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "prompt features have dimensions " + std::to_string(*dim) + " and " +
                      std::to_string(p.feature.dim()));
    }
  }
}

double best_iou(const BBox& box, const PromptDetections& set) {
  double best = 0.0;
  for (const auto& p : set) best = std::max(best, iou(box, p.box));
  return best;
}

double mean_cosine(const std::vector<MemoryEntry>& band, const Embedding& f) {
  double acc = 0.0;
  for (const auto& m : band) acc += cosine_or_zero(m.feature, f);
  return acc / static_cast<double>(band.size());
}

LsmSimilarityProfile profile_from_bands(const std::vector<MemoryEntry>& long_band,
                                        const std::vector<MemoryEntry>& short_band,
                                        const PromptDetections& unclassified) {
  LsmSimilarityProfile profile;
  profile.sim_long.reserve(unclassified.size());
  profile.sim_short.reserve(unclassified.size());
  for (const auto& u : unclassified) {
    profile.sim_long.push_back(mean_cosine(long_band, u.feature));
    profile.sim_short.push_back(mean_cosine(short_band, u.feature));
  }
  // Mean taken as first value plus mean offset.
  const double n = static_cast<double>(unclassified.size());
  double off_long = 0.0;
  double off_short = 0.0;
  for (std::size_t j = 0; j < unclassified.size(); ++j) {
    off_long += profile.sim_long[j] - profile.sim_long[0];
    off_short += profile.sim_short[j] - profile.sim_short[0];
  }
  profile.mean_long = profile.sim_long[0] + off_long / n;
  profile.mean_short = profile.sim_short[0] + off_short / n;
  return profile;
}

}  // namespace

void TpodConfig::validate() const {
  if (kappa1 < 1 || kappa2 < 1) throw Error(ErrorCode::ConfigError, "kappa1 and kappa2 must be >= 1");
  if (short_window_frames < 1) throw Error(ErrorCode::ConfigError, "short_window_frames must be >= 1");
  if (detection_threshold < 0.0 || detection_threshold > 1.0) {
    throw Error(ErrorCode::ConfigError, "detection_threshold must lie in [0,1]");
  }
  if (overlap_threshold < 0.0 || overlap_threshold >= 1.0) {
    throw Error(ErrorCode::ConfigError, "overlap_threshold must lie in [0,1)");
  }
}

IeResult ie_classify(const PromptDetections& general, const PromptDetections& include,
                     const PromptDetections& exclude, double overlap_threshold) {
  std::optional<std::size_t> dim;
  check_dims(general, dim);
  check_dims(include, dim);
  check_dims(exclude, dim);

  IeResult result;
  for (const auto& g : general) {
    const double inc = best_iou(g.box, include);
    const double exc = best_iou(g.box, exclude);
    const bool inc_hit = inc > overlap_threshold;
    const bool exc_hit = exc > overlap_threshold;
    if (inc_hit && (!exc_hit || inc > exc)) {
      result.tps.push_back(g);
    } else if (exc_hit) {
      result.dropped.push_back(g);
    } else {
      result.unclassified.push_back(g);
    }
  }
  return result;
}

MemoryBank::MemoryBank(int kappa1, int kappa2, int window_frames)
    : kappa1_(kappa1), kappa2_(kappa2), window_frames_(window_frames) {
  if (kappa1 < 1 || kappa2 < 1 || window_frames < 1) {
    throw Error(ErrorCode::ConfigError, "memory band sizes and window must be >= 1");
  }
}

void MemoryBank::update(const PromptDetections& accepted, int frame) {
  if (seen_frame_ && frame < last_frame_) {
    throw Error(ErrorCode::NonMonotonicFrame, "memory update for frame " + std::to_string(frame) +
                                                  " after frame " + std::to_string(last_frame_));
  }
  seen_frame_ = true;
  last_frame_ = frame;

  for (const auto& p : accepted) {
    MemoryEntry e{p.box, p.feature, p.score, frame, p.index};
    long_.push_back(e);
    window_.push_back(std::move(e));
  }
  std::stable_sort(long_.begin(), long_.end(), entry_before);
  if (long_.size() > static_cast<std::size_t>(kappa1_)) long_.resize(kappa1_);

  while (!window_.empty() && window_.front().frame <= frame - window_frames_) window_.pop_front();
  short_.assign(window_.begin(), window_.end());
  std::stable_sort(short_.begin(), short_.end(), entry_before);
  if (short_.size() > static_cast<std::size_t>(kappa2_)) short_.resize(kappa2_);
}

MemoryBank memory_update(MemoryBank memory, const PromptDetections& accepted_tps, int frame) {
  memory.update(accepted_tps, frame);
  return memory;
}

LsmSimilarityProfile lsm_similarity_profile(const MemoryBank& memory,
                                            const PromptDetections& unclassified) {
  if (memory.long_band().empty() || memory.short_band().empty()) {
    throw Error(ErrorCode::EmptyMemory, "memory bands must be non-empty");
  }
  if (unclassified.empty()) throw Error(ErrorCode::EmptyInput, "no unclassified boxes");
  return profile_from_bands(memory.long_band(), memory.short_band(), unclassified);
}

LsmResult lsm_classify(const LsmSimilarityProfile& profile, const PromptDetections& unclassified) {
  LsmResult result;
  for (std::size_t j = 0; j < unclassified.size(); ++j) {
    const bool fp = profile.sim_short[j] < profile.mean_short && profile.sim_long[j] < profile.mean_long;
    (fp ? result.fps : result.tps).push_back(unclassified[j]);
  }
  return result;
}

TpodFrameResult tpod_frame(const PromptDetections& general, const PromptDetections& include,
                           const PromptDetections& exclude, MemoryBank& memory, int frame,
                           const TpodConfig& config) {
  IeResult ie = ie_classify(general, include, exclude, config.overlap_threshold);

  TpodFrameResult result;
  result.ie_tps = std::move(ie.tps);
  result.dropped = std::move(ie.dropped);

  if (!ie.unclassified.empty()) {
    if (memory.empty()) {
      (config.cold_start_passthrough ? result.rescued : result.rejected) = std::move(ie.unclassified);
    } else {
      // Empty short band falls back to the long band.
      const auto& short_band = memory.short_band().empty() ? memory.long_band() : memory.short_band();
      const auto profile = profile_from_bands(memory.long_band(), short_band, ie.unclassified);
      LsmResult lsm = lsm_classify(profile, ie.unclassified);
      result.rescued = std::move(lsm.tps);
      result.rejected = std::move(lsm.fps);
    }
  }

  result.final_tps = result.ie_tps;
  result.final_tps.insert(result.final_tps.end(), result.rescued.begin(), result.rescued.end());
  std::stable_sort(result.final_tps.begin(), result.final_tps.end(),
                   [](const PromptBox& a, const PromptBox& b) { return a.index < b.index; });

  memory.update(config.memory_includes_rescued ? result.final_tps : result.ie_tps, frame);
  return result;
}

TpodFilter::TpodFilter(TpodConfig config)
    : config_(config), memory_(config.kappa1, config.kappa2, config.short_window_frames) {
  config_.validate();
}

TpodFrameResult TpodFilter::process(int frame, const PromptDetections& general,
                                    const PromptDetections& include, const PromptDetections& exclude) {
  return tpod_frame(general, include, exclude, memory_, frame, config_);
}

}  // namespace macsort
