#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "macsort/geometry.hpp"
#include "macsort/metrics.hpp"

namespace macsort {

/// SplitMix64. Fixed arithmetic so streams match on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for an independent stream derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class MotionModel { Linear, Crossing, Circular };

struct OcclusionWindow {
  int object = 0;       ///< 0-based object index
  int frame_start = 1;  ///< inclusive, 1-based
  int frame_end = 1;    ///< inclusive
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  int n_objects = 4;
  int n_frames = 60;
  MotionModel motion = MotionModel::Linear;
  /// 0: independent random appearance per object; 1: one shared embedding.
  double appearance_homogeneity = 0.0;
  double detection_noise_px = 0.0;
  double miss_rate = 0.0;
  /// Per frame, each object slot spawns a clutter box with this probability.
  double clutter_rate = 0.0;
  std::vector<OcclusionWindow> occlusion_windows;
  int embedding_dim = 32;

  double image_width = 1280.0;
  double image_height = 720.0;
  double min_box = 30.0;
  double max_box = 60.0;
  double speed = 4.0;  ///< pixels per frame for linear and crossing motion
  /// Std of Gaussian noise added to each detection embedding before normalization.
  double embedding_noise = 0.0;
  /// Crossing motion: objects pass the shared point this many frames apart.
  int crossing_stagger = 1;
  /// Crossing motion: objects 2k and 2k+1 trade embeddings from their closest approach on.
  bool swap_embeddings = false;
  /// Probability that a true detection is also reported for the include prompt.
  double include_rate = 0.5;
  /// Probability that a clutter box is also reported for the exclude prompt.
  double exclude_clutter_rate = 0.5;

  /// Throws SpecError on out-of-range fields or inconsistent windows.
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Occlusion windows use
/// `occlusion = object:start:end` and may repeat. Throws SpecError.
ScenarioSpec parse_scenario_spec(std::string_view text);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
std::string format_scenario_spec(const ScenarioSpec& spec);

struct SyntheticDetection {
  Detection detection;
  int object = -1;  ///< source object, -1 for clutter
};

struct Scenario {
  TrackSequence gt;
  std::vector<std::vector<SyntheticDetection>> detections;  ///< per frame, index 0 is frame 1
  std::vector<std::vector<Detection>> include_prompt;        ///< per frame
  std::vector<std::vector<Detection>> exclude_prompt;        ///< per frame
  std::vector<Embedding> object_embeddings;

  std::vector<Detection> frame_detections(int frame) const;
  std::vector<Detection> all_detections() const;
};

Scenario generate(const ScenarioSpec& spec);

/// Writes gt/gt.txt, det/det.{txt,emb}, prompts/{general,include,exclude}.{txt,emb}
/// and scenario.txt under `out_dir`.
void write_scenario(const Scenario& scenario, const ScenarioSpec& spec,
                    const std::filesystem::path& out_dir);

}  // namespace macsort
