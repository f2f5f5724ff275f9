#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "macsort/geometry.hpp"
#include "macsort/metrics.hpp"
#include "macsort/tpod_filter.hpp"

namespace macsort {

/// One line of a MOT-Challenge CSV: frame,id,left,top,width,height,conf,x,y,z.
struct MotRecord {
  int frame = 1;
  int id = -1;
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;
  double conf = 1.0;
  double x = -1.0;
  double y = -1.0;
  double z = -1.0;

  BBox box() const { return BBox::from_ltwh(left, top, width, height); }
  static MotRecord from_box(int frame, int id, const BBox& box, double conf);
};

/// Parses CSV text with 9 or 10 columns per line; blank lines are skipped.
/// Throws ParseError (with the 1-based line number) or NonPositiveBox.
std::vector<MotRecord> parse_mot(std::string_view text);

/// Records in file order.
std::vector<MotRecord> read_mot_records(const std::filesystem::path& path);

/// Records grouped by frame, file order kept inside each frame.
std::map<int, std::vector<MotRecord>> read_mot(const std::filesystem::path& path);

/// Canonical text: stable-sorted by frame, boxes with 2 decimals, confidence
/// with 4, and the trailing world coordinates as "-1" when unset.
std::string format_mot(std::span<const MotRecord> records);
void write_mot(std::span<const MotRecord> records, const std::filesystem::path& path);

TrackSequence to_sequence(std::span<const MotRecord> records);

/// Binary sidecar: "EMB1", int32 dim, int64 count, then count*dim float32,
/// all little-endian. Row i belongs to line i of the companion CSV.
std::vector<Embedding> decode_embeddings(std::span<const unsigned char> bytes);
std::vector<unsigned char> encode_embeddings(std::span<const Embedding> embeddings);
std::vector<Embedding> read_embeddings(const std::filesystem::path& path);
void write_embeddings(std::span<const Embedding> embeddings, const std::filesystem::path& path);

/// Detections with embeddings, read from `<stem>.txt` and `<stem>.emb`.
/// Throws SidecarMismatch when row counts differ or the sidecar is missing.
std::vector<Detection> read_detections(const std::filesystem::path& csv_path,
                                       const std::filesystem::path& emb_path);
void write_detections(std::span<const Detection> detections, const std::filesystem::path& csv_path,
                      const std::filesystem::path& emb_path);

struct PromptFrame {
  PromptDetections general;
  PromptDetections include;
  PromptDetections exclude;
};

/// A directory with general.txt (required) and optional include.txt and
/// exclude.txt, each with a matching .emb sidecar. Loaded once, sliced per frame.
class PromptDump {
 public:
  /// Throws MissingGeneralFile or SidecarMismatch.
  explicit PromptDump(const std::filesystem::path& dir);

  /// The three prompt sets of `frame`, with scores below `detection_threshold`
  /// removed. PromptBox::index is the row position within the frame's list.
  PromptFrame frame(int frame, double detection_threshold = 0.2) const;

  int last_frame() const;
  bool has_include() const { return !include_.empty(); }
  bool has_exclude() const { return !exclude_.empty(); }

 private:
  using ByFrame = std::map<int, std::vector<Detection>>;
  ByFrame general_;
  ByFrame include_;
  ByFrame exclude_;
};

PromptFrame read_prompt_dump(const std::filesystem::path& dir, int frame,
                             double detection_threshold = 0.2);

}  // namespace macsort
