#include "macsort/io_mot.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "macsort/errors.hpp"

namespace macsort {
namespace fs = std::filesystem;
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    parse_error(line, "bad number \"" + std::string(field) + "\"");
  }
  return value;
}

int parse_integer(std::string_view field, std::size_t line) {
  const double value = parse_number(field, line);
  if (value != std::floor(value) || std::fabs(value) > 2e9) {
    parse_error(line, "expected integer, got \"" + std::string(trim(field)) + "\"");
  }
  return static_cast<int>(value);
}

std::string format_world(double value) {
  if (value == -1.0) return "-1";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const unsigned char> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  return static_cast<T>(v);
}

std::map<int, std::vector<Detection>> load_prompt_file(const fs::path& dir, const char* stem) {
  const fs::path csv = dir / (std::string(stem) + ".txt");
  const fs::path emb = dir / (std::string(stem) + ".emb");
  std::map<int, std::vector<Detection>> by_frame;
  for (auto& d : read_detections(csv, emb)) by_frame[d.frame].push_back(std::move(d));
  return by_frame;
}

PromptDetections slice(const std::map<int, std::vector<Detection>>& by_frame, int frame,
                       double threshold) {
  PromptDetections out;
  auto it = by_frame.find(frame);
  if (it == by_frame.end()) return out;
  for (std::size_t k = 0; k < it->second.size(); ++k) {
    const Detection& d = it->second[k];
    if (d.confidence < threshold) continue;
    out.push_back({d.bbox, d.embedding, d.confidence, k});
  }
  return out;
}

}  // namespace

MotRecord MotRecord::from_box(int frame, int id, const BBox& box, double conf) {
  MotRecord r;
  r.frame = frame;
  r.id = id;
  r.left = box.left();
  r.top = box.top();
  r.width = box.w;
  r.height = box.h;
  r.conf = conf;
  return r;
}

std::vector<MotRecord> parse_mot(std::string_view text) {
  std::vector<MotRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 9 && fields.size() != 10) {
      parse_error(line_no, "expected 9 or 10 columns, got " + std::to_string(fields.size()));
    }

    MotRecord r;
    r.frame = parse_integer(fields[0], line_no);
    r.id = parse_integer(fields[1], line_no);
    r.left = parse_number(fields[2], line_no);
    r.top = parse_number(fields[3], line_no);
    r.width = parse_number(fields[4], line_no);
    r.height = parse_number(fields[5], line_no);
    r.conf = parse_number(fields[6], line_no);
    r.x = parse_number(fields[7], line_no);
    r.y = parse_number(fields[8], line_no);
    r.z = fields.size() == 10 ? parse_number(fields[9], line_no) : -1.0;
    if (r.frame < 1) parse_error(line_no, "frame must be >= 1");
    if (!(r.width > 0.0) || !(r.height > 0.0)) {
      throw Error(ErrorCode::NonPositiveBox, "line " + std::to_string(line_no) + ": width and height must be > 0");
    }
    records.push_back(r);
  }
  return records;
}

std::vector<MotRecord> read_mot_records(const fs::path& path) { return parse_mot(read_file(path)); }

std::map<int, std::vector<MotRecord>> read_mot(const fs::path& path) {
  std::map<int, std::vector<MotRecord>> grouped;
  for (const auto& r : read_mot_records(path)) grouped[r.frame].push_back(r);
  return grouped;
}

std::string format_mot(std::span<const MotRecord> records) {
  std::vector<MotRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MotRecord& a, const MotRecord& b) { return a.frame < b.frame; });
  std::string out;
  char buf[256];
  for (const auto& r : sorted) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.4f,", r.frame, r.id, r.left, r.top,
                  r.width, r.height, r.conf);
    out += buf;
    out += format_world(r.x) + "," + format_world(r.y) + "," + format_world(r.z) + "\n";
  }
  return out;
}

void write_mot(std::span<const MotRecord> records, const fs::path& path) {
  write_file(path, format_mot(records));
}

TrackSequence to_sequence(std::span<const MotRecord> records) {
  TrackSequence seq;
  for (const auto& r : records) seq.add(r.frame, r.id, r.box());
  return seq;
}

std::vector<unsigned char> encode_embeddings(std::span<const Embedding> embeddings) {
  const std::size_t dim = embeddings.empty() ? 1 : embeddings.front().dim();
  for (const auto& e : embeddings) {
    if (e.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "sidecar rows must share one dimension");
  }
  if (dim < 1) throw Error(ErrorCode::MalformedSidecar, "embedding dimension must be >= 1");
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + embeddings.size() * dim * 4);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(embeddings.size()));
  for (const auto& e : embeddings) {
    for (double v : e.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

std::vector<Embedding> decode_embeddings(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "embedding sidecar does not start with EMB1");
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::TruncatedBody, "embedding sidecar header is truncated");
  const auto dim = static_cast<std::int32_t>(get_le<std::uint32_t>(bytes, 4));
  const auto count = get_le<std::uint64_t>(bytes, 8);
  if (dim < 1) throw Error(ErrorCode::MalformedSidecar, "embedding dimension must be >= 1");
  const std::size_t body = bytes.size() - kHeaderBytes;
  const std::uint64_t need = count * static_cast<std::uint64_t>(dim) * 4;
  if (count != 0 && need / count != static_cast<std::uint64_t>(dim) * 4) {
    throw Error(ErrorCode::MalformedSidecar, "embedding sidecar size overflows");
  }
  if (body < need) {
    throw Error(ErrorCode::TruncatedBody, "embedding body has " + std::to_string(body) + " bytes, expected " +
                                              std::to_string(need));
  }
  if (body > need) throw Error(ErrorCode::MalformedSidecar, "trailing bytes after embedding body");

  std::vector<Embedding> out;
  out.reserve(count);
  std::size_t offset = kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<double> row(dim);
    for (auto& v : row) {
      v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
      offset += 4;
    }
    out.emplace_back(std::move(row));
  }
  return out;
}

std::vector<Embedding> read_embeddings(const fs::path& path) {
  const std::string data = read_file(path);
  return decode_embeddings(
      std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(data.data()), data.size()));
}

void write_embeddings(std::span<const Embedding> embeddings, const fs::path& path) {
  const auto bytes = encode_embeddings(embeddings);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<Detection> read_detections(const fs::path& csv_path, const fs::path& emb_path) {
  const auto records = read_mot_records(csv_path);
  if (!fs::exists(emb_path)) {
    throw Error(ErrorCode::SidecarMismatch, "missing embedding sidecar " + emb_path.string());
  }
  auto embeddings = read_embeddings(emb_path);
  if (embeddings.size() != records.size()) {
    throw Error(ErrorCode::SidecarMismatch, csv_path.string() + " has " + std::to_string(records.size()) +
                                                " rows but sidecar has " + std::to_string(embeddings.size()));
  }
  std::vector<Detection> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back({records[i].frame, records[i].box(), records[i].conf, std::move(embeddings[i])});
  }
  return out;
}

void write_detections(std::span<const Detection> detections, const fs::path& csv_path,
                      const fs::path& emb_path) {
  std::vector<MotRecord> records;
  std::vector<Embedding> embeddings;
  records.reserve(detections.size());
  embeddings.reserve(detections.size());
  // The sidecar follows CSV line order, so sort both together first.
  std::vector<std::size_t> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].frame < detections[b].frame; });
  for (std::size_t i : order) {
    const Detection& d = detections[i];
    records.push_back(MotRecord::from_box(d.frame, -1, d.bbox, d.confidence));
    embeddings.push_back(d.embedding);
  }
  write_mot(records, csv_path);
  write_embeddings(embeddings, emb_path);
}

PromptDump::PromptDump(const fs::path& dir) {
  if (!fs::exists(dir / "general.txt")) {
    throw Error(ErrorCode::MissingGeneralFile, "no general.txt in " + dir.string());
  }
  general_ = load_prompt_file(dir, "general");
  if (fs::exists(dir / "include.txt")) include_ = load_prompt_file(dir, "include");
  if (fs::exists(dir / "exclude.txt")) exclude_ = load_prompt_file(dir, "exclude");
}

PromptFrame PromptDump::frame(int frame, double detection_threshold) const {
  return {slice(general_, frame, detection_threshold), slice(include_, frame, detection_threshold),
          slice(exclude_, frame, detection_threshold)};
}

int PromptDump::last_frame() const {
  int last = 0;
  for (const auto* m : {&general_, &include_, &exclude_}) {
    if (!m->empty()) last = std::max(last, m->rbegin()->first);
  }
  return last;
}

PromptFrame read_prompt_dump(const fs::path& dir, int frame, double detection_threshold) {
  return PromptDump(dir).frame(frame, detection_threshold);
}

}  // namespace macsort
