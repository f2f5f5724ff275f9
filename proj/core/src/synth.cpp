#include "macsort/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "macsort/errors.hpp"
#include "macsort/io_mot.hpp"

namespace macsort {
namespace fs = std::filesystem;
namespace {

enum Stream : std::uint64_t { kTrajectory = 1, kAppearance = 2, kNoise = 3, kClutter = 4, kPrompts = 5 };

Embedding random_unit(SplitMix64& rng, int dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.normal();
  return Embedding(std::move(v)).normalized();
}

struct ObjectPath {
  double w = 0.0;
  double h = 0.0;
  std::function<std::pair<double, double>(int)> center;
};

std::vector<ObjectPath> make_paths(const ScenarioSpec& spec) {
  SplitMix64 rng(derive_seed(spec.seed, kTrajectory));
  std::vector<ObjectPath> paths;
  const double cx = spec.image_width / 2.0;
  const double cy = spec.image_height / 2.0;
  for (int k = 0; k < spec.n_objects; ++k) {
    ObjectPath p;
    p.w = rng.uniform(spec.min_box, spec.max_box);
    p.h = rng.uniform(spec.min_box, spec.max_box);
    switch (spec.motion) {
      case MotionModel::Linear: {
        const double x0 = rng.uniform(p.w, std::max(p.w, spec.image_width - p.w));
        const double y0 = rng.uniform(p.h, std::max(p.h, spec.image_height - p.h));
        const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double vx = spec.speed * std::cos(heading);
        const double vy = spec.speed * std::sin(heading);
        p.center = [=](int f) { return std::pair{x0 + vx * (f - 1), y0 + vy * (f - 1)}; };
        break;
      }
      case MotionModel::Crossing: {
        const double heading = std::numbers::pi * k / spec.n_objects;
        const double t_cross =
            (spec.n_frames + 1) / 2.0 + (k - (spec.n_objects - 1) / 2.0) * spec.crossing_stagger;
        const double vx = spec.speed * std::cos(heading);
        const double vy = spec.speed * std::sin(heading);
        p.center = [=](int f) { return std::pair{cx + vx * (f - t_cross), cy + vy * (f - t_cross)}; };
        break;
      }
      case MotionModel::Circular: {
        const double radius = rng.uniform(50.0, 150.0);
        const double ox = rng.uniform(radius, std::max(radius, spec.image_width - radius));
        const double oy = rng.uniform(radius, std::max(radius, spec.image_height - radius));
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double omega = (rng.uniform() < 0.5 ? -1.0 : 1.0) * spec.speed / radius;
        p.center = [=](int f) {
          const double a = phase + omega * (f - 1);
          return std::pair{ox + radius * std::cos(a), oy + radius * std::sin(a)};
        };
        break;
      }
    }
    paths.push_back(std::move(p));
  }
  return paths;
}

bool occluded(const ScenarioSpec& spec, int object, int frame) {
  return std::any_of(spec.occlusion_windows.begin(), spec.occlusion_windows.end(), [&](const OcclusionWindow& w) {
    return w.object == object && frame >= w.frame_start && frame <= w.frame_end;
  });
}

// First frame of closest approach between two paths.
int closest_frame(const ObjectPath& a, const ObjectPath& b, int n_frames) {
  int best = 1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int f = 1; f <= n_frames; ++f) {
    const auto [ax, ay] = a.center(f);
    const auto [bx, by] = b.center(f);
    const double d = std::hypot(ax - bx, ay - by);
    if (d < best_d) {
      best_d = d;
      best = f;
    }
  }
  return best;
}

const char* motion_name(MotionModel m) {
  switch (m) {
    case MotionModel::Linear: return "linear";
    case MotionModel::Crossing: return "crossing";
    case MotionModel::Circular: return "circular";
  }
  return "linear";
}

}  // namespace

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mix(seed ^ (stream * 0xD1B54A32D192ED03ULL));
  return mix.next();
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::SpecError, what); };
  if (n_objects < 1) fail("n_objects must be >= 1");
  if (n_frames < 1) fail("n_frames must be >= 1");
  if (embedding_dim < 1) fail("embedding_dim must be >= 1");
  auto unit = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  unit(appearance_homogeneity, "appearance_homogeneity");
  unit(miss_rate, "miss_rate");
  unit(clutter_rate, "clutter_rate");
  unit(include_rate, "include_rate");
  unit(exclude_clutter_rate, "exclude_clutter_rate");
  if (!(detection_noise_px >= 0.0)) fail("detection_noise_px must be >= 0");
  if (!(embedding_noise >= 0.0)) fail("embedding_noise must be >= 0");
  if (!(image_width > 0.0 && image_height > 0.0)) fail("image size must be positive");
  if (!(min_box > 0.0 && max_box >= min_box)) fail("need 0 < min_box <= max_box");
  if (!(speed >= 0.0)) fail("speed must be >= 0");
  if (crossing_stagger < 0) fail("crossing_stagger must be >= 0");
  for (const auto& w : occlusion_windows) {
    if (w.object < 0 || w.object >= n_objects) {
      fail("occlusion window names object " + std::to_string(w.object) + " of " + std::to_string(n_objects));
    }
    if (w.frame_start < 1 || w.frame_end > n_frames || w.frame_start > w.frame_end) {
      fail("occlusion window " + std::to_string(w.frame_start) + ":" + std::to_string(w.frame_end) +
           " is outside frames 1.." + std::to_string(n_frames) + " or reversed");
    }
  }
}

ScenarioSpec parse_scenario_spec(std::string_view text) {
  ScenarioSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::SpecError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    auto bad = [&]() -> Error {
      return Error(ErrorCode::SpecError, "line " + std::to_string(line_no) + ": bad value for " + key + ": \"" + value + "\"");
    };
    auto as_double = [&] {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw bad();
        return v;
      } catch (const std::logic_error&) {
        throw bad();
      }
    };
    auto as_int = [&] {
      const double v = as_double();
      if (v != std::floor(v)) throw bad();
      return static_cast<int>(v);
    };
    auto as_bool = [&] {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw bad();
    };

    if (key == "seed") {
      try {
        std::size_t used = 0;
        spec.seed = std::stoull(value, &used);
        if (used != value.size()) throw bad();
      } catch (const std::logic_error&) {
        throw bad();
      }
    } else if (key == "n_objects") spec.n_objects = as_int();
    else if (key == "n_frames") spec.n_frames = as_int();
    else if (key == "motion") {
      if (value == "linear") spec.motion = MotionModel::Linear;
      else if (value == "crossing") spec.motion = MotionModel::Crossing;
      else if (value == "circular") spec.motion = MotionModel::Circular;
      else throw bad();
    } else if (key == "appearance_homogeneity") spec.appearance_homogeneity = as_double();
    else if (key == "detection_noise_px") spec.detection_noise_px = as_double();
    else if (key == "miss_rate") spec.miss_rate = as_double();
    else if (key == "clutter_rate") spec.clutter_rate = as_double();
    else if (key == "embedding_dim") spec.embedding_dim = as_int();
    else if (key == "image_width") spec.image_width = as_double();
    else if (key == "image_height") spec.image_height = as_double();
    else if (key == "min_box") spec.min_box = as_double();
    else if (key == "max_box") spec.max_box = as_double();
    else if (key == "speed") spec.speed = as_double();
    else if (key == "embedding_noise") spec.embedding_noise = as_double();
    else if (key == "crossing_stagger") spec.crossing_stagger = as_int();
    else if (key == "swap_embeddings") spec.swap_embeddings = as_bool();
    else if (key == "include_rate") spec.include_rate = as_double();
    else if (key == "exclude_clutter_rate") spec.exclude_clutter_rate = as_double();
    else if (key == "occlusion") {
      OcclusionWindow w;
      if (std::sscanf(value.c_str(), "%d:%d:%d", &w.object, &w.frame_start, &w.frame_end) != 3) throw bad();
      spec.occlusion_windows.push_back(w);
    } else {
      throw Error(ErrorCode::SpecError, "line " + std::to_string(line_no) + ": unknown key \"" + key + "\"");
    }
  }
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_spec(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_spec(buf.str());
}

std::string format_scenario_spec(const ScenarioSpec& s) {
  std::string out;
  char buf[128];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    out += buf;
  };
  out += "seed = " + std::to_string(s.seed) + "\n";
  out += "n_objects = " + std::to_string(s.n_objects) + "\n";
  out += "n_frames = " + std::to_string(s.n_frames) + "\n";
  out += std::string("motion = ") + motion_name(s.motion) + "\n";
  put("appearance_homogeneity", s.appearance_homogeneity);
  put("detection_noise_px", s.detection_noise_px);
  put("miss_rate", s.miss_rate);
  put("clutter_rate", s.clutter_rate);
  out += "embedding_dim = " + std::to_string(s.embedding_dim) + "\n";
  put("image_width", s.image_width);
  put("image_height", s.image_height);
  put("min_box", s.min_box);
  put("max_box", s.max_box);
  put("speed", s.speed);
  put("embedding_noise", s.embedding_noise);
  out += "crossing_stagger = " + std::to_string(s.crossing_stagger) + "\n";
  out += std::string("swap_embeddings = ") + (s.swap_embeddings ? "true" : "false") + "\n";
  put("include_rate", s.include_rate);
  put("exclude_clutter_rate", s.exclude_clutter_rate);
  for (const auto& w : s.occlusion_windows) {
    out += "occlusion = " + std::to_string(w.object) + ":" + std::to_string(w.frame_start) + ":" +
           std::to_string(w.frame_end) + "\n";
  }
  return out;
}

std::vector<Detection> Scenario::frame_detections(int frame) const {
  std::vector<Detection> out;
  if (frame < 1 || frame > static_cast<int>(detections.size())) return out;
  for (const auto& d : detections[frame - 1]) out.push_back(d.detection);
  return out;
}

std::vector<Detection> Scenario::all_detections() const {
  std::vector<Detection> out;
  for (const auto& frame : detections) {
    for (const auto& d : frame) out.push_back(d.detection);
  }
  return out;
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  const auto paths = make_paths(spec);

  Scenario sc;
  SplitMix64 app_rng(derive_seed(spec.seed, kAppearance));
  const Embedding shared = random_unit(app_rng, spec.embedding_dim);
  const double hom = spec.appearance_homogeneity;
  for (int k = 0; k < spec.n_objects; ++k) {
    const Embedding own = random_unit(app_rng, spec.embedding_dim);
    std::vector<double> mix(spec.embedding_dim);
    for (int i = 0; i < spec.embedding_dim; ++i) mix[i] = hom * shared[i] + (1.0 - hom) * own[i];
    Embedding e(std::move(mix));
    sc.object_embeddings.push_back(e.degenerate() ? own : e.normalized());
  }

  // Object k shows the embedding of appearance_of[f][k] in frame f.
  std::vector<int> swap_frame(spec.n_objects, std::numeric_limits<int>::max());
  if (spec.swap_embeddings && spec.motion == MotionModel::Crossing) {
    for (int k = 0; k + 1 < spec.n_objects; k += 2) {
      const int f = closest_frame(paths[k], paths[k + 1], spec.n_frames);
      swap_frame[k] = swap_frame[k + 1] = f;
    }
  }

  SplitMix64 noise_rng(derive_seed(spec.seed, kNoise));
  SplitMix64 clutter_rng(derive_seed(spec.seed, kClutter));
  SplitMix64 prompt_rng(derive_seed(spec.seed, kPrompts));
  const double sigma = spec.detection_noise_px;

  sc.detections.resize(spec.n_frames);
  sc.include_prompt.resize(spec.n_frames);
  sc.exclude_prompt.resize(spec.n_frames);
  for (int f = 1; f <= spec.n_frames; ++f) {
    auto& frame_dets = sc.detections[f - 1];
    for (int k = 0; k < spec.n_objects; ++k) {
      const auto [u, v] = paths[k].center(f);
      const BBox truth{u, v, paths[k].w, paths[k].h};
      sc.gt.add(f, k + 1, truth);

      // Fixed draw count per object and frame keeps streams aligned across specs.
      const double miss_draw = noise_rng.uniform();
      const double du = noise_rng.normal() * sigma;
      const double dv = noise_rng.normal() * sigma;
      const double dw = noise_rng.normal() * sigma;
      const double dh = noise_rng.normal() * sigma;
      const double conf = noise_rng.uniform(0.5, 1.0);
      const double include_draw = prompt_rng.uniform();
      std::vector<double> emb_noise(spec.embedding_dim);
      if (spec.embedding_noise > 0.0) {
        for (auto& x : emb_noise) x = noise_rng.normal() * spec.embedding_noise;
      }

      if (occluded(spec, k, f) || miss_draw < spec.miss_rate) continue;

      const int source = (k % 2 == 0 ? k + 1 : k - 1);
      const bool swapped = f >= swap_frame[k] && source < spec.n_objects;
      const Embedding& base = sc.object_embeddings[swapped ? source : k];
      Embedding emb = base;
      if (spec.embedding_noise > 0.0) {
        std::vector<double> noisy(base.values().begin(), base.values().end());
        for (int i = 0; i < spec.embedding_dim; ++i) noisy[i] += emb_noise[i];
        emb = Embedding(std::move(noisy)).normalized();
      }
      const BBox box{u + du, v + dv, std::max(1.0, truth.w + dw), std::max(1.0, truth.h + dh)};
      Detection det{f, box, conf, emb};
      frame_dets.push_back({det, k});
      if (include_draw < spec.include_rate) sc.include_prompt[f - 1].push_back(det);
    }

    for (int k = 0; k < spec.n_objects; ++k) {
      const double spawn = clutter_rng.uniform();
      const double w = clutter_rng.uniform(spec.min_box, spec.max_box);
      const double h = clutter_rng.uniform(spec.min_box, spec.max_box);
      const double u = clutter_rng.uniform(0.0, spec.image_width);
      const double v = clutter_rng.uniform(0.0, spec.image_height);
      const double conf = clutter_rng.uniform(0.2, 0.6);
      const Embedding emb = random_unit(clutter_rng, spec.embedding_dim);
      const double exclude_draw = prompt_rng.uniform();
      if (spawn >= spec.clutter_rate) continue;
      Detection det{f, BBox{u, v, w, h}, conf, emb};
      frame_dets.push_back({det, -1});
      if (exclude_draw < spec.exclude_clutter_rate) sc.exclude_prompt[f - 1].push_back(det);
    }
  }
  return sc;
}

void write_scenario(const Scenario& scenario, const ScenarioSpec& spec, const fs::path& out_dir) {
  std::vector<MotRecord> gt;
  for (int t = 0; t < scenario.gt.num_frames(); ++t) {
    for (const auto& b : scenario.gt.frames[t]) {
      MotRecord r = MotRecord::from_box(t + 1, b.id, b.box, 1.0);
      gt.push_back(r);
    }
  }
  write_mot(gt, out_dir / "gt" / "gt.txt");

  const auto dets = scenario.all_detections();
  write_detections(dets, out_dir / "det" / "det.txt", out_dir / "det" / "det.emb");
  write_detections(dets, out_dir / "prompts" / "general.txt", out_dir / "prompts" / "general.emb");

  auto flatten = [](const std::vector<std::vector<Detection>>& per_frame) {
    std::vector<Detection> out;
    for (const auto& f : per_frame) out.insert(out.end(), f.begin(), f.end());
    return out;
  };
  write_detections(flatten(scenario.include_prompt), out_dir / "prompts" / "include.txt",
                   out_dir / "prompts" / "include.emb");
  write_detections(flatten(scenario.exclude_prompt), out_dir / "prompts" / "exclude.txt",
                   out_dir / "prompts" / "exclude.emb");

  std::ofstream spec_out(out_dir / "scenario.txt", std::ios::binary | std::ios::trunc);
  if (!spec_out) throw Error(ErrorCode::IoError, "cannot write " + (out_dir / "scenario.txt").string());
  spec_out << format_scenario_spec(spec);
}

}  // namespace macsort
