#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "macsort/errors.hpp"
#include "macsort/io_mot.hpp"
#include "macsort/refer_annotations.hpp"
#include "macsort/synth.hpp"

namespace macsort::cli {
namespace fs = std::filesystem;
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorCode::ConfigError,
              "bad value \"" + std::string(value) + "\" for " + std::string(key) + " (expected " + std::string(want) + ")");
}

double to_double(std::string_view key, std::string_view value) {
  value = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "a number");
  return out;
}

int to_int(std::string_view key, std::string_view value) {
  value = trim(value);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

template <int N>
Eigen::Matrix<double, N, 1> to_vector(std::string_view key, std::string_view value) {
  Eigen::Matrix<double, N, 1> out;
  int i = 0;
  std::string_view rest = value;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    if (i >= N) bad_value(key, value, std::to_string(N) + " comma-separated numbers");
    out(i++) = to_double(key, item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (i != N) bad_value(key, value, std::to_string(N) + " comma-separated numbers");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class Vec>
std::string fmt_vector(const Vec& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v(i));
  }
  return out;
}

template <class Get>
ConfigKey double_key(std::string name, std::string help, Get ref) {
  auto key = name;
  return {std::move(name), std::move(help),
          [ref, key](RunConfig& c, std::string_view v) { ref(c) = to_double(key, v); },
          [ref](const RunConfig& c) { return fmt(ref(c)); }};
}

template <class Get>
ConfigKey int_key(std::string name, std::string help, Get ref) {
  auto key = name;
  return {std::move(name), std::move(help),
          [ref, key](RunConfig& c, std::string_view v) { ref(c) = to_int(key, v); },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); }};
}

template <class Get>
ConfigKey bool_key(std::string name, std::string help, Get ref) {
  auto key = name;
  return {std::move(name), std::move(help),
          [ref, key](RunConfig& c, std::string_view v) { ref(c) = to_bool(key, v); },
          [ref](const RunConfig& c) { return fmt(ref(c)); }};
}

template <class Get>
ConfigKey string_key(std::string name, std::string help, Get ref) {
  return {std::move(name), std::move(help),
          [ref](RunConfig& c, std::string_view v) { ref(c) = std::string(trim(v)); },
          [ref](const RunConfig& c) { return ref(c); }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k;
  k.push_back(double_key("lambda", "weight of the direction cost", [](auto& c) -> auto& { return c.assoc.lambda; }));
  k.push_back(double_key("theta_deg", "homogeneity crossover angle in degrees",
                         [](auto& c) -> auto& { return c.assoc.theta_deg; }));
  k.push_back(double_key("iou_gate", "minimum IoU for a track/detection pair",
                         [](auto& c) -> auto& { return c.assoc.iou_gate; }));
  k.push_back(int_key("max_age", "frames a lost track survives", [](auto& c) -> auto& { return c.assoc.max_age; }));
  k.push_back(int_key("min_hits", "matches before a track is reported", [](auto& c) -> auto& { return c.assoc.min_hits; }));
  k.push_back(double_key("ema_alpha", "track appearance smoothing", [](auto& c) -> auto& { return c.assoc.ema_alpha; }));
  k.push_back(bool_key("use_appearance", "include the appearance cost", [](auto& c) -> auto& { return c.assoc.use_appearance; }));
  k.push_back(bool_key("use_direction", "include the direction cost", [](auto& c) -> auto& { return c.assoc.use_direction; }));
  k.push_back({"fixed_appearance_weight", "freeze the appearance weight (\"none\" derives it per frame)",
               [](RunConfig& c, std::string_view v) {
                 if (trim(v) == "none" || trim(v).empty()) {
                   c.assoc.fixed_appearance_weight.reset();
                 } else {
                   c.assoc.fixed_appearance_weight = to_double("fixed_appearance_weight", v);
                 }
               },
               [](const RunConfig& c) {
                 return c.assoc.fixed_appearance_weight ? fmt(*c.assoc.fixed_appearance_weight) : std::string("none");
               }});
  k.push_back({"history_capacity", "observations kept per track",
               [](RunConfig& c, std::string_view v) {
                 const int n = to_int("history_capacity", v);
                 if (n < 0) bad_value("history_capacity", v, "a non-negative integer");
                 c.assoc.history_capacity = static_cast<std::size_t>(n);
               },
               [](const RunConfig& c) { return std::to_string(c.assoc.history_capacity); }});
  k.push_back({"kalman_measurement_noise", "measurement noise diagonal (u,v,s,r)",
               [](RunConfig& c, std::string_view v) {
                 c.assoc.kalman.measurement_noise = to_vector<4>("kalman_measurement_noise", v);
               },
               [](const RunConfig& c) { return fmt_vector(c.assoc.kalman.measurement_noise); }});
  k.push_back({"kalman_process_noise", "process noise diagonal (u,v,s,r,du,dv,ds)",
               [](RunConfig& c, std::string_view v) { c.assoc.kalman.process_noise = to_vector<7>("kalman_process_noise", v); },
               [](const RunConfig& c) { return fmt_vector(c.assoc.kalman.process_noise); }});
  k.push_back({"kalman_initial_variance", "initial covariance diagonal (u,v,s,r,du,dv,ds)",
               [](RunConfig& c, std::string_view v) {
                 c.assoc.kalman.initial_variance = to_vector<7>("kalman_initial_variance", v);
               },
               [](const RunConfig& c) { return fmt_vector(c.assoc.kalman.initial_variance); }});
  k.push_back(int_key("kappa1", "long memory size", [](auto& c) -> auto& { return c.tpod.kappa1; }));
  k.push_back(int_key("kappa2", "short memory size", [](auto& c) -> auto& { return c.tpod.kappa2; }));
  k.push_back(int_key("short_window_frames", "frames covered by the short memory",
                      [](auto& c) -> auto& { return c.tpod.short_window_frames; }));
  k.push_back(double_key("detection_threshold", "minimum prompt detection score",
                         [](auto& c) -> auto& { return c.tpod.detection_threshold; }));
  k.push_back(double_key("overlap_threshold", "IoU above which prompt boxes overlap",
                         [](auto& c) -> auto& { return c.tpod.overlap_threshold; }));
  k.push_back(bool_key("cold_start_passthrough", "accept unclassified boxes while memory is empty",
                       [](auto& c) -> auto& { return c.tpod.cold_start_passthrough; }));
  k.push_back(bool_key("memory_includes_rescued", "store rescued boxes in memory",
                       [](auto& c) -> auto& { return c.tpod.memory_includes_rescued; }));
  k.push_back(double_key("iou_threshold", "evaluation IoU threshold",
                         [](auto& c) -> auto& { return c.metrics.iou_threshold; }));
  k.push_back(bool_key("hota_sweep", "average HOTA over thresholds 0.05..0.95",
                       [](auto& c) -> auto& { return c.metrics.hota_sweep; }));
  k.push_back(string_key("input_dir", "directory whose subdirectories are sequences",
                         [](auto& c) -> auto& { return c.input_dir; }));
  k.push_back(string_key("output_dir", "where per-sequence outputs go (default: the sequence itself)",
                         [](auto& c) -> auto& { return c.output_dir; }));
  k.push_back(string_key("annotation_file", "annotation JSON for the run",
                         [](auto& c) -> auto& { return c.annotation_file; }));
  return k;
}

// ---------------------------------------------------------------------------
// Sequence plumbing

fs::path clean(const fs::path& p) {
  fs::path out = p.lexically_normal();
  if (!out.has_filename() && out.has_parent_path()) out = out.parent_path();
  return out;
}

std::vector<fs::path> resolve_sequences(const std::vector<std::string>& positional, const RunConfig& cfg) {
  std::vector<fs::path> out;
  for (const auto& p : positional) out.push_back(clean(p));
  if (!out.empty()) return out;
  if (cfg.input_dir.empty()) throw Error(ErrorCode::ConfigError, "no sequence directories given and input_dir is unset");
  if (!fs::is_directory(cfg.input_dir)) throw Error(ErrorCode::IoError, "input_dir " + cfg.input_dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(cfg.input_dir)) {
    if (entry.is_directory()) out.push_back(clean(entry.path()));
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error(ErrorCode::IoError, "input_dir " + cfg.input_dir + " has no sequence directories");
  return out;
}

fs::path work_dir(const fs::path& seq, const RunConfig& cfg) {
  return cfg.output_dir.empty() ? seq : fs::path(cfg.output_dir) / seq.filename();
}

struct SequenceOutcome {
  std::string log;
  std::exception_ptr error;
};

// Sequences run on a small pool; each one is handled start to finish by one
// worker and its log is buffered so the combined output keeps sequence order.
template <class Fn>
std::vector<SequenceOutcome> run_sequences(const std::vector<fs::path>& seqs, int threads, Fn&& fn) {
  std::vector<SequenceOutcome> outcomes(seqs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seqs.size(); i = next++) {
      std::ostringstream log;
      try {
        fn(seqs[i], log);
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
      outcomes[i].log = log.str();
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(seqs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return outcomes;
}

void flush_outcomes(const std::vector<SequenceOutcome>& outcomes, std::ostream& out) {
  for (const auto& o : outcomes) out << o.log;
  for (const auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
  }
}

void filter_sequence(const fs::path& seq, const RunConfig& cfg, std::ostream& log) {
  const fs::path prompts = fs::is_directory(seq / "prompts") ? seq / "prompts" : seq;
  const PromptDump dump(prompts);
  TpodFilter filter(cfg.tpod);
  std::vector<Detection> kept;
  std::size_t total_dropped = 0;
  std::size_t total_rescued = 0;
  std::size_t total_rejected = 0;
  const int last = dump.last_frame();
  char line[160];
  for (int f = 1; f <= last; ++f) {
    const PromptFrame pf = dump.frame(f, cfg.tpod.detection_threshold);
    const TpodFrameResult r = filter.process(f, pf.general, pf.include, pf.exclude);
    for (const auto& b : r.final_tps) kept.push_back({f, b.box, b.score, b.feature});
    total_dropped += r.dropped.size();
    total_rescued += r.rescued.size();
    total_rejected += r.rejected.size();
    std::snprintf(line, sizeof(line), "%s frame %d: general=%zu tp=%zu dropped=%zu rescued=%zu rejected=%zu\n",
                  seq.filename().string().c_str(), f, pf.general.size(), r.final_tps.size(), r.dropped.size(),
                  r.rescued.size(), r.rejected.size());
    log << line;
  }
  const fs::path dir = work_dir(seq, cfg);
  write_detections(kept, dir / "filtered.txt", dir / "filtered.emb");
  std::snprintf(line, sizeof(line), "%s: %d frames, kept %zu, dropped %zu, rescued %zu, rejected %zu\n",
                seq.filename().string().c_str(), last, kept.size(), total_dropped, total_rescued, total_rejected);
  log << line;
}

void track_sequence(const fs::path& seq, const RunConfig& cfg, const std::string& stem, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = work_dir(seq, cfg);
  fs::path base = dir / stem;
  if (!fs::exists(base.string() + ".txt") && fs::exists((seq / stem).string() + ".txt")) base = seq / stem;
  const auto dets = read_detections(base.string() + ".txt", base.string() + ".emb");

  std::map<int, std::vector<Detection>> by_frame;
  for (const auto& d : dets) by_frame[d.frame].push_back(d);
  const int last = by_frame.empty() ? 0 : by_frame.rbegin()->first;

  MacSortTracker tracker(cfg.assoc);
  std::vector<MotRecord> results;
  const std::vector<Detection> none;
  for (int f = 1; f <= last; ++f) {
    auto it = by_frame.find(f);
    const auto& frame_dets = it == by_frame.end() ? none : it->second;
    for (const auto& t : tracker.step(f, frame_dets)) results.push_back(MotRecord::from_box(f, t.id, t.box, 1.0));
  }
  write_mot(results, dir / "results.txt");
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  char line[160];
  std::snprintf(line, sizeof(line), "%s: %d frames, %zu detections, %d tracks, %.1f ms\n",
                seq.filename().string().c_str(), last, dets.size(), tracker.next_id() - 1, ms);
  log << line;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Collects `--key value` overrides for every config key on a subcommand.
struct ConfigOptions {
  std::string config_file;
  int threads = 0;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  bool disable_appearance = false;
  bool disable_direction = false;

  void attach(CLI::App* app, bool with_threads) {
    app->add_option("--config", config_file, "key = value configuration file");
    if (with_threads) app->add_option("--threads", threads, "worker threads (0 = one per core)")->check(CLI::NonNegativeNumber);
    for (const auto& key : config_keys()) {
      std::string dashed = key.name;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      std::string names = "--" + dashed;
      if (dashed != key.name) names += ",--" + key.name;
      options.emplace_back(key.name, app->add_option(names, values[key.name], key.help));
    }
    app->add_flag("--disable-appearance", disable_appearance, "drop the appearance cost");
    app->add_flag("--disable-direction", disable_direction, "drop the direction cost");
  }

  RunConfig resolve() const {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_run_config(config_file);
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) apply_config_value(cfg, name, values.at(name));
    }
    if (disable_appearance) cfg.assoc.use_appearance = false;
    if (disable_direction) cfg.assoc.use_direction = false;
    cfg.validate();
    return cfg;
  }
};

int cmd_parse_captions(const fs::path& dir, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    err << "warning: no annotation files under " << dir.string() << "\n";
    return 0;
  }
  std::size_t failures = 0;
  ErrorCode first = ErrorCode::CaptionGrammarError;
  for (const auto& file : files) {
    const std::string rel = file.lexically_relative(dir).generic_string();
    try {
      const GmotAnnotation a = load_annotation(file);
      const CaptionQuery q = parse_caption(a.caption, a);
      out << "ok   " << rel << ": general=\"" << q.general << "\" include=\"" << q.include << "\" exclude=\""
          << q.exclude << "\"\n";
    } catch (const Error& e) {
      if (failures++ == 0) first = e.code();
      out << "FAIL " << rel << ": " << error_name(e.code()) << ": " << one_line(e.what()) << "\n";
    }
  }
  out << files.size() << " annotations, " << failures << " invalid\n";
  if (failures > 0) {
    err << "error[" << error_name(first) << "]: " << failures << " of " << files.size()
        << " annotations are invalid\n";
    return 2;
  }
  return 0;
}

}  // namespace

void RunConfig::validate() const {
  assoc.validate();
  tpod.validate();
  if (!(metrics.iou_threshold > 0.0 && metrics.iou_threshold < 1.0)) {
    throw Error(ErrorCode::ConfigError, "iou_threshold must lie in (0, 1)");
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void apply_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown config key \"" + std::string(key) + "\"");
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string format_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("MACSORT_THREADS"); env && *env) {
    int cap = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && ptr == s.data() + s.size() && cap > 0) n = std::min(n, cap);
  }
  return n;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-filtered multi-object tracking toolkit", "macsort"};
  app.require_subcommand(1);

  auto* filter = app.add_subcommand("filter", "filter prompt detections into <seq>/filtered.{txt,emb}");
  ConfigOptions filter_opts;
  std::vector<std::string> filter_seqs;
  filter->add_option("sequences", filter_seqs, "sequence directories (default: subdirectories of input_dir)");
  filter_opts.attach(filter, true);

  auto* track = app.add_subcommand("track", "track detections into <seq>/results.txt");
  ConfigOptions track_opts;
  std::vector<std::string> track_seqs;
  std::string stem = "filtered";
  track->add_option("sequences", track_seqs, "sequence directories (default: subdirectories of input_dir)");
  track->add_option("--detections", stem, "detection file stem inside each sequence")->capture_default_str();
  track_opts.attach(track, true);

  auto* eval = app.add_subcommand("eval", "score a results file against ground truth");
  ConfigOptions eval_opts;
  std::string gt_path, results_path, json_out, text_out;
  bool json_stdout = false;
  eval->add_option("gt", gt_path, "ground-truth MOT file")->required();
  eval->add_option("results", results_path, "tracker MOT file")->required();
  eval->add_option("--json-out", json_out, "also write the JSON report here");
  eval->add_option("--text-out", text_out, "also write the text report here");
  eval->add_flag("--json", json_stdout, "print JSON instead of text");
  eval_opts.attach(eval, false);

  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario");
  std::string spec_path, synth_out;
  synth->add_option("spec", spec_path, "scenario spec file")->required();
  synth->add_option("out_dir", synth_out, "output directory")->required();

  auto* captions = app.add_subcommand("parse-captions", "validate annotation captions");
  std::string annotation_dir;
  captions->add_option("annotation_dir", annotation_dir, "directory of annotation JSON files")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error[UsageError]: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (filter->parsed()) {
      const RunConfig cfg = filter_opts.resolve();
      const auto seqs = resolve_sequences(filter_seqs, cfg);
      flush_outcomes(run_sequences(seqs, resolve_threads(filter_opts.threads),
                                   [&](const fs::path& s, std::ostream& log) { filter_sequence(s, cfg, log); }),
                     out);
    } else if (track->parsed()) {
      const RunConfig cfg = track_opts.resolve();
      const auto seqs = resolve_sequences(track_seqs, cfg);
      flush_outcomes(run_sequences(seqs, resolve_threads(track_opts.threads),
                                   [&](const fs::path& s, std::ostream& log) { track_sequence(s, cfg, stem, log); }),
                     out);
    } else if (eval->parsed()) {
      const RunConfig cfg = eval_opts.resolve();
      const auto gt = to_sequence(read_mot_records(gt_path));
      const auto pred = to_sequence(read_mot_records(results_path));
      const MetricsReport report = evaluate(gt, pred, cfg.metrics);
      const std::string text = report_to_text(report);
      const std::string json = report_to_json(report);
      out << (json_stdout ? json : text);
      if (!json_out.empty()) write_text(json_out, json);
      if (!text_out.empty()) write_text(text_out, text);
    } else if (synth->parsed()) {
      const ScenarioSpec spec = load_scenario_spec(spec_path);
      const Scenario sc = generate(spec);
      write_scenario(sc, spec, synth_out);
      out << "wrote " << spec.n_frames << " frames, " << spec.n_objects << " objects, " << sc.all_detections().size()
          << " detections to " << synth_out << "\n";
    } else if (captions->parsed()) {
      return cmd_parse_captions(annotation_dir, out, err);
    }
  } catch (const Error& e) {
    err << "error[" << error_name(e.code()) << "]: " << one_line(e.what()) << "\n";
    return is_input_error(e.code()) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "error[IoError]: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error[Internal]: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace macsort::cli
