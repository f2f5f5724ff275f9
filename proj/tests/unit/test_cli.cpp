#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "expect_error.hpp"
#include "macsort/io_mot.hpp"
#include "macsort/synth.hpp"
#include "oracles.hpp"

using namespace macsort;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void make_sequence(const fs::path& dir, std::uint64_t seed) {
  ScenarioSpec s;
  s.seed = seed;
  s.n_objects = 4;
  s.n_frames = 25;
  s.detection_noise_px = 0.5;
  s.clutter_rate = 0.2;
  write_scenario(generate(s), s, dir);
}

const char* kCarAnnotation = R"({
  "class_name": "car",
  "include_attributes": ["white headlight"],
  "exclude_attributes": ["red taillight"],
  "caption": "Track white headlight cars while excluding red taillight cars"
})";

}  // namespace

TEST(RunConfig, DefaultsAndFormatRoundTrip) {
  const cli::RunConfig cfg;
  EXPECT_EQ(cfg.assoc.lambda, 0.2);
  EXPECT_EQ(cfg.tpod.detection_threshold, 0.2);
  EXPECT_EQ(cfg.tpod.kappa1, 9);
  EXPECT_EQ(cfg.tpod.kappa2, 3);
  const std::string text = cli::format_run_config(cfg);
  EXPECT_EQ(cli::format_run_config(cli::parse_run_config(text)), text);
}

TEST(RunConfig, ParsesEveryKeyKind) {
  const cli::RunConfig cfg = cli::parse_run_config(
      "lambda = 0.5\n# comment\nuse_appearance = false\nfixed_appearance_weight = 1.5\nkappa1 = 4\n"
      "kalman_measurement_noise = 2, 2, 20, 20\ninput_dir = /tmp/x  # trailing\n");
  EXPECT_EQ(cfg.assoc.lambda, 0.5);
  EXPECT_FALSE(cfg.assoc.use_appearance);
  ASSERT_TRUE(cfg.assoc.fixed_appearance_weight.has_value());
  EXPECT_EQ(*cfg.assoc.fixed_appearance_weight, 1.5);
  EXPECT_EQ(cfg.tpod.kappa1, 4);
  EXPECT_EQ(cfg.assoc.kalman.measurement_noise[2], 20.0);
  EXPECT_EQ(cfg.input_dir, "/tmp/x");
  EXPECT_FALSE(cli::parse_run_config("fixed_appearance_weight = none\n").assoc.fixed_appearance_weight);
}

TEST(RunConfig, Errors) {
  EXPECT_MACSORT_ERROR(cli::parse_run_config("colour = red\n"), ErrorCode::ConfigError);
  EXPECT_MACSORT_ERROR(cli::parse_run_config("lambda = fast\n"), ErrorCode::ConfigError);
  EXPECT_MACSORT_ERROR(cli::parse_run_config("max_age = 2.5\n"), ErrorCode::ConfigError);
  EXPECT_MACSORT_ERROR(cli::parse_run_config("use_direction = maybe\n"), ErrorCode::ConfigError);
  EXPECT_MACSORT_ERROR(cli::parse_run_config("kalman_process_noise = 1,2\n"), ErrorCode::ConfigError);
  EXPECT_MACSORT_ERROR(cli::parse_run_config("no equals sign\n"), ErrorCode::ConfigError);
}

TEST(Cli, NoSubcommandIsUsageError) {
  const CliRun r = run({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[UsageError]"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("track"), std::string::npos);
}

TEST(Cli, FlagsOverrideFileOverrideDefaults) {
  oracle::TempDir dir("cli_precedence");
  make_sequence(dir / "seq", 3);
  oracle::write_file(dir / "cfg.txt", "min_hits = 1\nmax_age = 1\n");
  // With min_hits 1 every first-frame detection is reported immediately.
  ASSERT_EQ(run({"track", (dir / "seq").string(), "--detections", "det/det", "--config", (dir / "cfg.txt").string()}).code, 0);
  const auto from_file = read_mot(dir / "seq/results.txt");
  ASSERT_TRUE(from_file.count(1));
  ASSERT_EQ(run({"track", (dir / "seq").string(), "--detections", "det/det", "--config", (dir / "cfg.txt").string(),
                 "--min-hits", "3"}).code, 0);
  const auto from_flag = read_mot(dir / "seq/results.txt");
  EXPECT_FALSE(from_flag.count(1));
  EXPECT_TRUE(from_flag.count(3));
  ASSERT_EQ(run({"track", (dir / "seq").string(), "--detections", "det/det", "--min_hits", "1"}).code, 0);
  EXPECT_TRUE(read_mot(dir / "seq/results.txt").count(1));
}

TEST(Cli, BadConfigValueExitsTwo) {
  oracle::TempDir dir("cli_badcfg");
  make_sequence(dir / "seq", 4);
  oracle::write_file(dir / "cfg.txt", "unknown_key = 3\n");
  CliRun r = run({"track", (dir / "seq").string(), "--config", (dir / "cfg.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[ConfigError]"), std::string::npos);
  r = run({"track", (dir / "seq").string(), "--lambda", "-1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[ConfigError]"), std::string::npos);
  EXPECT_EQ(run({"track", (dir / "seq").string(), "--config", (dir / "missing.txt").string()}).code, 2);
}

TEST(Cli, EmptyDetectionsGiveEmptyResults) {
  oracle::TempDir dir("cli_empty");
  write_detections(std::vector<Detection>{}, dir / "seq/filtered.txt", dir / "seq/filtered.emb");
  const CliRun r = run({"track", (dir / "seq").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "seq/results.txt"));
  EXPECT_EQ(oracle::read_file(dir / "seq/results.txt"), "");
}

TEST(Cli, DisableAppearanceChangesCosts) {
  oracle::TempDir dir("cli_noapp");
  ScenarioSpec s;
  s.seed = 8;
  s.motion = MotionModel::Crossing;
  s.n_objects = 4;
  s.n_frames = 60;
  s.swap_embeddings = true;
  s.crossing_stagger = 0;
  write_scenario(generate(s), s, dir / "seq");
  ASSERT_EQ(run({"track", (dir / "seq").string(), "--detections", "det/det", "--disable-appearance",
                 "--output-dir", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"track", (dir / "seq").string(), "--detections", "det/det", "--fixed-appearance-weight", "2",
                 "--output-dir", (dir / "b").string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "a/seq/results.txt"));
  EXPECT_NE(oracle::read_file(dir / "a/seq/results.txt"), oracle::read_file(dir / "b/seq/results.txt"));
}

TEST(Cli, EvalOfGtAgainstItselfIsPerfect) {
  oracle::TempDir dir("cli_eval");
  make_sequence(dir / "seq", 5);
  const std::string gt = (dir / "seq/gt/gt.txt").string();
  CliRun r = run({"eval", gt, gt, "--json-out", (dir / "r.json").string(), "--text-out", (dir / "r.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("HOTA   1.0000"), std::string::npos);
  EXPECT_NE(r.out.find("MOTA   1.0000"), std::string::npos);
  EXPECT_NE(r.out.find("IDF1   1.0000"), std::string::npos);
  EXPECT_EQ(oracle::read_file(dir / "r.txt"), r.out);
  EXPECT_NE(oracle::read_file(dir / "r.json").find("\"idf1\": 1.0"), std::string::npos);
  r = run({"eval", gt, gt, "--json"});
  EXPECT_EQ(r.out.front(), '{');
}

TEST(Cli, EvalErrors) {
  oracle::TempDir dir("cli_eval_err");
  oracle::write_file(dir / "gt.txt", "1,1,0,0,10,10,1,-1,-1,-1\n");
  oracle::write_file(dir / "late.txt", "2,1,0,0,10,10,1,-1,-1,-1\n");
  oracle::write_file(dir / "bad.txt", "1,1,0,0\n");
  CliRun r = run({"eval", (dir / "gt.txt").string(), (dir / "late.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[FrameMismatch]"), std::string::npos);
  r = run({"eval", (dir / "gt.txt").string(), (dir / "bad.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[ParseError]"), std::string::npos);
  EXPECT_EQ(run({"eval", (dir / "gt.txt").string(), (dir / "none.txt").string()}).code, 2);
}

TEST(Cli, FilterNeedsGeneralFile) {
  oracle::TempDir dir("cli_nogeneral");
  fs::create_directories(dir / "seq");
  const CliRun r = run({"filter", (dir / "seq").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error[MissingGeneralFile]"), std::string::npos);
  // stderr carries exactly one line.
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, FilterWritesAlignedOutputs) {
  oracle::TempDir dir("cli_filter");
  make_sequence(dir / "seq", 6);
  const CliRun r = run({"filter", (dir / "seq").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seq frame 1: general="), std::string::npos);
  const auto dets = read_detections(dir / "seq/filtered.txt", dir / "seq/filtered.emb");
  EXPECT_FALSE(dets.empty());
}

TEST(Cli, FilterDropsExcludedCars) {
  oracle::TempDir dir("cli_cars");
  // Two white-headlight cars confirmed by the include prompt, two red-taillight
  // cars hit by the exclude prompt, over three frames.
  std::vector<Detection> general, include, exclude;
  for (int f = 1; f <= 3; ++f) {
    for (int k = 0; k < 4; ++k) {
      const BBox b{100.0 + 150 * k + f, 200, 60, 40};
      const Embedding e = k < 2 ? Embedding{1.0, 0.1 * k, 0.0} : Embedding{0.0, 0.1 * k, 1.0};
      general.push_back({f, b, 0.8, e});
      (k < 2 ? include : exclude).push_back({f, b, 0.7, e});
    }
  }
  write_detections(general, dir / "seq/general.txt", dir / "seq/general.emb");
  write_detections(include, dir / "seq/include.txt", dir / "seq/include.emb");
  write_detections(exclude, dir / "seq/exclude.txt", dir / "seq/exclude.emb");
  const CliRun r = run({"filter", (dir / "seq").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kept = read_detections(dir / "seq/filtered.txt", dir / "seq/filtered.emb");
  ASSERT_EQ(kept.size(), 6u);
  for (const auto& d : kept) EXPECT_LT(d.bbox.u, 400.0);
}

TEST(Cli, InputDirSequencesAndOutputDir) {
  oracle::TempDir dir("cli_inputdir");
  make_sequence(dir / "in/b", 7);
  make_sequence(dir / "in/a", 8);
  const CliRun r = run({"filter", "--input-dir", (dir / "in").string(), "--output-dir", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.out.find("a frame 1"), r.out.find("b frame 1"));
  EXPECT_TRUE(fs::exists(dir / "out/a/filtered.txt"));
  EXPECT_TRUE(fs::exists(dir / "out/b/filtered.emb"));
  EXPECT_EQ(run({"track", "--input-dir", (dir / "in").string(), "--output-dir", (dir / "out").string()}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "out/b/results.txt"));
  EXPECT_EQ(run({"track"}).code, 2);
}

TEST(Cli, ThreadCountDoesNotChangeOutputs) {
  oracle::TempDir dir("cli_threads");
  for (int k = 0; k < 4; ++k) make_sequence(dir / "in" / ("s" + std::to_string(k)), 20 + k);
  std::map<std::string, std::string> first;
  for (const char* threads : {"1", "8"}) {
    const std::string out = (dir / (std::string("out") + threads)).string();
    ASSERT_EQ(run({"filter", "--input-dir", (dir / "in").string(), "--output-dir", out, "--threads", threads}).code, 0);
    ASSERT_EQ(run({"track", "--input-dir", (dir / "in").string(), "--output-dir", out, "--threads", threads}).code, 0);
    for (int k = 0; k < 4; ++k) {
      for (const char* file : {"filtered.txt", "filtered.emb", "results.txt"}) {
        const std::string rel = "s" + std::to_string(k) + "/" + file;
        const std::string content = oracle::read_file(fs::path(out) / rel);
        auto [it, fresh] = first.try_emplace(rel, content);
        if (!fresh) EXPECT_EQ(content, it->second) << rel;
      }
    }
  }
  EXPECT_EQ(first.size(), 12u);
}

TEST(Cli, SynthWritesScenario) {
  oracle::TempDir dir("cli_synth");
  oracle::write_file(dir / "spec.txt", "seed = 3\nn_objects = 2\nn_frames = 5\n");
  const CliRun r = run({"synth", (dir / "spec.txt").string(), (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_mot_records(dir / "out/gt/gt.txt").size(), 10u);
  oracle::write_file(dir / "bad.txt", "n_objects = 0\n");
  const CliRun bad = run({"synth", (dir / "bad.txt").string(), (dir / "out2").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("error[SpecError]"), std::string::npos);
}

TEST(Cli, ParseCaptionsValid) {
  oracle::TempDir dir("cli_captions");
  oracle::write_file(dir / "car.json", kCarAnnotation);
  const CliRun r = run({"parse-captions", dir.path().string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ok   car.json: general=\"cars\" include=\"white headlight\" exclude=\"red taillight\""),
            std::string::npos);
}

TEST(Cli, ParseCaptionsMalformed) {
  oracle::TempDir dir("cli_captions_bad");
  oracle::write_file(dir / "a.json", kCarAnnotation);
  oracle::write_file(dir / "b.json", R"({"caption": "Track cars"})");
  const CliRun r = run({"parse-captions", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("FAIL b.json: SchemaError"), std::string::npos);
  EXPECT_NE(r.out.find("2 annotations, 1 invalid"), std::string::npos);
  EXPECT_NE(r.err.find("error[SchemaError]"), std::string::npos);
}

TEST(Cli, ParseCaptionsEmptyDirectory) {
  oracle::TempDir dir("cli_captions_empty");
  const CliRun r = run({"parse-captions", dir.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Threads, EnvironmentCap) {
  ::setenv("MACSORT_THREADS", "2", 1);
  EXPECT_EQ(cli::resolve_threads(8), 2);
  EXPECT_EQ(cli::resolve_threads(1), 1);
  ::unsetenv("MACSORT_THREADS");
  EXPECT_EQ(cli::resolve_threads(8), 8);
  EXPECT_GE(cli::resolve_threads(0), 1);
}
