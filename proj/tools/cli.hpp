#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "macsort/mac_sort.hpp"
#include "macsort/metrics.hpp"
#include "macsort/tpod_filter.hpp"

namespace macsort::cli {

struct RunConfig {
  AssocConfig assoc;
  TpodConfig tpod;
  MetricsConfig metrics;
  std::string input_dir;
  std::string output_dir;
  std::string annotation_file;

  /// Throws ConfigError.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every settable key, in the order format_run_config prints them.
const std::vector<ConfigKey>& config_keys();

/// Throws ConfigError for unknown keys and unparsable values.
void apply_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// `key = value` lines over the defaults; '#' starts a comment.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);
std::string format_run_config(const RunConfig& config);

/// Worker count: the requested value (0 means one per core), capped by
/// MACSORT_THREADS when that is set.
int resolve_threads(int requested);

/// Runs the tool with `args` (program name excluded). Returns the exit code:
/// 0 on success, 1 on runtime errors, 2 on input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace macsort::cli
