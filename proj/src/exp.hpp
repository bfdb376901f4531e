#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "common.hpp"

namespace hds::exp {

std::string sha256_bytes(std::string_view data);
std::string sha256_file(const std::string& path);

// One run = one directory: metrics.json, tables, model files, and finally a
// manifest binding the merged config to the artifact hashes. No timestamps
// anywhere, so a replay of the manifest is byte-comparable.
class RunDir {
 public:
  explicit RunDir(std::string dir);

  const std::string& dir() const { return dir_; }
  std::string path(const std::string& rel) const;

  void write_text(const std::string& rel, std::string_view text);
  void note(const std::string& rel);  // register a file written through path(rel)
  void add_input(const std::string& label, const std::string& file_path);
  void finish(const std::string& kind, const nlohmann::json& config);

 private:
  std::string dir_;
  std::vector<std::string> artifacts_;
  std::map<std::string, std::string> inputs_;
  bool finished_ = false;
};

const std::vector<std::string>& experiment_kinds();
nlohmann::json default_config(const std::string& kind);

// Merges overrides into the kind's defaults (unknown keys rejected), runs the
// experiment into out_dir, and returns the metrics document.
nlohmann::json run(const std::string& kind, const nlohmann::json& overrides,
                   const std::string& out_dir);

// True when every entry of metrics["checks"] passed (vacuously true if none).
bool all_checks_pass(const nlohmann::json& metrics);

struct ReplayResult {
  bool identical = false;
  std::string detail;  // empty when identical, else the first difference
};

// Re-runs the experiment recorded in run_dir/manifest.json into scratch_dir
// and compares the two manifests byte for byte.
ReplayResult replay(const std::string& run_dir, const std::string& scratch_dir);

}  // namespace hds::exp
