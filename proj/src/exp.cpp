#include "exp.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bench.hpp"
#include "doe.hpp"
#include "iga.hpp"
#include "metrics.hpp"
#include "pso.hpp"
#include "surrogate.hpp"

namespace hds::exp {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- hashing ----

namespace {

std::string hex(const unsigned char* h, unsigned int n) {
  static const char* digits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (unsigned int i = 0; i < n; ++i) {
    s[2 * i] = digits[h[i] >> 4];
    s[2 * i + 1] = digits[h[i] & 0xf];
  }
  return s;
}

}  // namespace

std::string sha256_bytes(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1,
          Errc::numeric_error, "sha256 failed");
  return hex(md, len);
}

std::string sha256_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  require(f != nullptr, Errc::io_error, "cannot open: " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[65536];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) EVP_DigestUpdate(ctx, buf, got);
  const bool read_ok = std::ferror(f) == 0;
  std::fclose(f);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  require(read_ok, Errc::io_error, "read error: " + path);
  return hex(md, len);
}

// ---- run directories ----

RunDir::RunDir(std::string dir) : dir_(std::move(dir)) {
  require(!dir_.empty(), Errc::invalid_argument, "run: empty output directory");
  fs::create_directories(dir_);
  require(!fs::exists(path("manifest.json")), Errc::state_error,
          "run: " + dir_ + " already holds a finished run");
}

std::string RunDir::path(const std::string& rel) const {
  return (fs::path(dir_) / rel).string();
}

void RunDir::write_text(const std::string& rel, std::string_view text) {
  std::ofstream f(path(rel), std::ios::binary);
  require(f.good(), Errc::io_error, "cannot open for writing: " + path(rel));
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(f.good(), Errc::io_error, "short write: " + path(rel));
  f.close();
  note(rel);
}

void RunDir::note(const std::string& rel) {
  if (std::find(artifacts_.begin(), artifacts_.end(), rel) == artifacts_.end())
    artifacts_.push_back(rel);
}

void RunDir::add_input(const std::string& label, const std::string& file_path) {
  inputs_[label] = sha256_file(file_path);
}

void RunDir::finish(const std::string& kind, const json& config) {
  require(!finished_, Errc::state_error, "run: finish called twice");
  json manifest;
  manifest["format"] = "hdsurr-run-v1";
  manifest["experiment"] = kind;
  manifest["config"] = config;
  manifest["inputs"] = inputs_;
  json art = json::object();
  for (const std::string& rel : artifacts_) art[rel] = sha256_file(path(rel));
  manifest["artifacts"] = art;
  std::ofstream f(path("manifest.json"), std::ios::binary);
  require(f.good(), Errc::io_error, "cannot open for writing: " + path("manifest.json"));
  f << manifest.dump(2) << '\n';
  require(f.good(), Errc::io_error, "short write: " + path("manifest.json"));
  finished_ = true;
}

// ---- configs ----

namespace {

json train_defaults() {
  return {{"arch", ""},
          {"grid", json::array()},
          {"epochs", 200},
          {"batch", 64},
          {"lr", 1e-3},
          {"patience", 20},
          {"val_fraction", 0.1},
          {"min_delta", 0.0}};
}

const std::vector<std::string> kKinds = {
    "bench-train",   "griewank-sweep", "bench-suite",  "shanwang-sweep",
    "asymmetric",    "iga-surrogate",  "iga-optimize"};

json defaults_for(const std::string& kind) {
  if (kind == "bench-train")
    return {{"fn", "griewank"},
            {"d", 324},
            {"n_train", 10000},
            {"n_test", 10000},
            {"lhs", false},
            {"seeds", {1, 2, 3}},
            {"train_csv", ""},
            {"test_csv", ""},
            {"train", train_defaults()},
            {"acceptance",
             {{"max_error_pct", 3.0}, {"min_r2", nullptr}, {"require_complete", true}}}};
  if (kind == "asymmetric")
    return {{"fn", "expanded_griewank_rosenbrock"},
            {"d", 324},
            {"n_train", 10000},
            {"n_test", 10000},
            {"lhs", false},
            {"seeds", {1}},
            {"train_csv", ""},
            {"test_csv", ""},
            {"train", train_defaults()},
            {"acceptance",
             {{"max_error_pct", 4.0}, {"min_r2", 0.90}, {"require_complete", true}}}};
  if (kind == "griewank-sweep")
    return {{"dims", {100, 144, 256, 324, 784}},
            {"n_train", 10000},
            {"n_test", 10000},
            {"lhs", false},
            {"seed", 1},
            {"train", train_defaults()},
            {"acceptance",
             {{"max_error_pct", 3.0}, {"max_spread_pp", 2.0}, {"require_complete", true}}}};
  if (kind == "bench-suite")
    return {{"d", 324},
            {"fns",
             {"griewank", "levy", "weierstrass", "bent_cigar", "rotated_hyper_ellipsoid",
              "rosenbrock", "hgbat", "sum_squares", "happycat", "dixon_price"}},
            {"n_train", 10000},
            {"n_test", 10000},
            {"lhs", false},
            {"seed", 1},
            {"train", train_defaults()},
            {"acceptance",
             {{"min_r2_all", 0.55},
              {"min_r2_high", 0.80},
              {"min_high_count", 6},
              {"max_raae_worst", 0.55},
              {"max_rmae_worst", 3.5},
              {"require_complete", true}}}};
  if (kind == "shanwang-sweep")
    return {{"dims", {100, 150, 200, 250, 300}},
            {"n_train", 10000},
            {"n_test", 10000},
            {"lhs", false},
            {"seed", 1},
            {"train", train_defaults()},
            {"acceptance", {{"max_r2_drop", 0.15}, {"require_complete", true}}}};
  if (kind == "iga-surrogate")
    return {{"n_ctrl_u", 18},
            {"n_ctrl_v", 18},
            {"n_snapshots", 8},
            {"fallback_tol", 1e-3},
            {"force_full", false},
            {"n_train", 10000},
            {"n_test", 10000},
            {"seed", 1},
            {"write_datasets", false},
            {"train", train_defaults()},
            {"acceptance", {{"min_r2", 0.98}, {"max_raae", 0.06}}}};
  if (kind == "iga-optimize")
    return {{"n_ctrl_u", 18},
            {"n_ctrl_v", 18},
            {"n_snapshots", 8},
            {"fallback_tol", 1e-3},
            {"force_full", false},
            {"surrogate_path", ""},
            {"n_train", 10000},
            {"n_test", 10000},
            {"seed", 1},
            {"train", train_defaults()},
            {"pso",
             {{"population", 50},
              {"iterations", 200},
              {"inertia", 0.7},
              {"cognitive", 1.5},
              {"social", 1.5},
              {"clamp_fraction", 0.2}}},
            {"acceptance", {{"max_gap_pct", 2.5}}}};
  fail(Errc::invalid_argument, "unknown experiment kind: " + kind);
}

void merge_into(json& base, const json& over, const std::string& where) {
  require(over.is_object(), Errc::invalid_argument, "config: expected an object at '" + where + "'");
  for (auto it = over.begin(); it != over.end(); ++it) {
    auto slot = base.find(it.key());
    require(slot != base.end(), Errc::invalid_argument,
            "config: unknown key '" + where + it.key() + "'");
    if (slot->is_object() && it->is_object())
      merge_into(*slot, *it, where + it.key() + ".");
    else
      *slot = *it;
  }
}

// ---- small helpers ----

json jnum(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json threshold_of(const json& cfg, const char* key) {
  const json& acc = cfg.at("acceptance");
  auto it = acc.find(key);
  return it == acc.end() ? json() : *it;
}

// value must sit on the given side of the threshold; null threshold = skip.
void add_check(json& checks, const std::string& name, double value, const json& threshold,
               bool upper_bound) {
  if (threshold.is_null()) return;
  const double t = threshold.get<double>();
  const bool pass = std::isfinite(value) && (upper_bound ? value <= t : value >= t);
  checks.push_back({{"name", name},
                    {"value", jnum(value)},
                    {"threshold", t},
                    {"op", upper_bound ? "<=" : ">="},
                    {"pass", pass}});
}

surrogate::CnnSurrogateConfig surrogate_config(const json& t, std::uint64_t seed) {
  surrogate::CnnSurrogateConfig cfg;
  const std::string arch = t.at("arch").get<std::string>();
  if (!arch.empty()) cfg.arch = nn::parse_arch(arch);
  const auto grid = t.at("grid").get<std::vector<int>>();
  if (!grid.empty()) {
    require(grid.size() == 2, Errc::invalid_argument, "config: grid must be [h, w]");
    cfg.grid = std::make_pair(grid[0], grid[1]);
  }
  cfg.train.epochs = t.at("epochs").get<int>();
  cfg.train.batch_size = t.at("batch").get<int>();
  cfg.train.adam.lr = t.at("lr").get<double>();
  cfg.train.patience = t.at("patience").get<int>();
  cfg.train.val_fraction = t.at("val_fraction").get<double>();
  cfg.train.min_delta = t.at("min_delta").get<double>();
  cfg.train.seed = seed;
  cfg.init_seed = seed;
  return cfg;
}

struct FitOutcome {
  metrics::Report rep;
  nn::TrainResult hist;
  surrogate::CnnSurrogate surr;
};

FitOutcome fit_and_score(const doe::Dataset& train, const doe::Dataset& test, const json& tj,
                         std::uint64_t seed) {
  FitOutcome out;
  const surrogate::CnnSurrogateConfig cfg = surrogate_config(tj, seed);
  out.surr = surrogate::CnnSurrogate::fit(cfg, train, &out.hist);
  const std::vector<double> yhat = out.surr.predict_batch(test.X, test.n);
  out.rep = metrics::report(test.y, yhat);
  return out;
}

void write_history_csv(RunDir& rd, const std::string& rel, const nn::TrainResult& h) {
  std::string s = "epoch,train_loss,val_loss\n";
  for (size_t e = 0; e < h.train_loss.size(); ++e)
    s += std::to_string(e + 1) + "," + fmt(h.train_loss[e]) + "," + fmt(h.val_loss[e]) + "\n";
  rd.write_text(rel, s);
}

void write_pso_history_csv(RunDir& rd, const std::string& rel, const pso::PsoResult& r) {
  std::string s = "iteration,best_value\n";
  for (size_t i = 0; i < r.history.size(); ++i)
    s += std::to_string(i) + "," + fmt(r.history[i]) + "\n";
  rd.write_text(rel, s);
}

struct Row {
  std::string tag;       // seed / dimension / function id
  std::string status;    // "ok" or an error message
  metrics::Report rep;
  int best_epoch = 0, epochs_run = 0;
  bool ok() const { return status == "ok"; }
};

json row_json(const Row& r, const std::string& key) {
  json j{{key, r.tag}, {"status", r.status}};
  if (r.ok()) {
    j["raae"] = jnum(r.rep.raae);
    j["rmae"] = jnum(r.rep.rmae);
    j["r2"] = jnum(r.rep.r2);
    j["error_pct"] = jnum(r.rep.error_pct);
    j["best_epoch"] = r.best_epoch;
    j["epochs_run"] = r.epochs_run;
  }
  return j;
}

std::string rows_csv(const std::vector<Row>& rows, const std::string& key) {
  std::string s = key + ",status,raae,rmae,r2,error_pct,best_epoch,epochs_run\n";
  for (const Row& r : rows) {
    s += r.tag + ",\"" + r.status + "\",";
    if (r.ok())
      s += fmt(r.rep.raae) + "," + fmt(r.rep.rmae) + "," + fmt(r.rep.r2) + "," +
           fmt(r.rep.error_pct) + "," + std::to_string(r.best_epoch + 1) + "," +
           std::to_string(r.epochs_run);
    else
      s += ",,,,,";
    s += "\n";
  }
  return s;
}

int count_failures(const std::vector<Row>& rows) {
  int bad = 0;
  for (const Row& r : rows)
    if (!r.ok()) ++bad;
  return bad;
}

// ---- experiment runners ----

json run_bench_train(const std::string& kind, const json& cfg, RunDir& rd) {
  const std::string fn_id = cfg.at("fn").get<std::string>();
  const int d = cfg.at("d").get<int>();
  const int n_train = cfg.at("n_train").get<int>();
  const int n_test = cfg.at("n_test").get<int>();
  const bool lhs = cfg.at("lhs").get<bool>();
  const auto seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
  require(!seeds.empty(), Errc::invalid_argument, "config: need at least one seed");
  const std::string train_csv = cfg.at("train_csv").get<std::string>();
  const std::string test_csv = cfg.at("test_csv").get<std::string>();

  doe::Dataset file_train, file_test;
  const bool from_files = !train_csv.empty();
  if (from_files) {
    require(!test_csv.empty(), Errc::invalid_argument, "config: train_csv without test_csv");
    file_train = doe::read_dataset(train_csv);
    file_test = doe::read_dataset(test_csv);
    rd.add_input("train_csv", train_csv);
    rd.add_input("test_csv", test_csv);
  }

  std::vector<Row> rows;
  for (std::uint64_t seed : seeds) {
    Row row;
    row.tag = std::to_string(seed);
    try {
      doe::Dataset gen_train, gen_test;
      if (!from_files) {
        const bench::BenchmarkFn& fn = bench::find(fn_id);
        gen_train = doe::build_dataset(fn, n_train, d, seed, {}, lhs);
        gen_test = doe::build_dataset(fn, n_test, d, rng::mix(seed), {}, lhs);
      }
      const doe::Dataset& tr = from_files ? file_train : gen_train;
      const doe::Dataset& te = from_files ? file_test : gen_test;
      FitOutcome fit = fit_and_score(tr, te, cfg.at("train"), seed);
      row.status = "ok";
      row.rep = fit.rep;
      row.best_epoch = fit.hist.best_epoch;
      row.epochs_run = fit.hist.epochs_run;
      fit.surr.save(rd.path("model_seed" + row.tag + ".json"));
      rd.note("model_seed" + row.tag + ".json");
      write_history_csv(rd, "history_seed" + row.tag + ".csv", fit.hist);
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }

  json metrics{{"kind", kind}, {"fn", fn_id}, {"d", d}};
  json jrows = json::array();
  std::vector<double> raaes, rmaes, r2s, errs;
  for (const Row& r : rows) {
    jrows.push_back(row_json(r, "seed"));
    if (r.ok()) {
      raaes.push_back(r.rep.raae);
      rmaes.push_back(r.rep.rmae);
      r2s.push_back(r.rep.r2);
      errs.push_back(r.rep.error_pct);
    }
  }
  metrics["rows"] = jrows;
  json checks = json::array();
  if (!errs.empty()) {
    metrics["median"] = {{"raae", jnum(median(raaes))},
                         {"rmae", jnum(median(rmaes))},
                         {"r2", jnum(median(r2s))},
                         {"error_pct", jnum(median(errs))}};
    add_check(checks, "median_error_pct", median(errs), threshold_of(cfg, "max_error_pct"), true);
    add_check(checks, "median_r2", median(r2s), threshold_of(cfg, "min_r2"), false);
  }
  if (!threshold_of(cfg, "require_complete").is_null() &&
      threshold_of(cfg, "require_complete").get<bool>())
    checks.push_back({{"name", "all_complete"},
                      {"value", count_failures(rows)},
                      {"threshold", 0},
                      {"op", "<="},
                      {"pass", count_failures(rows) == 0}});
  metrics["checks"] = checks;

  std::string csv = rows_csv(rows, "seed");
  if (!errs.empty())
    csv += "median,," + fmt(median(raaes)) + "," + fmt(median(rmaes)) + "," + fmt(median(r2s)) +
           "," + fmt(median(errs)) + ",,\n";
  rd.write_text("metrics.csv", csv);
  return metrics;
}

json run_dim_sweep(const std::string& kind, const json& cfg, RunDir& rd) {
  const bool shanwang = kind == "shanwang-sweep";
  const std::string fn_id = shanwang ? "shan_wang" : "griewank";
  const auto dims = cfg.at("dims").get<std::vector<int>>();
  require(!dims.empty(), Errc::invalid_argument, "config: need at least one dimension");
  const int n_train = cfg.at("n_train").get<int>();
  const int n_test = cfg.at("n_test").get<int>();
  const bool lhs = cfg.at("lhs").get<bool>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  const bench::BenchmarkFn& fn = bench::find(fn_id);

  std::vector<Row> rows;
  for (int d : dims) {
    Row row;
    row.tag = std::to_string(d);
    try {
      const doe::Dataset tr = doe::build_dataset(fn, n_train, d, seed, {}, lhs);
      const doe::Dataset te = doe::build_dataset(fn, n_test, d, rng::mix(seed), {}, lhs);
      FitOutcome fit = fit_and_score(tr, te, cfg.at("train"), seed);
      row.status = "ok";
      row.rep = fit.rep;
      row.best_epoch = fit.hist.best_epoch;
      row.epochs_run = fit.hist.epochs_run;
      fit.surr.save(rd.path("model_d" + row.tag + ".json"));
      rd.note("model_d" + row.tag + ".json");
      write_history_csv(rd, "history_d" + row.tag + ".csv", fit.hist);
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }

  json metrics{{"kind", kind}, {"fn", fn_id}};
  json jrows = json::array();
  for (const Row& r : rows) jrows.push_back(row_json(r, "d"));
  metrics["rows"] = jrows;

  json checks = json::array();
  double worst_err = 0.0, best_err = 0.0;
  bool have = false;
  for (const Row& r : rows)
    if (r.ok()) {
      worst_err = have ? std::max(worst_err, r.rep.error_pct) : r.rep.error_pct;
      best_err = have ? std::min(best_err, r.rep.error_pct) : r.rep.error_pct;
      have = true;
    }
  if (have && !shanwang) {
    metrics["summary"] = {{"max_error_pct", jnum(worst_err)},
                          {"spread_pp", jnum(worst_err - best_err)}};
    add_check(checks, "max_error_pct", worst_err, threshold_of(cfg, "max_error_pct"), true);
    add_check(checks, "spread_pp", worst_err - best_err, threshold_of(cfg, "max_spread_pp"), true);
  }
  if (shanwang && rows.front().ok() && rows.back().ok()) {
    const double drop = rows.back().rep.r2 - rows.front().rep.r2;
    metrics["summary"] = {{"r2_first", jnum(rows.front().rep.r2)},
                          {"r2_last", jnum(rows.back().rep.r2)},
                          {"r2_drop", jnum(drop)}};
    add_check(checks, "r2_drop", drop, threshold_of(cfg, "max_r2_drop"), true);
  }
  if (!threshold_of(cfg, "require_complete").is_null() &&
      threshold_of(cfg, "require_complete").get<bool>())
    checks.push_back({{"name", "all_complete"},
                      {"value", count_failures(rows)},
                      {"threshold", 0},
                      {"op", "<="},
                      {"pass", count_failures(rows) == 0}});
  metrics["checks"] = checks;
  rd.write_text("metrics.csv", rows_csv(rows, "d"));
  return metrics;
}

json run_bench_suite(const json& cfg, RunDir& rd) {
  const int d = cfg.at("d").get<int>();
  const auto fns = cfg.at("fns").get<std::vector<std::string>>();
  require(!fns.empty(), Errc::invalid_argument, "config: need at least one function");
  const int n_train = cfg.at("n_train").get<int>();
  const int n_test = cfg.at("n_test").get<int>();
  const bool lhs = cfg.at("lhs").get<bool>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  std::vector<Row> rows;
  for (const std::string& fn_id : fns) {
    Row row;
    row.tag = fn_id;
    try {
      const bench::BenchmarkFn& fn = bench::find(fn_id);
      const doe::Dataset tr = doe::build_dataset(fn, n_train, d, seed, {}, lhs);
      const doe::Dataset te = doe::build_dataset(fn, n_test, d, rng::mix(seed), {}, lhs);
      FitOutcome fit = fit_and_score(tr, te, cfg.at("train"), seed);
      row.status = "ok";
      row.rep = fit.rep;
      row.best_epoch = fit.hist.best_epoch;
      row.epochs_run = fit.hist.epochs_run;
      fit.surr.save(rd.path("model_" + fn_id + ".json"));
      rd.note("model_" + fn_id + ".json");
      write_history_csv(rd, "history_" + fn_id + ".csv", fit.hist);
    } catch (const Error& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }

  json metrics{{"kind", "bench-suite"}, {"d", d}};
  json jrows = json::array();
  for (const Row& r : rows) jrows.push_back(row_json(r, "fn"));
  metrics["rows"] = jrows;

  json checks = json::array();
  double min_r2 = 0.0, worst_raae = 0.0, worst_rmae = 0.0;
  bool have = false;
  int high = 0;
  const json high_thr = threshold_of(cfg, "min_r2_high");
  for (const Row& r : rows)
    if (r.ok()) {
      min_r2 = have ? std::min(min_r2, r.rep.r2) : r.rep.r2;
      worst_raae = have ? std::max(worst_raae, r.rep.raae) : r.rep.raae;
      worst_rmae = have ? std::max(worst_rmae, r.rep.rmae) : r.rep.rmae;
      if (!high_thr.is_null() && r.rep.r2 >= high_thr.get<double>()) ++high;
      have = true;
    }
  if (have) {
    metrics["summary"] = {{"min_r2", jnum(min_r2)},
                          {"worst_raae", jnum(worst_raae)},
                          {"worst_rmae", jnum(worst_rmae)},
                          {"high_r2_count", high}};
    add_check(checks, "min_r2", min_r2, threshold_of(cfg, "min_r2_all"), false);
    add_check(checks, "high_r2_count", high, threshold_of(cfg, "min_high_count"), false);
    add_check(checks, "worst_raae", worst_raae, threshold_of(cfg, "max_raae_worst"), true);
    add_check(checks, "worst_rmae", worst_rmae, threshold_of(cfg, "max_rmae_worst"), true);
  }
  if (!threshold_of(cfg, "require_complete").is_null() &&
      threshold_of(cfg, "require_complete").get<bool>())
    checks.push_back({{"name", "all_complete"},
                      {"value", count_failures(rows)},
                      {"threshold", 0},
                      {"op", "<="},
                      {"pass", count_failures(rows) == 0}});
  metrics["checks"] = checks;
  rd.write_text("metrics.csv", rows_csv(rows, "fn"));
  return metrics;
}

struct IgaSetup {
  iga::IgaModel model;
  iga::StressResponse response;
};

IgaSetup iga_setup(const json& cfg, RunDir& rd) {
  const int nu = cfg.at("n_ctrl_u").get<int>();
  const int nv = cfg.at("n_ctrl_v").get<int>();
  const int n_snapshots = cfg.at("n_snapshots").get<int>();
  const double tol = cfg.at("fallback_tol").get<double>();
  const bool force_full = cfg.at("force_full").get<bool>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  iga::IgaModel model = iga::build_tube_analog(nu, nv);
  iga::save_model(model, rd.path("iga_model.json"));
  rd.note("iga_model.json");
  iga::StressResponse response(model, n_snapshots, seed, tol, force_full);
  return {std::move(model), std::move(response)};
}

json response_json(const iga::StressResponse& r) {
  return {{"geometry_gain", r.geometry_gain()},
          {"basis_size", r.basis_size()},
          {"evaluations", r.evals()},
          {"fallbacks", r.fallbacks()}};
}

json run_iga_surrogate(const json& cfg, RunDir& rd) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  IgaSetup setup = iga_setup(cfg, rd);
  auto [train_ds, test_ds] = iga::generate_iga_dataset(
      setup.response, cfg.at("n_train").get<int>(), cfg.at("n_test").get<int>(), seed);
  if (cfg.at("write_datasets").get<bool>()) {
    doe::write_dataset(train_ds, rd.path("train.csv"));
    rd.note("train.csv");
    rd.note("train.csv.meta.json");
    doe::write_dataset(test_ds, rd.path("test.csv"));
    rd.note("test.csv");
    rd.note("test.csv.meta.json");
  }
  FitOutcome fit = fit_and_score(train_ds, test_ds, cfg.at("train"), seed);
  fit.surr.save(rd.path("surrogate_model.json"));
  rd.note("surrogate_model.json");
  write_history_csv(rd, "history.csv", fit.hist);

  json metrics{{"kind", "iga-surrogate"},
               {"response", response_json(setup.response)},
               {"metrics",
                {{"raae", jnum(fit.rep.raae)},
                 {"rmae", jnum(fit.rep.rmae)},
                 {"r2", jnum(fit.rep.r2)},
                 {"error_pct", jnum(fit.rep.error_pct)}}},
               {"train", {{"best_epoch", fit.hist.best_epoch + 1}, {"epochs_run", fit.hist.epochs_run}}}};
  json checks = json::array();
  add_check(checks, "r2", fit.rep.r2, threshold_of(cfg, "min_r2"), false);
  add_check(checks, "raae", fit.rep.raae, threshold_of(cfg, "max_raae"), true);
  metrics["checks"] = checks;

  std::string csv = "raae,rmae,r2,error_pct\n" + fmt(fit.rep.raae) + "," + fmt(fit.rep.rmae) +
                    "," + fmt(fit.rep.r2) + "," + fmt(fit.rep.error_pct) + "\n";
  rd.write_text("metrics.csv", csv);
  return metrics;
}

json run_iga_optimize(const json& cfg, RunDir& rd) {
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  IgaSetup setup = iga_setup(cfg, rd);

  surrogate::CnnSurrogate surr;
  json surr_info;
  const std::string surrogate_path = cfg.at("surrogate_path").get<std::string>();
  if (!surrogate_path.empty()) {
    surr = surrogate::CnnSurrogate::load(surrogate_path);
    rd.add_input("surrogate", surrogate_path);
    surr_info = {{"source", surrogate_path}};
  } else {
    auto [train_ds, test_ds] = iga::generate_iga_dataset(
        setup.response, cfg.at("n_train").get<int>(), cfg.at("n_test").get<int>(), seed);
    FitOutcome fit = fit_and_score(train_ds, test_ds, cfg.at("train"), seed);
    surr = std::move(fit.surr);
    surr.save(rd.path("surrogate_model.json"));
    rd.note("surrogate_model.json");
    write_history_csv(rd, "history_train.csv", fit.hist);
    surr_info = {{"source", "trained"},
                 {"test_metrics",
                  {{"raae", jnum(fit.rep.raae)},
                   {"rmae", jnum(fit.rep.rmae)},
                   {"r2", jnum(fit.rep.r2)},
                   {"error_pct", jnum(fit.rep.error_pct)}}}};
  }
  require(surr.dim() == setup.model.patch.n_cp(), Errc::shape_mismatch,
          "surrogate dimension does not match the control net");

  pso::PsoConfig pcfg;
  const json& pj = cfg.at("pso");
  pcfg.population = pj.at("population").get<int>();
  pcfg.iterations = pj.at("iterations").get<int>();
  pcfg.inertia = pj.at("inertia").get<double>();
  pcfg.cognitive = pj.at("cognitive").get<double>();
  pcfg.social = pj.at("social").get<double>();
  pcfg.clamp_fraction = pj.at("clamp_fraction").get<double>();
  pcfg.seed = seed;
  const auto bounds = setup.response.design_bounds();

  const pso::PsoResult on_surr =
      pso::pso_minimize([&](std::span<const double> x) { return surr.predict(x); }, bounds, pcfg);
  const pso::PsoResult on_iga = pso::pso_minimize(
      [&](std::span<const double> x) { return setup.response(x); }, bounds, pcfg);
  const double cross = setup.response(on_surr.best_point);
  const double gap_pct = std::fabs(cross - on_iga.best_value) / on_iga.best_value * 100.0;

  write_pso_history_csv(rd, "history_surrogate.csv", on_surr);
  write_pso_history_csv(rd, "history_direct.csv", on_iga);
  rd.write_text("best_design_surrogate.json", json(on_surr.best_point).dump() + "\n");
  rd.write_text("best_design_direct.json", json(on_iga.best_point).dump() + "\n");

  json metrics{{"kind", "iga-optimize"},
               {"response", response_json(setup.response)},
               {"surrogate", surr_info},
               {"optimization",
                {{"population", pcfg.population},
                 {"iterations", pcfg.iterations},
                 {"evaluations_each", on_iga.evaluations},
                 {"surrogate_best_pred", jnum(on_surr.best_value)},
                 {"surrogate_best_iga", jnum(cross)},
                 {"direct_best", jnum(on_iga.best_value)},
                 {"gap_pct", jnum(gap_pct)}}}};
  json checks = json::array();
  add_check(checks, "gap_pct", gap_pct, threshold_of(cfg, "max_gap_pct"), true);
  metrics["checks"] = checks;

  std::string csv = "surrogate_best_pred,surrogate_best_iga,direct_best,gap_pct\n" +
                    fmt(on_surr.best_value) + "," + fmt(cross) + "," + fmt(on_iga.best_value) +
                    "," + fmt(gap_pct) + "\n";
  rd.write_text("metrics.csv", csv);
  return metrics;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() { return kKinds; }

json default_config(const std::string& kind) { return defaults_for(kind); }

json run(const std::string& kind, const json& overrides, const std::string& out_dir) {
  json cfg = defaults_for(kind);
  if (!overrides.is_null()) merge_into(cfg, overrides, "");
  RunDir rd(out_dir);
  json metrics;
  if (kind == "bench-train" || kind == "asymmetric")
    metrics = run_bench_train(kind, cfg, rd);
  else if (kind == "griewank-sweep" || kind == "shanwang-sweep")
    metrics = run_dim_sweep(kind, cfg, rd);
  else if (kind == "bench-suite")
    metrics = run_bench_suite(cfg, rd);
  else if (kind == "iga-surrogate")
    metrics = run_iga_surrogate(cfg, rd);
  else if (kind == "iga-optimize")
    metrics = run_iga_optimize(cfg, rd);
  else
    fail(Errc::invalid_argument, "unknown experiment kind: " + kind);
  rd.write_text("metrics.json", metrics.dump(2) + "\n");
  rd.finish(kind, cfg);
  return metrics;
}

bool all_checks_pass(const json& metrics) {
  auto it = metrics.find("checks");
  if (it == metrics.end()) return true;
  for (const json& c : *it)
    if (!c.at("pass").get<bool>()) return false;
  return true;
}

ReplayResult replay(const std::string& run_dir, const std::string& scratch_dir) {
  const std::string manifest_path = (fs::path(run_dir) / "manifest.json").string();
  std::ifstream f(manifest_path, std::ios::binary);
  require(f.good(), Errc::io_error, "cannot open: " + manifest_path);
  json manifest;
  try {
    f >> manifest;
  } catch (const json::exception& e) {
    fail(Errc::io_error, std::string("manifest: bad JSON: ") + e.what());
  }
  const std::string kind = manifest.at("experiment").get<std::string>();
  run(kind, manifest.at("config"), scratch_dir);

  ReplayResult out;
  const std::string replay_manifest = (fs::path(scratch_dir) / "manifest.json").string();
  if (sha256_file(manifest_path) == sha256_file(replay_manifest)) {
    out.identical = true;
    return out;
  }
  std::ifstream g(replay_manifest, std::ios::binary);
  json replayed;
  g >> replayed;
  for (auto it = manifest.at("artifacts").begin(); it != manifest.at("artifacts").end(); ++it) {
    const json& arts = replayed.at("artifacts");
    if (!arts.contains(it.key())) {
      out.detail = "artifact missing on replay: " + it.key();
      return out;
    }
    if (arts.at(it.key()) != it.value()) {
      out.detail = "artifact differs on replay: " + it.key();
      return out;
    }
  }
  out.detail = "manifests differ";
  return out;
}

}  // namespace hds::exp
