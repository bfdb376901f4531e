// Exercises the shared library strictly through its C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hdsurr.h"

namespace {

// tiny JSON probes, enough for flat numeric/string lookups in known documents
double jnum(const std::string& js, const std::string& key) {
  const auto pos = js.find("\"" + key + "\"");
  REQUIRE(pos != std::string::npos);
  const auto colon = js.find(':', pos);
  return std::stod(js.substr(colon + 1));
}

std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  hds_string_free(s);
  return out;
}

struct Temp {
  std::string path;
  explicit Temp(const std::string& name) : path("/tmp/hdsurr_capi_" + name) {}
  ~Temp() {
    std::remove(path.c_str());
    std::remove((path + ".meta.json").c_str());
  }
};

int sphere_cb(void*, const double* x, int d, double* out) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += x[i] * x[i];
  *out = s;
  return 0;
}

int abort_cb(void* user, const double*, int, double*) {
  int* calls = static_cast<int*>(user);
  return ++*calls >= 3 ? 1 : 0;
}

}  // namespace

TEST_CASE("version and error slot defaults") {
  REQUIRE(hds_version() != nullptr);
  CHECK(std::strlen(hds_version()) > 0);
  hds_string_free(nullptr);  // must be a no-op
  hds_surrogate_free(nullptr);
}

TEST_CASE("bench list and eval") {
  const std::string list = take(hds_bench_list_json());
  CHECK(list.find("\"griewank\"") != std::string::npos);
  CHECK(list.find("\"shan_wang\"") != std::string::npos);
  CHECK(list.find("min_d") != std::string::npos);

  std::vector<double> ones(5, 1.0);
  double value = -1.0;
  REQUIRE(hds_bench_eval("hgbat", ones.data(), 5, &value) == HDS_OK);
  CHECK(value == doctest::Approx(2.0).epsilon(1e-12));

  CHECK(hds_bench_eval("nope", ones.data(), 5, &value) == HDS_E_INVALID_ARGUMENT);
  CHECK(hds_last_status() == HDS_E_INVALID_ARGUMENT);
  CHECK(std::strlen(hds_last_error()) > 0);
  CHECK(hds_bench_eval("rosenbrock", ones.data(), 1, &value) == HDS_E_INVALID_ARGUMENT);
  CHECK(hds_bench_eval(nullptr, ones.data(), 5, &value) == HDS_E_INVALID_ARGUMENT);

  // a success clears the slot
  REQUIRE(hds_bench_eval("griewank", ones.data(), 5, &value) == HDS_OK);
  CHECK(hds_last_status() == HDS_OK);
}

TEST_CASE("dataset generation, training, prediction, scoring") {
  Temp train_csv("train.csv"), test_csv("test.csv"), model("model.json"), preds("pred.csv");
  REQUIRE(hds_dataset_generate("sum_squares", 150, 6, 11, 0, train_csv.path.c_str()) == HDS_OK);
  REQUIRE(hds_dataset_generate("sum_squares", 60, 6, 12, 0, test_csv.path.c_str()) == HDS_OK);
  {
    std::ifstream f(train_csv.path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "x1,x2,x3,x4,x5,x6,y");
  }

  const char* cfg = R"({"arch":"flatten,dense:12,relu,dense:1","epochs":150,
                        "batch":25,"lr":0.01,"patience":0,"val_fraction":0.2})";
  hds_surrogate* s = hds_surrogate_train_csv(train_csv.path.c_str(), cfg, 5);
  REQUIRE(s != nullptr);
  CHECK(hds_surrogate_dim(s) == 6);

  std::vector<double> x(6, 1.0);
  double y1 = 0.0;
  REQUIRE(hds_surrogate_predict(s, x.data(), 6, &y1) == HDS_OK);
  CHECK(std::isfinite(y1));
  CHECK(hds_surrogate_predict(s, x.data(), 2, &y1) != HDS_OK);

  std::vector<double> X(5 * 6, 0.5);
  std::vector<double> out(5, 0.0);
  REQUIRE(hds_surrogate_predict_batch(s, X.data(), 5, 6, out.data()) == HDS_OK);
  for (int i = 1; i < 5; ++i) CHECK(out[i] == out[0]);  // identical rows, identical answers

  REQUIRE(hds_surrogate_save(s, model.path.c_str()) == HDS_OK);
  hds_surrogate* loaded = hds_surrogate_load(model.path.c_str());
  REQUIRE(loaded != nullptr);
  double y2 = 0.0;
  REQUIRE(hds_surrogate_predict(loaded, x.data(), 6, &y2) == HDS_OK);
  CHECK(y2 == y1);
  hds_surrogate_free(loaded);
  hds_surrogate_free(s);

  const std::string rep = take(hds_eval_csv(model.path.c_str(), test_csv.path.c_str(),
                                            preds.path.c_str()));
  CHECK(jnum(rep, "n") == 60.0);
  CHECK(jnum(rep, "r2") > 0.5);  // an easy quadratic with a real training budget
  std::ifstream pf(preds.path);
  REQUIRE(pf.good());
  std::string line;
  std::getline(pf, line);
  CHECK(line == "y,prediction");

  CHECK(hds_surrogate_load("/tmp/hdsurr_missing.json") == nullptr);
  CHECK(hds_last_status() == HDS_E_IO);
  CHECK(hds_eval_csv(model.path.c_str(), "/tmp/hdsurr_missing.csv", nullptr) == nullptr);
}

TEST_CASE("experiment surface over the C ABI") {
  const std::string kinds = take(hds_experiment_kinds_json());
  CHECK(kinds.find("bench-train") != std::string::npos);
  CHECK(kinds.find("iga-optimize") != std::string::npos);

  const std::string cfg = take(hds_experiment_default_config("griewank-sweep"));
  CHECK(cfg.find("\"dims\"") != std::string::npos);
  CHECK(hds_experiment_default_config("bogus") == nullptr);

  const char* over = R"({"fn":"levy","d":4,"n_train":50,"n_test":25,"seeds":[1],
      "train":{"arch":"flatten,dense:6,relu,dense:1","epochs":3,"batch":10,"lr":0.01},
      "acceptance":{"max_error_pct":null}})";
  const std::string out_dir = "/tmp/hdsurr_capi_run";
  const std::string scratch = "/tmp/hdsurr_capi_scratch";
  std::filesystem::remove_all(out_dir);
  std::filesystem::remove_all(scratch);
  const std::string metrics = take(hds_experiment_run("bench-train", over, out_dir.c_str()));
  CHECK(metrics.find("\"rows\"") != std::string::npos);
  CHECK(hds_metrics_checks_pass(metrics.c_str()) == 1);
  CHECK(hds_metrics_checks_pass("{ not json") == -1);

  const std::string rr = take(hds_experiment_replay(out_dir.c_str(), scratch.c_str()));
  CHECK(rr.find("\"identical\":true") != std::string::npos);
  std::filesystem::remove_all(out_dir);
  std::filesystem::remove_all(scratch);
}

TEST_CASE("iga surface over the C ABI") {
  Temp model("tube.json"), stress("stress.csv"), train_csv("iga_train.csv"),
      test_csv("iga_test.csv");
  REQUIRE(hds_iga_build_tube(5, 5, model.path.c_str()) == HDS_OK);
  const std::string solved = take(hds_iga_solve(model.path.c_str(), stress.path.c_str(), nullptr));
  CHECK(jnum(solved, "n_dofs") == 50.0);
  CHECK(jnum(solved, "n_quad") == 9.0 * 9.0);
  CHECK(jnum(solved, "max_von_mises") > 0.0);
  std::ifstream sf(stress.path);
  CHECK(sf.good());

  const std::string stats = take(hds_iga_dataset(model.path.c_str(), 20, 10, 3, 7,
                                                 train_csv.path.c_str(), test_csv.path.c_str()));
  CHECK(jnum(stats, "geometry_gain") > 0.0);
  CHECK(jnum(stats, "evaluations") == 30.0);
  std::ifstream tf(train_csv.path);
  std::string header;
  std::getline(tf, header);
  CHECK(header.substr(0, 6) == "x1,x2,");

  CHECK(hds_iga_build_tube(1, 5, model.path.c_str()) != HDS_OK);
  CHECK(hds_iga_solve("/tmp/hdsurr_missing_tube.json", nullptr, nullptr) == nullptr);
}

TEST_CASE("pso over the C ABI") {
  const double lo[2] = {-3.0, -3.0}, hi[2] = {3.0, 3.0};
  double best_x[2] = {9.0, 9.0};
  double best_v = -1.0;
  const char* cfg = R"({"population":25,"iterations":120,"seed":3})";
  REQUIRE(hds_pso_minimize(sphere_cb, nullptr, 2, lo, hi, cfg, best_x, &best_v) == HDS_OK);
  CHECK(best_v <= 1e-4);
  CHECK(std::fabs(best_x[0]) <= 0.1);
  CHECK(std::fabs(best_x[1]) <= 0.1);

  // an aborting objective propagates as a numeric error
  int calls = 0;
  CHECK(hds_pso_minimize(abort_cb, &calls, 2, lo, hi, nullptr, best_x, &best_v) == HDS_E_NUMERIC);
  CHECK(calls == 3);
  CHECK(std::strlen(hds_last_error()) > 0);

  CHECK(hds_pso_minimize(sphere_cb, nullptr, 0, lo, hi, nullptr, best_x, &best_v) ==
        HDS_E_INVALID_ARGUMENT);
  const double bad_lo[2] = {4.0, 4.0};
  CHECK(hds_pso_minimize(sphere_cb, nullptr, 2, bad_lo, hi, nullptr, best_x, &best_v) ==
        HDS_E_INVALID_ARGUMENT);
}
