#include "hdsurr.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "bench.hpp"
#include "doe.hpp"
#include "exp.hpp"
#include "iga.hpp"
#include "metrics.hpp"
#include "pso.hpp"
#include "surrogate.hpp"

using nlohmann::json;

struct hds_surrogate {
  hds::surrogate::CnnSurrogate model;
};

namespace {

thread_local int g_status = HDS_OK;
thread_local std::string g_message;

void clear_error() {
  g_status = HDS_OK;
  g_message.clear();
}

int record(const hds::Error& e) {
  g_status = static_cast<int>(e.code());
  g_message = e.what();
  return g_status;
}

int record_unknown(const char* what) {
  g_status = HDS_E_UNKNOWN;
  g_message = what;
  return g_status;
}

// Runs f inside the C boundary; f returns a status code.
template <typename F>
int guarded(F&& f) {
  clear_error();
  try {
    return f();
  } catch (const hds::Error& e) {
    return record(e);
  } catch (const std::exception& e) {
    return record_unknown(e.what());
  } catch (...) {
    return record_unknown("unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) {
    record_unknown("out of memory");
    return nullptr;
  }
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs f inside the C boundary; f returns a std::string to hand out.
template <typename F>
char* guarded_str(F&& f) {
  clear_error();
  try {
    return dup_string(f());
  } catch (const hds::Error& e) {
    record(e);
    return nullptr;
  } catch (const std::exception& e) {
    record_unknown(e.what());
    return nullptr;
  } catch (...) {
    record_unknown("unknown error");
    return nullptr;
  }
}

void require_c(bool cond, const std::string& msg) {
  hds::require(cond, hds::Errc::invalid_argument, msg);
}

json parse_maybe(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    hds::fail(hds::Errc::invalid_argument, std::string(what) + ": bad JSON: " + e.what());
  }
}

hds::nn::TrainConfig train_config_from_json(const json& t, std::uint64_t seed) {
  hds::nn::TrainConfig cfg;
  cfg.seed = seed;
  if (t.is_null()) return cfg;
  if (t.contains("epochs")) cfg.epochs = t.at("epochs").get<int>();
  if (t.contains("batch")) cfg.batch_size = t.at("batch").get<int>();
  if (t.contains("lr")) cfg.adam.lr = t.at("lr").get<double>();
  if (t.contains("patience")) cfg.patience = t.at("patience").get<int>();
  if (t.contains("val_fraction")) cfg.val_fraction = t.at("val_fraction").get<double>();
  if (t.contains("min_delta")) cfg.min_delta = t.at("min_delta").get<double>();
  return cfg;
}

}  // namespace

extern "C" {

const char* hds_version(void) { return "1.0.0"; }

int hds_last_status(void) { return g_status; }

const char* hds_last_error(void) { return g_message.c_str(); }

void hds_string_free(char* s) { std::free(s); }

/* ---- benchmarks ---- */

char* hds_bench_list_json(void) {
  return guarded_str([] {
    json out = json::array();
    for (const auto& fn : hds::bench::registry())
      out.push_back({{"id", fn.id}, {"lo", fn.lo}, {"hi", fn.hi}, {"min_d", fn.min_d}});
    return out.dump();
  });
}

int hds_bench_eval(const char* fn_id, const double* x, int d, double* out_value) {
  return guarded([&] {
    require_c(fn_id != nullptr && x != nullptr && out_value != nullptr && d >= 1,
              "bench_eval: null argument");
    const auto& fn = hds::bench::find(fn_id);
    *out_value = hds::bench::evaluate(fn, {x, static_cast<size_t>(d)});
    return HDS_OK;
  });
}

/* ---- datasets ---- */

int hds_dataset_generate(const char* fn_id, int n, int d, uint64_t seed, int lhs,
                         const char* csv_path) {
  return guarded([&] {
    require_c(fn_id != nullptr && csv_path != nullptr, "dataset_generate: null argument");
    const auto& fn = hds::bench::find(fn_id);
    const hds::doe::Dataset ds = hds::doe::build_dataset(fn, n, d, seed, {}, lhs != 0);
    hds::doe::write_dataset(ds, csv_path);
    return HDS_OK;
  });
}

/* ---- surrogates ---- */

hds_surrogate* hds_surrogate_train_csv(const char* train_csv, const char* train_json_or_null,
                                       uint64_t seed) {
  clear_error();
  try {
    require_c(train_csv != nullptr, "surrogate_train: null dataset path");
    const hds::doe::Dataset ds = hds::doe::read_dataset(train_csv);
    const json t = parse_maybe(train_json_or_null, "train config");
    hds::surrogate::CnnSurrogateConfig cfg;
    cfg.train = train_config_from_json(t, seed);
    cfg.init_seed = seed;
    if (!t.is_null()) {
      if (t.contains("arch") && !t.at("arch").get<std::string>().empty())
        cfg.arch = hds::nn::parse_arch(t.at("arch").get<std::string>());
      if (t.contains("grid") && !t.at("grid").empty()) {
        const auto grid = t.at("grid").get<std::vector<int>>();
        require_c(grid.size() == 2, "train config: grid must be [h, w]");
        cfg.grid = std::make_pair(grid[0], grid[1]);
      }
    }
    auto* handle = new hds_surrogate{hds::surrogate::CnnSurrogate::fit(cfg, ds)};
    return handle;
  } catch (const hds::Error& e) {
    record(e);
  } catch (const std::exception& e) {
    record_unknown(e.what());
  }
  return nullptr;
}

hds_surrogate* hds_surrogate_load(const char* path) {
  clear_error();
  try {
    require_c(path != nullptr, "surrogate_load: null path");
    return new hds_surrogate{hds::surrogate::CnnSurrogate::load(path)};
  } catch (const hds::Error& e) {
    record(e);
  } catch (const std::exception& e) {
    record_unknown(e.what());
  }
  return nullptr;
}

int hds_surrogate_save(const hds_surrogate* s, const char* path) {
  return guarded([&] {
    require_c(s != nullptr && path != nullptr, "surrogate_save: null argument");
    s->model.save(path);
    return HDS_OK;
  });
}

int hds_surrogate_dim(const hds_surrogate* s) {
  if (s == nullptr) {
    clear_error();
    record_unknown("surrogate_dim: null handle");
    return -1;
  }
  return s->model.dim();
}

int hds_surrogate_predict(const hds_surrogate* s, const double* x, int d, double* out_value) {
  return guarded([&] {
    require_c(s != nullptr && x != nullptr && out_value != nullptr, "predict: null argument");
    *out_value = s->model.predict({x, static_cast<size_t>(d)});
    return HDS_OK;
  });
}

int hds_surrogate_predict_batch(const hds_surrogate* s, const double* X, int n, int d,
                                double* out_values) {
  return guarded([&] {
    require_c(s != nullptr && X != nullptr && out_values != nullptr, "predict: null argument");
    require_c(n >= 1 && d == s->model.dim(), "predict: shape mismatch");
    const std::vector<double> y =
        s->model.predict_batch({X, static_cast<size_t>(n) * d}, n);
    std::memcpy(out_values, y.data(), sizeof(double) * y.size());
    return HDS_OK;
  });
}

void hds_surrogate_free(hds_surrogate* s) { delete s; }

char* hds_eval_csv(const char* model_path, const char* data_csv,
                   const char* predictions_csv_or_null) {
  return guarded_str([&] {
    require_c(model_path != nullptr && data_csv != nullptr, "eval: null argument");
    const auto model = hds::surrogate::CnnSurrogate::load(model_path);
    const hds::doe::Dataset ds = hds::doe::read_dataset(data_csv);
    const std::vector<double> yhat = model.predict_batch(ds.X, ds.n);
    const hds::metrics::Report rep = hds::metrics::report(ds.y, yhat);
    if (predictions_csv_or_null != nullptr && *predictions_csv_or_null != '\0') {
      std::ofstream f(predictions_csv_or_null);
      hds::require(f.good(), hds::Errc::io_error,
                   std::string("cannot open for writing: ") + predictions_csv_or_null);
      f << "y,prediction\n";
      char buf[80];
      for (int i = 0; i < ds.n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ds.y[i], yhat[i]);
        f << buf;
      }
    }
    return hds::metrics::to_json(rep);
  });
}

/* ---- experiments ---- */

char* hds_experiment_kinds_json(void) {
  return guarded_str([] { return json(hds::exp::experiment_kinds()).dump(); });
}

char* hds_experiment_default_config(const char* kind) {
  return guarded_str([&] {
    require_c(kind != nullptr, "default_config: null kind");
    return hds::exp::default_config(kind).dump(2);
  });
}

char* hds_experiment_run(const char* kind, const char* config_json_or_null, const char* out_dir) {
  return guarded_str([&] {
    require_c(kind != nullptr && out_dir != nullptr, "experiment_run: null argument");
    const json overrides = parse_maybe(config_json_or_null, "experiment config");
    return hds::exp::run(kind, overrides, out_dir).dump(2);
  });
}

char* hds_experiment_replay(const char* run_dir, const char* scratch_dir) {
  return guarded_str([&] {
    require_c(run_dir != nullptr && scratch_dir != nullptr, "replay: null argument");
    const hds::exp::ReplayResult r = hds::exp::replay(run_dir, scratch_dir);
    return json{{"identical", r.identical}, {"detail", r.detail}}.dump();
  });
}

int hds_metrics_checks_pass(const char* metrics_json) {
  clear_error();
  try {
    require_c(metrics_json != nullptr, "checks_pass: null metrics");
    return hds::exp::all_checks_pass(json::parse(metrics_json)) ? 1 : 0;
  } catch (const json::exception& e) {
    record_unknown(e.what());
  } catch (const hds::Error& e) {
    record(e);
  } catch (const std::exception& e) {
    record_unknown(e.what());
  }
  return -1;
}

/* ---- iga ---- */

int hds_iga_build_tube(int n_ctrl_u, int n_ctrl_v, const char* model_path) {
  return guarded([&] {
    require_c(model_path != nullptr, "iga_build: null path");
    hds::iga::save_model(hds::iga::build_tube_analog(n_ctrl_u, n_ctrl_v), model_path);
    return HDS_OK;
  });
}

char* hds_iga_solve(const char* model_path, const char* stress_csv_or_null,
                    const char* displacement_csv_or_null) {
  return guarded_str([&] {
    require_c(model_path != nullptr, "iga_solve: null path");
    const hds::iga::IgaModel model = hds::iga::load_model(model_path);
    const std::vector<double> d = hds::iga::solve_full(model);
    const std::vector<hds::iga::QuadStress> field = hds::iga::stress_field(model, d);
    double vm = 0.0;
    for (const auto& s : field) vm = std::max(vm, s.vm);
    if (stress_csv_or_null != nullptr && *stress_csv_or_null != '\0')
      hds::iga::write_stress_csv(field, stress_csv_or_null);
    if (displacement_csv_or_null != nullptr && *displacement_csv_or_null != '\0') {
      std::ofstream f(displacement_csv_or_null);
      hds::require(f.good(), hds::Errc::io_error,
                   std::string("cannot open for writing: ") + displacement_csv_or_null);
      f << "dof,value\n";
      char buf[64];
      for (size_t k = 0; k < d.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, d[k]);
        f << buf;
      }
    }
    return json{{"max_von_mises", vm},
                {"n_dofs", model.n_dofs()},
                {"n_quad", field.size()}}
        .dump();
  });
}

char* hds_iga_dataset(const char* model_path, int n_train, int n_test, int n_snapshots,
                      uint64_t seed, const char* train_csv, const char* test_csv) {
  return guarded_str([&] {
    require_c(model_path != nullptr && train_csv != nullptr && test_csv != nullptr,
              "iga_dataset: null argument");
    const hds::iga::IgaModel model = hds::iga::load_model(model_path);
    hds::iga::StressResponse response(model, n_snapshots, seed);
    auto [train_ds, test_ds] = hds::iga::generate_iga_dataset(response, n_train, n_test, seed);
    hds::doe::write_dataset(train_ds, train_csv);
    hds::doe::write_dataset(test_ds, test_csv);
    return json{{"geometry_gain", response.geometry_gain()},
                {"basis_size", response.basis_size()},
                {"evaluations", response.evals()},
                {"fallbacks", response.fallbacks()}}
        .dump();
  });
}

/* ---- pso ---- */

int hds_pso_minimize(hds_objective_fn f, void* user, int d, const double* lo, const double* hi,
                     const char* config_json_or_null, double* out_best_x,
                     double* out_best_value) {
  return guarded([&] {
    require_c(f != nullptr && lo != nullptr && hi != nullptr && out_best_x != nullptr &&
                  out_best_value != nullptr && d >= 1,
              "pso: null argument");
    const json t = parse_maybe(config_json_or_null, "pso config");
    hds::pso::PsoConfig cfg;
    if (!t.is_null()) {
      if (t.contains("population")) cfg.population = t.at("population").get<int>();
      if (t.contains("iterations")) cfg.iterations = t.at("iterations").get<int>();
      if (t.contains("inertia")) cfg.inertia = t.at("inertia").get<double>();
      if (t.contains("cognitive")) cfg.cognitive = t.at("cognitive").get<double>();
      if (t.contains("social")) cfg.social = t.at("social").get<double>();
      if (t.contains("clamp_fraction")) cfg.clamp_fraction = t.at("clamp_fraction").get<double>();
      if (t.contains("seed")) cfg.seed = t.at("seed").get<std::uint64_t>();
    }
    std::vector<std::pair<double, double>> bounds(d);
    for (int k = 0; k < d; ++k) bounds[k] = {lo[k], hi[k]};
    const auto objective = [&](std::span<const double> x) {
      double value = 0.0;
      if (f(user, x.data(), d, &value) != 0)
        hds::fail(hds::Errc::numeric_error, "pso: objective callback aborted");
      return value;
    };
    const hds::pso::PsoResult r = hds::pso::pso_minimize(objective, bounds, cfg);
    std::memcpy(out_best_x, r.best_point.data(), sizeof(double) * d);
    *out_best_value = r.best_value;
    return HDS_OK;
  });
}

}  // extern "C"
