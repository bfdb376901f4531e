// Command-line front end. Talks to the core library exclusively through the
// C API in hdsurr.h; JSON handling and argument parsing are local.
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdsurr.h"

using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void die_from_library() {
  throw CliError(std::string(hds_last_error()));
}

std::string take(char* s) {
  if (s == nullptr) die_from_library();
  std::string out(s);
  hds_string_free(s);
  return out;
}

void check(int status) {
  if (status != HDS_OK) die_from_library();
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f.good()) throw CliError("cannot open: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw CliError(path + ": bad JSON: " + e.what());
  }
  return j;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      x.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw CliError("bad coordinate: '" + cell + "'");
    }
  }
  if (x.empty()) throw CliError("empty point");
  return x;
}

double num_or_nan(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nan("");
  return it->get<double>();
}

void print_rows(const json& rows) {
  if (rows.empty()) return;
  const char* tag_key = rows[0].contains("seed") ? "seed"
                        : rows[0].contains("d")  ? "d"
                                                 : "fn";
  std::printf("%-28s %-10s %10s %10s %10s %12s\n", tag_key, "status", "raae", "rmae", "r2",
              "error_pct");
  for (const json& r : rows) {
    const std::string tag = r.at(tag_key).is_string() ? r.at(tag_key).get<std::string>()
                                                      : r.at(tag_key).dump();
    const std::string status = r.at("status").get<std::string>();
    if (status == "ok")
      std::printf("%-28s %-10s %10.4f %10.4f %10.4f %12.4f\n", tag.c_str(), "ok",
                  num_or_nan(r, "raae"), num_or_nan(r, "rmae"), num_or_nan(r, "r2"),
                  num_or_nan(r, "error_pct"));
    else
      std::printf("%-28s FAILED: %s\n", tag.c_str(), status.c_str());
  }
}

void print_kv(const char* title, const json& obj) {
  std::printf("%s:\n", title);
  for (auto it = obj.begin(); it != obj.end(); ++it)
    std::printf("  %-24s %s\n", it.key().c_str(), it->dump().c_str());
}

// Renders a metrics document; returns false when any check failed.
bool print_metrics(const json& m) {
  if (m.contains("kind")) std::printf("experiment: %s\n", m.at("kind").get<std::string>().c_str());
  if (m.contains("rows")) print_rows(m.at("rows"));
  if (m.contains("median")) print_kv("median", m.at("median"));
  if (m.contains("summary")) print_kv("summary", m.at("summary"));
  if (m.contains("metrics")) print_kv("metrics", m.at("metrics"));
  if (m.contains("response")) print_kv("response", m.at("response"));
  if (m.contains("optimization")) print_kv("optimization", m.at("optimization"));
  bool all_pass = true;
  if (m.contains("checks")) {
    for (const json& c : m.at("checks")) {
      const bool pass = c.at("pass").get<bool>();
      all_pass = all_pass && pass;
      std::printf("[%s] %s = %s (%s %s)\n", pass ? "PASS" : "FAIL",
                  c.at("name").get<std::string>().c_str(), c.at("value").dump().c_str(),
                  c.at("op").get<std::string>().c_str(), c.at("threshold").dump().c_str());
    }
  }
  return all_pass;
}

// Shared state for experiment-style subcommands.
struct ExperimentArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  json overrides() const {
    json o = config_path.empty() ? json::object() : read_json_file(config_path);
    if (seed_set) o["seed"] = seed;
    return o;
  }
};

// Runs an experiment and prints its metrics; returns the process exit code.
int run_experiment(const std::string& kind, const json& overrides, const std::string& out_dir) {
  const std::string metrics_text =
      take(hds_experiment_run(kind.c_str(), overrides.dump().c_str(), out_dir.c_str()));
  const json metrics = json::parse(metrics_text);
  const bool ok = print_metrics(metrics);
  std::printf("run directory: %s\n", out_dir.c_str());
  return ok ? 0 : 1;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args, bool seed_in_config_is_list) {
  cmd->add_option("--config", args.config_path, "JSON config file (flags override it)");
  auto* seed_opt = cmd->add_option("--seed", args.seed, "master seed");
  cmd->parse_complete_callback([&args, seed_opt, seed_in_config_is_list] {
    args.seed_set = seed_opt->count() > 0;
    (void)seed_in_config_is_list;
  });
  cmd->add_option("--out", args.out_dir, "output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CNN surrogates for high-dimensional functions, an isogeometric "
               "plane-stress solver, and PSO"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "benchmark function registry");
  bench->require_subcommand(1);
  bench->add_subcommand("list", "list registered functions")->callback([&] {
    const json fns = json::parse(take(hds_bench_list_json()));
    std::printf("%-32s %12s %12s %6s\n", "id", "lo", "hi", "min_d");
    for (const json& f : fns)
      std::printf("%-32s %12g %12g %6d\n", f.at("id").get<std::string>().c_str(),
                  f.at("lo").get<double>(), f.at("hi").get<double>(), f.at("min_d").get<int>());
  });
  {
    auto* eval = bench->add_subcommand("eval", "evaluate a function at a point");
    auto fn = std::make_shared<std::string>();
    auto point = std::make_shared<std::string>();
    eval->add_option("--fn", *fn, "function id")->required();
    eval->add_option("--x", *point, "comma-separated coordinates")->required();
    eval->callback([fn, point] {
      const std::vector<double> x = parse_point(*point);
      double value = 0.0;
      check(hds_bench_eval(fn->c_str(), x.data(), static_cast<int>(x.size()), &value));
      std::printf("%.17g\n", value);
    });
  }

  // ---- data ----
  auto* data = app.add_subcommand("data", "dataset generation");
  data->require_subcommand(1);
  {
    auto* gen = data->add_subcommand("gen", "sample a registered function to CSV");
    struct GenArgs {
      std::string fn, out;
      int n = 0, d = 0;
      std::uint64_t seed = 0;
      bool lhs = false;
    };
    auto a = std::make_shared<GenArgs>();
    gen->add_option("--fn", a->fn, "function id")->required();
    gen->add_option("--n", a->n, "sample count")->required();
    gen->add_option("--d", a->d, "dimension")->required();
    gen->add_option("--seed", a->seed, "sampling seed")->required();
    gen->add_option("--out", a->out, "CSV path (sidecar <out>.meta.json)")->required();
    gen->add_flag("--lhs", a->lhs, "Latin hypercube instead of i.i.d. uniform");
    gen->callback([a] {
      check(hds_dataset_generate(a->fn.c_str(), a->n, a->d, a->seed, a->lhs ? 1 : 0,
                                 a->out.c_str()));
      std::printf("wrote %s\n", a->out.c_str());
    });
  }

  // ---- train ----
  {
    auto* train = app.add_subcommand("train", "fit a surrogate (files or generated data)");
    struct TrainArgs {
      ExperimentArgs exp;
      std::string train_csv, test_csv, fn, arch;
      int d = 0, n_train = 0, n_test = 0, epochs = 0, batch = 0, patience = -1;
      double lr = 0.0;
    };
    auto a = std::make_shared<TrainArgs>();
    train->add_option("--config", a->exp.config_path, "JSON config file (flags override it)");
    train->add_option("--out", a->exp.out_dir, "output directory")->required();
    auto* seed_opt = train->add_option("--seed", a->exp.seed, "seed (single-seed run)");
    train->add_option("--train", a->train_csv, "training dataset CSV");
    train->add_option("--test", a->test_csv, "testing dataset CSV");
    train->add_option("--fn", a->fn, "function id for generated data");
    train->add_option("--d", a->d, "dimension for generated data");
    train->add_option("--n-train", a->n_train, "training samples");
    train->add_option("--n-test", a->n_test, "testing samples");
    train->add_option("--epochs", a->epochs, "max epochs");
    train->add_option("--batch", a->batch, "mini-batch size");
    train->add_option("--lr", a->lr, "Adam step size");
    train->add_option("--patience", a->patience, "early-stopping patience (0 disables)");
    train->add_option("--arch", a->arch, "architecture string");
    train->callback([a, seed_opt, &exit_code] {
      json o = a->exp.config_path.empty() ? json::object() : read_json_file(a->exp.config_path);
      if (!o.contains("acceptance")) o["acceptance"] = {{"max_error_pct", nullptr}};
      if (seed_opt->count() > 0) o["seeds"] = {a->exp.seed};
      if (!a->train_csv.empty()) o["train_csv"] = a->train_csv;
      if (!a->test_csv.empty()) o["test_csv"] = a->test_csv;
      if (!a->fn.empty()) o["fn"] = a->fn;
      if (a->d > 0) o["d"] = a->d;
      if (a->n_train > 0) o["n_train"] = a->n_train;
      if (a->n_test > 0) o["n_test"] = a->n_test;
      if (a->epochs > 0) o["train"]["epochs"] = a->epochs;
      if (a->batch > 0) o["train"]["batch"] = a->batch;
      if (a->lr > 0) o["train"]["lr"] = a->lr;
      if (a->patience >= 0) o["train"]["patience"] = a->patience;
      if (!a->arch.empty()) o["train"]["arch"] = a->arch;
      exit_code = run_experiment("bench-train", o, a->exp.out_dir);
    });
  }

  // ---- eval ----
  {
    auto* eval = app.add_subcommand("eval", "score a saved model on a dataset CSV");
    struct EvalArgs {
      std::string model, data, pred;
    };
    auto a = std::make_shared<EvalArgs>();
    eval->add_option("--model", a->model, "model JSON path")->required();
    eval->add_option("--data", a->data, "dataset CSV")->required();
    eval->add_option("--pred", a->pred, "write per-sample predictions CSV here");
    eval->callback([a] {
      const std::string rep = take(
          hds_eval_csv(a->model.c_str(), a->data.c_str(), a->pred.empty() ? "" : a->pred.c_str()));
      const json j = json::parse(rep);
      std::printf("%10s %10s %10s %12s %8s\n", "raae", "rmae", "r2", "error_pct", "n");
      std::printf("%10.4f %10.4f %10.4f %12.4f %8d\n", num_or_nan(j, "raae"),
                  num_or_nan(j, "rmae"), num_or_nan(j, "r2"), num_or_nan(j, "error_pct"),
                  j.at("n").get<int>());
    });
  }

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "dimension sweeps");
  sweep->require_subcommand(1);
  for (const char* which : {"griewank", "shanwang"}) {
    auto* cmd = sweep->add_subcommand(which, std::string("dimension sweep for ") + which);
    auto a = std::make_shared<ExperimentArgs>();
    auto dims = std::make_shared<std::vector<int>>();
    add_experiment_options(cmd, *a, false);
    cmd->add_option("--dims", *dims, "dimensions to run");
    const std::string kind = std::string(which) + "-sweep";
    // keep the shared_ptrs alive in the callback
    cmd->callback([a, dims, kind, &exit_code] {
      json o = a->overrides();
      if (!dims->empty()) o["dims"] = *dims;
      exit_code = run_experiment(kind == "griewank-sweep" ? "griewank-sweep" : "shanwang-sweep", o,
                                 a->out_dir);
    });
  }

  // ---- suite ----
  auto* suite = app.add_subcommand("suite", "multi-function suites");
  suite->require_subcommand(1);
  {
    auto* funcs = suite->add_subcommand("funcs", "ten-function suite at one dimension");
    auto a = std::make_shared<ExperimentArgs>();
    auto d = std::make_shared<int>(0);
    add_experiment_options(funcs, *a, false);
    funcs->add_option("--d", *d, "dimension");
    funcs->callback([a, d, &exit_code] {
      json o = a->overrides();
      if (*d > 0) o["d"] = *d;
      exit_code = run_experiment("bench-suite", o, a->out_dir);
    });
  }

  // ---- run (generic) ----
  {
    auto* run = app.add_subcommand("run", "run any experiment kind");
    auto a = std::make_shared<ExperimentArgs>();
    auto kind = std::make_shared<std::string>();
    run->add_option("--kind", *kind, "experiment kind (see --list-kinds)")->required();
    add_experiment_options(run, *a, false);
    run->callback([a, kind, &exit_code] {
      exit_code = run_experiment(*kind, a->overrides(), a->out_dir);
    });
  }
  app.add_flag_callback("--list-kinds", [] {
    const json kinds = json::parse(take(hds_experiment_kinds_json()));
    for (const json& k : kinds) std::printf("%s\n", k.get<std::string>().c_str());
    std::exit(0);
  });
  {
    auto* dc = app.add_subcommand("default-config", "print an experiment kind's default config");
    auto kind = std::make_shared<std::string>();
    dc->add_option("kind", *kind, "experiment kind")->required();
    dc->callback([kind] {
      std::printf("%s\n", take(hds_experiment_default_config(kind->c_str())).c_str());
    });
  }

  // ---- iga ----
  auto* iga = app.add_subcommand("iga", "isogeometric solver");
  iga->require_subcommand(1);
  {
    auto* build = iga->add_subcommand("build", "write the tube-analog model file");
    struct BuildArgs {
      std::string out;
      int nu = 18, nv = 18;
    };
    auto a = std::make_shared<BuildArgs>();
    build->add_option("--out", a->out, "model JSON path")->required();
    build->add_option("--nu", a->nu, "control points along u");
    build->add_option("--nv", a->nv, "control points along v");
    build->callback([a] {
      check(hds_iga_build_tube(a->nu, a->nv, a->out.c_str()));
      std::printf("wrote %s\n", a->out.c_str());
    });
  }
  {
    auto* solve = iga->add_subcommand("solve", "solve a model and recover stresses");
    struct SolveArgs {
      std::string model, stress, disp;
    };
    auto a = std::make_shared<SolveArgs>();
    solve->add_option("--model", a->model, "model JSON path")->required();
    solve->add_option("--stress", a->stress, "stress-field CSV output");
    solve->add_option("--disp", a->disp, "displacement CSV output");
    solve->callback([a] {
      const std::string out = take(hds_iga_solve(
          a->model.c_str(), a->stress.empty() ? "" : a->stress.c_str(),
          a->disp.empty() ? "" : a->disp.c_str()));
      const json j = json::parse(out);
      std::printf("max von Mises: %.17g  (dofs: %d, quad points: %d)\n",
                  j.at("max_von_mises").get<double>(), j.at("n_dofs").get<int>(),
                  j.at("n_quad").get<int>());
    });
  }
  {
    auto* ds = iga->add_subcommand("dataset", "sample the design-to-stress response");
    struct DsArgs {
      std::string model, train, test;
      int n_train = 0, n_test = 0, snapshots = 8;
      std::uint64_t seed = 0;
    };
    auto a = std::make_shared<DsArgs>();
    ds->add_option("--model", a->model, "model JSON path")->required();
    ds->add_option("--n-train", a->n_train, "training samples")->required();
    ds->add_option("--n-test", a->n_test, "testing samples")->required();
    ds->add_option("--seed", a->seed, "sampling seed")->required();
    ds->add_option("--train-out", a->train, "training CSV path")->required();
    ds->add_option("--test-out", a->test, "testing CSV path")->required();
    ds->add_option("--snapshots", a->snapshots, "snapshot solves for the reduced basis");
    ds->callback([a] {
      const std::string info =
          take(hds_iga_dataset(a->model.c_str(), a->n_train, a->n_test, a->snapshots, a->seed,
                               a->train.c_str(), a->test.c_str()));
      const json j = json::parse(info);
      std::printf("wrote %s and %s\n", a->train.c_str(), a->test.c_str());
      print_kv("response", j);
    });
  }
  {
    auto* opt = iga->add_subcommand("optimize", "surrogate vs direct PSO on the tube analog");
    auto a = std::make_shared<ExperimentArgs>();
    auto surrogate_path = std::make_shared<std::string>();
    add_experiment_options(opt, *a, false);
    opt->add_option("--surrogate", *surrogate_path, "reuse a trained surrogate model file");
    opt->callback([a, surrogate_path, &exit_code] {
      json o = a->overrides();
      if (!surrogate_path->empty()) o["surrogate_path"] = *surrogate_path;
      exit_code = run_experiment("iga-optimize", o, a->out_dir);
    });
  }

  // ---- report ----
  {
    auto* report = app.add_subcommand("report", "print (and optionally replay) a finished run");
    struct ReportArgs {
      std::string dir, scratch;
      bool do_replay = false;
    };
    auto a = std::make_shared<ReportArgs>();
    report->add_option("--dir", a->dir, "run directory")->required();
    report->add_flag("--replay", a->do_replay, "re-run the manifest and compare");
    report->add_option("--scratch", a->scratch, "replay scratch directory");
    report->callback([a, &exit_code] {
      const json metrics = read_json_file(a->dir + "/metrics.json");
      bool ok = print_metrics(metrics);
      if (a->do_replay) {
        const std::string scratch = a->scratch.empty() ? a->dir + "-replay" : a->scratch;
        const json r = json::parse(
            take(hds_experiment_replay(a->dir.c_str(), scratch.c_str())));
        const bool identical = r.at("identical").get<bool>();
        std::printf("replay: %s%s%s\n", identical ? "identical" : "DIFFERS",
                    identical ? "" : " - ", identical ? "" : r.at("detail").get<std::string>().c_str());
        ok = ok && identical;
      }
      exit_code = ok ? 0 : 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return exit_code;
}
