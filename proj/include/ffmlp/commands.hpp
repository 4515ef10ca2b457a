#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ffmlp/bp.hpp"
#include "ffmlp/error.hpp"
#include "ffmlp/grid.hpp"
#include "ffmlp/model_io.hpp"
#include "ffmlp/pipeline.hpp"
#include "ffmlp/presets.hpp"

// The subcommands of the ffmlp tool, as plain functions: each takes a parsed argument
// struct and an output stream, prints a human-readable report and returns it as JSON.
namespace ffmlp {

using nlohmann::json;

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pct(double fraction) { return fixed(100.0 * fraction, 2); }

// Runs fn, prefixing any library error with the module it came from.
template <typename Fn>
auto in_module(const char* module, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(module) + ": " + e.what());
  }
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

}  // namespace detail

// ---------------------------------------------------------------------------- fit

struct FitArgs {
  DatasetArgs data;
  std::optional<int> components;                   // same count for every class
  std::optional<std::vector<int>> components_per_class;
  Seed gmm_seed = 0;
  std::optional<double> threshold;
  bool prune = true;
  double P = 1000.0;
  std::string out;  // model path; empty: do not write
};

inline FitOptions fit_options(const FitArgs& a, const PreparedData& d) {
  FitOptions o;
  o.components_per_class = d.components_per_class;
  if (a.components) o.components_per_class.assign(static_cast<std::size_t>(d.train.class_count), *a.components);
  if (a.components_per_class) o.components_per_class = *a.components_per_class;
  o.gmm.seed = a.gmm_seed;
  o.threshold = a.threshold.value_or(d.threshold);
  o.prune = a.prune;
  o.P = a.P;
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw ParameterError("threshold must lie in [0, 1]");
  return o;
}

inline json fit_flags(const FitArgs& a, const FitOptions& o) {
  return {{"data", dataset_args_json(a.data)},
          {"components_per_class", o.components_per_class},
          {"gmm_seed", o.gmm.seed},
          {"gmm_max_iters", o.gmm.max_iters},
          {"gmm_tol", o.gmm.tol},
          {"gmm_reg", o.gmm.reg},
          {"lda_reg", o.lda_reg},
          {"threshold", o.threshold},
          {"prune", o.prune},
          {"P", o.P}};
}

inline json timings_json(const StageTimings& t) {
  return {{"gmm_s", t.gmm_s},
          {"boundary_s", t.boundary_s},
          {"region_s", t.region_s},
          {"assign_s", t.assign_s},
          {"total_s", t.total_s}};
}

inline json confusion_json(const std::vector<std::vector<Index>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

struct FitOutcome {
  PreparedData data;
  FitOptions options;
  FitResult result;
  json report;
};

// Fits without printing; shared by fit, train-bp and bench.
inline FitOutcome run_fit(const FitArgs& a) {
  FitOutcome o;
  o.data = detail::in_module("datasets", [&] { return prepare(a.data); });
  o.options = fit_options(a, o.data);
  o.result = detail::in_module("construction", [&] { return fit_ffmlp(o.data.train, o.options); });
  const FFNetwork& net = o.result.model.net;
  o.result.model.metadata = {{"flags", fit_flags(a, o.options)}, {"data", dataset_args_json(a.data)}};
  const OracleCheck oracle = check_against_table(net, o.result.regions, o.data.train);
  const PruneReport& pr = o.result.model.prune_report;
  json deletions = json::array();
  for (const auto& del : pr.deletions)
    deletions.push_back({{"plane_id", del.plane_id}, {"source", {del.source.first, del.source.second}}, {"error", del.error}});
  o.report = {{"command", "fit"},
              {"flags", fit_flags(a, o.options)},
              {"dataset", o.data.name},
              {"n_train", o.data.train.size()},
              {"n_test", o.data.test.size()},
              {"D_in", net.input_dim},
              {"D1", net.D1()},
              {"D2", net.D2()},
              {"D_out", net.class_count},
              {"planes_initial", o.result.unpruned.size()},
              {"planes_final", net.planes.size()},
              {"skipped_pairs", o.result.unpruned.skipped_pairs.size()},
              {"train_accuracy", accuracy(net, o.data.train)},
              {"test_accuracy", accuracy(net, o.data.test)},
              {"prune", {{"threshold", pr.threshold},
                         {"initial_error", pr.initial_error},
                         {"final_error", pr.final_error},
                         {"deletions", deletions}}},
              {"oracle", {{"checked", oracle.checked},
                          {"margin_violators", oracle.violators},
                          {"mismatches", oracle.mismatches},
                          {"unexplained_mismatches", oracle.unexplained_mismatches}}},
              {"timings", timings_json(o.result.timings)}};
  return o;
}

inline json cmd_fit(const FitArgs& a, std::ostream& out) {
  FitOutcome o = run_fit(a);
  const json& r = o.report;
  out << "flags: " << r["flags"].dump() << '\n';
  out << "dataset " << o.data.name << ": " << r["n_train"] << " train / " << r["n_test"] << " test, d="
      << r["D_in"] << ", C=" << r["D_out"] << '\n';
  out << "architecture: D_in=" << r["D_in"] << " D1=" << r["D1"] << " D2=" << r["D2"] << " D_out=" << r["D_out"]
      << "  (planes " << r["planes_initial"] << " -> " << r["planes_final"] << ")\n";
  out << "accuracy: train " << detail::pct(r["train_accuracy"]) << "%  test " << detail::pct(r["test_accuracy"])
      << "%\n";
  const auto& t = o.result.timings;
  out << "timing [s]: gmm " << detail::fixed(t.gmm_s, 5) << "  boundary " << detail::fixed(t.boundary_s, 5)
      << "  region " << detail::fixed(t.region_s, 5) << "  assign " << detail::fixed(t.assign_s, 5) << "  total "
      << detail::fixed(t.total_s, 5) << '\n';
  const PruneReport& pr = o.result.model.prune_report;
  out << "pruning: threshold " << pr.threshold << ", training error " << detail::fixed(pr.initial_error, 4) << " -> "
      << detail::fixed(pr.final_error, 4) << ", " << pr.deletions.size() << " deleted\n";
  const json& oc = r["oracle"];
  out << "region table check: " << oc["checked"] << " samples, " << oc["margin_violators"]
      << " margin-condition violators, " << oc["mismatches"] << " mismatches (" << oc["unexplained_mismatches"]
      << " unexplained)\n";
  if (!a.out.empty()) {
    detail::in_module("model io", [&] { serialize(o.result.model, a.out); });
    out << "model written to " << a.out << '\n';
  }
  return o.report;
}

// --------------------------------------------------------------------------- eval

struct EvalArgs {
  std::string model;
  std::optional<DatasetArgs> data;  // default: the data the model was fit on
};

inline DatasetArgs model_data(const ModelFile& m, const std::optional<DatasetArgs>& override_data) {
  if (override_data) return *override_data;
  if (!m.metadata.contains("data"))
    throw ParameterError("model carries no dataset description; pass --dataset");
  return dataset_args_from_json(m.metadata["data"]);
}

inline json cmd_eval(const EvalArgs& a, std::ostream& out) {
  const ModelFile m = detail::in_module("model io", [&] { return deserialize(a.model); });
  const DatasetArgs da = model_data(m, a.data);
  const PreparedData d = detail::in_module("datasets", [&] { return prepare(da); });
  const FFNetwork& net = m.net;
  if (d.train.dim() != net.input_dim)
    throw ParameterError("model expects " + std::to_string(net.input_dim) + "-D inputs but dataset '" + d.name +
                         "' is " + std::to_string(d.train.dim()) + "-D");
  if (d.train.class_count != net.class_count)
    throw ParameterError("model has " + std::to_string(net.class_count) + " classes but dataset '" + d.name +
                         "' has " + std::to_string(d.train.class_count));
  json report = {{"command", "eval"}, {"flags", {{"model", a.model}, {"data", dataset_args_json(da)}}}};
  out << "flags: " << report["flags"].dump() << '\n';
  for (const auto& [name, ds] : {std::pair<const char*, const LabeledDataset&>{"train", d.train}, {"test", d.test}}) {
    const auto pred = predict_all(net, ds);
    const auto cm = confusion(ds.labels, pred, net.class_count);
    const double acc = accuracy(net, ds);
    report[name] = {{"accuracy", acc}, {"n", ds.size()}, {"confusion", confusion_json(cm)}};
    out << name << ": " << detail::pct(acc) << "% of " << ds.size() << "\n  confusion (rows true, cols predicted):\n";
    for (const auto& row : cm) {
      out << "   ";
      for (Index v : row) out << ' ' << v;
      out << '\n';
    }
  }
  return report;
}

// ----------------------------------------------------------------------- train-bp

struct TrainBpArgs {
  FitArgs fit;
  std::optional<std::string> model;  // initialize/size from this model instead of fitting
  std::optional<DatasetArgs> data;   // with --model: override the model's data
  InitScheme init = InitScheme::kXavierUniform;
  TrainConfig cfg;
  int runs = 1;
  std::string history;  // CSV path; per-run suffix when runs > 1
};

inline std::string run_path(const std::string& path, int run, int runs) {
  if (runs <= 1) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = "_run" + std::to_string(run);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

inline void write_history_csv(const TrainHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(10);
  out << "epoch,train_acc,test_acc,loss\n";
  for (const auto& s : h) out << s.epoch << ',' << s.train_accuracy << ',' << s.test_accuracy << ',' << s.mean_loss << '\n';
  if (!out) throw DataError("write failed for " + path);
}

struct BpRun {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double seconds = 0.0;
  TrainHistory history;
};

inline BpRun run_bp(const FFNetwork& net, const PreparedData& d, InitScheme init, TrainConfig cfg) {
  cfg.init = init;
  MlpWeights w = init == InitScheme::kFromFF
                     ? weights_from(net)
                     : xavier_uniform({net.input_dim, net.D1(), net.D2(), net.class_count}, cfg.seed, net.fallback_class);
  detail::Stopwatch clock;
  TrainResult tr = detail::in_module("bp", [&] { return train_bp(std::move(w), d.train, d.test, cfg); });
  BpRun r;
  r.seconds = clock.lap();
  r.train_accuracy = accuracy(tr.weights, d.train);
  r.test_accuracy = accuracy(tr.weights, d.test);
  r.history = std::move(tr.history);
  return r;
}

inline const char* init_name(InitScheme s) { return s == InitScheme::kFromFF ? "ff" : "xavier"; }

inline json cmd_train_bp(const TrainBpArgs& a, std::ostream& out) {
  if (a.runs < 1) throw ParameterError("runs must be >= 1");
  a.cfg.validate();
  FFNetwork net;
  PreparedData d;
  json source;
  if (a.model) {
    const ModelFile m = detail::in_module("model io", [&] { return deserialize(*a.model); });
    const DatasetArgs da = model_data(m, a.data);
    d = detail::in_module("datasets", [&] { return prepare(da); });
    if (d.train.dim() != m.net.input_dim || d.train.class_count != m.net.class_count)
      throw ParameterError("model shape does not match dataset '" + d.name + "'");
    net = m.net;
    source = {{"model", *a.model}, {"data", dataset_args_json(da)}};
  } else {
    FitOutcome fo = run_fit(a.fit);
    net = fo.result.model.net;
    d = std::move(fo.data);
    source = fo.report["flags"];
  }
  json flags = {{"source", source},
                {"init", init_name(a.init)},
                {"epochs", a.cfg.epochs},
                {"lr", a.cfg.learning_rate},
                {"momentum", a.cfg.momentum},
                {"batch_size", a.cfg.batch_size},
                {"seed", a.cfg.seed},
                {"runs", a.runs}};
  out << "flags: " << flags.dump() << '\n';
  out << "architecture: " << net.input_dim << " -> " << net.D1() << " -> " << net.D2() << " -> " << net.class_count
      << '\n';
  const double ff_train = accuracy(net, d.train);
  const double ff_test = accuracy(net, d.test);
  out << "FF-MLP: train " << detail::pct(ff_train) << "%  test " << detail::pct(ff_test) << "%\n";

  std::vector<double> tr, te, secs;
  json runs = json::array();
  for (int r = 0; r < a.runs; ++r) {
    TrainConfig cfg = a.cfg;
    cfg.seed = a.cfg.seed + static_cast<Seed>(r);
    const BpRun run = run_bp(net, d, a.init, cfg);
    if (!a.history.empty()) detail::in_module("bp", [&] { write_history_csv(run.history, run_path(a.history, r, a.runs)); });
    tr.push_back(run.train_accuracy);
    te.push_back(run.test_accuracy);
    secs.push_back(run.seconds);
    runs.push_back({{"seed", cfg.seed},
                    {"train_accuracy", run.train_accuracy},
                    {"test_accuracy", run.test_accuracy},
                    {"final_loss", run.history.empty() ? json(nullptr) : json(run.history.back().mean_loss)},
                    {"seconds", run.seconds}});
    out << "run " << r << " (seed " << cfg.seed << "): train " << detail::pct(run.train_accuracy) << "%  test "
        << detail::pct(run.test_accuracy) << "%  " << detail::fixed(run.seconds, 5) << " s\n";
  }
  const auto [trm, trs] = detail::mean_std(tr);
  const auto [tem, tes] = detail::mean_std(te);
  const auto [sm, ss] = detail::mean_std(secs);
  out << "BP-MLP (" << init_name(a.init) << ", " << a.cfg.epochs << " epochs, " << a.runs << " runs): train "
      << detail::pct(trm) << " +/- " << detail::pct(trs) << "%  test " << detail::pct(tem) << " +/- " << detail::pct(tes)
      << "%  time " << detail::fixed(sm, 5) << " +/- " << detail::fixed(ss, 5) << " s\n";
  if (!a.history.empty()) out << "history written to " << run_path(a.history, 0, a.runs) << (a.runs > 1 ? " ..." : "") << '\n';
  return {{"command", "train-bp"},
          {"flags", flags},
          {"ff", {{"train_accuracy", ff_train}, {"test_accuracy", ff_test}}},
          {"runs", runs},
          {"train_mean", trm},
          {"train_std", trs},
          {"test_mean", tem},
          {"test_std", tes},
          {"seconds_mean", sm},
          {"seconds_std", ss}};
}

// --------------------------------------------------------------------- plot/responses

struct PlotArgs {
  std::string model;
  std::optional<GridBox> box;  // default: data bounding box plus 10% margin
  Index nx = 200, ny = 200;
  std::string target = "decision";
  std::string out = "grid";  // writes <out>.csv and <out>.ppm
};

inline GridBox data_box(const ModelFile& m) {
  const PreparedData d = detail::in_module("datasets", [&] { return prepare(model_data(m, std::nullopt)); });
  Matrix all(d.train.size() + d.test.size(), d.train.dim());
  all << d.train.samples, d.test.samples;
  const Vector lo = all.colwise().minCoeff();
  const Vector hi = all.colwise().maxCoeff();
  const Vector pad = 0.1 * (hi - lo);
  return {lo(0) - pad(0), hi(0) + pad(0), lo(1) - pad(1), hi(1) + pad(1)};
}

inline json cmd_plot(const PlotArgs& a, std::ostream& out) {
  const ModelFile m = detail::in_module("model io", [&] { return deserialize(a.model); });
  if (m.net.input_dim != 2)
    throw ParameterError("plot needs a 2-D model, this one takes " + std::to_string(m.net.input_dim) + " inputs");
  const GridTarget target = parse_target(a.target);
  const GridBox box = a.box ? *a.box : data_box(m);
  const GridDump g = dump_grid(m.net, box, a.nx, a.ny, target);
  detail::in_module("plot", [&] {
    write_grid_csv(g, a.out + ".csv");
    write_grid_ppm(g, a.out + ".ppm");
  });
  json flags = {{"model", a.model},
                {"box", {box.xmin, box.xmax, box.ymin, box.ymax}},
                {"resolution", {a.nx, a.ny}},
                {"target", target.str()},
                {"out", a.out}};
  out << "flags: " << flags.dump() << '\n';
  out << "wrote " << a.out << ".csv and " << a.out << ".ppm (" << a.nx << "x" << a.ny << ", " << target.str() << ")\n";
  return {{"command", "plot"}, {"flags", flags}, {"cells", g.size()}};
}

// Dumps one neuron, or every neuron of a layer when neuron is unset, as <out>_<layer>_<k>.
struct ResponsesArgs {
  std::string model;
  std::optional<GridBox> box;
  Index nx = 200, ny = 200;
  std::string layer = "l1";
  std::optional<Index> neuron;
  std::string out = "responses";
};

inline json cmd_responses(const ResponsesArgs& a, std::ostream& out) {
  if (a.layer != "l1" && a.layer != "l2") throw ParameterError("layer must be l1 or l2");
  const ModelFile m = detail::in_module("model io", [&] { return deserialize(a.model); });
  const Index count = a.layer == "l1" ? m.net.D1() : m.net.D2();
  std::vector<Index> neurons;
  if (a.neuron) {
    neurons.push_back(*a.neuron);
  } else {
    for (Index k = 0; k < count; ++k) neurons.push_back(k);
  }
  json files = json::array();
  for (Index k : neurons) {
    PlotArgs p;
    p.model = a.model;
    p.box = a.box;
    p.nx = a.nx;
    p.ny = a.ny;
    p.target = a.layer + ":" + std::to_string(k);
    p.out = a.out + "_" + a.layer + "_" + std::to_string(k);
    cmd_plot(p, out);
    files.push_back(p.out);
  }
  return {{"command", "responses"}, {"files", files}};
}

// -------------------------------------------------------------------------- bench

struct BenchRow {
  std::string label;
  FitArgs fit;
};

// The accuracy/timing comparison matrix: every synthetic example (both 9-blob
// thresholds, both circle-and-ring component counts) and the four real datasets.
inline std::vector<BenchRow> bench_rows(Seed seed, const std::string& data_dir) {
  auto row = [&](std::string label, std::string dataset) {
    BenchRow r;
    r.label = std::move(label);
    r.fit.data.dataset = std::move(dataset);
    r.fit.data.seed = seed;
    r.fit.data.data_dir = data_dir;
    return r;
  };
  std::vector<BenchRow> rows;
  rows.push_back(row("xor", "xor"));
  rows.push_back(row("blobs3", "blobs3"));
  rows.push_back(row("blobs9(0.1)", "blobs9"));
  rows.back().fit.threshold = 0.1;
  rows.push_back(row("blobs9(0.3)", "blobs9"));
  rows.back().fit.threshold = 0.3;
  rows.push_back(row("circle(4)", "circle"));
  rows.back().fit.components_per_class = std::vector<int>{1, 4};
  rows.push_back(row("circle(16)", "circle"));
  rows.back().fit.components_per_class = std::vector<int>{1, 16};
  rows.push_back(row("moons2", "moons2"));
  rows.push_back(row("moons4", "moons4"));
  for (const char* name : {"iris", "wine", "bcw", "pima"}) rows.push_back(row(name, name));
  return rows;
}

struct BenchArgs {
  int runs = 5;
  Seed seed = 0;
  std::string data_dir = FFMLP_DATA_DIR;
  std::vector<std::string> only;  // row labels or dataset names; empty: all
  int short_epochs = 15;
  int long_epochs = 50;
  TrainConfig cfg;  // lr, momentum, batch size
};

inline json cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.runs < 1) throw ParameterError("runs must be >= 1");
  a.cfg.validate();
  json rows = json::array();
  json flags = {{"runs", a.runs},
                {"seed", a.seed},
                {"short_epochs", a.short_epochs},
                {"long_epochs", a.long_epochs},
                {"lr", a.cfg.learning_rate},
                {"momentum", a.cfg.momentum},
                {"batch_size", a.cfg.batch_size},
                {"only", a.only}};
  out << "flags: " << flags.dump() << '\n';
  auto ms = [](const std::pair<double, double>& p, bool percent) {
    return percent ? detail::pct(p.first) + " +/- " + detail::pct(p.second)
                   : detail::fixed(p.first, 5) + " +/- " + detail::fixed(p.second, 5);
  };
  for (const auto& spec : bench_rows(a.seed, a.data_dir)) {
    if (!a.only.empty() && std::find(a.only.begin(), a.only.end(), spec.label) == a.only.end() &&
        std::find(a.only.begin(), a.only.end(), spec.fit.data.dataset) == a.only.end())
      continue;
    const FitOutcome fo = run_fit(spec.fit);
    const FFNetwork& net = fo.result.model.net;
    TrainConfig cfg = a.cfg;
    cfg.seed = a.seed;
    cfg.epochs = a.long_epochs;
    const BpRun ff_init = run_bp(net, fo.data, InitScheme::kFromFF, cfg);
    json xav = json::object();
    for (int epochs : {a.long_epochs, a.short_epochs}) {
      std::vector<double> tr, te, secs;
      for (int r = 0; r < a.runs; ++r) {
        cfg.epochs = epochs;
        cfg.seed = a.seed + static_cast<Seed>(r);
        const BpRun run = run_bp(net, fo.data, InitScheme::kXavierUniform, cfg);
        tr.push_back(run.train_accuracy);
        te.push_back(run.test_accuracy);
        secs.push_back(run.seconds);
      }
      const auto a_tr = detail::mean_std(tr), a_te = detail::mean_std(te), a_s = detail::mean_std(secs);
      xav[std::to_string(epochs)] = {{"train_mean", a_tr.first}, {"train_std", a_tr.second},
                                     {"test_mean", a_te.first},  {"test_std", a_te.second},
                                     {"seconds_mean", a_s.first}, {"seconds_std", a_s.second}};
    }
    const auto& t = fo.result.timings;
    const json& x_long = xav[std::to_string(a.long_epochs)];
    const json& x_short = xav[std::to_string(a.short_epochs)];
    out << spec.label << "  [" << net.input_dim << "-" << net.D1() << "-" << net.D2() << "-" << net.class_count << "]\n"
        << "  FF-MLP            train " << detail::pct(fo.report["train_accuracy"]) << "  test "
        << detail::pct(fo.report["test_accuracy"]) << '\n'
        << "  BP ff-init (" << a.long_epochs << ")    train " << detail::pct(ff_init.train_accuracy) << "  test "
        << detail::pct(ff_init.test_accuracy) << '\n'
        << "  BP xavier (" << a.long_epochs << ")     train " << ms({x_long["train_mean"], x_long["train_std"]}, true)
        << "  test " << ms({x_long["test_mean"], x_long["test_std"]}, true) << '\n'
        << "  BP xavier (" << a.short_epochs << ")     train "
        << ms({x_short["train_mean"], x_short["train_std"]}, true) << "  test "
        << ms({x_short["test_mean"], x_short["test_std"]}, true) << '\n'
        << "  time [s]  gmm " << detail::fixed(t.gmm_s, 5) << "  boundary " << detail::fixed(t.boundary_s, 5)
        << "  region " << detail::fixed(t.region_s, 5) << "  assign " << detail::fixed(t.assign_s, 5) << "  total "
        << detail::fixed(t.total_s, 5) << "  | BP(" << a.short_epochs << ") "
        << ms({x_short["seconds_mean"], x_short["seconds_std"]}, false) << "  BP(" << a.long_epochs << ") "
        << ms({x_long["seconds_mean"], x_long["seconds_std"]}, false) << '\n';
    rows.push_back({{"label", spec.label},
                    {"fit", fo.report},
                    {"bp_ff_init", {{"epochs", a.long_epochs},
                                    {"train_accuracy", ff_init.train_accuracy},
                                    {"test_accuracy", ff_init.test_accuracy},
                                    {"seconds", ff_init.seconds}}},
                    {"bp_xavier", xav}});
  }
  return {{"command", "bench"}, {"flags", flags}, {"rows", rows}};
}

}  // namespace ffmlp
