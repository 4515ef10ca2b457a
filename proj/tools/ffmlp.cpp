// ffmlp: construct, evaluate, train and visualize feedforward-designed MLPs.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ffmlp/commands.hpp"

namespace {

using namespace ffmlp;

void add_dataset_flags(CLI::App* app, DatasetArgs& d) {
  app->add_option("--dataset", d.dataset, "xor|blobs3|blobs9|circle|moons2|moons4|iris|wine|bcw|pima|csv");
  app->add_option("--data-dir", d.data_dir, "Directory holding the bundled real-data CSVs");
  app->add_option("--csv", d.csv_path, "CSV file for --dataset csv");
  app->add_option("--label", d.label_column, "Label column (name or index; negative counts from the end)");
  app->add_option("--drop-zero", d.drop_zero, "Drop rows where any of these columns is zero")->delimiter(',');
  app->add_option("--test-fraction", d.test_fraction, "Stratified test share");
  app->add_option("--seed", d.seed, "Data generation and split seed");
  app->add_option("--n", d.n_per_blob, "Samples per blob/moon (circle: total)");
  app->add_option("--sigma", d.sigma, "Blob standard deviation");
  app->add_option("--offset", d.offset, "XOR center offset / triangle radius");
  app->add_option("--spacing", d.spacing, "9-blob grid spacing");
  app->add_option("--factor", d.factor, "Inner circle radius");
  app->add_option("--noise", d.noise, "Circle/moons noise");
  app->add_option_function<std::vector<double>>(
         "--pair-offset", [&d](const std::vector<double>& v) {
           d.pair_offset = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
         },
         "4-moons translation of the second pair, e.g. 1.5,-1.5")
      ->delimiter(',');
}

void add_fit_flags(CLI::App* app, FitArgs& f) {
  add_dataset_flags(app, f.data);
  app->add_option("--components", f.components, "GMM components for every class");
  app->add_option("--components-per-class", f.components_per_class, "GMM components per class, e.g. 1,4")
      ->delimiter(',');
  app->add_option("--gmm-seed", f.gmm_seed, "EM initialization seed");
  app->add_option("--threshold", f.threshold, "Pruning error threshold");
  app->add_flag("--no-prune{false}", f.prune, "Keep every hyperplane");
  app->add_option("--P", f.P, "Isolation constant");
}

std::optional<GridBox> parse_box(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  if (v.size() != 4) throw ParameterError("--box takes xmin,xmax,ymin,ymax");
  return GridBox{v[0], v[1], v[2], v[3]};
}

std::pair<Index, Index> parse_resolution(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) {
      const Index n = std::stol(s);
      return {n, n};
    }
    return {std::stol(s.substr(0, x)), std::stol(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw ParameterError("--resolution takes N or WxH, got '" + s + "'");
  }
}

void write_report(const std::string& path, const json& report) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << report.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedforward-designed multilayer perceptrons"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string report_path;
  app.add_option("--report", report_path, "Also write the report as JSON");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Construct a network and write the model");
  add_fit_flags(fit_cmd, fit);
  fit_cmd->add_option("--out", fit.out, "Model JSON path");

  EvalArgs eval;
  DatasetArgs eval_data;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy and confusion counts of a saved model");
  eval_cmd->add_option("--model", eval.model, "Model JSON")->required();
  add_dataset_flags(eval_cmd, eval_data);

  TrainBpArgs bp;
  std::string bp_model;
  std::string init = "xavier";
  auto* bp_cmd = app.add_subcommand("train-bp", "Backprop training on the constructed architecture");
  add_fit_flags(bp_cmd, bp.fit);
  bp_cmd->add_option("--model", bp_model, "Start from a saved model instead of fitting one");
  bp_cmd->add_option("--init", init, "ff or xavier")->check(CLI::IsMember({"ff", "xavier"}));
  bp_cmd->add_option("--epochs", bp.cfg.epochs, "Training epochs");
  bp_cmd->add_option("--lr", bp.cfg.learning_rate, "SGD learning rate");
  bp_cmd->add_option("--momentum", bp.cfg.momentum, "SGD momentum");
  bp_cmd->add_option("--batch-size", bp.cfg.batch_size, "Mini-batch size");
  bp_cmd->add_option("--bp-seed", bp.cfg.seed, "Initialization and shuffle seed of run 0");
  bp_cmd->add_option("--runs", bp.runs, "Independent runs (seeds bp-seed, bp-seed+1, ...)");
  bp_cmd->add_option("--history", bp.history, "Per-epoch CSV (epoch,train_acc,test_acc,loss)");

  PlotArgs plot;
  std::vector<double> plot_box;
  std::string plot_res = "200";
  auto* plot_cmd = app.add_subcommand("plot", "Grid dump of the decision map or one neuron");
  plot_cmd->add_option("--model", plot.model, "Model JSON")->required();
  plot_cmd->add_option("--box", plot_box, "xmin,xmax,ymin,ymax")->delimiter(',');
  plot_cmd->add_option("--resolution", plot_res, "N or WxH cells");
  plot_cmd->add_option("--target", plot.target, "decision, l1:K or l2:K");
  plot_cmd->add_option("--out", plot.out, "Output prefix (.csv and .ppm are appended)");

  ResponsesArgs resp;
  std::vector<double> resp_box;
  std::string resp_res = "200";
  auto* resp_cmd = app.add_subcommand("responses", "Neuron response maps of one layer");
  resp_cmd->add_option("--model", resp.model, "Model JSON")->required();
  resp_cmd->add_option("--box", resp_box, "xmin,xmax,ymin,ymax")->delimiter(',');
  resp_cmd->add_option("--resolution", resp_res, "N or WxH cells");
  resp_cmd->add_option("--layer", resp.layer, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  resp_cmd->add_option("--neuron", resp.neuron, "Single neuron index (default: all)");
  resp_cmd->add_option("--out", resp.out, "Output prefix");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Accuracy and timing over every bundled dataset");
  bench_cmd->add_option("--runs", bench.runs, "Random-init runs per row");
  bench_cmd->add_option("--seed", bench.seed, "Data, GMM and BP base seed");
  bench_cmd->add_option("--data-dir", bench.data_dir, "Directory holding the bundled real-data CSVs");
  bench_cmd->add_option("--only", bench.only, "Rows to run (labels or dataset names)")->delimiter(',');
  bench_cmd->add_option("--lr", bench.cfg.learning_rate, "SGD learning rate");
  bench_cmd->add_option("--momentum", bench.cfg.momentum, "SGD momentum");
  bench_cmd->add_option("--batch-size", bench.cfg.batch_size, "Mini-batch size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kParameter);
  }

  try {
    json report;
    if (*fit_cmd) {
      report = cmd_fit(fit, std::cout);
    } else if (*eval_cmd) {
      if (eval_cmd->count("--dataset") > 0 || eval_cmd->count("--csv") > 0) eval.data = eval_data;
      report = cmd_eval(eval, std::cout);
    } else if (*bp_cmd) {
      bp.init = init == "ff" ? InitScheme::kFromFF : InitScheme::kXavierUniform;
      if (!bp_model.empty()) {
        bp.model = bp_model;
        if (bp_cmd->count("--dataset") > 0) bp.data = bp.fit.data;
      }
      report = cmd_train_bp(bp, std::cout);
    } else if (*plot_cmd) {
      plot.box = parse_box(plot_box);
      std::tie(plot.nx, plot.ny) = parse_resolution(plot_res);
      report = cmd_plot(plot, std::cout);
    } else if (*resp_cmd) {
      resp.box = parse_box(resp_box);
      std::tie(resp.nx, resp.ny) = parse_resolution(resp_res);
      report = cmd_responses(resp, std::cout);
    } else if (*bench_cmd) {
      report = cmd_bench(bench, std::cout);
    }
    write_report(report_path, report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kInternal);
  }
  return 0;
}
