#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ffmlp/commands.hpp"

using namespace ffmlp;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "ffmlp_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string fit_model(const std::string& dataset, const std::string& name) {
  FitArgs a;
  a.data.dataset = dataset;
  a.out = (scratch() / name).string();
  std::ostringstream sink;
  cmd_fit(a, sink);
  return a.out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FFMLP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Fit, ReportFields) {
  FitArgs a;
  a.data.dataset = "xor";
  std::ostringstream out;
  const json r = cmd_fit(a, out);
  EXPECT_EQ(r["D1"], 4);
  EXPECT_EQ(r["D_out"], 2);
  EXPECT_EQ(r["planes_initial"], 4);
  EXPECT_EQ(r["oracle"]["unexplained_mismatches"], 0);
  EXPECT_NE(out.str().find("architecture: D_in=2 D1=4"), std::string::npos);
  EXPECT_TRUE(r.contains("timings"));
}

TEST(Fit, ThresholdValidated) {
  FitArgs a;
  a.threshold = 1.5;
  std::ostringstream out;
  EXPECT_THROW(cmd_fit(a, out), ParameterError);
}

TEST(Eval, ReproducesFitAccuracy) {
  FitArgs a;
  a.data.dataset = "moons2";
  a.out = (scratch() / "moons2.json").string();
  std::ostringstream sink;
  const json fit = cmd_fit(a, sink);
  EvalArgs e;
  e.model = a.out;
  const json ev = cmd_eval(e, sink);
  EXPECT_EQ(ev["train"]["accuracy"], fit["train_accuracy"]);
  EXPECT_EQ(ev["test"]["accuracy"], fit["test_accuracy"]);
  Index trace = 0, total = 0;
  const auto& cm = ev["test"]["confusion"];
  for (std::size_t r = 0; r < cm.size(); ++r)
    for (std::size_t c = 0; c < cm[r].size(); ++c) {
      total += cm[r][c].get<Index>();
      if (r == c) trace += cm[r][c].get<Index>();
    }
  EXPECT_EQ(total, ev["test"]["n"].get<Index>());
  EXPECT_DOUBLE_EQ(static_cast<double>(trace) / static_cast<double>(total), ev["test"]["accuracy"].get<double>());
}

TEST(Eval, ConfusionUnderRelabeling) {
  const std::vector<ClassId> truth = {0, 0, 1, 1, 2, 2, 2};
  const std::vector<ClassId> pred = {0, 1, 1, 1, 2, 0, 2};
  const auto cm = confusion(truth, pred, 3);
  EXPECT_EQ(cm[0][0] + cm[1][1] + cm[2][2], 5);
  // Relabeling both sides with the same permutation permutes rows and columns alike.
  const std::vector<ClassId> perm = {2, 0, 1};
  std::vector<ClassId> t2, p2;
  for (ClassId c : truth) t2.push_back(perm[static_cast<std::size_t>(c)]);
  for (ClassId c : pred) p2.push_back(perm[static_cast<std::size_t>(c)]);
  const auto cm2 = confusion(t2, p2, 3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_EQ(cm2[static_cast<std::size_t>(perm[r])][static_cast<std::size_t>(perm[c])], cm[r][c]);
}

TEST(Eval, DimensionMismatchIsParameterError) {
  const auto model = fit_model("xor", "xor_dim.json");
  EvalArgs e;
  e.model = model;
  DatasetArgs iris;
  iris.dataset = "iris";
  e.data = iris;
  std::ostringstream sink;
  EXPECT_THROW(cmd_eval(e, sink), ParameterError);
}

TEST(Plot, SingleCellIsCenterPrediction) {
  const auto model = fit_model("xor", "xor_plot.json");
  const ModelFile m = deserialize(model);
  const GridBox box{0.5, 1.5, -3.0, -1.0};
  const GridDump g = dump_grid(m.net, box, 1, 1, {});
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g.x[0], 1.0);
  EXPECT_EQ(g.y[0], -2.0);
  EXPECT_EQ(g.value[0], predict(m.net, Vector{{1.0, -2.0}}));
}

TEST(Plot, RegionNeuronTracksItsRegion) {
  const auto model = fit_model("xor", "xor_l2.json");
  const ModelFile m = deserialize(model);
  const auto it = std::find(m.net.code_order.begin(), m.net.code_order.end(), SignCode::from_string("11"));
  ASSERT_NE(it, m.net.code_order.end());
  const Index r = it - m.net.code_order.begin();
  const GridDump g = dump_grid(m.net, {-5, 5, -5, 5}, 80, 80, {GridTargetKind::kLayer2, r});
  Index fired = 0;
  std::set<std::pair<bool, bool>> quadrants;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vector p{{g.x[i], g.y[i]}};
    const bool inside = code_of(m.net.planes, p).str() == "11";
    // Outside its region the neuron may only fire where the margin condition fails.
    if (g.value[i] > 0.0) {
      ++fired;
      if (!inside) EXPECT_FALSE(isolation_holds(m.net, p));
      if (inside && std::abs(p(0)) > 0.5 && std::abs(p(1)) > 0.5) quadrants.insert({p(0) > 0, p(1) > 0});
    } else if (inside) {
      EXPECT_FALSE(isolation_holds(m.net, p));
    }
  }
  EXPECT_GT(fired, 800);
  EXPECT_EQ(quadrants.size(), 1u);
}

TEST(Plot, ThreeBlobDecisionMapHasThreeColors) {
  const auto model = fit_model("blobs3", "blobs3.json");
  PlotArgs p;
  p.model = model;
  p.nx = p.ny = 60;
  p.out = (scratch() / "blobs3_map").string();
  std::ostringstream sink;
  cmd_plot(p, sink);
  std::ifstream ppm(p.out + ".ppm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  ppm >> magic >> w >> h >> maxval;
  ppm.get();
  EXPECT_EQ(magic, "P6");
  EXPECT_EQ(w, 60);
  EXPECT_EQ(h, 60);
  std::set<std::array<unsigned char, 3>> colors;
  std::array<unsigned char, 3> px{};
  int pixels = 0;
  while (ppm.read(reinterpret_cast<char*>(px.data()), 3)) {
    colors.insert(px);
    ++pixels;
  }
  EXPECT_EQ(pixels, 3600);
  EXPECT_EQ(colors.size(), 3u);
  std::ifstream csv(p.out + ".csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "x,y,value");
}

TEST(Plot, RejectsBadRequests) {
  const auto model = fit_model("xor", "xor_bad.json");
  const ModelFile m = deserialize(model);
  EXPECT_THROW(dump_grid(m.net, {}, 0, 5, {}), ParameterError);
  EXPECT_THROW(dump_grid(m.net, {1, 0, 0, 1}, 5, 5, {}), ParameterError);
  EXPECT_THROW(dump_grid(m.net, {}, 5, 5, {GridTargetKind::kLayer1, 99}), ParameterError);
  EXPECT_THROW(parse_target("l3:0"), ParameterError);
  EXPECT_THROW(parse_target("l1:x"), ParameterError);
  EXPECT_EQ(parse_target("l2:7").neuron, 7);
}

TEST(Responses, OneFilePairPerNeuron) {
  const auto model = fit_model("xor", "xor_resp.json");
  ResponsesArgs a;
  a.model = model;
  a.nx = a.ny = 10;
  a.layer = "l1";
  a.out = (scratch() / "resp").string();
  std::ostringstream sink;
  const json r = cmd_responses(a, sink);
  EXPECT_EQ(r["files"].size(), 4u);
  EXPECT_TRUE(fs::exists(a.out + "_l1_3.ppm"));
}

TEST(TrainBp, HistoryAndRuns) {
  TrainBpArgs a;
  a.fit.data.dataset = "xor";
  a.cfg.epochs = 3;
  a.runs = 2;
  a.history = (scratch() / "hist.csv").string();
  std::ostringstream sink;
  const json r = cmd_train_bp(a, sink);
  EXPECT_EQ(r["runs"].size(), 2u);
  EXPECT_EQ(r["runs"][1]["seed"], 1);
  std::ifstream h((scratch() / "hist_run1.csv").string());
  std::string line;
  int lines = 0;
  while (std::getline(h, line)) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Binary, ExitCodes) {
  const std::string out = (scratch() / "bin_model.json").string();
  EXPECT_EQ(run_cli("fit --dataset xor --out " + out), 0);
  EXPECT_EQ(run_cli("eval --model " + out), 0);
  EXPECT_EQ(run_cli("fit --dataset nope"), 2);
  EXPECT_EQ(run_cli("fit --threshold 2"), 2);
  EXPECT_EQ(run_cli("fit --bogus-flag"), 2);
  EXPECT_EQ(run_cli("eval --model " + out + " --dataset iris"), 2);
  std::ofstream((scratch() / "empty.csv").string()).close();
  EXPECT_EQ(run_cli("fit --dataset csv --csv " + (scratch() / "empty.csv").string()), 3);
  EXPECT_EQ(run_cli("eval --model /nonexistent/model.json"), 3);
  std::ofstream((scratch() / "garbage.json").string()) << "[1, 2";
  EXPECT_EQ(run_cli("eval --model " + (scratch() / "garbage.json").string()), 3);
  EXPECT_EQ(run_cli("plot --model " + out + " --target l9:0"), 2);
}
