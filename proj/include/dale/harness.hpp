#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dale/binning.hpp"
#include "dale/curve_io.hpp"
#include "dale/dataset.hpp"
#include "dale/mlp.hpp"
#include "dale/model.hpp"
#include "dale/synthdata.hpp"
#include "dale/trainer.hpp"

namespace dale {

// "builtin:toy", "builtin:ood-demo" (optionally "builtin:ood-demo:<gamma>"),
// "builtin:case2" (optionally "builtin:case2:<tau>:<alpha>"), otherwise the
// path of an MLP model file.
std::unique_ptr<DifferentiableModel> load_model_spec(const std::string& spec);

// A feature token is a column name or a 0-based column index.
std::size_t resolve_feature(const Dataset& data, const std::string& token);

// Wraps a model trained on standardized inputs and targets so that it reads
// and returns original-scale values: g(x) = y_mean + y_std * f((x - mean) / std).
class StandardizedModel final : public DifferentiableModel {
 public:
  StandardizedModel(std::shared_ptr<const DifferentiableModel> inner, std::vector<double> x_mean,
                    std::vector<double> x_std, double y_mean, double y_std);

  std::size_t dim() const override { return inner_->dim(); }
  std::string name() const override { return "standardized-" + inner_->name(); }

 protected:
  double do_value(std::span<const double> x) const override;
  void do_gradient(std::span<const double> x, std::span<double> out) const override;
  double do_second_derivative(std::span<const double> x, std::size_t l,
                              std::size_t m) const override;
  void do_value_batch(const Matrix& points, std::span<double> out) const override;

 private:
  std::vector<double> to_inner(std::span<const double> x) const;

  std::shared_ptr<const DifferentiableModel> inner_;
  std::vector<double> mean_, std_;
  double y_mean_, y_std_;
};

// ---- effect -------------------------------------------------------------

struct EffectOptions {
  std::string data_path;
  std::string model;
  std::string method = "dale";         // dale | ale | pdp | mplot
  std::vector<std::string> features;   // empty: every feature
  std::vector<std::pair<std::string, std::string>> pairs;  // second-order (dale/ale only)
  std::size_t K = 20;
  std::string out_dir;
  EmptyBinPolicy policy = EmptyBinPolicy::interpolate;
  std::uint64_t seed = 0;
  std::string save_jacobian;  // dale only; empty: no cache
  unsigned threads = 1;
};

struct OutputFile {
  std::string name;  // file name inside the output directory
  Json content;
};

struct EffectRun {
  std::vector<OutputFile> files;  // curve files, then report.json
  CounterSnapshot evaluations;
  double seconds = 0.0;
  std::string summary;  // human-readable echo
  Matrix jacobian;      // dale only
};

// Computes everything in memory. Curve files hold no timing; the timing
// lives in report.json alone.
EffectRun run_effect(const Dataset& data, const DifferentiableModel& model, const std::string& model_label,
                     const EffectOptions& options);
// Loads inputs, runs, then writes the files; nothing is written on failure.
EffectRun cmd_effect(const EffectOptions& options);

// ---- rebin --------------------------------------------------------------

struct RebinOptions {
  std::string cache_path;
  std::vector<std::size_t> K_list;
  std::vector<std::string> features;  // empty: every feature
  std::string out_dir;
  EmptyBinPolicy policy = EmptyBinPolicy::interpolate;
};

EffectRun run_rebin(const JacobianCache& cache, const RebinOptions& options);
EffectRun cmd_rebin(const RebinOptions& options);

// Writes every file of a run into `dir`, creating it if needed.
void write_outputs(const std::string& dir, const std::vector<OutputFile>& files);

// ---- case 1: cost and wall time -----------------------------------------

struct Case1Options {
  std::vector<std::size_t> N_list{1000};
  std::vector<std::size_t> D_list{2, 5, 10, 20, 50};
  std::vector<std::size_t> L_list{2};
  std::size_t width = 256;
  std::size_t K = 20;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
};

struct Case1Run {
  std::size_t N = 0, D = 0, L = 0;
  bool skipped = false;
  std::string skip_reason;
  CounterSnapshot dale_evals, ale_evals;  // per repetition
  bool counts_deterministic = true;
  std::vector<double> dale_times, ale_times;  // seconds, warmup excluded
  double dale_median = 0.0, ale_median = 0.0;
};

struct Case1Trend {
  std::size_t N = 0, L = 0;
  double dale_slope = 0.0, ale_slope = 0.0;  // seconds per feature
  double dale_ratio = 0.0, ale_ratio = 0.0;  // time at largest D / time at smallest D
};

struct Case1Report {
  Case1Options options;
  std::vector<Case1Run> runs;
  std::vector<Case1Trend> trends;
  Json to_json() const;
};

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

Case1Report bench_case1(const Case1Options& options);

// ---- case 2: accuracy ---------------------------------------------------

struct Case2Options {
  std::vector<std::size_t> K_list{1, 2, 3, 4, 5, 10, 20, 40};
  std::size_t N = 10000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  Case2Params params;
  std::size_t n_quad = 400;
  std::size_t n_mc = 2000;
  std::uint64_t truth_seed = 12345;
};

struct Case2Row {
  std::size_t K = 0;
  std::vector<double> dale_nmse, ale_nmse;  // per seed
  double dale_mean = 0.0, ale_mean = 0.0;
};

struct Case2Report {
  Case2Options options;
  std::vector<Case2Row> rows;
  Json to_json() const;
};

// NMSE of the x1 effect against numeric_ale_truth on each curve's edges.
Case2Report bench_case2(const Case2Options& options);

// ---- bike sharing -------------------------------------------------------

std::vector<std::string> default_bike_features();

struct BikeOptions {
  std::string data_path;
  std::vector<std::string> features = default_bike_features();
  std::string target = "cnt";
  std::string focus = "hr";
  std::vector<std::size_t> K_list{25, 50, 100};
  std::size_t reference_K = 200;
  std::vector<std::size_t> hidden{64, 64, 64};
  TrainOptions train{30, 1e-3, 64, 0, 0.9, 0.999, 1e-8};
  EmptyBinPolicy policy = EmptyBinPolicy::interpolate;
};

struct BikeAccuracyRow {
  std::string feature;
  std::size_t K = 0;
  double dale_vs_dale_ref = 0.0;
  double ale_vs_ale_ref = 0.0;
  double ale_vs_dale_ref = 0.0;
};

struct BikeCountRow {
  std::size_t features = 0;  // prefix length
  CounterSnapshot dale_evals, ale_evals;
  double dale_seconds = 0.0, ale_seconds = 0.0;
};

struct BikeReport {
  BikeOptions options;
  std::size_t N = 0;
  std::vector<double> loss_history;
  std::vector<BikeAccuracyRow> accuracy;
  std::vector<BikeCountRow> counts;
  Json to_json() const;
};

BikeReport run_bike(const Dataset& features, std::span<const double> target, const BikeOptions& options);
// Reads the selected columns plus the target from options.data_path.
BikeReport cmd_bike(const BikeOptions& options);

// ---- data and model helpers ---------------------------------------------

struct TrainCommandOptions {
  std::string data_path;
  std::string target;
  std::vector<std::size_t> hidden{64, 64};
  Activation activation = Activation::tanh;
  TrainOptions train;
  std::string out_path;
};

// Trains on every column except the target and saves the model file.
// Returns the loss history.
std::vector<double> cmd_train(const TrainCommandOptions& options);

}  // namespace dale
