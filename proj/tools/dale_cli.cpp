#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dale/curve_io.hpp"
#include "dale/errors.hpp"
#include "dale/harness.hpp"
#include "dale/synthdata.hpp"

namespace {

using namespace dale;

int code(ExitCode c) { return static_cast<int>(c); }

std::pair<std::string, std::string> parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size()) {
    throw Error(ErrorKind::usage, "a pair is written 'a,b', got '" + s + "'");
  }
  return {s.substr(0, comma), s.substr(comma + 1)};
}

void print_case1(const Case1Report& r) {
  std::printf("%8s %4s %3s %14s %14s %10s %10s\n", "N", "D", "L", "dale_grad", "ale_value", "dale_s", "ale_s");
  for (const auto& run : r.runs) {
    if (run.skipped) {
      std::printf("%8zu %4zu %3zu  skipped (%s)\n", run.N, run.D, run.L, run.skip_reason.c_str());
      continue;
    }
    std::printf("%8zu %4zu %3zu %14llu %14llu %10.4f %10.4f\n", run.N, run.D, run.L,
                static_cast<unsigned long long>(run.dale_evals.n_gradient),
                static_cast<unsigned long long>(run.ale_evals.n_value), run.dale_median, run.ale_median);
  }
  for (const auto& t : r.trends) {
    std::printf("N=%zu L=%zu: time ratio largest/smallest D  dale %.2f  ale %.2f\n", t.N, t.L, t.dale_ratio,
                t.ale_ratio);
  }
}

void print_case2(const Case2Report& r) {
  std::printf("%6s %12s %12s\n", "K", "ALE NMSE", "DALE NMSE");
  for (const auto& row : r.rows) std::printf("%6zu %12.4f %12.4f\n", row.K, row.ale_mean, row.dale_mean);
}

void print_bike(const BikeReport& r) {
  std::printf("focus feature %s (NMSE vs K=%zu reference)\n", r.options.focus.c_str(), r.options.reference_K);
  std::printf("%6s %14s %14s %14s\n", "K", "DALE/DALEref", "ALE/ALEref", "ALE/DALEref");
  for (const auto& a : r.accuracy) {
    if (a.feature != r.options.focus) continue;
    std::printf("%6zu %14.4f %14.4f %14.4f\n", a.K, a.dale_vs_dale_ref, a.ale_vs_ale_ref, a.ale_vs_dale_ref);
  }
  std::printf("%9s %14s %14s\n", "features", "dale_grad", "ale_value");
  for (const auto& c : r.counts) {
    std::printf("%9zu %14llu %14llu\n", c.features, static_cast<unsigned long long>(c.dale_evals.n_gradient),
                static_cast<unsigned long long>(c.ale_evals.n_value));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-effect toolkit: DALE, ALE, PDP and marginal plots"};
  app.require_subcommand(1);

  // effect
  EffectOptions eff;
  std::string eff_policy = "interpolate";
  std::vector<std::string> eff_pairs;
  auto* effect = app.add_subcommand("effect", "Compute feature-effect curves");
  effect->add_option("--data", eff.data_path, "Input CSV")->required();
  effect->add_option("--model", eff.model, "Model file or builtin:<name>")->required();
  effect->add_option("--method", eff.method, "dale | ale | pdp | mplot");
  effect->add_option("--feature", eff.features, "Feature name or 0-based index (repeatable)");
  effect->add_option("--pair", eff_pairs, "Second-order pair 'a,b' (repeatable)");
  effect->add_option("-K,--bins", eff.K, "Number of bins");
  effect->add_option("--seed", eff.seed, "Seed recorded in provenance");
  effect->add_option("--out", eff.out_dir, "Output directory")->required();
  effect->add_option("--empty-bin-policy", eff_policy, "interpolate | zero | fail");
  effect->add_option("--save-jacobian", eff.save_jacobian, "Write the Jacobian cache here (dale)");
  effect->add_option("--threads", eff.threads, "Worker threads for gradients");

  // rebin
  RebinOptions reb;
  std::string reb_policy = "interpolate";
  auto* rebin = app.add_subcommand("rebin", "Recompute DALE curves from a cached Jacobian");
  rebin->add_option("--cache", reb.cache_path, "Jacobian cache file")->required();
  rebin->add_option("-K,--bins", reb.K_list, "Bin counts")->required()->delimiter(',');
  rebin->add_option("--feature", reb.features, "Feature name or index (repeatable)");
  rebin->add_option("--out", reb.out_dir, "Output directory")->required();
  rebin->add_option("--empty-bin-policy", reb_policy, "interpolate | zero | fail");

  // bench-case1
  Case1Options c1;
  std::string c1_out;
  auto* bench1 = app.add_subcommand("bench-case1", "Evaluation counts and wall time vs N, D, L");
  bench1->add_option("--N", c1.N_list, "Row counts")->delimiter(',');
  bench1->add_option("--D", c1.D_list, "Feature counts")->delimiter(',');
  bench1->add_option("--L", c1.L_list, "Hidden layer counts")->delimiter(',');
  bench1->add_option("--width", c1.width, "Hidden width");
  bench1->add_option("-K,--bins", c1.K, "Number of bins");
  bench1->add_option("--repetitions", c1.repetitions, "Timed repetitions after one warmup");
  bench1->add_option("--seed", c1.seed, "Seed");
  bench1->add_option("--out", c1_out, "Report file")->required();

  // bench-case2
  Case2Options c2;
  std::string c2_out;
  auto* bench2 = app.add_subcommand("bench-case2", "NMSE of DALE and ALE against the numeric ground truth");
  bench2->add_option("-K,--bins", c2.K_list, "Bin counts")->delimiter(',');
  bench2->add_option("--N", c2.N, "Rows per seed");
  bench2->add_option("--seed", c2.seeds, "Seeds to average over")->delimiter(',');
  bench2->add_option("--tau", c2.params.tau, "Band half-width");
  bench2->add_option("--alpha", c2.params.alpha, "Out-of-band amplitude");
  bench2->add_option("--n-quad", c2.n_quad, "Quadrature steps of the ground truth");
  bench2->add_option("--n-mc", c2.n_mc, "Conditional draws per quadrature node");
  bench2->add_option("--out", c2_out, "Report file")->required();

  // bike
  BikeOptions bk;
  std::string bk_out, bk_policy = "interpolate";
  std::vector<std::string> subset;
  auto* bike = app.add_subcommand("bike", "Bike-sharing accuracy and cost tables");
  bike->add_option("--data", bk.data_path, "hour.csv")->required();
  bike->add_option("--feature-subset", subset, "Comma-separated feature columns")->delimiter(',');
  bike->add_option("--target", bk.target, "Target column");
  bike->add_option("--focus", bk.focus, "Feature for the accuracy table");
  bike->add_option("-K,--bins", bk.K_list, "Bin counts")->delimiter(',');
  bike->add_option("--reference-bins", bk.reference_K, "Reference bin count");
  bike->add_option("--hidden", bk.hidden, "Hidden widths")->delimiter(',');
  bike->add_option("--epochs", bk.train.epochs, "Training epochs");
  bike->add_option("--learning-rate", bk.train.learning_rate, "Adam step size");
  bike->add_option("--seed", bk.train.seed, "Seed");
  bike->add_option("--empty-bin-policy", bk_policy, "interpolate | zero | fail");
  bike->add_option("--out", bk_out, "Report file")->required();

  // gen
  GeneratorSpec gs;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
  gen->add_option("--generator", gs.name, "toy | ood-demo | case1 | case2")->required();
  gen->add_option("-N,--rows", gs.N, "Rows");
  gen->add_option("--dim", gs.D, "Columns (case1)");
  gen->add_option("--seed", gs.seed, "Seed");
  gen->add_option("--out", gen_out, "CSV path")->required();

  // train
  TrainCommandOptions tr;
  std::string tr_act = "tanh";
  auto* train = app.add_subcommand("train", "Train an MLP on a CSV and save the model file");
  train->add_option("--data", tr.data_path, "Input CSV")->required();
  train->add_option("--target", tr.target, "Target column")->required();
  train->add_option("--hidden", tr.hidden, "Hidden widths")->delimiter(',');
  train->add_option("--activation", tr_act, "tanh | softplus | identity");
  train->add_option("--epochs", tr.train.epochs, "Epochs");
  train->add_option("--learning-rate", tr.train.learning_rate, "Adam step size");
  train->add_option("--batch-size", tr.train.batch_size, "Minibatch size");
  train->add_option("--seed", tr.train.seed, "Seed");
  train->add_option("--out", tr.out_path, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::usage);
  }

  try {
    if (*effect) {
      eff.policy = parse_empty_bin_policy(eff_policy);
      for (const auto& p : eff_pairs) eff.pairs.push_back(parse_pair(p));
      const auto run = cmd_effect(eff);
      std::cout << run.summary << "\n";
    } else if (*rebin) {
      reb.policy = parse_empty_bin_policy(reb_policy);
      const auto run = cmd_rebin(reb);
      std::cout << run.summary << "\n";
    } else if (*bench1) {
      const auto report = bench_case1(c1);
      write_json_file(c1_out, report.to_json());
      print_case1(report);
    } else if (*bench2) {
      const auto report = bench_case2(c2);
      write_json_file(c2_out, report.to_json());
      print_case2(report);
    } else if (*bike) {
      if (!subset.empty()) bk.features = subset;
      bk.policy = parse_empty_bin_policy(bk_policy);
      const auto report = cmd_bike(bk);
      write_json_file(bk_out, report.to_json());
      print_bike(report);
    } else if (*gen) {
      write_csv(gen_out, generate(gs));
      std::cout << "wrote " << gs.N << " rows to " << gen_out << "\n";
    } else if (*train) {
      tr.activation = parse_activation(tr_act);
      const auto loss = cmd_train(tr);
      std::cout << "final training MSE " << loss.back() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return code(exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::failure);
  }
  return 0;
}
