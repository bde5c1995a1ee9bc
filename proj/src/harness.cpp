#include "dale/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <new>
#include <sstream>

#include "dale/csv.hpp"
#include "dale/errors.hpp"
#include "dale/estimators.hpp"
#include "dale/jacobian.hpp"
#include "dale/model_io.hpp"
#include "dale/oracles.hpp"

namespace dale {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::usage, "bad " + what + " '" + s + "'");
  }
}

Json counts_json(const CounterSnapshot& c) {
  return {{"value", c.n_value}, {"gradient", c.n_gradient}, {"second", c.n_second}};
}

std::string counts_text(const CounterSnapshot& c) {
  return "value=" + std::to_string(c.n_value) + " gradient=" + std::to_string(c.n_gradient) +
         " second=" + std::to_string(c.n_second);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::size_t> resolve_features(const Dataset& data, const std::vector<std::string>& tokens) {
  std::vector<std::size_t> out;
  if (tokens.empty()) {
    for (std::size_t s = 0; s < data.dim(); ++s) out.push_back(s);
  } else {
    for (const auto& t : tokens) out.push_back(resolve_feature(data, t));
  }
  return out;
}

std::string file_stem(const std::string& method, const std::string& feature, std::size_t K) {
  return method + "_" + feature + "_K" + std::to_string(K) + ".json";
}

CurveProvenance provenance_for(const Dataset& data, const std::string& model, std::uint64_t seed,
                               std::size_t feature, EmptyBinPolicy policy, CounterSnapshot evals) {
  CurveProvenance p;
  p.N = data.size();
  p.D = data.dim();
  p.seed = seed;
  p.model = model;
  p.feature_name = data.name(feature);
  p.empty_bin_policy = to_string(policy);
  p.evaluations = evals;
  return p;
}

void standardize_column(const Dataset& data, std::size_t s, double& mean, double& sd) {
  const auto col = data.column(s);
  mean = 0.0;
  for (double v : col) mean += v;
  mean /= static_cast<double>(col.size());
  double ss = 0.0;
  for (double v : col) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(col.size()));
  if (!(sd > 0.0)) {
    throw Error(ErrorKind::numeric, "column '" + data.name(s) + "' is constant and cannot be standardized");
  }
}

Dataset prefix_columns(const Dataset& data, std::size_t d) {
  Matrix m(data.size(), d);
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t s = 0; s < d; ++s) m(i, s) = data(i, s);
  return Dataset(std::move(m), std::vector<std::string>(data.names().begin(), data.names().begin() + d));
}

}  // namespace

std::unique_ptr<DifferentiableModel> load_model_spec(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) return std::make_unique<MlpModel>(load_mlp(spec));
  const auto parts = split_on(spec.substr(prefix.size()), ':');
  const std::string name = parts.empty() ? "" : parts[0];
  if (name == "toy" && parts.size() == 1) return std::make_unique<AnalyticModel>(toy_model());
  if (name == "ood-demo" && parts.size() <= 2) {
    const double gamma = parts.size() == 2 ? parse_number(parts[1], "gamma") : 100.0;
    return std::make_unique<AnalyticModel>(ood_model(gamma));
  }
  if (name == "case2" && (parts.size() == 1 || parts.size() == 3)) {
    const double tau = parts.size() == 3 ? parse_number(parts[1], "tau") : 0.5;
    const double alpha = parts.size() == 3 ? parse_number(parts[2], "alpha") : 10.0;
    return std::make_unique<AnalyticModel>(case2_model(tau, alpha));
  }
  throw Error(ErrorKind::usage, "unknown builtin model '" + spec + "'");
}

std::size_t resolve_feature(const Dataset& data, const std::string& token) {
  const auto& names = data.names();
  const auto it = std::find(names.begin(), names.end(), token);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  if (!token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const auto idx = std::stoull(token);
    if (idx >= data.dim()) {
      throw Error(ErrorKind::parameter, "feature index " + token + " out of range (D = " +
                                            std::to_string(data.dim()) + ")");
    }
    return idx;
  }
  return data.index_of(token);
}

// ---- StandardizedModel ----------------------------------------------------

StandardizedModel::StandardizedModel(std::shared_ptr<const DifferentiableModel> inner,
                                     std::vector<double> x_mean, std::vector<double> x_std,
                                     double y_mean, double y_std)
    : inner_(std::move(inner)), mean_(std::move(x_mean)), std_(std::move(x_std)), y_mean_(y_mean), y_std_(y_std) {
  if (mean_.size() != inner_->dim() || std_.size() != inner_->dim()) {
    throw Error(ErrorKind::shape, "standardization vectors do not match the model dimension");
  }
}

std::vector<double> StandardizedModel::to_inner(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) z[s] = (x[s] - mean_[s]) / std_[s];
  return z;
}

double StandardizedModel::do_value(std::span<const double> x) const {
  return y_mean_ + y_std_ * inner_->value(to_inner(x));
}

void StandardizedModel::do_gradient(std::span<const double> x, std::span<double> out) const {
  inner_->gradient(to_inner(x), out);
  for (std::size_t s = 0; s < out.size(); ++s) out[s] *= y_std_ / std_[s];
}

double StandardizedModel::do_second_derivative(std::span<const double> x, std::size_t l,
                                               std::size_t m) const {
  return inner_->second_derivative(to_inner(x), l, m) * y_std_ / (std_[l] * std_[m]);
}

void StandardizedModel::do_value_batch(const Matrix& points, std::span<double> out) const {
  Matrix z(points.rows(), points.cols());
  for (std::size_t i = 0; i < points.rows(); ++i)
    for (std::size_t s = 0; s < points.cols(); ++s) z(i, s) = (points(i, s) - mean_[s]) / std_[s];
  const auto f = inner_->value_batch(z);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = y_mean_ + y_std_ * f[i];
}

// ---- effect -----------------------------------------------------------------

EffectRun run_effect(const Dataset& data, const DifferentiableModel& model, const std::string& model_label,
                     const EffectOptions& o) {
  if (data.empty()) throw Error(ErrorKind::empty_input, "dataset has no rows");
  if (data.dim() != model.dim()) {
    throw Error(ErrorKind::shape, "dataset has " + std::to_string(data.dim()) + " features, model '" +
                                      model_label + "' expects " + std::to_string(model.dim()));
  }
  if (o.K < 1) throw Error(ErrorKind::parameter, "K must be at least 1");
  const std::string& method = o.method;
  if (method != "dale" && method != "ale" && method != "pdp" && method != "mplot") {
    throw Error(ErrorKind::usage, "unknown method '" + method + "' (expected dale, ale, pdp or mplot)");
  }
  if (!o.pairs.empty() && method != "dale" && method != "ale") {
    throw Error(ErrorKind::usage, "feature pairs are supported for dale and ale only");
  }
  if (!o.save_jacobian.empty() && method != "dale") {
    throw Error(ErrorKind::usage, "a Jacobian cache can only be saved by the dale method");
  }
  const auto features = resolve_features(data, o.features);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [a, b] : o.pairs) {
    const auto l = resolve_feature(data, a);
    const auto m = resolve_feature(data, b);
    if (l == m) throw Error(ErrorKind::parameter, "a feature pair needs two distinct features");
    pairs.emplace_back(l, m);
  }

  EffectRun run;
  const auto start_counts = model.counters().snapshot();
  const auto t0 = Clock::now();

  if (method == "dale") {
    const auto before = model.counters().snapshot();
    run.jacobian = jacobian_batch(model, data, o.threads);
    const auto jac_evals = model.counters().snapshot() - before;
    for (auto s : features) {
      const auto curve = rebin(run.jacobian.column(s), data.column(s), o.K, o.policy, s);
      run.files.push_back({file_stem("dale", data.name(s), o.K),
                           curve_to_json(curve, provenance_for(data, model_label, o.seed, s, o.policy, jac_evals))});
    }
  } else if (method == "ale") {
    for (auto s : features) {
      const auto before = model.counters().snapshot();
      const auto xs = data.column(s);
      const auto curve = ale_first_order(model, data, s, make_grid_for(xs, o.K), o.policy);
      const auto evals = model.counters().snapshot() - before;
      run.files.push_back({file_stem("ale", data.name(s), o.K),
                           curve_to_json(curve, provenance_for(data, model_label, o.seed, s, o.policy, evals))});
    }
  } else {
    for (auto s : features) {
      const auto before = model.counters().snapshot();
      const auto grid = make_grid_for(data.column(s), o.K);
      const PointCurve curve = method == "pdp" ? pdp(model, data, s, grid.edges)
                                               : mplot(model, data, s, grid, o.policy);
      const auto evals = model.counters().snapshot() - before;
      run.files.push_back({file_stem(method, data.name(s), o.K),
                           point_curve_to_json(curve, provenance_for(data, model_label, o.seed, s, o.policy, evals))});
    }
  }

  for (const auto& [l, m] : pairs) {
    const auto before = model.counters().snapshot();
    const auto gl = make_grid_for(data.column(l), o.K);
    const auto gm = make_grid_for(data.column(m), o.K);
    EffectSurface surface;
    if (method == "dale") {
      const auto h = hessian_entry_batch(model, data, l, m, o.threads);
      surface = dale_second_order(h, data.column(l), data.column(m), gl, gm, o.policy, l, m);
    } else {
      surface = ale_second_order(model, data, l, m, gl, gm, o.policy);
    }
    const auto evals = model.counters().snapshot() - before;
    auto prov = provenance_for(data, model_label, o.seed, l, o.policy, evals);
    prov.feature_name = data.name(l) + "," + data.name(m);
    run.files.push_back({method + "_" + data.name(l) + "_" + data.name(m) + "_K" + std::to_string(o.K) + ".json",
                         surface_to_json(surface, prov, data.name(l), data.name(m))});
  }

  run.seconds = seconds_since(t0);
  run.evaluations = model.counters().snapshot() - start_counts;

  Json report;
  report["format"] = "dale-report/1";
  report["command"] = "effect";
  report["method"] = method;
  report["K"] = o.K;
  report["N"] = data.size();
  report["D"] = data.dim();
  report["seed"] = o.seed;
  report["model"] = model_label;
  report["empty_bin_policy"] = to_string(o.policy);
  Json names = Json::array();
  for (auto s : features) names.push_back(data.name(s));
  report["features"] = std::move(names);
  report["evaluations"] = counts_json(run.evaluations);
  report["wall_time_s"] = run.seconds;
  Json files = Json::array();
  for (const auto& f : run.files) files.push_back(f.name);
  report["files"] = std::move(files);
  run.files.push_back({"report.json", std::move(report)});

  std::ostringstream msg;
  msg << method << ": N=" << data.size() << " D=" << data.dim() << " K=" << o.K
      << " curves=" << run.files.size() - 1 << " evaluations " << counts_text(run.evaluations)
      << " time=" << run.seconds << "s";
  run.summary = msg.str();
  return run;
}

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& f : files) write_json_file((std::filesystem::path(dir) / f.name).string(), f.content);
}

EffectRun cmd_effect(const EffectOptions& o) {
  if (o.out_dir.empty()) throw Error(ErrorKind::usage, "an output directory is required");
  const Dataset data = ingest_csv(o.data_path);
  const auto model = load_model_spec(o.model);
  EffectRun run = run_effect(data, *model, o.model, o);
  if (!o.save_jacobian.empty()) {
    save_jacobian_cache(o.save_jacobian, JacobianCache{data, run.jacobian, o.model});
  }
  write_outputs(o.out_dir, run.files);
  return run;
}

// ---- rebin ------------------------------------------------------------------

EffectRun run_rebin(const JacobianCache& cache, const RebinOptions& o) {
  if (o.K_list.empty()) throw Error(ErrorKind::parameter, "K list is empty");
  const Dataset& data = cache.data;
  const auto features = resolve_features(data, o.features);
  EffectRun run;
  const auto t0 = Clock::now();
  for (auto K : o.K_list) {
    if (K < 1) throw Error(ErrorKind::parameter, "K must be at least 1");
    for (auto s : features) {
      const auto curve = rebin(cache.jacobian.column(s), data.column(s), K, o.policy, s);
      run.files.push_back({file_stem("dale", data.name(s), K),
                           curve_to_json(curve, provenance_for(data, cache.model, 0, s, o.policy, {}))});
    }
  }
  run.seconds = seconds_since(t0);
  Json report;
  report["format"] = "dale-report/1";
  report["command"] = "rebin";
  report["K_list"] = o.K_list;
  report["N"] = data.size();
  report["D"] = data.dim();
  report["model"] = cache.model;
  report["checksum"] = "verified";
  report["evaluations"] = counts_json(run.evaluations);
  report["wall_time_s"] = run.seconds;
  Json files = Json::array();
  for (const auto& f : run.files) files.push_back(f.name);
  report["files"] = std::move(files);
  run.files.push_back({"report.json", std::move(report)});
  run.summary = "rebin: " + std::to_string(run.files.size() - 1) + " curves from cached Jacobian, evaluations " +
                counts_text(run.evaluations);
  return run;
}

EffectRun cmd_rebin(const RebinOptions& o) {
  if (o.out_dir.empty()) throw Error(ErrorKind::usage, "an output directory is required");
  const auto cache = load_jacobian_cache(o.cache_path);
  EffectRun run = run_rebin(cache, o);
  write_outputs(o.out_dir, run.files);
  return run;
}

// ---- case 1 -----------------------------------------------------------------

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::parameter, "slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::numeric, "slope undefined: all x values equal");
  return sxy / sxx;
}

Case1Report bench_case1(const Case1Options& o) {
  if (o.repetitions < 3) throw Error(ErrorKind::parameter, "repetitions must be at least 3");
  if (o.N_list.empty() || o.D_list.empty() || o.L_list.empty()) {
    throw Error(ErrorKind::parameter, "N, D and L lists must be non-empty");
  }
  Case1Report report;
  report.options = o;
  for (auto N : o.N_list) {
    for (auto L : o.L_list) {
      for (auto D : o.D_list) {
        Case1Run run;
        run.N = N;
        run.D = D;
        run.L = L;
        try {
          const Dataset X = gen_case1(N, D, o.seed);
          std::vector<std::size_t> widths{D};
          for (std::size_t l = 0; l < L; ++l) widths.push_back(o.width);
          widths.push_back(1);
          const MlpModel model(widths, Activation::tanh, o.seed + 1);

          auto timed = [&](auto&& fn, std::vector<double>& times, CounterSnapshot& evals) {
            for (std::size_t r = 0; r <= o.repetitions; ++r) {
              const auto before = model.counters().snapshot();
              const auto t0 = Clock::now();
              fn();
              const double dt = seconds_since(t0);
              const auto used = model.counters().snapshot() - before;
              if (r == 0) {
                evals = used;
                continue;  // warmup
              }
              if (!(used == evals)) run.counts_deterministic = false;
              times.push_back(dt);
            }
          };
          timed([&] {
            const Matrix J = jacobian_batch(model, X);
            dale_all_features(J, X, o.K);
          }, run.dale_times, run.dale_evals);
          timed([&] { ale_all_features(model, X, o.K); }, run.ale_times, run.ale_evals);
          run.dale_median = median(run.dale_times);
          run.ale_median = median(run.ale_times);
        } catch (const std::bad_alloc&) {
          run.skipped = true;
          run.skip_reason = "out of memory";
        }
        report.runs.push_back(std::move(run));
      }
      Case1Trend trend;
      trend.N = N;
      trend.L = L;
      std::vector<double> ds, dt, at;
      for (const auto& r : report.runs) {
        if (r.N != N || r.L != L || r.skipped) continue;
        ds.push_back(static_cast<double>(r.D));
        dt.push_back(r.dale_median);
        at.push_back(r.ale_median);
      }
      if (ds.size() >= 2) {
        trend.dale_slope = ls_slope(ds, dt);
        trend.ale_slope = ls_slope(ds, at);
        const auto lo = std::min_element(ds.begin(), ds.end()) - ds.begin();
        const auto hi = std::max_element(ds.begin(), ds.end()) - ds.begin();
        trend.dale_ratio = dt[hi] / dt[lo];
        trend.ale_ratio = at[hi] / at[lo];
        report.trends.push_back(trend);
      }
    }
  }
  return report;
}

Json Case1Report::to_json() const {
  Json j;
  j["format"] = "dale-report/1";
  j["command"] = "bench-case1";
  j["K"] = options.K;
  j["width"] = options.width;
  j["repetitions"] = options.repetitions;
  j["seed"] = options.seed;
  j["timing"] = "median of repetitions after one warmup, steady clock, seconds";
  Json rs = Json::array();
  for (const auto& r : runs) {
    Json e;
    e["N"] = r.N;
    e["D"] = r.D;
    e["L"] = r.L;
    if (r.skipped) {
      e["skipped"] = r.skip_reason;
    } else {
      e["counts_deterministic"] = r.counts_deterministic;
      e["dale"] = {{"evaluations", counts_json(r.dale_evals)}, {"median_s", r.dale_median}, {"times_s", r.dale_times}};
      e["ale"] = {{"evaluations", counts_json(r.ale_evals)}, {"median_s", r.ale_median}, {"times_s", r.ale_times}};
    }
    rs.push_back(std::move(e));
  }
  j["runs"] = std::move(rs);
  Json ts = Json::array();
  for (const auto& t : trends) {
    ts.push_back({{"N", t.N}, {"L", t.L}, {"dale_slope_s_per_feature", t.dale_slope},
                  {"ale_slope_s_per_feature", t.ale_slope}, {"dale_ratio", t.dale_ratio},
                  {"ale_ratio", t.ale_ratio}});
  }
  j["trends"] = std::move(ts);
  return j;
}

// ---- case 2 -----------------------------------------------------------------

Case2Report bench_case2(const Case2Options& o) {
  if (o.K_list.empty()) throw Error(ErrorKind::parameter, "K list is empty");
  if (o.seeds.empty()) throw Error(ErrorKind::parameter, "seed list is empty");
  const auto model = case2_model(o.params.tau, o.params.alpha);
  NumericTruthOptions topt;
  topt.n_quad = o.n_quad;
  topt.n_mc = o.n_mc;
  topt.seed = o.truth_seed;
  const auto truth =
      numeric_ale_truth(model, 0, case2_conditional_sampler(o.params), o.params.lo, o.params.hi, topt);

  Case2Report report;
  report.options = o;
  for (auto K : o.K_list) report.rows.push_back({K, {}, {}, 0.0, 0.0});
  for (auto seed : o.seeds) {
    const Dataset X = gen_case2(o.N, seed, o.params);
    const Matrix J = jacobian_batch(model, X);
    const auto x1 = X.column(0);
    const auto j1 = J.column(0);
    for (auto& row : report.rows) {
      const auto grid = make_grid_for(x1, row.K);
      row.dale_nmse.push_back(nmse(dale_first_order(j1, x1, grid, EmptyBinPolicy::interpolate, 0), truth));
      row.ale_nmse.push_back(nmse(ale_first_order(model, X, 0, grid), truth));
    }
  }
  for (auto& row : report.rows) {
    for (double v : row.dale_nmse) row.dale_mean += v / static_cast<double>(row.dale_nmse.size());
    for (double v : row.ale_nmse) row.ale_mean += v / static_cast<double>(row.ale_nmse.size());
  }
  return report;
}

Json Case2Report::to_json() const {
  Json j;
  j["format"] = "dale-report/1";
  j["command"] = "bench-case2";
  j["N"] = options.N;
  j["seeds"] = options.seeds;
  j["feature"] = "x1";
  j["params"] = {{"tau", options.params.tau},
                 {"alpha", options.params.alpha},
                 {"sigma2", options.params.sigma2},
                 {"sigma3_sq", options.params.sigma3_sq},
                 {"centers", options.params.centers},
                 {"cluster_sigma", options.params.cluster_sigma}};
  j["truth"] = {{"provenance", "numeric-integration"},
                {"n_quad", options.n_quad},
                {"n_mc", options.n_mc},
                {"seed", options.truth_seed}};
  Json rows_json = Json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"K", r.K},
                         {"ale_nmse", r.ale_mean},
                         {"dale_nmse", r.dale_mean},
                         {"ale_nmse_per_seed", r.ale_nmse},
                         {"dale_nmse_per_seed", r.dale_nmse}});
  }
  j["table"] = std::move(rows_json);
  return j;
}

// ---- bike sharing -------------------------------------------------------------

std::vector<std::string> default_bike_features() {
  return {"season", "mnth", "hr", "holiday", "weekday", "workingday",
          "weathersit", "temp", "atemp", "hum", "windspeed"};
}

BikeReport run_bike(const Dataset& X, std::span<const double> y, const BikeOptions& o) {
  if (X.empty()) throw Error(ErrorKind::empty_input, "bike-sharing data has no rows");
  if (y.size() != X.size()) throw Error(ErrorKind::shape, "target length does not match the rows");
  if (o.K_list.empty()) throw Error(ErrorKind::parameter, "K list is empty");
  const std::size_t D = X.dim();
  const std::size_t N = X.size();
  X.index_of(o.focus);  // schema error when absent

  std::vector<double> xm(D), xs(D);
  for (std::size_t s = 0; s < D; ++s) standardize_column(X, s, xm[s], xs[s]);
  double ym = 0.0, ys = 0.0;
  {
    Matrix ycol(N, 1);
    for (std::size_t i = 0; i < N; ++i) ycol(i, 0) = y[i];
    standardize_column(Dataset(std::move(ycol), {o.target}), 0, ym, ys);
  }
  Matrix Z(N, D);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t s = 0; s < D; ++s) Z(i, s) = (X(i, s) - xm[s]) / xs[s];
  std::vector<double> yz(N);
  for (std::size_t i = 0; i < N; ++i) yz[i] = (y[i] - ym) / ys;

  std::vector<std::size_t> widths{D};
  widths.insert(widths.end(), o.hidden.begin(), o.hidden.end());
  widths.push_back(1);
  const MlpModel init(widths, Activation::tanh, o.train.seed);
  TrainResult trained = train_mlp(init, Dataset(std::move(Z), X.names()), yz, o.train);
  const StandardizedModel model(std::make_shared<MlpModel>(std::move(trained.model)), xm, xs, ym, ys);

  BikeReport report;
  report.options = o;
  report.N = N;
  report.loss_history = trained.loss_history;

  const Matrix J = jacobian_batch(model, X);
  for (std::size_t s = 0; s < D; ++s) {
    const auto col = X.column(s);
    const auto jcol = J.column(s);
    const auto dale_ref = rebin(jcol, col, o.reference_K, o.policy, s);
    const auto ale_ref = ale_first_order(model, X, s, make_grid_for(col, o.reference_K), o.policy);
    for (auto K : o.K_list) {
      const auto grid = make_grid_for(col, K);
      const auto d = dale_first_order(jcol, col, grid, o.policy, s);
      const auto a = ale_first_order(model, X, s, grid, o.policy);
      report.accuracy.push_back({X.name(s), K, nmse(d, dale_ref), nmse(a, ale_ref), nmse(a, dale_ref)});
    }
  }

  for (std::size_t d = 1; d <= D; ++d) {
    BikeCountRow row;
    row.features = d;
    auto before = model.counters().snapshot();
    auto t0 = Clock::now();
    {
      const Matrix Jd = jacobian_batch(model, X);
      for (std::size_t s = 0; s < d; ++s) rebin(Jd.column(s), X.column(s), o.reference_K, o.policy, s);
    }
    row.dale_seconds = seconds_since(t0);
    row.dale_evals = model.counters().snapshot() - before;
    before = model.counters().snapshot();
    t0 = Clock::now();
    for (std::size_t s = 0; s < d; ++s) {
      ale_first_order(model, X, s, make_grid_for(X.column(s), o.reference_K), o.policy);
    }
    row.ale_seconds = seconds_since(t0);
    row.ale_evals = model.counters().snapshot() - before;
    report.counts.push_back(row);
  }
  return report;
}

BikeReport cmd_bike(const BikeOptions& o) {
  auto columns = o.features;
  if (std::find(columns.begin(), columns.end(), o.focus) == columns.end()) {
    throw Error(ErrorKind::schema, "focus feature '" + o.focus + "' is not in the feature subset");
  }
  columns.push_back(o.target);
  const Dataset all = ingest_csv_columns(o.data_path, columns);
  const std::size_t D = o.features.size();
  const Dataset X = prefix_columns(all, D);
  const auto y = all.column(D);
  return run_bike(X, y, o);
}

Json BikeReport::to_json() const {
  Json j;
  j["format"] = "dale-report/1";
  j["command"] = "bike";
  j["N"] = N;
  j["features"] = options.features;
  j["target"] = options.target;
  j["focus"] = options.focus;
  j["reference_K"] = options.reference_K;
  j["K_list"] = options.K_list;
  j["hidden"] = options.hidden;
  j["train"] = {{"epochs", options.train.epochs},
                {"learning_rate", options.train.learning_rate},
                {"batch_size", options.train.batch_size},
                {"seed", options.train.seed}};
  j["loss_history"] = loss_history;
  Json acc = Json::array();
  for (const auto& r : accuracy) {
    acc.push_back({{"feature", r.feature},
                   {"K", r.K},
                   {"dale_vs_dale_ref", r.dale_vs_dale_ref},
                   {"ale_vs_ale_ref", r.ale_vs_ale_ref},
                   {"ale_vs_dale_ref", r.ale_vs_dale_ref}});
  }
  j["accuracy"] = std::move(acc);
  Json cnt = Json::array();
  for (const auto& r : counts) {
    cnt.push_back({{"features", r.features},
                   {"dale_evaluations", counts_json(r.dale_evals)},
                   {"ale_evaluations", counts_json(r.ale_evals)},
                   {"dale_s", r.dale_seconds},
                   {"ale_s", r.ale_seconds}});
  }
  j["counts"] = std::move(cnt);
  return j;
}

// ---- train --------------------------------------------------------------------

std::vector<double> cmd_train(const TrainCommandOptions& o) {
  if (o.out_path.empty()) throw Error(ErrorKind::usage, "an output model path is required");
  const Dataset all = ingest_csv(o.data_path);
  const std::size_t t = all.index_of(o.target);
  if (all.dim() < 2) throw Error(ErrorKind::schema, "training needs at least one feature besides the target");
  std::vector<std::string> names;
  Matrix X(all.size(), all.dim() - 1);
  for (std::size_t s = 0, c = 0; s < all.dim(); ++s) {
    if (s == t) continue;
    names.push_back(all.name(s));
    for (std::size_t i = 0; i < all.size(); ++i) X(i, c) = all(i, s);
    ++c;
  }
  const auto y = all.column(t);
  std::vector<std::size_t> widths{X.cols()};
  widths.insert(widths.end(), o.hidden.begin(), o.hidden.end());
  widths.push_back(1);
  const MlpModel init(widths, o.activation, o.train.seed);
  auto result = train_mlp(init, Dataset(std::move(X), std::move(names)), y, o.train);
  save_mlp(o.out_path, result.model);
  return result.loss_history;
}

}  // namespace dale
