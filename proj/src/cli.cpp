// Copyright 2026 The ssvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ssvkit/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ssvkit/analysis.hpp"
#include "ssvkit/explain.hpp"
#include "ssvkit/io.hpp"
#include "ssvkit/selftest.hpp"

namespace ssvkit::cli {

namespace {

using io::Json;

/// Flat JSON object -> CLI11 config items. Keys use underscores
/// (`inducing_strategy`) and map onto the long flag (`--inducing-strategy`).
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App *, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &in) const override {
    Json j;
    try {
      in >> j;
    } catch (const Json::exception &e) {
      throw CLI::ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto &[key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      std::replace(item.name.begin(), item.name.end(), '_', '-');
      auto push = [&](const Json &v) {
        if (v.is_string()) item.inputs.push_back(v.get<std::string>());
        else if (v.is_boolean()) item.inputs.push_back(v.get<bool>() ? "true" : "false");
        else if (v.is_number()) item.inputs.push_back(v.dump());
        else throw CLI::ConfigError("config key '" + key + "' has an unsupported value");
      };
      if (value.is_array())
        for (const auto &v : value) push(v);
      else
        push(value);
      items.push_back(std::move(item));
    }
    return items;
  }
};

struct RunConfig {
  std::string data;
  std::string target = "y";
  std::string posterior;
  std::string instances;
  std::string explanations;
  std::string out;
  std::string format = "json";
  long inducing = 100;
  std::string inducing_strategy = "farthest_point";
  std::vector<double> grid_scales{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> grid_noise{1e-3, 1e-2, 1e-1, 1.0};
  double lambda = 0.0; // 0: 1e-3 * number of anchors
  std::string coalitions = "full";
  std::string algo = "gpshap";
  double ell0 = 0.1;
  double sigma0_sq = 0.1;
  std::uint64_t seed = 0;
  double credible = 0.0; // 0: no intervals
  int threads = 1;
  bool cg = false;
  double noise = 0.0; // 0: 1e-2 * var(Phi)
  long anchors = 100;
  double sparsity = 0.9;
  long instance = 0;
  long folded_draws = 0;
  bool corrupt_projection = false;
};

/// Fills options not given on the command line from a JSON config file.
void apply_config(CLI::App &cmd, const std::string &path) {
  std::istringstream in(io::read_text(path));
  for (const auto &item : JsonConfig().from_config(in)) {
    CLI::Option *op = item.name == "config" ? nullptr : cmd.get_option_no_throw("--" + item.name);
    if (op == nullptr)
      fail(ErrorKind::Parse, "unknown key '" + item.name + "' in config file '" + path + "'");
    if (op->count() > 0) continue;
    op->add_result(item.inputs);
    op->run_callback();
  }
}

void require(const std::string &value, const char *flag) {
  if (value.empty()) fail(ErrorKind::InvalidArgument, std::string(flag) + " is required");
}

int default_threads() {
  if (const char *env = std::getenv("SSVKIT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (...) {
    }
  }
  return 1;
}

std::string dump_json(const Json &j) { return j.dump(2) + "\n"; }

void add_common(CLI::App &cmd, RunConfig &cfg, std::string &config_path) {
  cmd.add_option("--config", config_path, "JSON file with default values for this command's flags");
  cmd.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd.add_option("--threads", cfg.threads, "Worker threads (env SSVKIT_THREADS)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_output(CLI::App &cmd, RunConfig &cfg, const std::string &default_out) {
  cfg.out = default_out;
  cmd.add_option("--out,-o", cfg.out, "Output path")->capture_default_str();
  cmd.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

CmeOptions cme_options(const RunConfig &cfg) {
  CmeOptions o;
  o.threads = cfg.threads;
  o.use_cg = cfg.cg;
  return o;
}

CoalitionDesign make_coalitions(const RunConfig &cfg, int d) {
  if (cfg.coalitions == "full") {
    if (d > kMaxEnumerationDim)
      fail(ErrorKind::DimensionTooLarge,
           "--coalitions full enumerates 2^d coalitions and is capped at d = " +
               std::to_string(kMaxEnumerationDim) + " (got d = " + std::to_string(d) +
               "); pass --coalitions <count> instead");
    return coalition::enumerate_coalitions(d);
  }
  std::int64_t count = 0;
  try {
    std::size_t used = 0;
    count = std::stoll(cfg.coalitions, &used);
    if (used != cfg.coalitions.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception &) {
    fail(ErrorKind::Parse, "--coalitions must be 'full' or an integer, got '" +
                               cfg.coalitions + "'");
  }
  return coalition::sample_coalitions(d, count, cfg.seed);
}

void write_table(const RunConfig &cfg, const io::ExplanationTable &table) {
  io::write_text(cfg.out, cfg.format == "csv" ? io::table_to_csv(table)
                                              : dump_json(io::table_to_json(table)));
}

int cmd_fit(const RunConfig &cfg, std::ostream &out) {
  const auto data = io::dataset_from_csv(io::read_csv(cfg.data), cfg.target);
  data.validate();
  // Same base values as gp::default_grid, with configurable multipliers.
  const Vector ls = data.size() >= 2 ? kernels::median_heuristic(data.X)
                                     : Vector::Ones(data.dim());
  double var_y = 0.0;
  if (data.size() >= 2)
    var_y = (data.y.array() - data.y.mean()).square().sum() /
            static_cast<double>(data.size() - 1);
  if (!(var_y > 0.0)) var_y = 1.0;
  std::vector<gp::GridEntry> grid;
  for (double s : cfg.grid_scales)
    for (double r : cfg.grid_noise) {
      if (!(s > 0.0) || !(r > 0.0))
        fail(ErrorKind::InvalidArgument, "--grid-scales and --grid-noise must be positive");
      grid.push_back({KernelParams{1.0, ls * s}, r * var_y});
    }
  const auto sel = gp::select_hyperparameters(data, grid);
  InducingSelector inducing;
  if (cfg.inducing <= 0 || cfg.inducing >= data.size() || cfg.inducing_strategy == "all") {
    inducing.strategy = InducingStrategy::All;
  } else {
    inducing.strategy = parse_inducing_strategy(cfg.inducing_strategy);
    inducing.count = cfg.inducing;
  }
  inducing.seed = cfg.seed;
  const auto post = gp::fit_exact(data, sel.best.kernel, sel.best.noise, inducing);
  io::write_text(cfg.out, dump_json(io::posterior_to_json(post, data.feature_names)));

  out << "n = " << data.size() << "\nd = " << data.dim() << "\nn_inducing = "
      << post.num_inducing() << "\nkernel_variance = " << io::format_double(post.kernel.variance)
      << "\nlengthscales =";
  for (Eigen::Index i = 0; i < post.kernel.lengthscales.size(); ++i)
    out << ' ' << io::format_double(post.kernel.lengthscales[i]);
  out << "\nnoise = " << io::format_double(post.noise)
      << "\nlog_marginal_likelihood = " << io::format_double(sel.log_marginal_likelihood)
      << "\nwrote " << cfg.out << '\n';
  return kOk;
}

GPPosterior load_posterior(const std::string &path, std::vector<std::string> &names) {
  Json j;
  try {
    j = Json::parse(io::read_text(path));
  } catch (const Json::exception &e) {
    fail(ErrorKind::Parse, "invalid JSON in '" + path + "': " + e.what());
  }
  return io::posterior_from_json(j, &names);
}

int cmd_explain(const RunConfig &cfg, std::ostream &out) {
  std::vector<std::string> names;
  const auto post = load_posterior(cfg.posterior, names);
  const int d = post.dim();
  const Matrix X = io::instances_from_csv(io::read_csv(cfg.instances), names, d);
  if (cfg.credible != 0.0 && !(cfg.credible > 0.0 && cfg.credible < 1.0))
    fail(ErrorKind::InvalidArgument, "--credible must lie in (0, 1)");
  const auto design = make_coalitions(cfg, d);
  const double lambda = cfg.lambda > 0.0 ? cfg.lambda : cme::default_lambda(post.num_inducing());
  const BayesConfig bayes{cfg.ell0, cfg.sigma0_sq, cfg.seed, std::nullopt};

  ExplanationBatch batch;
  if (cfg.algo == "gpshap") {
    batch = explain::gpshap(post, design, X, lambda, cme_options(cfg));
  } else if (cfg.algo == "bayesgpshap") {
    batch = explain::bayesgpshap(post, design, X, lambda, bayes, cme_options(cfg));
  } else {
    // BayesSHAP on the posterior-mean game.
    const auto mean_game = explain::gpshap(
        GPPosterior{post.inducing_points, post.mean_at_inducing,
                    Matrix::Zero(post.num_inducing(), post.num_inducing()), post.kernel,
                    post.noise},
        design, X, lambda, cme_options(cfg));
    batch = explain::bayesshap_deterministic(mean_game.payoff_means, design, bayes);
  }
  const auto table = io::make_table(
      batch, X, names.empty() ? io::default_feature_names(d) : names,
      cfg.credible > 0.0 ? std::optional<double>(cfg.credible) : std::nullopt);
  write_table(cfg, table);
  out << "explained " << X.rows() << " instances over " << design.size()
      << " coalitions with " << batch.algorithm << "\nwrote " << cfg.out << '\n';
  return kOk;
}

int cmd_predict_explain(const RunConfig &cfg, std::ostream &out) {
  std::vector<std::string> names;
  const auto data = io::explanation_dataset_from_file(cfg.explanations, &names);
  const int d = data.dim();
  if (d < 1 || data.size() < 1)
    fail(ErrorKind::Parse, "explanation file holds no explanations");
  const Matrix Xnew = io::instances_from_csv(io::read_csv(cfg.instances), names, d);
  if (cfg.credible != 0.0 && !(cfg.credible > 0.0 && cfg.credible < 1.0))
    fail(ErrorKind::InvalidArgument, "--credible must lie in (0, 1)");

  KernelParams kernel;
  Matrix anchors;
  if (!cfg.posterior.empty()) {
    std::vector<std::string> post_names;
    const auto post = load_posterior(cfg.posterior, post_names);
    if (post.dim() != d)
      fail(ErrorKind::DimensionMismatch, "posterior and explanations differ in dimension");
    kernel = post.kernel;
    anchors = post.inducing_points;
  } else {
    kernel = {1.0, data.size() >= 2 ? kernels::median_heuristic(data.X) : Vector::Ones(d)};
    anchors = shapley_prior::default_anchors(data.X, std::max<long>(cfg.anchors, 1));
  }
  const auto design = make_coalitions(cfg, d);
  const double lambda = cfg.lambda > 0.0 ? cfg.lambda : cme::default_lambda(anchors.rows());
  double noise = cfg.noise;
  if (!(noise > 0.0)) {
    const double mean = data.Phi.mean();
    const double var = (data.Phi.array() - mean).square().mean();
    noise = std::max(1e-2 * var, 1e-8);
  }
  ShapleyPriorModel::Options opts;
  opts.cme = cme_options(cfg);
  const auto model = ShapleyPriorModel::fit(data, anchors, kernel, design, lambda, noise, opts);

  ExplanationBatch batch;
  batch.algorithm = "shapley_prior";
  batch.design_digest = design.digest();
  batch.means.resize(Xnew.rows(), d);
  for (Eigen::Index k = 0; k < Xnew.rows(); ++k) {
    const auto p = model.predict(Xnew.row(k).transpose());
    batch.means.row(k) = p.mean.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p.cov);
    batch.cov_factor.push_back(eig.eigenvectors() *
                               eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  const auto table = io::make_table(
      batch, Xnew, names,
      cfg.credible > 0.0 ? std::optional<double>(cfg.credible) : std::nullopt);
  write_table(cfg, table);
  out << "predicted explanations for " << Xnew.rows() << " instances from " << data.size()
      << " training explanations\nwrote " << cfg.out << '\n';
  return kOk;
}

ExplanationBatch batch_from_table(const io::ExplanationTable &t) {
  ExplanationBatch b;
  b.algorithm = t.algorithm;
  b.design_digest = t.design_digest;
  b.means = t.means;
  for (Eigen::Index k = 0; k < t.means.rows(); ++k) {
    if (t.cov.empty()) {
      b.cov_factor.push_back(Matrix::Zero(t.means.cols(), 0));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(numerics::symmetrize(t.cov[static_cast<std::size_t>(k)]));
    b.cov_factor.push_back(eig.eigenvectors() *
                           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  return b;
}

int cmd_analyze(const RunConfig &cfg, std::ostream &out) {
  Json in;
  try {
    in = Json::parse(io::read_text(cfg.explanations));
  } catch (const Json::exception &e) {
    fail(ErrorKind::Parse, "analyze needs the JSON output of explain: " + std::string(e.what()));
  }
  const auto table = io::table_from_json(in);
  if (table.cov.empty()) fail(ErrorKind::Parse, "explanation file has no 'cov' field");
  const auto batch = batch_from_table(table);
  if (cfg.instance < 0 || cfg.instance >= batch.num_instances())
    fail(ErrorKind::InvalidArgument, "--instance is out of range");
  const auto k = static_cast<Eigen::Index>(cfg.instance);
  const Matrix cov = table.cov[static_cast<std::size_t>(k)];

  const auto global = analysis::global_importance(batch);
  bool jensen = true;
  for (int i = 0; i < batch.dim(); ++i)
    jensen = jensen && global.mean_abs_ssv[i] >= global.abs_mean_ssv[i] - 1e-12;
  const Matrix corr = analysis::correlation_matrix(cov);
  const auto edges = analysis::precision_graph(cov, cfg.sparsity);
  const auto bees = analysis::beeswarm_export(batch, table.instances);
  const auto order = analysis::rank_by_span(batch);
  const auto &names = table.feature_names;

  if (cfg.format == "json") {
    Json j;
    j["feature_names"] = names;
    j["global"] = {{"mean_abs_ssv", io::vector_to_json(global.mean_abs_ssv)},
                   {"abs_mean_ssv", io::vector_to_json(global.abs_mean_ssv)},
                   {"jensen_holds", jensen}};
    j["instance"] = cfg.instance;
    j["correlation"] = io::matrix_to_json(corr);
    Json e = Json::array();
    for (const auto &edge : edges)
      e.push_back({{"i", names[static_cast<std::size_t>(edge.i)]},
                   {"j", names[static_cast<std::size_t>(edge.j)]},
                   {"partial_correlation", edge.partial_correlation}});
    j["precision_graph"] = {{"sparsity", cfg.sparsity}, {"edges", std::move(e)}};
    Json rows = Json::array();
    for (const auto &r : bees)
      rows.push_back({{"instance", r.instance},
                      {"feature", names[static_cast<std::size_t>(r.feature)]},
                      {"mean", r.mean},
                      {"sd", r.sd},
                      {"feature_value", r.feature_value},
                      {"feature_value_quantile", r.feature_value_quantile}});
    j["beeswarm"] = std::move(rows);
    Json ranked = Json::array();
    for (int i : order) ranked.push_back(names[static_cast<std::size_t>(i)]);
    j["span_ranking"] = std::move(ranked);
    if (cfg.folded_draws > 0) {
      const auto fm = analysis::folded_moments_mc(batch.means.row(k).transpose(), cov,
                                                  cfg.folded_draws, cfg.seed);
      j["folded_moments"] = {{"draws", cfg.folded_draws},
                             {"mean", io::vector_to_json(fm.mean)},
                             {"cov", io::matrix_to_json(fm.cov)}};
    }
    io::write_text(cfg.out, dump_json(j));
    out << "wrote " << cfg.out << '\n';
  } else {
    std::ostringstream g, c, ed, bs;
    g << "feature,mean_abs_ssv,abs_mean_ssv\n";
    for (int i = 0; i < batch.dim(); ++i)
      g << names[static_cast<std::size_t>(i)] << ',' << io::format_double(global.mean_abs_ssv[i])
        << ',' << io::format_double(global.abs_mean_ssv[i]) << '\n';
    c << "feature";
    for (const auto &n : names) c << ',' << n;
    c << '\n';
    for (int i = 0; i < batch.dim(); ++i) {
      c << names[static_cast<std::size_t>(i)];
      for (int m = 0; m < batch.dim(); ++m) c << ',' << io::format_double(corr(i, m));
      c << '\n';
    }
    ed << "i,j,partial_correlation\n";
    for (const auto &edge : edges)
      ed << names[static_cast<std::size_t>(edge.i)] << ',' << names[static_cast<std::size_t>(edge.j)]
         << ',' << io::format_double(edge.partial_correlation) << '\n';
    bs << "instance,feature,mean,sd,feature_value,feature_value_quantile\n";
    for (const auto &r : bees)
      bs << r.instance << ',' << names[static_cast<std::size_t>(r.feature)] << ','
         << io::format_double(r.mean) << ',' << io::format_double(r.sd) << ','
         << io::format_double(r.feature_value) << ',' << io::format_double(r.feature_value_quantile)
         << '\n';
    io::write_text(cfg.out + "_global.csv", g.str());
    io::write_text(cfg.out + "_correlation.csv", c.str());
    io::write_text(cfg.out + "_edges.csv", ed.str());
    io::write_text(cfg.out + "_beeswarm.csv", bs.str());
    out << "wrote " << cfg.out << "_{global,correlation,edges,beeswarm}.csv\n";
  }
  out << "jensen_holds = " << (jensen ? "true" : "false") << '\n';
  return kOk;
}

int cmd_selftest(const RunConfig &cfg, std::ostream &out) {
  const auto results = selftest::run({cfg.seed, cfg.threads, cfg.corrupt_projection});
  bool all = true;
  for (const auto &r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name
        << " max_dev=" << io::format_double(r.max_deviation)
        << " tol=" << io::format_double(r.tolerance) << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? kOk : kCheckFailed;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Stochastic Shapley values for Gaussian process regression", "ssvkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.threads = default_threads();
  std::string config_path;

  auto *fit = app.add_subcommand("fit", "Fit an exact GP and write its posterior at inducing rows");
  add_common(*fit, cfg, config_path);
  add_output(*fit, cfg, "posterior.json");
  fit->add_option("--data", cfg.data, "Training CSV with a header row");
  fit->add_option("--target", cfg.target, "Target column")->capture_default_str();
  fit->add_option("--inducing", cfg.inducing, "Inducing count (<= 0 or >= n: all rows)")
      ->capture_default_str();
  fit->add_option("--inducing-strategy", cfg.inducing_strategy)
      ->check(CLI::IsMember({"all", "uniform", "farthest_point"}))
      ->capture_default_str();
  fit->add_option("--grid-scales", cfg.grid_scales, "Multipliers of the median-heuristic lengthscales")
      ->expected(1, -1);
  fit->add_option("--grid-noise", cfg.grid_noise, "Noise levels relative to var(y)")
      ->expected(1, -1);

  auto *exp = app.add_subcommand("explain", "Compute stochastic Shapley values");
  add_common(*exp, cfg, config_path);
  add_output(*exp, cfg, "explanations.json");
  exp->add_option("--posterior", cfg.posterior, "Posterior JSON from `fit`");
  exp->add_option("--instances", cfg.instances, "CSV of instances to explain");
  exp->add_option("--lambda", cfg.lambda, "CME regularizer (default 1e-3 * n_inducing)");
  exp->add_option("--coalitions", cfg.coalitions, "'full' or a sampled coalition count")
      ->capture_default_str();
  exp->add_option("--algo", cfg.algo)
      ->check(CLI::IsMember({"gpshap", "bayesgpshap", "bayesshap"}))
      ->capture_default_str();
  exp->add_option("--ell0", cfg.ell0)->check(CLI::NonNegativeNumber)->capture_default_str();
  exp->add_option("--sigma0-sq", cfg.sigma0_sq)->check(CLI::NonNegativeNumber)->capture_default_str();
  exp->add_option("--credible", cfg.credible, "Append credible intervals at this level");
  exp->add_flag("--cg", cfg.cg, "Solve embeddings with conjugate gradient");

  auto *pred = app.add_subcommand("predict-explain",
                                  "Predict explanations for new inputs with the Shapley prior");
  add_common(*pred, cfg, config_path);
  add_output(*pred, cfg, "predicted.json");
  pred->add_option("--explanations", cfg.explanations, "Explanations (JSON or CSV)");
  pred->add_option("--instances", cfg.instances, "CSV of new instances");
  pred->add_option("--posterior", cfg.posterior, "Posterior JSON supplying kernel and anchors");
  pred->add_option("--anchors", cfg.anchors, "Anchor count without --posterior")->capture_default_str();
  pred->add_option("--noise", cfg.noise, "Explanation noise variance (default 1e-2 * var(Phi))");
  pred->add_option("--lambda", cfg.lambda, "CME regularizer (default 1e-3 * n_anchors)");
  pred->add_option("--coalitions", cfg.coalitions)->capture_default_str();
  pred->add_option("--credible", cfg.credible, "Append credible intervals at this level");
  pred->add_flag("--cg", cfg.cg, "Solve embeddings with conjugate gradient");

  auto *ana = app.add_subcommand("analyze", "Global importance, correlation, graph and beeswarm tables");
  add_common(*ana, cfg, config_path);
  add_output(*ana, cfg, "analysis.json");
  ana->add_option("--explanations", cfg.explanations, "Explanation JSON from `explain`");
  ana->add_option("--instance", cfg.instance, "Instance for correlation and graph")->capture_default_str();
  ana->add_option("--sparsity", cfg.sparsity)->check(CLI::Range(0.0, 0.999999))->capture_default_str();
  ana->add_option("--folded-draws", cfg.folded_draws,
                  "Monte Carlo draws for folded-Gaussian moments (0: off)");

  auto *st = app.add_subcommand("selftest", "Run the oracle suite");
  add_common(*st, cfg, config_path);
  st->add_flag("--corrupt-projection", cfg.corrupt_projection)->group(""); // negative control

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back(); // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    for (auto *sub : app.get_subcommands())
      if (!config_path.empty()) apply_config(*sub, config_path);
    if (fit->parsed()) {
      require(cfg.data, "--data");
    } else if (exp->parsed()) {
      require(cfg.posterior, "--posterior");
      require(cfg.instances, "--instances");
    } else if (pred->parsed()) {
      require(cfg.explanations, "--explanations");
      require(cfg.instances, "--instances");
    } else if (ana->parsed()) {
      require(cfg.explanations, "--explanations");
    }
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (exp->parsed()) return cmd_explain(cfg, out);
    if (pred->parsed()) return cmd_predict_explain(cfg, out);
    if (ana->parsed()) return cmd_analyze(cfg, out);
    if (st->parsed()) return cmd_selftest(cfg, out);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return e.is_numerical() ? kNumerics : kUsage;
  } catch (const CLI::Error &e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

} // namespace ssvkit::cli
