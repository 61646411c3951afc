#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mdct/bench.hpp"
#include "mdct/errors.hpp"
#include "mdct/io.hpp"
#include "mdct/predict.hpp"
#include "mdct/probit.hpp"
#include "mdct/sampler.hpp"
#include "mdct/simdata.hpp"

namespace {

using namespace mdct;

DomainBox box_from_values(const std::vector<double>& values, int dim) {
  DomainBox box;
  box.dim = dim;
  if (dim == 1) {
    if (values.size() != 2) throw config_error("--box needs lo,hi in 1D");
    box.lo[0] = values[0];
    box.hi[0] = values[1];
  } else {
    if (values.size() != 4) throw config_error("--box needs x_lo,x_hi,y_lo,y_hi in 2D");
    box.lo = {values[0], values[2]};
    box.hi = {values[1], values[3]};
  }
  if (!(box.lo[0] < box.hi[0]) || (dim == 2 && !(box.lo[1] < box.hi[1]))) {
    throw config_error("--box bounds must satisfy lo < hi");
  }
  return box;
}

DomainBox bounding_box(const std::vector<Point>& locations, int dim) {
  DomainBox box;
  box.dim = dim;
  box.lo = {locations.front().x, locations.front().y};
  box.hi = {locations.front().x, locations.front().y};
  for (const Point& s : locations) {
    box.lo[0] = std::min(box.lo[0], s.x);
    box.hi[0] = std::max(box.hi[0], s.x);
    if (dim == 2) {
      box.lo[1] = std::min(box.lo[1], s.y);
      box.hi[1] = std::max(box.hi[1], s.y);
    }
  }
  return box;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write: " + path);
  out << text;
}

struct SimulateArgs {
  std::string kind;
  long n = 1000;
  long n_test = 500;
  std::uint64_t seed = 0;
  std::string out = "sim";
  double noise_sd = 0.1;
  double theta1 = 1.0;
  double theta2 = 3.0;
  double nu = 0.5;
  double noise_ratio = 20.0;
  double gamma0 = 1.0;
  double gamma1 = 1.0;
};

void run_simulate(const SimulateArgs& a) {
  const Eigen::Vector2d gamma(a.gamma0, a.gamma1);
  if (a.kind == "1d") {
    const SimulatedData sim = gen_1d(a.n, a.noise_sd, gamma, a.seed);
    write_dataset_csv(a.out + ".csv", sim.data);
    write_truth_csv(a.out + "_truth.csv", sim.data.locations, sim.w0, 1);
    std::cout << "1d dataset: n=" << a.n << " noise_sd=" << a.noise_sd << " seed=" << a.seed
              << "\nwrote " << a.out << ".csv and " << a.out << "_truth.csv\n";
    return;
  }
  if (a.kind == "2d") {
    const MaternParams params{a.theta1, a.theta2, a.nu};
    const TrainTest sim = gen_2d(a.n, a.n_test, params, a.noise_ratio, gamma, a.seed);
    write_dataset_csv(a.out + "_train.csv", sim.train.data);
    write_truth_csv(a.out + "_train_truth.csv", sim.train.data.locations, sim.train.w0, 2);
    write_dataset_csv(a.out + "_test.csv", sim.test.data);
    write_truth_csv(a.out + "_test_truth.csv", sim.test.data.locations, sim.test.w0, 2);
    std::cout << "2d Matern dataset: n=" << a.n << " (train " << sim.train.data.n()
              << " / test " << sim.test.data.n() << ") theta2=" << a.theta2 << " nu=" << a.nu
              << " noise_ratio=" << a.noise_ratio << " seed=" << a.seed << "\nwrote " << a.out
              << "_{train,test}{,_truth}.csv\n";
    return;
  }
  if (a.kind == "binary") {
    const MaternParams params{a.theta1, a.theta2, a.nu};
    const BinaryTrainTest sim = gen_binary(a.n, a.n_test, params, gamma, a.seed);
    auto to_dataset = [](const BinarySimulatedData& b) {
      Dataset d;
      d.X = b.data.X;
      d.locations = b.data.locations;
      d.dim = b.data.dim;
      d.y.resize(b.data.n());
      for (long i = 0; i < b.data.n(); ++i) {
        d.y[i] = static_cast<double>(b.data.y[static_cast<std::size_t>(i)]);
      }
      return d;
    };
    write_dataset_csv(a.out + "_train.csv", to_dataset(sim.train));
    write_truth_csv(a.out + "_train_truth.csv", sim.train.data.locations, sim.train.w0, 2);
    write_dataset_csv(a.out + "_test.csv", to_dataset(sim.test));
    write_truth_csv(a.out + "_test_truth.csv", sim.test.data.locations, sim.test.w0, 2);
    std::cout << "binary probit dataset: n=" << a.n << " (train " << sim.train.data.n()
              << " / test " << sim.test.data.n() << ") seed=" << a.seed << "\nwrote " << a.out
              << "_{train,test}{,_truth}.csv\n";
    return;
  }
  throw config_error("unknown --kind: " + a.kind);
}

struct FitArgs {
  std::string data;
  std::string family = "gaussian";
  std::string out = "chain.bin";
  std::string report;
  int R = 3;
  int J1x = 10;
  int J1y = 10;
  std::vector<double> box;
  long iters = 2000;
  long burn = 1000;
  long thin = 1;
  std::uint64_t seed = 0;
  std::string mode = "sequential";
  int workers = 1;
  double c = 3.0;
  double a_sigma = 2.0;
  double b_sigma = 1.0;
  int h_eta = 5;
};

std::string fit_report_text(const FitArgs& a, const ChainSamples& chain, long n,
                            const MultiresGrid& grid, double total_s) {
  std::ostringstream rep;
  rep << "mdct fit report\n";
  rep << "data " << a.data << "\n";
  rep << "family " << chain.family << "\n";
  rep << "n " << n << "\np " << chain.p << "\n";
  rep << "dim " << grid.dim() << "\nR " << grid.R << "\nJ1 " << grid.J1[0];
  if (grid.dim() == 2) rep << "x" << grid.J1[1];
  rep << "\n";
  rep << "basis_total " << grid.total_nodes << "\n";
  rep << "block_dim " << grid.subtree_size(1) << "\n";
  rep << "mode " << mode_name(chain.mode) << "\nworkers " << chain.workers << "\nseed "
      << chain.seed << "\n";
  rep << "n_iter " << chain.n_iter << "\nburn_in " << chain.burn_in << "\nthin " << chain.thin
      << "\nstored " << chain.stored() << "\n";
  rep << "time_total_s " << total_s << "\n";
  if (!chain.iter_seconds.empty()) {
    std::vector<double> ts = chain.iter_seconds;
    const double mean =
        std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
    std::nth_element(ts.begin(), ts.begin() + static_cast<long>(ts.size() / 2), ts.end());
    rep << "time_per_iter_mean_s " << mean << "\n";
    rep << "time_per_iter_median_s " << ts[ts.size() / 2] << "\n";
  }
  std::map<int, long> eta_freq;
  for (int e : chain.eta_draws) ++eta_freq[e];
  rep << "eta_frequencies";
  for (const auto& [e, count] : eta_freq) rep << ' ' << e << ':' << count;
  rep << "\n";
  // Every update is a conjugate Gibbs draw, so acceptance is 1 by definition.
  rep << "conjugate_draw_acceptance_rate 1\n";
  return rep.str();
}

void run_fit(const FitArgs& a) {
  ChainConfig cfg;
  cfg.n_iter = a.iters;
  cfg.burn_in = a.burn;
  cfg.thin = a.thin;
  cfg.seed = a.seed;
  cfg.mode = mode_from_name(a.mode);
  cfg.workers = a.workers;
  Hyperparams hyper;
  hyper.c = a.c;
  hyper.a_sigma = a.a_sigma;
  hyper.b_sigma = a.b_sigma;
  hyper.h_eta = a.h_eta;

  const auto t0 = std::chrono::steady_clock::now();
  ChainSamples chain;
  long n = 0;
  MultiresGrid grid;
  if (a.family == "gaussian") {
    const Dataset data = read_dataset_csv(a.data);
    n = data.n();
    const DomainBox box =
        a.box.empty() ? bounding_box(data.locations, data.dim) : box_from_values(a.box, data.dim);
    grid = build_grid(box, a.R, {a.J1x, a.J1y});
    chain = run_chain(data, grid, hyper, cfg);
  } else if (a.family == "probit") {
    const BinaryDataset data = read_binary_dataset_csv(a.data);
    n = data.n();
    const DomainBox box =
        a.box.empty() ? bounding_box(data.locations, data.dim) : box_from_values(a.box, data.dim);
    grid = build_grid(box, a.R, {a.J1x, a.J1y});
    chain = run_probit_chain(data, grid, hyper, cfg);
  } else {
    throw config_error("unknown --family: " + a.family);
  }
  const double total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_chain(a.out, chain);
  const std::string report = fit_report_text(a, chain, n, grid, total_s);
  if (!a.report.empty()) write_text(a.report, report);
  std::cout << report;
  std::cout << "wrote chain to " << a.out << "\n";
}

struct PredictArgs {
  std::string chain;
  std::string data;
  std::string out = "predictions.csv";
  std::uint64_t seed = 0;
  int workers = 1;
};

void run_predict(const PredictArgs& a) {
  const ChainSamples chain = read_chain(a.chain);
  if (chain.stored() == 0) throw data_error("chain has no stored draws");
  const MultiresGrid grid = chain.grid_spec.build();
  const Dataset data = read_dataset_csv(a.data);
  if (data.p() != chain.p) throw data_error("test predictors do not match the fitted model");
  const auto draws = predict_points(data.locations, data.X, chain, grid, a.seed, a.workers);
  std::vector<PredictionSummary> summaries(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) summaries[i] = summarize(draws[i]);
  write_prediction_csv(a.out, data.locations, summaries, data.dim, chain.family == "probit");
  std::cout << "wrote " << draws.size() << " predictions to " << a.out << "\n";
}

struct EvaluateArgs {
  std::string chain;
  std::string data;
  std::string truth;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 1;
};

void run_evaluate(const EvaluateArgs& a) {
  const ChainSamples chain = read_chain(a.chain);
  if (chain.stored() == 0) throw data_error("chain has no stored draws");
  const MultiresGrid grid = chain.grid_spec.build();
  const Dataset data = read_dataset_csv(a.data);
  if (data.p() != chain.p) throw data_error("test predictors do not match the fitted model");
  const auto draws = predict_points(data.locations, data.X, chain, grid, a.seed, a.workers);

  std::ostringstream rep;
  rep << "mdct evaluation report\n";
  rep << "chain " << a.chain << "\ndata " << a.data << "\nn " << data.n() << "\n";
  std::vector<double> truth_y(data.y.data(), data.y.data() + data.n());
  if (chain.family == "probit") {
    double brier = 0.0;
    std::vector<double> scores(draws.size());
    std::vector<int> labels(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      scores[i] = draws[i].p_mean;
      labels[i] = truth_y[i] == 1.0 ? 1 : 0;
      const double d = draws[i].p_mean - truth_y[i];
      brier += d * d;
    }
    rep << "mspe_brier " << brier / static_cast<double>(draws.size()) << "\n";
    rep << "auc " << auc(scores, labels) << "\n";
  } else {
    const PredictiveMetrics m = predictive_metrics(draws, truth_y);
    rep << "mspe " << m.mspe << "\n";
    rep << "coverage95 " << m.coverage95 << "\n";
    rep << "mean_length95 " << m.mean_length95 << "\n";
  }
  if (!a.truth.empty()) {
    const std::vector<double> w0 = read_truth_csv(a.truth, data.dim);
    if (static_cast<long>(w0.size()) != data.n()) {
      throw data_error("truth sidecar row count does not match data");
    }
    const auto w_draws = residual_surface(data.locations, chain, grid, a.workers);
    std::vector<double> w_median(w_draws.size());
    for (std::size_t i = 0; i < w_draws.size(); ++i) w_median[i] = quantile(w_draws[i], 0.5);
    rep << "surface_mse " << mse(w_median, w0) << "\n";
  }
  if (!a.out.empty()) write_text(a.out, rep.str());
  std::cout << rep.str();
}

struct BenchArgs {
  std::vector<long> sizes{10000, 20000, 40000};
  long iters = 50;
  long warmup = 5;
  int R = 3;
  int J1x = 10;
  int J1y = 10;
  int h_eta = 1;
  int workers = 4;
  std::uint64_t seed = 1;
  std::string out;
};

void run_bench_cmd(const BenchArgs& a) {
  const BenchResult result =
      run_bench(a.sizes, a.R, {a.J1x, a.J1y}, a.h_eta, a.warmup, a.iters, a.workers, a.seed);
  const std::string report = bench_report(result);
  if (!a.out.empty()) write_text(a.out, report);
  std::cout << report;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Expands `--config FILE` into `--key value` flags for every key the command
/// line does not already set, so explicit flags always win. Config files are
/// flat `key=value` text; blank lines and `#` comments are ignored.
void expand_config_file(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw config_error("--config needs a file path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw config_error(path + ":" + std::to_string(line_no) + ": empty key");
    }
    const std::string flag = "--" + key;
    bool already_set = false;
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) {
        already_set = true;
        break;
      }
    }
    if (!already_set) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale kernel-convolution spatial regression (MDCT)"};
  app.require_subcommand(1);
  std::string config_doc;  // --config is expanded before parsing; this is for --help only

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic datasets");
  simulate->add_option("--kind", sim.kind, "1d | 2d | binary")->required();
  simulate->add_option("--n", sim.n, "total observations");
  simulate->add_option("--n-test", sim.n_test, "held-out rows (2d/binary)");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", sim.out, "output file prefix");
  simulate->add_option("--noise-sd", sim.noise_sd, "1d noise standard deviation");
  simulate->add_option("--theta1", sim.theta1, "Matern marginal variance");
  simulate->add_option("--theta2", sim.theta2, "Matern decay");
  simulate->add_option("--nu", sim.nu, "Matern smoothness");
  simulate->add_option("--noise-ratio", sim.noise_ratio, "spatial-to-noise variance ratio");
  simulate->add_option("--gamma0", sim.gamma0, "intercept coefficient");
  simulate->add_option("--gamma1", sim.gamma1, "predictor coefficient");
  simulate->add_option("--config", config_doc, "flat key=value config file (explicit flags win)");
  simulate->callback([&] { run_simulate(sim); });

  FitArgs fit;
  CLI::App* fitc = app.add_subcommand("fit", "run the Gibbs sampler on a dataset");
    fitc->add_option("--data", fit.data, "dataset CSV")->required();
  fitc->add_option("--family", fit.family, "gaussian | probit");
  fitc->add_option("--out", fit.out, "chain checkpoint path");
  fitc->add_option("--report", fit.report, "fit report path");
  fitc->add_option("--R", fit.R, "resolution count");
  fitc->add_option("--J1x", fit.J1x, "resolution-1 knots along x");
  fitc->add_option("--J1y", fit.J1y, "resolution-1 knots along y (2D)");
  fitc->add_option("--box", fit.box, "domain box lo,hi (1D) or x_lo,x_hi,y_lo,y_hi (2D)")
      ->delimiter(',');
  fitc->add_option("--iters", fit.iters, "total iterations");
  fitc->add_option("--burn", fit.burn, "burn-in iterations");
  fitc->add_option("--thin", fit.thin, "thinning stride");
  fitc->add_option("--seed", fit.seed);
  fitc->add_option("--mode", fit.mode, "sequential | chromatic | jacobi");
  fitc->add_option("--workers", fit.workers, "worker threads");
  fitc->add_option("--c", fit.c, "tree shrinkage shape (> 2)");
  fitc->add_option("--a-sigma", fit.a_sigma, "sigma^2 IG shape");
  fitc->add_option("--b-sigma", fit.b_sigma, "sigma^2 IG rate");
  fitc->add_option("--h-eta", fit.h_eta, "eta grid size");
  fitc->add_option("--config", config_doc, "flat key=value config file (explicit flags win)");
  fitc->callback([&] { run_fit(fit); });

  PredictArgs pred;
  CLI::App* predict = app.add_subcommand("predict", "posterior predictive draws at new locations");
    predict->add_option("--chain", pred.chain, "chain checkpoint")->required();
  predict->add_option("--data", pred.data, "locations + predictors CSV")->required();
  predict->add_option("--out", pred.out, "prediction CSV path");
  predict->add_option("--seed", pred.seed);
  predict->add_option("--workers", pred.workers);
  predict->add_option("--config", config_doc, "flat key=value config file (explicit flags win)");
  predict->callback([&] { run_predict(pred); });

  EvaluateArgs eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "prediction metrics on held-out data");
    evaluate->add_option("--chain", eval.chain, "chain checkpoint")->required();
  evaluate->add_option("--data", eval.data, "held-out dataset CSV")->required();
  evaluate->add_option("--truth", eval.truth, "truth sidecar CSV (enables surface MSE)");
  evaluate->add_option("--out", eval.out, "metrics report path");
  evaluate->add_option("--seed", eval.seed);
  evaluate->add_option("--workers", eval.workers);
  evaluate->add_option("--config", config_doc, "flat key=value config file (explicit flags win)");
  evaluate->callback([&] { run_evaluate(eval); });

  BenchArgs bench;
  CLI::App* benchc = app.add_subcommand("bench", "per-iteration timing sweep over data sizes");
    benchc->add_option("--n-list", bench.sizes, "data sizes")->delimiter(',');
  benchc->add_option("--iters", bench.iters, "timed iterations per size");
  benchc->add_option("--warmup", bench.warmup, "warmup iterations per size");
  benchc->add_option("--R", bench.R);
  benchc->add_option("--J1x", bench.J1x);
  benchc->add_option("--J1y", bench.J1y);
  benchc->add_option("--h-eta", bench.h_eta);
  benchc->add_option("--workers", bench.workers, "workers for the chromatic run");
  benchc->add_option("--seed", bench.seed);
  benchc->add_option("--out", bench.out, "report path");
  benchc->add_option("--config", config_doc, "flat key=value config file (explicit flags win)");
  benchc->callback([&] { run_bench_cmd(bench); });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    expand_config_file(args);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse expects reversed args
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mdct::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdct::data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const mdct::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
