#include "korea/cli.hpp"

#include "korea/builtin.hpp"
#include "korea/config.hpp"
#include "korea/datagen.hpp"
#include "korea/io.hpp"
#include "korea/model_select.hpp"
#include "korea/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace korea {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::OutOfRange:
      return kExitUsage;
    case ErrorCode::ParseError:
    case ErrorCode::RaggedRows:
    case ErrorCode::NonFinite:
    case ErrorCode::UnknownDataset:
    case ErrorCode::DatasetUnavailable:
    case ErrorCode::CountMismatch:
    case ErrorCode::IoError:
    case ErrorCode::TooFewPoints:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NotSimplex:
      return kExitData;
    case ErrorCode::NotSpd:
    case ErrorCode::NotSymmetric:
    case ErrorCode::DofTooSmall:
    case ErrorCode::NonPositiveAlpha:
    case ErrorCode::AllRestartsFailed:
    case ErrorCode::RejectionBudgetExceeded:
      return kExitNumerical;
  }
  return kExitNumerical;
}

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  int kmax = 10;
  std::string out;
  std::string format = "csv";
  int jobs = 1;
  std::string config;
};

struct InputOptions {
  std::string input;
  std::string dataset;
  bool header = false;
  int label_column = 0;  // 1-based, 0 = none
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  auto* file = cmd->add_option("--input,-i", in.input, "CSV file of observations (one per row)");
  auto* builtin = cmd->add_option("--dataset", in.dataset, "Built-in data set (enzyme, acidity, galaxy)");
  file->excludes(builtin);
  cmd->add_flag("--header", in.header, "First CSV row is a header");
  cmd->add_option("--label-column", in.label_column, "1-based column holding integer labels (ignored for fitting)")
      ->check(CLI::NonNegativeNumber);
}

Dataset read_input(const InputOptions& in) {
  if (!in.dataset.empty()) return load_builtin(in.dataset).as_dataset();
  if (in.input.empty()) throw Error(ErrorCode::InvalidArgument, "one of --input or --dataset is required");
  std::optional<std::size_t> label;
  if (in.label_column > 0) label = static_cast<std::size_t>(in.label_column - 1);
  return load_csv(in.input, in.header, label).data;
}

std::filesystem::path require_out(const GlobalOptions& g) {
  if (g.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  return g.out;
}

RunConfig base_config(const GlobalOptions& g) {
  return g.config.empty() ? RunConfig{} : load_run_config(g.config);
}

GmmParams mode_params(const ModePoint& mode) {
  GmmParams p;
  p.weights = mode.pi;
  p.means = mode.mu;
  p.precisions = mode.Q;
  return p;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-mixture model-order selection (KOREA posterior, AIC, BIC)", "korea"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--kmax", g.kmax, "Largest number of components considered")->check(CLI::PositiveNumber);
  app.add_option("--out,-o", g.out, "Output file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs,-j", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON settings file (hyperparameters, fit and generator settings)");

  // synth
  auto* synth = app.add_subcommand("synth", "Sample the planar circle benchmark as CSV (x1,x2,label)");
  int synth_khat = 1, synth_n = 100;
  double synth_radius = 0, synth_dof = 0, synth_alpha = 0, synth_min_weight = -1;
  bool synth_precision = false;
  std::string synth_truth;
  synth->add_option("--khat", synth_khat, "Generating number of components")->required()->check(CLI::PositiveNumber);
  synth->add_option("--n", synth_n, "Number of observations")->required()->check(CLI::PositiveNumber);
  synth->add_option("--radius", synth_radius, "Circle radius of the component means");
  synth->add_option("--dof", synth_dof, "Wishart degrees of freedom");
  synth->add_option("--alpha", synth_alpha, "Symmetric Dirichlet concentration (default 1/khat)");
  synth->add_option("--min-weight", synth_min_weight, "Redraw weights until every weight reaches this value");
  synth->add_flag("--precision-draw", synth_precision, "Use the Wishart draw as the precision, not the covariance");
  synth->add_option("--truth", synth_truth, "Also write the generating parameters as model JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a K-component mixture and export it as model JSON");
  InputOptions fit_in;
  add_input_options(fit, fit_in);
  std::string fit_method = "vb";
  int fit_k = 1;
  fit->add_option("--method", fit_method, "vb or em")->check(CLI::IsMember({"vb", "em"}));
  fit->add_option("--k", fit_k, "Number of components")->required()->check(CLI::PositiveNumber);

  // select
  auto* select = app.add_subcommand("select", "Posterior over the number of components and/or AIC/BIC curves");
  InputOptions sel_in;
  add_input_options(select, sel_in);
  std::string criterion = "korea";
  bool hill_climb = false;
  int k_init = 1;
  select->add_option("--criterion", criterion, "korea, aic, bic or all")
      ->check(CLI::IsMember({"korea", "aic", "bic", "all"}));
  select->add_flag("--hill-climb", hill_climb, "Greedy integer search instead of full enumeration (korea only)");
  select->add_option("--k-init", k_init, "Starting K for --hill-climb")->check(CLI::PositiveNumber);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Benchmark sweep over generating K and sample size");
  std::vector<int> sweep_khat{1, 2, 3, 4, 5};
  std::vector<int> sweep_n{100, 300, 1000};
  std::vector<std::string> sweep_methods{"korea", "aic", "bic"};
  int sweep_runs = 5;
  double sweep_min_weight = -1;
  bool sweep_timing = false;
  sweep->add_option("--khat", sweep_khat, "Generating orders")->delimiter(',');
  sweep->add_option("--n", sweep_n, "Sample sizes")->delimiter(',');
  sweep->add_option("--runs", sweep_runs, "Seeded runs per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--methods", sweep_methods, "korea, aic, bic")->delimiter(',');
  sweep->add_option("--min-weight", sweep_min_weight, "Generator weight floor");
  sweep->add_flag("--timing", sweep_timing, "Include wall-clock columns (output is then not reproducible)");

  // datasets
  auto* datasets = app.add_subcommand("datasets", "Built-in real data sets");
  datasets->require_subcommand(1);
  auto* ds_list = datasets->add_subcommand("list", "List built-in data sets");
  auto* ds_export = datasets->add_subcommand("export", "Write a built-in data set as CSV");
  std::string export_name;
  ds_export->add_option("name", export_name, "Data set name")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = base_config(g);

    if (*synth) {
      if (g.format != "csv") throw Error(ErrorCode::InvalidArgument, "synth writes CSV only");
      SynthConfig sc = cfg.synth;
      sc.k_hat = synth_khat;
      sc.n = synth_n;
      sc.seed = g.seed;
      if (synth_radius > 0) sc.radius = synth_radius;
      if (synth_dof > 0) sc.wishart_dof = synth_dof;
      if (synth_alpha > 0) sc.dirichlet_alpha = synth_alpha;
      if (synth_min_weight >= 0) sc.min_weight = synth_min_weight;
      if (synth_precision) sc.wishart_draws_covariance = false;
      const auto ds = sample_synthetic(sc);
      write_csv(require_out(g), ds.data, ds.labels);
      if (!synth_truth.empty()) emit_model_json({ds.true_params, std::nullopt, std::nullopt, 0, {}}, synth_truth);
      out << "wrote " << ds.data.size() << " observations (weight redraws: " << ds.weight_redraws << ")\n";
      return kExitOk;
    }

    if (*fit) {
      const Dataset data = read_input(fit_in);
      const auto path = require_out(g);
      if (fit_method == "vb") {
        const Hyperparams hyper = cfg.hyper.resolve(data);
        const auto res = vb_fit(data, fit_k, hyper, g.seed, cfg.vb);
        const auto mode = extract_mode(res.state, hyper);
        emit_model_json({mode_params(mode), res.elbo, std::nullopt, res.state.iterations, mode.fallbacks()}, path);
        out << "vb K=" << fit_k << " elbo=" << format_double(res.elbo) << " iterations=" << res.state.iterations
            << "\n";
      } else {
        const auto res = em_fit(data, fit_k, g.seed, cfg.em);
        emit_model_json({res.params, std::nullopt, res.loglik, res.iterations, {}}, path);
        out << "em K=" << fit_k << " loglik=" << format_double(res.loglik) << " iterations=" << res.iterations << "\n";
      }
      return kExitOk;
    }

    if (*select) {
      const Dataset data = read_input(sel_in);
      const auto format = parse_format(g.format);
      FitSettings fs;
      fs.hyper = cfg.hyper;
      fs.vb = cfg.vb;
      fs.seed = g.seed;
      fs.jobs = g.jobs;

      if (hill_climb) {
        if (criterion != "korea") throw Error(ErrorCode::InvalidArgument, "--hill-climb applies to --criterion korea");
        const auto hc = hill_climb_order(data, g.kmax, k_init, fs);
        out << "k_star=" << hc.k_star << " visited=";
        for (std::size_t i = 0; i < hc.visited.size(); ++i) out << (i ? "," : "") << hc.visited[i];
        out << "\n";
        if (!g.out.empty()) {
          nlohmann::json j = {{"schema_version", kSchemaVersion},
                              {"kind", "hill_climb"},
                              {"k_star", hc.k_star},
                              {"visited", hc.visited}};
          write_text(g.out, j.dump(2) + "\n");
        }
        return kExitOk;
      }

      const auto path = require_out(g);
      if (criterion == "korea" || criterion == "all") {
        const auto post = model_order_posterior(data, g.kmax, fs);
        emit_posterior(post, path, format);
        out << "korea k_star=" << post.k_star << " p=" << format_double(post.probs[static_cast<std::size_t>(post.k_star - 1)])
            << "\n";
      }
      if (criterion != "korea") {
        const auto curve = aic_bic_curve(data, g.kmax, cfg.em, g.seed, g.jobs);
        emit_curve(curve, criterion == "all" ? sibling_path(path, "_criteria") : path, format);
        out << "aic k_star=" << curve.aic_k_star << " bic k_star=" << curve.bic_k_star << "\n";
      }
      return kExitOk;
    }

    if (*sweep) {
      SweepConfig sc;
      sc.k_hats = sweep_khat;
      sc.ns = sweep_n;
      sc.runs = sweep_runs;
      sc.k_max = g.kmax;
      sc.methods.clear();
      for (const auto& m : sweep_methods) sc.methods.push_back(parse_method(m));
      sc.seed0 = g.seed;
      sc.jobs = g.jobs;
      sc.synth = cfg.synth;
      if (sweep_min_weight >= 0) sc.synth.min_weight = sweep_min_weight;
      sc.hyper = cfg.hyper;
      sc.vb = cfg.vb;
      sc.em = cfg.em;
      const auto result = run_sweep(sc);
      emit_sweep(result, require_out(g), parse_format(g.format), sweep_timing);
      out << std::left << std::setw(6) << "k_hat" << std::setw(7) << "n" << std::setw(7) << "method" << std::setw(6)
          << "runs" << std::setw(10) << "mean" << "mse\n";
      for (const auto& a : result.aggregates) {
        out << std::setw(6) << a.k_hat << std::setw(7) << a.n << std::setw(7) << to_string(a.method) << std::setw(6)
            << a.runs << std::setw(10) << format_double(a.mean) << format_double(a.mse) << "\n";
      }
      return kExitOk;
    }

    if (*ds_list) {
      for (const auto& info : list_builtin()) {
        out << std::left << std::setw(9) << info.name << std::setw(5) << info.expected_count
            << std::setw(13) << (info.available ? "available" : "unavailable") << info.source << "\n";
      }
      return kExitOk;
    }

    if (*ds_export) {
      const auto ds = load_builtin(export_name);
      write_csv(require_out(g), ds.as_dataset());
      out << "wrote " << ds.values.size() << " values of " << ds.name << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace korea
