#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "shiryaev/analysis.hpp"
#include "shiryaev/informativeness.hpp"
#include "shiryaev/io.hpp"
#include "shiryaev/model_config.hpp"
#include "shiryaev/simulator.hpp"

namespace shiryaev::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad user input: reported on one line, exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
void require(bool ok, std::string_view flag, std::string_view domain, T value) {
  if (!ok) throw UsageError(fmt::format("{} must be {} (got {})", flag, domain, value));
}

// Figure recipes.
constexpr double kFigureRho = 0.05;
constexpr double kFigure1Weak = 0.23;
constexpr double kFigure1Informative = 0.40;

struct ModelArgs {
  std::string name = "gaussian-shift";
  double m = std::nan("");
  std::string spec;

  void add_to(CLI::App& app, bool m_required_positive) {
    app.add_option("--model", name, "Model name (gaussian-shift)")->capture_default_str();
    app.add_option("--m", m, "Post-change mean shift");
    app.add_option("--model-spec", spec,
                   R"(Model as JSON, e.g. {"model": "gaussian_shift", "m": 0.23})");
    positive_ = m_required_positive;
  }

  std::shared_ptr<const ObservationModel> build() const {
    json j;
    if (!spec.empty()) {
      try {
        j = json::parse(spec);
      } catch (const json::parse_error& e) {
        throw UsageError(fmt::format("--model-spec must be valid JSON ({})", e.what()));
      }
    } else {
      require(!std::isnan(m), "--m", "given", "nothing");
      j = {{"model", name}, {"m", m}};
    }
    if (j.contains("m") && j["m"].is_number()) {
      const double value = j["m"].get<double>();
      if (positive_) {
        require(std::isfinite(value) && value > 0.0, "--m", "a finite real > 0", value);
      } else {
        require(std::isfinite(value) && value >= 0.0, "--m", "a finite real >= 0", value);
      }
    }
    try {
      return model_from_json(j);
    } catch (const std::invalid_argument& e) {
      throw UsageError(fmt::format("--model: {}", e.what()));
    }
  }

 private:
  bool positive_ = false;
};

GeometricPrior make_prior(double rho) {
  require(rho > 0.0 && rho < 1.0, "--rho", "in (0, 1)", rho);
  return GeometricPrior(rho);
}

StoppingRule make_rule(double h) {
  require(h > 0.0 && h < 1.0, "--h", "in (0, 1)", h);
  return StoppingRule(h);
}

MonteCarloConfig make_config(std::int64_t trials, std::int64_t horizon, std::uint64_t seed,
                             ChangeMode mode) {
  require(trials >= 1, "--trials", "an integer >= 1", trials);
  require(horizon >= 1, "--horizon", "an integer >= 1", horizon);
  return {trials, horizon, seed, mode};
}

ChangeMode make_change_mode(const std::string& change, std::int64_t nu) {
  if (change == "none") return ChangeMode::no_change();
  if (change == "prior") return ChangeMode::sample_from_prior();
  require(nu >= 1, "--nu", "an integer >= 1 with --change fixed", nu);
  return ChangeMode::fixed(nu);
}

void emit(std::ostream& out, const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    io::write_file_atomic(path, contents);
  }
}

Execution execution_of(bool serial) { return serial ? Execution::serial : Execution::parallel; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shiryaev quickest change detection: informativeness diagnosis and Monte Carlo "
               "experiments"};
  app.require_subcommand(1);
  // "--h" is the stopping threshold, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_help_all_flag("--help-all");

  // Shared defaults.
  double rho = kFigureRho;
  double h = 0.95;
  double c = 1.0;
  std::int64_t trials = 1000;
  std::int64_t horizon = 5000;
  std::uint64_t seed = 2019;
  std::string out_path = "-";
  bool serial = false;
  ModelArgs model_args;

  // diagnose ---------------------------------------------------------------
  auto* diagnose = app.add_subcommand("diagnose", "Informativeness report as JSON");
  model_args.add_to(*diagnose, true);
  diagnose->add_option("--rho", rho, "Geometric prior parameter")->capture_default_str();

  // simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "One trajectory as CSV");
  ModelArgs sim_model;
  sim_model.add_to(*simulate, false);
  std::string change = "none";
  std::int64_t nu = 0;
  std::int64_t trial_index = 0;
  simulate->add_option("--rho", rho)->capture_default_str();
  simulate->add_option("--h", h, "Stopping threshold")->capture_default_str();
  simulate->add_option("--horizon", horizon)->capture_default_str();
  simulate->add_option("--seed", seed)->capture_default_str();
  simulate->add_option("--trial", trial_index, "Trial index within the seed's batch")
      ->capture_default_str();
  simulate->add_option("--change", change, "none | prior | fixed")
      ->check(CLI::IsMember({"none", "prior", "fixed"}))
      ->capture_default_str();
  simulate->add_option("--nu", nu, "Change time for --change fixed");
  simulate->add_option("--out", out_path, "Output CSV ('-' for stdout)")->capture_default_str();

  // sweep ------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Mean terminal posterior over an m grid (no change)");
  double m_min = 0.10, m_max = 0.60, m_step = 0.05;
  std::vector<double> m_grid;
  sweep->add_option("--rho", rho)->capture_default_str();
  sweep->add_option("--m-min", m_min)->capture_default_str();
  sweep->add_option("--m-max", m_max)->capture_default_str();
  sweep->add_option("--m-step", m_step)->capture_default_str();
  sweep->add_option("--m-grid", m_grid, "Explicit m values (overrides min/max/step)")
      ->delimiter(',');
  sweep->add_option("--trials", trials)->capture_default_str();
  sweep->add_option("--horizon", horizon)->capture_default_str();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--out", out_path)->capture_default_str();
  sweep->add_flag("--serial", serial, "Use the serial reference loop");

  // metrics ----------------------------------------------------------------
  auto* metrics = app.add_subcommand("metrics", "Delay / false alarm / cost under the prior");
  ModelArgs metrics_model;
  metrics_model.add_to(*metrics, false);
  std::int64_t metrics_horizon = 1000;
  metrics->add_option("--rho", rho)->capture_default_str();
  metrics->add_option("--h", h)->capture_default_str();
  metrics->add_option("--c", c, "Delay penalty")->capture_default_str();
  metrics->add_option("--trials", trials)->capture_default_str();
  metrics->add_option("--horizon", metrics_horizon)->capture_default_str();
  metrics->add_option("--seed", seed)->capture_default_str();
  metrics->add_option("--out", out_path)->capture_default_str();
  metrics->add_flag("--serial", serial);

  // drift ------------------------------------------------------------------
  auto* drift = app.add_subcommand("drift", "Binned drift of log x1 and trap statistics");
  ModelArgs drift_model;
  drift_model.add_to(*drift, false);
  std::string conditioning = "pre";
  std::string drift_change = "none";
  double lowest = 1e-6;
  int per_decade = 12;
  double trap_entry = 1e-3, trap_escape = 1e-1;
  drift->add_option("--rho", rho)->capture_default_str();
  drift->add_option("--trials", trials)->capture_default_str();
  drift->add_option("--horizon", horizon)->capture_default_str();
  drift->add_option("--seed", seed)->capture_default_str();
  drift->add_option("--change", drift_change, "none | prior")
      ->check(CLI::IsMember({"none", "prior"}))
      ->capture_default_str();
  drift->add_option("--conditioning", conditioning, "pre | all")
      ->check(CLI::IsMember({"pre", "all"}))
      ->capture_default_str();
  drift->add_option("--lowest", lowest, "Lowest log-spaced bin edge")->capture_default_str();
  drift->add_option("--per-decade", per_decade)->capture_default_str();
  drift->add_option("--trap-entry", trap_entry)->capture_default_str();
  drift->add_option("--trap-escape", trap_escape)->capture_default_str();
  drift->add_option("--out", out_path, "Drift table CSV")->capture_default_str();
  drift->add_flag("--serial", serial);

  // figure1 ----------------------------------------------------------------
  auto* figure1 = app.add_subcommand("figure1", "Two no-change paths, m = 0.23 and m = 0.40");
  std::string out_dir = ".";
  figure1->add_option("--seed", seed)->capture_default_str();
  figure1->add_option("--horizon", horizon)->capture_default_str();
  figure1->add_option("--out-dir", out_dir)->capture_default_str();

  // figure2 ----------------------------------------------------------------
  auto* figure2 = app.add_subcommand("figure2", "Mean terminal posterior across m = 0.10..0.60");
  std::string figure2_out = "figure2.csv";
  figure2->add_option("--seed", seed)->capture_default_str();
  figure2->add_option("--trials", trials)->capture_default_str();
  figure2->add_option("--horizon", horizon)->capture_default_str();
  figure2->add_option("--out", figure2_out)->capture_default_str();
  figure2->add_flag("--serial", serial);

  for (auto* sub : app.get_subcommands({})) sub->set_help_flag("--help", "Print help and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (diagnose->parsed()) {
      const auto model = model_args.build();
      const auto prior = make_prior(rho);
      out << io::to_json(shiryaev::diagnose(*model, prior)).dump(2) << '\n';

    } else if (simulate->parsed()) {
      const auto model = sim_model.build();
      const auto prior = make_prior(rho);
      const auto rule = make_rule(h);
      require(trial_index >= 0, "--trial", "an integer >= 0", trial_index);
      const auto config = make_config(1, horizon, seed, make_change_mode(change, nu));
      const auto t = generate_trajectory(*model, prior, config, rule, trial_index);
      emit(out, out_path, io::trajectory_csv(t));

    } else if (sweep->parsed()) {
      const auto prior = make_prior(rho);
      const auto config = make_config(trials, horizon, seed, ChangeMode::no_change());
      if (m_grid.empty()) {
        require(m_step > 0.0, "--m-step", "> 0", m_step);
        require(m_max >= m_min, "--m-max", ">= --m-min", m_max);
        m_grid = make_grid(m_min, m_max, m_step);
      }
      for (double m : m_grid) require(std::isfinite(m) && m >= 0.0, "--m-grid", "values >= 0", m);
      const auto rows = mean_terminal_posterior(m_grid, gaussian_shift_family(), prior, config,
                                                execution_of(serial));
      emit(out, out_path, io::sweep_csv(rows));

    } else if (metrics->parsed()) {
      const auto model = metrics_model.build();
      const auto prior = make_prior(rho);
      const auto rule = make_rule(h);
      require(std::isfinite(c) && c >= 0.0, "--c", "a finite real >= 0", c);
      const auto config =
          make_config(trials, metrics_horizon, seed, ChangeMode::sample_from_prior());
      const auto study = run_detection_study(*model, prior, config, rule, c, execution_of(serial));
      if (const auto w = study.metrics.warning(); !w.empty()) err << "warning: " << w << '\n';
      emit(out, out_path, io::to_json(study.metrics).dump(2) + "\n");

    } else if (drift->parsed()) {
      const auto model = drift_model.build();
      const auto prior = make_prior(rho);
      const auto config = make_config(trials, horizon, seed, make_change_mode(drift_change, 1));
      require(lowest > 0.0 && lowest < 1.0, "--lowest", "in (0, 1)", lowest);
      require(per_decade >= 1, "--per-decade", "an integer >= 1", per_decade);
      require(trap_entry > 0.0 && trap_entry <= 1.0, "--trap-entry", "in (0, 1]", trap_entry);
      require(trap_escape > trap_entry && trap_escape <= 1.0, "--trap-escape",
              "in (--trap-entry, 1]", trap_escape);
      AnalysisOptions options;
      options.binning = {lowest, per_decade};
      options.conditioning = conditioning == "pre" ? DriftConditioning::pre_change_only
                                                   : DriftConditioning::all_steps;
      options.trap = TrapLevels{trap_entry, trap_escape};
      const auto batch = analyse_batch(*model, prior, config, nullptr, options,
                                       execution_of(serial));
      const auto report = shiryaev::diagnose(*model, prior);
      json summary;
      summary["drift_bound"] = report.drift_bound;
      const auto smallest = smallest_reliable_bin(batch.drift);
      summary["smallest_reliable_bin"] =
          smallest ? json{{"bin_low", smallest->bin_low},
                          {"bin_high", smallest->bin_high},
                          {"mean_increment", smallest->mean_increment},
                          {"std_error", smallest->std_error},
                          {"count", smallest->count}}
                   : json(nullptr);
      const auto pooled = pool_drift(batch.drift, trap_entry);
      summary["pooled_below_entry"] = {{"bin_high", pooled.bin_high},
                                       {"mean_increment", pooled.mean_increment},
                                       {"std_error", pooled.std_error},
                                       {"count", pooled.count}};
      const auto level = empirical_trap_level(batch.drift);
      summary["empirical_trap_level"] = level ? json(*level) : json(nullptr);
      summary["trap"] = {{"entry_level", trap_entry},
                         {"escape_level", trap_escape},
                         {"trajectories", batch.trap->trajectories},
                         {"entered", batch.trap->entered},
                         {"escaped", batch.trap->escaped}};
      emit(out, out_path, io::drift_csv(batch.drift));
      if (!(out_path.empty() || out_path == "-")) out << summary.dump(2) << '\n';

    } else if (figure1->parsed()) {
      const GeometricPrior prior(kFigureRho);
      const StoppingRule rule(0.95);
      const auto config = make_config(1, horizon, seed, ChangeMode::no_change());
      std::map<std::string, std::string> files;
      json summary = json::array();
      for (const double m : {kFigure1Weak, kFigure1Informative}) {
        const GaussianShiftModel model(m);
        const auto t = generate_trajectory(model, prior, config, rule, 0);
        const auto name = fmt::format("figure1_m{:.2f}.csv", m);
        files[name] = io::trajectory_csv(t);
        summary.push_back({{"m", m},
                           {"file", (fs::path(out_dir) / name).string()},
                           {"terminal_x1", t.x1.back()},
                           {"terminal_log_x1", t.log_x1.back()}});
      }
      fs::create_directories(out_dir);
      for (const auto& [name, contents] : files) io::write_file_atomic(fs::path(out_dir) / name, contents);
      out << summary.dump(2) << '\n';

    } else if (figure2->parsed()) {
      const GeometricPrior prior(kFigureRho);
      const auto config = make_config(trials, horizon, seed, ChangeMode::no_change());
      const auto grid = default_m_grid();
      const auto rows = mean_terminal_posterior(grid, gaussian_shift_family(), prior, config,
                                                execution_of(serial));
      io::write_file_atomic(figure2_out, io::sweep_csv(rows));
      out << json{{"critical_mean", critical_mean(prior)}, {"output", figure2_out}}.dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace shiryaev::cli
