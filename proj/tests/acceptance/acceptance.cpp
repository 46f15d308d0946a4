// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cli.hpp"
#include "shiryaev/analysis.hpp"
#include "shiryaev/filter.hpp"
#include "shiryaev/informativeness.hpp"
#include "shiryaev/simulator.hpp"

namespace {

using namespace shiryaev;
namespace fs = std::filesystem;

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void check(int id, const std::string& name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  if (elapsed.count() > time_limit_s) {
    o.ok = false;
    o.detail += fmt::format("; exceeded {:.0f} s limit", time_limit_s);
  }
  if (!o.ok) ++failures;
  std::cout << fmt::format("{} [{}] {}: {} ({:.2f} s)", o.ok ? "PASS" : "FAIL", id, name, o.detail,
                           elapsed.count())
            << std::endl;
}

Outcome oracle_equivalence() {
  std::mt19937_64 gen(20190501);
  std::uniform_int_distribution<std::size_t> len(1, 20);
  std::normal_distribution<double> z;
  const double ms[] = {0.1, 0.23, 0.4, 0.6};
  const double rhos[] = {0.01, 0.05, 0.2};
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double m = ms[i % 4];
    const double rho = rhos[(i / 4) % 3];
    const GaussianShiftModel model(m);
    const GeometricPrior prior(rho);
    std::geometric_distribution<int> nu_minus_one(rho);
    const auto nu = static_cast<std::size_t>(nu_minus_one(gen)) + 1;
    std::vector<double> ys(len(gen));
    for (std::size_t k = 0; k < ys.size(); ++k) ys[k] = z(gen) + (k + 1 >= nu ? m : 0.0);
    const auto r = run(ys, model, prior, StoppingRule(0.95));
    const double oracle = brute_force_posterior(ys, model, prior);
    worst = std::max(worst, std::fabs(r.path.back().x1 - oracle) / oracle);
  }
  return {worst < 1e-9, fmt::format("500 sequences, max relative error {:.3g}", worst)};
}

Outcome critical_constant() {
  const double mc = critical_mean(GeometricPrior(0.05));
  const double closed = std::sqrt(2.0 * std::log(1.0 / 0.95));
  const bool two_places = std::round(mc * 100.0) == 32.0;
  const bool exact = std::fabs(mc - closed) <= 4.0 * std::numeric_limits<double>::epsilon() * closed;
  return {two_places && exact, fmt::format("m_c = {:.17g}, closed form {:.17g}", mc, closed)};
}

Outcome kl_closed_form() {
  Outcome o{true, ""};
  for (double m : {0.1, 0.23, 0.4, 0.6}) {
    const GaussianShiftModel model(m);
    const auto est = monte_carlo_kl(model, KlDirection::forward, {1'000'000, 1e-2, 0x6b6c});
    const double dev = std::fabs(est.value - 0.5 * m * m) / est.std_error;
    o.ok &= dev <= 3.0;
    o.detail += fmt::format("{}m={} {:.5f}+-{:.1e} ({:.2f} SE)", o.detail.empty() ? "" : ", ", m,
                            est.value, est.std_error, dev);
  }
  return o;
}

Outcome degenerate_decay() {
  const GaussianShiftModel same(0.0);
  const GeometricPrior prior(0.05);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z;
  std::vector<double> ys(500);
  for (auto& y : ys) y = 2.0 * z(gen);
  const auto r = run(ys, same, prior, StoppingRule(0.95));
  double worst = 0.0;
  for (std::size_t k = 1; k <= ys.size(); ++k) {
    worst = std::max(worst, std::fabs(r.path[k - 1].x1 - std::pow(0.95, static_cast<double>(k))));
  }
  const auto tau = r.stop_time.value_or(-1);
  return {worst <= 1e-12 && tau == 59,
          fmt::format("max |x1 - 0.95^k| = {:.2g}, tau = {}", worst, tau)};
}

Outcome terminal_posterior_sweep() {
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{1000, 5000, 2019, ChangeMode::no_change()};
  const auto grid = default_m_grid();
  const auto rows = mean_terminal_posterior(grid, gaussian_shift_family(), prior, config);
  bool low_ok = true, high_ok = true;
  const double base = rows.front().mean_terminal_posterior;
  std::size_t jump_at = 1;
  double jump = -1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double m = rows[i].m, v = rows[i].mean_terminal_posterior;
    if (m <= 0.25 + 1e-9) low_ok &= v < 1e-2;
    if (m >= 0.45 - 1e-9) high_ok &= v >= 10.0 * base;
    if (i > 0 && v - rows[i - 1].mean_terminal_posterior > jump) {
      jump = v - rows[i - 1].mean_terminal_posterior;
      jump_at = i;
    }
  }
  const double lo = rows[jump_at - 1].m, hi = rows[jump_at].m;
  const bool bracket = lo >= 0.25 - 1e-9 && hi <= 0.40 + 1e-9;
  std::string values;
  for (const auto& r : rows) values += fmt::format(" {:.2f}:{:.3g}", r.m, r.mean_terminal_posterior);
  return {low_ok && high_ok && bracket,
          fmt::format("largest jump {:.3g} on [{:.2f}, {:.2f}];{}", jump, lo, hi, values)};
}

Outcome drift_sign() {
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{1000, 5000, 2019, ChangeMode::no_change()};
  Outcome o{true, ""};
  for (double m : {0.23, 0.40}) {
    const auto batch = analyse_batch(GaussianShiftModel(m), prior, config, nullptr, {});
    const auto bin = smallest_reliable_bin(batch.drift);
    if (!bin) return {false, fmt::format("m={}: no reliable bin", m)};
    const double limit = std::log(0.95) + 0.5 * m * m;
    const double dev = std::fabs(bin->mean_increment - limit) / bin->std_error;
    const bool sign_ok = m < 0.32 ? bin->mean_increment < 0.0 : bin->mean_increment > 0.0;
    o.ok &= dev <= 3.0 && sign_ok;
    o.detail += fmt::format("{}m={}: {:.6f}+-{:.1e} vs {:.6f} ({:.2f} SE, n={})",
                            o.detail.empty() ? "" : "; ", m, bin->mean_increment, bin->std_error,
                            limit, dev, bin->count);
  }
  return o;
}

Outcome pfa_bound() {
  const GeometricPrior prior(0.05);
  const MonteCarloConfig config{2000, 1000, 2019, ChangeMode::sample_from_prior()};
  Outcome o{true, ""};
  for (double m : {0.23, 0.4, 0.6}) {
    for (double h : {0.9, 0.95, 0.99}) {
      const auto study = run_detection_study(GaussianShiftModel(m), prior, config, StoppingRule(h), 1.0);
      o.ok &= study.metrics.pfa < 1.0 - h;
      o.detail += fmt::format("{}m={},h={}:{:.4f}", o.detail.empty() ? "" : " ", m, h,
                              study.metrics.pfa);
    }
  }
  return o;
}

std::string run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "shiryaev");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
    throw std::runtime_error("cli failed: " + err.str());
  }
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "shiryaev_acceptance";
  fs::remove_all(dir);
  std::vector<std::string> mismatched;
  for (const char* tag : {"a", "b"}) {
    run_cli({"figure1", "--out-dir", (dir / tag).string()});
    run_cli({"figure2", "--trials", "50", "--horizon", "1000", "--out",
             (dir / tag / "figure2.csv").string()});
    run_cli({"sweep", "--trials", "50", "--horizon", "1000", "--out",
             (dir / tag / "sweep.csv").string()});
  }
  std::size_t bytes = 0;
  for (const char* name : {"figure1_m0.23.csv", "figure1_m0.40.csv", "figure2.csv", "sweep.csv"}) {
    const auto a = slurp(dir / "a" / name);
    bytes += a.size();
    if (a.empty() || a != slurp(dir / "b" / name)) mismatched.push_back(name);
  }
  fs::remove_all(dir);
  if (!mismatched.empty()) return {false, "differing outputs: " + fmt::format("{}", fmt::join(mismatched, ", "))};
  return {true, fmt::format("figure1, figure2, sweep: 4 files, {} bytes identical across runs", bytes)};
}

}  // namespace

int main() {
  std::cout << fmt::format("threads: {}", max_threads()) << std::endl;
  check(1, "oracle equivalence", 5.0, oracle_equivalence);
  check(2, "critical constant", 1.0, critical_constant);
  check(3, "KL closed form", 10.0, kl_closed_form);
  check(4, "degenerate geometric decay", 1.0, degenerate_decay);
  check(5, "terminal posterior sweep", 120.0, terminal_posterior_sweep);
  check(6, "drift sign transition", 120.0, drift_sign);
  check(7, "false alarm bound", 60.0, pfa_bound);
  check(8, "determinism", 10.0, determinism);
  std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
