#ifndef STABLEFIELD_CLI_COMMANDS_HPP
#define STABLEFIELD_CLI_COMMANDS_HPP

/**
 * The four subcommands. Each writes its outputs below `out_dir`; every
 * output file is a pure function of (config, seed), and anything time
 * dependent goes to run.log only.
 */

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stablefield/classifier.hpp"
#include "stablefield/cli/config.hpp"
#include "stablefield/decomposition.hpp"
#include "stablefield/experiments.hpp"
#include "stablefield/io/csv.hpp"
#include "stablefield/io/json.hpp"
#include "stablefield/io/svg.hpp"
#include "stablefield/parallel.hpp"

namespace stablefield::cli {

/// A structural check failed during `verify`; exit code 3.
class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::size_t threads = 1;
  std::ostream* console = &std::cout;
};

namespace detail {

/// Funnels file output through one place and appends to the sidecar log.
class Writer {
 public:
  Writer(std::filesystem::path dir, std::string command) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    log_.open(dir_ / "run.log", std::ios::app);
    log("start " + command);
  }
  ~Writer() { log("done"); }

  void file(const std::string& name, const std::string& content) {
    std::ofstream os(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    os << content;
    log("wrote " + name);
  }

  void log(const std::string& msg) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    log_ << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << msg << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::ofstream log_;
};

inline const RosinskiTriplet& triplet(const ExperimentConfig& cfg) {
  if (!cfg.triplet) throw ModelError("configuration does not define a usable triplet");
  return *cfg.triplet;
}

inline io::Json header(const ExperimentConfig& cfg) {
  io::Json j;
  j["family"] = cfg.family_type;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto& tr = detail::triplet(cfg);
  // Fail on modeling preconditions (e.g. transient classes) before any work.
  (void)ergodic_decomposition(tr.family());
  const std::size_t R = cfg.simulation.realizations;
  const SimulationOptions sim{cfg.simulation.truncation};
  std::vector<std::string> csv(R), meta(R);
  parallel_for(R, opt.threads, [&](std::size_t k) {
    RandomStream rng = RandomStream(cfg.seed).derive("realization", k);
    const auto x = simulate_field(tr, cfg.simulation.window, sim, rng);
    std::ostringstream os;
    io::write_realization_csv(os, x);
    csv[k] = os.str();
    io::Json j = detail::header(cfg);
    j["realization"] = k;
    j["meta"] = io::to_json(x.meta);
    meta[k] = io::dump(j);
  });
  detail::Writer w(opt.out_dir, "simulate " + cfg.source);
  for (std::size_t k = 0; k < R; ++k) {
    w.file("realization_" + std::to_string(k) + ".csv", csv[k]);
    w.file("realization_" + std::to_string(k) + ".json", meta[k]);
  }
  *opt.console << "wrote " << R << " realization(s) to " << opt.out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

inline io::Json classification_json(const ExperimentConfig& cfg) {
  const auto& tr = detail::triplet(cfg);
  const auto comps = ergodic_decomposition(tr.family());
  Verdict v = classify(tr);
  if (const auto* ms = std::get_if<MarkovShift>(&tr.family())) {
    const auto by_recurrence = classify_markov_field(ms->chain, tr.alpha());
    if (by_recurrence.kind != v.kind)
      throw InternalError("recurrence-based verdict disagrees with the decomposition verdict");
  }
  io::Json j = detail::header(cfg);
  j["verdict"] = to_string(v.kind);
  j["basis"] = to_string(v.basis);
  j["neveu"] = to_json(neveu_decomposition(comps));
  j["ledger"] = to_json(central_ledger(comps));
  j["warnings"] = v.warnings;
  return j;
}

inline int cmd_classify(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto j = classification_json(cfg);
  detail::Writer w(opt.out_dir, "classify " + cfg.source);
  w.file("classify.json", io::dump(j));
  *opt.console << "verdict: " << j["verdict"].get<std::string>() << " ("
               << j["basis"].get<std::string>() << ")\n";
  for (const auto& warning : j["warnings"])
    std::cerr << "warning: " << warning.get<std::string>() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Points on which the structural identities are checked.
inline std::vector<Point> verification_points(const RosinskiTriplet& tr, std::uint64_t seed) {
  std::vector<Point> pts;
  const auto& fam = tr.family();
  if (const auto* fd = std::get_if<FiniteDiscrete>(&fam)) return all_atoms(*fd);
  if (const auto* mma = std::get_if<MixedMovingAverage>(&fam)) {
    for (std::size_t y = 0; y < mma->Y.size(); ++y)
      for (const auto& z : sup_ball(mma->d, 2)) pts.emplace_back(MmaPoint{y, z});
    return pts;
  }
  RandomStream rng = RandomStream(seed).derive("verify");
  if (const auto* ms = std::get_if<MarkovShift>(&fam)) {
    for (const auto& cls : ms->chain.classes()) {
      const auto& spec = ms->chain.spec_of(cls);
      const auto pi = markov::invariant_measure(cls, spec);
      markov::PathSampler sampler(cls, spec, pi, markov::truncation_set(cls, spec, pi, ms->truncation_radius));
      for (int i = 0; i < 4; ++i) pts.emplace_back(sampler.sample(-8, 8, rng));
    }
    return pts;
  }
  const auto& sg = std::get<SubGaussianShift>(fam);
  const auto win = LatticeWindow::cube(sg.d, 6);
  for (int i = 0; i < 4; ++i) {
    CoordinatePatch p{win, {}};
    for (std::size_t k = 0; k < win.size(); ++k) p.values.push_back(sg.gaussian_sd * rng.normal());
    pts.emplace_back(std::move(p));
  }
  return pts;
}

inline io::Json report_json(const ViolationReport& r) {
  io::Json j;
  j["check"] = r.check;
  j["passed"] = r.ok();
  j["checked"] = r.checked;
  j["violations"] = r.violations;
  return j;
}

}  // namespace detail

inline io::Json verification_json(const ExperimentConfig& cfg, std::size_t threads) {
  const auto& tr = detail::triplet(cfg);
  const auto& fam = tr.family();
  const auto points = detail::verification_points(tr, cfg.seed);
  const auto ts = sup_ball(tr.dim(), std::holds_alternative<FiniteDiscrete>(fam) ? 3 : 2);
  std::vector<ViolationReport> reports{
      verify_action_axioms(fam, points, ts),
      verify_cocycle(tr.cocycle(), fam, points, ts),
      verify_rn_chain_rule(fam, points, ts),
  };
  io::Json j = detail::header(cfg);

  if (const auto* fd = std::get_if<FiniteDiscrete>(&fam)) {
    ViolationReport support{"full_support", 1, {}};
    if (!check_full_support(tr)) support.fail("kernel vanishes on a whole orbit");
    reports.push_back(support);
    const bool minimal = check_minimal_finite(tr);
    j["minimal"] = minimal;
    if (cfg.expect_minimal) {
      ViolationReport m{"minimality_annotation", 1, {}};
      if (*cfg.expect_minimal != minimal)
        m.fail(std::string("config says minimal = ") + (*cfg.expect_minimal ? "true" : "false") +
               " but the check gives " + (minimal ? "true" : "false"));
      reports.push_back(m);
    }
    std::vector<std::vector<std::size_t>> sets;
    if (fd->space().size() <= 12) {
      sets = all_subsets(fd->space().size());
    } else {
      RandomStream rng = RandomStream(cfg.seed).derive("verify-subsets");
      for (int i = 0; i < 4096; ++i) {
        std::vector<std::size_t> B;
        for (std::size_t s = 0; s < fd->space().size(); ++s)
          if (rng.below(2)) B.push_back(s);
        sets.push_back(std::move(B));
      }
    }
    reports.push_back(decomposition_consistency(*fd, sets));
  }

  // Neveu/ledger coherence on untainted ledgers.
  const auto comps = ergodic_decomposition(fam);
  const auto ledger = central_ledger(comps);
  const auto neveu = neveu_decomposition(comps);
  ViolationReport coherence{"neveu_ledger_coherence", 0, {}};
  if (!ledger.tainted()) {
    coherence.checked = 2;
    if (admits_only_II1(ledger) != neveu.null_labels.empty())
      coherence.fail("admits_only_II1 disagrees with an empty null part");
    if (admits_no_II1(ledger) != neveu.positive_labels.empty())
      coherence.fail("admits_no_II1 disagrees with an empty positive part");
  }
  reports.push_back(coherence);

  ViolationReport stat{"stationarity", 0, {}};
  const auto lag_reports =
      stationarity_test(tr, cfg.diagnostics.lags, cfg.diagnostics.stationarity_realizations,
                        cfg.seed, SimulationOptions{cfg.diagnostics.truncation}, threads);
  io::Json lags = io::Json::array();
  for (const auto& l : lag_reports) {
    ++stat.checked;
    // Single-run check; the repeated-run criterion lives in the test suite.
    if (l.ks_p_value < 1e-3)
      stat.fail("lag " + std::to_string(l.lag) + ": KS p = " + io::format_double(l.ks_p_value));
    io::Json e;
    e["lag"] = l.lag;
    e["ks_statistic"] = l.ks_statistic;
    e["ks_p_value"] = l.ks_p_value;
    e["joint_cf_distance"] = l.joint_cf_distance;
    lags.push_back(std::move(e));
  }
  reports.push_back(stat);
  j["stationarity"] = lags;

  j["checks"] = io::Json::array();
  bool ok = true;
  for (const auto& r : reports) {
    j["checks"].push_back(detail::report_json(r));
    ok = ok && r.ok();
  }
  j["passed"] = ok;
  return j;
}

inline int cmd_verify(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto j = verification_json(cfg, opt.threads);
  detail::Writer w(opt.out_dir, "verify " + cfg.source);
  w.file("verify.json", io::dump(j));
  std::vector<std::string> failed;
  for (const auto& c : j["checks"]) {
    const auto name = c["check"].get<std::string>();
    const bool pass = c["passed"].get<bool>();
    *opt.console << (pass ? "PASS " : "FAIL ") << name << "\n";
    if (!pass) failed.push_back(name);
  }
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    throw VerificationFailed("verification failed: " + names);
  }
  return 0;
}

// ---------------------------------------------------------------------------

/// Symbolic verdict and empirical dispersion verdict agree when ergodic
/// matches ergodic; a mixed field only has to avoid looking ergodic.
inline bool verdicts_agree(VerdictKind symbolic, DispersionVerdict empirical) {
  switch (symbolic) {
    case VerdictKind::ErgodicWeaklyMixing: return empirical == DispersionVerdict::EmpiricallyErgodic;
    case VerdictKind::CompletelyNonErgodic:
      return empirical == DispersionVerdict::EmpiricallyNonErgodic;
    case VerdictKind::MixedErgodicity: return empirical != DispersionVerdict::EmpiricallyErgodic;
  }
  return false;
}

inline int cmd_report(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto& tr = detail::triplet(cfg);
  const auto& D = cfg.diagnostics;
  const SimulationOptions sim{D.truncation};
  const auto h = h_function(D.h);
  const auto classification = classification_json(cfg);
  const Verdict verdict = classify(tr);

  const auto disp = dispersion_experiment(tr, h, D.n_grid, D.realizations, cfg.seed, sim,
                                          D.thresholds, opt.threads);

  // Marginal law of X_0 from the dispersion realizations plus fresh ones.
  std::vector<double> x0;
  const std::size_t n_cf = std::max<std::size_t>(2000, D.realizations);
  {
    const auto src = realization_source(tr, LatticeWindow::cube(tr.dim(), 0), sim, cfg.seed ^ 0x5eedULL);
    std::vector<double> v(n_cf);
    parallel_for(n_cf, opt.threads, [&](std::size_t k) { v[k] = src(k).values[0]; });
    x0 = std::move(v);
  }
  const auto cf = empirical_cf(x0, D.theta_grid);
  const double sigma_sym = std::pow(marginal_scale_power(tr), 1.0 / tr.alpha());
  io::Json fit;
  try {
    fit["sigma_hat"] = scale_fit(x0, tr.alpha());
  } catch (const FitUnstable& e) {
    fit["sigma_hat"] = nullptr;
    fit["error"] = e.what();
  }
  fit["sigma_symbolic"] = sigma_sym;

  io::Json growth;
  try {
    const auto g = maxima_growth(tr, D.maxima_grid, D.maxima_realizations, cfg.seed ^ 0x9a0ULL, sim,
                                 opt.threads);
    growth["exponent"] = g.exponent;
    growth["ci"] = {g.ci_low, g.ci_high};
    growth["n"] = g.n_grid;
    growth["median_max"] = g.median_max;
    growth["reference_one_over_alpha"] = 1.0 / tr.alpha();
  } catch (const DegenerateField& e) {
    growth["error"] = e.what();
  }

  io::Json summary = detail::header(cfg);
  summary["symbolic"] = classification;
  io::Json dj;
  dj["h"] = D.h;
  dj["n_grid"] = disp.n_grid;
  dj["mean"] = disp.mean;
  dj["sd"] = disp.sd;
  dj["rho"] = disp.rho;
  dj["thresholds"] = {{"ergodic_below", disp.thresholds.ergodic_below},
                      {"non_ergodic_above", disp.thresholds.non_ergodic_above}};
  dj["verdict"] = to_string(disp.verdict);
  summary["dispersion"] = dj;
  summary["scale_fit"] = fit;
  summary["maxima_growth"] = growth;
  io::Json cmp;
  cmp["symbolic"] = to_string(verdict.kind);
  cmp["empirical"] = to_string(disp.verdict);
  cmp["agreement"] = verdicts_agree(verdict.kind, disp.verdict);
  summary["comparison"] = cmp;

  // Tables.
  std::ostringstream traces;
  {
    io::CsvWriter w(traces);
    w.row({"n", "realization", "theta_hat"});
    for (std::size_t j = 0; j < disp.n_grid.size(); ++j)
      for (std::size_t k = 0; k < disp.traces.size(); ++k)
        w.row({std::to_string(disp.n_grid[j]), std::to_string(k),
               io::format_double(disp.traces[k].values[j])});
  }
  std::ostringstream cf_csv;
  {
    io::CsvWriter w(cf_csv);
    w.row({"theta", "re", "im", "se_re", "se_im", "symbolic"});
    for (const auto& e : cf)
      w.row({io::format_double(e.theta), io::format_double(e.value.real()),
             io::format_double(e.value.imag()), io::format_double(e.se_re), io::format_double(e.se_im),
             io::format_double(std::exp(-std::pow(sigma_sym * std::abs(e.theta), tr.alpha())))});
  }

  // Charts.
  std::vector<io::Series> trace_series;
  for (std::size_t k = 0; k < std::min<std::size_t>(5, disp.traces.size()); ++k) {
    io::Series s{"realization " + std::to_string(k), {}, disp.traces[k].values};
    for (auto n : disp.n_grid) s.x.push_back(static_cast<double>(n));
    trace_series.push_back(std::move(s));
  }
  io::Series sd_series{"sd over realizations", {}, disp.sd};
  for (auto n : disp.n_grid) sd_series.x.push_back(static_cast<double>(n));
  io::Series cf_emp{"empirical", {}, {}}, cf_sym{"exp(-(sigma theta)^alpha)", {}, {}};
  for (const auto& e : cf) {
    cf_emp.x.push_back(e.theta);
    cf_emp.y.push_back(e.value.real());
    cf_sym.x.push_back(e.theta);
    cf_sym.y.push_back(std::exp(-std::pow(sigma_sym * std::abs(e.theta), tr.alpha())));
  }

  detail::Writer w(opt.out_dir, "report " + cfg.source);
  w.file("ergodic_average.csv", traces.str());
  w.file("cf.csv", cf_csv.str());
  w.file("ergodic_average.svg",
         io::line_chart(trace_series, {"ergodic averages", "n", "theta_hat_n", true, false}));
  w.file("dispersion.svg",
         io::line_chart({sd_series}, {"spread of theta_hat_n", "n", "sd", true, true}));
  w.file("cf.svg", io::line_chart({cf_emp, cf_sym}, {"characteristic function of X_0", "theta",
                                                      "Re phi", false, false}));
  if (growth.contains("median_max")) {
    io::Series g{"median max |X_t|", {}, growth["median_max"].get<std::vector<double>>()};
    for (auto n : D.maxima_grid) g.x.push_back(static_cast<double>(n));
    w.file("maxima.svg", io::line_chart({g}, {"partial maxima", "n", "M_n", true, true}));
  }
  w.file("summary.json", io::dump(summary));

  *opt.console << "symbolic: " << to_string(verdict.kind) << "  empirical: " << to_string(disp.verdict)
               << " (rho = " << io::format_double(disp.rho) << ")  agreement: "
               << (cmp["agreement"].get<bool>() ? "true" : "false") << "\n";
  return 0;
}

}  // namespace stablefield::cli

#endif  // STABLEFIELD_CLI_COMMANDS_HPP
