#ifndef STABLEFIELD_CLI_CONFIG_HPP
#define STABLEFIELD_CLI_CONFIG_HPP

/**
 * Experiment configuration: one YAML file describing alpha, the action
 * family with its kernel and cocycle, simulation and diagnostics settings.
 * See README.md for the schema. Every error names the file line.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "stablefield/actions.hpp"
#include "stablefield/diagnostics.hpp"
#include "stablefield/field_simulation.hpp"
#include "stablefield/markov.hpp"

namespace stablefield::cli {

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SimulationSection {
  LatticeWindow window;
  std::size_t truncation = 10000;
  std::size_t realizations = 1;
};

struct DiagnosticsSection {
  std::vector<std::int64_t> n_grid{100, 2000};
  std::size_t realizations = 50;
  std::string h = "cos";
  DispersionThresholds thresholds;
  std::vector<double> theta_grid{0.25, 0.5, 1.0, 2.0};
  std::vector<std::int64_t> lags{1, 5};
  std::size_t stationarity_realizations = 2000;
  std::vector<std::int64_t> maxima_grid{10, 30, 100, 300, 1000};
  std::size_t maxima_realizations = 30;
  std::size_t truncation = 1000;  // LePage J used by diagnostics
};

struct ExperimentConfig {
  std::string source;
  double alpha = 1.0;
  std::uint64_t seed = 0;
  std::string family_type;
  std::optional<RosinskiTriplet> triplet;  // empty only for unbuildable fixtures
  std::optional<bool> expect_minimal;      // finite_discrete annotation
  SimulationSection simulation;
  DiagnosticsSection diagnostics;
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& field,
                         const std::string& msg) const {
    std::string where = source_;
    if (n.IsDefined() && n.Mark().line >= 0) where += ":" + std::to_string(n.Mark().line + 1);
    throw ConfigError(where + ": field '" + field + "': " + msg);
  }

  YAML::Node require(const YAML::Node& parent, const std::string& key) const {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, key, "missing");
    return n;
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, field, "has the wrong type");
    }
  }

  template <class T>
  T get(const YAML::Node& parent, const std::string& key, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    return as<T>(n, key);
  }

  template <class T>
  std::vector<T> list(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n, field, "must be a list");
    std::vector<T> out;
    for (const auto& x : n) out.push_back(as<T>(x, field));
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

inline std::size_t label_index(const Reader& r, const YAML::Node& n, const std::string& field,
                               const std::vector<std::string>& labels) {
  const auto s = r.as<std::string>(n, field);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == s) return i;
  r.fail(n, field, "unknown label '" + s + "'");
}

inline GroupElement group_element(const Reader& r, const YAML::Node& n, const std::string& field,
                                  std::size_t d) {
  auto v = r.list<std::int64_t>(n, field);
  if (v.size() != d) r.fail(n, field, "needs " + std::to_string(d) + " coordinates");
  return GroupElement(std::move(v));
}

/// Runs `build`, turning argument errors into located config errors and
/// passing model errors through.
template <class F>
auto located(const Reader& r, const YAML::Node& n, const std::string& field, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    r.fail(n, field, e.what());
  }
}

inline RosinskiTriplet finite_triplet(const Reader& r, const YAML::Node& fam, double alpha,
                                      ExperimentConfig& cfg) {
  const auto atoms = r.require(fam, "atoms");
  if (!atoms.IsSequence() || atoms.size() == 0) r.fail(atoms, "atoms", "must be a nonempty list");
  std::vector<std::string> labels;
  std::vector<double> weights, f;
  for (const auto& a : atoms) {
    labels.push_back(r.as<std::string>(r.require(a, "label"), "atoms.label"));
    weights.push_back(r.as<double>(r.require(a, "weight"), "atoms.weight"));
    f.push_back(r.as<double>(r.require(a, "f"), "atoms.f"));
  }
  auto space = located(r, atoms, "atoms", [&] { return FiniteWeightedSpace(labels, weights); });
  const auto gens_node = r.require(fam, "generators");
  if (!gens_node.IsSequence() || gens_node.size() == 0)
    r.fail(gens_node, "generators", "must be a nonempty list of image lists");
  std::vector<std::vector<std::size_t>> gens;
  for (const auto& g : gens_node) {
    if (!g.IsSequence()) r.fail(g, "generators", "each generator is a list of image labels");
    std::vector<std::size_t> img;
    for (const auto& x : g) img.push_back(label_index(r, x, "generators", labels));
    gens.push_back(std::move(img));
  }
  FiniteDiscrete action =
      located(r, gens_node, "generators", [&] { return FiniteDiscrete(space, gens); });
  const std::size_t d = action.dim();

  if (const auto bad = fam["corrupt_action"]) {
    std::map<std::pair<GroupElement, std::size_t>, std::size_t> ov;
    for (const auto& e : bad)
      ov[{group_element(r, r.require(e, "t"), "corrupt_action.t", d),
          label_index(r, r.require(e, "atom"), "corrupt_action.atom", labels)}] =
          label_index(r, r.require(e, "image"), "corrupt_action.image", labels);
    action = FiniteDiscrete::corrupted(action, std::move(ov));
  }

  Cocycle cocycle = TrivialCocycle{};
  if (const auto c = fam["cocycle"]) {
    const auto type = r.as<std::string>(r.require(c, "type"), "cocycle.type");
    if (type == "table") {
      const auto signs_node = r.require(c, "signs");
      std::vector<std::vector<int>> signs;
      for (const auto& row : signs_node) signs.push_back(r.list<int>(row, "cocycle.signs"));
      FiniteCocycle table =
          located(r, signs_node, "cocycle.signs", [&] { return FiniteCocycle(action, signs); });
      if (const auto flips = fam["corrupt_cocycle"]) {
        std::set<std::pair<GroupElement, std::size_t>> fl;
        for (const auto& e : flips)
          fl.insert({group_element(r, r.require(e, "t"), "corrupt_cocycle.t", d),
                     label_index(r, r.require(e, "atom"), "corrupt_cocycle.atom", labels)});
        table = FiniteCocycle::corrupted(table, std::move(fl));
      }
      cocycle = std::move(table);
    } else if (type != "trivial") {
      r.fail(c, "cocycle.type", "must be 'trivial' or 'table'");
    }
  }
  if (const auto m = fam["minimal"]) cfg.expect_minimal = r.as<bool>(m, "minimal");
  return located(r, fam, "family",
                 [&] { return RosinskiTriplet(action, AtomKernel{f}, cocycle, alpha); });
}

inline RosinskiTriplet mma_triplet(const Reader& r, const YAML::Node& fam, double alpha) {
  const auto d = r.get<std::size_t>(fam, "d", 1);
  const auto radius = r.as<std::int64_t>(r.require(fam, "radius"), "radius");
  if (d < 1) r.fail(fam["d"], "d", "must be >= 1");
  if (radius < 0) r.fail(fam["radius"], "radius", "must be >= 0");
  const auto ys = r.require(fam, "Y");
  if (!ys.IsSequence() || ys.size() == 0) r.fail(ys, "Y", "must be a nonempty list");
  std::vector<std::string> labels;
  std::vector<double> weights;
  std::vector<std::vector<double>> rows;
  for (const auto& y : ys) {
    labels.push_back(r.as<std::string>(r.require(y, "label"), "Y.label"));
    weights.push_back(r.as<double>(r.require(y, "weight"), "Y.weight"));
    rows.push_back(r.list<double>(r.require(y, "kernel"), "Y.kernel"));
  }
  auto space = located(r, ys, "Y", [&] { return FiniteWeightedSpace(labels, weights); });
  return located(r, fam, "family", [&] {
    return RosinskiTriplet(MixedMovingAverage{space, d, radius}, MovingAverageKernel{rows},
                           TrivialCocycle{}, alpha);
  });
}

inline markov::TransitionSpec transition_block(const Reader& r, const YAML::Node& b) {
  const auto type = r.as<std::string>(r.require(b, "type"), "blocks.type");
  markov::TransitionSpec spec;
  if (type == "finite") {
    markov::FiniteMatrix m;
    m.states = r.list<std::string>(r.require(b, "states"), "blocks.states");
    for (const auto& row : r.require(b, "P")) m.P.push_back(r.list<double>(row, "blocks.P"));
    spec = std::move(m);
  } else if (type == "birth_death") {
    markov::BirthDeath bd;
    bd.birth = b["birth"] ? r.list<double>(b["birth"], "blocks.birth") : std::vector<double>{};
    bd.death = b["death"] ? r.list<double>(b["death"], "blocks.death") : std::vector<double>{};
    bd.tail_birth = r.as<double>(r.require(b, "tail_birth"), "blocks.tail_birth");
    bd.tail_death = r.as<double>(r.require(b, "tail_death"), "blocks.tail_death");
    spec = std::move(bd);
  } else if (type == "random_walk") {
    spec = markov::SimpleRandomWalk{r.as<double>(r.require(b, "p"), "blocks.p")};
  } else {
    r.fail(b, "blocks.type", "must be 'finite', 'birth_death' or 'random_walk'");
  }
  located(r, b, "blocks", [&] {
    markov::validate(spec);
    return 0;
  });
  return spec;
}

inline RosinskiTriplet markov_triplet(const Reader& r, const YAML::Node& fam, double alpha) {
  const auto blocks_node = r.require(fam, "blocks");
  if (!blocks_node.IsSequence() || blocks_node.size() == 0)
    r.fail(blocks_node, "blocks", "must be a nonempty list");
  std::vector<markov::TransitionSpec> blocks;
  for (const auto& b : blocks_node) blocks.push_back(transition_block(r, b));
  // Anchors are given per class id as a state label (finite) or integer.
  markov::MarkovChain probe(blocks);
  std::map<std::size_t, std::int64_t> anchors;
  if (const auto an = fam["anchors"]) {
    for (const auto& kv : an) {
      const auto id = r.as<std::size_t>(kv.first, "anchors");
      if (id < 1 || id > probe.classes().size()) r.fail(kv.first, "anchors", "unknown class id");
      const auto& cls = probe.cls(id);
      if (const auto* m = std::get_if<markov::FiniteMatrix>(&probe.spec_of(cls))) {
        anchors[id] = static_cast<std::int64_t>(label_index(r, kv.second, "anchors", m->states));
      } else {
        anchors[id] = r.as<std::int64_t>(kv.second, "anchors");
      }
    }
  }
  const auto radius = r.get<std::int64_t>(fam, "truncation_radius", markov::kDefaultTruncationRadius);
  if (radius < 0) r.fail(fam["truncation_radius"], "truncation_radius", "must be >= 0");
  return located(r, fam, "family", [&] {
    return RosinskiTriplet(MarkovShift{markov::MarkovChain(blocks, anchors), radius},
                           MarkovIndicatorKernel{}, TrivialCocycle{}, alpha);
  });
}

inline RosinskiTriplet sub_gaussian_triplet(const Reader& r, const YAML::Node& fam, double alpha) {
  const auto law = r.get<std::string>(fam, "base_law", "gaussian");
  if (law != "gaussian")
    r.fail(fam["base_law"], "base_law", "only the atomless 'gaussian' coordinate law is supported");
  const auto d = r.get<std::size_t>(fam, "d", 1);
  const auto sd = r.get<double>(fam, "gaussian_sd", 1.0);
  return located(r, fam, "family", [&] {
    return RosinskiTriplet(SubGaussianShift{sd, d}, CoordinateKernel{}, TrivialCocycle{}, alpha);
  });
}

}  // namespace detail

inline ExperimentConfig parse_config(const YAML::Node& root, const std::string& source) {
  detail::Reader r(source);
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
  ExperimentConfig cfg;
  cfg.source = source;
  const auto alpha_node = r.require(root, "alpha");
  cfg.alpha = r.as<double>(alpha_node, "alpha");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) r.fail(alpha_node, "alpha", "must lie in (0, 2)");
  cfg.seed = r.as<std::uint64_t>(r.require(root, "seed"), "seed");

  const auto fam = r.require(root, "family");
  cfg.family_type = r.as<std::string>(r.require(fam, "type"), "family.type");
  if (cfg.family_type == "finite_discrete") cfg.triplet = detail::finite_triplet(r, fam, cfg.alpha, cfg);
  else if (cfg.family_type == "mixed_moving_average") cfg.triplet = detail::mma_triplet(r, fam, cfg.alpha);
  else if (cfg.family_type == "markov_shift") cfg.triplet = detail::markov_triplet(r, fam, cfg.alpha);
  else if (cfg.family_type == "sub_gaussian") cfg.triplet = detail::sub_gaussian_triplet(r, fam, cfg.alpha);
  else
    r.fail(fam["type"], "family.type",
           "must be finite_discrete, mixed_moving_average, markov_shift or sub_gaussian");
  const std::size_t d = cfg.triplet->dim();

  const auto sim = root["simulation"];
  if (sim) {
    const auto win = r.require(sim, "window");
    const auto lo = detail::group_element(r, r.require(win, "lower"), "simulation.window.lower", d);
    const auto hi = detail::group_element(r, r.require(win, "upper"), "simulation.window.upper", d);
    cfg.simulation.window =
        detail::located(r, win, "simulation.window", [&] { return LatticeWindow(lo, hi); });
    cfg.simulation.truncation = r.get<std::size_t>(sim, "truncation", 10000);
    cfg.simulation.realizations = r.get<std::size_t>(sim, "realizations", 1);
    if (cfg.simulation.truncation < 1) r.fail(sim["truncation"], "simulation.truncation", "must be >= 1");
    if (cfg.simulation.realizations < 1)
      r.fail(sim["realizations"], "simulation.realizations", "must be >= 1");
  } else {
    cfg.simulation.window = LatticeWindow::cube(d, 100);
  }

  if (const auto dg = root["diagnostics"]) {
    auto& D = cfg.diagnostics;
    if (dg["n_grid"]) D.n_grid = r.list<std::int64_t>(dg["n_grid"], "diagnostics.n_grid");
    D.realizations = r.get<std::size_t>(dg, "realizations", D.realizations);
    D.h = r.get<std::string>(dg, "h", D.h);
    if (const auto th = dg["thresholds"]) {
      D.thresholds.ergodic_below = r.get<double>(th, "ergodic_below", D.thresholds.ergodic_below);
      D.thresholds.non_ergodic_above =
          r.get<double>(th, "non_ergodic_above", D.thresholds.non_ergodic_above);
    }
    if (dg["theta_grid"]) D.theta_grid = r.list<double>(dg["theta_grid"], "diagnostics.theta_grid");
    if (dg["lags"]) D.lags = r.list<std::int64_t>(dg["lags"], "diagnostics.lags");
    D.stationarity_realizations =
        r.get<std::size_t>(dg, "stationarity_realizations", D.stationarity_realizations);
    if (dg["maxima_grid"]) D.maxima_grid = r.list<std::int64_t>(dg["maxima_grid"], "diagnostics.maxima_grid");
    D.maxima_realizations = r.get<std::size_t>(dg, "maxima_realizations", D.maxima_realizations);
    D.truncation = r.get<std::size_t>(dg, "truncation", D.truncation);
    if (D.n_grid.size() < 2 || !std::is_sorted(D.n_grid.begin(), D.n_grid.end()) || D.n_grid.front() < 1)
      r.fail(dg["n_grid"], "diagnostics.n_grid", "needs >= 2 increasing positive values");
    if (D.realizations < 30) r.fail(dg["realizations"], "diagnostics.realizations", "must be >= 30");
    if (D.h != "cos" && D.h != "sign" && D.h != "positive")
      r.fail(dg["h"], "diagnostics.h", "must be cos, sign or positive");
    if (D.truncation < 1) r.fail(dg["truncation"], "diagnostics.truncation", "must be >= 1");
    for (auto s : D.lags)
      if (s < 0) r.fail(dg["lags"], "diagnostics.lags", "must be nonnegative");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError(path + ": cannot open file");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_config(root, path);
}

inline ExperimentConfig parse_config_string(const std::string& text,
                                            const std::string& source = "<string>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_config(root, source);
}

inline RealFunction h_function(const std::string& name) {
  if (name == "cos") return [](double x) { return std::cos(x); };
  if (name == "sign") return [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
  if (name == "positive") return [](double x) { return x > 0 ? 1.0 : 0.0; };
  throw ConfigError("unknown h '" + name + "'");
}

}  // namespace stablefield::cli

#endif  // STABLEFIELD_CLI_CONFIG_HPP
