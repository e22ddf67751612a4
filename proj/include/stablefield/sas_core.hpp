#ifndef STABLEFIELD_SAS_CORE_HPP
#define STABLEFIELD_SAS_CORE_HPP

/**
 * Symmetric alpha-stable laws and stable stochastic integrals.
 *
 * Covers exact sampling of SaS(sigma) variates (Chambers-Mallows-Stuck),
 * the L^alpha quasi-norm that gives the scale of linear combinations, and
 * three simulators for X_t = int f_t dM:
 *
 *   - exact, on finite weighted spaces (one SaS draw per atom);
 *   - LePage series, on components given only by a probability sampler;
 *   - extremal (max-stable, alpha-Frechet) analogue on finite spaces.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "stablefield/lattice.hpp"
#include "stablefield/random.hpp"

namespace stablefield {

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2), got " + std::to_string(alpha));
}

/// Parameters of SaS(sigma): characteristic function exp(-sigma^a |theta|^a).
class StableParams {
 public:
  StableParams(double alpha, double scale) : alpha_(alpha), scale_(scale) {
    require_alpha(alpha);
    if (!(scale >= 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("scale must be finite and >= 0");
  }

  double alpha() const noexcept { return alpha_; }
  double scale() const noexcept { return scale_; }

  /// exp(-sigma^alpha |theta|^alpha)
  double characteristic_function(double theta) const {
    return std::exp(-std::pow(scale_ * std::abs(theta), alpha_));
  }

 private:
  double alpha_;
  double scale_;
};

/// A finite measure space: distinct atom labels with strictly positive mass.
class FiniteWeightedSpace {
 public:
  FiniteWeightedSpace() = default;
  FiniteWeightedSpace(std::vector<std::string> labels, std::vector<double> weights)
      : labels_(std::move(labels)), weights_(std::move(weights)) {
    if (labels_.size() != weights_.size())
      throw std::invalid_argument("labels and weights differ in length");
    if (labels_.empty()) throw std::invalid_argument("space has no atoms");
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!seen.insert(labels_[i]).second)
        throw std::invalid_argument("duplicate atom label '" + labels_[i] + "'");
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
        throw std::invalid_argument("atom '" + labels_[i] + "' has non-positive mass");
    }
  }

  /// Atoms labelled "0", "1", ... with the given weights.
  static FiniteWeightedSpace indexed(std::vector<double> weights) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < weights.size(); ++i) labels.push_back(std::to_string(i));
    return {std::move(labels), std::move(weights)};
  }

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }

  double total_mass() const {
    double m = 0.0;
    for (double w : weights_) m += w;
    return m;
  }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Variate generation
// ---------------------------------------------------------------------------

/// One SaS(sigma) draw by the Chambers-Mallows-Stuck transform.
inline double sample_sas(const StableParams& params, RandomStream& rng) {
  if (params.scale() == 0.0) return 0.0;
  const double a = params.alpha();
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  double x;
  if (a == 1.0) {
    x = std::tan(v);
  } else {
    x = std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) *
        std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
  }
  return params.scale() * x;
}

/// Standard SaS (sigma = 1).
inline double sample_standard_sas(double alpha, RandomStream& rng) {
  return sample_sas(StableParams(alpha, 1.0), rng);
}

/**
 * Positive stable variate A with Laplace transform E exp(-s A) = exp(-s^a),
 * 0 < a < 1 (Kanter's representation).
 */
inline double sample_positive_stable(double a, RandomStream& rng) {
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("positive stable index must lie in (0, 1)");
  const double u = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  return std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) *
         std::pow(std::sin((1.0 - a) * u) / w, (1.0 - a) / a);
}

/// Standard alpha-Frechet: P(W <= x) = exp(-x^{-alpha}).
inline double sample_frechet(double alpha, RandomStream& rng) {
  require_alpha(alpha);
  return std::pow(rng.exponential(), -1.0 / alpha);
}

// ---------------------------------------------------------------------------
// L^alpha arithmetic
// ---------------------------------------------------------------------------

/// (sum_s |f(s)|^alpha mu(s))^{1/alpha}
inline double lp_quasi_norm(std::span<const double> f, const FiniteWeightedSpace& space,
                            double alpha) {
  require_alpha(alpha);
  if (f.size() != space.size())
    throw std::invalid_argument("function has " + std::to_string(f.size()) +
                                " values but space has " + std::to_string(space.size()) +
                                " atoms");
  double acc = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s)
    if (f[s] != 0.0) acc += std::pow(std::abs(f[s]), alpha) * space.weight(s);
  return std::pow(acc, 1.0 / alpha);
}

struct SpectralTerm {
  double coefficient;
  std::vector<double> values;  // one per atom
};

/// Scale of sum_i c_i X_{t_i}, i.e. ||sum_i c_i f_{t_i}||_alpha.
inline double combination_scale(std::span<const SpectralTerm> terms,
                                const FiniteWeightedSpace& space, double alpha) {
  if (terms.empty()) throw std::invalid_argument("empty linear combination");
  std::vector<double> sum(space.size(), 0.0);
  for (const auto& term : terms) {
    if (term.values.size() != space.size())
      throw std::invalid_argument("spectral function defined on wrong number of atoms");
    for (std::size_t s = 0; s < sum.size(); ++s) sum[s] += term.coefficient * term.values[s];
  }
  return lp_quasi_norm(sum, space, alpha);
}

/**
 * K_alpha = (int_0^inf x^{-alpha} sin x dx)^{-1}, the LePage series constant.
 *
 * The integral is split at pi. On [0, pi] the x^{1-alpha} endpoint behaviour
 * is integrated in closed form and the remainder by tanh-sinh; the tail is
 * a Fourier-sine integral of the smooth function (pi + y)^{-alpha}.
 */
inline double stable_series_constant(double alpha) {
  require_alpha(alpha);
  thread_local double cached_alpha = -1.0;
  thread_local double cached_value = 0.0;
  if (alpha == cached_alpha) return cached_value;
  constexpr double pi = std::numbers::pi;
  boost::math::quadrature::tanh_sinh<double> head_rule;
  const double head =
      head_rule.integrate(
          [alpha](double x) {
            return x == 0.0 ? 0.0 : std::pow(x, 1.0 - alpha) * (std::sin(x) / x - 1.0);
          },
          0.0, pi, 1e-12) +
      std::pow(pi, 2.0 - alpha) / (2.0 - alpha);
  boost::math::quadrature::ooura_fourier_sin<double> tail_rule(1e-12);
  // sin(pi + y) = -sin(y)
  const double tail =
      tail_rule.integrate([alpha](double y) { return std::pow(pi + y, -alpha); }, 1.0).first;
  cached_alpha = alpha;
  cached_value = 1.0 / (head - tail);
  return cached_value;
}

// ---------------------------------------------------------------------------
// Realizations
// ---------------------------------------------------------------------------

struct RealizationMeta {
  std::uint64_t seed = 0;
  std::string stream;
  std::string method;
  std::size_t truncation = 0;  // J for series methods, 0 when exact
  std::optional<double> truncated_mass;
  std::optional<double> tail_estimate;
};

/// One simulated value per point of a finite window of Z^d.
struct FieldRealization {
  LatticeWindow window;
  std::vector<double> values;
  RealizationMeta meta;

  double at(const GroupElement& t) const { return values.at(window.index_of(t)); }
  std::size_t dim() const { return window.dim(); }
};

inline FieldRealization make_zero_realization(const LatticeWindow& window,
                                              const RandomStream& rng, std::string method) {
  FieldRealization r;
  r.window = window;
  r.values.assign(window.size(), 0.0);
  r.meta.seed = rng.seed();
  r.meta.stream = rng.name();
  r.meta.method = std::move(method);
  return r;
}

struct SparseEntry {
  std::size_t atom;
  double value;
};

/**
 * Exact X_t = sum_s f_t(s) mu(s)^{1/alpha} Z_s on a finite space whose
 * spectral functions are given sparsely: spectral(t) yields (atom, f_t(atom))
 * pairs for the nonzero entries. One Z_s per atom is shared across all t.
 */
template <class SparseSpectral>
  requires std::invocable<SparseSpectral&, const GroupElement&>
FieldRealization simulate_sparse_integral(SparseSpectral&& spectral,
                                          std::span<const double> atom_mass, double alpha,
                                          const LatticeWindow& window, RandomStream& rng) {
  require_alpha(alpha);
  FieldRealization out = make_zero_realization(window, rng, "discrete-exact");
  std::vector<double> noise(atom_mass.size());
  for (std::size_t s = 0; s < noise.size(); ++s)
    noise[s] = std::pow(atom_mass[s], 1.0 / alpha) * sample_standard_sas(alpha, rng);
  for (std::size_t i = 0; i < window.size(); ++i) {
    double x = 0.0;
    for (const SparseEntry& e : spectral(window.point_at(i))) x += e.value * noise.at(e.atom);
    out.values[i] = x;
  }
  return out;
}

/// Dense form: spectral(t) returns f_t as one value per atom of `space`.
template <class Spectral>
  requires std::invocable<Spectral&, const GroupElement&>
FieldRealization simulate_discrete_integral(Spectral&& spectral, const FiniteWeightedSpace& space,
                                            double alpha, const LatticeWindow& window,
                                            RandomStream& rng) {
  require_alpha(alpha);
  FieldRealization out = make_zero_realization(window, rng, "discrete-exact");
  std::vector<double> noise(space.size());
  for (std::size_t s = 0; s < noise.size(); ++s)
    noise[s] = std::pow(space.weight(s), 1.0 / alpha) * sample_standard_sas(alpha, rng);
  for (std::size_t i = 0; i < window.size(); ++i) {
    const auto& f = spectral(window.point_at(i));
    if (f.size() != space.size())
      throw std::invalid_argument("spectral function has wrong number of atoms");
    double x = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) x += f[s] * noise[s];
    out.values[i] = x;
  }
  return out;
}

struct LePageConfig {
  std::size_t truncation = 10000;  // J
  double total_mass = 1.0;         // m

  void validate() const {
    if (truncation < 1) throw std::invalid_argument("LePage truncation J must be >= 1");
    if (!(total_mass > 0.0) || !std::isfinite(total_mass))
      throw std::invalid_argument("LePage total mass must be finite and positive");
  }
};

/**
 * Evaluators may optionally add a whole point's contribution over the window
 * at once (weight * f_t(v) for every t). Markov paths use this to touch only
 * the times at which the path visits its anchor.
 */
template <class E, class Point>
concept WindowAccumulator =
    requires(const E& e, const Point& v, double w, const LatticeWindow& win,
             std::span<double> out) { e.accumulate(v, w, win, out); };

/**
 * LePage series realization of X_t = int f_t dM on a component of mass m:
 *
 *   X_t ~ K_alpha^{1/alpha} m^{1/alpha} sum_{j<=J} eps_j Gamma_j^{-1/alpha} f_t(V_j)
 *
 * with Gamma_j unit-rate Poisson arrivals, eps_j Rademacher signs and V_j
 * drawn from the normalised component measure by `sample_point`.
 */
template <class Sampler, class Evaluator>
FieldRealization simulate_lepage_integral(Sampler&& sample_point, const Evaluator& f,
                                          const LePageConfig& cfg, double alpha,
                                          const LatticeWindow& window, RandomStream& rng) {
  require_alpha(alpha);
  cfg.validate();
  using Point = std::decay_t<decltype(sample_point(rng))>;
  FieldRealization out = make_zero_realization(window, rng, "lepage");
  const double lead =
      std::pow(stable_series_constant(alpha) * cfg.total_mass, 1.0 / alpha);
  double gamma = 0.0;
  std::vector<GroupElement> points;
  if constexpr (!WindowAccumulator<Evaluator, Point>) points = window.points();
  for (std::size_t j = 0; j < cfg.truncation; ++j) {
    gamma += rng.exponential();
    const double w = lead * rng.rademacher() * std::pow(gamma, -1.0 / alpha);
    const Point v = sample_point(rng);
    if constexpr (WindowAccumulator<Evaluator, Point>) {
      f.accumulate(v, w, window, std::span<double>(out.values));
    } else {
      for (std::size_t i = 0; i < points.size(); ++i) out.values[i] += w * f(points[i], v);
    }
  }
  out.meta.truncation = cfg.truncation;
  out.meta.truncated_mass = cfg.total_mass;
  out.meta.tail_estimate = std::pow(cfg.total_mass, 1.0 / alpha) * std::pow(gamma, -1.0 / alpha);
  return out;
}

/**
 * Extremal integral X_t = max_s f_t(s) mu(s)^{1/alpha} W_s with W_s i.i.d.
 * standard alpha-Frechet. The marginal of X_t is alpha-Frechet with scale
 * (sum_s f_t(s)^alpha mu(s))^{1/alpha}.
 */
template <class Spectral>
  requires std::invocable<Spectral&, const GroupElement&>
FieldRealization simulate_frechet_extremal(Spectral&& spectral, const FiniteWeightedSpace& space,
                                           double alpha, const LatticeWindow& window,
                                           RandomStream& rng) {
  require_alpha(alpha);
  FieldRealization out = make_zero_realization(window, rng, "frechet-extremal");
  std::vector<double> noise(space.size());
  for (std::size_t s = 0; s < noise.size(); ++s)
    noise[s] = std::pow(space.weight(s), 1.0 / alpha) * sample_frechet(alpha, rng);
  for (std::size_t i = 0; i < window.size(); ++i) {
    const auto& f = spectral(window.point_at(i));
    if (f.size() != space.size())
      throw std::invalid_argument("spectral function has wrong number of atoms");
    double x = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) {
      if (f[s] < 0.0)
        throw std::invalid_argument("extremal integrand must be nonnegative");
      x = std::max(x, f[s] * noise[s]);
    }
    out.values[i] = x;
  }
  return out;
}

}  // namespace stablefield

#endif  // STABLEFIELD_SAS_CORE_HPP
