#ifndef STABLEFIELD_FIELD_SIMULATION_HPP
#define STABLEFIELD_FIELD_SIMULATION_HPP

/**
 * Realizations of the field generated by a Rosinski triplet on a window.
 *
 *   FiniteDiscrete      exact finite integral over the atoms
 *   MixedMovingAverage  exact: only atoms (y, z) with z + t in the kernel
 *                       support can contribute, a finite set per window
 *   MarkovShift         one LePage series per class over truncated paths
 *   SubGaussianShift    exact mixture A^{1/2} G, one A per realization
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "stablefield/actions.hpp"
#include "stablefield/markov.hpp"
#include "stablefield/sas_core.hpp"

namespace stablefield {

struct SimulationOptions {
  std::size_t truncation = 10000;  // LePage J for path-space families
};

/// E|Z|^alpha for Z standard normal.
inline double gaussian_abs_moment(double alpha) {
  return std::pow(2.0, alpha / 2.0) * boost::math::tgamma((alpha + 1.0) / 2.0) /
         std::sqrt(std::numbers::pi);
}

/// Scale of X_0 for the coordinate kernel under i.i.d. N(0, sd^2).
inline double sub_gaussian_scale(const SubGaussianShift& sg, double alpha) {
  return sg.gaussian_sd * std::pow(gaussian_abs_moment(alpha), 1.0 / alpha);
}

namespace detail {

inline FieldRealization simulate_finite(const RosinskiTriplet& tr, const LatticeWindow& window,
                                        RandomStream& rng) {
  const auto& fd = std::get<FiniteDiscrete>(tr.family());
  std::vector<double> f;
  return simulate_discrete_integral(
      [&](const GroupElement& t) -> const std::vector<double>& {
        f = spectral_vector(tr, t);
        return f;
      },
      fd.space(), tr.alpha(), window, rng);
}

inline FieldRealization simulate_mma(const RosinskiTriplet& tr, const LatticeWindow& window,
                                     RandomStream& rng) {
  const auto& mma = std::get<MixedMovingAverage>(tr.family());
  const auto& rows = std::get<MovingAverageKernel>(tr.kernel()).values;
  if (window.dim() != mma.d) throw std::invalid_argument("window dimension differs from d");
  // X_t = sum_{y,z} f(y, z + t) M({(y, z)}); z ranges over -window (+) cube(R).
  const LatticeWindow atoms_z(-window.upper(), -window.lower());
  const LatticeWindow zs = atoms_z.dilate(mma.radius);
  const LatticeWindow cube = mma.support_window();
  const auto cube_points = cube.points();
  const std::size_t nz = zs.size();
  std::vector<double> mass(mma.Y.size() * nz);
  for (std::size_t y = 0; y < mma.Y.size(); ++y)
    for (std::size_t z = 0; z < nz; ++z) mass[y * nz + z] = mma.Y.weight(y);
  std::vector<SparseEntry> entries;
  return simulate_sparse_integral(
      [&](const GroupElement& t) -> const std::vector<SparseEntry>& {
        entries.clear();
        for (std::size_t y = 0; y < rows.size(); ++y)
          for (std::size_t w = 0; w < cube_points.size(); ++w)
            if (rows[y][w] != 0.0)
              entries.push_back({y * nz + zs.index_of(cube_points[w] - t), rows[y][w]});
        return entries;
      },
      mass, tr.alpha(), window, rng);
}

inline FieldRealization simulate_markov(const RosinskiTriplet& tr, const LatticeWindow& window,
                                        const SimulationOptions& opt, RandomStream& rng) {
  const auto& ms = std::get<MarkovShift>(tr.family());
  if (window.dim() != 1) throw std::invalid_argument("Markov fields are indexed by Z");
  const std::int64_t L = std::max(std::abs(window.lower()[0]), std::abs(window.upper()[0]));
  const auto& classes = ms.chain.classes();
  const markov::MarkovFieldKernel kernel(classes, tr.alpha());
  FieldRealization out = make_zero_realization(window, rng, "lepage");
  double total_mass = 0.0, tail = 0.0;
  for (const auto& cls : classes) {
    const auto& spec = ms.chain.spec_of(cls);
    if (markov::classify_recurrence(cls, spec) == markov::RecurrenceType::Transient)
      throw ModelError("transient class " + std::to_string(cls.id));
    const auto pi = markov::invariant_measure(cls, spec);
    markov::PathSampler sampler(cls, spec, pi,
                                markov::truncation_set(cls, spec, pi, ms.truncation_radius));
    RandomStream stream = rng.derive("paths", cls.id);
    LePageConfig cfg{opt.truncation, sampler.truncated_mass()};
    const auto part = simulate_lepage_integral(
        [&](RandomStream& r) { return sampler.sample(-L, L, r); }, kernel, cfg, tr.alpha(),
        window, stream);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += part.values[i];
    total_mass += cfg.total_mass;
    tail = std::max(tail, part.meta.tail_estimate.value_or(0.0));
  }
  out.meta.truncation = opt.truncation;
  out.meta.truncated_mass = total_mass;
  out.meta.tail_estimate = tail;
  return out;
}

inline FieldRealization simulate_sub_gaussian(const RosinskiTriplet& tr,
                                              const LatticeWindow& window, RandomStream& rng) {
  const auto& sg = std::get<SubGaussianShift>(tr.family());
  if (window.dim() != sg.d) throw std::invalid_argument("window dimension differs from d");
  const double sigma = sub_gaussian_scale(sg, tr.alpha());
  FieldRealization out = make_zero_realization(window, rng, "sub-gaussian-mixture");
  // A with Laplace transform exp(-s^{alpha/2}); G_t ~ N(0, 2 sigma^2).
  const double a = sample_positive_stable(tr.alpha() / 2.0, rng);
  const double lead = std::sqrt(a) * std::sqrt(2.0) * sigma;
  for (auto& v : out.values) v = lead * rng.normal();
  return out;
}

}  // namespace detail

inline FieldRealization simulate_field(const RosinskiTriplet& tr, const LatticeWindow& window,
                                       const SimulationOptions& opt, RandomStream& rng) {
  if (window.dim() != tr.dim()) throw std::invalid_argument("window dimension differs from d");
  switch (tr.family().index()) {
    case 0: return detail::simulate_finite(tr, window, rng);
    case 1: return detail::simulate_mma(tr, window, rng);
    case 2: return detail::simulate_markov(tr, window, opt, rng);
    default: return detail::simulate_sub_gaussian(tr, window, rng);
  }
}

/// ||f_0||_alpha^alpha, the alpha-th power of the scale of X_0. For Markov
/// fields this is the untruncated value sum_i 2^{-i}.
inline double marginal_scale_power(const RosinskiTriplet& tr) {
  switch (tr.family().index()) {
    case 0: {
      const auto& fd = std::get<FiniteDiscrete>(tr.family());
      const auto f = spectral_vector(tr, GroupElement::identity(fd.dim()));
      return std::pow(lp_quasi_norm(f, fd.space(), tr.alpha()), tr.alpha());
    }
    case 1: {
      const auto& mma = std::get<MixedMovingAverage>(tr.family());
      double s = 0.0;
      const auto& rows = std::get<MovingAverageKernel>(tr.kernel()).values;
      for (std::size_t y = 0; y < rows.size(); ++y)
        for (double v : rows[y]) s += std::pow(std::abs(v), tr.alpha()) * mma.Y.weight(y);
      return s;
    }
    case 2: {
      const auto& ms = std::get<MarkovShift>(tr.family());
      double s = 0.0;
      for (const auto& c : ms.chain.classes()) s += std::pow(2.0, -static_cast<double>(c.id));
      return s;
    }
    default:
      return std::pow(sub_gaussian_scale(std::get<SubGaussianShift>(tr.family()), tr.alpha()),
                      tr.alpha());
  }
}

}  // namespace stablefield

#endif  // STABLEFIELD_FIELD_SIMULATION_HPP
