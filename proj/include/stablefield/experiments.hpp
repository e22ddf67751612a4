#ifndef STABLEFIELD_EXPERIMENTS_HPP
#define STABLEFIELD_EXPERIMENTS_HPP

/// Diagnostics driven directly by a triplet, with realization k drawn from
/// the stream "realization/k" of the given seed.

#include <cstdint>
#include <vector>

#include "stablefield/diagnostics.hpp"
#include "stablefield/field_simulation.hpp"

namespace stablefield {

inline auto realization_source(const RosinskiTriplet& tr, LatticeWindow window,
                               SimulationOptions opt, std::uint64_t seed) {
  return [&tr, window = std::move(window), opt, seed](std::size_t k) {
    RandomStream rng = RandomStream(seed).derive("realization", k);
    return simulate_field(tr, window, opt, rng);
  };
}

inline DispersionResult dispersion_experiment(const RosinskiTriplet& tr, const RealFunction& h,
                                              const std::vector<std::int64_t>& n_grid,
                                              std::size_t R, std::uint64_t seed,
                                              const SimulationOptions& opt = {},
                                              const DispersionThresholds& th = {},
                                              std::size_t threads = 1) {
  const auto window = LatticeWindow::cube(tr.dim(), n_grid.back());
  return dispersion_experiment(realization_source(tr, window, opt, seed), h, n_grid, R, th,
                               threads);
}

inline std::vector<LagReport> stationarity_test(const RosinskiTriplet& tr,
                                                const std::vector<std::int64_t>& lags,
                                                std::size_t R, std::uint64_t seed,
                                                const SimulationOptions& opt = {},
                                                std::size_t threads = 1) {
  std::int64_t hi = 1;
  for (auto s : lags) hi = std::max(hi, s + 1);
  GroupElement lo = GroupElement::identity(tr.dim()), up = GroupElement::identity(tr.dim());
  up[0] = hi;
  return stationarity_test(realization_source(tr, LatticeWindow(lo, up), opt, seed), lags, R,
                           threads);
}

inline GrowthFit maxima_growth(const RosinskiTriplet& tr, const std::vector<std::int64_t>& n_grid,
                               std::size_t R, std::uint64_t seed,
                               const SimulationOptions& opt = {}, std::size_t threads = 1) {
  const auto window = LatticeWindow::cube(tr.dim(), n_grid.back());
  return maxima_growth(realization_source(tr, window, opt, seed), n_grid, R, threads);
}

}  // namespace stablefield

#endif  // STABLEFIELD_EXPERIMENTS_HPP
