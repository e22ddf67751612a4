#ifndef STABLEFIELD_DIAGNOSTICS_HPP
#define STABLEFIELD_DIAGNOSTICS_HPP

/**
 * Monte Carlo checks on simulated fields: ergodic averages and their
 * dispersion across realizations, empirical characteristic functions,
 * scale fits, stationarity tests and growth of partial maxima.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "stablefield/errors.hpp"
#include "stablefield/lattice.hpp"
#include "stablefield/parallel.hpp"
#include "stablefield/sas_core.hpp"

namespace stablefield {

using RealFunction = std::function<double(double)>;

inline double sample_mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation with the n - 1 denominator.
inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// ---------------------------------------------------------------------------
// Ergodic averages
// ---------------------------------------------------------------------------

struct ErgodicAverageTrace {
  std::vector<std::int64_t> n_grid;
  std::vector<double> values;  // theta_hat_n, one per n
  std::string h;
};

/// theta_hat_n = (2n+1)^{-d} sum_{||t|| <= n} h(X_t) for each n in the grid.
inline ErgodicAverageTrace ergodic_average(const FieldRealization& x, const RealFunction& h,
                                           std::vector<std::int64_t> n_grid,
                                           std::string h_name = "h") {
  if (n_grid.empty()) throw std::invalid_argument("empty n grid");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() < 0)
    throw std::invalid_argument("n grid must be nonnegative and increasing");
  const std::int64_t n_max = n_grid.back();
  const std::size_t d = x.dim();
  if (!x.window.contains(LatticeWindow::cube(d, n_max)))
    throw std::invalid_argument("window does not contain the cube of radius " +
                                std::to_string(n_max));
  // Sum h over each sup-norm shell, then accumulate.
  std::vector<double> shell(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const auto t = x.window.point_at(i);
    const auto r = t.sup_norm();
    if (r <= n_max) shell[static_cast<std::size_t>(r)] += h(x.values[i]);
  }
  ErgodicAverageTrace out{std::move(n_grid), {}, std::move(h_name)};
  double acc = 0.0;
  std::int64_t r = 0;
  for (auto n : out.n_grid) {
    for (; r <= n; ++r) acc += shell[static_cast<std::size_t>(r)];
    out.values.push_back(acc / std::pow(2.0 * static_cast<double>(n) + 1.0, static_cast<double>(d)));
  }
  return out;
}

enum class DispersionVerdict { EmpiricallyErgodic, EmpiricallyNonErgodic, Inconclusive };

inline const char* to_string(DispersionVerdict v) {
  switch (v) {
    case DispersionVerdict::EmpiricallyErgodic: return "EmpiricallyErgodic";
    case DispersionVerdict::EmpiricallyNonErgodic: return "EmpiricallyNonErgodic";
    case DispersionVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct DispersionThresholds {
  double ergodic_below = 0.35;
  double non_ergodic_above = 0.7;
};

struct DispersionResult {
  DispersionVerdict verdict = DispersionVerdict::Inconclusive;
  double rho = 0.0;
  DispersionThresholds thresholds;
  std::vector<std::int64_t> n_grid;
  std::vector<double> mean;  // per n, over realizations
  std::vector<double> sd;    // per n, over realizations
  std::vector<ErgodicAverageTrace> traces;
};

inline DispersionVerdict dispersion_verdict(double rho, const DispersionThresholds& th) {
  if (rho < th.ergodic_below) return DispersionVerdict::EmpiricallyErgodic;
  if (rho > th.non_ergodic_above) return DispersionVerdict::EmpiricallyNonErgodic;
  return DispersionVerdict::Inconclusive;
}

/**
 * R realizations from simulate(k), k = 0..R-1, each reduced to its trace.
 * rho = sd(theta_hat at n_max) / sd(theta_hat at n_min); a field with zero
 * spread at n_min counts as ergodic.
 */
template <std::invocable<std::size_t> Simulate>
DispersionResult dispersion_experiment(Simulate&& simulate, const RealFunction& h,
                                       const std::vector<std::int64_t>& n_grid, std::size_t R,
                                       const DispersionThresholds& th = {},
                                       std::size_t threads = 1) {
  if (R < 30) throw std::invalid_argument("dispersion experiment needs R >= 30");
  if (n_grid.size() < 2) throw std::invalid_argument("n grid needs at least two values");
  DispersionResult out;
  out.thresholds = th;
  out.n_grid = n_grid;
  out.traces.resize(R);
  parallel_for(R, threads, [&](std::size_t k) {
    out.traces[k] = ergodic_average(simulate(k), h, n_grid);
  });
  for (std::size_t j = 0; j < n_grid.size(); ++j) {
    std::vector<double> col;
    for (const auto& tr : out.traces) col.push_back(tr.values[j]);
    out.mean.push_back(sample_mean(col));
    out.sd.push_back(sample_sd(col));
  }
  const double lo = out.sd.front(), hi = out.sd.back();
  out.rho = lo > 0.0 ? hi / lo : 0.0;
  out.verdict = dispersion_verdict(out.rho, th);
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic functions and scale
// ---------------------------------------------------------------------------

struct CfEstimate {
  double theta = 0.0;
  std::complex<double> value;
  double se_re = 0.0;  // jackknife standard errors
  double se_im = 0.0;
};

/// Mean of exp(i theta x) with jackknife standard errors. For a sample mean
/// the leave-one-out jackknife reduces to sd / sqrt(n).
inline std::vector<CfEstimate> empirical_cf(const std::vector<double>& samples,
                                            const std::vector<double>& theta_grid) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  const auto n = static_cast<double>(samples.size());
  std::vector<CfEstimate> out;
  for (double th : theta_grid) {
    double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
    for (double x : samples) {
      const double c = std::cos(th * x), s = std::sin(th * x);
      sc += c, ss += s, sc2 += c * c, ss2 += s * s;
    }
    CfEstimate e;
    e.theta = th;
    e.value = {sc / n, ss / n};
    if (samples.size() > 1) {
      const double vc = std::max(0.0, (sc2 - sc * sc / n) / (n - 1.0));
      const double vs = std::max(0.0, (ss2 - ss * ss / n) / (n - 1.0));
      e.se_re = std::sqrt(vc / n);
      e.se_im = std::sqrt(vs / n);
    }
    out.push_back(e);
  }
  return out;
}

struct ScaleFit {
  double sigma = 0.0;
  std::vector<double> theta;    // points used in the fit
  std::vector<double> neg_log;  // -log|phi_hat| at those points
};

/**
 * Fit -log|phi_hat(theta)| = sigma^alpha theta^alpha through the origin
 * over theta with |phi_hat| in [0.1, 0.9]. The theta grid is geometric in
 * units of the sample median of |x|, which makes the fit scale-equivariant.
 */
inline ScaleFit scale_fit_detail(const std::vector<double>& samples, double alpha) {
  require_alpha(alpha);
  if (samples.size() < 1000) throw std::invalid_argument("scale fit needs at least 1000 samples");
  std::vector<double> absx(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) absx[i] = std::abs(samples[i]);
  auto mid = absx.begin() + static_cast<std::ptrdiff_t>(absx.size() / 2);
  std::nth_element(absx.begin(), mid, absx.end());
  const double s0 = *mid;
  if (!(s0 > 0.0) || !std::isfinite(s0))
    throw FitUnstable("samples are (mostly) zero; |phi_hat| is 1 everywhere");
  constexpr int kPoints = 60;
  std::vector<double> grid;
  for (int i = 0; i < kPoints; ++i)
    grid.push_back(std::pow(10.0, -2.0 + 4.0 * i / (kPoints - 1)) / s0);
  ScaleFit fit;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& e : empirical_cf(samples, grid)) {
    const double m = std::abs(e.value);
    if (m < 0.1 || m > 0.9) continue;
    const double x = std::pow(e.theta, alpha), y = -std::log(m);
    sxy += x * y;
    sxx += x * x;
    fit.theta.push_back(e.theta);
    fit.neg_log.push_back(y);
  }
  if (fit.theta.empty()) throw FitUnstable("no theta with |phi_hat| in [0.1, 0.9]");
  fit.sigma = std::pow(sxy / sxx, 1.0 / alpha);
  return fit;
}

inline double scale_fit(const std::vector<double>& samples, double alpha) {
  return scale_fit_detail(samples, alpha).sigma;
}

// ---------------------------------------------------------------------------
// Stationarity
// ---------------------------------------------------------------------------

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty KS sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// p-value of the two-sample statistic d with the usual small-sample
/// correction lambda = (e + 0.12 + 0.11 / e) d, e = sqrt(n m / (n + m)).
inline double ks_pvalue(double d, std::size_t n, std::size_t m) {
  const double e = std::sqrt(static_cast<double>(n) * static_cast<double>(m) /
                             static_cast<double>(n + m));
  return kolmogorov_q((e + 0.12 + 0.11 / e) * d);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  const double d = ks_statistic(a, b);
  return {d, ks_pvalue(d, a.size(), b.size())};
}

struct LagReport {
  std::int64_t lag = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  double joint_cf_distance = 0.0;  // max over the theta grid
};

/**
 * For each lag s (along the first axis) compare X_0 against X_s over R
 * realizations by two-sample KS, and the joint CF of (X_0, X_1) against
 * (X_s, X_{s+1}). `simulate(k)` must return realizations whose window
 * contains 0 .. max lag + 1 on the first axis.
 */
template <std::invocable<std::size_t> Simulate>
std::vector<LagReport> stationarity_test(Simulate&& simulate, const std::vector<std::int64_t>& lags,
                                         std::size_t R, std::size_t threads = 1) {
  if (R < 2) throw std::invalid_argument("stationarity test needs R >= 2");
  std::vector<FieldRealization> runs(R);
  parallel_for(R, threads, [&](std::size_t k) { runs[k] = simulate(k); });
  const std::size_t d = runs.front().dim();
  auto point = [&](std::int64_t s) {
    GroupElement t = GroupElement::identity(d);
    t[0] = s;
    return t;
  };
  std::vector<double> x0(R), x1(R);
  for (std::size_t k = 0; k < R; ++k) {
    x0[k] = runs[k].at(point(0));
    x1[k] = runs[k].at(point(1));
  }
  const std::vector<std::pair<double, double>> thetas{{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5},
                                                      {0.5, -0.5}, {1.0, 1.0}, {1.0, -1.0}};
  auto joint_cf = [&](const std::vector<double>& a, const std::vector<double>& b,
                      std::pair<double, double> th) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      acc += std::polar(1.0, th.first * a[k] + th.second * b[k]);
    return acc / static_cast<double>(a.size());
  };
  std::vector<LagReport> out;
  for (auto s : lags) {
    if (s < 0) throw std::invalid_argument("lags must be nonnegative");
    std::vector<double> xs(R), xs1(R);
    for (std::size_t k = 0; k < R; ++k) {
      xs[k] = runs[k].at(point(s));
      xs1[k] = runs[k].at(point(s + 1));
    }
    LagReport rep;
    rep.lag = s;
    if (s == 0) {
      rep.ks_statistic = 0.0;
      rep.ks_p_value = 1.0;
    } else {
      const auto ks = ks_two_sample(x0, xs);
      rep.ks_statistic = ks.statistic;
      rep.ks_p_value = ks.p_value;
    }
    for (const auto& th : thetas)
      rep.joint_cf_distance =
          std::max(rep.joint_cf_distance, std::abs(joint_cf(x0, x1, th) - joint_cf(xs, xs1, th)));
    out.push_back(rep);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Maxima growth
// ---------------------------------------------------------------------------

struct GrowthFit {
  double exponent = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<std::int64_t> n_grid;
  std::vector<double> median_max;
};

/**
 * Regress log median M_n on log n, M_n = max_{||t|| <= n} |X_t|, with a 95%
 * t-interval for the slope.
 */
template <std::invocable<std::size_t> Simulate>
GrowthFit maxima_growth(Simulate&& simulate, const std::vector<std::int64_t>& n_grid,
                        std::size_t R, std::size_t threads = 1) {
  if (n_grid.size() < 3) throw std::invalid_argument("need at least three n values");
  if (!(n_grid.front() >= 1 && n_grid.back() >= 10 * n_grid.front()))
    throw std::invalid_argument("n grid must span at least one decade");
  if (R < 1) throw std::invalid_argument("need at least one realization");
  std::vector<std::vector<double>> maxima(R);
  parallel_for(R, threads, [&](std::size_t k) {
    const auto x = simulate(k);
    std::vector<double> shell(static_cast<std::size_t>(n_grid.back()) + 1, 0.0);
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      const auto r = x.window.point_at(i).sup_norm();
      if (r <= n_grid.back())
        shell[static_cast<std::size_t>(r)] =
            std::max(shell[static_cast<std::size_t>(r)], std::abs(x.values[i]));
    }
    std::vector<double> m;
    double acc = 0.0;
    std::int64_t r = 0;
    for (auto n : n_grid) {
      for (; r <= n; ++r) acc = std::max(acc, shell[static_cast<std::size_t>(r)]);
      m.push_back(acc);
    }
    maxima[k] = std::move(m);
  });
  GrowthFit fit;
  fit.n_grid = n_grid;
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < n_grid.size(); ++j) {
    std::vector<double> col;
    for (const auto& m : maxima) col.push_back(m[j]);
    auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
    std::nth_element(col.begin(), mid, col.end());
    fit.median_max.push_back(*mid);
    if (!(*mid > 0.0)) throw DegenerateField("median maximum is zero");
    lx.push_back(std::log(static_cast<double>(n_grid[j])));
    ly.push_back(std::log(*mid));
  }
  const double mx = sample_mean(lx), my = sample_mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    sxx += (lx[j] - mx) * (lx[j] - mx);
    sxy += (lx[j] - mx) * (ly[j] - my);
  }
  fit.exponent = sxy / sxx;
  double rss = 0.0;
  for (std::size_t j = 0; j < lx.size(); ++j) {
    const double r = ly[j] - my - fit.exponent * (lx[j] - mx);
    rss += r * r;
  }
  const auto dof = static_cast<double>(lx.size() - 2);
  const double se = std::sqrt(rss / dof / sxx);
  const double q = boost::math::quantile(boost::math::students_t(dof), 0.975);
  fit.ci_low = fit.exponent - q * se;
  fit.ci_high = fit.exponent + q * se;
  return fit;
}

}  // namespace stablefield

#endif  // STABLEFIELD_DIAGNOSTICS_HPP
