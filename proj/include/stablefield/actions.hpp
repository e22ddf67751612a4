#ifndef STABLEFIELD_ACTIONS_HPP
#define STABLEFIELD_ACTIONS_HPP

/**
 * Nonsingular Z^d-actions, +-1 cocycles and Rosinski triplets.
 *
 * Four families are representable:
 *   FiniteDiscrete      commuting permutations of a finite weighted space
 *   MixedMovingAverage  translation of the lattice coordinate on Y x Z^d
 *   MarkovShift         left shift of two-sided Markov paths (d = 1)
 *   SubGaussianShift    coordinate shift on R^{Z^d} under an i.i.d. Gaussian law
 *
 * Group law is written additively; phi_{u+v} = phi_v o phi_u.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stablefield/errors.hpp"
#include "stablefield/lattice.hpp"
#include "stablefield/markov.hpp"
#include "stablefield/sas_core.hpp"

namespace stablefield {

inline constexpr double kRelativeTolerance = 1e-12;

inline bool nearly_equal(double a, double b, double rel = kRelativeTolerance) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

inline std::int64_t floor_div(std::int64_t n, std::int64_t m) {
  std::int64_t q = n / m;
  if ((n % m != 0) && ((n < 0) != (m < 0))) --q;
  return q;
}

inline std::size_t permutation_order(const std::vector<std::size_t>& p) {
  std::size_t order = 1;
  std::vector<bool> seen(p.size(), false);
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    for (std::size_t x = s; !seen[x]; x = p[x]) seen[x] = true, ++len;
    order = std::lcm(order, len);
  }
  return order;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/**
 * A Z^d-action on a finite weighted space given by one permutation per
 * basis vector. The generators must commute; phi_t is then the product of
 * generator powers. Weights may differ along orbits, so the action need not
 * preserve mu.
 */
class FiniteDiscrete {
 public:
  FiniteDiscrete() = default;

  FiniteDiscrete(FiniteWeightedSpace space, std::vector<std::vector<std::size_t>> generators)
      : space_(std::move(space)), generators_(std::move(generators)) {
    build();
    for (std::size_t j = 0; j < generators_.size(); ++j)
      for (std::size_t k = j + 1; k < generators_.size(); ++k)
        for (std::size_t s = 0; s < space_.size(); ++s)
          if (generators_[j][generators_[k][s]] != generators_[k][generators_[j][s]])
            throw ModelError("generators " + std::to_string(j) + " and " + std::to_string(k) +
                             " do not commute at atom '" + space_.labels()[s] + "'");
  }

  /// Test fixture: a valid action whose table is overwritten at the listed
  /// (t, atom) entries. No consistency checks are applied to the overrides.
  static FiniteDiscrete corrupted(FiniteDiscrete base,
                                  std::map<std::pair<GroupElement, std::size_t>, std::size_t>
                                      overrides) {
    base.overrides_ = std::move(overrides);
    return base;
  }

  const FiniteWeightedSpace& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return generators_.size(); }
  const std::vector<std::vector<std::size_t>>& generators() const noexcept { return generators_; }
  std::size_t order(std::size_t k) const { return orders_.at(k); }

  /// Translating any coordinate by 2 * order(k) leaves both the action and
  /// every generator-built cocycle unchanged.
  std::vector<std::int64_t> period_box() const {
    std::vector<std::int64_t> out;
    for (auto o : orders_) out.push_back(2 * static_cast<std::int64_t>(o));
    return out;
  }

  /// phi_{n e_k}(s).
  std::size_t apply_axis(std::size_t k, std::int64_t n, std::size_t s) const {
    const auto ord = static_cast<std::int64_t>(orders_[k]);
    const std::int64_t r = n - detail::floor_div(n, ord) * ord;
    return powers_[k][static_cast<std::size_t>(r)][s];
  }

  std::size_t apply(const GroupElement& t, std::size_t s) const {
    check(t, s);
    if (!overrides_.empty()) {
      auto it = overrides_.find({t, s});
      if (it != overrides_.end()) return it->second;
    }
    for (std::size_t k = 0; k < dim(); ++k) s = apply_axis(k, t[k], s);
    return s;
  }

  /// Orbits of the action as sorted atom lists, ordered by smallest atom.
  std::vector<std::vector<std::size_t>> orbits() const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(space_.size(), false);
    for (std::size_t s = 0; s < space_.size(); ++s) {
      if (seen[s]) continue;
      std::vector<std::size_t> orbit{s}, queue{s};
      seen[s] = true;
      while (!queue.empty()) {
        const auto x = queue.back();
        queue.pop_back();
        for (const auto& g : generators_) {
          if (!seen[g[x]]) {
            seen[g[x]] = true;
            orbit.push_back(g[x]);
            queue.push_back(g[x]);
          }
        }
      }
      std::sort(orbit.begin(), orbit.end());
      out.push_back(std::move(orbit));
    }
    return out;
  }

 private:
  void build() {
    if (generators_.empty()) throw std::invalid_argument("finite action needs d >= 1 generators");
    const std::size_t n = space_.size();
    for (std::size_t k = 0; k < generators_.size(); ++k) {
      const auto& g = generators_[k];
      if (g.size() != n)
        throw std::invalid_argument("generator " + std::to_string(k) + " has wrong length");
      std::vector<bool> hit(n, false);
      for (auto x : g) {
        if (x >= n || hit[x])
          throw std::invalid_argument("generator " + std::to_string(k) + " is not a bijection");
        hit[x] = true;
      }
      const std::size_t ord = detail::permutation_order(g);
      orders_.push_back(ord);
      std::vector<std::vector<std::size_t>> pw(ord);
      pw[0].resize(n);
      std::iota(pw[0].begin(), pw[0].end(), std::size_t{0});
      for (std::size_t r = 1; r < ord; ++r) {
        pw[r].resize(n);
        for (std::size_t s = 0; s < n; ++s) pw[r][s] = g[pw[r - 1][s]];
      }
      powers_.push_back(std::move(pw));
    }
  }

  void check(const GroupElement& t, std::size_t s) const {
    if (t.dim() != dim()) throw std::invalid_argument("group element has wrong dimension");
    if (s >= space_.size()) throw DomainError("atom index out of range");
  }

  FiniteWeightedSpace space_;
  std::vector<std::vector<std::size_t>> generators_;
  std::vector<std::size_t> orders_;
  std::vector<std::vector<std::vector<std::size_t>>> powers_;  // [k][r][s] = g_k^r(s)
  std::map<std::pair<GroupElement, std::size_t>, std::size_t> overrides_;
};

/// S = Y x Z^d with mu = nu (x) counting; kernels vanish outside ||z|| <= R.
struct MixedMovingAverage {
  FiniteWeightedSpace Y;
  std::size_t d = 1;
  std::int64_t radius = 0;

  LatticeWindow support_window() const { return LatticeWindow::cube(d, radius); }
};

struct MarkovShift {
  markov::MarkovChain chain;
  std::int64_t truncation_radius = markov::kDefaultTruncationRadius;
};

/// Shift on R^{Z^d} with i.i.d. N(0, sd^2) coordinates.
struct SubGaussianShift {
  double gaussian_sd = 1.0;
  std::size_t d = 1;
};

using ActionFamily = std::variant<FiniteDiscrete, MixedMovingAverage, MarkovShift, SubGaussianShift>;

inline std::size_t family_dim(const ActionFamily& fam) {
  return std::visit(
      [](const auto& f) -> std::size_t {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) return f.dim();
        else if constexpr (std::is_same_v<T, MarkovShift>) return 1;
        else return f.d;
      },
      fam);
}

inline const char* family_name(const ActionFamily& fam) {
  switch (fam.index()) {
    case 0: return "finite_discrete";
    case 1: return "mixed_moving_average";
    case 2: return "markov_shift";
    default: return "sub_gaussian";
  }
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

struct MmaPoint {
  std::size_t y = 0;
  GroupElement z;
  friend bool operator==(const MmaPoint&, const MmaPoint&) = default;
};

/// Finitely many coordinates x(u), u in `window`, of a point of R^{Z^d}.
struct CoordinatePatch {
  LatticeWindow window;
  std::vector<double> values;

  double at(const GroupElement& u) const {
    if (!window.contains(u)) throw DomainError("coordinate " + u.to_string() + " not recorded");
    return values[window.index_of(u)];
  }
  friend bool operator==(const CoordinatePatch&, const CoordinatePatch&) = default;
};

using Point = std::variant<std::size_t, MmaPoint, markov::PathSegment, CoordinatePatch>;

/// phi_t applied to a point of the family's space.
inline Point apply_action(const ActionFamily& fam, const GroupElement& t, const Point& point) {
  if (t.dim() != family_dim(fam)) throw std::invalid_argument("group element has wrong dimension");
  switch (fam.index()) {
    case 0: {
      const auto* s = std::get_if<std::size_t>(&point);
      if (!s) throw std::invalid_argument("finite action expects an atom index");
      return std::get<FiniteDiscrete>(fam).apply(t, *s);
    }
    case 1: {
      const auto* p = std::get_if<MmaPoint>(&point);
      if (!p) throw std::invalid_argument("moving-average action expects (y, z)");
      if (p->y >= std::get<MixedMovingAverage>(fam).Y.size()) throw DomainError("unknown atom y");
      return MmaPoint{p->y, p->z + t};
    }
    case 2: {
      const auto* x = std::get_if<markov::PathSegment>(&point);
      if (!x) throw std::invalid_argument("Markov shift expects a path segment");
      // phi_t(x)(u) = x(u + t): the recorded window moves by -t.
      markov::PathSegment y = *x;
      y.lower -= t[0];
      if (!y.covers(0))
        throw DomainError("shifted path segment no longer records coordinate 0");
      return y;
    }
    default: {
      const auto* x = std::get_if<CoordinatePatch>(&point);
      if (!x) throw std::invalid_argument("coordinate shift expects a coordinate patch");
      CoordinatePatch y{LatticeWindow(x->window.lower() - t, x->window.upper() - t), x->values};
      if (!y.window.contains(GroupElement::identity(y.window.dim())))
        throw DomainError("shifted coordinate patch no longer records coordinate 0");
      return y;
    }
  }
}

/// d(mu o phi_t)/d mu at the point.
inline double rn_derivative(const ActionFamily& fam, const GroupElement& t, const Point& point) {
  if (const auto* fd = std::get_if<FiniteDiscrete>(&fam)) {
    const auto s = std::get<std::size_t>(apply_action(fam, t, point));
    const auto s0 = std::get<std::size_t>(point);
    return fd->space().weight(s) / fd->space().weight(s0);
  }
  (void)apply_action(fam, t, point);  // domain check
  return 1.0;
}

// ---------------------------------------------------------------------------
// Cocycles
// ---------------------------------------------------------------------------

struct TrivialCocycle {};

/**
 * A +-1 cocycle for a FiniteDiscrete action, generated from one sign table
 * per basis vector. Along axis k,
 *   c_{n e_k}(s) = prod_{j<n} g_k(phi_{j e_k} s),
 * and c_t for general t follows from the cocycle identity. The generator
 * tables must satisfy g_j(s) g_k(phi_j s) = g_k(s) g_j(phi_k s).
 */
class FiniteCocycle {
 public:
  FiniteCocycle() = default;

  FiniteCocycle(const FiniteDiscrete& action, std::vector<std::vector<int>> generator_signs)
      : signs_(std::move(generator_signs)) {
    const std::size_t n = action.space().size();
    if (signs_.size() != action.dim())
      throw std::invalid_argument("need one cocycle sign table per generator");
    for (const auto& row : signs_) {
      if (row.size() != n) throw std::invalid_argument("cocycle sign table has wrong length");
      for (int c : row)
        if (c != 1 && c != -1) throw std::invalid_argument("cocycle values must be +1 or -1");
    }
    const auto& g = action.generators();
    for (std::size_t j = 0; j < signs_.size(); ++j)
      for (std::size_t k = j + 1; k < signs_.size(); ++k)
        for (std::size_t s = 0; s < n; ++s)
          if (signs_[j][s] * signs_[k][g[j][s]] != signs_[k][s] * signs_[j][g[k][s]])
            throw ModelError("cocycle generators " + std::to_string(j) + " and " +
                             std::to_string(k) + " are inconsistent at atom '" +
                             action.space().labels()[s] + "'");
    // prefix[k][r][s] = c_{r e_k}(s), r = 0..ord_k
    for (std::size_t k = 0; k < signs_.size(); ++k) {
      const std::size_t ord = action.order(k);
      std::vector<std::vector<int>> pre(ord + 1, std::vector<int>(n, 1));
      for (std::size_t r = 1; r <= ord; ++r)
        for (std::size_t s = 0; s < n; ++s)
          pre[r][s] = pre[r - 1][s] *
                      signs_[k][action.apply_axis(k, static_cast<std::int64_t>(r - 1), s)];
      prefix_.push_back(std::move(pre));
      orders_.push_back(ord);
    }
  }

  /// c_{e_k}(s) = b(s) b(phi_{e_k} s) chi_k: always consistent.
  static FiniteCocycle from_coboundary(const FiniteDiscrete& action, const std::vector<int>& b,
                                       const std::vector<int>& characters) {
    if (b.size() != action.space().size() || characters.size() != action.dim())
      throw std::invalid_argument("coboundary data has wrong size");
    std::vector<std::vector<int>> signs(action.dim());
    for (std::size_t k = 0; k < action.dim(); ++k)
      for (std::size_t s = 0; s < b.size(); ++s)
        signs[k].push_back(b[s] * b[action.generators()[k][s]] * characters[k]);
    return {action, std::move(signs)};
  }

  /// Test fixture: entries (t, s) whose sign is flipped after evaluation.
  static FiniteCocycle corrupted(FiniteCocycle base, std::set<std::pair<GroupElement, std::size_t>>
                                                         flips) {
    base.flips_ = std::move(flips);
    return base;
  }

  const std::vector<std::vector<int>>& generator_signs() const noexcept { return signs_; }

  int value(const FiniteDiscrete& action, const GroupElement& t, std::size_t s) const {
    int c = 1;
    std::size_t x = s;
    for (std::size_t k = 0; k < action.dim(); ++k) {
      const auto ord = static_cast<std::int64_t>(orders_[k]);
      const std::int64_t q = detail::floor_div(t[k], ord);
      const std::int64_t r = t[k] - q * ord;
      const int full = prefix_[k][static_cast<std::size_t>(ord)][x];
      c *= (q % 2 != 0 ? full : 1) * prefix_[k][static_cast<std::size_t>(r)][x];
      x = action.apply_axis(k, t[k], x);
    }
    if (!flips_.empty() && flips_.count({t, s})) c = -c;
    return c;
  }

 private:
  std::vector<std::vector<int>> signs_;
  std::vector<std::vector<std::vector<int>>> prefix_;
  std::vector<std::size_t> orders_;
  std::set<std::pair<GroupElement, std::size_t>> flips_;
};

using Cocycle = std::variant<TrivialCocycle, FiniteCocycle>;

inline int cocycle_value(const Cocycle& c, const ActionFamily& fam, const GroupElement& t,
                         const Point& point) {
  if (std::holds_alternative<TrivialCocycle>(c)) return 1;
  const auto* fd = std::get_if<FiniteDiscrete>(&fam);
  const auto* s = std::get_if<std::size_t>(&point);
  if (!fd || !s) throw std::invalid_argument("table cocycle requires a finite action");
  return std::get<FiniteCocycle>(c).value(*fd, t, *s);
}

// ---------------------------------------------------------------------------
// Triplets
// ---------------------------------------------------------------------------

/// f as one value per atom (FiniteDiscrete).
struct AtomKernel {
  std::vector<double> values;
};

/// f(y, z) for ||z|| <= R, row-major over the cube, one row per y.
struct MovingAverageKernel {
  std::vector<std::vector<double>> values;
};

/// f(x) = sum_i 2^{-i/alpha} 1{x in S_i, x(0) = l_i}.
struct MarkovIndicatorKernel {};

/// f(x) = x(0).
struct CoordinateKernel {};

using Kernel = std::variant<AtomKernel, MovingAverageKernel, MarkovIndicatorKernel, CoordinateKernel>;

/**
 * (f, {phi_t}, {c_t}) together with alpha. Construction rejects kernels
 * that do not match their family, ||f||_alpha = 0 and full-support failures.
 */
class RosinskiTriplet {
 public:
  RosinskiTriplet(ActionFamily family, Kernel kernel, Cocycle cocycle, double alpha)
      : family_(std::move(family)), kernel_(std::move(kernel)), cocycle_(std::move(cocycle)),
        alpha_(alpha) {
    require_alpha(alpha_);
    if (family_.index() != kernel_.index())
      throw std::invalid_argument("kernel does not match the action family");
    if (std::holds_alternative<FiniteCocycle>(cocycle_) &&
        !std::holds_alternative<FiniteDiscrete>(family_))
      throw std::invalid_argument("table cocycles are only defined for finite actions");
    validate();
  }

  /// Skip the modeling checks (fixtures for negative tests only).
  static RosinskiTriplet unchecked(ActionFamily family, Kernel kernel, Cocycle cocycle,
                                   double alpha) {
    RosinskiTriplet t;
    t.family_ = std::move(family);
    t.kernel_ = std::move(kernel);
    t.cocycle_ = std::move(cocycle);
    t.alpha_ = alpha;
    return t;
  }

  const ActionFamily& family() const noexcept { return family_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const Cocycle& cocycle() const noexcept { return cocycle_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t dim() const { return family_dim(family_); }

  /// f evaluated at a point (no action applied).
  double f(const Point& point) const {
    switch (family_.index()) {
      case 0: {
        const auto& v = std::get<AtomKernel>(kernel_).values;
        return v.at(std::get<std::size_t>(point));
      }
      case 1: {
        const auto& mma = std::get<MixedMovingAverage>(family_);
        const auto& p = std::get<MmaPoint>(point);
        const auto win = mma.support_window();
        if (!win.contains(p.z)) return 0.0;
        return std::get<MovingAverageKernel>(kernel_).values.at(p.y)[win.index_of(p.z)];
      }
      case 2: {
        const auto& ms = std::get<MarkovShift>(family_);
        return markov::MarkovFieldKernel(ms.chain.classes(), alpha_)(
            std::get<markov::PathSegment>(point));
      }
      default:
        return std::get<CoordinatePatch>(point).at(GroupElement::identity(dim()));
    }
  }

 private:
  RosinskiTriplet() = default;

  void validate() const {
    if (const auto* fd = std::get_if<FiniteDiscrete>(&family_)) {
      const auto& v = std::get<AtomKernel>(kernel_).values;
      if (v.size() != fd->space().size())
        throw std::invalid_argument("kernel has wrong number of atoms");
      for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("kernel values must be finite");
      if (lp_quasi_norm(v, fd->space(), alpha_) == 0.0) throw ModelError("kernel has zero norm");
      for (const auto& orbit : fd->orbits())
        if (std::all_of(orbit.begin(), orbit.end(), [&](std::size_t s) { return v[s] == 0.0; }))
          throw ModelError("full support fails: kernel vanishes on the orbit of atom '" +
                           fd->space().labels()[orbit.front()] + "'");
    } else if (const auto* mma = std::get_if<MixedMovingAverage>(&family_)) {
      if (mma->d < 1) throw std::invalid_argument("dimension must be >= 1");
      if (mma->radius < 0) throw std::invalid_argument("kernel radius must be >= 0");
      const auto& rows = std::get<MovingAverageKernel>(kernel_).values;
      const std::size_t cube = mma->support_window().size();
      if (rows.size() != mma->Y.size())
        throw std::invalid_argument("moving-average kernel needs one row per atom of Y");
      for (std::size_t y = 0; y < rows.size(); ++y) {
        if (rows[y].size() != cube)
          throw std::invalid_argument("moving-average kernel row has wrong length");
        if (std::all_of(rows[y].begin(), rows[y].end(), [](double x) { return x == 0.0; }))
          throw ModelError("full support fails: kernel vanishes on fiber '" +
                           mma->Y.labels()[y] + "'");
        for (double x : rows[y])
          if (!std::isfinite(x)) throw std::invalid_argument("kernel values must be finite");
      }
    } else if (const auto* sg = std::get_if<SubGaussianShift>(&family_)) {
      if (sg->d < 1) throw std::invalid_argument("dimension must be >= 1");
      if (!(sg->gaussian_sd > 0.0) || !std::isfinite(sg->gaussian_sd))
        throw std::invalid_argument("Gaussian coordinate law needs a positive standard deviation");
    }
  }

  ActionFamily family_;
  Kernel kernel_;
  Cocycle cocycle_;
  double alpha_ = 1.0;
};

/// f_t(s) = c_t(s) (d mu o phi_t / d mu (s))^{1/alpha} f(phi_t s).
inline double rosinski_spectral(const RosinskiTriplet& tr, const GroupElement& t,
                                const Point& point) {
  const Point moved = apply_action(tr.family(), t, point);
  const double rn = rn_derivative(tr.family(), t, point);
  const int c = cocycle_value(tr.cocycle(), tr.family(), t, point);
  return c * std::pow(rn, 1.0 / tr.alpha()) * tr.f(moved);
}

/// f_t as one value per atom (FiniteDiscrete only).
inline std::vector<double> spectral_vector(const RosinskiTriplet& tr, const GroupElement& t) {
  const auto* fd = std::get_if<FiniteDiscrete>(&tr.family());
  if (!fd) throw std::invalid_argument("spectral vectors need a finite action");
  std::vector<double> out(fd->space().size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = rosinski_spectral(tr, t, Point{s});
  return out;
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

struct ViolationReport {
  std::string check;
  std::size_t checked = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  void fail(std::string what) {
    if (violations.size() < 50) violations.push_back(std::move(what));
    else if (violations.size() == 50) violations.emplace_back("... further violations omitted");
  }
};

inline std::string point_string(const Point& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::size_t>) return "atom " + std::to_string(x);
        else if constexpr (std::is_same_v<T, MmaPoint>)
          return "(y" + std::to_string(x.y) + "," + x.z.to_string() + ")";
        else if constexpr (std::is_same_v<T, markov::PathSegment>)
          return "path[class " + std::to_string(x.class_id) + ", from " +
                 std::to_string(x.lower) + "]";
        else return "patch" + x.window.lower().to_string();
      },
      p);
}

/// phi_e = id and phi_{u+v} = phi_v o phi_u on every sampled (u, v, s).
/// Pairs whose intermediate point leaves the recorded domain are skipped.
inline ViolationReport verify_action_axioms(const ActionFamily& fam,
                                            const std::vector<Point>& points,
                                            const std::vector<GroupElement>& ts) {
  if (points.empty() || ts.empty()) throw std::invalid_argument("empty verification sample");
  ViolationReport rep{"action_axioms", 0, {}};
  const auto e = GroupElement::identity(family_dim(fam));
  for (const auto& s : points) {
    ++rep.checked;
    if (!(apply_action(fam, e, s) == s)) rep.fail("phi_e moves " + point_string(s));
    for (const auto& u : ts)
      for (const auto& v : ts) {
        try {
          const Point lhs = apply_action(fam, u + v, s);
          const Point rhs = apply_action(fam, v, apply_action(fam, u, s));
          ++rep.checked;
          if (!(lhs == rhs))
            rep.fail("phi_{u+v} != phi_v o phi_u at u=" + u.to_string() + " v=" + v.to_string() +
                     " s=" + point_string(s));
        } catch (const DomainError&) {
        }
      }
  }
  return rep;
}

/// c_{u+v}(s) = c_u(s) c_v(phi_u s) on every sampled (u, v, s).
inline ViolationReport verify_cocycle(const Cocycle& c, const ActionFamily& fam,
                                      const std::vector<Point>& points,
                                      const std::vector<GroupElement>& ts) {
  if (points.empty() || ts.empty()) throw std::invalid_argument("empty verification sample");
  ViolationReport rep{"cocycle_identity", 0, {}};
  const auto e = GroupElement::identity(family_dim(fam));
  for (const auto& s : points) {
    ++rep.checked;
    if (cocycle_value(c, fam, e, s) != 1) rep.fail("c_e != 1 at " + point_string(s));
    for (const auto& u : ts)
      for (const auto& v : ts) {
        try {
          const int lhs = cocycle_value(c, fam, u + v, s);
          const int rhs = cocycle_value(c, fam, u, s) *
                          cocycle_value(c, fam, v, apply_action(fam, u, s));
          ++rep.checked;
          if (lhs != rhs)
            rep.fail("cocycle identity fails at u=" + u.to_string() + " v=" + v.to_string() +
                     " s=" + point_string(s));
        } catch (const DomainError&) {
        }
      }
  }
  return rep;
}

/// D(u+v, s) = D(u, s) D(v, phi_u s) within relative 1e-12.
inline ViolationReport verify_rn_chain_rule(const ActionFamily& fam,
                                            const std::vector<Point>& points,
                                            const std::vector<GroupElement>& ts) {
  if (points.empty() || ts.empty()) throw std::invalid_argument("empty verification sample");
  ViolationReport rep{"rn_chain_rule", 0, {}};
  for (const auto& s : points)
    for (const auto& u : ts)
      for (const auto& v : ts) {
        try {
          const double lhs = rn_derivative(fam, u + v, s);
          const double rhs = rn_derivative(fam, u, s) * rn_derivative(fam, v, apply_action(fam, u, s));
          ++rep.checked;
          if (!nearly_equal(lhs, rhs))
            rep.fail("chain rule fails at u=" + u.to_string() + " v=" + v.to_string() + " s=" +
                     point_string(s));
        } catch (const DomainError&) {
        }
      }
  return rep;
}

/// Every atom of a finite space, as points.
inline std::vector<Point> all_atoms(const FiniteDiscrete& fd) {
  std::vector<Point> out;
  for (std::size_t s = 0; s < fd.space().size(); ++s) out.emplace_back(s);
  return out;
}

namespace detail {

inline const FiniteDiscrete& require_finite(const RosinskiTriplet& tr) {
  const auto* fd = std::get_if<FiniteDiscrete>(&tr.family());
  if (!fd) throw std::invalid_argument("check is only defined for finite actions");
  return *fd;
}

/// Every group element of the box prod_k [0, 2 ord_k).
inline std::vector<GroupElement> period_points(const FiniteDiscrete& fd) {
  const auto box = fd.period_box();
  std::vector<GroupElement> out;
  GroupElement t = GroupElement::identity(fd.dim());
  while (true) {
    out.push_back(t);
    std::size_t k = fd.dim();
    while (true) {
      if (k == 0) return out;
      --k;
      if (++t[k] < box[k]) break;
      t[k] = 0;
    }
  }
}

}  // namespace detail

/// Union over t of Support(f o phi_t) covers every atom.
inline bool check_full_support(const RosinskiTriplet& tr) {
  const auto& fd = detail::require_finite(tr);
  const auto& v = std::get<AtomKernel>(tr.kernel()).values;
  for (const auto& orbit : fd.orbits())
    if (std::all_of(orbit.begin(), orbit.end(), [&](std::size_t s) { return v[s] == 0.0; }))
      return false;
  return true;
}

/**
 * Exact minimality on a finite space: the ratios f_t / f_u separate every
 * pair of atoms. Zero denominators give +inf when f_t >= 0 and -inf
 * otherwise. t and u range over one full period of (phi, c).
 */
inline bool check_minimal_finite(const RosinskiTriplet& tr) {
  const auto& fd = detail::require_finite(tr);
  if (!check_full_support(tr)) throw ModelError("minimality check requires full support");
  const std::size_t n = fd.space().size();
  if (n <= 1) return true;

  std::vector<std::vector<double>> fs;
  for (const auto& t : detail::period_points(fd)) {
    auto f = spectral_vector(tr, t);
    const bool dup = std::any_of(fs.begin(), fs.end(), [&](const std::vector<double>& g) {
      for (std::size_t s = 0; s < n; ++s)
        if (!nearly_equal(f[s], g[s])) return false;
      return true;
    });
    if (!dup) fs.push_back(std::move(f));
  }
  auto ratio = [](double num, double den) {
    if (den != 0.0) return num / den;
    return num >= 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      bool separated = false;
      for (std::size_t i = 0; i < fs.size() && !separated; ++i)
        for (std::size_t j = 0; j < fs.size() && !separated; ++j)
          separated = !nearly_equal(ratio(fs[i][a], fs[j][a]), ratio(fs[i][b], fs[j][b]));
      if (!separated) return false;
    }
  return true;
}

/**
 * Carry a finite triplet to (S2, mu2) along the atom bijection h (atom s of
 * S1 goes to h[s]) with sign function b on S2:
 *   f2(s)     = b(s) (mu1(h^-1 s) / mu2(s))^{1/alpha} f1(h^-1 s)
 *   phi2_t    = h phi1_t h^-1
 *   c2_t(s)   = c1_t(h^-1 s) b(s) b(phi2_t s)
 * Both triplets generate the same field in law.
 */
inline RosinskiTriplet transport_triplet(const RosinskiTriplet& tr, const std::vector<std::size_t>& h,
                                         const std::vector<int>& b,
                                         const std::vector<double>& target_weights) {
  const auto& fd = detail::require_finite(tr);
  const std::size_t n = fd.space().size();
  if (h.size() != n || b.size() != n || target_weights.size() != n)
    throw std::invalid_argument("transport data has wrong size");
  std::vector<std::size_t> inv(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    if (h[s] >= n || inv[h[s]] != n) throw std::invalid_argument("h is not a bijection");
    inv[h[s]] = s;
  }
  for (int x : b)
    if (x != 1 && x != -1) throw std::invalid_argument("b must take values +1 or -1");
  for (double w : target_weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("target weights must be finite and positive (equivalence)");

  std::vector<std::string> labels(n);
  for (std::size_t s = 0; s < n; ++s) labels[h[s]] = fd.space().labels()[s];
  FiniteWeightedSpace space2(std::move(labels), target_weights);

  std::vector<std::vector<std::size_t>> gens2(fd.dim(), std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < fd.dim(); ++k)
    for (std::size_t s = 0; s < n; ++s) gens2[k][s] = h[fd.generators()[k][inv[s]]];
  FiniteDiscrete action2(std::move(space2), std::move(gens2));

  std::vector<std::vector<int>> signs2(fd.dim(), std::vector<int>(n));
  for (std::size_t k = 0; k < fd.dim(); ++k) {
    const auto ek = GroupElement::basis(fd.dim(), k);
    for (std::size_t s = 0; s < n; ++s)
      signs2[k][s] = cocycle_value(tr.cocycle(), tr.family(), ek, Point{inv[s]}) * b[s] *
                     b[action2.generators()[k][s]];
  }
  FiniteCocycle cocycle2(action2, std::move(signs2));

  const auto& f1 = std::get<AtomKernel>(tr.kernel()).values;
  std::vector<double> f2(n);
  for (std::size_t s = 0; s < n; ++s)
    f2[s] = b[s] * std::pow(fd.space().weight(inv[s]) / target_weights[s], 1.0 / tr.alpha()) *
            f1[inv[s]];
  return RosinskiTriplet(std::move(action2), AtomKernel{std::move(f2)}, std::move(cocycle2),
                         tr.alpha());
}

}  // namespace stablefield

#endif  // STABLEFIELD_ACTIONS_HPP
