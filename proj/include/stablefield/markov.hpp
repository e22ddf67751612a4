#ifndef STABLEFIELD_MARKOV_HPP
#define STABLEFIELD_MARKOV_HPP

/**
 * Discrete-time Markov chains feeding the stationary SaS process built on
 * two-sided chain paths.
 *
 * A chain is a disjoint union of blocks. Each block is a finite transition
 * matrix (possibly with several closed classes), a birth-death chain on
 * Z_{>=0} with an eventually constant tail, or a simple random walk on Z.
 * Classes are numbered 1, 2, ... across the whole chain in block order; the
 * field kernel weights class i by 2^{-i/alpha}.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stablefield/errors.hpp"
#include "stablefield/lattice.hpp"
#include "stablefield/random.hpp"

namespace stablefield::markov {

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kInvariantTolerance = 1e-10;
inline constexpr std::int64_t kDefaultTruncationRadius = 50;

struct FiniteMatrix {
  std::vector<std::string> states;
  std::vector<std::vector<double>> P;
};

/// Birth-death chain on {0, 1, 2, ...}. Entry k of `birth`/`death` gives
/// p_k / q_k for k < birth.size(); beyond that the tail values apply.
struct BirthDeath {
  std::vector<double> birth;
  std::vector<double> death;
  double tail_birth = 0.5;
  double tail_death = 0.5;

  double p(std::int64_t k) const {
    return k < static_cast<std::int64_t>(birth.size()) ? birth[static_cast<std::size_t>(k)]
                                                       : tail_birth;
  }
  double q(std::int64_t k) const {
    if (k == 0) return 0.0;
    return k < static_cast<std::int64_t>(death.size()) ? death[static_cast<std::size_t>(k)]
                                                       : tail_death;
  }
};

/// Nearest-neighbour walk on Z: +1 with probability p, -1 otherwise.
struct SimpleRandomWalk {
  double p = 0.5;
};

using TransitionSpec = std::variant<FiniteMatrix, BirthDeath, SimpleRandomWalk>;

inline void validate(const TransitionSpec& spec) {
  auto prob = [](double x, const std::string& what) {
    if (!(x >= 0.0 && x <= 1.0) || !std::isfinite(x))
      throw std::invalid_argument(what + " is not a probability");
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteMatrix>) {
          const std::size_t n = s.states.size();
          if (n == 0) throw std::invalid_argument("finite chain has no states");
          if (s.P.size() != n) throw std::invalid_argument("transition matrix has wrong row count");
          for (std::size_t i = 0; i < n; ++i) {
            if (s.P[i].size() != n)
              throw std::invalid_argument("transition matrix row " + std::to_string(i) +
                                          " has wrong length");
            double sum = 0.0;
            for (double x : s.P[i]) {
              prob(x, "transition entry");
              sum += x;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
              throw std::invalid_argument("transition matrix row '" + s.states[i] +
                                          "' sums to " + std::to_string(sum));
          }
          std::vector<std::string> sorted = s.states;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("duplicate state label");
        } else if constexpr (std::is_same_v<T, BirthDeath>) {
          if (s.birth.size() != s.death.size())
            throw std::invalid_argument("birth and death tables differ in length");
          if (!s.death.empty() && s.death[0] != 0.0)
            throw std::invalid_argument("death probability at state 0 must be 0");
          const auto head = static_cast<std::int64_t>(s.birth.size());
          for (std::int64_t k = 0; k <= head; ++k) {
            prob(s.p(k), "birth probability");
            prob(s.q(k), "death probability");
            if (!(s.p(k) > 0.0))
              throw std::invalid_argument("birth probability must be positive (irreducibility)");
            if (k > 0 && !(s.q(k) > 0.0))
              throw std::invalid_argument("death probability must be positive (irreducibility)");
            if (s.p(k) + s.q(k) > 1.0 + kRowSumTolerance)
              throw std::invalid_argument("birth + death probability exceeds 1 at state " +
                                          std::to_string(k));
          }
        } else {
          if (!(s.p > 0.0 && s.p < 1.0))
            throw std::invalid_argument("random walk step probability must lie in (0, 1)");
        }
      },
      spec);
}

enum class RecurrenceType { PositiveRecurrent, NullRecurrent, Transient };

inline const char* to_string(RecurrenceType r) {
  switch (r) {
    case RecurrenceType::PositiveRecurrent: return "PositiveRecurrent";
    case RecurrenceType::NullRecurrent: return "NullRecurrent";
    case RecurrenceType::Transient: return "Transient";
  }
  return "?";
}

struct CommunicationClass {
  std::size_t id = 0;     // 1-based across the chain
  std::size_t block = 0;  // index of the TransitionSpec it came from
  bool infinite = false;
  std::vector<std::int64_t> states;  // explicit states (finite classes only)
  std::int64_t anchor = 0;
  std::size_t period = 1;  // 0 when not determined
};

namespace detail {

inline void tarjan(std::size_t v, const std::vector<std::vector<std::size_t>>& adj,
                   std::vector<int>& index, std::vector<int>& low, std::vector<bool>& on_stack,
                   std::vector<std::size_t>& stack, int& counter,
                   std::vector<std::vector<std::size_t>>& out) {
  index[v] = low[v] = counter++;
  stack.push_back(v);
  on_stack[v] = true;
  for (std::size_t w : adj[v]) {
    if (index[w] < 0) {
      tarjan(w, adj, index, low, on_stack, stack, counter, out);
      low[v] = std::min(low[v], low[w]);
    } else if (on_stack[w]) {
      low[v] = std::min(low[v], index[w]);
    }
  }
  if (low[v] == index[v]) {
    std::vector<std::size_t> comp;
    std::size_t w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      comp.push_back(w);
    } while (w != v);
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
}

/// gcd of cycle lengths through BFS levels from `root`.
inline std::size_t finite_period(const FiniteMatrix& m, const std::vector<std::int64_t>& cls) {
  std::map<std::int64_t, std::int64_t> level;
  std::vector<std::int64_t> queue{cls.front()};
  level[cls.front()] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const auto u = queue[h];
    for (auto v : cls) {
      if (m.P[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0.0 &&
          !level.count(v)) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::int64_t g = 0;
  for (auto u : cls)
    for (auto v : cls)
      if (m.P[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0.0)
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  return static_cast<std::size_t>(g);
}

}  // namespace detail

/**
 * Communication classes of one block. Finite matrices are split into
 * strongly connected components; every component must be closed, since the
 * process construction needs recurrent classes. Infinite variants are a
 * single class.
 */
inline std::vector<CommunicationClass> communication_classes(const TransitionSpec& spec,
                                                              std::size_t block = 0,
                                                              std::size_t first_id = 1) {
  validate(spec);
  std::vector<CommunicationClass> out;
  if (const auto* m = std::get_if<FiniteMatrix>(&spec)) {
    const std::size_t n = m->states.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m->P[i][j] > 0.0) adj[i].push_back(j);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (index[v] < 0) detail::tarjan(v, adj, index, low, on_stack, stack, counter, comps);
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<std::size_t> comp_of(n);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (auto v : comps[c]) comp_of[v] = c;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (auto v : comps[c])
        for (auto w : adj[v])
          if (comp_of[w] != c)
            throw ModelError("transient class: state '" + m->states[v] + "' leaks into '" +
                             m->states[w] + "'");
      CommunicationClass cls;
      cls.id = first_id + c;
      cls.block = block;
      for (auto v : comps[c]) cls.states.push_back(static_cast<std::int64_t>(v));
      cls.anchor = *std::min_element(cls.states.begin(), cls.states.end(),
                                     [&](std::int64_t a, std::int64_t b) {
                                       return m->states[static_cast<std::size_t>(a)] <
                                              m->states[static_cast<std::size_t>(b)];
                                     });
      cls.period = detail::finite_period(*m, cls.states);
      out.push_back(std::move(cls));
    }
  } else if (const auto* bd = std::get_if<BirthDeath>(&spec)) {
    CommunicationClass cls;
    cls.id = first_id;
    cls.block = block;
    cls.infinite = true;
    cls.anchor = 0;
    bool holds = bd->tail_birth + bd->tail_death < 1.0 - kRowSumTolerance;
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(bd->birth.size()); ++k)
      holds = holds || bd->p(k) + bd->q(k) < 1.0 - kRowSumTolerance;
    cls.period = holds ? 1 : 2;
    out.push_back(std::move(cls));
  } else {
    CommunicationClass cls;
    cls.id = first_id;
    cls.block = block;
    cls.infinite = true;
    cls.anchor = 0;
    cls.period = 2;
    out.push_back(std::move(cls));
  }
  return out;
}

/**
 * Recurrence type of a class.
 *
 * Birth-death chains use the two-series criterion: recurrent iff
 * sum_n prod_{k<=n} q_k/p_k diverges, positive iff additionally
 * sum_n prod_{k<n} p_k/q_{k+1} converges. With a constant tail both are
 * geometric, so the verdict depends only on q_tail versus p_tail.
 */
inline RecurrenceType classify_recurrence(const CommunicationClass& cls,
                                          const TransitionSpec& spec) {
  (void)cls;
  if (std::holds_alternative<FiniteMatrix>(spec)) return RecurrenceType::PositiveRecurrent;
  if (const auto* w = std::get_if<SimpleRandomWalk>(&spec))
    return std::abs(w->p - 0.5) <= kRowSumTolerance ? RecurrenceType::NullRecurrent
                                                    : RecurrenceType::Transient;
  const auto& bd = std::get<BirthDeath>(spec);
  const double p = bd.tail_birth, q = bd.tail_death;
  if (std::abs(q - p) <= kRowSumTolerance) return RecurrenceType::NullRecurrent;
  return q > p ? RecurrenceType::PositiveRecurrent : RecurrenceType::Transient;
}

/// Invariant measure of a recurrent class, anchored so that pi(anchor) = 1.
class InvariantMeasure {
 public:
  InvariantMeasure() = default;

  static InvariantMeasure finite(std::vector<std::int64_t> states, std::vector<double> weights) {
    InvariantMeasure m;
    m.kind_ = Kind::Finite;
    m.states_ = std::move(states);
    m.weights_ = std::move(weights);
    m.total_ = std::accumulate(m.weights_.begin(), m.weights_.end(), 0.0);
    return m;
  }

  static InvariantMeasure counting() {
    InvariantMeasure m;
    m.kind_ = Kind::Counting;
    m.total_ = std::numeric_limits<double>::infinity();
    return m;
  }

  static InvariantMeasure birth_death(BirthDeath chain, std::int64_t anchor, double total) {
    InvariantMeasure m;
    m.kind_ = Kind::BirthDeath;
    m.chain_ = std::move(chain);
    m.anchor_ = anchor;
    m.total_ = total;
    m.anchor_raw_ = m.raw_bd_weight(anchor);
    return m;
  }

  double weight(std::int64_t state) const {
    switch (kind_) {
      case Kind::Finite: {
        auto it = std::find(states_.begin(), states_.end(), state);
        if (it == states_.end()) return 0.0;
        return weights_[static_cast<std::size_t>(it - states_.begin())];
      }
      case Kind::Counting: return 1.0;
      case Kind::BirthDeath: return state < 0 ? 0.0 : raw_bd_weight(state) / anchor_raw_;
    }
    return 0.0;
  }

  /// Total mass; +infinity for null-recurrent classes.
  double total_mass() const noexcept { return total_; }
  bool finite_mass() const noexcept { return std::isfinite(total_); }

  const std::vector<std::int64_t>& states() const noexcept { return states_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  enum class Kind { Finite, Counting, BirthDeath };

  // prod_{j<k} p_j / q_{j+1}
  double raw_bd_weight(std::int64_t k) const {
    double w = 1.0;
    for (std::int64_t j = 0; j < k; ++j) w *= chain_.p(j) / chain_.q(j + 1);
    return w;
  }

  Kind kind_ = Kind::Finite;
  std::vector<std::int64_t> states_;
  std::vector<double> weights_;
  BirthDeath chain_;
  std::int64_t anchor_ = 0;
  double anchor_raw_ = 1.0;
  double total_ = 0.0;
};

inline InvariantMeasure invariant_measure(const CommunicationClass& cls,
                                          const TransitionSpec& spec) {
  const RecurrenceType rec = classify_recurrence(cls, spec);
  if (rec == RecurrenceType::Transient)
    throw ModelError("class " + std::to_string(cls.id) + " is transient; no invariant measure");
  if (const auto* m = std::get_if<FiniteMatrix>(&spec)) {
    const auto n = static_cast<Eigen::Index>(cls.states.size());
    const auto anchor_pos = static_cast<Eigen::Index>(
        std::find(cls.states.begin(), cls.states.end(), cls.anchor) - cls.states.begin());
    if (anchor_pos == n) throw std::invalid_argument("anchor is not a state of its class");
    // pi (P - I) = 0 with the anchor equation replaced by pi(anchor) = 1.
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        A(j, i) = m->P[static_cast<std::size_t>(cls.states[static_cast<std::size_t>(i)])]
                      [static_cast<std::size_t>(cls.states[static_cast<std::size_t>(j)])] -
                  (i == j ? 1.0 : 0.0);
    A.row(anchor_pos).setZero();
    A(anchor_pos, anchor_pos) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(anchor_pos) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw InternalError("singular invariant-measure system");
    const Eigen::VectorXd pi = lu.solve(rhs);
    std::vector<double> w(pi.data(), pi.data() + n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double lhs = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        lhs += w[static_cast<std::size_t>(i)] *
               m->P[static_cast<std::size_t>(cls.states[static_cast<std::size_t>(i)])]
                   [static_cast<std::size_t>(cls.states[static_cast<std::size_t>(j)])];
      if (std::abs(lhs - w[static_cast<std::size_t>(j)]) > kInvariantTolerance)
        throw InternalError("invariant measure residual too large");
    }
    return InvariantMeasure::finite(cls.states, std::move(w));
  }
  if (std::holds_alternative<SimpleRandomWalk>(spec)) return InvariantMeasure::counting();

  const auto& bd = std::get<BirthDeath>(spec);
  double total = std::numeric_limits<double>::infinity();
  if (rec == RecurrenceType::PositiveRecurrent) {
    // pi_{k+1} = pi_k p_k / q_{k+1}; geometric with ratio r beyond the head.
    const auto head = static_cast<std::int64_t>(bd.birth.size());
    const double r = bd.tail_birth / bd.tail_death;
    double pi_k = 1.0, sum = 0.0;
    for (std::int64_t k = 0; k < head; ++k) {
      sum += pi_k;
      pi_k *= bd.p(k) / bd.q(k + 1);
    }
    sum += pi_k / (1.0 - r);
    double anchor_raw = 1.0;
    for (std::int64_t j = 0; j < cls.anchor; ++j) anchor_raw *= bd.p(j) / bd.q(j + 1);
    total = sum / anchor_raw;
  }
  return InvariantMeasure::birth_death(bd, cls.anchor, total);
}

/// True when some state of the class has two or more possible successors.
inline bool class_branches(const CommunicationClass& cls, const TransitionSpec& spec) {
  if (const auto* m = std::get_if<FiniteMatrix>(&spec)) {
    for (auto s : cls.states) {
      int successors = 0;
      for (double x : m->P[static_cast<std::size_t>(s)]) successors += x > 0.0;
      if (successors >= 2) return true;
    }
    return false;
  }
  return true;
}

/// Finite set F of starting states with their pi-weights.
struct TruncationSet {
  std::vector<std::int64_t> states;
  std::vector<double> weights;

  double mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

/// F = the whole class when finite, else states within graph distance
/// `radius` of the anchor.
inline TruncationSet truncation_set(const CommunicationClass& cls, const TransitionSpec& spec,
                                    const InvariantMeasure& pi,
                                    std::int64_t radius = kDefaultTruncationRadius) {
  TruncationSet f;
  if (!cls.infinite) {
    f.states = cls.states;
  } else {
    if (radius < 0) throw std::invalid_argument("negative truncation radius");
    const std::int64_t lo = std::holds_alternative<BirthDeath>(spec)
                                ? std::max<std::int64_t>(0, cls.anchor - radius)
                                : cls.anchor - radius;
    for (std::int64_t s = lo; s <= cls.anchor + radius; ++s) f.states.push_back(s);
  }
  for (auto s : f.states) f.weights.push_back(pi.weight(s));
  return f;
}

/// A finite window x(lower), ..., x(lower + size - 1) of a two-sided path
/// living in class `class_id`.
struct PathSegment {
  std::size_t class_id = 0;
  std::int64_t lower = 0;
  std::vector<std::int64_t> states;

  std::int64_t upper() const { return lower + static_cast<std::int64_t>(states.size()) - 1; }
  bool covers(std::int64_t u) const { return u >= lower && u <= upper(); }
  std::int64_t at(std::int64_t u) const {
    if (!covers(u))
      throw DomainError("path coordinate " + std::to_string(u) + " not recorded");
    return states[static_cast<std::size_t>(u - lower)];
  }

  friend bool operator==(const PathSegment&, const PathSegment&) = default;
};

struct PathSample {
  PathSegment path;
  double truncated_mass = 0.0;  // m_F
};

/**
 * Reusable two-sided path sampler for one class.
 *
 * x(0) ~ pi restricted to F and normalised; x(1), x(2), ... run forward with
 * P and x(-1), x(-2), ... run with the reversed kernel pi_k p_kj / pi_j.
 */
class PathSampler {
 public:
  PathSampler(const CommunicationClass& cls, const TransitionSpec& spec,
              const InvariantMeasure& pi, TruncationSet f)
      : cls_(cls), spec_(spec), f_(std::move(f)) {
    if (f_.states.empty()) throw std::invalid_argument("empty truncation set");
    double acc = 0.0;
    for (double w : f_.weights) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("truncation weights must be finite and positive");
      acc += w;
      initial_cdf_.push_back(acc);
    }
    mass_ = acc;
    if (const auto* m = std::get_if<FiniteMatrix>(&spec_)) {
      for (auto s : cls_.states) position_[s] = forward_cdf_.size(), forward_cdf_.emplace_back();
      backward_cdf_.resize(forward_cdf_.size());
      for (std::size_t a = 0; a < cls_.states.size(); ++a) {
        const auto j = static_cast<std::size_t>(cls_.states[a]);
        double fw = 0.0, bw = 0.0;
        for (std::size_t b = 0; b < cls_.states.size(); ++b) {
          const auto k = static_cast<std::size_t>(cls_.states[b]);
          fw += m->P[j][k];
          bw += pi.weight(cls_.states[b]) * m->P[k][j] / pi.weight(cls_.states[a]);
          forward_cdf_[a].push_back(fw);
          backward_cdf_[a].push_back(bw);
        }
        if (std::abs(bw - 1.0) > kInvariantTolerance)
          throw InternalError("reversed kernel row does not sum to 1");
      }
    }
  }

  const TruncationSet& truncation() const noexcept { return f_; }
  double truncated_mass() const noexcept { return mass_; }

  /// Reversed-kernel probability of stepping j -> k (finite classes).
  double backward_probability(std::int64_t j, std::int64_t k) const {
    const auto& row = backward_cdf_.at(position_.at(j));
    const auto b = position_.at(k);
    return row[b] - (b == 0 ? 0.0 : row[b - 1]);
  }

  PathSegment sample(std::int64_t lower, std::int64_t upper, RandomStream& rng) const {
    if (lower > 0 || upper < 0) throw std::invalid_argument("path window must contain 0");
    PathSegment x;
    x.class_id = cls_.id;
    x.lower = lower;
    x.states.resize(static_cast<std::size_t>(upper - lower + 1));
    const auto zero = static_cast<std::size_t>(-lower);
    x.states[zero] = f_.states[pick(initial_cdf_, rng.uniform() * mass_)];
    for (std::size_t u = zero + 1; u < x.states.size(); ++u)
      x.states[u] = step(x.states[u - 1], forward_cdf_, false, rng);
    for (std::size_t u = zero; u-- > 0;)
      x.states[u] = step(x.states[u + 1], backward_cdf_, true, rng);
    return x;
  }

 private:
  static std::size_t pick(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
  }

  std::int64_t step(std::int64_t from, const std::vector<std::vector<double>>& table,
                    bool backward, RandomStream& rng) const {
    const double u = rng.uniform();
    if (std::holds_alternative<FiniteMatrix>(spec_)) {
      const auto& row = table[position_.at(from)];
      return cls_.states[pick(row, u * row.back())];
    }
    if (const auto* w = std::get_if<SimpleRandomWalk>(&spec_)) {
      // Reversed walk steps -1 with probability p.
      const bool up = backward ? u >= w->p : u < w->p;
      return from + (up ? 1 : -1);
    }
    // Birth-death chains are reversible: both directions use P.
    const auto& bd = std::get<BirthDeath>(spec_);
    const double p = bd.p(from), q = bd.q(from);
    if (u < p) return from + 1;
    if (u < p + q) return from - 1;
    return from;
  }

  CommunicationClass cls_;
  TransitionSpec spec_;
  TruncationSet f_;
  double mass_ = 0.0;
  std::vector<double> initial_cdf_;
  std::map<std::int64_t, std::size_t> position_;
  std::vector<std::vector<double>> forward_cdf_;
  std::vector<std::vector<double>> backward_cdf_;
};

inline PathSample sample_two_sided_path(const CommunicationClass& cls, const TransitionSpec& spec,
                                        std::int64_t half_width, const InvariantMeasure& pi,
                                        const TruncationSet& f, RandomStream& rng) {
  if (half_width < 0) throw std::invalid_argument("negative path half-width");
  PathSampler sampler(cls, spec, pi, f);
  return {sampler.sample(-half_width, half_width, rng), sampler.truncated_mass()};
}

/**
 * A chain assembled from blocks, with classes numbered across blocks.
 * `anchor_overrides` maps a class id to its anchor state.
 */
class MarkovChain {
 public:
  MarkovChain() = default;
  explicit MarkovChain(std::vector<TransitionSpec> blocks,
                       std::map<std::size_t, std::int64_t> anchor_overrides = {})
      : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("chain has no blocks");
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      auto cs = communication_classes(blocks_[b], b, classes_.size() + 1);
      for (auto& c : cs) classes_.push_back(std::move(c));
    }
    for (const auto& [id, anchor] : anchor_overrides) {
      if (id < 1 || id > classes_.size())
        throw std::invalid_argument("anchor override for unknown class " + std::to_string(id));
      auto& c = classes_[id - 1];
      const bool ok = c.infinite
                          ? (std::holds_alternative<BirthDeath>(blocks_[c.block]) ? anchor >= 0
                                                                                  : true)
                          : std::find(c.states.begin(), c.states.end(), anchor) != c.states.end();
      if (!ok) throw std::invalid_argument("anchor is not a state of class " + std::to_string(id));
      c.anchor = anchor;
    }
  }

  const std::vector<TransitionSpec>& blocks() const noexcept { return blocks_; }
  const std::vector<CommunicationClass>& classes() const noexcept { return classes_; }
  const CommunicationClass& cls(std::size_t id) const { return classes_.at(id - 1); }
  const TransitionSpec& spec_of(const CommunicationClass& c) const { return blocks_.at(c.block); }

  RecurrenceType recurrence(std::size_t id) const {
    return classify_recurrence(cls(id), spec_of(cls(id)));
  }

  std::string state_label(const CommunicationClass& c, std::int64_t state) const {
    if (const auto* m = std::get_if<FiniteMatrix>(&spec_of(c)))
      return m->states.at(static_cast<std::size_t>(state));
    return std::to_string(state);
  }

 private:
  std::vector<TransitionSpec> blocks_;
  std::vector<CommunicationClass> classes_;
};

/**
 * f(x) = sum_i 2^{-i/alpha} 1{x in S_i, x(0) = l_i}, and its translates
 * f(phi_t x) = 2^{-i/alpha} 1{x(t) = l_i}.
 */
class MarkovFieldKernel {
 public:
  MarkovFieldKernel(const std::vector<CommunicationClass>& classes, double alpha)
      : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
    for (const auto& c : classes) anchors_[c.id] = c.anchor;
  }

  double coefficient(std::size_t class_id) const {
    return std::pow(2.0, -static_cast<double>(class_id) / alpha_);
  }

  /// f(phi_t x), i.e. the kernel evaluated on the path read from time t.
  double evaluate_at(const PathSegment& x, std::int64_t t) const {
    auto it = anchors_.find(x.class_id);
    if (it == anchors_.end()) return 0.0;
    return x.at(t) == it->second ? coefficient(x.class_id) : 0.0;
  }

  double operator()(const PathSegment& x) const { return evaluate_at(x, 0); }

  double operator()(const GroupElement& t, const PathSegment& x) const {
    return evaluate_at(x, t[0]);
  }

  /// out[t] += weight * f(phi_t x) over a 1-d window.
  void accumulate(const PathSegment& x, double weight, const LatticeWindow& window,
                  std::span<double> out) const {
    auto it = anchors_.find(x.class_id);
    if (it == anchors_.end()) return;
    const double c = weight * coefficient(x.class_id);
    const std::int64_t lo = window.lower()[0];
    for (std::int64_t t = lo; t <= window.upper()[0]; ++t)
      if (x.at(t) == it->second) out[static_cast<std::size_t>(t - lo)] += c;
  }

  /// int |f|^alpha d mu_i = 2^{-i} pi_i(l_i) = 2^{-i}.
  double class_mass(std::size_t class_id) const { return std::pow(2.0, -static_cast<double>(class_id)); }

  double alpha() const noexcept { return alpha_; }
  const std::map<std::size_t, std::int64_t>& anchors() const noexcept { return anchors_; }

 private:
  double alpha_;
  std::map<std::size_t, std::int64_t> anchors_;
};

inline MarkovFieldKernel markov_field_kernel(const std::vector<CommunicationClass>& classes,
                                             double alpha) {
  return {classes, alpha};
}

}  // namespace stablefield::markov

#endif  // STABLEFIELD_MARKOV_HPP
