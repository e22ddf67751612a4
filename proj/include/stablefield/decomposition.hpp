#ifndef STABLEFIELD_DECOMPOSITION_HPP
#define STABLEFIELD_DECOMPOSITION_HPP

/**
 * Ergodic and Neveu decompositions of the catalog actions and the factor
 * ledger of the group measure space construction along ergodic components.
 *
 * Component labels are always countable here, so nu is counting measure
 * and "nu-a.e." quantifiers become "every component".
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stablefield/actions.hpp"
#include "stablefield/errors.hpp"
#include "stablefield/markov.hpp"

namespace stablefield {

enum class FactorType { II1, IIInfinity, Unclassified };

inline const char* to_string(FactorType f) {
  switch (f) {
    case FactorType::II1: return "II1";
    case FactorType::IIInfinity: return "IIInfinity";
    case FactorType::Unclassified: return "Unclassified";
  }
  return "?";
}

struct ErgodicComponent {
  std::string label;
  std::string description;
  double mass = 0.0;  // +infinity for infinite components
  bool positive = false;
  bool free = false;
  std::vector<std::size_t> atoms;  // FiniteDiscrete only
  std::string freeness_note;       // why a component is not free

  bool finite_mass() const { return std::isfinite(mass); }
};

struct NeveuDecomposition {
  std::vector<std::string> positive_labels;
  std::vector<std::string> null_labels;
};

struct LedgerEntry {
  std::string label;
  FactorType type = FactorType::Unclassified;
  bool positive = false;
  bool free = false;
  double mass = 0.0;
};

struct CentralLedger {
  std::vector<LedgerEntry> entries;
  bool counting_measure = true;

  bool tainted() const {
    for (const auto& e : entries)
      if (e.type == FactorType::Unclassified) return true;
    return false;
  }
};

namespace detail {

inline std::vector<ErgodicComponent> finite_components(const FiniteDiscrete& fd) {
  std::vector<ErgodicComponent> out;
  const auto& labels = fd.space().labels();
  // Every point of a finite orbit has a nontrivial stabilizer; report the
  // first return time along e_1.
  const auto witness = GroupElement::basis(fd.dim(), 0);
  for (const auto& orbit : fd.orbits()) {
    std::int64_t period = 1;
    while (fd.apply_axis(0, period, orbit.front()) != orbit.front()) ++period;
    ErgodicComponent c;
    c.label = "orbit:" + labels[orbit.front()];
    c.description = "orbit {";
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      c.description += (i ? "," : "") + labels[orbit[i]];
      c.mass += fd.space().weight(orbit[i]);
    }
    c.description += "}";
    c.atoms = orbit;
    c.positive = true;
    c.free = false;
    c.freeness_note = "stabilizer contains " + std::to_string(period) + "*" +
                      witness.to_string() + " != e";
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// One component per invariant ergodic piece of the family's space.
inline std::vector<ErgodicComponent> ergodic_decomposition(const ActionFamily& fam) {
  if (const auto* fd = std::get_if<FiniteDiscrete>(&fam)) return detail::finite_components(*fd);

  std::vector<ErgodicComponent> out;
  if (const auto* mma = std::get_if<MixedMovingAverage>(&fam)) {
    for (const auto& y : mma->Y.labels()) {
      ErgodicComponent c;
      c.label = "fiber:" + y;
      c.description = "{" + y + "} x Z^" + std::to_string(mma->d);
      c.mass = std::numeric_limits<double>::infinity();
      c.positive = false;
      c.free = true;
      out.push_back(std::move(c));
    }
  } else if (const auto* ms = std::get_if<MarkovShift>(&fam)) {
    for (const auto& cls : ms->chain.classes()) {
      const auto& spec = ms->chain.spec_of(cls);
      const auto rec = markov::classify_recurrence(cls, spec);
      if (rec == markov::RecurrenceType::Transient)
        throw ModelError("transient class " + std::to_string(cls.id) +
                         ": the construction needs recurrent classes");
      const auto pi = markov::invariant_measure(cls, spec);
      ErgodicComponent c;
      c.label = "class:" + std::to_string(cls.id);
      c.description = std::string(markov::to_string(rec)) + " class, anchor " +
                      ms->chain.state_label(cls, cls.anchor);
      c.mass = pi.total_mass();
      c.positive = rec == markov::RecurrenceType::PositiveRecurrent;
      c.free = markov::class_branches(cls, spec);
      if (!c.free)
        c.freeness_note = cls.states.size() == 1
                              ? "singleton class: the constant path is fixed by every shift"
                              : "deterministic cycle: every path is periodic";
      out.push_back(std::move(c));
    }
  } else {
    ErgodicComponent c;
    c.label = "gaussian-shift";
    c.description = "i.i.d. Gaussian coordinates";
    c.mass = 1.0;
    c.positive = true;
    c.free = true;
    out.push_back(std::move(c));
  }
  return out;
}

inline NeveuDecomposition neveu_decomposition(const std::vector<ErgodicComponent>& comps) {
  NeveuDecomposition n;
  for (const auto& c : comps) (c.positive ? n.positive_labels : n.null_labels).push_back(c.label);
  return n;
}

inline NeveuDecomposition neveu_decomposition(const ActionFamily& fam) {
  return neveu_decomposition(ergodic_decomposition(fam));
}

struct FreenessReport {
  std::vector<std::pair<std::string, bool>> components;
  std::vector<std::string> notes;
  bool all_free = true;
};

inline FreenessReport check_ergodically_free(const std::vector<ErgodicComponent>& comps) {
  FreenessReport r;
  for (const auto& c : comps) {
    r.components.emplace_back(c.label, c.free);
    if (!c.free) {
      r.all_free = false;
      r.notes.push_back(c.label + " is not free: " + c.freeness_note);
    }
  }
  return r;
}

inline FreenessReport check_ergodically_free(const ActionFamily& fam) {
  return check_ergodically_free(ergodic_decomposition(fam));
}

/// Free components get II1 when positive, II_inf otherwise; components that
/// are not free stay Unclassified.
inline CentralLedger central_ledger(const std::vector<ErgodicComponent>& comps) {
  CentralLedger l;
  for (const auto& c : comps) {
    LedgerEntry e{c.label, FactorType::Unclassified, c.positive, c.free, c.mass};
    if (c.free) e.type = c.positive ? FactorType::II1 : FactorType::IIInfinity;
    l.entries.push_back(std::move(e));
  }
  return l;
}

inline CentralLedger central_ledger(const ActionFamily& fam) {
  return central_ledger(ergodic_decomposition(fam));
}

inline bool admits_no_II1(const CentralLedger& l) {
  if (l.tainted()) throw IndeterminateLedger("ledger has Unclassified components");
  for (const auto& e : l.entries)
    if (e.type == FactorType::II1) return false;
  return true;
}

inline bool admits_only_II1(const CentralLedger& l) {
  if (l.tainted()) throw IndeterminateLedger("ledger has Unclassified components");
  for (const auto& e : l.entries)
    if (e.type != FactorType::II1) return false;
  return true;
}

inline nlohmann::ordered_json mass_json(double m) {
  if (std::isinf(m)) return "inf";
  return m;
}

inline nlohmann::ordered_json to_json(const CentralLedger& l) {
  nlohmann::ordered_json j;
  j["components"] = nlohmann::ordered_json::array();
  for (const auto& e : l.entries) {
    nlohmann::ordered_json c;
    c["label"] = e.label;
    c["factor_type"] = to_string(e.type);
    c["positive"] = e.positive;
    c["free"] = e.free;
    c["mass"] = mass_json(e.mass);
    j["components"].push_back(std::move(c));
  }
  if (l.tainted()) {
    j["admits_no_II1"] = nullptr;
    j["admits_only_II1"] = nullptr;
  } else {
    j["admits_no_II1"] = admits_no_II1(l);
    j["admits_only_II1"] = admits_only_II1(l);
  }
  return j;
}

inline nlohmann::ordered_json to_json(const NeveuDecomposition& n) {
  nlohmann::ordered_json j;
  j["positive"] = n.positive_labels;
  j["null"] = n.null_labels;
  return j;
}

/**
 * Exact checks on a FiniteDiscrete family: for each test set B (atom
 * indices), mu(B) = sum_y mu_y(B); components are disjoint and cover the
 * space; and when mu is invariant each mu_y is invariant.
 */
inline ViolationReport decomposition_consistency(const FiniteDiscrete& fd,
                                                 const std::vector<std::vector<std::size_t>>& test_sets) {
  ViolationReport rep{"decomposition_consistency", 0, {}};
  const auto comps = detail::finite_components(fd);
  const std::size_t n = fd.space().size();
  std::vector<int> owner(n, -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (auto s : comps[c].atoms) {
      ++rep.checked;
      if (owner[s] >= 0) rep.fail("atom " + std::to_string(s) + " lies in two components");
      owner[s] = static_cast<int>(c);
    }
  for (std::size_t s = 0; s < n; ++s)
    if (owner[s] < 0) rep.fail("atom " + std::to_string(s) + " lies in no component");

  for (const auto& B : test_sets) {
    double mu = 0.0, sum = 0.0;
    for (auto s : B) mu += fd.space().weight(s);
    for (const auto& c : comps)
      for (auto s : B)
        if (std::find(c.atoms.begin(), c.atoms.end(), s) != c.atoms.end())
          sum += fd.space().weight(s);
    ++rep.checked;
    if (!nearly_equal(mu, sum)) rep.fail("additivity fails on a test set");
  }

  bool invariant = true;
  for (std::size_t k = 0; k < fd.dim(); ++k)
    for (std::size_t s = 0; s < n; ++s)
      invariant = invariant && nearly_equal(fd.space().weight(fd.generators()[k][s]),
                                            fd.space().weight(s));
  if (invariant) {
    for (const auto& c : comps)
      for (std::size_t k = 0; k < fd.dim(); ++k)
        for (auto s : c.atoms) {
          ++rep.checked;
          const auto img = fd.generators()[k][s];
          if (owner[img] != owner[s] || !nearly_equal(fd.space().weight(img), fd.space().weight(s)))
            rep.fail("component " + c.label + " is not invariant");
        }
  }
  return rep;
}

/// All 2^n subsets of an n-atom space (n <= 20).
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n) {
  if (n > 20) throw std::invalid_argument("subset enumeration limited to 20 atoms");
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> B;
    for (std::size_t s = 0; s < n; ++s)
      if (mask & (1u << s)) B.push_back(s);
    out.push_back(std::move(B));
  }
  return out;
}

}  // namespace stablefield

#endif  // STABLEFIELD_DECOMPOSITION_HPP
