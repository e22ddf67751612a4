#ifndef STABLEFIELD_CLASSIFIER_HPP
#define STABLEFIELD_CLASSIFIER_HPP

/**
 * Ergodicity verdicts for stationary SaS fields.
 *
 * Neveu route: empty positive part -> ergodic (equivalently weakly mixing);
 * empty null part -> no nontrivial ergodic part; otherwise mixed.
 * Ledger route: the same verdicts read off the factor ledger, valid only
 * when every ergodic component is free.
 */

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stablefield/actions.hpp"
#include "stablefield/decomposition.hpp"
#include "stablefield/errors.hpp"
#include "stablefield/markov.hpp"

namespace stablefield {

enum class VerdictKind { ErgodicWeaklyMixing, CompletelyNonErgodic, MixedErgodicity };
enum class VerdictBasis { NeveuRoute, LedgerRoute };

inline const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::ErgodicWeaklyMixing: return "ErgodicWeaklyMixing";
    case VerdictKind::CompletelyNonErgodic: return "CompletelyNonErgodic";
    case VerdictKind::MixedErgodicity: return "MixedErgodicity";
  }
  return "?";
}

inline const char* to_string(VerdictBasis b) {
  return b == VerdictBasis::NeveuRoute ? "NeveuRoute" : "LedgerRoute";
}

struct Verdict {
  VerdictKind kind = VerdictKind::MixedErgodicity;
  VerdictBasis basis = VerdictBasis::NeveuRoute;
  std::vector<std::string> warnings;
};

inline VerdictKind classify_neveu(const NeveuDecomposition& n) {
  if (n.positive_labels.empty() && n.null_labels.empty())
    throw ModelError("family has no ergodic components");
  if (n.positive_labels.empty()) return VerdictKind::ErgodicWeaklyMixing;
  if (n.null_labels.empty()) return VerdictKind::CompletelyNonErgodic;
  return VerdictKind::MixedErgodicity;
}

/// Throws IndeterminateLedger on a tainted ledger.
inline VerdictKind classify_ledger(const CentralLedger& l) {
  if (l.entries.empty()) throw ModelError("family has no ergodic components");
  if (admits_no_II1(l)) return VerdictKind::ErgodicWeaklyMixing;
  if (admits_only_II1(l)) return VerdictKind::CompletelyNonErgodic;
  return VerdictKind::MixedErgodicity;
}

/// Runs both routes when the ledger is untainted and insists they agree.
inline Verdict classify(const std::vector<ErgodicComponent>& comps) {
  Verdict v;
  const auto neveu = neveu_decomposition(comps);
  v.kind = classify_neveu(neveu);
  const auto ledger = central_ledger(comps);
  const auto freeness = check_ergodically_free(comps);
  if (ledger.tainted()) {
    v.basis = VerdictBasis::NeveuRoute;
    for (const auto& note : freeness.notes) v.warnings.push_back(note);
    v.warnings.emplace_back("ledger tainted by non-free components; verdict uses the Neveu route");
    return v;
  }
  const VerdictKind by_ledger = classify_ledger(ledger);
  if (by_ledger != v.kind)
    throw InternalError(std::string("Neveu route gives ") + to_string(v.kind) +
                        " but ledger route gives " + to_string(by_ledger));
  v.basis = VerdictBasis::LedgerRoute;
  return v;
}

inline std::vector<std::string> family_warnings(const ActionFamily& fam) {
  std::vector<std::string> w;
  if (const auto* ms = std::get_if<MarkovShift>(&fam))
    for (const auto& c : ms->chain.classes())
      if (c.period != 1)
        w.push_back("class " + std::to_string(c.id) + " has period " + std::to_string(c.period) +
                    "; the weak-mixing reading assumes aperiodic classes");
  return w;
}

inline Verdict classify(const RosinskiTriplet& tr) {
  Verdict v = classify(ergodic_decomposition(tr.family()));
  auto extra = family_warnings(tr.family());
  v.warnings.insert(v.warnings.begin(), extra.begin(), extra.end());
  return v;
}

/**
 * Verdict from recurrence alone: all classes null recurrent -> ergodic,
 * all positive recurrent -> no ergodic part, otherwise mixed.
 */
inline Verdict classify_markov_field(const markov::MarkovChain& chain, double alpha) {
  require_alpha(alpha);
  bool any_positive = false, any_null = false;
  for (const auto& c : chain.classes()) {
    switch (markov::classify_recurrence(c, chain.spec_of(c))) {
      case markov::RecurrenceType::PositiveRecurrent: any_positive = true; break;
      case markov::RecurrenceType::NullRecurrent: any_null = true; break;
      case markov::RecurrenceType::Transient:
        throw ModelError("transient class " + std::to_string(c.id));
    }
  }
  Verdict v;
  v.basis = VerdictBasis::NeveuRoute;
  v.kind = !any_positive ? VerdictKind::ErgodicWeaklyMixing
           : !any_null   ? VerdictKind::CompletelyNonErgodic
                         : VerdictKind::MixedErgodicity;
  return v;
}

inline Verdict classify_markov_field(const markov::TransitionSpec& spec, double alpha) {
  return classify_markov_field(markov::MarkovChain({spec}), alpha);
}

enum class RigidityStatus { Consistent, NotComparable, Violation };

inline const char* to_string(RigidityStatus s) {
  switch (s) {
    case RigidityStatus::Consistent: return "CONSISTENT";
    case RigidityStatus::NotComparable: return "NOT-COMPARABLE";
    case RigidityStatus::Violation: return "VIOLATION";
  }
  return "?";
}

struct RigidityReport {
  RigidityStatus status = RigidityStatus::NotComparable;
  std::string message;
};

/**
 * Ledger-equivalent fields (same pair admits_no_II1, admits_only_II1) must
 * agree on ergodicity and on complete non-ergodicity.
 */
inline RigidityReport rigidity_check(const CentralLedger& a, const CentralLedger& b,
                                     const Verdict& va, const Verdict& vb) {
  const bool a_no = admits_no_II1(a), a_only = admits_only_II1(a);
  const bool b_no = admits_no_II1(b), b_only = admits_only_II1(b);
  if (a_no != b_no || a_only != b_only)
    return {RigidityStatus::NotComparable, "ledgers are not equivalent; nothing to check"};
  const bool erg_a = va.kind == VerdictKind::ErgodicWeaklyMixing;
  const bool erg_b = vb.kind == VerdictKind::ErgodicWeaklyMixing;
  const bool cne_a = va.kind == VerdictKind::CompletelyNonErgodic;
  const bool cne_b = vb.kind == VerdictKind::CompletelyNonErgodic;
  if (erg_a != erg_b || cne_a != cne_b)
    return {RigidityStatus::Violation,
            std::string("equivalent ledgers but verdicts ") + to_string(va.kind) + " vs " +
                to_string(vb.kind) + "; this is an implementation bug"};
  return {RigidityStatus::Consistent, "equivalent ledgers and matching verdicts"};
}

inline nlohmann::ordered_json to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(v.kind);
  j["basis"] = to_string(v.basis);
  j["warnings"] = v.warnings;
  return j;
}

}  // namespace stablefield

#endif  // STABLEFIELD_CLASSIFIER_HPP
