#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "topgal/structure_json.hpp"
#include "topgal/structures.hpp"

namespace topgal {

/// Three-valued answer of a bounded search.
enum class Tri { no, yes, unknown };
std::string to_string(Tri t);

/// An amalgam D of a span B1 <-f- A -g-> B2. Elements 0..|B1|-1 of D are B1
/// itself, so `left` is always the prefix inclusion.
struct Amalgam {
  StructurePtr d;
  Embedding left;   // B1 -> D
  Embedding right;  // B2 -> D
};

enum class SearchStatus { exhausted, stopped, bounded };

/// Return false to stop the enumeration.
using AmalgamVisitor = std::function<bool(const Amalgam&)>;

/// Pairs (element of B1, element of B2) that an amalgam must keep distinct.
using KeepApart = std::vector<std::pair<int, int>>;

/// A one-point extension of a base structure: the base occupies the prefix of
/// `structure`; `key` identifies the extension type over the base.
struct Extension {
  StructurePtr structure;
  std::vector<int> key;
};

/// Raised when a construction needs an amalgam and the strategy finds none.
class AmalgamFailure : public Error {
 public:
  AmalgamFailure(const std::string& what, Json span) : Error(what), span_(std::move(span)) {}
  const Json& span() const { return span_; }

 private:
  Json span_;
};

class FraisseClass {
 public:
  FraisseClass(std::string name, Signature signature);
  virtual ~FraisseClass() = default;

  const std::string& name() const { return name_; }
  const Signature& signature() const { return signature_; }

  virtual std::string strategy() const = 0;
  /// True when visit_amalgams enumerates every amalgam up to isomorphism over the span.
  virtual bool exact_amalgams() const { return true; }

  virtual bool contains(const FiniteStructure& s) const = 0;
  /// Size measure used by all bounds (carrier size, or atom count for Boolean algebras).
  virtual std::size_t measure(const FiniteStructure& s) const { return s.size(); }
  /// Largest measure with members, if the class is truncated.
  virtual std::optional<std::size_t> max_measure() const { return std::nullopt; }

  /// Members of exactly this measure, one per isomorphism type, by canonical label.
  const std::vector<StructurePtr>& members(std::size_t measure) const;
  std::vector<StructurePtr> members_upto(std::size_t measure) const;

  /// Enumerates amalgams of the span in the strategy's preference order.
  virtual SearchStatus visit_amalgams(const Embedding& f, const Embedding& g, const AmalgamVisitor& visit,
                                      const KeepApart& keep_apart = {}) const = 0;

  /// One-point extensions of `base` (a member), one per type over the base.
  virtual std::vector<Extension> one_point_extensions(const StructurePtr& base) const;

  /// Element sets of the generated substructures of `a` of measure <= bound, sorted.
  virtual std::vector<std::vector<int>> small_substructures(const FiniteStructure& a, std::size_t bound) const;

  /// The substructure generated by the empty set inside a member.
  Substructure bottom_of(const StructurePtr& member) const;

  /// Decides whether some amalgam of two copies of B over A (given by `a`: A -> B)
  /// keeps the two copies of element `b` apart; returns the witness when found.
  virtual std::pair<Tri, std::optional<Amalgam>> split(const Embedding& a, int b) const;

  /// Binary relations flagged symmetric get one amalgam slot per unordered pair.
  virtual bool symmetric(int relation) const {
    (void)relation;
    return false;
  }

 protected:
  /// Default enumerator: one-point growth over a hereditary ambient class.
  virtual std::vector<StructurePtr> enumerate(std::size_t measure) const;
  /// Hereditary superset used by the default enumerator.
  virtual bool ambient(const FiniteStructure& s) const { return contains(s); }
  /// Candidate one-point extensions (relational default: every choice of new tuples).
  std::vector<StructurePtr> raw_one_point_extensions(const FiniteStructure& base) const;

 private:
  std::string name_;
  Signature signature_;
  mutable std::recursive_mutex cache_mutex_;
  mutable std::map<std::size_t, std::vector<StructurePtr>> cache_;
};

using ClassPtr = std::shared_ptr<const FraisseClass>;

// ---------------------------------------------------------------- registry

/// Built-ins: sets, graphs, linear_orders, boolean_algebras, groups_small, plus
/// the auxiliary classes forests, graphs_with_edge, cliques_or_edgeless,
/// graphs_le2, sets_le3.
ClassPtr make_class(const std::string& name);
std::vector<std::string> class_names();
/// User class: relational signature, forbidden induced substructures, optional size cap.
ClassPtr load_class_file(const std::string& path);
ClassPtr class_from_json(const Json& j);

// Builders for the built-in signatures, shared with the test suites.
Signature graph_signature();
Signature order_signature();
Signature set_signature();
Signature boolean_algebra_signature();
Signature group_signature();
FiniteStructure make_graph(std::size_t n, const std::vector<std::pair<int, int>>& edges);
FiniteStructure make_set(std::size_t n);
FiniteStructure make_chain(std::size_t n);  // 0 < 1 < ... < n-1
FiniteStructure make_boolean_algebra(std::size_t atoms);
FiniteStructure make_cyclic_group(std::size_t n);
/// Group from a multiplication table with identity 0.
FiniteStructure make_group(const std::vector<std::vector<int>>& table);
/// Named small groups: Z1..Z8, V4, S3, Z4xZ2, Z2^3, D4, Q8.
FiniteStructure make_named_group(const std::string& name);
std::vector<std::string> small_group_names();
/// Direct product of two groups.
FiniteStructure group_product(const FiniteStructure& a, const FiniteStructure& b);

/// Atoms of a Boolean algebra member and the atom mask of every element.
struct AtomView {
  std::vector<int> atoms;
  std::vector<unsigned> mask;  // per element
  std::vector<int> element_of_mask;
};
std::optional<AtomView> atom_view(const FiniteStructure& s);

// ---------------------------------------------------------------- amalgams

/// All amalgams of the span, deduplicated up to isomorphism over the span and
/// ordered by (measure of D, pointed label).
std::vector<Amalgam> amalgamate(const FraisseClass& cls, const Embedding& f, const Embedding& g);
/// The first amalgam in the strategy's preference order.
std::optional<Amalgam> preferred_amalgam(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                         const KeepApart& keep_apart = {});
/// Structural re-check of the commuting square and class membership.
bool valid_amalgam(const FraisseClass& cls, const Embedding& f, const Embedding& g, const Amalgam& am);
/// Relabels `d` so the image of `left` becomes the prefix 0..|B1|-1 in order.
Amalgam normalize_amalgam(StructurePtr d, const Embedding& left, const Embedding& right);
Json span_to_json(const Embedding& f, const Embedding& g);

// ---------------------------------------------------------------- axioms

struct AxiomResult {
  std::string axiom;
  Tri holds = Tri::yes;
  std::size_t cases = 0;
  Json witness;  // null when holds
};

AxiomResult check_hp(const FraisseClass& cls, std::size_t n);
AxiomResult check_jep(const FraisseClass& cls, std::size_t n);
AxiomResult check_ap(const FraisseClass& cls, std::size_t n);
Json axiom_to_json(const AxiomResult& r);

// ---------------------------------------------------------------- stages

struct LimitStage {
  std::size_t index = 0;
  StructurePtr structure;
  std::optional<Embedding> inclusion;  // previous stage -> this one
  Json extension_log = Json::array();
};

struct StageChain {
  ClassPtr cls;
  std::vector<LimitStage> stages;
  const LimitStage& last() const { return stages.back(); }
};

LimitStage initial_stage(const FraisseClass& cls);
/// Realizes every one-point extension over every substructure of measure <= bound.
LimitStage extend_stage(const FraisseClass& cls, const LimitStage& stage, std::size_t bound);
/// `bound` 0 means the default schedule: bound = stage index + 1.
StageChain build_chain(const ClassPtr& cls, std::size_t rounds, std::size_t bound = 0);
/// Chain of a single given structure.
StageChain single_stage_chain(const ClassPtr& cls, StructurePtr s);

struct CheckResult {
  bool holds = true;
  std::size_t cases = 0;
  Json witness;
};

CheckResult is_universal_upto(const StageChain& chain, std::size_t k);
/// Forth step: does the map dom -> img (into dst) extend to an embedding of
/// the structure generated by dom and x?
bool extends_one_point(const StructurePtr& src, const std::vector<int>& dom, const FiniteStructure& dst,
                       const std::vector<int>& img, int x);
/// Back-and-forth criterion: each partial isomorphism between substructures of
/// measure <= k of a stage, and each element of that stage, admit a forth step
/// into the next stage (into the same stage for a one-stage chain).
CheckResult is_ultrahomogeneous_upto(const StageChain& chain, std::size_t k);

Json chain_to_json(const StageChain& chain);

}  // namespace topgal
