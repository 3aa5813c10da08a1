#pragma once
// Finite permutation groups, subgroups and the coset calculus of transitive G-sets.

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "topgal/structure_json.hpp"

namespace topgal {

/// perm[x] is the image of point x.
using Permutation = std::vector<int>;

Permutation identity_permutation(std::size_t n);
/// p∘q, q applied first.
Permutation compose_permutations(const Permutation& p, const Permutation& q);
Permutation inverse_permutation(const Permutation& p);
/// Cycle notation on points 1..n, e.g. "(1 2)(3 4)"; "()" is the identity.
Permutation permutation_from_cycles(std::size_t n, const std::string& cycles);
std::string cycles_to_string(const Permutation& p);

/// Fully materialized group. Elements are sorted lexicographically, so the
/// identity has index 0; group operations work on element indices.
class PermutationGroup {
 public:
  PermutationGroup(std::size_t degree, const std::vector<Permutation>& generators, StructurePtr acts_on = nullptr);

  std::size_t degree() const { return degree_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<Permutation>& generators() const { return generators_; }
  const std::vector<Permutation>& elements() const { return elements_; }
  const Permutation& element(int i) const { return elements_[static_cast<std::size_t>(i)]; }
  /// The structure the group acts on, when built as an automorphism group.
  const StructurePtr& structure() const { return structure_; }

  int index_of(const Permutation& p) const;  // -1 when absent
  int multiply(int a, int b) const;          // a∘b
  int inverse(int a) const { return inverses_[static_cast<std::size_t>(a)]; }
  static constexpr int identity() { return 0; }

 private:
  std::size_t degree_;
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
  std::vector<int> inverses_;
  std::map<Permutation, int> index_;
  StructurePtr structure_;
};

using GroupPtr = std::shared_ptr<const PermutationGroup>;

GroupPtr make_permutation_group(std::size_t degree, const std::vector<Permutation>& generators,
                                StructurePtr acts_on = nullptr);
GroupPtr symmetric_group(std::size_t n);
/// Every automorphism of s (backtracking over the diagram).
GroupPtr automorphisms(const StructurePtr& s);

struct Subgroup {
  GroupPtr parent;
  std::vector<int> elements;                   // sorted element indices
  std::optional<std::vector<int>> stabilized;  // set for pointwise stabilizers

  std::size_t order() const { return elements.size(); }
  bool contains(int g) const;
  bool operator==(const Subgroup& o) const { return parent == o.parent && elements == o.elements; }
};

Subgroup whole_group(const GroupPtr& g);
Subgroup trivial_subgroup(const GroupPtr& g);
/// Elements fixing every entry of the tuple. Throws Error for points outside the carrier.
Subgroup pointwise_stabilizer(const GroupPtr& g, const std::vector<int>& tuple);
/// Throws Error unless the list is a subgroup of g.
Subgroup subgroup_from_elements(const GroupPtr& g, const std::vector<Permutation>& elems);
Subgroup generated_subgroup(const GroupPtr& g, const std::vector<Permutation>& gens);
/// a U a⁻¹
Subgroup conjugate(const Subgroup& u, int a);
Subgroup intersect(const Subgroup& u, const Subgroup& v);
bool is_subset(const Subgroup& u, const Subgroup& v);

struct Orbit {
  std::vector<int> representative;  // least member
  std::vector<std::vector<int>> members;
};
/// Orbits on k-tuples of points (all tuples, or only those with distinct entries).
std::vector<Orbit> orbits(const GroupPtr& g, std::size_t k, bool distinct = false);

struct BaseCheck {
  bool holds = true;
  std::string failure;  // "intersection" or "conjugation"
  Json witness;
};
BaseCheck check_algebraic_base(const GroupPtr& g, const std::vector<Subgroup>& base);

/// The G-map G/U → G/V sending gU to g·a·V; valid iff a⁻¹Ua ⊆ V.
struct CosetArrow {
  Subgroup source;
  Subgroup target;
  int representative;  // least element of aV
};
std::vector<CosetArrow> hom_cosets(const Subgroup& u, const Subgroup& v);
bool is_valid_arrow(const CosetArrow& arr);
bool is_iso_arrow(const CosetArrow& arr);
/// first: G/U → G/V, then second: G/V → G/W.
CosetArrow compose_arrows(const CosetArrow& first, const CosetArrow& second);
bool are_conjugate(const Subgroup& u, const Subgroup& v);
bool transitive_gsets_isomorphic(const Subgroup& u, const Subgroup& v);
/// Least element of the left coset a·V.
int coset_representative(const Subgroup& v, int a);

struct DoubleCosets {
  std::vector<int> representatives;  // least element of each HgH
  std::vector<std::vector<int>> cosets;
  std::size_t count() const { return cosets.size(); }
};
DoubleCosets double_cosets(const Subgroup& h);
/// Orbits of U acting on the left cosets G/V.
std::size_t orbits_on_cosets(const Subgroup& u, const Subgroup& v);

/// All subgroups, ordered by (order, elements). Throws ResourceLimit above max_order.
std::vector<Subgroup> all_subgroups(const GroupPtr& g, std::size_t max_order = 200);

struct CompletenessResult {
  bool holds = false;
  std::size_t families = 0;   // compatible coset families found
  std::size_t realized = 0;   // families of the form (gU)_U
  std::size_t subgroups = 0;
};
/// Compatible families over all subgroups: for U, V and b with b⁻¹Ub ⊆ V,
/// a_U·bV = a_{bVb⁻¹}·bV. Complete iff every family is (gU)_U for a unique g.
CompletenessResult is_complete_discrete(const GroupPtr& g);

Json element_to_json(const PermutationGroup& g, int element);
Json subgroup_to_json(const Subgroup& u);
Json arrow_to_json(const CosetArrow& arr);

}  // namespace topgal
