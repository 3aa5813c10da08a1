#pragma once
// Functorial equivalence relations on representables Hom(c, -) over a finite
// category, their atomic closure, atomic completeness, realization of
// subgroups of Aut(u) from (c, R) pairs, and the Z/15 group counterexample.

#include <tuple>

#include "topgal/autgroup.hpp"
#include "topgal/category.hpp"

namespace topgal {

using CategoryPtr = std::shared_ptr<const FiniteCategory>;

/// For every object e of the category, an equivalence relation on Hom(c, e)
/// stored as class ids (first-occurrence numbering) indexed like cat->hom(c, e).
struct RepresentableRelation {
  CategoryPtr cat;
  std::size_t base = 0;
  std::vector<std::vector<int>> classes;

  bool related(std::size_t e, std::size_t f, std::size_t g) const { return classes[e][f] == classes[e][g]; }
  bool operator==(const RepresentableRelation& o) const { return base == o.base && classes == o.classes; }
  bool operator<(const RepresentableRelation& o) const {
    return std::tie(base, classes) < std::tie(o.base, o.classes);
  }
  /// R ⊆ o.
  bool refines(const RepresentableRelation& o) const;
  bool is_diagonal() const;
  bool is_total() const;
};

RepresentableRelation diagonal_relation(const CategoryPtr& cat, std::size_t c);
RepresentableRelation total_relation(const CategoryPtr& cat, std::size_t c);
/// Smallest functorial equivalence relation containing the given pairs
/// (object index, arrow index, arrow index).
RepresentableRelation functorial_closure(const CategoryPtr& cat, std::size_t c,
                                         const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& pairs);
/// Checks reflexivity, symmetry, transitivity and functoriality.
bool is_functorial(const RepresentableRelation& r);
/// (χ, ξ) related at e when some h: e → e' relates h∘χ and h∘ξ; iterated with
/// the equivalence and functorial closures until nothing changes.
RepresentableRelation jat_closure(const RepresentableRelation& r);
/// Least functorial equivalence relation containing (t∘h, t∘k) for every t out of e.
RepresentableRelation generated_relation(const CategoryPtr& cat, std::size_t c, std::size_t e, std::size_t h,
                                         std::size_t k);
/// Union of two relations on the same base, closed again.
RepresentableRelation join_relations(const RepresentableRelation& a, const RepresentableRelation& b);
/// Closed relations on Hom(c, -): the diagonal, the atomic closures of the
/// relations generated by single pairs, and all their joins. Throws
/// ResourceLimit beyond `cap` relations.
std::vector<RepresentableRelation> closed_relations(const CategoryPtr& cat, std::size_t c, std::size_t cap = 4096);

Json relation_to_json(const RepresentableRelation& r);

/// Does some m: d → c satisfy: f∘m = g∘m iff (f, g) ∈ jat_closure(R)_e, for
/// all f, g: c → e? Returns the first such m (object index, arrow index).
std::optional<std::pair<std::size_t, std::size_t>> find_atom_arrow(const RepresentableRelation& r);

struct AtomicCheck {
  bool holds = true;
  std::size_t relations = 0;  // closed relations examined
  Json witness;               // first (c, R) with no arrow m
  Json bases;                 // per base object: {"base", "holds", "witness"}
};
/// For every object c of measure ≤ size_bound and every relation generated by
/// a pair (h, k), closed: an arrow m as in find_atom_arrow must exist.
AtomicCheck atomic_complete_check(const CategoryPtr& cat, std::size_t size_bound);
/// The same restricted to one base object.
AtomicCheck atomic_complete_check_at(const CategoryPtr& cat, std::size_t c);

/// {z ∈ Aut(u) | (ξ, z∘ξ) ∈ R_u} for ξ: c → u, with u the reduction object.
Subgroup realized_subgroup(const GroupPtr& aut_u, const RepresentableRelation& r, std::size_t top, std::size_t xi);

struct Realization {
  std::size_t base = 0;
  std::size_t xi = 0;  // index in hom(base, top)
  RepresentableRelation relation;
};
/// Search over objects c, arrows ξ: c → u and closed relations R for a pair
/// realizing U. Requires a discrete reduction.
std::optional<Realization> subgroup_realization(const CategoryPtr& cat, const Subgroup& u);

struct ImageOfF {
  StructurePtr u;
  GroupPtr group;
  std::vector<Subgroup> image;    // distinct pointwise stabilizers of arrow images
  std::vector<Subgroup> missing;  // subgroups of Aut(u) not in the image
  std::size_t slice_classes = 0;  // isomorphism classes of arrows c → u
  Json collisions;                // pairs of non-isomorphic arrows with equal stabilizers
  bool injective() const { return collisions.empty(); }
};
/// u = the discrete reduction object.
ImageOfF image_of_F_subgroups(const FiniteCategory& cat);
/// Arrows from every object of the category into an outside structure u.
ImageOfF image_of_F_subgroups(const FiniteCategory& cat, const StructurePtr& u);
Json image_to_json(const ImageOfF& im);

/// x ↦ (a·x, b·x) from Z/15 into (Z/15)², and x ↦ a·x on Z/15.
struct Z15Instance {
  int h = 1, k = 2;
  std::pair<int, int> l{1, 3}, n{5, 1};
};
struct Z15Report {
  bool embeddings = false;         // h, k, l, n injective homomorphisms
  bool equalizer_trivial = false;  // {x | h(x) = k(x)} = {0}
  bool lm_equals_nm = false;       // l and n agree on the equalizer
  std::vector<std::pair<int, int>> solutions;  // (p, q) with 2^p·l(1) = 2^q·n(1)
  bool counterexample() const { return embeddings && equalizer_trivial && lm_equals_nm && solutions.empty(); }
};
Z15Report z15_counterexample_verify(const Z15Instance& inst = {});
Json z15_to_json(const Z15Report& r);

}  // namespace topgal
