#pragma once
// Stabilizer containment by splitting amalgams, unique factorization, and the
// bounded checks built on them: the Galois correspondence, strict monos,
// orbit/type counts, coherence, Galois objects.

#include "topgal/autgroup.hpp"
#include "topgal/category.hpp"

namespace topgal {

using ChainPtr = std::shared_ptr<const StageChain>;

/// An embedding of a class member into one stage of a chain.
struct ArrowToLimit {
  ChainPtr chain;
  std::size_t stage = 0;
  Embedding embedding;  // source → chain->stages[stage].structure

  const StructurePtr& source() const { return embedding.source; }
};

/// Validates that e lands in the given stage.
ArrowToLimit arrow_into(const ChainPtr& chain, std::size_t stage, Embedding e);
/// Composes with the stage inclusions up to `stage` (≥ the current one).
ArrowToLimit push_forward(const ArrowToLimit& a, std::size_t stage);

struct SplitResult {
  Tri splits = Tri::no;
  std::optional<Amalgam> witness;  // two copies of ⟨base, b⟩ over ⟨base⟩, b-copies distinct
};
/// Does b split over the substructure of s generated by `base`?
SplitResult splits_over(const FraisseClass& cls, const StructurePtr& s, const std::vector<int>& base, int b);

/// I_ξ ⊆ I_χ: no element of the image of χ splits over the image of ξ.
/// Both arrows are pushed to their common later stage first.
Tri stabilizer_subset(const ArrowToLimit& xi, const ArrowToLimit& chi);

struct Factorization {
  std::optional<Embedding> arrow;  // f with χ = ξ∘f
  std::size_t count = 0;           // number of such f in Hom(source χ, source ξ)
  bool unique() const { return count == 1; }
};
Factorization factor(const ArrowToLimit& chi, const ArrowToLimit& xi);

struct GaloisOptions {
  std::size_t size_bound = 3;  // class measure of sources
  std::size_t rounds = 3;      // stages built
  std::size_t max_arrows = 8;  // arrows kept per source
  std::size_t jobs = 1;
};
/// For all arrows ξ, χ from sources of measure ≤ size_bound into the last
/// stage: stabilizer_subset(ξ, χ) agrees with unique factorization of χ through ξ.
Json verify_galois_property(const ClassPtr& cls, const GaloisOptions& opt);

struct StrictMonoResult {
  bool holds = true;
  std::size_t cases = 0;
  std::size_t codomain_bound = 0;
  Json witness;  // {"e", "g"} when false
};
/// Strict monomorphism condition for f with every quantified object of
/// measure ≤ codomain_bound taken from the category's objects.
StrictMonoResult strict_mono_bounded(const FiniteCategory& cat, const Embedding& f, std::size_t codomain_bound);

/// Tuples t1, t2 of the same stage are conjugate: same equality pattern, the
/// entrywise map extends to an isomorphism of generated substructures, and it
/// admits forth and back steps for every point of the stage into the next
/// stage when there is one.
bool tuples_conjugate(const StageChain& chain, std::size_t stage, const std::vector<int>& t1,
                      const std::vector<int>& t2);
bool tuples_conjugate(const StructurePtr& stage, const FiniteStructure* next, const std::vector<int>& next_inclusion,
                      const std::vector<int>& t1, const std::vector<int>& t2);
bool conjugate_in_limit(const ArrowToLimit& e1, const ArrowToLimit& e2);

/// Isomorphism types of (structure generated by a k-tuple, the tuple), counted
/// over class members. Relational classes only.
std::size_t pointed_type_count(const FraisseClass& cls, std::size_t k);

struct OrbitCount {
  std::size_t k = 0;
  std::size_t orbits = 0;  // conjugacy classes of k-tuples of the orbit stage
  std::size_t types = 0;   // pointed isomorphism types
  bool equal() const { return orbits == types; }
};
/// Orbits of k-tuples of stage `stage` (lookahead: `next`, with its inclusion).
OrbitCount count_tuple_orbits(const FraisseClass& cls, const StructurePtr& stage, const FiniteStructure* next,
                              const std::vector<int>& next_inclusion, std::size_t k, std::size_t jobs = 1);
/// Orbit stage = second to last of a chain with `rounds` rounds.
OrbitCount orbit_type_correspondence(const ClassPtr& cls, std::size_t k, std::size_t rounds, std::size_t jobs = 1);

/// Orbit counts for k = 1..k_max, recomputed after refining the lookahead
/// stage; `stable` when both runs agree.
Json coherence_check(const ClassPtr& cls, std::size_t k_max, std::size_t rounds, std::size_t jobs = 1);
/// Discrete contexts: for each arrow χ into the reduction object, the number of
/// double cosets of I_χ against the orbits of I_χ on the arrows conjugate to χ.
Json coherence_check_discrete(const FiniteCategory& cat);

/// Arrows (c, f) from non-bottom sources of measure ≤ size_bound whose image
/// no automorphism of the limit moves off itself (bounded splitting test).
Json galois_objects(const ChainPtr& chain, std::size_t size_bound);
/// Discrete version: (c, f) into the reduction object u is Galois iff every
/// automorphism of u restricts along f to exactly one automorphism of c.
Json galois_objects_discrete(const FiniteCategory& cat);

Json arrow_to_limit_json(const ArrowToLimit& a);

}  // namespace topgal
