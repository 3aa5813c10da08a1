#pragma once
// Strategy implementations shared between the class definitions and amalgam.cpp.

#include "topgal/fraisse.hpp"

namespace topgal::detail {

/// Identifications of new B2 elements with new B1 elements (no identification
/// first), then every choice of relation tuples mixing the two sides (all
/// absent first), filtered by class membership.
SearchStatus free_completion_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                      const AmalgamVisitor& visit, const KeepApart& keep_apart);

/// Interleavings of two linear orders over the common suborder.
SearchStatus shuffle_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                              const AmalgamVisitor& visit, const KeepApart& keep_apart);

/// Boolean algebras: subsets of the fibered product of atoms covering both
/// sides; the minimal cover comes first.
SearchStatus atom_product_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                   const AmalgamVisitor& visit, const KeepApart& keep_apart);

/// Boolean algebra on the given atom pairs, with the two induced embeddings.
Amalgam algebra_from_cover(const Embedding& f, const Embedding& g, const AtomView& v1, const AtomView& v2,
                           const std::vector<std::pair<int, int>>& cover);

/// Searches candidate groups of order <= cap for a commuting pair of embeddings.
SearchStatus group_identification_amalgams(const FraisseClass& cls, const Embedding& f, const Embedding& g,
                                           const AmalgamVisitor& visit, const KeepApart& keep_apart,
                                           std::size_t cap);

/// Maps an amalgam visitor through keep-apart filtering.
bool respects(const Amalgam& am, const KeepApart& keep_apart);

}  // namespace topgal::detail
