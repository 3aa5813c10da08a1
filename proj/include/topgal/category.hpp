#pragma once
// Finite categories of structures and embeddings: class slices and the
// small discrete contexts used by the Galois and imaginaries checks.

#include <map>
#include <mutex>
#include <optional>

#include "topgal/fraisse.hpp"

namespace topgal {

struct FiniteCategory {
  std::string name;
  std::vector<StructurePtr> objects;  // one per isomorphism type, ordered by (measure, label)
  /// True when the objects are the whole category; false for a finite slice
  /// of an infinite class.
  bool complete = true;
  ClassPtr cls;  // the class the objects come from, if any

  std::size_t size() const { return objects.size(); }
  /// All arrows objects[i] → objects[j], in sorted order.
  const std::vector<Embedding>& hom(std::size_t i, std::size_t j) const;
  /// Index of the object isomorphic to s, if any.
  std::optional<std::size_t> find(const FiniteStructure& s) const;

 private:
  mutable std::map<std::pair<std::size_t, std::size_t>, std::vector<Embedding>> hom_cache_;
  mutable std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

/// Members of measure ≤ max_measure. `truncated` makes the slice the whole
/// category (objects beyond the bound do not exist).
FiniteCategory class_slice(const ClassPtr& cls, std::size_t max_measure, bool truncated);

/// Named finite contexts: "v4" (groups 1, Z2, V4), "sets_le3", "sets_le4",
/// "graphs_le2", "rigid" (a single one-point object with only its identity).
FiniteCategory discrete_context(const std::string& name);
std::vector<std::string> discrete_context_names();

struct DiscreteReduction {
  std::optional<std::size_t> object;  // index of c
  std::string reason;
};
/// An object c such that every arrow out of c is an isomorphism and every
/// object has an arrow into c.
DiscreteReduction discrete_reduction(const FiniteCategory& cat);

}  // namespace topgal
