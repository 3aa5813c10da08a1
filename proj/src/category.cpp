#include "topgal/category.hpp"

#include <algorithm>

namespace topgal {

const std::vector<Embedding>& FiniteCategory::hom(std::size_t i, std::size_t j) const {
  std::lock_guard lock(*mutex_);
  auto key = std::make_pair(i, j);
  auto it = hom_cache_.find(key);
  if (it == hom_cache_.end()) it = hom_cache_.emplace(key, enumerate_embeddings(objects.at(i), objects.at(j))).first;
  return it->second;
}

std::optional<std::size_t> FiniteCategory::find(const FiniteStructure& s) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i]->size() == s.size() && objects[i]->label() == s.label()) return i;
  return std::nullopt;
}

FiniteCategory class_slice(const ClassPtr& cls, std::size_t max_measure, bool truncated) {
  FiniteCategory cat;
  cat.name = cls->name() + "_upto_" + std::to_string(max_measure);
  cat.objects = cls->members_upto(max_measure);
  std::stable_sort(cat.objects.begin(), cat.objects.end(), [&](const StructurePtr& a, const StructurePtr& b) {
    return std::make_pair(cls->measure(*a), a->label()) < std::make_pair(cls->measure(*b), b->label());
  });
  cat.complete = truncated || (cls->max_measure() && *cls->max_measure() <= max_measure);
  cat.cls = cls;
  return cat;
}

std::vector<std::string> discrete_context_names() { return {"graphs_le2", "rigid", "sets_le3", "sets_le4", "v4"}; }

FiniteCategory discrete_context(const std::string& name) {
  if (name == "v4") {
    FiniteCategory cat;
    cat.name = name;
    for (const char* g : {"Z1", "Z2", "V4"}) cat.objects.push_back(share(make_named_group(g)));
    cat.cls = make_class("groups_small");
    return cat;
  }
  if (name == "sets_le3") return class_slice(make_class("sets"), 3, true);
  if (name == "sets_le4") return class_slice(make_class("sets"), 4, true);
  if (name == "graphs_le2") return class_slice(make_class("graphs"), 2, true);
  if (name == "rigid") {
    FiniteCategory cat;
    cat.name = name;
    cat.objects.push_back(share(make_set(1)));
    return cat;
  }
  throw Error("unknown context: " + name);
}

DiscreteReduction discrete_reduction(const FiniteCategory& cat) {
  if (!cat.complete) return {std::nullopt, "no maximal object: the category is an infinite class"};
  for (std::size_t c = 0; c < cat.size(); ++c) {
    bool ok = true;
    for (std::size_t e = 0; e < cat.size() && ok; ++e) {
      if (cat.hom(e, c).empty()) ok = false;
      for (const auto& f : cat.hom(c, e))
        if (!f.is_bijective()) ok = false;
    }
    if (ok) return {c, "every arrow out of the object is an isomorphism and every object maps into it"};
  }
  return {std::nullopt, "no object receives arrows from all objects with only isomorphisms out of it"};
}

}  // namespace topgal
