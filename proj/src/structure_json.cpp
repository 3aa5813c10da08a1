#include "topgal/structure_json.hpp"

#include <algorithm>
#include <map>

namespace topgal {

namespace {

std::vector<std::string> sort_names(const Signature& sig, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int s : idx) out.push_back(sig.sorts()[static_cast<std::size_t>(s)]);
  return out;
}

std::vector<int> sort_indices(const Signature& sig, const Json& j) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    if (sig.sorts().size() != 1) throw Error("integer arity requires a single-sorted signature");
    return std::vector<int>(j.get<std::size_t>(), 0);
  }
  for (const auto& s : j) {
    auto i = sig.sort_index(s.get<std::string>());
    if (!i) throw Error("unknown sort '" + s.get<std::string>() + "'");
    out.push_back(*i);
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(',', start);
    out.push_back(s.substr(start, p == std::string::npos ? std::string::npos : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

Json signature_to_json(const Signature& sig) {
  Json j;
  j["sorts"] = sig.sorts();
  j["relations"] = Json::array();
  for (auto& r : sig.relations()) j["relations"].push_back({{"name", r.name}, {"arity", sort_names(sig, r.arity)}});
  j["functions"] = Json::array();
  for (auto& f : sig.functions())
    j["functions"].push_back({{"name", f.name},
                              {"inputs", sort_names(sig, f.inputs)},
                              {"output", sig.sorts()[static_cast<std::size_t>(f.output)]}});
  j["constants"] = Json::array();
  for (auto& c : sig.constants())
    j["constants"].push_back({{"name", c.name}, {"sort", sig.sorts()[static_cast<std::size_t>(c.sort)]}});
  return j;
}

Signature signature_from_json(const Json& j) {
  if (!j.is_object()) throw Error("signature must be a JSON object");
  Signature sig;
  if (j.contains("sorts"))
    for (const auto& s : j.at("sorts")) sig.add_sort(s.get<std::string>());
  else
    sig.add_sort("element");
  if (j.contains("relations"))
    for (const auto& r : j.at("relations")) sig.add_relation(r.at("name").get<std::string>(), sort_indices(sig, r.at("arity")));
  if (j.contains("functions"))
    for (const auto& f : j.at("functions")) {
      auto out = sig.sort_index(f.at("output").get<std::string>());
      if (!out) throw Error("unknown output sort for function " + f.at("name").get<std::string>());
      sig.add_function(f.at("name").get<std::string>(), sort_indices(sig, f.at("inputs")), *out);
    }
  if (j.contains("constants"))
    for (const auto& c : j.at("constants")) {
      auto s = sig.sort_index(c.at("sort").get<std::string>());
      if (!s) throw Error("unknown sort for constant " + c.at("name").get<std::string>());
      sig.add_constant(c.at("name").get<std::string>(), *s);
    }
  return sig;
}

Json structure_to_json(const FiniteStructure& s) {
  const auto& sig = s.signature();
  Json j;
  j["signature"] = signature_to_json(sig);
  Json carrier = Json::object();
  for (std::size_t k = 0; k < sig.sorts().size(); ++k) {
    Json names = Json::array();
    for (std::size_t e = 0; e < s.size(); ++e)
      if (s.sort_of(static_cast<int>(e)) == static_cast<int>(k)) names.push_back(s.name_of(static_cast<int>(e)));
    carrier[sig.sorts()[k]] = names;
  }
  j["carrier"] = carrier;
  Json rels = Json::object();
  for (std::size_t r = 0; r < sig.relations().size(); ++r) {
    std::vector<std::vector<std::string>> ts;
    for (const auto& t : s.tuples(static_cast<int>(r))) {
      std::vector<std::string> named;
      for (int e : t) named.push_back(s.name_of(e));
      ts.push_back(std::move(named));
    }
    std::sort(ts.begin(), ts.end());
    rels[sig.relations()[r].name] = ts;
  }
  j["relations"] = rels;
  Json funs = Json::object();
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    Json table = Json::object();
    for (const auto& args : s.argument_tuples(static_cast<int>(f))) {
      std::vector<std::string> named;
      for (int e : args) named.push_back(s.name_of(e));
      int v = s.apply(static_cast<int>(f), args);
      table[join(named)] = v < 0 ? Json(nullptr) : Json(s.name_of(v));
    }
    funs[sig.functions()[f].name] = table;
  }
  j["functions"] = funs;
  Json consts = Json::object();
  for (std::size_t c = 0; c < sig.constants().size(); ++c) {
    int e = s.constant(static_cast<int>(c));
    consts[sig.constants()[c].name] = e < 0 ? Json(nullptr) : Json(s.name_of(e));
  }
  j["constants"] = consts;
  return j;
}

FiniteStructure structure_from_json(const Json& j) {
  if (!j.is_object()) throw Error("structure must be a JSON object");
  Signature sig = j.contains("signature") ? signature_from_json(j.at("signature")) : Signature::single_sorted();
  std::vector<int> sorts;
  std::vector<std::string> names;
  const Json& carrier = j.at("carrier");
  auto add_names = [&](int sort, const Json& list) {
    if (list.is_number_integer()) {
      for (std::size_t i = 0, n = list.get<std::size_t>(); i < n; ++i) {
        sorts.push_back(sort);
        names.push_back(std::to_string(names.size()));
      }
      return;
    }
    for (const auto& nm : list) {
      sorts.push_back(sort);
      names.push_back(nm.is_string() ? nm.get<std::string>() : nm.dump());
    }
  };
  if (carrier.is_object()) {
    for (std::size_t k = 0; k < sig.sorts().size(); ++k)
      if (carrier.contains(sig.sorts()[k])) add_names(static_cast<int>(k), carrier.at(sig.sorts()[k]));
    for (auto it = carrier.begin(); it != carrier.end(); ++it)
      if (!sig.sort_index(it.key())) throw Error("carrier lists undeclared sort '" + it.key() + "'");
  } else {
    if (sig.sorts().size() != 1) throw Error("carrier list shorthand requires a single-sorted signature");
    add_names(0, carrier);
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < names.size(); ++i)
    if (!index.emplace(names[i], static_cast<int>(i)).second) throw Error("duplicate element name '" + names[i] + "'");
  auto lookup = [&](const Json& nm) {
    std::string key = nm.is_string() ? nm.get<std::string>() : nm.dump();
    auto it = index.find(key);
    if (it == index.end()) throw Error("unknown element '" + key + "'");
    return it->second;
  };
  FiniteStructure s(sig, std::move(sorts));
  if (j.contains("relations"))
    for (auto it = j.at("relations").begin(); it != j.at("relations").end(); ++it) {
      auto r = sig.relation_index(it.key());
      if (!r) throw Error("unknown relation '" + it.key() + "'");
      for (const auto& t : it.value()) {
        Tuple tup;
        for (const auto& nm : t) tup.push_back(lookup(nm));
        s.add_tuple(*r, std::move(tup));
      }
    }
  if (j.contains("functions"))
    for (auto it = j.at("functions").begin(); it != j.at("functions").end(); ++it) {
      auto f = sig.function_index(it.key());
      if (!f) throw Error("unknown function '" + it.key() + "'");
      for (auto e = it.value().begin(); e != it.value().end(); ++e) {
        Tuple args;
        for (const auto& nm : split(e.key())) args.push_back(lookup(Json(nm)));
        s.set_value(*f, args, lookup(e.value()));
      }
    }
  if (j.contains("constants"))
    for (auto it = j.at("constants").begin(); it != j.at("constants").end(); ++it) {
      auto c = sig.constant_index(it.key());
      if (!c) throw Error("unknown constant '" + it.key() + "'");
      s.set_constant(*c, lookup(it.value()));
    }
  s.set_names(std::move(names));
  s.validate();
  return s;
}

Json embedding_to_json(const Embedding& e) {
  Json map = Json::object();
  for (std::size_t i = 0; i < e.map.size(); ++i)
    map[e.source->name_of(static_cast<int>(i))] = e.target->name_of(e.map[i]);
  return {{"source", structure_to_json(*e.source)}, {"target_size", e.target->size()}, {"map", map}};
}

Json permutation_to_json(const FiniteStructure& s, const std::vector<int>& perm) {
  Json j = Json::object();
  const auto& sorts = s.signature().sorts();
  for (std::size_t k = 0; k < sorts.size(); ++k) {
    Json images = Json::array();
    for (std::size_t e = 0; e < s.size(); ++e)
      if (s.sort_of(static_cast<int>(e)) == static_cast<int>(k)) images.push_back(s.name_of(perm[e]));
    j[sorts[k]] = images;
  }
  return j;
}

}  // namespace topgal
