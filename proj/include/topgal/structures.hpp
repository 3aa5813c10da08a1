#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace topgal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive search would exceed a configured resource bound.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

using Tuple = std::vector<int>;

struct RelationSymbol {
  std::string name;
  std::vector<int> arity;  // sort indices
  bool operator==(const RelationSymbol&) const = default;
};

struct FunctionSymbol {
  std::string name;
  std::vector<int> inputs;  // sort indices
  int output = 0;
  bool operator==(const FunctionSymbol&) const = default;
};

struct ConstantSymbol {
  std::string name;
  int sort = 0;
  bool operator==(const ConstantSymbol&) const = default;
};

/// Multi-sorted first-order signature. Symbol names are unique across kinds.
class Signature {
 public:
  Signature() = default;

  /// One sort named "element" plus the given relations of the given arities.
  static Signature single_sorted(std::vector<std::pair<std::string, int>> relations = {});

  int add_sort(const std::string& name);
  void add_relation(const std::string& name, std::vector<int> arity);
  void add_function(const std::string& name, std::vector<int> inputs, int output);
  void add_constant(const std::string& name, int sort);

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<RelationSymbol>& relations() const { return relations_; }
  const std::vector<FunctionSymbol>& functions() const { return functions_; }
  const std::vector<ConstantSymbol>& constants() const { return constants_; }

  std::optional<int> sort_index(const std::string& name) const;
  std::optional<int> relation_index(const std::string& name) const;
  std::optional<int> function_index(const std::string& name) const;
  std::optional<int> constant_index(const std::string& name) const;

  bool is_relational() const { return functions_.empty() && constants_.empty(); }

  /// Stable textual form; equal iff the signatures are equal.
  std::string fingerprint() const;

  bool operator==(const Signature&) const = default;

 private:
  void check_fresh(const std::string& name) const;
  void check_sort(int s) const;

  std::vector<std::string> sorts_;
  std::vector<RelationSymbol> relations_;
  std::vector<FunctionSymbol> functions_;
  std::vector<ConstantSymbol> constants_;
};

/// Isomorphism-invariant code of a (possibly pointed) finite structure.
struct CanonicalLabel {
  std::string signature;
  std::vector<int> code;

  auto operator<=>(const CanonicalLabel&) const = default;
  bool operator==(const CanonicalLabel&) const = default;

  /// Short hexadecimal digest, for reports.
  std::string digest() const;
};

/// A finite model of a signature. Elements are 0..size()-1, each with a sort.
/// Function tables are dense over the global element index.
class FiniteStructure {
 public:
  FiniteStructure() = default;
  FiniteStructure(Signature signature, std::vector<int> element_sorts);
  /// Single-sorted convenience: `size` elements of sort 0.
  FiniteStructure(Signature signature, std::size_t size);

  const Signature& signature() const { return signature_; }
  std::size_t size() const { return sorts_.size(); }
  int sort_of(int e) const { return sorts_[static_cast<std::size_t>(e)]; }
  const std::vector<int>& element_sorts() const { return sorts_; }
  std::size_t count_of_sort(int s) const;

  void add_tuple(int relation, Tuple t);
  bool holds(int relation, std::span<const int> t) const;
  const std::set<Tuple>& tuples(int relation) const { return relations_[static_cast<std::size_t>(relation)]; }

  void set_value(int function, std::span<const int> args, int value);
  /// -1 if the table has no entry (ill-sorted or not yet filled).
  int apply(int function, std::span<const int> args) const;
  int apply(int function, std::initializer_list<int> args) const {
    return apply(function, std::span<const int>(args.begin(), args.size()));
  }

  void set_constant(int constant, int e);
  int constant(int c) const { return constants_[static_cast<std::size_t>(c)]; }

  /// Optional element names, used only for serialization and reports.
  void set_names(std::vector<std::string> names);
  std::string name_of(int e) const;
  bool has_names() const { return !names_.empty(); }

  /// Throws Error if a function table is not total, a constant is unset, or a
  /// tuple references elements of the wrong sort.
  void validate() const;

  /// All well-sorted argument tuples of function `f`, in lexicographic order.
  std::vector<Tuple> argument_tuples(int f) const;

  /// Memoized canonical_form(*this).
  const CanonicalLabel& label() const;

  bool operator==(const FiniteStructure& o) const;

 private:
  std::size_t table_index(int function, std::span<const int> args) const;
  void invalidate() { cache_ = std::make_shared<LabelCache>(); }

  struct LabelCache {
    std::mutex mutex;
    std::optional<CanonicalLabel> value;
  };

  Signature signature_;
  std::vector<int> sorts_;
  std::vector<std::set<Tuple>> relations_;
  std::vector<std::vector<int>> functions_;
  std::vector<int> constants_;
  std::vector<std::string> names_;
  std::shared_ptr<LabelCache> cache_ = std::make_shared<LabelCache>();
};

using StructurePtr = std::shared_ptr<const FiniteStructure>;

inline StructurePtr share(FiniteStructure s) { return std::make_shared<const FiniteStructure>(std::move(s)); }

/// An injective, sort-preserving map that preserves and reflects relations and
/// commutes with functions and constants.
struct Embedding {
  StructurePtr source;
  StructurePtr target;
  std::vector<int> map;

  int operator()(int e) const { return map[static_cast<std::size_t>(e)]; }
  std::vector<int> image() const;  // sorted
  bool is_bijective() const { return source->size() == target->size(); }
};

/// Re-checks all Embedding invariants structurally.
bool is_embedding(const FiniteStructure& a, const FiniteStructure& b, std::span<const int> map);

Embedding identity_embedding(const StructurePtr& s);

/// g ∘ f. Requires target(f) == source(g).
Embedding compose(const Embedding& f, const Embedding& g);

/// Callback receives each complete map; return false to stop the search.
using EmbeddingVisitor = std::function<bool(const std::vector<int>&)>;

/// Backtracking search over embeddings a → b extending `partial` (entries -1 are
/// free). Visit order is not canonical.
void visit_embeddings(const FiniteStructure& a, const FiniteStructure& b, const EmbeddingVisitor& visit,
                      std::span<const int> partial = {});

/// Hom(a, b): complete, duplicate-free, lexicographic by map.
std::vector<Embedding> enumerate_embeddings(const StructurePtr& a, const StructurePtr& b);
std::size_t count_embeddings(const FiniteStructure& a, const FiniteStructure& b);
bool embeds(const FiniteStructure& a, const FiniteStructure& b);

/// Closure of `seed` under all functions and constants, with the steps taken.
struct Closure {
  std::vector<int> elements;  // in generation order: seed first (deduplicated), then new
  /// For every generated (non-seed) element: (function, argument positions in `elements`).
  std::vector<std::pair<int, std::vector<int>>> steps;
  std::vector<int> sorted() const;
};
Closure close_under_functions(const FiniteStructure& b, std::span<const int> seed);

struct Substructure {
  StructurePtr structure;
  Embedding inclusion;  // into the ambient structure
};

/// Smallest substructure containing `seed`; elements keep their ambient order.
Substructure generated_substructure(const StructurePtr& b, std::span<const int> seed);

/// Induced substructure on a set closed under the functions (not checked).
FiniteStructure induced(const FiniteStructure& b, std::span<const int> elements);

/// Rename elements: element e of `s` becomes perm[e].
FiniteStructure relabel(const FiniteStructure& s, std::span<const int> perm);

/// True iff the assignment dom[i] ↦ img[i] extends to an isomorphism between
/// the substructures generated by `dom` in `a` and by `img` in `b`.
bool extends_to_isomorphism(const FiniteStructure& a, std::span<const int> dom, const FiniteStructure& b,
                            std::span<const int> img);

/// Canonical label; equal iff the structures are isomorphic.
CanonicalLabel canonical_form(const FiniteStructure& s);
/// Label of the structure with the listed elements named in order (points may repeat).
CanonicalLabel canonical_form_pointed(const FiniteStructure& s, std::span<const int> points);
/// A labeling (old index → new index) realizing canonical_form_pointed.
std::vector<int> canonical_labeling(const FiniteStructure& s, std::span<const int> points = {});

/// Brute-force isomorphism test over all sort-preserving bijections. Test oracle only.
bool brute_force_isomorphic(const FiniteStructure& a, const FiniteStructure& b);

}  // namespace topgal
