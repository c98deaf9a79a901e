#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace softhard::logic {

// A unary numerical predicate family: (n, i) -> bool with 1 <= i <= n.
using PredicateFn = std::function<bool(std::int64_t n, std::int64_t i)>;

// Name -> predicate family. ODD is always present.
class PredicateRegistry {
 public:
  PredicateRegistry();

  void add(const std::string& name, PredicateFn fn);
  bool contains(std::string_view name) const;
  bool evaluate(std::string_view name, std::int64_t n, std::int64_t i) const;
  std::vector<std::string> names() const;

  // Registers every entry of a document
  //   {"predicates": [{"name": "P", "table": {"3": [1,0,1], "4": [...]}}]}
  void load_json(const nlohmann::json& doc);
  void load_file(const std::string& path);

 private:
  std::map<std::string, PredicateFn, std::less<>> table_;
};

// Adapter for predicates given as explicit bit tables, one per length n.
// Evaluating at an n without a table throws PreconditionError.
PredicateFn table_predicate(std::map<std::int64_t, std::vector<bool>> bits);

}  // namespace softhard::logic
