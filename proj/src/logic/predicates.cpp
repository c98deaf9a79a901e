#include "softhard/logic/predicates.hpp"

#include <fstream>

#include "softhard/common/error.hpp"

namespace softhard::logic {

PredicateRegistry::PredicateRegistry() {
  add("ODD", [](std::int64_t, std::int64_t i) { return i % 2 != 0; });
}

void PredicateRegistry::add(const std::string& name, PredicateFn fn) {
  if (name.empty()) throw PreconditionError("empty predicate name");
  if (!fn) throw PreconditionError("null predicate " + name);
  table_[name] = std::move(fn);
}

bool PredicateRegistry::contains(std::string_view name) const {
  return table_.find(name) != table_.end();
}

bool PredicateRegistry::evaluate(std::string_view name, std::int64_t n, std::int64_t i) const {
  auto it = table_.find(name);
  if (it == table_.end()) throw PreconditionError("unknown predicate " + std::string(name));
  return it->second(n, i);
}

std::vector<std::string> PredicateRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, fn] : table_) out.push_back(name);
  return out;
}

void PredicateRegistry::load_json(const nlohmann::json& doc) {
  auto add_one = [this](const nlohmann::json& entry) {
    std::map<std::int64_t, std::vector<bool>> bits;
    for (const auto& [key, row] : entry.at("table").items()) {
      std::vector<bool> values;
      for (const auto& b : row) {
        values.push_back(b.is_boolean() ? b.get<bool>() : b.get<int>() != 0);
      }
      std::int64_t n = std::stoll(key);
      if (static_cast<std::int64_t>(values.size()) != n) {
        throw PreconditionError("predicate table for n=" + key + " has " +
                                std::to_string(values.size()) + " entries");
      }
      bits[n] = std::move(values);
    }
    add(entry.at("name").get<std::string>(), table_predicate(std::move(bits)));
  };
  if (doc.is_array()) {
    for (const auto& e : doc) add_one(e);
  } else if (doc.contains("predicates")) {
    for (const auto& e : doc.at("predicates")) add_one(e);
  } else {
    add_one(doc);
  }
}

void PredicateRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  load_json(nlohmann::json::parse(in));
}

PredicateFn table_predicate(std::map<std::int64_t, std::vector<bool>> bits) {
  return [bits = std::move(bits)](std::int64_t n, std::int64_t i) {
    auto it = bits.find(n);
    if (it == bits.end()) {
      throw PreconditionError("no predicate table for n=" + std::to_string(n));
    }
    if (i < 1 || i > n) throw PreconditionError("predicate position out of range");
    return static_cast<bool>(it->second[static_cast<std::size_t>(i - 1)]);
  };
}

}  // namespace softhard::logic
