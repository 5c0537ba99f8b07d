#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace keeper {

// A value a field expression can resolve to: a scalar string, a list of
// strings, or a map from keys to further values.
class Value {
public:
  using List = std::vector<std::string>;
  using Map = std::map<std::string, Value>;

  Value() : data_(std::string()) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(List items) : data_(std::move(items)) {}
  Value(Map entries) : data_(std::move(entries)) {}

  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_list() const { return std::holds_alternative<List>(data_); }
  bool is_map() const { return std::holds_alternative<Map>(data_); }

  const std::string& as_string() const { return std::get<std::string>(data_); }
  const List& as_list() const { return std::get<List>(data_); }
  const Map& as_map() const { return std::get<Map>(data_); }

  bool operator==(const Value&) const = default;

private:
  std::variant<std::string, List, Map> data_;
};

// Named roots visible to a template, e.g. "matrix" and "keywords".
class Context {
public:
  Context() = default;
  explicit Context(Value::Map bindings) : bindings_(std::move(bindings)) {}

  void bind(std::string name, Value value) { bindings_[std::move(name)] = std::move(value); }

  // Returns nullptr when the root is not bound.
  const Value* find(const std::string& name) const {
    auto it = bindings_.find(name);
    return it == bindings_.end() ? nullptr : &it->second;
  }

private:
  Value::Map bindings_;
};

}  // namespace keeper
