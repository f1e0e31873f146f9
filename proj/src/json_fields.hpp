#pragma once

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "akp/error.hpp"

namespace akp::detail {

/// Reads optional keys from one JSON object and rejects leftovers.
class Fields {
 public:
  Fields(const nlohmann::json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) throw InvalidArgument(where_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    if (it == doc_.end()) return;
    try {
      target = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidArgument(where_ + "." + key + " has the wrong type");
    }
  }

  const nlohmann::json* object(const char* key) {
    seen_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.contains(key)) throw InvalidArgument("unknown key " + where_ + "." + key);
    }
  }

 private:
  const nlohmann::json& doc_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

}  // namespace akp::detail
