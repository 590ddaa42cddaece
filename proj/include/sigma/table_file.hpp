#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/io.hpp"
#include "sigma/sigma_core.hpp"

namespace sigma {

struct TableInstance {
  SigmaInstance<TableElement> instance;
  ElementSyntax<TableElement> syntax;
};

/// A hand-built finite instance:
///
///   {"name": "...", "carrier": ["0", "a", ...], "zero": "0",
///    "flavor": "weak", "strip_zeros": false,
///    "sums": [{"family": "{finite: [a, a]}", "value": "0"}, ...]}
///
/// Families missing from `sums` are not summable. With `strip_zeros`, zero
/// entries are removed before the lookup.
inline TableInstance table_instance(const nlohmann::json& doc) {
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("table is missing '") + key + "'");
    return doc.at(key);
  };
  try {
    const std::string name = doc.is_object() && doc.contains("name") ? doc.at("name").get<std::string>() : "table";
    const auto names = field("carrier").get<std::vector<std::string>>();
    if (names.empty()) throw InputError(name + ": empty carrier");
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (names[i] == names[j]) throw InputError(name + ": duplicate element '" + names[i] + "'");
      }
    }
    auto syntax = named_syntax(names);
    const TableElement zero = syntax.parse(field("zero").get<std::string>());
    Flavor declared = Flavor::weak;
    if (doc.contains("flavor")) {
      auto f = parse_flavor(doc.at("flavor").get<std::string>());
      if (!f) throw InputError(name + ": unknown flavor '" + doc.at("flavor").get<std::string>() + "'");
      declared = *f;
    }
    const bool strip = doc.contains("strip_zeros") && doc.at("strip_zeros").get<bool>();

    auto table = std::make_shared<std::map<Family<TableElement>, TableElement>>();
    for (const auto& entry : field("sums")) {
      auto fam = parse_family(entry.at("family").get<std::string>(), syntax);
      if (strip) fam = fam.without(zero);
      const TableElement value = syntax.parse(entry.at("value").get<std::string>());
      auto [it, fresh] = table->emplace(fam, value);
      if (!fresh && it->second != value) {
        throw InputError(name + ": conflicting sums for " + format_family(fam, syntax));
      }
    }
    std::vector<TableElement> elems;
    for (std::uint32_t i = 0; i < names.size(); ++i) elems.push_back(TableElement{i});
    auto rule = [table, strip, zero](const Family<TableElement>& f) -> SumResult<TableElement> {
      auto it = table->find(strip ? f.without(zero) : f);
      if (it == table->end()) return std::nullopt;
      return it->second;
    };
    return {SigmaInstance<TableElement>(name, Carrier<TableElement>::finite(std::move(elems)), zero, rule, declared),
            std::move(syntax)};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed table: ") + e.what());
  }
}

inline TableInstance read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open table file '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("table file '" + path + "' is not valid JSON: " + e.what());
  }
  return table_instance(doc);
}

}  // namespace sigma
