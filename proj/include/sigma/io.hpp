#pragma once

#include <cctype>
#include <charconv>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/instances.hpp"

namespace sigma {

/// How the elements of one instance are written in family literals.
template <class E>
struct ElementSyntax {
  std::function<std::string(const E&)> format;
  std::function<E(std::string_view)> parse;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Splits on commas that are not nested inside brackets or braces.
inline std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[' || c == '{' || c == '(') ++depth;
    if (c == ']' || c == '}' || c == ')') {
      if (--depth < 0) throw ParseError("unbalanced brackets in '" + std::string(s) + "'");
    }
    if (c == ',' && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw ParseError("unbalanced brackets in '" + std::string(s) + "'");
  parts.push_back(trim(s.substr(start)));
  if (parts.size() == 1 && parts.front().empty()) parts.clear();
  return parts;
}

inline std::string_view strip_delimiters(std::string_view s, char open, char close) {
  s = trim(s);
  if (s.size() < 2 || s.front() != open || s.back() != close) {
    throw ParseError(std::string("expected ") + open + "..." + close + " in '" + std::string(s) + "'");
  }
  return s.substr(1, s.size() - 2);
}

inline std::uint64_t parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("not a natural number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline ElementSyntax<Pm> pm_syntax() {
  return {[](const Pm& x) -> std::string {
            switch (x) {
              case Pm::zero: return "0";
              case Pm::plus: return "+";
              case Pm::minus: return "-";
            }
            return "?";
          },
          [](std::string_view s) {
            s = detail::trim(s);
            if (s == "0") return Pm::zero;
            if (s == "+") return Pm::plus;
            if (s == "-") return Pm::minus;
            throw ParseError("not an element of {0,+,-}: '" + std::string(s) + "'");
          }};
}

/// Subsets as `[a,b]`; `[]` is the empty set.
inline ElementSyntax<ParitySet> parity_syntax() {
  return {[](const ParitySet& x) {
            std::string out = "[";
            bool first = true;
            for (const auto& m : x.members) {
              out += (first ? "" : ",") + m;
              first = false;
            }
            return out + "]";
          },
          [](std::string_view s) {
            ParitySet out;
            for (auto part : detail::split_top_level(detail::strip_delimiters(s, '[', ']'))) {
              if (part.empty()) throw ParseError("empty point name in '" + std::string(s) + "'");
              out.members.emplace(part);
            }
            return out;
          }};
}

inline ElementSyntax<ExactReal> real_syntax() {
  return {[](const ExactReal& x) { return x.str(); },
          [](std::string_view s) { return ExactReal::parse(detail::trim(s)); }};
}

inline ElementSyntax<ExtNat> ext_nat_syntax() {
  return {[](const ExtNat& x) { return x.infinite ? std::string("inf") : std::to_string(x.value); },
          [](std::string_view s) {
            s = detail::trim(s);
            if (s == "inf") return ExtNat::inf();
            return ExtNat{detail::parse_u64(s)};
          }};
}

/// Elements of Z/n written as their residues.
inline ElementSyntax<TableElement> residue_syntax(std::uint32_t n) {
  return {[](const TableElement& x) { return std::to_string(x.index); },
          [n](std::string_view s) {
            const auto v = detail::parse_u64(s);
            if (v >= n) throw InputError("residue out of range: " + std::string(detail::trim(s)));
            return TableElement{static_cast<std::uint32_t>(v)};
          }};
}

/// Elements of a table instance written by name.
inline ElementSyntax<TableElement> named_syntax(std::vector<std::string> names) {
  auto shared = std::make_shared<const std::vector<std::string>>(std::move(names));
  return {[shared](const TableElement& x) {
            return x.index < shared->size() ? (*shared)[x.index] : "#" + std::to_string(x.index);
          },
          [shared](std::string_view s) {
            s = detail::trim(s);
            for (std::size_t i = 0; i < shared->size(); ++i) {
              if ((*shared)[i] == s) return TableElement{static_cast<std::uint32_t>(i)};
            }
            throw ParseError("unknown element '" + std::string(s) + "'");
          }};
}

/// `{finite: [e, ...], omega: [e, ...]}`; either key may be omitted.
template <class E>
Family<E> parse_family(std::string_view text, const ElementSyntax<E>& syntax) {
  Family<E> out;
  bool seen_finite = false, seen_omega = false;
  for (auto field : detail::split_top_level(detail::strip_delimiters(text, '{', '}'))) {
    const auto colon = field.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'finite:' or 'omega:' in '" + std::string(field) + "'");
    const auto key = detail::trim(field.substr(0, colon));
    const bool omega = key == "omega";
    if (!omega && key != "finite") throw ParseError("unknown family key '" + std::string(key) + "'");
    bool& seen = omega ? seen_omega : seen_finite;
    if (seen) throw ParseError("duplicate family key '" + std::string(key) + "'");
    seen = true;
    for (auto item : detail::split_top_level(detail::strip_delimiters(field.substr(colon + 1), '[', ']'))) {
      if (item.empty()) throw ParseError("empty element in '" + std::string(text) + "'");
      out.add(syntax.parse(item), omega ? kOmega : Multiplicity(1));
    }
  }
  return out;
}

template <class E>
std::string format_family(const Family<E>& f, const ElementSyntax<E>& syntax) {
  std::string out = "{finite: [";
  bool first = true;
  for (const auto& [e, c] : f.finite_part()) {
    for (std::uint64_t i = 0; i < c; ++i) {
      out += (first ? "" : ", ") + syntax.format(e);
      first = false;
    }
  }
  out += "], omega: [";
  first = true;
  for (const auto& e : f.omega_part()) {
    out += (first ? "" : ", ") + syntax.format(e);
    first = false;
  }
  return out + "]}";
}

}  // namespace sigma
