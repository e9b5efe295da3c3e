#pragma once

// Graphviz rendering of fault trees, optionally highlighting the elements
// that are failed under a status vector.

#include <optional>
#include <sstream>
#include <string>

#include "bfl/fault_tree.hpp"

namespace bfl {

namespace detail {
inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}
}  // namespace detail

/// Output order is fixed: gates in definition order, then basic events in
/// canonical order, then edges gate by gate.
inline std::string fault_tree_to_dot(const FaultTree& ft,
                                     const std::optional<StatusVector>& b = std::nullopt) {
  if (b) check_vector(ft, *b);
  std::ostringstream os;
  os << "digraph fault_tree {\n";
  os << "  rankdir=TB;\n";
  auto attrs = [&](const std::string& name) {
    if (b && eval_structure(ft, *b, name)) return std::string(", style=filled, fillcolor=red");
    return std::string();
  };
  for (const auto& g : ft.gates()) {
    const auto& d = ft.element(g);
    os << "  \"" << detail::dot_escape(g) << "\" [shape=box, label=\"" << detail::dot_escape(g)
       << "\\n" << gate_label(d) << "\"" << (g == ft.top() ? ", peripheries=2" : "")
       << attrs(g) << "];\n";
  }
  for (const auto& e : ft.basic_events())
    os << "  \"" << detail::dot_escape(e) << "\" [shape=circle" << attrs(e) << "];\n";
  for (const auto& g : ft.gates())
    for (const auto& c : ft.element(g).children)
      os << "  \"" << detail::dot_escape(g) << "\" -> \"" << detail::dot_escape(c) << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace bfl
