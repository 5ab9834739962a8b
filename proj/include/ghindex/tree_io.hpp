#pragma once

// JSON and Graphviz DOT views of a scaled tree.
//
// JSON schema:
//   { "n": int, "s": int, "scheme": "bubble"|"ring", "max_bits": int,
//     "nodes": [ { "id": int, "kind": "internal"|"leaf", "axis": int|null,
//                  "depth": int, "children": [int,int]|null,
//                  "points": [ids]|null, "status": "empty"|"filled"|... } ] }
//
// "points" lists the bucket of a leaf in curve order. Internal nodes carry
// the status of their whole subtree, which always exceeds the capacity.

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghindex/tree.hpp"

namespace ghindex {

struct TreeDocument {
  struct Node {
    std::uint64_t id = 0;
    bool leaf = true;
    std::optional<unsigned> axis;
    unsigned depth = 0;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> children;
    std::optional<std::vector<std::uint64_t>> points;
    std::string status;

    friend bool operator==(const Node&, const Node&) = default;
  };

  unsigned n = 0;
  std::size_t s = 1;
  Scheme scheme = Scheme::Ring;
  unsigned max_bits = kDefaultMaxBits;
  std::vector<Node> nodes;

  friend bool operator==(const TreeDocument&, const TreeDocument&) = default;
};

inline TreeDocument to_document(const ScaledTree& tree) {
  TreeDocument doc{tree.dimension(), tree.capacity(), tree.scheme(), tree.max_bits(), {}};
  const auto nodes = tree.nodes();
  doc.nodes.reserve(nodes.size());
  for (std::uint32_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    TreeDocument::Node out;
    out.id = id;
    out.leaf = node.is_leaf();
    out.depth = node.depth;
    out.status = std::string(to_string(tree.status(node)));
    if (node.is_leaf()) {
      const auto ids = tree.points(node);
      out.points.emplace(ids.begin(), ids.end());
    } else {
      out.axis = static_cast<unsigned>(node.axis);
      out.children.emplace(node.first_child(id), node.second_child);
    }
    doc.nodes.push_back(std::move(out));
  }
  return doc;
}

/// Streams the JSON form. Output is compact and byte-stable.
inline void write_tree_json(std::ostream& out, const ScaledTree& tree) {
  out << "{\"n\":" << tree.dimension() << ",\"s\":" << tree.capacity() << ",\"scheme\":\""
      << to_string(tree.scheme()) << "\",\"max_bits\":" << tree.max_bits() << ",\"nodes\":[";
  const auto nodes = tree.nodes();
  for (std::uint32_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    if (id) out << ',';
    out << "{\"id\":" << id << ",\"kind\":\"" << (node.is_leaf() ? "leaf" : "internal") << "\",\"axis\":";
    if (node.is_leaf()) {
      out << "null";
    } else {
      out << node.axis;
    }
    out << ",\"depth\":" << node.depth << ",\"children\":";
    if (node.is_leaf()) {
      out << "null,\"points\":[";
      bool first = true;
      for (auto pid : tree.points(node)) {
        if (!first) out << ',';
        out << pid;
        first = false;
      }
      out << ']';
    } else {
      out << '[' << node.first_child(id) << ',' << node.second_child << "],\"points\":null";
    }
    out << ",\"status\":\"" << to_string(tree.status(node)) << "\"}";
  }
  out << "]}\n";
}

inline std::string tree_json(const ScaledTree& tree) {
  std::ostringstream out;
  write_tree_json(out, tree);
  return out.str();
}

inline void write_tree_dot(std::ostream& out, const ScaledTree& tree) {
  out << "digraph gray_hilbert_tree {\n  node [shape=box, fontname=\"monospace\"];\n";
  const auto nodes = tree.nodes();
  for (std::uint32_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    out << "  n" << id << " [label=\"";
    if (node.is_leaf()) {
      out << "leaf";
    } else {
      out << "axis " << node.axis;
    }
    out << "\\ndepth " << node.depth << "\\nsize " << node.size() << "\\n" << to_string(tree.status(node))
        << "\"];\n";
  }
  for (std::uint32_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    if (node.is_leaf()) continue;
    out << "  n" << id << " -> n" << node.first_child(id) << ";\n";
    out << "  n" << id << " -> n" << node.second_child << ";\n";
  }
  out << "}\n";
}

inline TreeDocument tree_from_json(const nlohmann::json& j) {
  TreeDocument doc;
  doc.n = j.at("n").get<unsigned>();
  doc.s = j.at("s").get<std::size_t>();
  doc.scheme = parse_scheme(j.at("scheme").get<std::string>());
  doc.max_bits = j.value("max_bits", kDefaultMaxBits);
  for (const auto& jn : j.at("nodes")) {
    TreeDocument::Node node;
    node.id = jn.at("id").get<std::uint64_t>();
    const auto kind = jn.at("kind").get<std::string>();
    if (kind != "leaf" && kind != "internal") throw std::invalid_argument("bad node kind '" + kind + "'");
    node.leaf = kind == "leaf";
    node.depth = jn.at("depth").get<unsigned>();
    node.status = jn.at("status").get<std::string>();
    if (!jn.at("axis").is_null()) node.axis = jn.at("axis").get<unsigned>();
    if (!jn.at("children").is_null()) {
      const auto& c = jn.at("children");
      node.children.emplace(c.at(0).get<std::uint64_t>(), c.at(1).get<std::uint64_t>());
    }
    if (!jn.at("points").is_null()) node.points = jn.at("points").get<std::vector<std::uint64_t>>();
    doc.nodes.push_back(std::move(node));
  }
  return doc;
}

inline TreeDocument parse_tree_json(std::string_view text) {
  return tree_from_json(nlohmann::json::parse(text));
}

/// Leaf tallies recomputed from an exported document alone.
inline LeafCounts leaf_counts(const TreeDocument& doc) {
  LeafCounts counts;
  for (const auto& node : doc.nodes) {
    if (!node.leaf) continue;
    const std::size_t size = node.points ? node.points->size() : 0;
    counts.total += 1;
    counts.non_empty += size > 0;
    counts.overfilled += size > doc.s;
  }
  return counts;
}

}  // namespace ghindex
