#pragma once

// Edge-colored hypergraph instances, colorings and the objective functions
// shared by every algorithm in the library.
//
// Indexing: nodes, colors and edges are 0-based in the C++ API. The text
// instance format and the CLI reports use 1-based node and color ids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecc {

using NodeId = std::size_t;
using ColorId = std::size_t;
using EdgeId = std::size_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + ", line " + std::to_string(line)), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct Edge {
  ColorId color = 0;
  double weight = 1.0;
  std::vector<NodeId> nodes;
};

// Immutable after construction. Every invariant (nonempty duplicate-free
// node lists, ids in range, finite nonnegative weights) is checked by the
// constructor.
class Hypergraph {
 public:
  Hypergraph(std::size_t node_count, std::size_t color_count, std::vector<Edge> edges)
      : node_count_(node_count), color_count_(color_count), edges_(std::move(edges)) {
    if (node_count_ == 0) throw Error("node count must be positive");
    if (color_count_ == 0) throw Error("color count must be positive");
    incident_.assign(node_count_, {});
    edges_of_color_.assign(color_count_, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const Edge& edge = edges_[e];
      const std::string where = "edge " + std::to_string(e);
      if (edge.nodes.empty()) throw Error(where + ": empty edge");
      if (edge.color >= color_count_) throw Error(where + ": color out of range");
      if (!std::isfinite(edge.weight) || edge.weight < 0.0)
        throw Error(where + ": weight must be finite and nonnegative");
      std::vector<NodeId> sorted = edge.nodes;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(where + ": duplicate node");
      if (sorted.back() >= node_count_) throw Error(where + ": node out of range");
      for (NodeId v : edge.nodes) incident_[v].push_back(e);
      edges_of_color_[edge.color].push_back(e);
      rank_ = std::max(rank_, edge.nodes.size());
      total_weight_ += edge.weight;
    }
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t color_count() const noexcept { return color_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  // Largest edge size; 0 only for an instance without edges.
  std::size_t rank() const noexcept { return rank_; }
  double total_weight() const noexcept { return total_weight_; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  ColorId color(EdgeId e) const { return edges_.at(e).color; }
  double weight(EdgeId e) const { return edges_.at(e).weight; }

  // Incident edge ids of v, ascending.
  std::span<const EdgeId> incident(NodeId v) const { return incident_.at(v); }
  std::span<const EdgeId> edges_of_color(ColorId c) const { return edges_of_color_.at(c); }

  double color_weight(ColorId c) const {
    double w = 0.0;
    for (EdgeId e : edges_of_color(c)) w += edges_[e].weight;
    return w;
  }

 private:
  std::size_t node_count_;
  std::size_t color_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<std::vector<EdgeId>> edges_of_color_;
  std::size_t rank_ = 0;
  double total_weight_ = 0.0;
};

// Total map node -> color.
using Coloring = std::vector<ColorId>;
// Per-color unsatisfied weight.
using ColorErrorVector = std::vector<double>;
// Membership mask over edge ids.
using EdgeSet = std::vector<bool>;

inline void validate_coloring(const Hypergraph& h, const Coloring& lam) {
  if (lam.size() != h.node_count()) throw Error("coloring size does not match node count");
  for (ColorId c : lam)
    if (c >= h.color_count()) throw Error("coloring uses a color out of range");
}

inline EdgeSet empty_edge_set(const Hypergraph& h) { return EdgeSet(h.edge_count(), false); }
inline EdgeSet full_edge_set(const Hypergraph& h) { return EdgeSet(h.edge_count(), true); }

inline EdgeSet edge_set_of(const Hypergraph& h, std::initializer_list<EdgeId> ids) {
  EdgeSet s = empty_edge_set(h);
  for (EdgeId e : ids) s.at(e) = true;
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto not_space = [](char ch) { return ch != ' ' && ch != '\t' && ch != '\r' && ch != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(std::string("non-numeric ") + what + " '" + tok + "'", line);
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError(std::string(what) + " out of range '" + tok + "'", line);
  }
}

inline double parse_weight(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double w = 0.0;
  try {
    w = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric weight '" + tok + "'", line);
  }
  if (used != tok.size() || !std::isfinite(w)) throw ParseError("non-numeric weight '" + tok + "'", line);
  if (w < 0.0) throw ParseError("negative weight", line);
  return w;
}

}  // namespace detail

// Format: '#' comment lines; header "n m k"; then m lines "c w s v1 .. vs"
// with 1-based colors and nodes.
inline Hypergraph parse_instance(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view raw = detail::trim(text.substr(pos, end - pos));
    if (!raw.empty() && raw.front() != '#') lines.emplace_back(line_no, detail::split_tokens(raw));
    pos = end + 1;
  }
  if (lines.empty()) throw ParseError("missing header", line_no);

  const auto& [header_line, header] = lines.front();
  if (header.size() != 3) throw ParseError("malformed header, expected 'n m k'", header_line);
  const std::uint64_t n = detail::parse_count(header[0], header_line, "node count");
  const std::uint64_t m = detail::parse_count(header[1], header_line, "edge count");
  const std::uint64_t k = detail::parse_count(header[2], header_line, "color count");
  if (n == 0 || k == 0) throw ParseError("malformed header, n and k must be positive", header_line);
  if (m == 0) throw ParseError("malformed header, m must be positive", header_line);
  if (lines.size() - 1 != m)
    throw ParseError("expected " + std::to_string(m) + " edge lines, found " + std::to_string(lines.size() - 1),
                     lines.size() > m + 1 ? lines[m + 1].first : line_no);

  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [ln, tok] = lines[i];
    if (tok.size() < 4) throw ParseError("malformed edge line", ln);
    Edge edge;
    const std::uint64_t c = detail::parse_count(tok[0], ln, "color");
    if (c < 1 || c > k) throw ParseError("color out of range", ln);
    edge.color = static_cast<ColorId>(c - 1);
    edge.weight = detail::parse_weight(tok[1], ln);
    const std::uint64_t s = detail::parse_count(tok[2], ln, "edge size");
    if (s == 0) throw ParseError("empty edge", ln);
    if (tok.size() != 3 + s) throw ParseError("edge size does not match node list", ln);
    for (std::size_t j = 3; j < tok.size(); ++j) {
      const std::uint64_t v = detail::parse_count(tok[j], ln, "node");
      if (v < 1 || v > n) throw ParseError("node out of range", ln);
      const NodeId id = static_cast<NodeId>(v - 1);
      if (std::find(edge.nodes.begin(), edge.nodes.end(), id) != edge.nodes.end())
        throw ParseError("duplicate node in edge", ln);
      edge.nodes.push_back(id);
    }
    edges.push_back(std::move(edge));
  }
  return Hypergraph(static_cast<std::size_t>(n), static_cast<std::size_t>(k), std::move(edges));
}

// Inverse of parse_instance. Weights use 17 significant digits.
inline std::string format_instance(const Hypergraph& h) {
  std::ostringstream os;
  os.precision(17);
  os << h.node_count() << ' ' << h.edge_count() << ' ' << h.color_count() << '\n';
  for (const Edge& e : h.edges()) {
    os << e.color + 1 << ' ' << e.weight << ' ' << e.nodes.size();
    for (NodeId v : e.nodes) os << ' ' << v + 1;
    os << '\n';
  }
  return os.str();
}

// Three nodes, three unit edges {1,2},{2,3},{1,3} with colors 1,2,3
// (0-based: edges 0,1,2 over nodes {0,1},{1,2},{0,2}, colors 0,1,2).
inline Hypergraph triangle_gadget() {
  return Hypergraph(3, 3, {Edge{0, 1.0, {0, 1}}, Edge{1, 1.0, {1, 2}}, Edge{2, 1.0, {0, 2}}});
}

// ---------------------------------------------------------------------------
// Objectives

inline bool is_satisfied(const Hypergraph& h, const Coloring& lam, EdgeId e) {
  if (e >= h.edge_count()) throw Error("unknown edge id " + std::to_string(e));
  const Edge& edge = h.edge(e);
  return std::all_of(edge.nodes.begin(), edge.nodes.end(), [&](NodeId v) { return lam.at(v) == edge.color; });
}

inline ColorErrorVector color_error_vector(const Hypergraph& h, const Coloring& lam) {
  validate_coloring(h, lam);
  ColorErrorVector m(h.color_count(), 0.0);
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    if (!is_satisfied(h, lam, e)) m[h.color(e)] += h.weight(e);
  return m;
}

inline EdgeSet unsatisfied_edges(const Hypergraph& h, const Coloring& lam) {
  validate_coloring(h, lam);
  EdgeSet s = empty_edge_set(h);
  for (EdgeId e = 0; e < h.edge_count(); ++e) s[e] = !is_satisfied(h, lam, e);
  return s;
}

enum class ProblemKind { max, min, pmean, colorfair, protected_color };

struct Problem {
  ProblemKind kind = ProblemKind::min;
  // Exponent for pmean; +infinity means the max entry.
  double p = 1.0;
  ColorId protected_color = 0;
  // Bound on unsatisfied protected weight; only used by exact solvers.
  std::optional<double> budget = std::nullopt;

  static Problem max() { return {ProblemKind::max}; }
  static Problem min() { return {ProblemKind::min}; }
  static Problem colorfair() { return {ProblemKind::colorfair, std::numeric_limits<double>::infinity()}; }
  static Problem pmean(double p) {
    if (!(p > 0.0) || std::isnan(p)) throw Error("p must be positive or infinite");
    return {ProblemKind::pmean, p};
  }
  static Problem protected_problem(ColorId c1, std::optional<double> budget = std::nullopt) {
    return {ProblemKind::protected_color, 1.0, c1, budget};
  }

  bool minimizes() const noexcept { return kind != ProblemKind::max; }
};

struct ObjectiveValue {
  double value = 0.0;
  // Unsatisfied weight of the protected color (protected problems only).
  std::optional<double> protected_unsatisfied;
};

inline double pmean_norm(std::span<const double> m, double p) {
  if (std::isinf(p)) {
    double best = 0.0;
    for (double x : m) best = std::max(best, x);
    return best;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : m) s += x;
    return s;
  }
  double s = 0.0;
  for (double x : m) s += std::pow(x, p);
  return std::pow(s, 1.0 / p);
}

inline ObjectiveValue objective(const Hypergraph& h, const Coloring& lam, const Problem& problem) {
  validate_coloring(h, lam);
  const ColorErrorVector m = color_error_vector(h, lam);
  double unsat = 0.0;
  for (double x : m) unsat += x;
  switch (problem.kind) {
    case ProblemKind::max: {
      double sat = 0.0;
      for (EdgeId e = 0; e < h.edge_count(); ++e)
        if (is_satisfied(h, lam, e)) sat += h.weight(e);
      return {sat, std::nullopt};
    }
    case ProblemKind::min:
      return {unsat, std::nullopt};
    case ProblemKind::pmean:
      if (!(problem.p > 0.0)) throw Error("p must be positive or infinite");
      return {pmean_norm(m, problem.p), std::nullopt};
    case ProblemKind::colorfair:
      return {pmean_norm(m, std::numeric_limits<double>::infinity()), std::nullopt};
    case ProblemKind::protected_color:
      if (problem.protected_color >= h.color_count()) throw Error("protected color out of range");
      return {unsat, m[problem.protected_color]};
  }
  throw Error("unknown problem kind");
}

// ---------------------------------------------------------------------------
// Conflict graph

struct ConflictGraph {
  std::size_t vertex_count = 0;
  // Unordered pairs stored with first < second, sorted ascending.
  std::vector<std::pair<EdgeId, EdgeId>> adjacency;
  std::vector<ColorId> color_class;

  bool adjacent(EdgeId a, EdgeId b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(adjacency.begin(), adjacency.end(), std::pair{a, b});
  }
};

inline ConflictGraph build_conflict_graph(const Hypergraph& h) {
  ConflictGraph g;
  g.vertex_count = h.edge_count();
  g.color_class.reserve(h.edge_count());
  for (const Edge& e : h.edges()) g.color_class.push_back(e.color);
  for (NodeId v = 0; v < h.node_count(); ++v) {
    auto inc = h.incident(v);
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j)
        if (h.color(inc[i]) != h.color(inc[j])) g.adjacency.emplace_back(inc[i], inc[j]);
  }
  std::sort(g.adjacency.begin(), g.adjacency.end());
  g.adjacency.erase(std::unique(g.adjacency.begin(), g.adjacency.end()), g.adjacency.end());
  return g;
}

struct Conflict {
  NodeId node;
  EdgeId first;
  EdgeId second;
  bool operator==(const Conflict&) const = default;
};

// First conflict among edges with alive[e] == true: ascending node, then the
// lexicographically smallest distinctly-colored incident edge pair.
inline std::optional<Conflict> find_conflict(const Hypergraph& h, const EdgeSet& alive) {
  if (alive.size() != h.edge_count()) throw Error("edge set size does not match edge count");
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::optional<EdgeId> first;
    for (EdgeId e : h.incident(v)) {
      if (!alive[e]) continue;
      if (!first) {
        first = e;
      } else if (h.color(e) != h.color(*first)) {
        return Conflict{v, *first, e};
      }
    }
  }
  return std::nullopt;
}

// Per-node colors used when no surviving edge or rounding rule decides a node.
inline std::vector<ColorId> constant_fallback(const Hypergraph& h) {
  return std::vector<ColorId>(h.node_count(), 0);
}

// Colors every node so that all edges outside `removed` are satisfied.
// Throws if two surviving edges of different colors share a node.
inline Coloring extend_coloring(const Hypergraph& h, const EdgeSet& removed, std::span<const ColorId> fallback) {
  if (removed.size() != h.edge_count()) throw Error("edge set size does not match edge count");
  if (fallback.size() != h.node_count()) throw Error("fallback size does not match node count");
  Coloring lam(fallback.begin(), fallback.end());
  for (NodeId v = 0; v < h.node_count(); ++v) {
    std::optional<EdgeId> keeper;
    for (EdgeId e : h.incident(v)) {
      if (removed[e]) continue;
      if (!keeper) {
        keeper = e;
        lam[v] = h.color(e);
      } else if (h.color(e) != h.color(*keeper)) {
        throw Error("cover violation: edges " + std::to_string(*keeper) + " and " + std::to_string(e) +
                    " conflict at node " + std::to_string(v + 1));
      }
    }
  }
  return lam;
}

inline Coloring extend_coloring(const Hypergraph& h, const EdgeSet& removed) {
  return extend_coloring(h, removed, constant_fallback(h));
}

}  // namespace ecc
