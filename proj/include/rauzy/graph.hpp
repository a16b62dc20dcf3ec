#pragma once

// Rauzy graphs of a language and the cycle space of a directed multigraph.
//
// For a connected graph the conserved edge functions (inflow = outflow at
// every vertex) are exactly the span of the cycle vectors, of dimension
// |E| - |V| + 1. Fundamental cycles come from a breadth-first spanning
// forest: one cycle per non-tree edge.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "rauzy/error.hpp"
#include "rauzy/word.hpp"

namespace rauzy {

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  std::string label;  ///< the (n+1)-factor for Rauzy graphs
  double weight = 0;
  std::size_t count = 0;  ///< occurrences in the prefix, when built from a word
};

/// Values indexed like RauzyGraph::edges().
using EdgeFunction = std::vector<double>;

/// Coefficients in {-1, 0, +1} indexed like RauzyGraph::edges().
using CycleVector = std::vector<int>;

/// Directed multigraph with named vertices. Parallel edges and loops are
/// allowed; the vertex and edge orders given at construction are canonical.
class RauzyGraph {
 public:
  RauzyGraph(std::vector<std::string> vertices, std::vector<Edge> edges, std::size_t order = 0)
      : vertices_(std::move(vertices)), edges_(std::move(edges)), order_(order) {
    for (const auto& e : edges_) {
      if (e.source >= vertices_.size() || e.target >= vertices_.size()) {
        throw error(errc::invalid_arguments, "edge endpoint is not a vertex");
      }
    }
  }

  std::size_t order() const noexcept { return order_; }
  const std::vector<std::string>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// True when the factor sets had not stabilised at the prefix used.
  bool provisional() const noexcept { return provisional_; }
  void set_provisional(bool p) noexcept { provisional_ = p; }
  std::size_t prefix_length() const noexcept { return prefix_length_; }
  void set_prefix_length(std::size_t l) noexcept { prefix_length_ = l; }

  std::optional<std::size_t> vertex_index(const std::string& name) const {
    auto it = std::find(vertices_.begin(), vertices_.end(), name);
    if (it == vertices_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  std::optional<std::size_t> edge_index(const std::string& label) const {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (edges_[i].label == label) return i;
    }
    return std::nullopt;
  }

  EdgeFunction weights() const {
    EdgeFunction f;
    for (const auto& e : edges_) f.push_back(e.weight);
    return f;
  }

  EdgeFunction counts() const {
    EdgeFunction f;
    for (const auto& e : edges_) f.push_back(static_cast<double>(e.count));
    return f;
  }

  /// Weakly connected component of each vertex, numbered from 0 in vertex order.
  std::vector<std::size_t> components() const {
    std::vector<std::size_t> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges_) {
      const auto a = find(e.source), b = find(e.target);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<std::size_t, std::size_t> ids;
    std::vector<std::size_t> out(vertices_.size());
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      out[v] = ids.emplace(find(v), ids.size()).first->second;
    }
    return out;
  }

  std::size_t component_count() const {
    const auto c = components();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end()) + 1;
  }

  bool connected() const { return component_count() <= 1; }

  void write_dot(std::ostream& os, bool with_weights = false) const {
    os << "digraph rauzy {\n";
    for (const auto& v : vertices_) os << "  \"" << v << "\";\n";
    for (const auto& e : edges_) {
      os << "  \"" << vertices_[e.source] << "\" -> \"" << vertices_[e.target] << "\" [label=\"" << e.label;
      if (with_weights) os << "\\n" << e.weight;
      os << "\"];\n";
    }
    os << "}\n";
  }

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::size_t order_;
  bool provisional_ = false;
  std::size_t prefix_length_ = 0;
};

/// Rauzy graph of order n from the length-L prefix: vertices are the
/// length-n factors, one edge per length-(n+1) factor from its prefix to its
/// suffix, weighted by count / (L - n).
inline RauzyGraph build_rauzy_graph(const LazyWord& w, std::size_t n, std::size_t prefix_length) {
  if (n == 0 || prefix_length < n + 1) throw error(errc::invalid_arguments, "need 1 <= n < prefix length");
  PrefixBuffer buffer(w);
  const std::size_t len = buffer.ensure(prefix_length);
  if (len < n + 1) throw error(errc::invalid_arguments, "word truncated before n+1 letters");
  const auto view = buffer.view(len);
  const auto& alphabet = w.alphabet();

  const auto vertex_counts = detail::count_blocks(view, n);
  const auto edge_counts = detail::count_blocks(view, n + 1);

  std::vector<std::string> names;
  std::map<std::vector<std::uint8_t>, std::size_t> index;
  for (const auto& [key, c] : vertex_counts) {
    index.emplace(key, names.size());
    names.push_back(detail::from_raw(alphabet, key).to_string());
  }
  const double total = static_cast<double>(len - n);
  std::vector<Edge> edges;
  for (const auto& [key, c] : edge_counts) {
    std::vector<std::uint8_t> head(key.begin(), key.end() - 1), tail(key.begin() + 1, key.end());
    edges.push_back({index.at(head), index.at(tail), detail::from_raw(alphabet, key).to_string(),
                     static_cast<double>(c) / total, c});
  }
  RauzyGraph g(std::move(names), std::move(edges), n);
  g.set_prefix_length(len);
  const auto half = buffer.view(len / 2);
  g.set_provisional(len < prefix_length || detail::count_distinct(half, n, alphabet->size()) != vertex_counts.size() ||
                    detail::count_distinct(half, n + 1, alphabet->size()) != edge_counts.size());
  return g;
}

/// Outflow minus inflow of f at every vertex.
inline std::vector<double> conservation_defect(const RauzyGraph& g, const EdgeFunction& f) {
  if (f.size() != g.edge_count()) throw error(errc::invalid_arguments, "edge function size mismatch");
  std::vector<double> defect(g.vertex_count(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    defect[g.edges()[i].source] += f[i];
    defect[g.edges()[i].target] -= f[i];
  }
  return defect;
}

/// z_L for the closed walk u_1 ... u_k (u_1 = u_k) that may use edges in
/// either direction: +1 on forward edges, -1 on reversed ones.
inline CycleVector cycle_vector(const RauzyGraph& g, const std::vector<std::string>& walk) {
  if (walk.size() < 2 || walk.front() != walk.back()) throw error(errc::invalid_arguments, "walk must be closed");
  CycleVector z(g.edge_count(), 0);
  for (std::size_t j = 0; j + 1 < walk.size(); ++j) {
    const auto a = g.vertex_index(walk[j]), b = g.vertex_index(walk[j + 1]);
    if (!a || !b) throw error(errc::invalid_arguments, "walk visits an unknown vertex");
    std::optional<std::size_t> hit;
    int sign = 0;
    for (std::size_t e = 0; e < g.edge_count() && !hit; ++e) {
      if (g.edges()[e].source == *a && g.edges()[e].target == *b) hit = e, sign = 1;
    }
    for (std::size_t e = 0; e < g.edge_count() && !hit; ++e) {
      if (g.edges()[e].source == *b && g.edges()[e].target == *a) hit = e, sign = -1;
    }
    if (!hit) throw error(errc::invalid_arguments, "walk uses a missing edge");
    z[*hit] = sign;
  }
  return z;
}

struct CycleSpaceBasis {
  std::vector<CycleVector> cycles;
  std::vector<std::size_t> tree_edges;
  std::vector<std::size_t> chords;  ///< non-tree edge of each cycle, same order
  std::size_t components = 0;

  std::size_t dimension() const noexcept { return cycles.size(); }
};

/// Fundamental cycles of a breadth-first spanning forest. Roots are taken in
/// vertex order, incident edges in edge order; chords in edge order.
inline CycleSpaceBasis cycle_space(const RauzyGraph& g) {
  const std::size_t nv = g.vertex_count();
  std::vector<std::vector<std::size_t>> incident(nv);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    incident[g.edges()[e].source].push_back(e);
    if (g.edges()[e].target != g.edges()[e].source) incident[g.edges()[e].target].push_back(e);
  }
  constexpr auto none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent_edge(nv, none), depth(nv, 0);
  std::vector<bool> seen(nv, false), in_tree(g.edge_count(), false);
  CycleSpaceBasis basis;
  for (std::size_t root = 0; root < nv; ++root) {
    if (seen[root]) continue;
    ++basis.components;
    seen[root] = true;
    std::queue<std::size_t> queue;
    queue.push(root);
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop();
      for (auto e : incident[x]) {
        const auto& edge = g.edges()[e];
        const auto y = edge.source == x ? edge.target : edge.source;
        if (seen[y]) continue;
        seen[y] = true;
        parent_edge[y] = e;
        depth[y] = depth[x] + 1;
        in_tree[e] = true;
        basis.tree_edges.push_back(e);
        queue.push(y);
      }
    }
  }
  auto parent = [&](std::size_t x) {
    const auto& e = g.edges()[parent_edge[x]];
    return e.source == x ? e.target : e.source;
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (in_tree[e]) continue;
    CycleVector z(g.edge_count(), 0);
    z[e] = 1;
    // Close the cycle along the tree from the chord's target back to its source.
    auto up = g.edges()[e].target;
    auto down = g.edges()[e].source;
    std::vector<std::size_t> descent;
    while (up != down) {
      if (depth[up] >= depth[down]) {
        const auto pe = parent_edge[up];
        z[pe] += g.edges()[pe].source == up ? 1 : -1;  // walking up from `up`
        up = parent(up);
      } else {
        descent.push_back(down);
        down = parent(down);
      }
    }
    for (auto it = descent.rbegin(); it != descent.rend(); ++it) {
      const auto pe = parent_edge[*it];
      z[pe] += g.edges()[pe].target == *it ? 1 : -1;  // walking down into *it
    }
    basis.cycles.push_back(std::move(z));
    basis.chords.push_back(e);
  }
  return basis;
}

struct Decomposition {
  bool ok = false;
  std::vector<double> coefficients;  ///< one per fundamental cycle
  double residual = 0;               ///< max |sum alpha_i z_i - f|
  double max_defect = 0;
  std::string reason;
};

/// Least-squares expansion of f in the fundamental cycle basis.
inline Decomposition decompose_in_cycles(const RauzyGraph& g, const EdgeFunction& f, double tol = 1e-9) {
  Decomposition out;
  const auto defect = conservation_defect(g, f);
  for (double d : defect) out.max_defect = std::max(out.max_defect, std::fabs(d));
  if (out.max_defect > tol) {
    out.reason = "edge function is not conserved at every vertex";
    return out;
  }
  const auto basis = cycle_space(g);
  const auto ne = static_cast<Eigen::Index>(g.edge_count());
  const auto nc = static_cast<Eigen::Index>(basis.dimension());
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), ne);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(nc);
  Eigen::MatrixXd c(ne, nc);
  for (Eigen::Index j = 0; j < nc; ++j)
    for (Eigen::Index i = 0; i < ne; ++i) c(i, j) = basis.cycles[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  if (nc > 0) alpha = c.colPivHouseholderQr().solve(rhs);
  out.residual = ne == 0 ? 0.0 : (c * alpha - rhs).lpNorm<Eigen::Infinity>();
  out.coefficients.assign(alpha.data(), alpha.data() + nc);
  out.ok = out.residual <= tol;
  if (!out.ok) out.reason = "residual above tolerance";
  return out;
}

struct GraphStats {
  std::size_t order = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t components = 0;
  std::size_t dim_z = 0;  ///< |E| - |V| + components
  long long chi = 0;      ///< |E| - |V| + 1, i.e. p(n+1) - p(n) + 1

  static void write_csv_header(std::ostream& os) { os << "n,V,E,components,dimZ,chi\n"; }
  void write_csv_row(std::ostream& os) const {
    os << order << ',' << vertices << ',' << edges << ',' << components << ',' << dim_z << ',' << chi << '\n';
  }
};

inline GraphStats graph_stats(const RauzyGraph& g) {
  GraphStats s;
  s.order = g.order();
  s.vertices = g.vertex_count();
  s.edges = g.edge_count();
  s.components = g.component_count();
  s.dim_z = cycle_space(g).dimension();
  s.chi = static_cast<long long>(s.edges) - static_cast<long long>(s.vertices) + 1;
  return s;
}

struct EulerRow {
  std::size_t n = 0;
  GraphStats stats;
  bool stabilized = false;
  bool connected = true;
  bool at_least_k = false;
  bool at_least_k_plus_1 = false;
};

struct EulerReport {
  std::size_t k = 0;
  std::vector<EulerRow> rows;

  bool passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const EulerRow& r) { return r.at_least_k; });
  }
  bool strict_bound_holds() const {
    return std::all_of(rows.begin(), rows.end(), [](const EulerRow& r) { return r.at_least_k_plus_1; });
  }
};

/// chi of the Rauzy graphs G_1 .. G_{n_max}, compared against k and k + 1.
/// Disconnected graphs use the component-count formula and are flagged.
inline EulerReport euler_characteristic_check(const LazyWord& w, std::size_t k, std::size_t n_max,
                                              const StabilizationPolicy& policy = {}) {
  EulerReport report;
  report.k = k;
  const auto table = complexity(w, n_max + 1, policy);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const auto& lo = table.at(n);
    const auto& hi = table.at(n + 1);
    const auto g = build_rauzy_graph(w, n, std::max({lo.prefix_length, hi.prefix_length, n + 1}));
    EulerRow row;
    row.n = n;
    row.stats = graph_stats(g);
    row.connected = row.stats.components == 1;
    row.stabilized = lo.stabilized && hi.stabilized && !g.provisional();
    const long long chi = row.connected ? row.stats.chi : static_cast<long long>(row.stats.dim_z);
    row.at_least_k = chi >= static_cast<long long>(k);
    row.at_least_k_plus_1 = chi >= static_cast<long long>(k) + 1;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace rauzy
