#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rauzy/error.hpp"
#include "rauzy/graph.hpp"
#include "rauzy/random.hpp"
#include "rauzy/relation.hpp"
#include "rauzy/substitution.hpp"
#include "rauzy/torus.hpp"
#include "rauzy/word.hpp"

namespace rauzy {

/// The 4-vertex, 6-edge example graph: e1=1->2, e2=2->3, e3=3->4, e4=4->1,
/// e5=2->4, e6=1->3, weighted by the flow (1,0,1,2,1,1).
inline RauzyGraph worked_example_graph() {
  std::vector<Edge> edges{{0, 1, "e1", 1, 0}, {1, 2, "e2", 0, 0}, {2, 3, "e3", 1, 0},
                          {3, 0, "e4", 2, 0}, {1, 3, "e5", 1, 0}, {0, 2, "e6", 1, 0}};
  return RauzyGraph({"1", "2", "3", "4"}, std::move(edges));
}

/// A coded system from the built-in battery: a word together with the
/// torus translation it codes.
struct BuiltinExample {
  std::string name;
  std::size_t torus_dim = 0;  ///< k
  std::size_t pieces = 0;     ///< m
  Vec a;
  LazyWord word;
  StabilizationPolicy policy;
  std::size_t n_max = 0;
  bool hexagon = false;
};

/// Translation vector of the k-bonacci coding on T^{k-1}: minus the tail of
/// the normalized letter-frequency vector.
inline Vec kbonacci_translation(std::size_t k) {
  const auto p = perron(abelianization(k_bonacci(k)));
  Vec a;
  for (std::size_t i = 1; i < k; ++i) {
    const double x = -p.right(static_cast<Eigen::Index>(i));
    a.push_back(x - std::floor(x));
  }
  return a;
}

inline BuiltinExample circle_example() {
  const auto t = circle_rotation(1.0 / golden_ratio);
  return {"circle", 1, t.m(), t.a(), coding(t, domain_centroid(t)), {}, 50, false};
}

inline BuiltinExample kbonacci_example(std::size_t k) {
  return {"kbonacci-" + std::to_string(k), k - 1, k, kbonacci_translation(k),
          fixed_point(k_bonacci(k), Symbol{0}), {}, k == 4 ? std::size_t{20} : std::size_t{30}, false};
}

inline BuiltinExample hexagon_example(std::uint64_t seed) {
  const auto t = default_hexagon(seed);
  return {"hexagon-seed-" + std::to_string(seed), t.k(), t.m(), t.a(), coding(t, domain_centroid(t)),
          StabilizationPolicy::torus_coding(), 12, true};
}

/// Largest root in [lo, hi] of a polynomial with a sign change there.
inline double bisect_root(const std::function<long double(long double)>& f, long double lo, long double hi) {
  if ((f(lo) < 0) == (f(hi) < 0)) throw error(errc::invalid_arguments, "no sign change on the bracket");
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const long double mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    ((f(mid) < 0) == (f(lo) < 0) ? lo : hi) = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

struct Check {
  std::string name;
  std::string claim;
  nlohmann::json computed;
  nlohmann::json expected;
  double tolerance = 0;
  bool pass = false;
  std::vector<std::string> notes;
  double seconds = 0;
};

inline Check make_check(std::string name, std::string claim) {
  Check c;
  c.name = std::move(name);
  c.claim = std::move(claim);
  return c;
}

struct VerifyOptions {
  /// Hexagon seeds; the first one is also the master seed for sampling.
  std::vector<std::uint64_t> seeds{1, 2};
  std::set<std::string> only;  ///< empty: every check
  std::size_t prefix_cap = std::size_t{1} << 24;
  double tol = 1e-12;
  std::size_t mc_samples = 1000000;
  std::size_t random_graphs = 100;
  bool parallel = true;
};

class VerificationReport {
 public:
  std::vector<std::uint64_t> seeds;
  std::vector<Check> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  /// Runtimes are left out unless asked for, so reports diff cleanly.
  nlohmann::json to_json(bool timings = false) const {
    nlohmann::json j;
    j["seeds"] = seeds;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json e{{"name", c.name},         {"claim", c.claim}, {"computed", c.computed},
                       {"expected", c.expected}, {"tolerance", c.tolerance}, {"pass", c.pass},
                       {"notes", c.notes}};
      if (timings) e["runtime_s"] = c.seconds;
      j["checks"].push_back(std::move(e));
    }
    return j;
  }

  std::string summary(bool timings = false) const {
    std::ostringstream os;
    std::size_t ok = 0;
    for (const auto& c : checks) {
      ok += c.pass ? 1 : 0;
      os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
      if (timings) os << " (" << c.seconds << " s)";
      os << '\n';
      for (const auto& n : c.notes) os << "       " << n << '\n';
    }
    os << ok << '/' << checks.size() << " checks passed\n";
    return os.str();
  }
};

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "sturmian-baseline", "kbonacci-equality",     "hexagon-quadratic", "lower-bound",
      "piece-count",       "increments",            "graph-example",     "cycle-space-roundtrip",
      "flow-conservation", "measure-identities",    "euler-characteristic", "spectral",
      "fractal-bounded"};
  return names;
}

namespace detail {

inline nlohmann::json table_json(const ComplexityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : r.entries()) rows.push_back({e.n, e.p, e.stabilized});
  return rows;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Random connected multigraph: a random spanning tree plus extra edges, all
/// with random orientation.
inline RauzyGraph random_connected_multigraph(SplitMix64& rng, std::size_t max_vertices, std::size_t max_edges) {
  const std::size_t nv = 1 + static_cast<std::size_t>(rng() % max_vertices);
  const std::size_t ne = (nv - 1) + static_cast<std::size_t>(rng() % (max_edges - (nv - 1) + 1));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nv; ++i) names.push_back("v" + std::to_string(i));
  std::vector<Edge> edges;
  auto oriented = [&](std::size_t x, std::size_t y) {
    if (rng() & 1) std::swap(x, y);
    edges.push_back({x, y, "e" + std::to_string(edges.size() + 1), 0, 0});
  };
  for (std::size_t i = 1; i < nv; ++i) oriented(i, static_cast<std::size_t>(rng() % i));
  while (edges.size() < ne) oriented(static_cast<std::size_t>(rng() % nv), static_cast<std::size_t>(rng() % nv));
  return RauzyGraph(std::move(names), std::move(edges));
}

}  // namespace detail

/// Runs the built-in battery. Complexity tables are shared between checks
/// and computed once.
class Verifier {
 public:
  explicit Verifier(VerifyOptions options = {}) : options_(std::move(options)) {
    if (options_.seeds.empty()) throw error(errc::invalid_arguments, "at least one seed is required");
    for (const auto& name : options_.only) {
      if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
        throw error(errc::invalid_arguments, "unknown check: " + name);
      }
    }
  }

  VerificationReport run() {
    VerificationReport report;
    report.seeds = options_.seeds;
    std::vector<std::string> selected;
    for (const auto& n : check_names())
      if (options_.only.empty() || options_.only.count(n)) selected.push_back(n);
    std::vector<std::future<Check>> futures;
    for (const auto& n : selected) {
      const auto policy = options_.parallel ? std::launch::async : std::launch::deferred;
      futures.push_back(std::async(policy, [this, n] { return run_check(n); }));
    }
    for (auto& f : futures) report.checks.push_back(f.get());
    return report;
  }

  Check run_check(const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    c.name = name;
    try {
      if (name == "sturmian-baseline") c = sturmian_baseline();
      else if (name == "kbonacci-equality") c = kbonacci_equality();
      else if (name == "hexagon-quadratic") c = hexagon_quadratic();
      else if (name == "lower-bound") c = lower_bound();
      else if (name == "piece-count") c = piece_count();
      else if (name == "increments") c = increments();
      else if (name == "graph-example") c = graph_example();
      else if (name == "cycle-space-roundtrip") c = cycle_space_roundtrip();
      else if (name == "flow-conservation") c = flow_conservation();
      else if (name == "measure-identities") c = measure_identities();
      else if (name == "euler-characteristic") c = euler_characteristic();
      else if (name == "spectral") c = spectral();
      else if (name == "fractal-bounded") c = fractal_bounded();
      else throw error(errc::invalid_arguments, "unknown check: " + name);
    } catch (const std::exception& e) {
      c.pass = false;
      c.notes.push_back(std::string("error: ") + e.what());
    }
    c.name = name;
    c.seconds = detail::seconds_since(t0);
    return c;
  }

  /// Complexity table of a built-in example, memoized.
  struct Table {
    BuiltinExample example;
    ComplexityReport report;
    double seconds = 0;
  };

  const Table& table(const std::string& name) {
    std::shared_future<Table> fut;
    {
      std::lock_guard lock(mutex_);
      auto it = tables_.find(name);
      if (it == tables_.end()) {
        auto ex = example(name);
        auto cap = options_.prefix_cap;
        it = tables_
                 .emplace(name, std::async(std::launch::deferred,
                                           [ex = std::move(ex), cap]() mutable {
                                             const auto t0 = std::chrono::steady_clock::now();
                                             ex.policy.cap = cap;
                                             auto r = complexity(ex.word, ex.n_max, ex.policy);
                                             return Table{std::move(ex), std::move(r), detail::seconds_since(t0)};
                                           })
                                    .share())
                 .first;
      }
      fut = it->second;
    }
    return fut.get();
  }

  std::vector<std::string> example_names() const {
    std::vector<std::string> names{"circle", "kbonacci-2", "kbonacci-3", "kbonacci-4"};
    for (auto s : distinct_seeds()) names.push_back("hexagon-seed-" + std::to_string(s));
    return names;
  }

  const VerifyOptions& options() const noexcept { return options_; }

 private:
  std::vector<std::uint64_t> distinct_seeds() const {
    std::vector<std::uint64_t> s;
    for (auto x : options_.seeds)
      if (std::find(s.begin(), s.end(), x) == s.end()) s.push_back(x);
    return s;
  }

  BuiltinExample example(const std::string& name) const {
    if (name == "circle") return circle_example();
    for (std::size_t k : {2, 3, 4})
      if (name == "kbonacci-" + std::to_string(k)) return kbonacci_example(k);
    const std::string prefix = "hexagon-seed-";
    if (name.rfind(prefix, 0) == 0) return hexagon_example(std::stoull(name.substr(prefix.size())));
    throw error(errc::invalid_arguments, "unknown example: " + name);
  }

  SplitMix64 stream(const std::string& check) const { return derive_stream(options_.seeds.front(), check); }

  /// Exact match of p(n) against a formula on every row, all stabilized.
  static bool match_rows(const ComplexityReport& r, const std::function<std::size_t(std::size_t)>& formula,
                         std::vector<std::string>& notes, const std::string& label) {
    bool ok = true;
    for (const auto& e : r.entries()) {
      if (e.p != formula(e.n) || !e.stabilized) {
        ok = false;
        notes.push_back(label + ": n=" + std::to_string(e.n) + " p=" + std::to_string(e.p) + " expected " +
                        std::to_string(formula(e.n)) + (e.stabilized ? "" : " (not stabilized)"));
      }
    }
    return ok;
  }

  Check sturmian_baseline() {
    auto c = make_check("sturmian-baseline", "the complexity function is equal to n+1");
    const auto& t = table("circle");
    c.computed = detail::table_json(t.report);
    c.expected = "p(n) = n+1 for n = 1..50";
    c.pass = match_rows(t.report, [](std::size_t n) { return n + 1; }, c.notes, "circle");
    if (t.seconds >= 5) {
      c.pass = false;
      c.notes.push_back("runtime limit of 5 s exceeded");
    }
    return c;
  }

  Check kbonacci_equality() {
    auto c = make_check("kbonacci-equality", "p_k(n)=kn+1");
    c.pass = true;
    double seconds = 0;
    for (std::size_t k : {2, 3, 4}) {
      const auto& t = table("kbonacci-" + std::to_string(k));
      seconds += t.seconds;
      c.computed[t.example.name] = detail::table_json(t.report);
      c.expected[t.example.name] = "p(n) = " + std::to_string(k - 1) + "n+1";
      c.pass = match_rows(t.report, [k](std::size_t n) { return (k - 1) * n + 1; }, c.notes, t.example.name) &&
               c.pass;
    }
    if (seconds >= 60) {
      c.pass = false;
      c.notes.push_back("runtime limit of 60 s exceeded");
    }
    return c;
  }

  Check hexagon_quadratic() {
    auto c = make_check("hexagon-quadratic", "p_2(n)=n^2+n+1");
    const auto seeds = distinct_seeds();
    c.pass = seeds.size() >= 2;
    if (!c.pass) c.notes.push_back("needs at least 2 distinct seeds");
    double seconds = 0;
    std::optional<std::vector<std::size_t>> first;
    for (auto s : seeds) {
      const auto& t = table("hexagon-seed-" + std::to_string(s));
      seconds += t.seconds;
      c.computed[t.example.name] = detail::table_json(t.report);
      c.pass = match_rows(t.report, [](std::size_t n) { return n * n + n + 1; }, c.notes, t.example.name) && c.pass;
      std::vector<std::size_t> p;
      for (const auto& e : t.report.entries()) p.push_back(e.p);
      if (!first) first = p;
      else if (p != *first) c.notes.push_back(t.example.name + ": table differs from seed " + std::to_string(seeds[0]));
    }
    c.expected = "p(n) = n^2+n+1 for n = 1..12, stabilized, every seed";
    if (seconds >= 120) {
      c.pass = false;
      c.notes.push_back("runtime limit of 120 s exceeded");
    }
    return c;
  }

  Check lower_bound() {
    auto c = make_check("lower-bound", "the complexity function fulfills p_k(n) >= kn+1");
    c.pass = true;
    for (const auto& name : example_names()) {
      const auto& t = table(name);
      const auto verdict = minimality_check(t.example.a, 100, 1e-9);
      nlohmann::json row{{"k", t.example.torus_dim}, {"minimal_evidence", verdict.minimal_evidence()}};
      if (!verdict.minimal_evidence()) {
        row["relation"] = verdict.relation;
        c.notes.push_back(name + ": integer relation found, skipped");
        c.computed[name] = row;
        continue;
      }
      std::size_t violations = 0, lower_bound_rows = 0;
      for (const auto& e : t.report.entries()) {
        if (e.p < t.example.torus_dim * e.n + 1) ++violations;
        if (!e.stabilized) ++lower_bound_rows;
      }
      row["rows"] = t.report.size();
      row["violations"] = violations;
      row["lower_bound_rows"] = lower_bound_rows;
      c.computed[name] = row;
      if (violations) {
        c.pass = false;
        c.notes.push_back(name + ": " + std::to_string(violations) + " rows below kn+1");
      }
    }
    c.expected = "no violations on examples with a no-relation verdict";
    return c;
  }

  Check piece_count() {
    auto c = make_check("piece-count", "Then we have: m >= k+1");
    c.pass = true;
    for (const auto& name : example_names()) {
      const auto ex = example(name);
      c.computed[name] = {{"k", ex.torus_dim}, {"m", ex.pieces}};
      const bool ok = ex.pieces >= ex.torus_dim + 1 && (name == "circle" || ex.pieces == ex.torus_dim + 1);
      if (!ok) {
        c.pass = false;
        c.notes.push_back(name + ": m=" + std::to_string(ex.pieces) + " k=" + std::to_string(ex.torus_dim));
      }
    }
    c.expected = "m >= k+1 everywhere; m = k+1 for k-bonacci and hexagon";
    return c;
  }

  Check increments() {
    auto c = make_check("increments", "p_k(n+1)-p_k(n) >= k");
    c.pass = true;
    std::size_t checked = 0;
    for (const auto& name : example_names()) {
      const auto& t = table(name);
      const auto& rows = t.report.entries();
      std::size_t min_inc = static_cast<std::size_t>(-1);
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (!rows[i].stabilized || !rows[i + 1].stabilized) continue;
        ++checked;
        const auto inc = rows[i + 1].p - std::min(rows[i + 1].p, rows[i].p);
        min_inc = std::min(min_inc, inc);
        if (rows[i + 1].p < rows[i].p + t.example.torus_dim) {
          c.pass = false;
          c.notes.push_back(name + ": increment at n=" + std::to_string(rows[i].n) + " is " + std::to_string(inc));
        }
      }
      c.computed[name] = {{"k", t.example.torus_dim},
                          {"min_increment", min_inc == static_cast<std::size_t>(-1) ? nlohmann::json() : nlohmann::json(min_inc)}};
    }
    c.computed["pairs_checked"] = checked;
    c.expected = "every increment >= k";
    return c;
  }

  Check graph_example() {
    auto c = make_check("graph-example", "The space Z(G) is of dimension 6-4+1=3");
    const auto g = worked_example_graph();
    const auto basis = cycle_space(g);
    const auto z = cycle_vector(g, {"1", "3", "2", "1"});
    const auto f = g.weights();
    const auto defect = conservation_defect(g, f);
    const auto dec = decompose_in_cycles(g, f, 1e-12);
    double in1 = 0, out1 = 0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (g.edges()[e].target == 0) in1 += f[e];
      if (g.edges()[e].source == 0) out1 += f[e];
    }
    const CycleVector z_expected{-1, -1, 0, 0, 0, 1};
    c.computed = {{"dimension", basis.dimension()},
                  {"cycle_132", z},
                  {"defect", defect},
                  {"vertex1_in", in1},
                  {"vertex1_out", out1},
                  {"decomposition", dec.coefficients},
                  {"residual", dec.residual}};
    c.expected = {{"dimension", 3},
                  {"cycle_132", z_expected},
                  {"defect", std::vector<double>(4, 0.0)},
                  {"vertex1_in", 2},
                  {"vertex1_out", 2}};
    c.pass = basis.dimension() == 3 && z == z_expected &&
             std::all_of(defect.begin(), defect.end(), [](double d) { return d == 0; }) && in1 == 2 && out1 == 2 &&
             dec.ok;
    return c;
  }

  Check cycle_space_roundtrip() {
    auto c = make_check("cycle-space-roundtrip", "The space Z(G) is equal to N(G)");
    c.tolerance = 1e-9;
    auto rng = stream("cycle-space-roundtrip");
    double worst = 0;
    std::size_t failures = 0;
    for (std::size_t trial = 0; trial < options_.random_graphs; ++trial) {
      const auto g = detail::random_connected_multigraph(rng, 12, 30);
      const auto nv = static_cast<Eigen::Index>(g.vertex_count());
      const auto ne = static_cast<Eigen::Index>(g.edge_count());
      // Kernel of the incidence matrix, independently of the tree basis.
      Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(nv, ne);
      for (Eigen::Index e = 0; e < ne; ++e) {
        const auto& edge = g.edges()[static_cast<std::size_t>(e)];
        incidence(static_cast<Eigen::Index>(edge.source), e) += 1;
        incidence(static_cast<Eigen::Index>(edge.target), e) -= 1;
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(incidence);
      const Eigen::MatrixXd kernel = lu.kernel();
      const auto dim_n = lu.dimensionOfKernel();
      const auto basis = cycle_space(g);
      const auto expected_dim = static_cast<std::size_t>(ne - nv + 1);
      bool ok = basis.dimension() == expected_dim && static_cast<std::size_t>(dim_n) == expected_dim;
      if (dim_n > 0) {
        Eigen::VectorXd coeff(kernel.cols());
        for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = rng.uniform(-1, 1);
        const Eigen::VectorXd flow = kernel * coeff;
        const auto dec = decompose_in_cycles(g, EdgeFunction(flow.data(), flow.data() + flow.size()), c.tolerance);
        worst = std::max(worst, dec.residual);
        ok = ok && dec.ok;
      }
      failures += ok ? 0 : 1;
    }
    c.computed = {{"graphs", options_.random_graphs}, {"failures", failures}, {"max_residual", worst}};
    c.expected = {{"failures", 0}};
    c.pass = failures == 0;
    return c;
  }

  Check flow_conservation() {
    auto c = make_check("flow-conservation", "We will be interested by the functions");
    c.tolerance = 1e-12;
    c.pass = true;
    for (std::size_t k : {2, 3}) {
      const auto w = fixed_point(k_bonacci(k), Symbol{0});
      double worst = 0;
      for (std::size_t n = 1; n <= 10; ++n) {
        const auto g = build_rauzy_graph(w, n, 100000);
        const auto d = conservation_defect(g, g.counts());
        for (double x : d) worst = std::max(worst, std::fabs(x));
      }
      c.computed["kbonacci-" + std::to_string(k) + "_max_count_defect"] = worst;
      if (worst > 1) {
        c.pass = false;
        c.notes.push_back("kbonacci-" + std::to_string(k) + ": count defect outside {-1,0,1}");
      }
    }
    const auto t = circle_rotation(1.0 / golden_ratio);
    double worst = 0;
    for (std::size_t n = 1; n <= 10; ++n) {
      const auto vertices = cylinder_measures_1d(t, n);
      const auto edges = cylinder_measures_1d(t, n + 1);
      std::map<FiniteWord, double> out, in;
      for (const auto& [word, mu] : edges) {
        out[word.slice(0, n)] += mu;
        in[word.slice(1, n)] += mu;
      }
      for (const auto& [u, mu] : vertices) {
        worst = std::max(worst, std::fabs(out[u] - in[u]));
        worst = std::max(worst, std::fabs(out[u] - mu));
      }
      if (out.size() != vertices.size() || in.size() != vertices.size()) {
        c.pass = false;
        c.notes.push_back("circle: edge endpoints are not vertices at n=" + std::to_string(n));
      }
    }
    c.computed["circle_max_measure_defect"] = worst;
    c.expected = {{"count_defect", "in {-1,0,1}"}, {"measure_defect", "< 1e-12"}};
    if (!(worst < c.tolerance)) {
      c.pass = false;
      c.notes.push_back("circle: measure defect above tolerance");
    }
    return c;
  }

  Check measure_identities() {
    auto c = make_check("measure-identities", "Since the set D is of volume 1");
    c.tolerance = 1e-12;
    c.pass = true;
    const auto circle = circle_rotation(1.0 / golden_ratio);
    const auto exact = verify_measure_identities(circle, 0);
    c.computed["circle"] = {{"volume_residual", exact.volume_residual},
                            {"flow_residual", exact.flow_residual_norm()}};
    if (!(std::fabs(exact.volume_residual) < 1e-12 && exact.flow_residual_norm() < 1e-12)) {
      c.pass = false;
      c.notes.push_back("circle: exact identities above 1e-12");
    }
    for (auto s : distinct_seeds()) {
      const auto t = default_hexagon(s);
      const auto r = verify_measure_identities(t, options_.mc_samples, options_.seeds.front());
      const std::string name = "hexagon-seed-" + std::to_string(s);
      bool ok = std::fabs(r.sampled_volume_residual) <= 3 * r.sampled_volume_error;
      double worst_z = r.sampled_volume_error > 0 ? std::fabs(r.sampled_volume_residual) / r.sampled_volume_error : 0;
      for (std::size_t d = 0; d < t.k(); ++d) {
        const double res = std::fabs(r.sampled_flow_residual[d]), se = r.sampled_flow_error[d];
        ok = ok && res <= 3 * se;
        if (se > 0) worst_z = std::max(worst_z, res / se);
      }
      c.computed[name] = {{"samples", r.samples},
                          {"sampled_volume_residual", r.sampled_volume_residual},
                          {"sampled_volume_error", r.sampled_volume_error},
                          {"sampled_flow_residual", r.sampled_flow_residual},
                          {"sampled_flow_error", r.sampled_flow_error},
                          {"max_standard_errors", worst_z},
                          {"exact_volume_residual", r.volume_residual},
                          {"exact_flow_residual", r.flow_residual_norm()}};
      if (!ok) {
        c.pass = false;
        c.notes.push_back(name + ": sampled identity outside 3 standard errors");
      }
    }
    c.expected = {{"circle", "< 1e-12"}, {"hexagon", "within 3 standard errors"}};
    return c;
  }

  Check euler_characteristic() {
    auto c = make_check("euler-characteristic", "Euler characteristic at least k");
    c.pass = true;
    bool strict = true;
    for (const auto& name : example_names()) {
      auto ex = example(name);
      ex.policy.cap = options_.prefix_cap;
      const std::size_t n_max = ex.hexagon ? 6 : 10;
      const auto r = euler_characteristic_check(ex.word, ex.torus_dim, n_max, ex.policy);
      nlohmann::json chis = nlohmann::json::array();
      for (const auto& row : r.rows) chis.push_back({row.n, row.stats.chi, row.stabilized, row.connected});
      c.computed[name] = {{"k", ex.torus_dim}, {"rows", chis}, {"chi_at_least_k_plus_1", r.strict_bound_holds()}};
      if (!r.passed()) {
        c.pass = false;
        c.notes.push_back(name + ": chi below k");
      }
      if (!r.strict_bound_holds()) {
        strict = false;
        c.notes.push_back(name + ": chi below k+1 on some order (recorded only)");
      }
    }
    c.computed["chi_at_least_k_plus_1_everywhere"] = strict;
    c.expected = "chi >= k on every row";
    return c;
  }

  Check spectral() {
    auto c = make_check("spectral", "one real eigenvalue of modulus bigger than 1");
    c.tolerance = 1e-10;
    c.pass = true;
    const std::vector<std::function<long double(long double)>> polys{
        [](long double x) { return x * x - x - 1; },
        [](long double x) { return x * x * x - x * x - x - 1; }};
    for (std::size_t k : {2, 3}) {
      const auto p = perron(abelianization(k_bonacci(k)), options_.tol);
      const double root = bisect_root(polys[k - 2], 1, 2);
      const auto w = fixed_point(k_bonacci(k), Symbol{0}).prefix(1000000);
      std::vector<double> freq(k, 0);
      for (auto s : w.symbols()) freq[s.id] += 1;
      double freq_err = 0;
      for (std::size_t i = 0; i < k; ++i) {
        freq[i] /= static_cast<double>(w.size());
        freq_err = std::max(freq_err, std::fabs(freq[i] - p.right(static_cast<Eigen::Index>(i))));
      }
      const std::string name = "kbonacci-" + std::to_string(k);
      c.computed[name] = {{"eigenvalue", p.eigenvalue},
                          {"bisection_root", root},
                          {"eigen_residual", p.residual},
                          {"frequencies", freq},
                          {"frequency_error", freq_err}};
      if (!(std::fabs(p.eigenvalue - root) < 1e-10)) {
        c.pass = false;
        c.notes.push_back(name + ": eigenvalue differs from the bisection root");
      }
      if (!(freq_err < 1e-3)) {
        c.pass = false;
        c.notes.push_back(name + ": letter frequencies differ from the eigenvector");
      }
    }
    c.expected = {{"eigenvalue", "bisection root within 1e-10"}, {"frequency_error", "< 1e-3"}};
    return c;
  }

  Check fractal_bounded() {
    auto c = make_check("fractal-bounded", "closure of the projection of vertices");
    c.tolerance = 0.05;
    const auto s = k_bonacci(3);
    const auto small = fractal_cloud(s, 100000, options_.tol);
    const auto large = fractal_cloud(s, 200000, options_.tol);
    const double rel = std::fabs(large.radius - small.radius) / small.radius;
    const ContractingProjection proj(large.perron);
    const double v_norm = proj.coordinates(large.perron.right).norm();
    c.computed = {{"radius_1e5", small.radius}, {"radius_2e5", large.radius}, {"relative_change", rel},
                  {"perron_projection_norm", v_norm}};
    c.expected = {{"relative_change", "<= 0.05"}, {"perron_projection_norm", "< 1e-10"}};
    c.pass = rel <= 0.05 && v_norm < 1e-10;
    return c;
  }

  VerifyOptions options_;
  std::mutex mutex_;
  std::map<std::string, std::shared_future<Table>> tables_;
};

inline VerificationReport verify(const VerifyOptions& options = {}) { return Verifier(options).run(); }

}  // namespace rauzy
