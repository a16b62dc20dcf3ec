#pragma once

// Translations on T^k = R^k / Z^k and piecewise translation maps on
// fundamental domains: x -> x + a + n_i on cell D_i, with one integer offset
// n_i per cell. Orbit coding produces the symbolic words studied elsewhere.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rauzy/error.hpp"
#include "rauzy/random.hpp"
#include "rauzy/word.hpp"

namespace rauzy {

using Vec = std::vector<double>;
using IntVec = std::vector<std::int64_t>;

struct TorusTranslation {
  Vec a;  ///< reduced to [0, 1)^k

  explicit TorusTranslation(Vec v) : a(std::move(v)) {
    if (a.empty()) throw error(errc::invalid_arguments, "translation needs k >= 1");
    for (double& c : a) c -= std::floor(c);
  }
  std::size_t k() const noexcept { return a.size(); }
};

/// normal . x <= offset (closed) or < offset (open).
struct HalfSpace {
  Vec normal;
  double offset = 0;
  bool closed = true;

  double slack(std::span<const double> x) const {
    double s = -offset;
    for (std::size_t i = 0; i < normal.size(); ++i) s += normal[i] * x[i];
    return s;  // <= 0 inside
  }

  bool holds(std::span<const double> x) const {
    const double s = slack(x);
    return closed ? s <= 0 : s < 0;
  }
};

/// Lower/left boundaries belong to the cell, upper/right ones do not: a face
/// is closed iff the last non-zero component of its outward normal is negative.
inline bool closed_face(std::span<const double> normal) {
  for (std::size_t i = normal.size(); i-- > 0;) {
    if (normal[i] != 0) return normal[i] < 0;
  }
  return true;
}

class Cell {
 public:
  enum class Kind { interval, polygon, halfspaces };

  static Cell interval(int id, double lo, double hi, IntVec offset) {
    if (!(lo < hi)) throw error(errc::degenerate_geometry, "interval needs lo < hi");
    if (offset.size() != 1) throw error(errc::invalid_arguments, "interval offset must be 1-dimensional");
    Cell c(id, Kind::interval, 1, std::move(offset));
    c.faces_ = {{{-1.0}, -lo, true}, {{1.0}, hi, false}};
    c.lo_ = {lo};
    c.hi_ = {hi};
    c.vertices_ = {{lo}, {hi}};
    return c;
  }

  /// Convex polygon given by its vertices in either orientation.
  static Cell polygon(int id, std::vector<std::array<double, 2>> vertices, IntVec offset) {
    if (offset.size() != 2) throw error(errc::invalid_arguments, "polygon offset must be 2-dimensional");
    if (vertices.size() < 3) throw error(errc::degenerate_geometry, "polygon needs 3 vertices");
    double twice_area = 0;
    const std::size_t m = vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % m];
      twice_area += p[0] * q[1] - q[0] * p[1];
    }
    if (std::fabs(twice_area) < 1e-14) throw error(errc::degenerate_geometry, "polygon has zero area");
    if (twice_area < 0) std::reverse(vertices.begin(), vertices.end());

    Cell c(id, Kind::polygon, 2, std::move(offset));
    c.measure_ = std::fabs(twice_area) / 2;
    c.lo_ = {vertices[0][0], vertices[0][1]};
    c.hi_ = c.lo_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % m];
      const auto& r = vertices[(i + 2) % m];
      const double turn = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
      if (turn < -1e-14) throw error(errc::degenerate_geometry, "polygon cells must be convex");
      const double dx = q[0] - p[0];
      const double dy = q[1] - p[1];
      const double len = std::hypot(dx, dy);
      if (len == 0) throw error(errc::degenerate_geometry, "repeated polygon vertex");
      Vec normal{dy / len, -dx / len};
      const double off = normal[0] * p[0] + normal[1] * p[1];
      const bool closed = closed_face(normal);
      c.faces_.push_back({std::move(normal), off, closed});
      for (int d = 0; d < 2; ++d) {
        c.lo_[d] = std::min(c.lo_[d], p[d]);
        c.hi_[d] = std::max(c.hi_[d], p[d]);
      }
      c.vertices_.push_back({p[0], p[1]});
    }
    return c;
  }

  /// Bounded intersection of half-spaces normal . x <= offset; the box must
  /// contain the cell. Its measure is estimated by sampling when needed.
  static Cell halfspaces(int id, std::vector<std::pair<Vec, double>> constraints, Vec lo, Vec hi, IntVec offset) {
    const std::size_t k = offset.size();
    if (k == 0 || lo.size() != k || hi.size() != k) throw error(errc::invalid_arguments, "dimension mismatch");
    Cell c(id, Kind::halfspaces, k, std::move(offset));
    for (auto& [normal, off] : constraints) {
      if (normal.size() != k) throw error(errc::invalid_arguments, "half-space normal has wrong dimension");
      double len = 0;
      for (double v : normal) len += v * v;
      len = std::sqrt(len);
      if (len == 0) throw error(errc::degenerate_geometry, "zero half-space normal");
      for (double& v : normal) v /= len;
      const bool closed = closed_face(normal);
      c.faces_.push_back({std::move(normal), off / len, closed});
    }
    c.lo_ = std::move(lo);
    c.hi_ = std::move(hi);
    return c;
  }

  int id() const noexcept { return id_; }
  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dim_; }
  const IntVec& offset() const noexcept { return offset_; }
  const std::vector<HalfSpace>& faces() const noexcept { return faces_; }
  const Vec& lower() const noexcept { return lo_; }
  const Vec& upper() const noexcept { return hi_; }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }

  Cell with_offset(IntVec offset) const {
    if (offset.size() != dim_) throw error(errc::invalid_arguments, "offset has wrong dimension");
    Cell c = *this;
    c.offset_ = std::move(offset);
    return c;
  }

  /// Exact Lebesgue measure for intervals and polygons.
  std::optional<double> exact_measure() const {
    if (kind_ == Kind::interval) return hi_[0] - lo_[0];
    return measure_;
  }

  /// Half-open membership.
  bool contains(std::span<const double> x) const {
    return std::all_of(faces_.begin(), faces_.end(), [&](const HalfSpace& f) { return f.holds(x); });
  }

  /// Largest face violation; <= 0 on the closed cell.
  double violation(std::span<const double> x) const {
    double v = -INFINITY;
    for (const auto& f : faces_) v = std::max(v, f.slack(x));
    return v;
  }

 private:
  Cell(int id, Kind kind, std::size_t dim, IntVec offset)
      : id_(id), kind_(kind), dim_(dim), offset_(std::move(offset)) {}

  int id_;
  Kind kind_;
  std::size_t dim_;
  IntVec offset_;
  std::vector<HalfSpace> faces_;
  Vec lo_, hi_;
  std::vector<Vec> vertices_;
  std::optional<double> measure_;
};

struct Location {
  enum class Status { inside, ambiguous, outside };
  Status status = Status::outside;
  std::size_t cell = 0;  ///< 0-based index into cells(), valid when inside
};

/// A fundamental domain of T^k cut into cells; on cell i the map is
/// x -> x + a + n_i.
class PiecewiseTranslation {
 public:
  /// `a` need not be reduced: its integer part is moved into the offsets.
  PiecewiseTranslation(const Vec& a, std::vector<Cell> cells, std::string name = {}, double tolerance = 1e-9)
      : translation_(a), cells_(std::move(cells)), name_(std::move(name)), eps_(tolerance) {
    for (auto& c : cells_) {
      if (c.dimension() != a.size()) throw error(errc::invalid_arguments, "cell dimension differs from k");
      IntVec n = c.offset();
      for (std::size_t d = 0; d < a.size(); ++d) n[d] += static_cast<std::int64_t>(std::floor(a[d]));
      c = c.with_offset(std::move(n));
    }
    if (cells_.empty()) throw error(errc::invalid_arguments, "need at least one cell");
    if (cells_.size() > Alphabet::max_size) throw error(errc::invalid_arguments, "too many cells");
    if (!(eps_ >= 0)) throw error(errc::invalid_arguments, "tolerance must be non-negative");
    lo_ = cells_.front().lower();
    hi_ = cells_.front().upper();
    for (const auto& c : cells_) {
      if (c.dimension() != k()) throw error(errc::invalid_arguments, "cell dimension differs from k");
      for (std::size_t d = 0; d < k(); ++d) {
        lo_[d] = std::min(lo_[d], c.lower()[d]);
        hi_[d] = std::max(hi_[d], c.upper()[d]);
      }
    }
  }

  std::size_t k() const noexcept { return translation_.k(); }
  std::size_t m() const noexcept { return cells_.size(); }
  const Vec& a() const noexcept { return translation_.a; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const std::string& name() const noexcept { return name_; }
  double tolerance() const noexcept { return eps_; }
  const Vec& lower() const noexcept { return lo_; }
  const Vec& upper() const noexcept { return hi_; }

  /// Owning cell of x, or `ambiguous` when x lies within the tolerance band
  /// of a second cell (or of some cell while owned by none).
  Location locate(std::span<const double> x) const {
    std::optional<std::size_t> owner;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].contains(x)) {
        owner = i;
        break;
      }
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (owner && i == *owner) continue;
      if (cells_[i].violation(x) <= eps_) return {Location::Status::ambiguous, 0};
    }
    if (!owner) return {Location::Status::outside, 0};
    return {Location::Status::inside, *owner};
  }

  /// In-place x -> x + a + n_cell.
  void step(std::span<double> x, std::size_t cell) const {
    const auto& n = cells_[cell].offset();
    for (std::size_t d = 0; d < k(); ++d) x[d] += a()[d] + static_cast<double>(n[d]);
  }

  nlohmann::json to_json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : cells_) {
      nlohmann::json cell{{"id", c.id()}, {"offset", c.offset()}};
      switch (c.kind()) {
        case Cell::Kind::interval:
          cell["kind"] = "interval";
          cell["geometry"] = {c.lower()[0], c.upper()[0]};
          break;
        case Cell::Kind::polygon:
          cell["kind"] = "polygon";
          cell["geometry"] = c.vertices();
          break;
        case Cell::Kind::halfspaces: {
          cell["kind"] = "halfplane-intersection";
          nlohmann::json hs = nlohmann::json::array();
          for (const auto& f : c.faces()) hs.push_back({{"normal", f.normal}, {"offset", f.offset}});
          cell["geometry"] = {{"halfspaces", hs}, {"bbox", {c.lower(), c.upper()}}};
          break;
        }
      }
      cells.push_back(std::move(cell));
    }
    nlohmann::json lattice = nlohmann::json::array();
    for (std::size_t i = 0; i < k(); ++i) {
      std::vector<int> row(k(), 0);
      row[i] = 1;
      lattice.push_back(row);
    }
    return {{"name", name_}, {"k", k()}, {"a", a()}, {"cells", cells}, {"lattice", lattice}, {"tolerance", eps_}};
  }

  static PiecewiseTranslation from_json(const nlohmann::json& j) {
    try {
      const auto k = j.at("k").get<std::size_t>();
      auto a = j.at("a").get<Vec>();
      if (a.size() != k) throw error(errc::parse_error, "a must have k components");
      if (j.contains("lattice")) {
        const auto lattice = j.at("lattice").get<std::vector<std::vector<double>>>();
        for (std::size_t r = 0; r < lattice.size(); ++r)
          for (std::size_t c = 0; c < lattice[r].size(); ++c)
            if (lattice[r][c] != (r == c ? 1.0 : 0.0))
              throw error(errc::parse_error, "cells must be expressed in coordinates where the lattice is Z^k");
      }
      std::vector<Cell> cells;
      for (const auto& cj : j.at("cells")) {
        const int id = cj.at("id").get<int>();
        auto offset = cj.at("offset").get<IntVec>();
        const auto kind = cj.at("kind").get<std::string>();
        const auto& g = cj.at("geometry");
        if (kind == "interval") {
          cells.push_back(Cell::interval(id, g.at(0).get<double>(), g.at(1).get<double>(), std::move(offset)));
        } else if (kind == "polygon") {
          cells.push_back(Cell::polygon(id, g.get<std::vector<std::array<double, 2>>>(), std::move(offset)));
        } else if (kind == "halfplane-intersection") {
          std::vector<std::pair<Vec, double>> hs;
          for (const auto& h : g.at("halfspaces")) hs.emplace_back(h.at("normal").get<Vec>(), h.at("offset").get<double>());
          cells.push_back(Cell::halfspaces(id, std::move(hs), g.at("bbox").at(0).get<Vec>(),
                                           g.at("bbox").at(1).get<Vec>(), std::move(offset)));
        } else {
          throw error(errc::parse_error, "unknown cell kind '" + kind + "'");
        }
      }
      return PiecewiseTranslation(a, std::move(cells), j.value("name", std::string{}), j.value("tolerance", 1e-9));
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::parse_error, e.what());
    }
  }

 private:
  TorusTranslation translation_;
  std::vector<Cell> cells_;
  std::string name_;
  double eps_;
  Vec lo_, hi_;
};

struct Orbit {
  std::vector<Vec> points;          ///< x_0 .. x_J, each inside exactly one cell
  std::vector<std::size_t> cells;   ///< 0-based cell of each point
  bool boundary_hit = false;        ///< x_{J+1} fell in a tolerance band

  void write_csv(std::ostream& os) const {
    const std::size_t k = points.empty() ? 0 : points.front().size();
    os << "step";
    for (std::size_t d = 0; d < k; ++d) os << ",x" << (d + 1);
    os << ",cell\n";
    os.precision(17);
    for (std::size_t j = 0; j < points.size(); ++j) {
      os << j;
      for (double c : points[j]) os << ',' << c;
      os << ',' << (cells[j] + 1) << '\n';
    }
  }
};

inline Location require_start(const PiecewiseTranslation& t, std::span<const double> x0) {
  if (x0.size() != t.k()) throw error(errc::invalid_arguments, "start point has wrong dimension");
  auto loc = t.locate(x0);
  if (loc.status == Location::Status::outside) throw error(errc::outside_domain, "start point is outside the domain");
  return loc;
}

/// x_0, ..., x_N (fewer if a point lands in a tolerance band).
inline Orbit orbit(const PiecewiseTranslation& t, std::span<const double> x0, std::size_t n) {
  Orbit out;
  auto loc = require_start(t, x0);
  Vec x(x0.begin(), x0.end());
  for (std::size_t j = 0; j <= n; ++j) {
    if (loc.status != Location::Status::inside) {
      out.boundary_hit = true;
      break;
    }
    out.points.push_back(x);
    out.cells.push_back(loc.cell);
    if (j == n) break;
    t.step(x, loc.cell);
    loc = t.locate(x);
  }
  return out;
}

/// Cell indices along the orbit of x0. The stream ends early (truncation)
/// if a point lands in a tolerance band.
inline LazyWord coding(const PiecewiseTranslation& t, std::span<const double> x0) {
  require_start(t, x0);
  struct Coder final : Traversal {
    PiecewiseTranslation map;
    Vec x;
    bool stopped = false;
    Coder(PiecewiseTranslation m, Vec start) : map(std::move(m)), x(std::move(start)) {}
    std::optional<Symbol> next() override {
      if (stopped) return std::nullopt;
      const auto loc = map.locate(x);
      if (loc.status != Location::Status::inside) {
        stopped = true;
        return std::nullopt;
      }
      map.step(x, loc.cell);
      return Symbol{static_cast<std::uint8_t>(loc.cell)};
    }
  };
  return LazyWord(make_alphabet(t.m()), [t, start = Vec(x0.begin(), x0.end())] {
    return std::make_unique<Coder>(t, start);
  });
}

/// D_1 = [0, 1 - alpha) shifted by alpha, D_2 = [1 - alpha, 1) shifted by alpha - 1.
inline PiecewiseTranslation circle_rotation(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw error(errc::invalid_arguments, "alpha must lie in (0, 1)");
  std::vector<Cell> cells{Cell::interval(1, 0.0, 1.0 - alpha, {0}), Cell::interval(2, 1.0 - alpha, 1.0, {-1})};
  return PiecewiseTranslation({alpha}, std::move(cells), "circle");
}

using Vec2 = std::array<double, 2>;

/// Hexagon with consecutive edge vectors u, v, w, -u, -v, -w starting at the
/// origin, cut at the interior point v into three parallelograms:
///   span(u, v) at 0 moved by w, span(v, w) at 0 moved by u,
///   span(u, w) at v moved by -v.
/// Modulo the lattice spanned by u+v and v+w the three moves agree. The
/// result is expressed in coordinates of that lattice basis, so the torus is
/// R^2 / Z^2 and the domain has area 1.
inline PiecewiseTranslation hexagon_translation(Vec2 u, Vec2 v, Vec2 w) {
  auto det = [](Vec2 p, Vec2 q) { return p[0] * q[1] - p[1] * q[0]; };
  const double duv = det(u, v), dvw = det(v, w), duw = det(u, w);
  const bool same_sign = (duv > 0 && dvw > 0 && duw > 0) || (duv < 0 && dvw < 0 && duw < 0);
  if (!same_sign || std::fabs(duv) < 1e-12 || std::fabs(dvw) < 1e-12 || std::fabs(duw) < 1e-12) {
    throw error(errc::degenerate_geometry, "u, v, w do not bound a convex hexagon");
  }
  // Lattice basis b1 = u + v, b2 = v + w; coordinates solve B c = p.
  const Vec2 b1{u[0] + v[0], u[1] + v[1]};
  const Vec2 b2{v[0] + w[0], v[1] + w[1]};
  const double db = det(b1, b2);
  auto coords = [&](Vec2 p) -> Vec2 { return {det(p, b2) / db, det(b1, p) / db}; };

  const Vec2 vc = coords(v);
  // In lattice coordinates u = e1 - v and w = e2 - v exactly.
  const Vec2 uc{1.0 - vc[0], -vc[1]};
  const Vec2 wc{-vc[0], 1.0 - vc[1]};
  auto add = [](Vec2 p, Vec2 q) -> Vec2 { return {p[0] + q[0], p[1] + q[1]}; };
  const Vec2 o{0.0, 0.0};

  // a = -v, so w = a + e2, u = a + e1 and -v = a.
  std::vector<Cell> cells{
      Cell::polygon(1, {o, vc, add(vc, uc), uc}, {0, 1}),
      Cell::polygon(2, {o, vc, add(vc, wc), wc}, {1, 0}),
      Cell::polygon(3, {vc, add(vc, uc), add(add(vc, uc), wc), add(vc, wc)}, {0, 0}),
  };
  return PiecewiseTranslation({-vc[0], -vc[1]}, std::move(cells), "hexagon");
}

/// Edge vectors of the hexagon (0,0),(2,3),(4,3),(6,-3),(4,-6),(2,-6) with the
/// cut point v perturbed by up to `spread` (in lattice coordinates) from a
/// seeded stream, so that the translation is generic.
struct HexagonParameters {
  Vec2 u, v, w;
};

inline HexagonParameters hexagon_parameters(std::uint64_t seed, double spread = 0.05) {
  const Vec2 u{2.0, 3.0}, v{2.0, 0.0}, w{2.0, -6.0};
  const Vec2 b1{u[0] + v[0], u[1] + v[1]};
  const Vec2 b2{v[0] + w[0], v[1] + w[1]};
  auto rng = derive_stream(seed, "hexagon");
  const double d1 = rng.uniform(-spread, spread);
  const double d2 = rng.uniform(-spread, spread);
  const Vec2 vp{v[0] + d1 * b1[0] + d2 * b2[0], v[1] + d1 * b1[1] + d2 * b2[1]};
  return {{b1[0] - vp[0], b1[1] - vp[1]}, vp, {b2[0] - vp[0], b2[1] - vp[1]}};
}

inline PiecewiseTranslation default_hexagon(std::uint64_t seed) {
  const auto p = hexagon_parameters(seed);
  return hexagon_translation(p.u, p.v, p.w);
}

/// Area-weighted centroid of the interval/polygon cells (the barycentre of
/// the domain).
inline Vec domain_centroid(const PiecewiseTranslation& t) {
  Vec c(t.k(), 0.0);
  double total = 0;
  for (const auto& cell : t.cells()) {
    const auto measure = cell.exact_measure();
    if (!measure) throw error(errc::invalid_arguments, "centroid needs interval or polygon cells");
    Vec cc(t.k(), 0.0);
    if (cell.kind() == Cell::Kind::interval) {
      cc[0] = (cell.lower()[0] + cell.upper()[0]) / 2;
    } else {
      const auto& p = cell.vertices();
      double twice = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& q = p[(i + 1) % p.size()];
        const double cross = p[i][0] * q[1] - q[0] * p[i][1];
        twice += cross;
        cc[0] += (p[i][0] + q[0]) * cross;
        cc[1] += (p[i][1] + q[1]) * cross;
      }
      cc[0] /= 3 * twice;
      cc[1] /= 3 * twice;
    }
    for (std::size_t d = 0; d < t.k(); ++d) c[d] += *measure * cc[d];
    total += *measure;
  }
  for (double& x : c) x /= total;
  return c;
}

/// Exact cylinder measures of all length-n codings for interval cells.
///
/// Cylinder boundaries are the preimages T^-j of cell endpoints, j < n; every
/// gap between consecutive boundary points carries one factor.
inline std::map<FiniteWord, double> cylinder_measures_1d(const PiecewiseTranslation& t, std::size_t n) {
  if (t.k() != 1) throw error(errc::invalid_arguments, "cylinder measures need a 1-dimensional map");
  if (n == 0) throw error(errc::invalid_arguments, "n must be positive");
  for (const auto& c : t.cells()) {
    if (c.kind() != Cell::Kind::interval) throw error(errc::invalid_arguments, "cells must be intervals");
  }
  std::vector<double> level;
  for (const auto& c : t.cells()) {
    level.push_back(c.lower()[0]);
    level.push_back(c.upper()[0]);
  }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double x, double y) { return std::fabs(x - y) < 1e-14; }), v.end());
  };
  dedupe(level);
  std::vector<double> points = level;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<double> pre;
    for (double y : level) {
      for (const auto& c : t.cells()) {
        const double x = y - t.a()[0] - static_cast<double>(c.offset()[0]);
        if (x >= c.lower()[0] - 1e-14 && x <= c.upper()[0] + 1e-14) pre.push_back(x);
      }
    }
    dedupe(pre);
    points.insert(points.end(), pre.begin(), pre.end());
    level = std::move(pre);
  }
  dedupe(points);

  const auto alphabet = make_alphabet(t.m());
  std::map<FiniteWord, double> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double len = points[i + 1] - points[i];
    if (len <= 0) continue;
    Vec x{(points[i] + points[i + 1]) / 2};
    if (t.locate(x).status == Location::Status::outside) continue;
    std::vector<Symbol> code;
    for (std::size_t j = 0; j < n; ++j) {
      std::optional<std::size_t> owner;
      for (std::size_t c = 0; c < t.m(); ++c) {
        if (t.cells()[c].contains(x)) owner = c;
      }
      if (!owner) throw error(errc::outside_domain, "cylinder midpoint left the domain");
      code.push_back(Symbol{static_cast<std::uint8_t>(*owner)});
      t.step(x, *owner);
    }
    out[FiniteWord(alphabet, std::move(code))] += len;
  }
  return out;
}

struct MeasureReport {
  std::vector<double> measures;          ///< A_i (exact when available, else sampled)
  std::vector<double> sampled_measures;  ///< Monte-Carlo A_i
  std::vector<double> sampled_errors;    ///< standard error of each sampled A_i
  bool exact = false;                    ///< every cell had an exact measure
  /// a + sum A_i n_i reduced to the nearest lattice point, per coordinate.
  Vec flow_residual;
  double volume_residual = 0;  ///< sum A_i - 1
  Vec sampled_flow_residual;
  Vec sampled_flow_error;
  double sampled_volume_residual = 0;
  double sampled_volume_error = 0;
  std::size_t samples = 0;

  double flow_residual_norm() const {
    double s = 0;
    for (double r : flow_residual) s = std::max(s, std::fabs(r));
    return s;
  }
};

namespace detail {
inline double nearest_lattice_residual(double x) { return x - std::round(x); }
}  // namespace detail

/// Checks 0 = a + sum A_i n_i (mod Z^k) and sum A_i = 1, exactly where cell
/// measures are known and by uniform sampling of the bounding box otherwise.
inline MeasureReport verify_measure_identities(const PiecewiseTranslation& t, std::size_t samples,
                                               std::uint64_t seed = 0) {
  const std::size_t k = t.k(), m = t.m();
  MeasureReport r;
  r.samples = samples;
  r.exact = std::all_of(t.cells().begin(), t.cells().end(), [](const Cell& c) { return c.exact_measure().has_value(); });

  auto residuals = [&](const std::vector<double>& measures, Vec& flow, double& volume) {
    flow = t.a();
    volume = -1;
    for (std::size_t i = 0; i < m; ++i) {
      volume += measures[i];
      for (std::size_t d = 0; d < k; ++d) flow[d] += measures[i] * static_cast<double>(t.cells()[i].offset()[d]);
    }
    for (double& f : flow) f = detail::nearest_lattice_residual(f);
  };

  if (samples > 0) {
    auto rng = derive_stream(seed, "measure:" + t.name());
    double box = 1;
    for (std::size_t d = 0; d < k; ++d) box *= t.upper()[d] - t.lower()[d];
    std::vector<double> hits(m, 0);
    // Per-sample estimator X = box * (1_D, sum_i 1_{D_i} n_i): track sums and
    // sums of squares for the standard errors.
    Vec flow_sum(k, 0), flow_sq(k, 0);
    double vol_sum = 0, vol_sq = 0;
    Vec x(k);
    for (std::size_t s = 0; s < samples; ++s) {
      for (std::size_t d = 0; d < k; ++d) x[d] = rng.uniform(t.lower()[d], t.upper()[d]);
      std::optional<std::size_t> owner;
      for (std::size_t i = 0; i < m; ++i) {
        if (t.cells()[i].contains(x)) {
          owner = i;
          break;
        }
      }
      if (!owner) continue;
      hits[*owner] += 1;
      vol_sum += box;
      vol_sq += box * box;
      for (std::size_t d = 0; d < k; ++d) {
        const double v = box * static_cast<double>(t.cells()[*owner].offset()[d]);
        flow_sum[d] += v;
        flow_sq[d] += v * v;
      }
    }
    const double ns = static_cast<double>(samples);
    auto se = [&](double sum, double sq) {
      const double mean = sum / ns;
      return std::sqrt(std::max(0.0, sq / ns - mean * mean) / ns);
    };
    for (std::size_t i = 0; i < m; ++i) {
      const double p = hits[i] / ns;
      r.sampled_measures.push_back(box * p);
      r.sampled_errors.push_back(box * std::sqrt(p * (1 - p) / ns));
    }
    residuals(r.sampled_measures, r.sampled_flow_residual, r.sampled_volume_residual);
    for (std::size_t d = 0; d < k; ++d) r.sampled_flow_error.push_back(se(flow_sum[d], flow_sq[d]));
    r.sampled_volume_error = se(vol_sum, vol_sq);
  }

  for (std::size_t i = 0; i < m; ++i) {
    const auto exact = t.cells()[i].exact_measure();
    r.measures.push_back(exact ? *exact : (r.sampled_measures.empty() ? 0.0 : r.sampled_measures[i]));
  }
  residuals(r.measures, r.flow_residual, r.volume_residual);
  return r;
}

/// Fraction of uniform points of [0,1)^k having exactly one lattice translate
/// inside exactly one cell.
inline double fundamental_domain_coverage(const PiecewiseTranslation& t, std::size_t samples, std::uint64_t seed = 0) {
  const std::size_t k = t.k();
  auto rng = derive_stream(seed, "coverage:" + t.name());
  std::vector<std::int64_t> zlo(k), zhi(k);
  for (std::size_t d = 0; d < k; ++d) {
    zlo[d] = static_cast<std::int64_t>(std::floor(t.lower()[d])) - 1;
    zhi[d] = static_cast<std::int64_t>(std::ceil(t.upper()[d])) + 1;
  }
  std::size_t good = 0;
  Vec x(k), y(k);
  std::vector<std::int64_t> z(k);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t d = 0; d < k; ++d) x[d] = rng.uniform();
    std::size_t hits = 0;
    z = zlo;
    while (true) {
      for (std::size_t d = 0; d < k; ++d) y[d] = x[d] + static_cast<double>(z[d]);
      for (const auto& c : t.cells()) hits += c.contains(y) ? 1 : 0;
      std::size_t d = 0;
      while (d < k && ++z[d] > zhi[d]) z[d] = zlo[d], ++d;
      if (d == k) break;
    }
    good += hits == 1 ? 1 : 0;
  }
  return samples == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(samples);
}

/// Fraction of uniform points of the domain with exactly one preimage cell,
/// i.e. how well T(D_1), ..., T(D_m) re-tile D.
inline double image_coverage(const PiecewiseTranslation& t, std::size_t samples, std::uint64_t seed = 0) {
  const std::size_t k = t.k();
  auto rng = derive_stream(seed, "image:" + t.name());
  std::size_t inside = 0, good = 0;
  Vec y(k), x(k);
  while (inside < samples) {
    for (std::size_t d = 0; d < k; ++d) y[d] = rng.uniform(t.lower()[d], t.upper()[d]);
    bool in_domain = false;
    for (const auto& c : t.cells()) in_domain = in_domain || c.contains(y);
    if (!in_domain) continue;
    ++inside;
    std::size_t pre = 0;
    for (const auto& c : t.cells()) {
      for (std::size_t d = 0; d < k; ++d) x[d] = y[d] - t.a()[d] - static_cast<double>(c.offset()[d]);
      pre += c.contains(x) ? 1 : 0;
    }
    good += pre == 1 ? 1 : 0;
  }
  return samples == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(samples);
}

inline constexpr double golden_ratio = std::numbers::phi;

}  // namespace rauzy
