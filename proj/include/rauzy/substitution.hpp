#pragma once

// Substitutions (free monoid morphisms), their fixed points, abelianization
// matrices, Perron data and Rauzy fractal point clouds.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rauzy/error.hpp"
#include "rauzy/word.hpp"

namespace rauzy {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

class Substitution {
 public:
  Substitution(AlphabetRef alphabet, std::vector<std::vector<Symbol>> images)
      : alphabet_(std::move(alphabet)), images_(std::move(images)) {
    if (!alphabet_) throw error(errc::invalid_arguments, "substitution needs an alphabet");
    if (images_.size() != alphabet_->size()) {
      throw error(errc::alphabet_mismatch, "need exactly one image per letter");
    }
    for (const auto& img : images_) {
      if (img.empty()) throw error(errc::invalid_arguments, "images must be non-empty");
      for (Symbol s : img) {
        if (!alphabet_->contains(s)) throw error(errc::alphabet_mismatch, "image letter outside alphabet");
      }
    }
  }

  /// Images written with the alphabet's labels, one per letter in order.
  static Substitution parse(AlphabetRef alphabet, const std::vector<std::string>& images) {
    std::vector<std::vector<Symbol>> out;
    out.reserve(images.size());
    for (const auto& text : images) out.push_back(FiniteWord::parse(alphabet, text).symbols());
    return Substitution(std::move(alphabet), std::move(out));
  }

  const AlphabetRef& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return images_.size(); }
  const std::vector<Symbol>& image(Symbol s) const { return images_.at(s.id); }
  const std::vector<std::vector<Symbol>>& images() const noexcept { return images_; }

  bool operator==(const Substitution& other) const {
    return *alphabet_ == *other.alphabet_ && images_ == other.images_;
  }

 private:
  AlphabetRef alphabet_;
  std::vector<std::vector<Symbol>> images_;
};

inline FiniteWord apply(const Substitution& s, const FiniteWord& w) {
  if (!(*w.alphabet() == *s.alphabet())) {
    throw error(errc::alphabet_mismatch, "word and substitution use different alphabets");
  }
  std::vector<Symbol> out;
  for (Symbol a : w.symbols()) {
    const auto& img = s.image(a);
    out.insert(out.end(), img.begin(), img.end());
  }
  return FiniteWord(s.alphabet(), std::move(out));
}

/// outer o inner, i.e. a -> outer(inner(a)).
inline Substitution compose(const Substitution& outer, const Substitution& inner) {
  if (!(*outer.alphabet() == *inner.alphabet())) {
    throw error(errc::alphabet_mismatch, "cannot compose substitutions over different alphabets");
  }
  std::vector<std::vector<Symbol>> images;
  for (const auto& img : inner.images()) {
    images.push_back(apply(outer, FiniteWord(inner.alphabet(), img)).symbols());
  }
  return Substitution(inner.alphabet(), std::move(images));
}

/// a_i -> a_1 a_{i+1} for i < k, a_k -> a_1.
inline Substitution k_bonacci(std::size_t k) {
  if (k == 0 || k > Alphabet::max_size) throw error(errc::invalid_arguments, "k-bonacci needs 1 <= k <= 256");
  std::vector<std::vector<Symbol>> images(k);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    images[i] = {Symbol{0}, Symbol{static_cast<std::uint8_t>(i + 1)}};
  }
  images[k - 1] = {Symbol{0}};
  return Substitution(make_alphabet(k), std::move(images));
}

/// The fixed point s^infinity(seed).
///
/// The seed's image must start with the seed. An image equal to the seed
/// itself yields the constant word, which keeps k_bonacci(1) usable.
inline LazyWord fixed_point(const Substitution& s, Symbol seed) {
  if (!s.alphabet()->contains(seed)) throw error(errc::alphabet_mismatch, "seed outside alphabet");
  const auto& img = s.image(seed);
  if (img.front() != seed) throw error(errc::non_prolongable, "image of seed does not start with seed");
  if (img.size() == 1) return LazyWord::constant(s.alphabet(), seed);

  struct Expansion final : Traversal {
    std::vector<std::vector<std::uint8_t>> images;
    std::vector<std::uint8_t> word;  // prefix of the fixed point built so far
    std::size_t expanded = 1;        // word = s(word[0 .. expanded))
    std::size_t pos = 0;

    std::optional<Symbol> next() override {
      // s(w) = w, so the image of word[expanded] continues the prefix.
      while (pos >= word.size()) {
        const auto& img = images[word[expanded++]];
        word.insert(word.end(), img.begin(), img.end());
      }
      return Symbol{word[pos++]};
    }
  };

  std::vector<std::vector<std::uint8_t>> raw;
  for (const auto& i : s.images()) {
    std::vector<std::uint8_t> r;
    for (Symbol x : i) r.push_back(x.id);
    raw.push_back(std::move(r));
  }
  return LazyWord(s.alphabet(), [raw = std::move(raw), seed] {
    auto t = std::make_unique<Expansion>();
    t->images = raw;
    t->word = raw[seed.id];
    return t;
  });
}

/// Entry (i, j) counts the occurrences of letter i in the image of letter j.
inline IntMatrix abelianization(const Substitution& s) {
  const auto k = static_cast<Eigen::Index>(s.size());
  IntMatrix m = IntMatrix::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Symbol a : s.images()[static_cast<std::size_t>(j)]) m(a.id, j) += 1;
  }
  return m;
}

/// Some power of M (up to k^2) is entrywise positive.
inline bool is_primitive(const IntMatrix& m) {
  const auto k = m.rows();
  if (k == 0 || m.cols() != k) return false;
  using Pattern = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
  Pattern base = (m.array() > 0).cast<std::uint8_t>();
  Pattern power = base;
  for (Eigen::Index step = 1; step <= k * k; ++step) {
    if ((power.array() > 0).all()) return true;
    Pattern next = Pattern::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index l = 0; l < k; ++l)
        if (power(i, l))
          for (Eigen::Index j = 0; j < k; ++j)
            if (base(l, j)) next(i, j) = 1;
    power = std::move(next);
  }
  return (power.array() > 0).all();
}

struct PerronData {
  double eigenvalue = 0;
  Eigen::VectorXd right;  ///< M v = lambda v, entries sum to 1
  Eigen::VectorXd left;   ///< M^T l = lambda l, entries sum to 1
  double residual = 0;    ///< max-norm of both eigen-equations
  std::size_t iterations = 0;
};

/// Dominant eigenvalue and positive eigenvectors by power iteration.
inline PerronData perron(const IntMatrix& m, double tol = 1e-12, std::size_t max_iterations = 100000) {
  if (!is_primitive(m)) throw error(errc::non_primitive, "matrix is not primitive");
  const Eigen::MatrixXd a = m.cast<double>();
  const auto k = a.rows();

  auto iterate = [&](const Eigen::MatrixXd& op, Eigen::VectorXd& x) { x = op * x; x /= x.sum(); };
  auto residual_of = [](const Eigen::MatrixXd& op, const Eigen::VectorXd& x, double lambda) {
    return (op * x - lambda * x).lpNorm<Eigen::Infinity>();
  };

  const Eigen::MatrixXd at = a.transpose();
  PerronData out;
  out.right = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
  out.left = out.right;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    iterate(a, out.right);
    iterate(at, out.left);
    out.eigenvalue = (a * out.right).sum();  // right sums to 1
    out.residual = std::max(residual_of(a, out.right, out.eigenvalue), residual_of(at, out.left, out.eigenvalue));
    out.iterations = it;
    if (out.residual < tol) break;
  }
  if (!(out.residual < tol)) {
    throw error(errc::non_convergence, "power iteration did not reach the requested residual");
  }
  if (out.eigenvalue <= 1.0 + tol) {
    throw error(errc::non_expanding, "dominant eigenvalue is not larger than 1");
  }
  return out;
}

/// Lattice path of letter-count vectors of the prefixes of a word.
class BrokenLine {
 public:
  BrokenLine(std::size_t dimension, std::vector<std::int64_t> coordinates, std::vector<Symbol> steps)
      : dim_(dimension), coords_(std::move(coordinates)), steps_(std::move(steps)) {}

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t vertex_count() const noexcept { return coords_.size() / dim_; }
  std::span<const std::int64_t> vertex(std::size_t j) const {
    return std::span<const std::int64_t>(coords_).subspan(j * dim_, dim_);
  }
  /// The letter following vertex j.
  const std::vector<Symbol>& steps() const noexcept { return steps_; }

 private:
  std::size_t dim_;
  std::vector<std::int64_t> coords_;
  std::vector<Symbol> steps_;
};

/// N+1 vertices: vertex j is the abelianization of the length-j prefix.
inline BrokenLine broken_line(const LazyWord& w, std::size_t n) {
  if (n == 0) throw error(errc::invalid_arguments, "broken line needs N >= 1");
  const std::size_t k = w.alphabet()->size();
  auto prefix = w.prefix(n);
  if (prefix.size() < n) throw error(errc::invalid_arguments, "word truncated before N letters");
  std::vector<std::int64_t> coords((n + 1) * k, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::copy_n(coords.begin() + static_cast<std::ptrdiff_t>(j * k), k,
                coords.begin() + static_cast<std::ptrdiff_t>((j + 1) * k));
    coords[(j + 1) * k + prefix[j].id] += 1;
  }
  return BrokenLine(k, std::move(coords), prefix.symbols());
}

/// Projection onto H_c (orthogonal complement of the right Perron vector)
/// along H_e (the Perron direction), in a fixed orthonormal basis of H_c.
class ContractingProjection {
 public:
  explicit ContractingProjection(const PerronData& data, double tol = 1e-10)
      : right_(data.right), left_(data.left) {
    const auto k = right_.size();
    // Gram-Schmidt on e_1..e_k after removing the Perron direction.
    std::vector<Eigen::VectorXd> frame{right_.normalized()};
    for (Eigen::Index i = 0; i < k && static_cast<Eigen::Index>(basis_.size()) + 1 < k; ++i) {
      Eigen::VectorXd r = Eigen::VectorXd::Unit(k, i);
      for (const auto& q : frame) r -= r.dot(q) * q;
      const double norm = r.norm();
      if (norm <= tol) continue;
      r /= norm;
      frame.push_back(r);
      basis_.push_back(r);
    }
    if (static_cast<Eigen::Index>(basis_.size()) + 1 != k) {
      throw error(errc::degenerate_geometry, "could not build a basis of the complement");
    }
  }

  std::size_t dimension() const noexcept { return basis_.size(); }
  const std::vector<Eigen::VectorXd>& basis() const noexcept { return basis_; }

  /// x - (<l,x>/<l,v>) v; kernel is the Perron direction.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return x - (left_.dot(x) / left_.dot(right_)) * right_; }

  Eigen::VectorXd coordinates(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd p = apply(x);
    Eigen::VectorXd c(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t i = 0; i < basis_.size(); ++i) c(static_cast<Eigen::Index>(i)) = basis_[i].dot(p);
    return c;
  }

 private:
  Eigen::VectorXd right_;
  Eigen::VectorXd left_;
  std::vector<Eigen::VectorXd> basis_;
};

/// Finite approximation of the Rauzy fractal with its natural partition.
struct FractalCloud {
  std::size_t alphabet_size = 0;  ///< k; points live in dimension k-1
  std::size_t requested_points = 0;
  std::vector<double> points;  ///< row-major, (k-1) coordinates per point
  std::vector<Symbol> labels;  ///< letter following each projected vertex
  std::vector<Eigen::VectorXd> basis;
  double radius = 0;  ///< max Euclidean norm over the points
  PerronData perron;

  std::size_t dimension() const noexcept { return alphabet_size - 1; }
  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> point(std::size_t j) const {
    return std::span<const double>(points).subspan(j * dimension(), dimension());
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t d = 0; d < dimension(); ++d) os << 'x' << (d + 1) << ',';
    os << "label\n";
    os.precision(17);
    for (std::size_t j = 0; j < size(); ++j) {
      for (double c : point(j)) os << c << ',';
      os << (labels[j].id + 1) << '\n';
    }
  }

  /// "RZYC", uint32 k, uint64 N, then per point (k-1) coordinates followed by
  /// the 1-based label, all as little-endian float64.
  void write_binary(std::ostream& os) const {
    static_assert(std::endian::native == std::endian::little, "binary cloud writer assumes little-endian host");
    os.write("RZYC", 4);
    const auto k = static_cast<std::uint32_t>(alphabet_size);
    const auto n = static_cast<std::uint64_t>(size());
    os.write(reinterpret_cast<const char*>(&k), sizeof k);
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (std::size_t j = 0; j < size(); ++j) {
      for (double c : point(j)) os.write(reinterpret_cast<const char*>(&c), sizeof c);
      const double label = labels[j].id + 1.0;
      os.write(reinterpret_cast<const char*>(&label), sizeof label);
    }
  }
};

/// Reads the binary cloud format back: (k, rows of k float64).
inline std::pair<std::uint32_t, std::vector<double>> read_binary_cloud(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "RZYC", 4) != 0) throw error(errc::parse_error, "bad cloud magic");
  std::uint32_t k = 0;
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&k), sizeof k);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  std::vector<double> data(static_cast<std::size_t>(n) * k);
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) throw error(errc::parse_error, "truncated cloud file");
  return {k, std::move(data)};
}

/// Projects the first N vertices of the broken line of s^infinity(a_1).
inline FractalCloud fractal_cloud(const Substitution& s, std::size_t n, double tol = 1e-12) {
  if (n == 0) throw error(errc::invalid_arguments, "cloud needs at least one point");
  FractalCloud cloud;
  cloud.perron = perron(abelianization(s), tol);
  cloud.alphabet_size = s.size();
  cloud.requested_points = n;
  const ContractingProjection proj(cloud.perron);
  cloud.basis = proj.basis();

  const auto line = broken_line(fixed_point(s, Symbol{0}), n);
  const auto k = static_cast<Eigen::Index>(s.size());
  cloud.points.reserve(n * proj.dimension());
  Eigen::VectorXd x(k);
  for (std::size_t j = 0; j < n; ++j) {
    auto v = line.vertex(j);
    for (Eigen::Index i = 0; i < k; ++i) x(i) = static_cast<double>(v[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd c = proj.coordinates(x);
    cloud.points.insert(cloud.points.end(), c.data(), c.data() + c.size());
    cloud.radius = std::max(cloud.radius, c.norm());
    cloud.labels.push_back(line.steps()[j]);
  }
  return cloud;
}

}  // namespace rauzy
