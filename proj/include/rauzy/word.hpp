#pragma once

// Finite and lazily generated infinite words over small alphabets, factor
// enumeration and the factor complexity function n -> p(n).

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rauzy/error.hpp"

namespace rauzy {

/// Index of a letter in its alphabet.
struct Symbol {
  std::uint8_t id{};

  friend constexpr auto operator<=>(Symbol, Symbol) = default;
};

class Alphabet {
 public:
  static constexpr std::size_t max_size = 256;

  /// Letters labelled "1", "2", ... as in a_1, a_2, ...
  explicit Alphabet(std::size_t size) {
    if (size == 0 || size > max_size) {
      throw error(errc::invalid_arguments, "alphabet size must be in [1, 256]");
    }
    labels_.reserve(size);
    for (std::size_t i = 0; i < size; ++i) labels_.push_back(std::to_string(i + 1));
  }

  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty() || labels_.size() > max_size) {
      throw error(errc::invalid_arguments, "alphabet size must be in [1, 256]");
    }
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) {
      throw error(errc::invalid_arguments, "alphabet labels must be distinct");
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(Symbol s) const noexcept { return s.id < labels_.size(); }
  const std::string& label(Symbol s) const { return labels_.at(s.id); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<Symbol> find(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] == label) return Symbol{static_cast<std::uint8_t>(i)};
    }
    return std::nullopt;
  }

  /// True when every label is a single character, so words print without separators.
  bool compact() const noexcept {
    return std::all_of(labels_.begin(), labels_.end(),
                       [](const std::string& l) { return l.size() == 1; });
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> labels_;
};

using AlphabetRef = std::shared_ptr<const Alphabet>;

inline AlphabetRef make_alphabet(std::size_t size) { return std::make_shared<const Alphabet>(size); }

class FiniteWord {
 public:
  explicit FiniteWord(AlphabetRef alphabet, std::vector<Symbol> symbols = {})
      : alphabet_(std::move(alphabet)), symbols_(std::move(symbols)) {
    if (!alphabet_) throw error(errc::invalid_arguments, "word needs an alphabet");
    for (Symbol s : symbols_) {
      if (!alphabet_->contains(s)) throw error(errc::alphabet_mismatch, "symbol outside alphabet");
    }
  }

  /// Parses labels: character by character for compact alphabets, otherwise
  /// whitespace separated.
  static FiniteWord parse(AlphabetRef alphabet, std::string_view text) {
    std::vector<Symbol> out;
    auto push = [&](std::string_view token) {
      auto s = alphabet->find(token);
      if (!s) throw error(errc::parse_error, "unknown letter '" + std::string(token) + "'");
      out.push_back(*s);
    };
    if (alphabet->compact()) {
      for (char c : text) {
        if (c == ' ' || c == '\n' || c == '\t') continue;
        push(std::string_view(&c, 1));
      }
    } else {
      std::size_t i = 0;
      while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) push(text.substr(i, j - i));
        i = j;
      }
    }
    return FiniteWord(std::move(alphabet), std::move(out));
  }

  const AlphabetRef& alphabet() const noexcept { return alphabet_; }
  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }

  FiniteWord slice(std::size_t pos, std::size_t len) const {
    if (pos + len > symbols_.size()) throw error(errc::invalid_arguments, "slice out of range");
    return FiniteWord(alphabet_, {symbols_.begin() + pos, symbols_.begin() + pos + len});
  }

  std::string to_string() const {
    std::string out;
    const bool compact = alphabet_->compact();
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!compact && i > 0) out += ' ';
      out += alphabet_->label(symbols_[i]);
    }
    return out;
  }

  // Comparison looks at letters only; words over different alphabets should
  // not be mixed in one container.
  friend bool operator==(const FiniteWord& a, const FiniteWord& b) { return a.symbols_ == b.symbols_; }
  friend auto operator<=>(const FiniteWord& a, const FiniteWord& b) { return a.symbols_ <=> b.symbols_; }

  friend std::ostream& operator<<(std::ostream& os, const FiniteWord& w) { return os << w.to_string(); }

 private:
  AlphabetRef alphabet_;
  std::vector<Symbol> symbols_;
};

/// One pass over a lazy word. Returns nullopt only when the underlying
/// source had to stop (e.g. an orbit hit a cell boundary).
class Traversal {
 public:
  virtual ~Traversal() = default;
  virtual std::optional<Symbol> next() = 0;
};

/// A one-sided infinite word given by a deterministic generator. Every call
/// to traverse() starts an independent pass from position 0.
class LazyWord {
 public:
  using Factory = std::function<std::unique_ptr<Traversal>()>;

  LazyWord(AlphabetRef alphabet, Factory factory)
      : alphabet_(std::move(alphabet)), factory_(std::move(factory)) {
    if (!alphabet_ || !factory_) throw error(errc::invalid_arguments, "lazy word needs alphabet and generator");
  }

  const AlphabetRef& alphabet() const noexcept { return alphabet_; }
  std::unique_ptr<Traversal> traverse() const { return factory_(); }

  /// First `length` letters, or fewer if the stream truncates.
  FiniteWord prefix(std::size_t length) const {
    std::vector<Symbol> out;
    out.reserve(length);
    auto t = traverse();
    while (out.size() < length) {
      auto s = t->next();
      if (!s) break;
      out.push_back(*s);
    }
    return FiniteWord(alphabet_, std::move(out));
  }

  static LazyWord constant(AlphabetRef alphabet, Symbol s) {
    if (!alphabet->contains(s)) throw error(errc::alphabet_mismatch, "symbol outside alphabet");
    struct Constant final : Traversal {
      Symbol s;
      explicit Constant(Symbol s) : s(s) {}
      std::optional<Symbol> next() override { return s; }
    };
    return LazyWord(std::move(alphabet), [s] { return std::make_unique<Constant>(s); });
  }

  /// u u u ... for a non-empty period u.
  static LazyWord periodic(const FiniteWord& period) {
    if (period.empty()) throw error(errc::invalid_arguments, "period must be non-empty");
    struct Periodic final : Traversal {
      std::vector<Symbol> p;
      std::size_t i = 0;
      explicit Periodic(std::vector<Symbol> p) : p(std::move(p)) {}
      std::optional<Symbol> next() override {
        Symbol s = p[i];
        i = (i + 1) % p.size();
        return s;
      }
    };
    return LazyWord(period.alphabet(), [p = period.symbols()] { return std::make_unique<Periodic>(p); });
  }

 private:
  AlphabetRef alphabet_;
  Factory factory_;
};

/// Incrementally materialised prefix of one traversal.
class PrefixBuffer {
 public:
  explicit PrefixBuffer(const LazyWord& word) : traversal_(word.traverse()) {}

  /// Extends the buffer to `length` letters; returns the available length,
  /// which is smaller only if the stream truncated.
  std::size_t ensure(std::size_t length) {
    if (data_.size() < length && !truncated_) data_.reserve(length);
    while (data_.size() < length && !truncated_) {
      auto s = traversal_->next();
      if (!s) {
        truncated_ = true;
        break;
      }
      data_.push_back(s->id);
    }
    return std::min(length, data_.size());
  }

  std::span<const std::uint8_t> view(std::size_t length) const {
    return std::span<const std::uint8_t>(data_).first(std::min(length, data_.size()));
  }

  std::size_t size() const noexcept { return data_.size(); }
  bool truncated() const noexcept { return truncated_; }

 private:
  std::unique_ptr<Traversal> traversal_;
  std::vector<std::uint8_t> data_;
  bool truncated_ = false;
};

namespace detail {

/// radix^n as an exact 64-bit value, if it fits.
inline std::optional<std::uint64_t> packed_range(std::size_t radix, std::size_t n) {
  unsigned __int128 r = 1;
  for (std::size_t i = 0; i < n; ++i) {
    r *= radix;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

/// Calls visit(key) for every length-n block of `s`. Keys are base-radix
/// integers when radix^n fits in 64 bits, byte strings otherwise.
template <class PackedVisit, class BytesVisit>
void for_each_block(std::span<const std::uint8_t> s, std::size_t n, std::size_t radix,
                    PackedVisit&& packed, BytesVisit&& bytes) {
  if (n == 0 || s.size() < n) return;
  if (auto range = packed_range(radix, n)) {
    // range == radix^n; keep key < radix^(n-1) before shifting in a letter.
    const std::uint64_t high = *range / radix;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n; ++i) key = key * radix + s[i];
    packed(key);
    for (std::size_t i = n; i < s.size(); ++i) {
      key = (high == 0 ? 0 : key % high) * radix + s[i];
      packed(key);
    }
  } else {
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      bytes(std::string_view(reinterpret_cast<const char*>(s.data() + i), n));
    }
  }
}

inline std::size_t count_distinct(std::span<const std::uint8_t> s, std::size_t n, std::size_t radix) {
  if (packed_range(radix, n)) {
    std::unordered_set<std::uint64_t> seen;
    for_each_block(s, n, radix, [&](std::uint64_t k) { seen.insert(k); }, [](std::string_view) {});
    return seen.size();
  }
  std::unordered_set<std::string_view> seen;
  for_each_block(s, n, radix, [](std::uint64_t) {}, [&](std::string_view k) { seen.insert(k); });
  return seen.size();
}

/// Occurrence count of every length-n block, keyed by its letters.
inline std::map<std::vector<std::uint8_t>, std::size_t> count_blocks(std::span<const std::uint8_t> s,
                                                                     std::size_t n) {
  std::map<std::vector<std::uint8_t>, std::size_t> out;
  if (n == 0 || s.size() < n) return out;
  std::unordered_map<std::string_view, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[std::string_view(reinterpret_cast<const char*>(s.data() + i), n)];
  }
  for (const auto& [key, c] : counts) {
    out.emplace(std::vector<std::uint8_t>(key.begin(), key.end()), c);
  }
  return out;
}

inline std::vector<std::uint8_t> raw(const FiniteWord& w) {
  std::vector<std::uint8_t> out;
  out.reserve(w.size());
  for (Symbol s : w.symbols()) out.push_back(s.id);
  return out;
}

inline FiniteWord from_raw(const AlphabetRef& a, std::span<const std::uint8_t> bytes) {
  std::vector<Symbol> symbols;
  symbols.reserve(bytes.size());
  for (auto b : bytes) symbols.push_back(Symbol{b});
  return FiniteWord(a, std::move(symbols));
}

}  // namespace detail

/// Distinct length-n factors of a finite word, sorted.
inline std::vector<FiniteWord> factors(const FiniteWord& w, std::size_t n) {
  if (n == 0) throw error(errc::invalid_arguments, "factor length must be positive");
  auto bytes = detail::raw(w);
  std::vector<FiniteWord> out;
  for (const auto& [key, count] : detail::count_blocks(bytes, n)) {
    out.push_back(detail::from_raw(w.alphabet(), key));
  }
  return out;
}

/// Distinct length-n blocks starting at positions 0..L-n of the word.
inline std::vector<FiniteWord> factors(const LazyWord& w, std::size_t n, std::size_t prefix_length) {
  if (n == 0 || prefix_length < n) {
    throw error(errc::invalid_arguments, "need 1 <= n <= prefix length");
  }
  return factors(w.prefix(prefix_length), n);
}

inline std::map<FiniteWord, std::size_t> factor_counts(const FiniteWord& w, std::size_t n) {
  if (n == 0 || w.size() < n) throw error(errc::invalid_arguments, "need 1 <= n <= word length");
  auto bytes = detail::raw(w);
  std::map<FiniteWord, std::size_t> out;
  for (const auto& [key, count] : detail::count_blocks(bytes, n)) {
    out.emplace(detail::from_raw(w.alphabet(), key), count);
  }
  return out;
}

/// Occurrences of each length-n block in the length-L prefix; counts sum to L-n+1.
inline std::map<FiniteWord, std::size_t> factor_counts(const LazyWord& w, std::size_t n,
                                                       std::size_t prefix_length) {
  if (n == 0 || prefix_length < n) {
    throw error(errc::invalid_arguments, "need 1 <= n <= prefix length");
  }
  auto prefix = w.prefix(prefix_length);
  if (prefix.size() < n) throw error(errc::invalid_arguments, "word truncated before n letters");
  return factor_counts(prefix, n);
}

/// How far complexity() grows the prefix before trusting a count.
///
/// For order n the prefix starts at max(min_initial, per_order * n) and is
/// doubled until the number of distinct factors stays unchanged across
/// `confirmations` consecutive doublings, or until `cap` letters are in use.
/// A single unchanged doubling is not enough: rare factors of 2-dimensional
/// codings can be missing from both the L and the 2L prefix.
struct StabilizationPolicy {
  std::size_t min_initial = 1024;
  std::size_t per_order = 64;
  std::size_t cap = std::size_t{1} << 24;
  std::size_t confirmations = 2;

  /// Codings of 2-dimensional translations have cylinders of measure well
  /// below 1e-4, so start from a long prefix.
  static StabilizationPolicy torus_coding() {
    StabilizationPolicy p;
    p.min_initial = std::size_t{1} << 20;
    return p;
  }

  std::size_t initial(std::size_t n) const { return std::min(cap, std::max(min_initial, per_order * n)); }
};

struct ComplexityEntry {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t prefix_length = 0;
  /// false: the count is only a lower bound for p(n).
  bool stabilized = false;
};

class ComplexityReport {
 public:
  explicit ComplexityReport(std::vector<ComplexityEntry> entries = {}) : entries_(std::move(entries)) {}

  const std::vector<ComplexityEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const ComplexityEntry& at(std::size_t n) const {
    for (const auto& e : entries_) {
      if (e.n == n) return e;
    }
    throw error(errc::invalid_arguments, "no entry for n = " + std::to_string(n));
  }

  std::size_t p(std::size_t n) const { return at(n).p; }

  bool all_stabilized() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.stabilized; });
  }

  /// CSV with header `n,p_n,prefix_len,stabilized`.
  void write_csv(std::ostream& os) const {
    os << "n,p_n,prefix_len,stabilized\n";
    for (const auto& e : entries_) {
      os << e.n << ',' << e.p << ',' << e.prefix_length << ',' << (e.stabilized ? "true" : "false") << '\n';
    }
  }

 private:
  std::vector<ComplexityEntry> entries_;
};

/// Single-order complexity against a shared prefix buffer.
inline ComplexityEntry complexity_at(PrefixBuffer& buffer, std::size_t radix, std::size_t n,
                                     const StabilizationPolicy& policy) {
  ComplexityEntry entry{n, 0, 0, false};
  std::size_t length = buffer.ensure(std::max(policy.initial(n), n));
  if (length < n) return entry;
  std::size_t count = detail::count_distinct(buffer.view(length), n, radix);
  entry.p = count;
  entry.prefix_length = length;
  std::size_t unchanged = 0;
  while (length < policy.cap) {
    const std::size_t want = std::min(policy.cap, 2 * length);
    const std::size_t got = buffer.ensure(want);
    if (got <= length) break;  // truncated stream, nothing more to read
    const std::size_t next = detail::count_distinct(buffer.view(got), n, radix);
    entry.p = next;
    entry.prefix_length = got;
    unchanged = (next == count && got == 2 * length) ? unchanged + 1 : 0;
    if (unchanged >= std::max<std::size_t>(policy.confirmations, 1)) {
      entry.stabilized = true;
      break;
    }
    count = next;
    length = got;
  }
  return entry;
}

/// p(n) for n = 1..n_max.
inline ComplexityReport complexity(const LazyWord& w, std::size_t n_max, const StabilizationPolicy& policy = {}) {
  if (n_max == 0) throw error(errc::invalid_arguments, "n_max must be positive");
  PrefixBuffer buffer(w);
  std::vector<ComplexityEntry> entries;
  entries.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    entries.push_back(complexity_at(buffer, w.alphabet()->size(), n, policy));
  }
  return ComplexityReport(std::move(entries));
}

}  // namespace rauzy
