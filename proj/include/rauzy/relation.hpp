#pragma once

// Integer relation search for translation vectors: a translation by a on
// T^k is minimal iff 1, a_1, ..., a_k are rationally independent. A found
// relation disproves minimality (up to the working precision); not finding
// one is only evidence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rauzy/error.hpp"

namespace rauzy {

struct MinimalityVerdict {
  enum class Status { relation_found, no_relation_up_to_bound };

  Status status = Status::no_relation_up_to_bound;
  /// Coefficients (c_1, ..., c_k, c_0) with c_1 a_1 + ... + c_k a_k + c_0 ~ 0.
  std::vector<std::int64_t> relation;
  std::int64_t bound = 0;
  double precision = 0;

  bool minimal_evidence() const noexcept { return status == Status::no_relation_up_to_bound; }
};

namespace detail {

/// LLL reduction (delta = 0.99) of the rows of `basis`, in place.
inline void lll_reduce(std::vector<std::vector<long double>>& basis) {
  const std::size_t d = basis.size();
  if (d < 2) return;
  auto dot = [](const std::vector<long double>& x, const std::vector<long double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<std::vector<long double>> star(d);
  std::vector<std::vector<long double>> mu(d, std::vector<long double>(d, 0));
  std::vector<long double> norms(d);
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < d; ++i) {
      star[i] = basis[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = norms[j] > 0 ? dot(basis[i], star[j]) / norms[j] : 0;
        for (std::size_t c = 0; c < star[i].size(); ++c) star[i][c] -= mu[i][j] * star[j][c];
      }
      norms[i] = dot(star[i], star[i]);
    }
  };
  constexpr long double delta = 0.99L;
  gram_schmidt();
  std::size_t k = 1;
  std::size_t guard = 0;
  while (k < d && ++guard < 100000) {
    for (std::size_t j = k; j-- > 0;) {
      const long double q = std::round(mu[k][j]);
      if (q != 0) {
        for (std::size_t c = 0; c < basis[k].size(); ++c) basis[k][c] -= q * basis[j][c];
        gram_schmidt();
      }
    }
    if (norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1]) {
      ++k;
    } else {
      std::swap(basis[k], basis[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

}  // namespace detail

/// Searches integer relations with |coefficients| <= bound among 1, a_1, ..., a_k.
inline MinimalityVerdict minimality_check(std::span<const double> a, std::int64_t bound, double precision) {
  if (a.empty()) throw error(errc::invalid_arguments, "translation vector must be non-empty");
  if (bound < 1 || !(precision > 0)) throw error(errc::invalid_arguments, "need bound >= 1 and precision > 0");

  MinimalityVerdict verdict;
  verdict.bound = bound;
  verdict.precision = precision;

  // Only the fractional parts matter; integer parts fold into c_0.
  std::vector<long double> x;
  for (double v : a) x.push_back(static_cast<long double>(v) - std::floor(static_cast<long double>(v)));
  x.push_back(1.0L);
  const std::size_t d = x.size();

  // Rows (e_i | scale * x_i): short vectors have small coefficients and a
  // small weighted residual.
  const long double scale = 1.0L / static_cast<long double>(precision);
  std::vector<std::vector<long double>> basis(d, std::vector<long double>(d + 1, 0));
  for (std::size_t i = 0; i < d; ++i) {
    basis[i][i] = 1;
    basis[i][d] = scale * x[i];
  }
  detail::lll_reduce(basis);

  auto check = [&](const std::vector<long double>& row) -> bool {
    std::vector<std::int64_t> q(d);
    long double residual = 0;
    bool nonzero = false;
    for (std::size_t i = 0; i < d; ++i) {
      const long double c = std::round(row[i]);
      if (std::fabs(c) > static_cast<long double>(bound)) return false;
      q[i] = static_cast<std::int64_t>(c);
      if (i + 1 < d && q[i] != 0) nonzero = true;
      residual += c * x[i];
    }
    if (!nonzero || std::fabs(residual) >= static_cast<long double>(precision)) return false;
    // Undo the fractional-part shift: c_0 absorbs c_i * floor(a_i).
    for (std::size_t i = 0; i + 1 < d; ++i) {
      q[d - 1] -= q[i] * static_cast<std::int64_t>(std::floor(a[i]));
    }
    // Normalise the sign so the first non-zero coefficient is positive.
    auto first = std::find_if(q.begin(), q.end(), [](std::int64_t c) { return c != 0; });
    if (first != q.end() && *first < 0) {
      for (auto& c : q) c = -c;
    }
    verdict.relation = std::move(q);
    return true;
  };

  for (const auto& row : basis) {
    if (check(row)) {
      verdict.status = MinimalityVerdict::Status::relation_found;
      return verdict;
    }
  }
  return verdict;
}

}  // namespace rauzy
