#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "augtree/classify.hpp"
#include "augtree/errors.hpp"

namespace augtree {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("int64 overflow in addition");
  return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("int64 overflow in product");
  return out;
}

inline std::int64_t checked_pow(std::int64_t base, unsigned k) {
  std::int64_t out = 1;
  for (unsigned i = 0; i < k; ++i) out = checked_mul(out, base);
  return out;
}

inline CountMatrix checked_product(const CountMatrix& a, const CountMatrix& b) {
  if (a.cols() != b.rows()) throw PreconditionError("matrix product: dimension mismatch");
  CountMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        out(i, j) = checked_add(out(i, j), checked_mul(a(i, k), b(k, j)));
    }
  return out;
}

inline CountMatrix checked_power(const CountMatrix& a, unsigned k) {
  CountMatrix out = CountMatrix::identity(a.rows());
  for (unsigned i = 0; i < k; ++i) out = checked_product(out, a);
  return out;
}

struct IncidenceAnalysis {
  bool eigen_ok = false;
  bool irreducible = false;
  std::optional<unsigned> primitivity_witness;  // least n with A^n > 0

  bool primitive() const noexcept { return primitivity_witness.has_value(); }
};

/// Checks A b = m b, irreducibility, and primitivity up to the Wielandt bound (r-1)^2 + 1.
inline IncidenceAnalysis analyze_matrix(const CountMatrix& a, const std::vector<std::int64_t>& b,
                                        std::int64_t m) {
  const std::size_t r = a.rows();
  if (a.cols() != r || b.size() != r)
    throw PreconditionError("analyze_matrix: A is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", b has length " + std::to_string(b.size()));
  if (m < 1) throw PreconditionError("analyze_matrix: m must be positive");
  for (auto x : a.data())
    if (x < 0) throw PreconditionError("analyze_matrix: negative entry");
  for (auto x : b)
    if (x <= 0) throw PreconditionError("analyze_matrix: b must be positive");

  IncidenceAnalysis out;
  out.eigen_ok = true;
  for (std::size_t i = 0; i < r; ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < r; ++j) sum = checked_add(sum, checked_mul(a(i, j), b[j]));
    if (sum != checked_mul(m, b[i])) out.eigen_ok = false;
  }
  if (r == 0) return out;

  std::vector<std::vector<bool>> reach(r, std::vector<bool>(r, false));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) reach[i][j] = a(i, j) > 0;
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < r; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < r; ++j)
          if (reach[k][j]) reach[i][j] = true;
  out.irreducible = true;
  for (std::size_t i = 0; i < r && out.irreducible; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (i != j && !reach[i][j]) {
        out.irreducible = false;
        break;
      }
  if (r == 1) out.irreducible = a(0, 0) > 0;

  std::vector<std::vector<bool>> pattern(r, std::vector<bool>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) pattern[i][j] = a(i, j) > 0;
  std::vector<std::vector<bool>> cur = pattern;
  const unsigned bound = static_cast<unsigned>((r - 1) * (r - 1) + 1);
  for (unsigned n = 1; n <= bound; ++n) {
    bool all = true;
    for (std::size_t i = 0; i < r && all; ++i)
      for (std::size_t j = 0; j < r; ++j)
        if (!cur[i][j]) {
          all = false;
          break;
        }
    if (all) {
      out.primitivity_witness = n;
      break;
    }
    std::vector<std::vector<bool>> next(r, std::vector<bool>(r, false));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < r; ++k)
        if (cur[i][k])
          for (std::size_t j = 0; j < r; ++j)
            if (pattern[k][j]) next[i][j] = true;
    cur = std::move(next);
  }
  return out;
}

}  // namespace augtree
