#pragma once

// Exact (m, b)-rearrangement of incidence rows: partition a_j items of weight b_j
// into groups of total weight m, with explicit certificates.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "augtree/errors.hpp"
#include "augtree/incidence.hpp"

namespace augtree {

enum class RowStatus { certified, divisibility, no_partition, budget_exhausted };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::certified: return "certified";
    case RowStatus::divisibility: return "divisibility";
    case RowStatus::no_partition: return "no-partition";
    case RowStatus::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

struct RowOutcome {
  RowStatus status = RowStatus::no_partition;
  CountMatrix groups;  // p x r; row s counts the items of each class in group s
  std::string method;  // "empty", "unit-padding" or "search"

  bool ok() const noexcept { return status == RowStatus::certified; }
};

/// Item of a given weight belonging to a given class.
struct WeightedItem {
  std::int64_t weight;
  std::size_t cls;
};

/// Splits items into groups of weight m when every weight is <= l < m and there are at
/// least p*l unit items. Greedy: fill each group with the heaviest non-unit items that
/// still fit, then top up with units.
inline std::vector<std::vector<WeightedItem>> decompose_with_units(std::vector<WeightedItem> items,
                                                                   std::int64_t m, std::int64_t l) {
  std::int64_t total = 0, units = 0;
  for (const auto& it : items) {
    if (it.weight <= 0) throw PreconditionError("decompose: weights must be positive");
    if (it.weight > l) throw PreconditionError("decompose: weight " + std::to_string(it.weight) + " exceeds l");
    total += it.weight;
    units += it.weight == 1;
  }
  if (l >= m) throw PreconditionError("decompose: need l < m");
  if (total % m != 0) throw PreconditionError("decompose: total weight not a multiple of m");
  const std::int64_t p = total / m;
  if (units < p * l)
    throw PreconditionError("decompose: " + std::to_string(units) + " unit items, need at least " +
                            std::to_string(p * l));

  std::stable_sort(items.begin(), items.end(), [](const WeightedItem& a, const WeightedItem& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.cls < b.cls;
  });
  std::vector<WeightedItem> heavy, unit;
  for (const auto& it : items) (it.weight > 1 ? heavy : unit).push_back(it);
  std::vector<bool> used(heavy.size(), false);
  std::size_t next_unit = 0;

  std::vector<std::vector<WeightedItem>> groups(static_cast<std::size_t>(p));
  for (auto& group : groups) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < heavy.size(); ++i)
      if (!used[i] && sum + heavy[i].weight <= m) {
        used[i] = true;
        sum += heavy[i].weight;
        group.push_back(heavy[i]);
      }
    while (sum < m) {
      group.push_back(unit.at(next_unit++));
      ++sum;
    }
  }
  return groups;
}

inline std::vector<std::vector<std::int64_t>> decompose_with_units(const std::vector<std::int64_t>& weights,
                                                                   std::int64_t m, std::int64_t l) {
  std::vector<WeightedItem> items;
  for (std::size_t i = 0; i < weights.size(); ++i) items.push_back({weights[i], 0});
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& g : decompose_with_units(std::move(items), m, l)) {
    out.emplace_back();
    for (const auto& it : g) out.back().push_back(it.weight);
  }
  return out;
}

namespace detail {

class PartitionSearch {
 public:
  PartitionSearch(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, std::int64_t m,
                  std::size_t budget)
      : b_(b), m_(m), budget_(budget), remaining_(a) {
    order_.resize(a.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) { return b_[x] > b_[y]; });
  }

  RowStatus run() {
    if (fill()) return RowStatus::certified;
    return exhausted_ ? RowStatus::budget_exhausted : RowStatus::no_partition;
  }

  const std::vector<std::vector<std::int64_t>>& groups() const { return groups_; }

 private:
  bool fill() {
    std::size_t head = order_.size();
    for (std::size_t i = 0; i < order_.size(); ++i)
      if (remaining_[order_[i]] > 0) {
        head = i;
        break;
      }
    if (head == order_.size()) return true;
    if (failed_.count(remaining_)) return false;
    std::vector<std::int64_t> take(b_.size(), 0);
    take[order_[head]] = 1;
    --remaining_[order_[head]];
    const bool ok = extend(head, m_ - b_[order_[head]], take);
    ++remaining_[order_[head]];
    if (!ok && !exhausted_) failed_.insert(remaining_);
    return ok;
  }

  // Chooses further counts for types order_[pos..] with residual weight `need`.
  bool extend(std::size_t pos, std::int64_t need, std::vector<std::int64_t>& take) {
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return false;
    }
    if (need == 0) {
      groups_.push_back(take);
      if (fill()) return true;
      groups_.pop_back();
      return false;
    }
    for (std::size_t i = pos; i < order_.size(); ++i) {
      const std::size_t j = order_[i];
      if (remaining_[j] == 0 || b_[j] > need) continue;
      ++take[j];
      --remaining_[j];
      const bool ok = extend(i, need - b_[j], take);
      ++remaining_[j];
      --take[j];
      if (ok) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  const std::vector<std::int64_t>& b_;
  std::int64_t m_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  std::vector<std::int64_t> remaining_;
  std::vector<std::size_t> order_;
  std::set<std::vector<std::int64_t>> failed_;
  std::vector<std::vector<std::int64_t>> groups_;
};

}  // namespace detail

/// Decides whether a row is (m, b)-rearrangeable; on success returns the group matrix C.
inline RowOutcome rearrange_row(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                std::int64_t m, std::size_t node_budget = 5'000'000) {
  const std::size_t r = a.size();
  if (b.size() != r) throw PreconditionError("rearrange_row: a and b differ in length");
  if (m < 1) throw PreconditionError("rearrange_row: m must be positive");
  std::int64_t total = 0, heaviest = 0;
  for (std::size_t j = 0; j < r; ++j) {
    if (a[j] < 0 || b[j] <= 0) throw PreconditionError("rearrange_row: need a >= 0 and b > 0");
    total = checked_add(total, checked_mul(a[j], b[j]));
    if (a[j] > 0) heaviest = std::max(heaviest, b[j]);
  }
  RowOutcome out;
  if (total % m != 0) {
    out.status = RowStatus::divisibility;
    return out;
  }
  const std::int64_t p = total / m;
  out.groups = CountMatrix(static_cast<std::size_t>(p), r);
  if (p == 0) {
    out.status = RowStatus::certified;
    out.method = "empty";
    return out;
  }
  if (heaviest > m) {
    out.status = RowStatus::no_partition;
    return out;
  }

  std::int64_t units = 0;
  for (std::size_t j = 0; j < r; ++j)
    if (b[j] == 1) units += a[j];
  if (heaviest < m && units >= p * heaviest) {
    std::vector<WeightedItem> items;
    for (std::size_t j = 0; j < r; ++j)
      for (std::int64_t c = 0; c < a[j]; ++c) items.push_back({b[j], j});
    const auto groups = decompose_with_units(std::move(items), m, heaviest);
    for (std::size_t s = 0; s < groups.size(); ++s)
      for (const auto& it : groups[s]) ++out.groups(s, it.cls);
    out.status = RowStatus::certified;
    out.method = "unit-padding";
  } else {
    detail::PartitionSearch search(a, b, m, node_budget);
    out.status = search.run();
    if (out.status != RowStatus::certified) return out;
    for (std::size_t s = 0; s < search.groups().size(); ++s)
      for (std::size_t j = 0; j < r; ++j) out.groups(s, j) = search.groups()[s][j];
    out.method = "search";
  }
  if (heaviest > m) throw std::logic_error("rearrange_row: certified row with an item heavier than m");
  return out;
}

/// Group matrices C_i, one per row of the matrix they certify, for a target weight.
struct Certificate {
  unsigned power = 1;
  std::int64_t target = 0;
  std::vector<CountMatrix> rows;
};

inline bool validate_row(const CountMatrix& c, const std::vector<std::int64_t>& a,
                         const std::vector<std::int64_t>& b, std::int64_t target) {
  if (c.rows() > 0 && c.cols() != a.size()) return false;
  std::int64_t total = 0;
  for (std::size_t j = 0; j < a.size(); ++j) total += a[j] * b[j];
  if (total != static_cast<std::int64_t>(c.rows()) * target) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    std::int64_t col = 0;
    for (std::size_t s = 0; s < c.rows(); ++s) {
      if (c(s, j) < 0) return false;
      col += c(s, j);
    }
    if (col != a[j]) return false;
  }
  for (std::size_t s = 0; s < c.rows(); ++s) {
    std::int64_t w = 0;
    for (std::size_t j = 0; j < a.size(); ++j) w += c(s, j) * b[j];
    if (w != target) return false;
  }
  return true;
}

/// Independent check of both defining identities, row by row.
inline bool validate_certificate(const Certificate& cert, const CountMatrix& a,
                                 const std::vector<std::int64_t>& b, std::int64_t target) {
  if (cert.rows.size() != a.rows() || b.size() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (!validate_row(cert.rows[i], a.row(i), b, target)) return false;
  return true;
}

struct PowerAttempt {
  unsigned power = 0;
  std::int64_t target = 0;
  std::vector<RowStatus> rows;
  bool overflow = false;
};

struct PowerOutcome {
  std::optional<Certificate> certificate;
  std::vector<PowerAttempt> attempts;
};

/// Tries A^k against target m^k for k = 1..k_max; stops at the first fully certified k.
inline PowerOutcome rearrange_power(const CountMatrix& a, const std::vector<std::int64_t>& b, std::int64_t m,
                                    unsigned k_max = 6, std::size_t node_budget = 5'000'000) {
  if (!analyze_matrix(a, b, m).eigen_ok) throw PreconditionError("rearrange_power: A b != m b");
  if (b.empty() || b[0] != 1) throw PreconditionError("rearrange_power: b_1 must be 1");
  PowerOutcome out;
  CountMatrix ak = CountMatrix::identity(a.rows());
  std::int64_t target = 1;
  for (unsigned k = 1; k <= k_max; ++k) {
    PowerAttempt attempt;
    attempt.power = k;
    try {
      ak = checked_product(ak, a);
      target = checked_mul(target, m);
    } catch (const std::overflow_error&) {
      attempt.overflow = true;
      out.attempts.push_back(attempt);
      break;
    }
    attempt.target = target;
    Certificate cert;
    cert.power = k;
    cert.target = target;
    bool all = true;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      RowOutcome row = rearrange_row(ak.row(i), b, target, node_budget);
      attempt.rows.push_back(row.status);
      all = all && row.ok();
      cert.rows.push_back(std::move(row.groups));
    }
    out.attempts.push_back(attempt);
    if (all) {
      out.certificate = std::move(cert);
      break;
    }
  }
  return out;
}

/// From a certificate for M against target t, one for M^n against t^n: each group of row i
/// becomes its row vector times M^{n-1}.
inline Certificate stack_certificates(const Certificate& cert, const CountMatrix& base, unsigned n) {
  if (n == 0) throw PreconditionError("stack_certificates: n must be positive");
  const CountMatrix tail = checked_power(base, n - 1);
  Certificate out;
  out.power = cert.power * n;
  out.target = checked_pow(cert.target, n);
  for (const auto& c : cert.rows) out.rows.push_back(checked_product(c, tail));
  return out;
}

}  // namespace augtree
