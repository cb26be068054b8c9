#pragma once

// Step-function bidding strategies and finite-support correlated profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bce/errors.hpp"
#include "bce/rng.hpp"

namespace bce {

/// Raised by make_strategy; carries the first offending index pair (k, k+1).
class MonotonicityError : public InputError {
 public:
  MonotonicityError(std::size_t lo, std::size_t hi)
      : InputError("strategy not weakly increasing at index pair (" + std::to_string(lo) + ", " +
                   std::to_string(hi) + ")"),
        lo_(lo),
        hi_(hi) {}
  std::pair<std::size_t, std::size_t> pair() const noexcept { return {lo_, hi_}; }

 private:
  std::size_t lo_;
  std::size_t hi_;
};

/// Bid map over a finite set of value points. A value between points uses the
/// bid of the largest point below it; a value below every point uses the first.
class Strategy {
 public:
  /// Any step function, monotone or not.
  static Strategy step(std::vector<double> values, std::vector<double> bids) {
    if (values.empty()) throw InputError("strategy needs at least one value point");
    if (values.size() != bids.size()) throw InputError("strategy values and bids differ in length");
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k]) || !std::isfinite(bids[k]) || bids[k] < 0.0)
        throw InputError("strategy entries must be finite with nonnegative bids");
      if (k > 0 && !(values[k - 1] < values[k]))
        throw InputError("strategy value points must be strictly increasing");
    }
    return Strategy(std::move(values), std::move(bids));
  }

  static Strategy constant(std::vector<double> values, double bid) {
    const std::size_t k = values.size();
    return step(std::move(values), std::vector<double>(k, bid));
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& bids() const noexcept { return bids_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(double v) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), v);
    if (it == values_.begin()) return bids_.front();
    return bids_[static_cast<std::size_t>(it - values_.begin()) - 1];
  }

  std::optional<std::pair<std::size_t, std::size_t>> first_violation() const {
    for (std::size_t k = 1; k < bids_.size(); ++k) {
      if (bids_[k - 1] > bids_[k]) return std::pair{k - 1, k};
    }
    return std::nullopt;
  }

  bool is_monotone() const { return !first_violation().has_value(); }

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  Strategy(std::vector<double> values, std::vector<double> bids)
      : values_(std::move(values)), bids_(std::move(bids)) {}

  std::vector<double> values_;
  std::vector<double> bids_;
};

/// Validated weakly increasing strategy.
inline Strategy make_strategy(std::vector<double> values, std::vector<double> bids) {
  auto s = Strategy::step(std::move(values), std::move(bids));
  if (auto bad = s.first_violation()) throw MonotonicityError(bad->first, bad->second);
  return s;
}

using JointStrategy = std::vector<Strategy>;

inline bool is_monotone(const JointStrategy& joint) {
  return std::all_of(joint.begin(), joint.end(), [](const Strategy& s) { return s.is_monotone(); });
}

struct ProfileAtom {
  JointStrategy joint;
  double prob = 0.0;
};

/// Finite-support distribution over joint strategies.
class CorrelatedProfile {
 public:
  explicit CorrelatedProfile(std::vector<ProfileAtom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InputError("correlated profile needs at least one atom");
    double total = 0.0;
    const std::size_t n = atoms_.front().joint.size();
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      if (atoms_[a].joint.size() != n) throw InputError("profile atoms disagree on bidder count");
      if (!std::isfinite(atoms_[a].prob) || atoms_[a].prob < 0.0)
        throw InputError("profile probabilities must be nonnegative");
      total += atoms_[a].prob;
      for (std::size_t b = 0; b < a; ++b) {
        if (atoms_[b].joint == atoms_[a].joint) throw InputError("profile atoms must be distinct");
      }
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InputError("profile probabilities sum to " + std::to_string(total));
  }

  static CorrelatedProfile point_mass(JointStrategy joint) {
    return CorrelatedProfile({{std::move(joint), 1.0}});
  }

  const std::vector<ProfileAtom>& atoms() const noexcept { return atoms_; }
  std::size_t bidders() const noexcept { return atoms_.front().joint.size(); }
  std::size_t size() const noexcept { return atoms_.size(); }

 private:
  std::vector<ProfileAtom> atoms_;
};

/// C(V + B - 1, V), or nullopt once it exceeds `limit`.
inline std::optional<std::uint64_t> monotone_count(std::size_t values, std::size_t levels,
                                                   std::uint64_t limit) {
  if (levels == 0) return 0;
  // C(V+B-1, V) = prod_{k=1..V} (B-1+k)/k, exact at every step.
  unsigned __int128 c = 1;
  for (std::size_t k = 1; k <= values; ++k) {
    c = c * (levels - 1 + k) / k;
    if (c > limit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// All weakly increasing maps from value_points to bid_grid, in lexicographic
/// order of the bid-index tuples.
inline std::vector<Strategy> enumerate_monotone(const std::vector<double>& value_points,
                                                const std::vector<double>& bid_grid,
                                                std::uint64_t cap = kDefaultEnumerationCap) {
  if (value_points.empty() || bid_grid.empty()) throw InputError("enumerate_monotone needs nonempty grids");
  const auto count = monotone_count(value_points.size(), bid_grid.size(), cap);
  if (!count) {
    throw ResourceError("monotone strategy count C(" +
                        std::to_string(value_points.size() + bid_grid.size() - 1) + ", " +
                        std::to_string(value_points.size()) + ") exceeds cap " +
                        std::to_string(cap));
  }
  const std::size_t v = value_points.size();
  const std::size_t b = bid_grid.size();
  std::vector<Strategy> out;
  out.reserve(*count);
  std::vector<std::size_t> idx(v, 0);
  std::vector<double> bids(v);
  while (true) {
    for (std::size_t k = 0; k < v; ++k) bids[k] = bid_grid[idx[k]];
    out.push_back(make_strategy(value_points, bids));
    // Advance to the next nondecreasing tuple.
    std::size_t pos = v;
    while (pos > 0 && idx[pos - 1] == b - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < v; ++k) idx[k] = idx[pos - 1];
  }
  return out;
}

/// Sorted i.i.d. uniform bid levels assigned to the value points in order.
inline Strategy random_monotone(const std::vector<double>& value_points,
                                const std::vector<double>& bid_grid, Rng& rng) {
  if (value_points.empty() || bid_grid.empty()) throw InputError("random_monotone needs nonempty grids");
  std::vector<std::size_t> idx(value_points.size());
  for (auto& k : idx) k = static_cast<std::size_t>(rng.uniform_index(bid_grid.size()));
  std::sort(idx.begin(), idx.end());
  std::vector<double> bids(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) bids[k] = bid_grid[idx[k]];
  return make_strategy(value_points, std::move(bids));
}

inline Strategy random_monotone(const std::vector<double>& value_points,
                                const std::vector<double>& bid_grid, std::uint64_t seed) {
  Rng rng(seed);
  return random_monotone(value_points, bid_grid, rng);
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json to_json(const Strategy& s) {
  return {{"values", s.values()}, {"bids", s.bids()}};
}

inline Strategy strategy_from_json(const nlohmann::json& j) {
  try {
    return Strategy::step(j.at("values").get<std::vector<double>>(),
                          j.at("bids").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("strategy: ") + e.what());
  }
}

inline nlohmann::json to_json(const JointStrategy& joint) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : joint) arr.push_back(to_json(s));
  return arr;
}

inline nlohmann::json to_json(const CorrelatedProfile& q) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : q.atoms()) atoms.push_back({{"prob", a.prob}, {"joint", to_json(a.joint)}});
  return {{"atoms", atoms}};
}

inline CorrelatedProfile profile_from_json(const nlohmann::json& j) {
  try {
    std::vector<ProfileAtom> atoms;
    for (const auto& a : j.at("atoms")) {
      JointStrategy joint;
      for (const auto& s : a.at("joint")) joint.push_back(strategy_from_json(s));
      atoms.push_back({std::move(joint), a.at("prob").get<double>()});
    }
    return CorrelatedProfile(std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("correlated profile: ") + e.what());
  }
}

}  // namespace bce
