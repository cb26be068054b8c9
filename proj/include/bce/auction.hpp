#pragma once

// Single-item sealed-bid auctions: highest bid wins with uniform tie-breaking,
// payments of the form p_i(b) = x_i(b) * f_i(b_i) + g_i(b_i).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bce/errors.hpp"

namespace bce {

enum class PaymentKind { FirstPrice, AllPay, Custom };

inline std::string to_string(PaymentKind kind) {
  switch (kind) {
    case PaymentKind::FirstPrice: return "fpa";
    case PaymentKind::AllPay: return "apa";
    case PaymentKind::Custom: return "custom";
  }
  return "unknown";
}

inline PaymentKind payment_kind_from_string(const std::string& s) {
  if (s == "fpa") return PaymentKind::FirstPrice;
  if (s == "apa") return PaymentKind::AllPay;
  if (s == "custom") return PaymentKind::Custom;
  throw InputError("unknown auction kind '" + s + "' (expected fpa, apa or custom)");
}

/// Winner-dependent and unconditional parts of a bidder's payment at one bid.
struct PaymentShape {
  double f = 0.0;
  double g = 0.0;
};

using BidProfile = std::vector<double>;

namespace detail {

inline void check_grid(const std::vector<double>& grid, double cap, const char* what) {
  if (grid.empty()) throw InputError(std::string(what) + " must be nonempty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || grid[k] < 0.0 || grid[k] > cap)
      throw InputError(std::string(what) + " entry " + std::to_string(k) + " outside [0, H]");
    if (k > 0 && !(grid[k - 1] < grid[k]))
      throw InputError(std::string(what) + " must be strictly increasing (index " +
                       std::to_string(k) + ")");
  }
}

}  // namespace detail

/// Mechanism definition. Immutable after construction.
class AuctionSpec {
 public:
  static AuctionSpec first_price(std::size_t n, double value_cap, std::vector<double> bid_grid) {
    return AuctionSpec(n, value_cap, PaymentKind::FirstPrice, std::move(bid_grid), {}, {});
  }

  static AuctionSpec all_pay(std::size_t n, double value_cap, std::vector<double> bid_grid) {
    return AuctionSpec(n, value_cap, PaymentKind::AllPay, std::move(bid_grid), {}, {});
  }

  /// f[i][k], g[i][k] tabulate bidder i's payment shape at bid_grid[k].
  static AuctionSpec custom(std::size_t n, double value_cap, std::vector<double> bid_grid,
                            std::vector<std::vector<double>> f,
                            std::vector<std::vector<double>> g) {
    return AuctionSpec(n, value_cap, PaymentKind::Custom, std::move(bid_grid), std::move(f),
                       std::move(g));
  }

  std::size_t bidders() const noexcept { return n_; }
  double value_cap() const noexcept { return cap_; }
  PaymentKind kind() const noexcept { return kind_; }
  const std::vector<double>& bid_grid() const noexcept { return grid_; }
  const std::vector<std::vector<double>>& f_table() const noexcept { return f_; }
  const std::vector<std::vector<double>>& g_table() const noexcept { return g_; }

  /// Largest bid the payment rule is defined for.
  double max_bid() const noexcept { return kind_ == PaymentKind::Custom ? grid_.back() : cap_; }

  void check_bid(double b) const {
    const double lo = kind_ == PaymentKind::Custom ? grid_.front() : 0.0;
    if (!std::isfinite(b) || b < lo || b > max_bid())
      throw InputError("bid " + std::to_string(b) + " outside the mechanism's bid range");
  }

  void check_bidder(std::size_t i) const {
    if (i >= n_) throw InputError("bidder index " + std::to_string(i) + " out of range");
  }

  /// f_i(b), g_i(b). Custom tables are interpolated linearly between grid points.
  PaymentShape shape(std::size_t i, double b) const {
    check_bid(b);
    switch (kind_) {
      case PaymentKind::FirstPrice: return {b, 0.0};
      case PaymentKind::AllPay: return {0.0, b};
      case PaymentKind::Custom: break;
    }
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), b);
    const auto k = static_cast<std::size_t>(it - grid_.begin());
    if (*it == b) return {f_[i][k], g_[i][k]};
    const double t = (b - grid_[k - 1]) / (grid_[k] - grid_[k - 1]);
    return {f_[i][k - 1] + t * (f_[i][k] - f_[i][k - 1]),
            g_[i][k - 1] + t * (g_[i][k] - g_[i][k - 1])};
  }

  void check_profile(const BidProfile& bids) const {
    if (bids.size() != n_)
      throw InputError("bid profile has " + std::to_string(bids.size()) + " entries, expected " +
                       std::to_string(n_));
    for (double b : bids) {
      if (!std::isfinite(b) || b < 0.0 || b > cap_)
        throw InputError("bid " + std::to_string(b) + " outside [0, H]");
    }
  }

  friend bool operator==(const AuctionSpec&, const AuctionSpec&) = default;

 private:
  AuctionSpec(std::size_t n, double cap, PaymentKind kind, std::vector<double> grid,
              std::vector<std::vector<double>> f, std::vector<std::vector<double>> g)
      : n_(n), cap_(cap), kind_(kind), grid_(std::move(grid)), f_(std::move(f)), g_(std::move(g)) {
    if (n_ < 1) throw InputError("auction needs at least one bidder");
    if (!std::isfinite(cap_) || cap_ <= 0.0) throw InputError("value cap H must be positive");
    detail::check_grid(grid_, cap_, "bid_grid");
    if (kind_ != PaymentKind::Custom) return;
    if (f_.size() != n_ || g_.size() != n_)
      throw InputError("custom payment tables need one row per bidder");
    for (std::size_t i = 0; i < n_; ++i) {
      if (f_[i].size() != grid_.size() || g_[i].size() != grid_.size())
        throw InputError("custom payment row " + std::to_string(i) + " must match the bid grid");
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        for (double v : {f_[i][k], g_[i][k]}) {
          if (!std::isfinite(v) || v < 0.0 || v > cap_)
            throw InputError("custom payment entry for bidder " + std::to_string(i) +
                             " outside [0, H]");
        }
      }
    }
  }

  std::size_t n_;
  double cap_;
  PaymentKind kind_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> f_;
  std::vector<std::vector<double>> g_;
};

/// Expected allocation: each member of the argmax set gets 1/|argmax|.
inline std::vector<double> allocation(const AuctionSpec& spec, const BidProfile& bids) {
  spec.check_profile(bids);
  const double top = *std::max_element(bids.begin(), bids.end());
  const auto winners = static_cast<double>(std::count(bids.begin(), bids.end(), top));
  std::vector<double> x(bids.size(), 0.0);
  for (std::size_t j = 0; j < bids.size(); ++j) {
    if (bids[j] == top) x[j] = 1.0 / winners;
  }
  return x;
}

inline double payment(const AuctionSpec& spec, std::size_t i, const BidProfile& bids) {
  spec.check_bidder(i);
  const double x = allocation(spec, bids)[i];
  const auto [f, g] = spec.shape(i, bids[i]);
  return x * f + g;
}

inline double ex_post_utility(const AuctionSpec& spec, std::size_t i, double value,
                              const BidProfile& bids) {
  spec.check_bidder(i);
  if (!std::isfinite(value) || value < 0.0 || value > spec.value_cap())
    throw InputError("value outside [0, H]");
  const double x = allocation(spec, bids)[i];
  const auto [f, g] = spec.shape(i, bids[i]);
  return value * x - (x * f + g);
}

struct PaymentViolation {
  std::size_t bidder = 0;
  double low_bid = 0.0;
  double high_bid = 0.0;
  BidProfile opponent_bids;  // opponents in bidder order, bidder itself omitted
};

struct MechanismReport {
  bool passed = true;
  std::size_t probes = 0;
  std::size_t violation_count = 0;
  std::vector<PaymentViolation> violations;  // first few witnesses only
};

/// Checks that a winning bidder's payment strictly increases in her bid, on
/// every pair of grid bids and every probed opponent profile. Probes hold all
/// opponents at the lowest grid bid except at most two, which range over the
/// whole grid.
inline MechanismReport validate_mechanism(const AuctionSpec& spec,
                                          const std::vector<double>& bid_grid,
                                          std::size_t max_witnesses = 16) {
  detail::check_grid(bid_grid, spec.value_cap(), "validation grid");
  for (double b : bid_grid) spec.check_bid(b);

  const std::size_t n = spec.bidders();
  const std::size_t opponents = n - 1;
  const std::size_t levels = bid_grid.size();

  std::vector<BidProfile> probes;
  if (opponents == 0) {
    probes.emplace_back();
  } else if (opponents == 1) {
    for (double b : bid_grid) probes.push_back({b});
  } else {
    for (std::size_t j1 = 0; j1 < opponents; ++j1) {
      for (std::size_t j2 = j1 + 1; j2 < opponents; ++j2) {
        for (std::size_t k1 = 0; k1 < levels; ++k1) {
          for (std::size_t k2 = 0; k2 < levels; ++k2) {
            BidProfile p(opponents, bid_grid.front());
            p[j1] = bid_grid[k1];
            p[j2] = bid_grid[k2];
            probes.push_back(std::move(p));
          }
        }
      }
    }
  }

  MechanismReport report;
  BidProfile bids(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& opp : probes) {
      for (std::size_t j = 0, o = 0; j < n; ++j) {
        if (j != i) bids[j] = opp[o++];
      }
      for (std::size_t lo = 0; lo < levels; ++lo) {
        bids[i] = bid_grid[lo];
        if (allocation(spec, bids)[i] <= 0.0) continue;
        const double p_lo = payment(spec, i, bids);
        for (std::size_t hi = lo + 1; hi < levels; ++hi) {
          bids[i] = bid_grid[hi];
          const double p_hi = payment(spec, i, bids);
          ++report.probes;
          if (!(p_hi > p_lo)) {
            report.passed = false;
            ++report.violation_count;
            if (report.violations.size() < max_witnesses)
              report.violations.push_back({i, bid_grid[lo], bid_grid[hi], opp});
          }
        }
        bids[i] = bid_grid[lo];
      }
    }
  }
  return report;
}

inline nlohmann::json to_json(const AuctionSpec& spec) {
  nlohmann::json j{{"n", spec.bidders()},
                   {"H", spec.value_cap()},
                   {"kind", to_string(spec.kind())},
                   {"bid_grid", spec.bid_grid()}};
  if (spec.kind() == PaymentKind::Custom) {
    j["f"] = spec.f_table();
    j["g"] = spec.g_table();
  }
  return j;
}

inline AuctionSpec auction_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto cap = j.at("H").get<double>();
    const auto kind = payment_kind_from_string(j.at("kind").get<std::string>());
    auto grid = j.at("bid_grid").get<std::vector<double>>();
    switch (kind) {
      case PaymentKind::FirstPrice: return AuctionSpec::first_price(n, cap, std::move(grid));
      case PaymentKind::AllPay: return AuctionSpec::all_pay(n, cap, std::move(grid));
      case PaymentKind::Custom:
        return AuctionSpec::custom(n, cap, std::move(grid),
                                   j.at("f").get<std::vector<std::vector<double>>>(),
                                   j.at("g").get<std::vector<std::vector<double>>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("auction spec: ") + e.what());
  }
  throw InputError("auction spec: unreachable kind");
}

}  // namespace bce
