#pragma once

// Interim utilities: exact on discrete product distributions, and the
// sample-based emp / empp estimators plus a Monte Carlo cross-check.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bce/auction.hpp"
#include "bce/dist.hpp"
#include "bce/errors.hpp"
#include "bce/rng.hpp"
#include "bce/strategy.hpp"

namespace bce {

/// Law of one opponent's bid relative to a fixed query bid.
struct BidMixture {
  double below = 0.0;
  double equal = 0.0;
  double above = 0.0;
};

/// Pushes dist through strategy and compares each resulting bid with `bid`.
inline BidMixture bid_mixture(const Strategy& strategy, const DiscreteDist& dist, double bid) {
  BidMixture mix;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double p = dist.probs()[k];
    const double b = strategy(dist.support()[k]);
    if (b < bid) {
      mix.below += p;
    } else if (b == bid) {
      mix.equal += p;
    } else {
      mix.above += p;
    }
  }
  return mix;
}

/// Expected share of the item for a bidder facing independent opponents:
/// sum_k P(nobody above, exactly k tied) / (k + 1).
inline double win_tie_dp(std::span<const BidMixture> mixtures) {
  // ties[k] = P(no opponent seen so far is above, exactly k of them tie).
  std::vector<double> ties(mixtures.size() + 1, 0.0);
  ties[0] = 1.0;
  std::size_t seen = 0;
  for (const auto& mix : mixtures) {
    for (std::size_t k = seen + 1; k-- > 0;) {
      ties[k + 1] += ties[k] * mix.equal;
      ties[k] *= mix.below;
    }
    ++seen;
  }
  double x = 0.0;
  for (std::size_t k = 0; k < ties.size(); ++k) x += ties[k] / static_cast<double>(k + 1);
  return x;
}

/// Bidder `bidder` with `value` bidding `bid`; `strategies` holds one strategy
/// per bidder, and the querying bidder's own entry is ignored.
struct InterimQuery {
  std::size_t bidder = 0;
  double value = 0.0;
  double bid = 0.0;
  std::span<const Strategy> strategies;
};

namespace detail {

inline void check_query(const AuctionSpec& spec, const InterimQuery& q, std::size_t dist_bidders) {
  spec.check_bidder(q.bidder);
  if (q.strategies.size() != spec.bidders())
    throw InputError("query needs one strategy per bidder");
  if (dist_bidders != spec.bidders())
    throw InputError("distribution bidder count differs from the auction");
  if (!std::isfinite(q.value) || q.value < 0.0 || q.value > spec.value_cap())
    throw InputError("query value outside [0, H]");
  spec.check_bid(q.bid);
}

}  // namespace detail

/// Interim probability that the query bidder wins (ties shared).
inline double interim_allocation(const AuctionSpec& spec, const InterimQuery& q,
                                 const ProductDistribution& dist) {
  detail::check_query(spec, q, dist.bidders());
  std::vector<BidMixture> mixes;
  mixes.reserve(spec.bidders() - 1);
  for (std::size_t j = 0; j < spec.bidders(); ++j) {
    if (j != q.bidder) mixes.push_back(bid_mixture(q.strategies[j], dist[j], q.bid));
  }
  return win_tie_dp(mixes);
}

/// E_{v_-i ~ dist_-i}[ u_i(v_i, b_i, beta_-i(v_-i)) ].
inline double interim_utility_exact(const AuctionSpec& spec, const InterimQuery& q,
                                    const ProductDistribution& dist) {
  const double x = interim_allocation(spec, q, dist);
  const auto [f, g] = spec.shape(q.bidder, q.bid);
  return (q.value - f) * x - g;
}

/// Mean ex-post utility over the sample rows with bidder i's bid fixed at
/// joint[i](v_i); column i of each row is not used.
inline double emp_estimate(const AuctionSpec& spec, const SampleMatrix& samples, std::size_t i,
                           double value, const JointStrategy& joint) {
  if (samples.cols() != spec.bidders()) throw InputError("sample matrix width differs from n");
  const double bid = joint.at(i)(value);
  detail::check_query(spec, {i, value, bid, joint}, samples.cols());
  const auto [f, g] = spec.shape(i, bid);
  const std::size_t n = spec.bidders();
  double share = 0.0;
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const double* row = samples.row(r);
    std::size_t tied = 0;
    bool beaten = false;
    for (std::size_t j = 0; j < n && !beaten; ++j) {
      if (j == i) continue;
      const double b = joint[j](row[j]);
      if (b > bid) {
        beaten = true;
      } else if (b == bid) {
        ++tied;
      }
    }
    if (!beaten) share += 1.0 / static_cast<double>(tied + 1);
  }
  const double x = share / static_cast<double>(samples.rows());
  return (value - f) * x - g;
}

/// Interim utility on the empirical product distribution of the samples.
inline double empp_estimate(const AuctionSpec& spec, const SampleMatrix& samples, std::size_t i,
                            double value, const JointStrategy& joint) {
  return interim_utility_exact(spec, {i, value, joint.at(i)(value), joint},
                               empirical_product(samples));
}

/// Same as above with the empirical product already built.
inline double empp_estimate(const AuctionSpec& spec, const ProductDistribution& empirical_prod,
                            std::size_t i, double value, const JointStrategy& joint) {
  return interim_utility_exact(spec, {i, value, joint.at(i)(value), joint}, empirical_prod);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline McEstimate monte_carlo_estimate(const AuctionSpec& spec, const ProductDistribution& dist,
                                       const InterimQuery& q, std::size_t n_draws,
                                       std::uint64_t seed) {
  if (n_draws < 2) throw InputError("monte_carlo_estimate needs at least 2 draws");
  detail::check_query(spec, q, dist.bidders());
  const auto [f, g] = spec.shape(q.bidder, q.bid);
  Rng rng(seed);
  const std::size_t n = spec.bidders();
  // Welford accumulation; a constant sample gives exactly zero spread.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t d = 0; d < n_draws; ++d) {
    std::size_t tied = 0;
    bool beaten = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == q.bidder) continue;
      const double b = q.strategies[j](dist[j].sample(rng));
      if (b > q.bid) {
        beaten = true;
      } else if (b == q.bid) {
        ++tied;
      }
    }
    const double x = beaten ? 0.0 : 1.0 / static_cast<double>(tied + 1);
    const double u = (q.value - f) * x - g;
    const double delta = u - mean;
    mean += delta / static_cast<double>(d + 1);
    m2 += delta * (u - mean);
  }
  const auto k = static_cast<double>(n_draws);
  return {mean, std::sqrt(m2 / (k - 1.0) / k)};
}

}  // namespace bce
