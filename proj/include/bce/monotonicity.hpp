#pragma once

// Essential monotonicity: a recommended strategy may decrease only over values
// at which the bidder never wins against the conditional opponent profile.

#include <cstddef>
#include <vector>

#include "bce/auction.hpp"
#include "bce/dist.hpp"
#include "bce/estimate.hpp"
#include "bce/strategy.hpp"

namespace bce {

struct MonotonicityWitness {
  std::size_t atom = 0;
  std::size_t bidder = 0;
  double low_value = 0.0;   // v
  double high_value = 0.0;  // v' > v, yet the bid at v' is lower
  double win_probability = 0.0;
};

struct MonotonicityReport {
  bool passed = true;
  std::vector<MonotonicityWitness> violations;
};

/// Interim win probability of bidder i at `bid`, with opponents drawn from Q
/// conditioned on bidder i being recommended `recommended`.
inline double conditional_win_probability(const AuctionSpec& spec, const CorrelatedProfile& q,
                                          const ProductDistribution& dist, std::size_t i,
                                          const Strategy& recommended, double value, double bid) {
  double mass = 0.0;
  double win = 0.0;
  for (const auto& atom : q.atoms()) {
    if (atom.prob <= 0.0 || !(atom.joint[i] == recommended)) continue;
    mass += atom.prob;
    win += atom.prob * interim_allocation(spec, {i, value, bid, atom.joint}, dist);
  }
  return mass > 0.0 ? win / mass : 0.0;
}

inline MonotonicityReport essential_monotonicity_check(const CorrelatedProfile& q,
                                                       const ProductDistribution& dist,
                                                       const AuctionSpec& spec,
                                                       double zero_tolerance = 1e-12) {
  if (q.bidders() != spec.bidders() || dist.bidders() != spec.bidders())
    throw InputError("profile, distribution and auction disagree on bidder count");
  MonotonicityReport report;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const auto& atom = q.atoms()[a];
    // A zero-probability atom conditions on itself alone.
    const CorrelatedProfile self = CorrelatedProfile::point_mass(atom.joint);
    const CorrelatedProfile& context = atom.prob > 0.0 ? q : self;
    for (std::size_t i = 0; i < spec.bidders(); ++i) {
      const Strategy& s = atom.joint[i];
      for (std::size_t lo = 0; lo < s.size(); ++lo) {
        for (std::size_t hi = lo + 1; hi < s.size(); ++hi) {
          if (!(s.bids()[lo] > s.bids()[hi])) continue;
          // Interim allocation is weakly increasing in the bid, so the higher
          // bid (placed at the lower value) must already never win.
          const double x = conditional_win_probability(spec, context, dist, i, s, s.values()[lo],
                                                       s.bids()[lo]);
          if (x > zero_tolerance) {
            report.passed = false;
            report.violations.push_back({a, i, s.values()[lo], s.values()[hi], x});
          }
        }
      }
    }
  }
  return report;
}

}  // namespace bce
