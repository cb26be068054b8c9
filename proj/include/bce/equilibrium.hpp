#pragma once

// Approximate Bayes correlated / Bayes Nash equilibrium verification, the LP
// that computes a minimum-epsilon correlated profile over candidate joint
// strategies, and the sample-to-population transfer check.
//
// All epsilons here are measured against a finite set of deviation bids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bce/auction.hpp"
#include "bce/dist.hpp"
#include "bce/errors.hpp"
#include "bce/estimate.hpp"
#include "bce/lp.hpp"
#include "bce/strategy.hpp"

namespace bce {

/// Per-bidder value points at which deviation incentives are checked.
using ValueProbe = std::vector<std::vector<double>>;

inline ValueProbe support_probe(const ProductDistribution& dist) {
  ValueProbe probe;
  for (const auto& d : dist.components()) probe.push_back(d.support());
  return probe;
}

/// Per-bidder union of the supports of two distributions.
inline ValueProbe union_probe(const ProductDistribution& a, const ProductDistribution& b) {
  ValueProbe probe;
  for (std::size_t i = 0; i < a.bidders(); ++i) {
    std::vector<double> u;
    std::set_union(a[i].support().begin(), a[i].support().end(), b[i].support().begin(),
                   b[i].support().end(), std::back_inserter(u));
    probe.push_back(std::move(u));
  }
  return probe;
}

/// Half the smallest gap of the grid (or of the room above a single point).
inline double default_eta(const AuctionSpec& spec) {
  const auto& g = spec.bid_grid();
  double gap = spec.max_bid() - g.back();
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double d = g[k] - g[k - 1];
    if (gap <= 0.0 || d < gap) gap = d;
  }
  return gap > 0.0 ? gap / 2.0 : 0.0;
}

/// The bid grid, plus b + eta for each grid bid when eta > 0 and b + eta stays
/// within the mechanism's bid range.
inline std::vector<double> candidate_bids(const AuctionSpec& spec, double eta) {
  std::vector<double> out = spec.bid_grid();
  if (eta > 0.0) {
    for (double b : spec.bid_grid()) {
      if (b + eta <= spec.max_bid()) out.push_back(b + eta);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct DeviationGap {
  std::size_t bidder = 0;
  double value = 0.0;
  double gap = 0.0;
};

struct EpsilonReport {
  double epsilon = 0.0;
  std::vector<DeviationGap> gaps;  // bidder-major, then probe order
};

namespace detail {

struct RecommendationGroup {
  const Strategy* recommended = nullptr;
  std::vector<std::size_t> atoms;
  double mass = 0.0;
};

/// Atoms with positive probability grouped by bidder i's recommended strategy.
inline std::vector<RecommendationGroup> group_by_recommendation(const CorrelatedProfile& q,
                                                                std::size_t i) {
  std::vector<RecommendationGroup> groups;
  for (std::size_t a = 0; a < q.size(); ++a) {
    const auto& atom = q.atoms()[a];
    if (atom.prob <= 0.0) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const RecommendationGroup& g) {
      return *g.recommended == atom.joint[i];
    });
    if (it == groups.end()) {
      groups.push_back({&atom.joint[i], {}, 0.0});
      it = groups.end() - 1;
    }
    it->atoms.push_back(a);
    it->mass += atom.prob;
  }
  return groups;
}

inline void check_inputs(const AuctionSpec& spec, const CorrelatedProfile& q,
                         const ProductDistribution& dist, const ValueProbe& probe) {
  if (q.bidders() != spec.bidders() || dist.bidders() != spec.bidders())
    throw InputError("profile, distribution and auction disagree on bidder count");
  if (probe.size() != spec.bidders()) throw InputError("value probe needs one list per bidder");
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!is_monotone(q.atoms()[a].joint))
      throw InputError("profile atom " + std::to_string(a) + " is not monotone");
  }
}

}  // namespace detail

/// Full deviation-gap table: for each bidder i and probed value v,
///   sum over recommendations s of Q(s) * [max_b U^{Q|s}(v, b) - U^{Q|s}(v, s(v))],
/// where b ranges over `deviations` plus the recommended bid itself.
inline EpsilonReport deviation_gaps(const AuctionSpec& spec, const CorrelatedProfile& q,
                                    const ProductDistribution& dist,
                                    const std::vector<double>& deviations,
                                    const ValueProbe& probe) {
  detail::check_inputs(spec, q, dist, probe);
  EpsilonReport report;
  report.epsilon = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.bidders(); ++i) {
    const auto groups = detail::group_by_recommendation(q, i);
    for (double v : probe[i]) {
      double gap = 0.0;
      for (const auto& group : groups) {
        const double on_path = (*group.recommended)(v);
        auto weighted = [&](double bid) {
          double u = 0.0;
          for (std::size_t a : group.atoms) {
            const auto& atom = q.atoms()[a];
            u += atom.prob * interim_utility_exact(spec, {i, v, bid, atom.joint}, dist);
          }
          return u;
        };
        const double base = weighted(on_path);
        double best = base;
        for (double b : deviations) {
          if (b != on_path) best = std::max(best, weighted(b));
        }
        gap += best - base;
      }
      report.gaps.push_back({i, v, gap});
      report.epsilon = std::max(report.epsilon, gap);
    }
  }
  return report;
}

inline EpsilonReport deviation_gaps(const AuctionSpec& spec, const CorrelatedProfile& q,
                                    const ProductDistribution& dist,
                                    const std::vector<double>& deviations) {
  return deviation_gaps(spec, q, dist, deviations, support_probe(dist));
}

/// Smallest epsilon for which Q is an epsilon-BCE w.r.t. the deviation bids.
inline double bce_epsilon(const AuctionSpec& spec, const CorrelatedProfile& q,
                          const ProductDistribution& dist, const std::vector<double>& deviations,
                          const ValueProbe& probe) {
  return deviation_gaps(spec, q, dist, deviations, probe).epsilon;
}

inline double bce_epsilon(const AuctionSpec& spec, const CorrelatedProfile& q,
                          const ProductDistribution& dist, const std::vector<double>& deviations) {
  return bce_epsilon(spec, q, dist, deviations, support_probe(dist));
}

/// Lowest bid among the maximizers of interim utility (ties within 1e-12).
inline double best_response_bid(const AuctionSpec& spec, const JointStrategy& joint,
                                const ProductDistribution& dist, std::size_t i, double value,
                                const std::vector<double>& bids, double* best_utility = nullptr) {
  double best_bid = bids.front();
  double best = -std::numeric_limits<double>::infinity();
  for (double b : bids) {
    const double u = interim_utility_exact(spec, {i, value, b, joint}, dist);
    if (u > best + 1e-12) {
      best = u;
      best_bid = b;
    }
  }
  if (best_utility) *best_utility = best;
  return best_bid;
}

/// Largest gain any bidder can get by a unilateral deviation to a listed bid.
inline double bne_epsilon(const AuctionSpec& spec, const JointStrategy& joint,
                          const ProductDistribution& dist, const std::vector<double>& deviations,
                          const ValueProbe& probe) {
  if (joint.size() != spec.bidders() || dist.bidders() != spec.bidders())
    throw InputError("joint strategy, distribution and auction disagree on bidder count");
  if (!is_monotone(joint)) throw InputError("joint strategy is not monotone");
  double eps = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.bidders(); ++i) {
    for (double v : probe.at(i)) {
      const double base = interim_utility_exact(spec, {i, v, joint[i](v), joint}, dist);
      double best = base;
      for (double b : deviations)
        best = std::max(best, interim_utility_exact(spec, {i, v, b, joint}, dist));
      eps = std::max(eps, best - base);
    }
  }
  return eps;
}

inline double bne_epsilon(const AuctionSpec& spec, const JointStrategy& joint,
                          const ProductDistribution& dist, const std::vector<double>& deviations) {
  return bne_epsilon(spec, joint, dist, deviations, support_probe(dist));
}

// --- LP solver ---------------------------------------------------------------

struct SolverStats {
  std::size_t iterations = 0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
};

struct SolverResult {
  CorrelatedProfile profile;
  double epsilon_star = 0.0;
  EpsilonReport certificate;
  SolverStats stats;
};

struct BceLpOptions {
  /// Cap on dense tableau entries (rows x columns).
  std::uint64_t max_tableau_entries = 80'000'000;
  double verify_tolerance = 1e-6;
  lp::Options simplex;
};

/// Variables: q_a per candidate, t_{i,v,s} per (bidder, value, recommendation),
/// and eps. Minimize eps subject to
///   sum_a q_a = 1,
///   sum_{a: a_i = s} q_a [U_i(v, b, a_-i) - U_i(v, s(v), a_-i)] <= t_{i,v,s}  for every b,
///   sum_s t_{i,v,s} <= eps.
/// At the optimum eps equals the largest entry of the deviation-gap table.
inline lp::LinearProgram build_bce_lp(const AuctionSpec& spec,
                                      const std::vector<JointStrategy>& candidates,
                                      const ProductDistribution& dist,
                                      const std::vector<double>& deviations,
                                      const ValueProbe& probe,
                                      std::uint64_t max_tableau_entries = 80'000'000) {
  if (candidates.empty()) throw InputError("solve_bce_lp needs at least one candidate");
  const std::size_t n = spec.bidders();
  if (dist.bidders() != n || probe.size() != n)
    throw InputError("distribution or probe disagrees with the auction's bidder count");
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    if (candidates[a].size() != n || !is_monotone(candidates[a]))
      throw InputError("candidate " + std::to_string(a) + " is not a monotone joint strategy");
  }

  // Distinct recommendations per bidder, and each candidate's group index.
  std::vector<std::vector<const Strategy*>> recs(n);
  std::vector<std::vector<std::size_t>> group_of(n, std::vector<std::size_t>(candidates.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < candidates.size(); ++a) {
      auto it = std::find_if(recs[i].begin(), recs[i].end(),
                             [&](const Strategy* s) { return *s == candidates[a][i]; });
      group_of[i][a] = static_cast<std::size_t>(it - recs[i].begin());
      if (it == recs[i].end()) recs[i].push_back(&candidates[a][i]);
    }
  }

  std::uint64_t rows = 1;
  std::uint64_t vars = candidates.size() + 1;
  for (std::size_t i = 0; i < n; ++i) {
    vars += probe[i].size() * recs[i].size();
    rows += probe[i].size() * (1 + recs[i].size() * deviations.size());
  }
  const std::uint64_t entries = rows * (vars + rows);
  if (entries > max_tableau_entries) {
    throw ResourceError("BCE LP too large: " + std::to_string(vars) + " variables x " +
                        std::to_string(rows) + " constraints exceeds tableau cap " +
                        std::to_string(max_tableau_entries));
  }

  lp::LinearProgram prog;
  for (std::size_t a = 0; a < candidates.size(); ++a) prog.add_variable("q" + std::to_string(a), 0.0);
  const std::size_t eps = prog.add_variable("eps", 1.0);

  lp::Row simplex_row{{}, lp::Sense::Equal, 1.0, "simplex"};
  for (std::size_t a = 0; a < candidates.size(); ++a) simplex_row.coeffs.emplace_back(a, 1.0);
  prog.rows.push_back(std::move(simplex_row));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t vk = 0; vk < probe[i].size(); ++vk) {
      const double v = probe[i][vk];
      lp::Row sum_row{{}, lp::Sense::LessEqual, 0.0,
                      "gap_" + std::to_string(i) + "_" + std::to_string(vk)};
      for (std::size_t s = 0; s < recs[i].size(); ++s) {
        const std::size_t t = prog.add_variable(
            "t_" + std::to_string(i) + "_" + std::to_string(vk) + "_" + std::to_string(s), 0.0);
        sum_row.coeffs.emplace_back(t, 1.0);
        const double on_path = (*recs[i][s])(v);
        std::vector<std::size_t> members;
        std::vector<double> base;
        for (std::size_t a = 0; a < candidates.size(); ++a) {
          if (group_of[i][a] != s) continue;
          members.push_back(a);
          base.push_back(interim_utility_exact(spec, {i, v, on_path, candidates[a]}, dist));
        }
        for (std::size_t d = 0; d < deviations.size(); ++d) {
          const double b = deviations[d];
          if (b == on_path) continue;
          lp::Row row{{}, lp::Sense::LessEqual, 0.0,
                      "dev_" + std::to_string(i) + "_" + std::to_string(vk) + "_" +
                          std::to_string(s) + "_" + std::to_string(d)};
          for (std::size_t k = 0; k < members.size(); ++k) {
            const double gain =
                interim_utility_exact(spec, {i, v, b, candidates[members[k]]}, dist) - base[k];
            if (gain != 0.0) row.coeffs.emplace_back(members[k], gain);
          }
          row.coeffs.emplace_back(t, -1.0);
          prog.rows.push_back(std::move(row));
        }
      }
      sum_row.coeffs.emplace_back(eps, -1.0);
      prog.rows.push_back(std::move(sum_row));
    }
  }
  return prog;
}

inline SolverResult solve_bce_lp(const AuctionSpec& spec,
                                 const std::vector<JointStrategy>& candidates,
                                 const ProductDistribution& dist,
                                 const std::vector<double>& deviations, const ValueProbe& probe,
                                 const BceLpOptions& options = {}) {
  const auto prog =
      build_bce_lp(spec, candidates, dist, deviations, probe, options.max_tableau_entries);
  const auto sol = lp::solve(prog, options.simplex);
  if (sol.status != lp::Status::Optimal)
    throw SolverError(lp::to_string(sol.status), "BCE LP not solved: " + lp::to_string(sol.status));

  std::vector<ProfileAtom> atoms;
  double total = 0.0;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    if (sol.x[a] > 1e-12) {
      atoms.push_back({candidates[a], sol.x[a]});
      total += sol.x[a];
    }
  }
  if (atoms.empty()) throw SolverError("degenerate", "BCE LP returned an empty distribution");
  for (auto& atom : atoms) atom.prob /= total;
  CorrelatedProfile profile(std::move(atoms));

  auto certificate = deviation_gaps(spec, profile, dist, deviations, probe);
  const double eps_star = sol.x[candidates.size()];
  if (std::abs(certificate.epsilon - eps_star) > options.verify_tolerance) {
    throw SolverError("verification_mismatch",
                      "LP epsilon " + std::to_string(eps_star) + " disagrees with verifier " +
                          std::to_string(certificate.epsilon));
  }
  return {std::move(profile), eps_star, std::move(certificate),
          {sol.iterations, prog.variables(), prog.rows.size()}};
}

inline SolverResult solve_bce_lp(const AuctionSpec& spec,
                                 const std::vector<JointStrategy>& candidates,
                                 const ProductDistribution& dist,
                                 const std::vector<double>& deviations) {
  return solve_bce_lp(spec, candidates, dist, deviations, support_probe(dist));
}

/// All joint strategies whose components are monotone maps value_grid -> bid_grid.
inline std::vector<JointStrategy> enumerate_joint_monotone(std::size_t n,
                                                           const std::vector<double>& value_grid,
                                                           const std::vector<double>& bid_grid,
                                                           std::uint64_t cap = kDefaultEnumerationCap) {
  const auto singles = enumerate_monotone(value_grid, bid_grid, cap);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= singles.size();
    if (total > cap)
      throw ResourceError("joint monotone strategy count exceeds cap " + std::to_string(cap));
  }
  std::vector<JointStrategy> out;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    JointStrategy joint;
    for (std::size_t i = 0; i < n; ++i) joint.push_back(singles[idx[i]]);
    out.push_back(std::move(joint));
    std::size_t pos = n;
    while (pos > 0 && ++idx[pos - 1] == singles.size()) idx[--pos] = 0;
    if (pos == 0) break;
  }
  return out;
}

// --- transfer ------------------------------------------------------------------

struct TransferReport {
  double eps_on_true = 0.0;  // measured on the population distribution
  double eps_on_empp = 0.0;  // measured on the empirical product distribution
  double eps_hat = 0.0;      // max interim-utility gap between the two
  bool bound_ok = false;     // eps_on_true <= eps_on_empp + 2 eps_hat
  bool converse_ok = false;  // eps_on_empp <= eps_on_true + 2 eps_hat
};

inline constexpr double kTransferSlack = 1e-6;

/// Largest |U_a - U_b| over the atoms of Q, bidders, probed values, and every
/// bid the deviation-gap table evaluates.
inline double max_utility_gap(const AuctionSpec& spec, const CorrelatedProfile& q,
                              const ProductDistribution& a, const ProductDistribution& b,
                              const std::vector<double>& deviations, const ValueProbe& probe) {
  double worst = 0.0;
  for (const auto& atom : q.atoms()) {
    if (atom.prob <= 0.0) continue;
    for (std::size_t i = 0; i < spec.bidders(); ++i) {
      for (double v : probe[i]) {
        auto check = [&](double bid) {
          const InterimQuery query{i, v, bid, atom.joint};
          worst = std::max(worst, std::abs(interim_utility_exact(spec, query, a) -
                                           interim_utility_exact(spec, query, b)));
        };
        check(atom.joint[i](v));
        for (double bid : deviations) check(bid);
      }
    }
  }
  return worst;
}

/// Compares Q's epsilon on two distributions; `population` plays the true F.
inline TransferReport transfer_between(const AuctionSpec& spec, const CorrelatedProfile& q,
                                       const ProductDistribution& population,
                                       const ProductDistribution& empirical_prod,
                                       const std::vector<double>& deviations,
                                       const ValueProbe& probe) {
  TransferReport r;
  r.eps_on_true = bce_epsilon(spec, q, population, deviations, probe);
  r.eps_on_empp = bce_epsilon(spec, q, empirical_prod, deviations, probe);
  r.eps_hat = max_utility_gap(spec, q, population, empirical_prod, deviations, probe);
  r.bound_ok = r.eps_on_true <= r.eps_on_empp + 2.0 * r.eps_hat + kTransferSlack;
  r.converse_ok = r.eps_on_empp <= r.eps_on_true + 2.0 * r.eps_hat + kTransferSlack;
  return r;
}

/// Values are probed on the union of the true and empirical supports so both
/// epsilons quantify over the same type space.
inline TransferReport transfer_check(const AuctionSpec& spec, const CorrelatedProfile& q,
                                     const ProductDistribution& true_dist,
                                     const SampleMatrix& samples,
                                     const std::vector<double>& deviations) {
  const auto emp = empirical_product(samples);
  return transfer_between(spec, q, true_dist, emp, deviations, union_probe(true_dist, emp));
}

// --- pluggable discrete BNE algorithm -------------------------------------------

struct BneResult {
  JointStrategy joint;
  double epsilon = 0.0;  // bne_epsilon of `joint` on the input distribution
  std::size_t rounds = 0;
  bool converged = false;
};

using BneAlgorithm = std::function<std::optional<BneResult>(
    const AuctionSpec&, const ProductDistribution&, const std::vector<double>&, double)>;

/// Default discrete-distribution BNE routine: round-robin best responses over
/// the candidate bids, starting from everyone bidding the lowest candidate.
/// Stops at a fixed point, at the target epsilon, or after max_rounds, and
/// returns the best iterate seen.
inline std::optional<BneResult> external_bne_stub(const AuctionSpec& spec,
                                                  const ProductDistribution& dist,
                                                  const std::vector<double>& deviations,
                                                  double target_epsilon,
                                                  std::size_t max_rounds = 100) {
  if (deviations.empty()) return std::nullopt;
  const std::size_t n = spec.bidders();
  if (dist.bidders() != n) throw InputError("distribution disagrees with the auction's bidder count");
  JointStrategy joint;
  for (std::size_t i = 0; i < n; ++i)
    joint.push_back(Strategy::constant(dist[i].support(), deviations.front()));

  BneResult best{joint, bne_epsilon(spec, joint, dist, deviations), 0, false};
  for (std::size_t round = 1; round <= max_rounds && best.epsilon > target_epsilon; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& values = dist[i].support();
      std::vector<double> bids(values.size());
      for (std::size_t k = 0; k < values.size(); ++k) {
        bids[k] = best_response_bid(spec, joint, dist, i, values[k], deviations);
        if (k > 0) bids[k] = std::max(bids[k], bids[k - 1]);
      }
      auto next = make_strategy(values, std::move(bids));
      if (!(next == joint[i])) {
        joint[i] = std::move(next);
        changed = true;
      }
    }
    const double eps = bne_epsilon(spec, joint, dist, deviations);
    if (eps <= best.epsilon) best = {joint, eps, round, false};
    if (!changed) break;
  }
  best.converged = best.epsilon <= std::max(target_epsilon, 1e-12);
  return best;
}

// --- serialization ---------------------------------------------------------------

inline nlohmann::json to_json(const EpsilonReport& r) {
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& g : r.gaps) gaps.push_back({{"bidder", g.bidder}, {"value", g.value}, {"gap", g.gap}});
  return {{"epsilon", r.epsilon}, {"deviation_set", "candidate bids (grid-restricted)"}, {"gaps", gaps}};
}

inline nlohmann::json to_json(const SolverResult& r) {
  return {{"profile", to_json(r.profile)},
          {"epsilon_star", r.epsilon_star},
          {"certificate", to_json(r.certificate)},
          {"solver_stats",
           {{"iterations", r.stats.iterations},
            {"variables", r.stats.variables},
            {"constraints", r.stats.constraints}}}};
}

inline nlohmann::json to_json(const TransferReport& r) {
  return {{"eps_on_true", r.eps_on_true},
          {"eps_on_empp", r.eps_on_empp},
          {"eps_hat", r.eps_hat},
          {"bound_ok", r.bound_ok},
          {"converse_ok", r.converse_ok}};
}

}  // namespace bce
