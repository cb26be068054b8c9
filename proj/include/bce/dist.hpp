#pragma once

// Discrete value distributions, sampling, empirical constructions, and the
// two-point Bernoulli family used for sample-complexity lower bounds.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bce/errors.hpp"
#include "bce/rng.hpp"

namespace bce {

inline constexpr double kProbabilityTolerance = 1e-12;

/// Finite-support distribution on money values.
class DiscreteDist {
 public:
  DiscreteDist(std::vector<double> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty()) throw InputError("distribution support is empty");
    if (support_.size() != probs_.size())
      throw InputError("distribution support and probs differ in length");
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      if (!std::isfinite(support_[k]) || support_[k] < 0.0)
        throw InputError("distribution support must be finite and nonnegative");
      if (k > 0 && !(support_[k - 1] < support_[k]))
        throw InputError("distribution support must be strictly increasing");
      if (!std::isfinite(probs_[k]) || probs_[k] < 0.0)
        throw InputError("distribution probabilities must be nonnegative");
      total += probs_[k];
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
      throw InputError("distribution probabilities sum to " + std::to_string(total));
  }

  static DiscreteDist point_mass(double v) { return DiscreteDist({v}, {1.0}); }

  static DiscreteDist uniform(std::vector<double> support) {
    const std::size_t k = support.size();
    return DiscreteDist(std::move(support), std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  double max_value() const noexcept { return support_.back(); }

  /// Probability of exactly v (0 if v is not an atom).
  double mass(double v) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), v);
    if (it == support_.end() || *it != v) return 0.0;
    return probs_[static_cast<std::size_t>(it - support_.begin())];
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += support_[k] * probs_[k];
    return s;
  }

  /// Inverse-CDF draw from u in [0, 1).
  double quantile(double u) const {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < size(); ++k) {
      acc += probs_[k];
      if (u < acc) return support_[k];
    }
    // Skip trailing zero-probability atoms so a draw always lands on positive mass.
    std::size_t last = size() - 1;
    while (last > 0 && probs_[last] == 0.0) --last;
    return support_[last];
  }

  double sample(Rng& rng) const { return quantile(rng.uniform01()); }

  friend bool operator==(const DiscreteDist&, const DiscreteDist&) = default;

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
};

/// Independent per-bidder value distributions.
class ProductDistribution {
 public:
  explicit ProductDistribution(std::vector<DiscreteDist> per_bidder)
      : per_bidder_(std::move(per_bidder)) {
    if (per_bidder_.empty()) throw InputError("product distribution needs at least one bidder");
  }

  std::size_t bidders() const noexcept { return per_bidder_.size(); }
  const DiscreteDist& operator[](std::size_t i) const { return per_bidder_.at(i); }
  const std::vector<DiscreteDist>& components() const noexcept { return per_bidder_; }

  double max_value() const {
    double m = 0.0;
    for (const auto& d : per_bidder_) m = std::max(m, d.max_value());
    return m;
  }

  friend bool operator==(const ProductDistribution&, const ProductDistribution&) = default;

 private:
  std::vector<DiscreteDist> per_bidder_;
};

/// m x n matrix of drawn values; row j is the joint sample v^(j).
class SampleMatrix {
 public:
  SampleMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               std::uint64_t seed = 0)
      : rows_(rows), cols_(cols), values_(std::move(values)), seed_(seed) {
    if (rows_ == 0 || cols_ == 0) throw InputError("sample matrix must be nonempty");
    if (values_.size() != rows_ * cols_) throw InputError("sample matrix size mismatch");
    for (double v : values_) {
      if (!std::isfinite(v) || v < 0.0) throw InputError("sample values must be nonnegative");
    }
  }

  static SampleMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                std::uint64_t seed = 0) {
    if (rows.empty()) throw InputError("sample matrix must be nonempty");
    const std::size_t n = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * n);
    for (const auto& r : rows) {
      if (r.size() != n) throw InputError("ragged sample rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return SampleMatrix(rows.size(), n, std::move(flat), seed);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  const double* row(std::size_t r) const { return values_.data() + r * cols_; }
  const std::vector<double>& data() const noexcept { return values_; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  std::uint64_t seed_;
};

inline SampleMatrix draw_samples(const ProductDistribution& dist, std::size_t m,
                                 std::uint64_t seed) {
  if (m == 0) throw InputError("draw_samples needs m >= 1");
  const std::size_t n = dist.bidders();
  Rng rng(seed);
  std::vector<double> values(m * n);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) values[r * n + c] = dist[c].sample(rng);
  }
  return SampleMatrix(m, n, std::move(values), seed);
}

/// Joint (correlated) distribution with finitely many atoms.
struct JointEmpirical {
  std::vector<std::vector<double>> points;  // lexicographically sorted
  std::vector<double> weights;
};

/// Uniform distribution over the sampled rows; repeated rows merge their weight.
inline JointEmpirical empirical(const SampleMatrix& samples) {
  std::map<std::vector<double>, std::size_t> counts;
  for (std::size_t r = 0; r < samples.rows(); ++r)
    ++counts[std::vector<double>(samples.row(r), samples.row(r) + samples.cols())];
  JointEmpirical out;
  const auto m = static_cast<double>(samples.rows());
  for (const auto& [point, count] : counts) {
    out.points.push_back(point);
    out.weights.push_back(static_cast<double>(count) / m);
  }
  return out;
}

/// Uniform distribution over a list of values, duplicates merged.
inline DiscreteDist uniform_over(std::vector<double> values) {
  if (values.empty()) throw InputError("uniform_over needs at least one value");
  std::sort(values.begin(), values.end());
  const auto m = static_cast<double>(values.size());
  std::vector<double> support;
  std::vector<std::size_t> counts;
  for (double v : values) {
    if (!support.empty() && support.back() == v) {
      ++counts.back();
    } else {
      support.push_back(v);
      counts.push_back(1);
    }
  }
  std::vector<double> probs(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) probs[k] = static_cast<double>(counts[k]) / m;
  return DiscreteDist(std::move(support), std::move(probs));
}

/// Product of per-column uniform distributions over the samples.
inline ProductDistribution empirical_product(const SampleMatrix& samples) {
  std::vector<DiscreteDist> parts;
  parts.reserve(samples.cols());
  for (std::size_t c = 0; c < samples.cols(); ++c) parts.push_back(uniform_over(samples.column(c)));
  return ProductDistribution(std::move(parts));
}

/// KL(p || q) in nats. Requires q > 0 wherever p > 0.
inline double kl_divergence(const DiscreteDist& p, const DiscreteDist& q) {
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double pk = p.probs()[k];
    if (pk == 0.0) continue;
    const double qk = q.mass(p.support()[k]);
    if (qk == 0.0)
      throw DomainError("KL divergence undefined: q has no mass at " +
                        std::to_string(p.support()[k]));
    kl += pk * std::log(pk / qk);
  }
  return std::max(kl, 0.0);
}

/// The reference-scale bias: gamma = c1 * epsilon with c1 = 2000.
inline constexpr double kLowerBoundC1 = 2000.0;
inline double lower_bound_gamma(double epsilon) { return kLowerBoundC1 * epsilon; }

/// Bernoulli on {0, 1} with P(v = 1) = (1 + sign * gamma) / n.
inline DiscreteDist biased_bernoulli(std::size_t n, double gamma, int sign) {
  const double p1 = (1.0 + sign * gamma) / static_cast<double>(n);
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw InputError("biased_bernoulli probability outside [0, 1]");
  return DiscreteDist({0.0, 1.0}, {1.0 - p1, p1});
}

/// F_S: bidders in S (0-based, subset of [0, n-2]) draw from F+, the other
/// first n-1 bidders from F-, and the last bidder has value 1 surely.
inline ProductDistribution lower_bound_family(std::size_t n, double gamma,
                                              const std::vector<bool>& in_s) {
  if (n < 2) throw InputError("lower_bound_family needs n >= 2");
  if (!(gamma > 0.0 && gamma < 0.5)) throw InputError("gamma must lie in (0, 1/2)");
  if (in_s.size() != n - 1) throw InputError("membership vector must have n-1 entries");
  std::vector<DiscreteDist> parts;
  parts.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) parts.push_back(biased_bernoulli(n, gamma, in_s[i] ? 1 : -1));
  parts.push_back(DiscreteDist::point_mass(1.0));
  return ProductDistribution(std::move(parts));
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json to_json(const DiscreteDist& d) {
  return {{"support", d.support()}, {"probs", d.probs()}};
}

inline DiscreteDist dist_from_json(const nlohmann::json& j) {
  try {
    return DiscreteDist(j.at("support").get<std::vector<double>>(),
                        j.at("probs").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("distribution: ") + e.what());
  }
}

inline nlohmann::json to_json(const ProductDistribution& d) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : d.components()) arr.push_back(to_json(c));
  return arr;
}

inline ProductDistribution product_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("product distribution must be a JSON array");
  std::vector<DiscreteDist> parts;
  for (const auto& c : j) parts.push_back(dist_from_json(c));
  return ProductDistribution(std::move(parts));
}

/// Shortest decimal text that round-trips a double.
inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// CSV body with header bidder_1,...,bidder_n.
inline void write_csv(std::ostream& out, const SampleMatrix& s) {
  for (std::size_t c = 0; c < s.cols(); ++c) out << (c ? "," : "") << "bidder_" << c + 1;
  out << '\n';
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.cols(); ++c) out << (c ? "," : "") << format_number(s(r, c));
    out << '\n';
  }
}

inline nlohmann::json sidecar_json(const SampleMatrix& s) {
  return {{"seed", s.seed()}, {"m", s.rows()}, {"n", s.cols()}};
}

}  // namespace bce
