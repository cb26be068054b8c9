#pragma once

// Seeded experiment suite. Each run_* function is a pure function of its
// config and returns a Report with per-trial records, summary statistics,
// pass/fail verdicts and CSV tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bce/auction.hpp"
#include "bce/dist.hpp"
#include "bce/equilibrium.hpp"
#include "bce/errors.hpp"
#include "bce/estimate.hpp"
#include "bce/monotonicity.hpp"
#include "bce/rng.hpp"
#include "bce/strategy.hpp"

namespace bce {

using nlohmann::json;

// --- reports -------------------------------------------------------------------

struct Verdict {
  std::string name;
  std::string checks;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "==", "in"
  bool passed = false;
  bool flagged = false;
  std::string detail;
};

struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string kind;
  json config;
  std::string config_hash;
  std::vector<std::string> notes;
  json records = json::array();
  json summary = json::object();
  std::vector<Verdict> verdicts;
  std::vector<CsvTable> tables;

  bool passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
  }

  const Verdict* verdict(std::string_view name) const {
    for (const auto& v : verdicts) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  const CsvTable* table(std::string_view file) const {
    for (const auto& t : tables) {
      if (t.file == file) return &t;
    }
    return nullptr;
  }
};

inline std::string cell(double x) { return format_number(x); }
inline std::string cell(std::size_t x) { return std::to_string(x); }
inline std::string cell(bool x) { return x ? "true" : "false"; }

/// FNV-1a over the compact dump of the resolved config, as 16 hex digits.
inline std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json to_json(const Verdict& v) {
  json j;
  j["name"] = v.name;
  j["checks"] = v.checks;
  j["value"] = v.value;
  j["threshold"] = v.threshold;
  j["relation"] = v.relation;
  j["passed"] = v.passed;
  j["flagged"] = v.flagged;
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

inline json to_json(const Report& r) {
  json j;
  j["kind"] = r.kind;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config;
  j["notes"] = r.notes;
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v));
  j["passed"] = r.passed();
  j["summary"] = r.summary;
  j["records"] = r.records;
  j["artifacts"] = json::array();
  for (const auto& t : r.tables) j["artifacts"].push_back(t.file);
  return j;
}

inline void write_table(std::ostream& out, const CsvTable& t) {
  for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

/// Writes report.json and every CSV table into `dir`, creating it if needed.
inline void write_report(const Report& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("report.json");
    out << to_json(r).dump(2) << '\n';
  }
  for (const auto& t : r.tables) {
    auto out = open(t.file);
    write_table(out, t);
  }
}

// --- config reading --------------------------------------------------------------

/// Config problem tied to a dotted key path such as "auction.n".
class ConfigError : public InputError {
 public:
  ConfigError(std::string path, const std::string& message)
      : InputError("config key '" + path + "': " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Integer JSON value >= 0, whether parsed as signed or unsigned.
inline bool is_nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class ConfigReader {
 public:
  explicit ConfigReader(const json& j, std::string prefix = "") : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected a JSON object");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    const json* v = find(key);
    if (!v) return def;
    if (!is_nonnegative_integer(*v)) throw ConfigError(path(key), "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }

  std::size_t count(const std::string& key, std::size_t def, std::size_t min = 0) {
    const auto x = u64(key, def);
    if (x < min) throw ConfigError(path(key), "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(x);
  }

  double number(const std::string& key, double def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  std::string text(const std::string& key, std::string def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_array() || v->empty()) throw ConfigError(path(key), "expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) throw ConfigError(path(key), "expected a nonempty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_array() || v->empty())
      throw ConfigError(path(key), "expected a nonempty array of nonnegative integers");
    std::vector<std::size_t> out;
    for (const auto& x : *v) {
      if (!is_nonnegative_integer(x))
        throw ConfigError(path(key), "expected a nonempty array of nonnegative integers");
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

  AuctionSpec auction(const std::string& key, AuctionSpec def) {
    const json* v = find(key);
    if (!v) return def;
    ConfigReader sub(*v, path(key));
    for (const char* field : {"n", "H", "kind", "bid_grid"}) {
      if (!sub.has(field)) throw ConfigError(sub.path(field), "missing");
    }
    if (!is_nonnegative_integer((*v)["n"])) throw ConfigError(sub.path("n"), "expected a positive integer");
    if (!(*v)["H"].is_number()) throw ConfigError(sub.path("H"), "expected a number");
    if (!(*v)["kind"].is_string()) throw ConfigError(sub.path("kind"), "expected \"fpa\", \"apa\" or \"custom\"");
    sub.numbers("bid_grid", {});
    for (const auto& [k, _] : v->items()) {
      if (k != "n" && k != "H" && k != "kind" && k != "bid_grid" && k != "f" && k != "g")
        throw ConfigError(sub.path(k), "unknown key");
    }
    try {
      return auction_from_json(*v);
    } catch (const InputError& e) {
      throw ConfigError(path(key), e.what());
    }
  }

  ProductDistribution distribution(const std::string& key, ProductDistribution def) {
    const json* v = find(key);
    if (!v) return def;
    if (!v->is_array() || v->empty())
      throw ConfigError(path(key), "expected an array of {\"support\", \"probs\"} objects");
    std::vector<DiscreteDist> parts;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string p = path(key) + "[" + std::to_string(i) + "]";
      const auto& c = (*v)[i];
      if (!c.is_object() || !c.contains("support") || !c.contains("probs"))
        throw ConfigError(p, "expected an object with \"support\" and \"probs\"");
      try {
        parts.push_back(dist_from_json(c));
      } catch (const InputError& e) {
        throw ConfigError(p, e.what());
      }
    }
    return ProductDistribution(std::move(parts));
  }

  /// Rejects keys the experiment does not read.
  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(path(k), "unknown key");
    }
  }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

namespace detail {

inline void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

inline void check_distribution_fits(const ProductDistribution& dist, const AuctionSpec& spec,
                                    const std::string& path) {
  require(dist.bidders() == spec.bidders(), path,
          "has " + std::to_string(dist.bidders()) + " bidders but the auction has " +
              std::to_string(spec.bidders()));
  for (std::size_t i = 0; i < dist.bidders(); ++i) {
    require(dist[i].support().front() >= 0.0 && dist[i].max_value() <= spec.value_cap(),
            path + "[" + std::to_string(i) + "]", "support must lie in [0, H]");
  }
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

/// Least-squares slope of y on x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

inline std::vector<double> linspace01(std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k)
    out[k] = points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(points - 1);
  return out;
}

inline Verdict at_most(std::string name, std::string checks, double value, double threshold) {
  return {std::move(name), std::move(checks), value, threshold, "<=", value <= threshold, false, {}};
}

inline Verdict at_least(std::string name, std::string checks, double value, double threshold) {
  return {std::move(name), std::move(checks), value, threshold, ">=", value >= threshold, false, {}};
}

inline Verdict all_of(std::string name, std::string checks, std::size_t ok, std::size_t total) {
  Verdict v{std::move(name), std::move(checks), static_cast<double>(ok), static_cast<double>(total),
            "==", ok == total, false, {}};
  v.detail = std::to_string(ok) + "/" + std::to_string(total) + " cases hold";
  return v;
}

inline void finalize(Report& r, json config) {
  r.config_hash = bce::config_hash(config);
  r.config = std::move(config);
}

}  // namespace detail

// --- error sweep -------------------------------------------------------------------

struct ErrorSweepConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  AuctionSpec auction = AuctionSpec::first_price(3, 1.0, {0.0, 0.25, 0.5, 0.75, 1.0});
  ProductDistribution distribution{{DiscreteDist({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5}),
                                    DiscreteDist({0.0, 0.5, 1.0}, {0.5, 0.3, 0.2}),
                                    DiscreteDist({0.0, 0.5, 1.0}, {0.3, 0.4, 0.3})}};
  std::size_t probes = 200;
  std::vector<std::size_t> m_list{100, 1000, 10000};
  double epsilon = 0.05;  // accuracy target for the failing-trial fraction
  double slope_low = -0.65;
  double slope_high = -0.35;
  double median_fraction = 0.05;  // of H, at the largest m

  static ErrorSweepConfig from_json(const json& j) {
    ErrorSweepConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.trials = r.count("trials", c.trials, 1);
    c.auction = r.auction("auction", c.auction);
    c.distribution = r.distribution("distribution", c.distribution);
    c.probes = r.count("probes", c.probes, 1);
    c.m_list = r.counts("m_list", c.m_list);
    c.epsilon = r.number("epsilon", c.epsilon);
    c.slope_low = r.number("slope_low", c.slope_low);
    c.slope_high = r.number("slope_high", c.slope_high);
    c.median_fraction = r.number("median_fraction", c.median_fraction);
    r.finish();
    detail::check_distribution_fits(c.distribution, c.auction, "distribution");
    detail::require(c.m_list.size() >= 2, "m_list", "needs at least two sample sizes");
    for (std::size_t k = 0; k < c.m_list.size(); ++k) {
      detail::require(c.m_list[k] >= 1 && (k == 0 || c.m_list[k - 1] < c.m_list[k]), "m_list",
                      "must be positive and strictly increasing");
    }
    detail::require(c.epsilon > 0.0, "epsilon", "must be positive");
    detail::require(c.slope_low < c.slope_high, "slope_low", "must be below slope_high");
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["auction"] = bce::to_json(auction);
    j["distribution"] = bce::to_json(distribution);
    j["probes"] = probes;
    j["m_list"] = m_list;
    j["epsilon"] = epsilon;
    j["slope_low"] = slope_low;
    j["slope_high"] = slope_high;
    j["median_fraction"] = median_fraction;
    return j;
  }
};

inline Report run_error_sweep(const ErrorSweepConfig& c) {
  Report r;
  r.kind = "error-sweep";
  r.notes.push_back("sup error is taken over random monotone joint strategies x support values x bidders");
  r.notes.push_back("only the 1/sqrt(m) rate is checked; absolute sample-size constants are not");
  const auto& spec = c.auction;
  const auto& dist = c.distribution;
  const std::size_t n = spec.bidders();
  const double cap = spec.value_cap();

  Rng probe_rng(derive_seed(c.seed, 0));
  std::vector<JointStrategy> probes(c.probes);
  for (auto& joint : probes) {
    for (std::size_t i = 0; i < n; ++i)
      joint.push_back(random_monotone(dist[i].support(), spec.bid_grid(), probe_rng));
  }
  // exact[r][i][k]: interim utility of bidder i at her k-th support value.
  std::vector<std::vector<std::vector<double>>> exact(c.probes, std::vector<std::vector<double>>(n));
  for (std::size_t p = 0; p < c.probes; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      for (double v : dist[i].support())
        exact[p][i].push_back(interim_utility_exact(spec, {i, v, probes[p][i](v), probes[p]}, dist));
    }
  }

  CsvTable errors{"error_sweep.csv", {"m", "trial", "estimator", "sup_error"}, {}};
  CsvTable perm{"permutation_deviation.csv", {"m", "trial", "deviation"}, {}};
  std::size_t triangle_ok = 0;
  std::size_t total = 0;
  std::vector<double> med_emp, med_empp, logm, log_emp, log_empp;
  json per_m = json::array();
  for (std::size_t m : c.m_list) {
    std::vector<double> sup_emp(c.trials), sup_empp(c.trials);
    for (std::size_t t = 0; t < c.trials; ++t) {
      const std::uint64_t seed = derive_seed(derive_seed(c.seed, m), t);
      const auto samples = draw_samples(dist, m, seed);
      const auto prod = empirical_product(samples);
      double e_emp = 0.0, e_empp = 0.0, dev = 0.0;
      for (std::size_t p = 0; p < c.probes; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
          const auto& support = dist[i].support();
          for (std::size_t k = 0; k < support.size(); ++k) {
            const double a = emp_estimate(spec, samples, i, support[k], probes[p]);
            const double b = empp_estimate(spec, prod, i, support[k], probes[p]);
            e_emp = std::max(e_emp, std::abs(a - exact[p][i][k]));
            e_empp = std::max(e_empp, std::abs(b - exact[p][i][k]));
            dev = std::max(dev, std::abs(a - b));
          }
        }
      }
      sup_emp[t] = e_emp;
      sup_empp[t] = e_empp;
      const bool tri = e_empp <= e_emp + dev + 1e-12;
      triangle_ok += tri;
      ++total;
      json rec;
      rec["m"] = m;
      rec["trial"] = t;
      rec["seed"] = seed;
      rec["sup_error_emp"] = e_emp;
      rec["sup_error_empp"] = e_empp;
      rec["permutation_deviation"] = dev;
      rec["triangle_ok"] = tri;
      r.records.push_back(rec);
      errors.rows.push_back({cell(m), cell(t), "emp", cell(e_emp)});
      errors.rows.push_back({cell(m), cell(t), "empp", cell(e_empp)});
      perm.rows.push_back({cell(m), cell(t), cell(dev)});
    }
    const double me = detail::median(sup_emp);
    const double mp = detail::median(sup_empp);
    med_emp.push_back(me);
    med_empp.push_back(mp);
    auto failing = [&](const std::vector<double>& xs) {
      return static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double x) { return x > c.epsilon; })) /
             static_cast<double>(xs.size());
    };
    json s;
    s["m"] = m;
    s["median_sup_error_emp"] = me;
    s["median_sup_error_empp"] = mp;
    s["failing_fraction_emp"] = failing(sup_emp);
    s["failing_fraction_empp"] = failing(sup_empp);
    per_m.push_back(s);
  }
  r.summary["per_m"] = per_m;
  r.summary["epsilon"] = c.epsilon;

  std::vector<double> lm;
  for (std::size_t m : c.m_list) lm.push_back(std::log(static_cast<double>(m)));
  auto slope_verdict = [&](const std::string& name, const std::vector<double>& med) {
    Verdict v{name, "log-log slope of median sup error vs m (1/sqrt(m) rate)", 0.0, 0.0, "in", false, false, {}};
    v.threshold = c.slope_high;
    v.detail = "range [" + format_number(c.slope_low) + ", " + format_number(c.slope_high) + "]";
    if (std::all_of(med.begin(), med.end(), [](double x) { return x == 0.0; })) {
      v.value = 0.0;
      v.passed = true;
      v.flagged = true;
      v.detail += "; errors vanish identically, slope undefined";
    } else if (std::any_of(med.begin(), med.end(), [](double x) { return !(x > 0.0); })) {
      v.value = std::nan("");
      v.detail += "; a zero median makes the log-log fit undefined";
    } else {
      std::vector<double> ly;
      for (double x : med) ly.push_back(std::log(x));
      v.value = detail::fit_slope(lm, ly);
      v.passed = v.value >= c.slope_low && v.value <= c.slope_high;
    }
    r.summary[name] = v.value;
    return v;
  };
  r.verdicts.push_back(slope_verdict("slope_emp", med_emp));
  r.verdicts.push_back(slope_verdict("slope_empp", med_empp));
  const double limit = c.median_fraction * cap;
  auto med_verdict = [&](const std::string& name, double value) {
    Verdict v{name, "median sup error at the largest m below the configured fraction of H", value, limit,
              "<", value < limit, false, {}};
    return v;
  };
  r.verdicts.push_back(med_verdict("median_emp_at_max_m", med_emp.back()));
  r.verdicts.push_back(med_verdict("median_empp_at_max_m", med_empp.back()));
  r.verdicts.push_back(detail::all_of("triangle_bookkeeping",
                                      "empp error <= emp error + permutation deviation on every record",
                                      triangle_ok, total));
  auto ladder = [&](const std::string& name, const std::vector<double>& med) {
    std::size_t inversions = 0;
    for (std::size_t k = 1; k < med.size(); ++k) inversions += med[k] > med[k - 1];
    Verdict v{name, "median errors non-increasing in m (one inversion tolerated and flagged)",
              static_cast<double>(inversions), 1.0, "<=", inversions <= 1, inversions == 1, {}};
    return v;
  };
  r.verdicts.push_back(ladder("ladder_emp", med_emp));
  r.verdicts.push_back(ladder("ladder_empp", med_empp));
  r.tables.push_back(std::move(errors));
  r.tables.push_back(std::move(perm));
  detail::finalize(r, c.to_json());
  return r;
}

// --- non-monotone demonstration ---------------------------------------------------

struct NonmonotoneConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 5;
  std::size_t grid_points = 10000;
  std::size_t m = 10;
  std::size_t control_m = 1000;
  double min_gap = 0.4;
  double max_control_gap = 0.1;

  static NonmonotoneConfig from_json(const json& j) {
    NonmonotoneConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.trials = r.count("trials", c.trials, 1);
    c.grid_points = r.count("grid_points", c.grid_points, 3);
    c.m = r.count("m", c.m, 1);
    c.control_m = r.count("control_m", c.control_m, 1);
    c.min_gap = r.number("min_gap", c.min_gap);
    c.max_control_gap = r.number("max_control_gap", c.max_control_gap);
    r.finish();
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["grid_points"] = grid_points;
    j["m"] = m;
    j["control_m"] = control_m;
    j["min_gap"] = min_gap;
    j["max_control_gap"] = max_control_gap;
    return j;
  }
};

inline Report run_nonmonotone_demo(const NonmonotoneConfig& c) {
  Report r;
  r.kind = "nonmonotone-demo";
  r.notes.push_back("a continuous uniform value is emulated by a fine grid: this shows a large error, not impossibility");
  const auto grid = detail::linspace01(c.grid_points);
  const double eta = (grid[1] - grid[0]) / 2.0;
  const auto spec = AuctionSpec::first_price(2, 1.0, {0.0, 0.5, 0.5 + eta});
  const ProductDistribution dist({DiscreteDist::point_mass(1.0), DiscreteDist::uniform(grid)});
  const auto bidder1 = Strategy::constant({1.0}, 0.5);
  const auto identity = make_strategy(grid, grid);

  CsvTable table{"nonmonotone.csv",
                 {"trial", "emp_adversarial", "exact_adversarial", "gap_adversarial", "emp_control",
                  "exact_control", "gap_control"},
                 {}};
  double min_gap = std::numeric_limits<double>::infinity();
  double max_ctrl = 0.0;
  std::size_t construction_ok = 0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const std::uint64_t seed = derive_seed(c.seed, 2 * t);
    const auto samples = draw_samples(dist, c.m, seed);
    const auto sampled = samples.column(1);
    std::vector<double> bids(grid.size(), 0.5 + eta);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (std::find(sampled.begin(), sampled.end(), grid[k]) != sampled.end()) bids[k] = 0.0;
    }
    const auto adversary = Strategy::step(grid, bids);
    const JointStrategy joint{bidder1, adversary};
    const double emp = emp_estimate(spec, samples, 0, 1.0, joint);
    const double exact = interim_utility_exact(spec, {0, 1.0, 0.5, joint}, dist);
    const double gap = std::abs(emp - exact);
    bool outbids = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (bids[k] != 0.0 && !(adversary(grid[k]) > 0.5)) outbids = false;
    }
    construction_ok += outbids;

    const std::uint64_t cseed = derive_seed(c.seed, 2 * t + 1);
    const auto csamples = draw_samples(dist, c.control_m, cseed);
    const JointStrategy control{bidder1, identity};
    const double cemp = emp_estimate(spec, csamples, 0, 1.0, control);
    const double cexact = interim_utility_exact(spec, {0, 1.0, 0.5, control}, dist);
    const double cgap = std::abs(cemp - cexact);

    min_gap = std::min(min_gap, gap);
    max_ctrl = std::max(max_ctrl, cgap);
    json rec;
    rec["trial"] = t;
    rec["seed"] = seed;
    rec["control_seed"] = cseed;
    rec["distinct_sampled_values"] = std::set<double>(sampled.begin(), sampled.end()).size();
    rec["emp_adversarial"] = emp;
    rec["exact_adversarial"] = exact;
    rec["gap_adversarial"] = gap;
    rec["emp_control"] = cemp;
    rec["exact_control"] = cexact;
    rec["gap_control"] = cgap;
    rec["off_sample_outbids"] = outbids;
    r.records.push_back(rec);
    table.rows.push_back({cell(t), cell(emp), cell(exact), cell(gap), cell(cemp), cell(cexact), cell(cgap)});
  }
  r.summary["eta"] = eta;
  r.summary["min_adversarial_gap"] = min_gap;
  r.summary["max_control_gap"] = max_ctrl;
  r.verdicts.push_back(detail::at_least(
      "adversarial_gap", "non-monotone opponent: |emp - exact| stays large (smallest gap over trials)",
      min_gap, c.min_gap));
  r.verdicts.push_back(detail::at_most("control_gap",
                                       "monotone identity opponent: |emp - exact| is small (largest gap over trials)",
                                       max_ctrl, c.max_control_gap));
  r.verdicts.push_back(detail::all_of("construction",
                                      "off-sample adversarial bids exceed 1/2 by eta", construction_ok,
                                      c.trials));
  r.tables.push_back(std::move(table));
  detail::finalize(r, c.to_json());
  return r;
}

// --- shattering count -----------------------------------------------------------

struct ShatteringConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::vector<std::size_t> n_list{2, 3};
  std::vector<std::size_t> m_list{1, 2, 3, 4, 5, 6};
  std::vector<std::size_t> value_sizes{2, 3};
  std::vector<std::size_t> bid_sizes{2, 3};
  std::string witness = "midpoint";  // or "below_all"
  std::size_t max_n = 3;
  std::size_t max_m = 6;
  std::size_t max_grid = 3;
  std::uint64_t max_pairs = 100000;

  static ShatteringConfig from_json(const json& j) {
    ShatteringConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.trials = r.count("trials", c.trials, 1);
    c.n_list = r.counts("n_list", c.n_list);
    c.m_list = r.counts("m_list", c.m_list);
    c.value_sizes = r.counts("value_sizes", c.value_sizes);
    c.bid_sizes = r.counts("bid_sizes", c.bid_sizes);
    c.witness = r.text("witness", c.witness);
    c.max_n = r.count("max_n", c.max_n);
    c.max_m = r.count("max_m", c.max_m);
    c.max_grid = r.count("max_grid", c.max_grid);
    c.max_pairs = r.u64("max_pairs", c.max_pairs);
    r.finish();
    detail::require(c.witness == "midpoint" || c.witness == "below_all", "witness",
                    "expected \"midpoint\" or \"below_all\"");
    for (std::size_t n : c.n_list) detail::require(n >= 2, "n_list", "entries must be at least 2");
    for (std::size_t m : c.m_list) detail::require(m >= 1 && m <= 63, "m_list", "entries must lie in [1, 63]");
    for (std::size_t v : c.value_sizes) detail::require(v >= 1, "value_sizes", "entries must be positive");
    for (std::size_t b : c.bid_sizes) detail::require(b >= 1, "bid_sizes", "entries must be positive");
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["n_list"] = n_list;
    j["m_list"] = m_list;
    j["value_sizes"] = value_sizes;
    j["bid_sizes"] = bid_sizes;
    j["witness"] = witness;
    j["max_n"] = max_n;
    j["max_m"] = max_m;
    j["max_grid"] = max_grid;
    j["max_pairs"] = max_pairs;
    return j;
  }
};

struct ShatteringInstance {
  std::size_t n = 0, m = 0, values = 0, levels = 0;
  std::vector<double> value_grid;
  std::vector<double> bid_grid;
  std::vector<std::vector<double>> inputs;  // m opponent value vectors, length n-1
  std::vector<double> witnesses;
  std::uint64_t pairs = 0;
  std::size_t label_vectors = 0;
  std::size_t subclasses = 0;
  std::size_t max_labels_per_subclass = 0;
};

/// Number of (value, monotone joint strategy) pairs, saturating at ~1.8e19.
inline double shattering_pair_count(std::size_t n, std::size_t values, std::size_t levels) {
  // C(values + levels - 1, values) computed in floating point.
  double singles = 1.0;
  for (std::size_t k = 1; k <= values; ++k)
    singles = singles * static_cast<double>(levels - 1 + k) / static_cast<double>(k);
  return static_cast<double>(values) * std::pow(std::round(singles), static_cast<double>(n));
}

/// The utility class of bidder 0: h(v_0, beta)(x) = u_0(v_0, beta_0(v_0), beta_-0(x)).
/// Values on linspace(0, 1, V), bids on {k / B}. Inputs are drawn uniformly
/// from the value grid; witnesses follow `witness_mode`.
inline ShatteringInstance shattering_instance(std::size_t n, std::size_t m, std::size_t values,
                                              std::size_t levels, const std::string& witness_mode,
                                              Rng& rng, std::uint64_t max_pairs) {
  ShatteringInstance s;
  s.n = n;
  s.m = m;
  s.values = values;
  s.levels = levels;
  s.value_grid = detail::linspace01(values);
  for (std::size_t k = 0; k < levels; ++k)
    s.bid_grid.push_back(static_cast<double>(k) / static_cast<double>(levels));
  const double count = shattering_pair_count(n, values, levels);
  if (count > static_cast<double>(max_pairs)) {
    throw ResourceError("shattering enumeration of " + format_number(count) +
                        " (value, joint strategy) pairs exceeds cap " + std::to_string(max_pairs));
  }
  const auto spec = AuctionSpec::first_price(n, 1.0, s.bid_grid);
  const auto singles = enumerate_monotone(s.value_grid, s.bid_grid);
  s.pairs = static_cast<std::uint64_t>(count);

  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> x(n - 1);
    for (auto& v : x) v = s.value_grid[rng.uniform_index(values)];
    s.inputs.push_back(std::move(x));
  }

  // Evaluate every function on every input.
  struct Fn {
    double own_bid;
    std::vector<std::size_t> idx;  // strategy index per bidder
    std::vector<double> out;
  };
  std::vector<Fn> fns;
  std::vector<std::size_t> idx(n, 0);
  BidProfile bids(n);
  while (true) {
    for (double v : s.value_grid) {
      Fn f{singles[idx[0]](v), idx, {}};
      bids[0] = f.own_bid;
      for (const auto& x : s.inputs) {
        for (std::size_t j = 1; j < n; ++j) bids[j] = singles[idx[j]](x[j - 1]);
        f.out.push_back(ex_post_utility(spec, 0, v, bids));
      }
      fns.push_back(std::move(f));
    }
    std::size_t pos = n;
    while (pos > 0 && ++idx[pos - 1] == singles.size()) idx[--pos] = 0;
    if (pos == 0) break;
  }

  for (std::size_t k = 0; k < m; ++k) {
    std::set<double> lv;
    for (const auto& f : fns) lv.insert(f.out[k]);
    const std::vector<double> levels_k(lv.begin(), lv.end());
    double w;
    if (witness_mode == "below_all") {
      w = levels_k.front() - 1.0;
    } else if (levels_k.size() == 1) {
      w = levels_k.front() - 0.5;
    } else {
      const auto pick = rng.uniform_index(levels_k.size() - 1);
      w = 0.5 * (levels_k[pick] + levels_k[pick + 1]);
    }
    s.witnesses.push_back(w);
  }

  // Per opponent, input order sorted by that opponent's value.
  std::vector<std::vector<std::size_t>> order(n);
  for (std::size_t j = 1; j < n; ++j) {
    order[j].resize(m);
    std::iota(order[j].begin(), order[j].end(), 0);
    std::stable_sort(order[j].begin(), order[j].end(),
                     [&](std::size_t a, std::size_t b) { return s.inputs[a][j - 1] < s.inputs[b][j - 1]; });
  }
  std::set<std::uint64_t> labels;
  std::map<std::vector<std::size_t>, std::set<std::uint64_t>> by_class;
  for (const auto& f : fns) {
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < m; ++k) {
      if (f.out[k] > s.witnesses[k]) mask |= std::uint64_t{1} << k;
    }
    labels.insert(mask);
    std::vector<std::size_t> key;
    for (std::size_t j = 1; j < n; ++j) {
      std::size_t k1 = 0;
      std::size_t k2 = m + 1;
      for (std::size_t pos = 1; pos <= m; ++pos) {
        const double b = singles[f.idx[j]](s.inputs[order[j][pos - 1]][j - 1]);
        if (b < f.own_bid) k1 = pos;
        if (b > f.own_bid && k2 == m + 1) k2 = pos;
      }
      key.push_back(k1);
      key.push_back(k2);
    }
    by_class[key].insert(mask);
  }
  s.label_vectors = labels.size();
  s.subclasses = by_class.size();
  for (const auto& [_, set] : by_class) s.max_labels_per_subclass = std::max(s.max_labels_per_subclass, set.size());
  return s;
}

/// Label-vector count by an independent route: every map from the value grid
/// to the bid grid, kept when weakly increasing, with utilities taken from the
/// allocation and payment rules directly.
inline std::size_t shattering_double_count(const ShatteringInstance& s) {
  const std::size_t v = s.values;
  const std::size_t b = s.levels;
  std::vector<std::vector<double>> maps;
  std::vector<std::size_t> idx(v, 0);
  while (true) {
    if (std::is_sorted(idx.begin(), idx.end())) {
      std::vector<double> bids(v);
      for (std::size_t k = 0; k < v; ++k) bids[k] = s.bid_grid[idx[k]];
      maps.push_back(std::move(bids));
    }
    std::size_t pos = v;
    while (pos > 0 && ++idx[pos - 1] == b) idx[--pos] = 0;
    if (pos == 0) break;
  }
  auto bid_of = [&](const std::vector<double>& map, double value) {
    const auto it = std::find(s.value_grid.begin(), s.value_grid.end(), value);
    return map[static_cast<std::size_t>(it - s.value_grid.begin())];
  };
  std::set<std::vector<bool>> labels;
  std::vector<std::size_t> choice(s.n, 0);
  while (true) {
    for (double value : s.value_grid) {
      std::vector<bool> label;
      for (std::size_t k = 0; k < s.m; ++k) {
        const double own = bid_of(maps[choice[0]], value);
        double top = own;
        for (std::size_t j = 1; j < s.n; ++j) top = std::max(top, bid_of(maps[choice[j]], s.inputs[k][j - 1]));
        double u = 0.0;
        if (own == top) {
          std::size_t tied = 0;
          for (std::size_t j = 1; j < s.n; ++j) tied += bid_of(maps[choice[j]], s.inputs[k][j - 1]) == top;
          u = (value - own) / static_cast<double>(tied + 1);
        }
        label.push_back(u > s.witnesses[k]);
      }
      labels.insert(std::move(label));
    }
    std::size_t pos = s.n;
    while (pos > 0 && ++choice[pos - 1] == maps.size()) choice[--pos] = 0;
    if (pos == 0) break;
  }
  return labels.size();
}

inline Report run_shattering_count(const ShatteringConfig& c) {
  // Cap enforcement happens before any work.
  for (std::size_t n : c.n_list) {
    for (std::size_t v : c.value_sizes) {
      for (std::size_t b : c.bid_sizes) {
        const double count = shattering_pair_count(n, v, b);
        if (n > c.max_n || v > c.max_grid || b > c.max_grid || count > static_cast<double>(c.max_pairs)) {
          throw ResourceError("shattering instance n=" + std::to_string(n) + ", V=" + std::to_string(v) +
                              ", B=" + std::to_string(b) + " enumerates " + format_number(count) +
                              " (value, joint strategy) pairs; limits are n <= " + std::to_string(c.max_n) +
                              ", grid sizes <= " + std::to_string(c.max_grid) + ", pairs <= " +
                              std::to_string(c.max_pairs));
        }
      }
    }
  }
  for (std::size_t m : c.m_list) {
    if (m > c.max_m)
      throw ResourceError("shattering input count m=" + std::to_string(m) + " exceeds cap " + std::to_string(c.max_m));
  }

  Report r;
  r.kind = "shattering";
  r.notes.push_back("counts label vectors of bidder 0's utility class; pseudo-dimension itself is not computed");
  CsvTable table{"shattering.csv",
                 {"n", "m", "values", "levels", "trial", "pairs", "label_vectors", "label_bound", "subclasses",
                  "subclass_bound", "max_labels_per_subclass", "per_subclass_bound", "double_count"},
                 {}};
  std::size_t total = 0, label_ok = 0, class_ok = 0, per_ok = 0, double_ok = 0;
  double worst_ratio = 0.0;
  for (std::size_t n : c.n_list) {
    for (std::size_t m : c.m_list) {
      for (std::size_t v : c.value_sizes) {
        for (std::size_t b : c.bid_sizes) {
          for (std::size_t t = 0; t < c.trials; ++t) {
            const std::uint64_t seed =
                derive_seed(derive_seed(derive_seed(derive_seed(c.seed, n), m), v * 16 + b), t);
            Rng rng(seed);
            const auto s = shattering_instance(n, m, v, b, c.witness, rng, c.max_pairs);
            const double mp1 = static_cast<double>(m + 1);
            const double label_bound = std::pow(mp1, 3.0 * static_cast<double>(n));
            const double class_bound = std::pow(mp1, 2.0 * static_cast<double>(n - 1));
            const double per_bound = std::pow(mp1, static_cast<double>(n + 1));
            const std::size_t dc = shattering_double_count(s);
            ++total;
            label_ok += static_cast<double>(s.label_vectors) <= label_bound;
            class_ok += static_cast<double>(s.subclasses) <= class_bound;
            per_ok += static_cast<double>(s.max_labels_per_subclass) <= per_bound;
            double_ok += dc == s.label_vectors;
            worst_ratio = std::max(worst_ratio, static_cast<double>(s.label_vectors) / label_bound);
            json rec;
            rec["n"] = n;
            rec["m"] = m;
            rec["values"] = v;
            rec["levels"] = b;
            rec["trial"] = t;
            rec["seed"] = seed;
            rec["pairs"] = s.pairs;
            rec["inputs"] = s.inputs;
            rec["witnesses"] = s.witnesses;
            rec["label_vectors"] = s.label_vectors;
            rec["label_bound"] = label_bound;
            rec["subclasses"] = s.subclasses;
            rec["subclass_bound"] = class_bound;
            rec["max_labels_per_subclass"] = s.max_labels_per_subclass;
            rec["per_subclass_bound"] = per_bound;
            rec["double_count"] = dc;
            r.records.push_back(rec);
            table.rows.push_back({cell(n), cell(m), cell(v), cell(b), cell(t), std::to_string(s.pairs),
                                  cell(s.label_vectors), cell(label_bound), cell(s.subclasses), cell(class_bound),
                                  cell(s.max_labels_per_subclass), cell(per_bound), cell(dc)});
          }
        }
      }
    }
  }
  r.summary["instances"] = total;
  r.summary["largest_label_count_to_bound_ratio"] = worst_ratio;
  r.verdicts.push_back(detail::all_of("label_bound", "distinct label vectors <= (m+1)^(3n)", label_ok, total));
  r.verdicts.push_back(
      detail::all_of("subclass_bound", "distinct sub-class indices <= (m+1)^(2(n-1))", class_ok, total));
  r.verdicts.push_back(detail::all_of("per_subclass_bound", "label vectors within one sub-class <= (m+1)^(n+1)",
                                      per_ok, total));
  r.verdicts.push_back(detail::all_of("double_count",
                                      "label count equals an independent brute-force count", double_ok, total));
  r.tables.push_back(std::move(table));
  detail::finalize(r, c.to_json());
  return r;
}

// --- lower-bound family ---------------------------------------------------------

struct LowerBoundConfig {
  std::uint64_t seed = 1;
  std::size_t n = 10;
  double gamma = 0.2;
  std::vector<std::size_t> t_list{1, 10, 100};
  std::size_t trials = 10000;
  std::size_t pairs = 100;
  std::vector<double> gamma_list{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<std::size_t> n_list{2, 3, 5, 10, 20, 50};
  double eta = 0.25;
  double accuracy_slack = 0.01;
  double preset_epsilon = 1e-4;

  static LowerBoundConfig from_json(const json& j) {
    LowerBoundConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.n = r.count("n", c.n, 3);
    c.gamma = r.number("gamma", c.gamma);
    c.t_list = r.counts("t_list", c.t_list);
    c.trials = r.count("trials", c.trials, 1);
    c.pairs = r.count("pairs", c.pairs, 1);
    c.gamma_list = r.numbers("gamma_list", c.gamma_list);
    c.n_list = r.counts("n_list", c.n_list);
    c.eta = r.number("eta", c.eta);
    c.accuracy_slack = r.number("accuracy_slack", c.accuracy_slack);
    c.preset_epsilon = r.number("preset_epsilon", c.preset_epsilon);
    r.finish();
    detail::require(c.gamma > 0.0 && c.gamma < 0.5, "gamma", "must lie in (0, 1/2)");
    detail::require(c.eta > 0.0 && c.eta <= 0.5, "eta", "must lie in (0, 1/2]");
    for (double g : c.gamma_list) detail::require(g > 0.0 && g < 1.0, "gamma_list", "entries must lie in (0, 1)");
    for (std::size_t n : c.n_list) detail::require(n >= 2, "n_list", "entries must be at least 2");
    for (std::size_t t : c.t_list) detail::require(t >= 1, "t_list", "entries must be positive");
    detail::require(c.preset_epsilon > 0.0, "preset_epsilon", "must be positive");
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["n"] = n;
    j["gamma"] = gamma;
    j["t_list"] = t_list;
    j["trials"] = trials;
    j["pairs"] = pairs;
    j["gamma_list"] = gamma_list;
    j["n_list"] = n_list;
    j["eta"] = eta;
    j["accuracy_slack"] = accuracy_slack;
    j["preset_epsilon"] = preset_epsilon;
    return j;
  }
};

/// 1/2 (1 - (1+gamma)/n)^|S∩T| (1 - (1-gamma)/n)^|T\S|.
inline double lower_bound_closed_form(std::size_t n, double gamma, std::size_t in_both, std::size_t t_only) {
  const double nn = static_cast<double>(n);
  return 0.5 * std::pow(1.0 - (1.0 + gamma) / nn, static_cast<double>(in_both)) *
         std::pow(1.0 - (1.0 - gamma) / nn, static_cast<double>(t_only));
}

/// Bidder n's interim utility at value 1 bidding 1/2 when bidders in T bid
/// 1/2 + eta at value 1 (0 otherwise) and the rest always bid 0.
inline double lower_bound_utility(std::size_t n, double gamma, double eta, const std::vector<bool>& in_s,
                                  const std::vector<bool>& in_t) {
  const auto spec = AuctionSpec::first_price(n, 1.0, {0.0, 0.5, 0.5 + eta});
  const auto dist = lower_bound_family(n, gamma, in_s);
  JointStrategy joint;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    joint.push_back(in_t[j] ? make_strategy({0.0, 1.0}, {0.0, 0.5 + eta}) : Strategy::constant({0.0, 1.0}, 0.0));
  }
  joint.push_back(Strategy::constant({1.0}, 0.5));
  return interim_utility_exact(spec, {n - 1, 1.0, 0.5, joint}, dist);
}

inline Report run_lower_bound_family(const LowerBoundConfig& c) {
  Report r;
  r.kind = "lower-bound";
  r.notes.push_back("only the ingredients are tested: closed-form utility, KL bound, distinguisher ceiling, "
                    "utility separation; the full sample lower bound is not testable");
  r.notes.push_back("gamma stands in for c1 * epsilon; the reference-scale preset is reported in the summary");
  const std::size_t n = c.n;
  Rng rng(derive_seed(c.seed, 1));
  auto random_subset = [&](std::size_t size) {
    std::vector<bool> s(size);
    for (std::size_t k = 0; k < size; ++k) s[k] = rng.coin();
    return s;
  };

  // (a) closed form
  CsvTable closed{"closed_form.csv", {"pair", "in_both", "t_only", "closed_form", "exact", "abs_diff"}, {}};
  double worst_closed = 0.0;
  json part_a = json::array();
  for (std::size_t p = 0; p < c.pairs; ++p) {
    const auto in_s = random_subset(n - 1);
    const auto in_t = random_subset(n - 1);
    std::size_t both = 0, t_only = 0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      both += in_s[j] && in_t[j];
      t_only += !in_s[j] && in_t[j];
    }
    const double formula = lower_bound_closed_form(n, c.gamma, both, t_only);
    const double exact = lower_bound_utility(n, c.gamma, c.eta, in_s, in_t);
    worst_closed = std::max(worst_closed, std::abs(formula - exact));
    closed.rows.push_back({cell(p), cell(both), cell(t_only), cell(formula), cell(exact), cell(std::abs(formula - exact))});
  }

  // (b) KL bound on a (gamma, n) grid
  CsvTable kl{"kl_bound.csv", {"gamma", "n", "kl", "bound"}, {}};
  std::size_t kl_ok = 0, kl_total = 0;
  for (double g : c.gamma_list) {
    for (std::size_t nn : c.n_list) {
      if ((1.0 + g) / static_cast<double>(nn) > 1.0) continue;
      const double d = kl_divergence(biased_bernoulli(nn, g, +1), biased_bernoulli(nn, g, -1));
      const double bound = 10.0 * g * g / static_cast<double>(nn);
      ++kl_total;
      kl_ok += d <= bound;
      kl.rows.push_back({cell(g), cell(nn), cell(d), cell(bound)});
    }
  }

  // (c) likelihood-ratio distinguisher
  const auto plus = biased_bernoulli(n, c.gamma, +1);
  const auto minus = biased_bernoulli(n, c.gamma, -1);
  const double kl_pm = kl_divergence(plus, minus);
  const double p1 = plus.mass(1.0), q1 = minus.mass(1.0);
  const double llr_one = std::log(p1 / q1);
  const double llr_zero = std::log((1.0 - p1) / (1.0 - q1));
  CsvTable dist_table{"distinguisher.csv", {"t", "accuracy", "std_error", "ceiling"}, {}};
  std::size_t dist_ok = 0;
  json part_c = json::array();
  for (std::size_t t : c.t_list) {
    Rng drng(derive_seed(derive_seed(c.seed, 3), t));
    std::size_t correct = 0;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      const bool truth_plus = drng.coin();
      const auto& src = truth_plus ? plus : minus;
      std::size_t ones = 0;
      for (std::size_t k = 0; k < t; ++k) ones += src.sample(drng) == 1.0;
      const double llr = static_cast<double>(ones) * llr_one + static_cast<double>(t - ones) * llr_zero;
      const bool guess_plus = llr > 0.0 ? true : llr < 0.0 ? false : drng.coin();
      correct += guess_plus == truth_plus;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(c.trials);
    const double se = std::sqrt(acc * (1.0 - acc) / static_cast<double>(c.trials));
    const double ceiling = std::min(1.0, 0.5 + std::sqrt(static_cast<double>(t) * kl_pm / 2.0));
    dist_ok += acc <= ceiling + c.accuracy_slack;
    json e;
    e["t"] = t;
    e["accuracy"] = acc;
    e["std_error"] = se;
    e["ceiling"] = ceiling;
    part_c.push_back(e);
    dist_table.rows.push_back({cell(t), cell(acc), cell(se), cell(ceiling)});
  }

  // (d) separation between T and T' of equal size
  CsvTable sep{"separation.csv", {"pair", "size", "delta", "gap", "bound"}, {}};
  std::size_t sep_ok = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  const double per_step = 2.0 * c.gamma / static_cast<double>(n - 1) / (8.0 * std::exp(2.0));
  for (std::size_t p = 0; p < c.pairs; ++p) {
    const auto in_s = random_subset(n - 1);
    const std::size_t lo = n / 2;
    const std::size_t size = lo + static_cast<std::size_t>(rng.uniform_index(n - lo));
    auto pick = [&]() {
      std::vector<std::size_t> perm(n - 1);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.uniform_index(k)]);
      std::vector<bool> t(n - 1, false);
      for (std::size_t k = 0; k < size; ++k) t[perm[k]] = true;
      return t;
    };
    auto t_a = pick();
    auto t_b = pick();
    auto outside = [&](const std::vector<bool>& t) {
      std::size_t k = 0;
      for (std::size_t j = 0; j + 1 < n; ++j) k += t[j] && !in_s[j];
      return k;
    };
    if (outside(t_a) < outside(t_b)) std::swap(t_a, t_b);
    const std::size_t delta = outside(t_a) - outside(t_b);
    const double gap = lower_bound_utility(n, c.gamma, c.eta, in_s, t_a) -
                       lower_bound_utility(n, c.gamma, c.eta, in_s, t_b);
    const double bound = static_cast<double>(delta) * per_step;
    sep_ok += gap >= bound - 1e-12;
    min_margin = std::min(min_margin, gap - bound);
    sep.rows.push_back({cell(p), cell(size), cell(delta), cell(gap), cell(bound)});
  }

  json a;
  a["pairs"] = c.pairs;
  a["max_abs_diff"] = worst_closed;
  r.records.push_back({{"part", "closed_form"}, {"result", a}});
  json b;
  b["cases"] = kl_total;
  b["holding"] = kl_ok;
  r.records.push_back({{"part", "kl_bound"}, {"result", b}});
  r.records.push_back({{"part", "distinguisher"}, {"result", part_c}});
  json d;
  d["pairs"] = c.pairs;
  d["holding"] = sep_ok;
  d["min_margin"] = min_margin;
  r.records.push_back({{"part", "separation"}, {"result", d}});

  r.summary["kl_plus_minus"] = kl_pm;
  r.summary["kl_bound"] = 10.0 * c.gamma * c.gamma / static_cast<double>(n);
  json preset;
  preset["c1"] = kLowerBoundC1;
  preset["epsilon"] = c.preset_epsilon;
  preset["gamma"] = lower_bound_gamma(c.preset_epsilon);
  preset["gamma_admissible"] = lower_bound_gamma(c.preset_epsilon) < 0.5;
  preset["sample_threshold"] = static_cast<double>(n) / (4e8 * c.preset_epsilon * c.preset_epsilon);
  r.summary["reference_scale_preset"] = preset;

  r.verdicts.push_back(detail::at_most("closed_form",
                                       "closed-form utility of bidder n matches the exact interim utility",
                                       worst_closed, 1e-9));
  r.verdicts.push_back(detail::all_of("kl_bound", "KL(F+, F-) <= 10 gamma^2 / n across the grid", kl_ok, kl_total));
  r.verdicts.push_back(detail::all_of("distinguisher_ceiling",
                                      "likelihood-ratio accuracy <= 1/2 + sqrt(t KL / 2) + slack", dist_ok,
                                      c.t_list.size()));
  r.verdicts.push_back(detail::all_of("separation",
                                      "U_T - U_T' >= delta * (2 gamma / (n-1)) / (8 e^2)", sep_ok, c.pairs));
  r.tables.push_back(std::move(closed));
  r.tables.push_back(std::move(kl));
  r.tables.push_back(std::move(dist_table));
  r.tables.push_back(std::move(sep));
  detail::finalize(r, c.to_json());
  return r;
}

// --- permutation identity ------------------------------------------------------

struct PermutationConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 5;  // random instances per (n, m)
  std::vector<std::size_t> n_list{2, 3};
  std::vector<std::size_t> m_list{1, 2, 3, 4};
  std::string kind = "fpa";
  std::vector<double> bid_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> value_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t support_size = 3;
  std::uint64_t exact_cap = 100000;  // permutation tuples
  std::size_t samples = 10000;       // K, sampled mode
  std::size_t sampled_n = 3;
  std::size_t sampled_m = 12;
  double tolerance = 1e-9;

  static PermutationConfig from_json(const json& j) {
    PermutationConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.trials = r.count("trials", c.trials, 1);
    c.n_list = r.counts("n_list", c.n_list);
    c.m_list = r.counts("m_list", c.m_list);
    c.kind = r.text("kind", c.kind);
    c.bid_grid = r.numbers("bid_grid", c.bid_grid);
    c.value_grid = r.numbers("value_grid", c.value_grid);
    c.support_size = r.count("support_size", c.support_size, 1);
    c.exact_cap = r.u64("exact_cap", c.exact_cap);
    c.samples = r.count("samples", c.samples, 1);
    c.sampled_n = r.count("sampled_n", c.sampled_n, 1);
    c.sampled_m = r.count("sampled_m", c.sampled_m, 1);
    c.tolerance = r.number("tolerance", c.tolerance);
    r.finish();
    detail::require(c.kind == "fpa" || c.kind == "apa", "kind", "expected \"fpa\" or \"apa\"");
    try {
      detail::check_grid(c.bid_grid, 1.0, "bid_grid");
    } catch (const InputError& e) {
      throw ConfigError("bid_grid", e.what());
    }
    try {
      detail::check_grid(c.value_grid, 1.0, "value_grid");
    } catch (const InputError& e) {
      throw ConfigError("value_grid", e.what());
    }
    for (std::size_t n : c.n_list) detail::require(n >= 1, "n_list", "entries must be positive");
    for (std::size_t m : c.m_list) detail::require(m >= 1, "m_list", "entries must be positive");
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["n_list"] = n_list;
    j["m_list"] = m_list;
    j["kind"] = kind;
    j["bid_grid"] = bid_grid;
    j["value_grid"] = value_grid;
    j["support_size"] = support_size;
    j["exact_cap"] = exact_cap;
    j["samples"] = samples;
    j["sampled_n"] = sampled_n;
    j["sampled_m"] = sampled_m;
    j["tolerance"] = tolerance;
    return j;
  }
};

struct PermutationInstance {
  AuctionSpec spec;
  ProductDistribution dist;
  JointStrategy joint;
  SampleMatrix samples;
};

inline PermutationInstance random_permutation_instance(const PermutationConfig& c, std::size_t n, std::size_t m,
                                                       std::uint64_t seed) {
  Rng rng(seed);
  auto spec = c.kind == "apa" ? AuctionSpec::all_pay(n, 1.0, c.bid_grid) : AuctionSpec::first_price(n, 1.0, c.bid_grid);
  std::vector<DiscreteDist> parts;
  JointStrategy joint;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t size = 1 + rng.uniform_index(std::min(c.support_size, c.value_grid.size()));
    std::vector<double> pool = c.value_grid;
    for (std::size_t k = pool.size(); k > 1; --k) std::swap(pool[k - 1], pool[rng.uniform_index(k)]);
    std::vector<double> support(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(support.begin(), support.end());
    std::vector<double> w(size);
    double total = 0.0;
    for (auto& x : w) total += (x = 0.1 + rng.uniform01());
    for (auto& x : w) x /= total;
    parts.emplace_back(support, w);
    joint.push_back(random_monotone(support, c.bid_grid, rng));
  }
  ProductDistribution dist(std::move(parts));
  auto samples = draw_samples(dist, m, rng.uniform_index(~std::uint64_t{0}));
  return {std::move(spec), std::move(dist), std::move(joint), std::move(samples)};
}

/// Averages emp over column-permuted copies of the samples (column 0 fixed,
/// every other column permuted) and returns the largest deviation from empp
/// over bidders and their support values. `tuples` is 0 for exact mode (all
/// (m!)^(n-1) tuples) or the number of random tuples.
inline double permutation_deviation(const PermutationInstance& inst, std::size_t tuples, Rng* rng,
                                    std::uint64_t* used = nullptr) {
  const auto& spec = inst.spec;
  const std::size_t n = spec.bidders();
  const std::size_t m = inst.samples.rows();
  std::vector<std::pair<std::size_t, double>> queries;
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : inst.dist[i].support()) queries.emplace_back(i, v);
  }
  std::vector<double> sums(queries.size(), 0.0);
  std::vector<std::vector<std::size_t>> perms(n, std::vector<std::size_t>(m));
  for (auto& p : perms) std::iota(p.begin(), p.end(), 0);
  std::vector<double> values(m * n);
  std::uint64_t count = 0;
  auto accumulate = [&]() {
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t col = 0; col < n; ++col) values[r * n + col] = inst.samples(perms[col][r], col);
    }
    const SampleMatrix permuted(m, n, values, inst.samples.seed());
    for (std::size_t q = 0; q < queries.size(); ++q)
      sums[q] += emp_estimate(spec, permuted, queries[q].first, queries[q].second, inst.joint);
    ++count;
  };
  if (tuples == 0) {
    while (true) {
      accumulate();
      std::size_t col = 1;
      while (col < n && !std::next_permutation(perms[col].begin(), perms[col].end())) ++col;
      if (col >= n) break;
    }
  } else {
    for (std::size_t k = 0; k < tuples; ++k) {
      for (std::size_t col = 1; col < n; ++col) {
        auto& p = perms[col];
        for (std::size_t s = m; s > 1; --s) std::swap(p[s - 1], p[rng->uniform_index(s)]);
      }
      accumulate();
    }
  }
  const auto prod = empirical_product(inst.samples);
  double worst = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const double avg = sums[q] / static_cast<double>(count);
    worst = std::max(worst, std::abs(avg - empp_estimate(spec, prod, queries[q].first, queries[q].second, inst.joint)));
  }
  if (used) *used = count;
  return worst;
}

/// (m!)^(n-1), saturating above `limit`.
inline std::uint64_t permutation_tuple_count(std::size_t n, std::size_t m, std::uint64_t limit) {
  std::uint64_t fact = 1;
  for (std::size_t k = 2; k <= m; ++k) {
    if (fact > limit / k) return limit + 1;
    fact *= k;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (fact != 0 && total > limit / fact) return limit + 1;
    total *= fact;
  }
  return total;
}

inline Report run_permutation_demo(const PermutationConfig& c) {
  Report r;
  r.kind = "permutation";
  CsvTable table{"permutation.csv", {"n", "m", "instance", "mode", "permutations", "unpermuted_gap", "max_deviation", "tolerance"}, {}};
  std::size_t exact_total = 0, exact_ok = 0, sampled_total = 0, sampled_ok = 0;
  double exact_worst = 0.0, sampled_worst = 0.0;
  const double sampled_tol = 4.0 / std::sqrt(static_cast<double>(c.samples));  // H = 1
  auto run_one = [&](std::size_t n, std::size_t m, std::size_t t, bool exact) {
    const std::uint64_t seed = derive_seed(derive_seed(derive_seed(c.seed, n), m), t);
    const auto inst = random_permutation_instance(c, n, m, seed);
    Rng rng(derive_seed(seed, 1));
    std::uint64_t used = 0;
    const double dev = permutation_deviation(inst, exact ? 0 : c.samples, &rng, &used);
    const double tol = exact ? c.tolerance : sampled_tol;
    const bool ok = dev <= tol;
    // Distance between emp on the unpermuted samples and empp; zero means the
    // instance cannot tell the two estimators apart.
    double raw_gap = 0.0;
    const auto prod = empirical_product(inst.samples);
    for (std::size_t i = 0; i < n; ++i) {
      for (double v : inst.dist[i].support()) {
        raw_gap = std::max(raw_gap, std::abs(emp_estimate(inst.spec, inst.samples, i, v, inst.joint) -
                                             empp_estimate(inst.spec, prod, i, v, inst.joint)));
      }
    }
    if (exact) {
      ++exact_total;
      exact_ok += ok;
      exact_worst = std::max(exact_worst, dev);
    } else {
      ++sampled_total;
      sampled_ok += ok;
      sampled_worst = std::max(sampled_worst, dev);
    }
    json rec;
    rec["n"] = n;
    rec["m"] = m;
    rec["instance"] = t;
    rec["seed"] = seed;
    rec["mode"] = exact ? "exact" : "sampled";
    rec["permutations"] = used;
    rec["max_deviation"] = dev;
    rec["unpermuted_gap"] = raw_gap;
    rec["tolerance"] = tol;
    rec["passed"] = ok;
    r.records.push_back(rec);
    table.rows.push_back({cell(n), cell(m), cell(t), exact ? "exact" : "sampled", std::to_string(used), cell(raw_gap), cell(dev), cell(tol)});
  };
  for (std::size_t n : c.n_list) {
    for (std::size_t m : c.m_list) {
      const bool exact = permutation_tuple_count(n, m, c.exact_cap) <= c.exact_cap;
      if (!exact) {
        r.notes.push_back("warning: n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                          " exceeds the exact-mode cap; sampled mode used");
      }
      for (std::size_t t = 0; t < c.trials; ++t) run_one(n, m, t, exact);
    }
  }
  for (std::size_t t = 0; t < c.trials; ++t) run_one(c.sampled_n, c.sampled_m, t, false);

  r.summary["exact_instances"] = exact_total;
  r.summary["exact_max_deviation"] = exact_worst;
  r.summary["sampled_instances"] = sampled_total;
  r.summary["sampled_max_deviation"] = sampled_worst;
  r.summary["sampled_tolerance"] = sampled_tol;
  auto v = detail::all_of("exact_identity", "average of emp over all column permutations equals empp within 1e-9",
                          exact_ok, exact_total);
  v.detail += "; largest deviation " + format_number(exact_worst);
  r.verdicts.push_back(v);
  auto s = detail::all_of("sampled_convergence", "average over K random permutations within 4 H / sqrt(K) of empp",
                          sampled_ok, sampled_total);
  s.detail += "; largest deviation " + format_number(sampled_worst);
  r.verdicts.push_back(s);
  r.tables.push_back(std::move(table));
  detail::finalize(r, c.to_json());
  return r;
}

// --- BCE pipeline ----------------------------------------------------------------

struct BcePipelineConfig {
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  AuctionSpec auction = AuctionSpec::first_price(2, 1.0, {0.0, 0.25, 0.5, 0.75});
  ProductDistribution distribution{{DiscreteDist::uniform({0.0, 0.5, 1.0}), DiscreteDist::uniform({0.0, 0.5, 1.0})}};
  std::vector<double> value_grid{0.0, 0.5, 1.0};
  double eta = 0.125;
  std::size_t m = 2000;
  std::uint64_t candidate_cap = kDefaultEnumerationCap;
  std::uint64_t max_tableau_entries = 80'000'000;
  std::size_t bne_rounds = 100;

  static BcePipelineConfig from_json(const json& j) {
    BcePipelineConfig c;
    ConfigReader r(j);
    c.seed = r.u64("seed", c.seed);
    c.trials = r.count("trials", c.trials, 1);
    c.auction = r.auction("auction", c.auction);
    c.distribution = r.distribution("distribution", c.distribution);
    c.value_grid = r.numbers("value_grid", c.value_grid);
    c.eta = r.number("eta", default_eta(c.auction));
    c.m = r.count("m", c.m, 1);
    c.candidate_cap = r.u64("candidate_cap", c.candidate_cap);
    c.max_tableau_entries = r.u64("max_tableau_entries", c.max_tableau_entries);
    c.bne_rounds = r.count("bne_rounds", c.bne_rounds, 1);
    r.finish();
    detail::check_distribution_fits(c.distribution, c.auction, "distribution");
    try {
      detail::check_grid(c.value_grid, c.auction.value_cap(), "value_grid");
    } catch (const InputError& e) {
      throw ConfigError("value_grid", e.what());
    }
    detail::require(c.eta >= 0.0, "eta", "must be nonnegative");
    return c;
  }

  json to_json() const {
    json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["auction"] = bce::to_json(auction);
    j["distribution"] = bce::to_json(distribution);
    j["value_grid"] = value_grid;
    j["eta"] = eta;
    j["m"] = m;
    j["candidate_cap"] = candidate_cap;
    j["max_tableau_entries"] = max_tableau_entries;
    j["bne_rounds"] = bne_rounds;
    return j;
  }
};

inline Report run_bce_pipeline(const BcePipelineConfig& c) {
  Report r;
  r.kind = "bce-pipeline";
  r.notes.push_back("epsilons are measured against the candidate bid set (grid plus eta shifts), not all of [0, H]");
  r.notes.push_back("the transfer check uses the measured per-run utility gap eps_hat, not a distribution-level accuracy");
  const auto& spec = c.auction;
  const std::size_t n = spec.bidders();
  const auto candidates = enumerate_joint_monotone(n, c.value_grid, spec.bid_grid(), c.candidate_cap);
  const auto deviations = candidate_bids(spec, c.eta);
  const ValueProbe probe(n, c.value_grid);
  BceLpOptions opts;
  opts.max_tableau_entries = c.max_tableau_entries;

  CsvTable table{"bce_pipeline.csv",
                 {"trial", "eps_prime", "eps_on_empp", "eps_true", "eps_hat", "bound_ok", "converse_ok",
                  "monotone_ok", "support", "lp_iterations", "stub_eps_empp", "stub_eps_true", "stub_bound_ok"},
                 {}};
  std::size_t bound_ok = 0, converse_ok = 0, mono_ok = 0, stub_ok = 0;
  std::size_t zero_cases = 0, zero_ok = 0;
  double worst_verify = 0.0;
  for (std::size_t t = 0; t < c.trials; ++t) {
    const std::uint64_t seed = derive_seed(c.seed, t);
    const auto samples = draw_samples(c.distribution, c.m, seed);
    const auto emp = empirical_product(samples);
    const auto solved = solve_bce_lp(spec, candidates, emp, deviations, probe, opts);
    const auto transfer = transfer_check(spec, solved.profile, c.distribution, samples, deviations);
    const auto mono_true = essential_monotonicity_check(solved.profile, c.distribution, spec);
    const auto mono_emp = essential_monotonicity_check(solved.profile, emp, spec);
    const bool mono = mono_true.passed && mono_emp.passed;
    const double verify = std::abs(solved.epsilon_star - solved.certificate.epsilon);

    bool has_zero_bne = false;
    for (const auto& cand : candidates) {
      if (bne_epsilon(spec, cand, emp, deviations, probe) <= 1e-12) {
        has_zero_bne = true;
        break;
      }
    }
    if (has_zero_bne) {
      ++zero_cases;
      zero_ok += solved.epsilon_star <= 1e-9;
    }

    const auto stub = external_bne_stub(spec, emp, deviations, 0.0, c.bne_rounds);
    TransferReport stub_transfer;
    if (stub) {
      stub_transfer = transfer_between(spec, CorrelatedProfile::point_mass(stub->joint), c.distribution, emp,
                                       deviations, union_probe(c.distribution, emp));
    }
    const bool stub_bound = stub && stub_transfer.bound_ok && stub_transfer.converse_ok;

    bound_ok += transfer.bound_ok;
    converse_ok += transfer.converse_ok;
    mono_ok += mono;
    stub_ok += stub_bound;
    worst_verify = std::max(worst_verify, verify);

    json rec;
    rec["trial"] = t;
    rec["seed"] = seed;
    rec["eps_prime"] = solved.epsilon_star;
    rec["verifier_epsilon"] = solved.certificate.epsilon;
    rec["eps_on_empp"] = transfer.eps_on_empp;
    rec["eps_true"] = transfer.eps_on_true;
    rec["eps_hat"] = transfer.eps_hat;
    rec["bound_ok"] = transfer.bound_ok;
    rec["converse_ok"] = transfer.converse_ok;
    rec["bound_slack"] = transfer.eps_on_empp + 2.0 * transfer.eps_hat - transfer.eps_on_true;
    rec["monotone_ok"] = mono;
    rec["candidate_zero_bne"] = has_zero_bne;
    rec["solver_stats"] = to_json(solved)["solver_stats"];
    rec["profile"] = to_json(solved.profile);
    if (stub) {
      json s;
      s["rounds"] = stub->rounds;
      s["converged"] = stub->converged;
      s["eps_on_empp"] = stub_transfer.eps_on_empp;
      s["eps_true"] = stub_transfer.eps_on_true;
      s["eps_hat"] = stub_transfer.eps_hat;
      s["bound_ok"] = stub_bound;
      s["joint"] = to_json(stub->joint);
      rec["bne_stub"] = s;
    }
    r.records.push_back(rec);
    table.rows.push_back({cell(t), cell(solved.epsilon_star), cell(transfer.eps_on_empp), cell(transfer.eps_on_true),
                          cell(transfer.eps_hat), cell(transfer.bound_ok), cell(transfer.converse_ok), cell(mono),
                          cell(solved.profile.size()), cell(solved.stats.iterations),
                          cell(stub_transfer.eps_on_empp), cell(stub_transfer.eps_on_true), cell(stub_bound)});
  }
  r.summary["candidates"] = candidates.size();
  r.summary["deviation_bids"] = deviations;
  r.summary["failing_fraction"] =
      static_cast<double>(c.trials - std::min(bound_ok, converse_ok)) / static_cast<double>(c.trials);
  r.summary["max_lp_verification_gap"] = worst_verify;

  r.verdicts.push_back(detail::all_of("transfer_bound", "eps_true <= eps_on_empp + 2 eps_hat + 1e-6 on every trial",
                                      bound_ok, c.trials));
  r.verdicts.push_back(detail::all_of("transfer_converse",
                                      "eps_on_empp <= eps_true + 2 eps_hat + 1e-6 on every trial", converse_ok,
                                      c.trials));
  r.verdicts.push_back(detail::all_of("essential_monotonicity",
                                      "every solved profile passes the essential-monotonicity check", mono_ok,
                                      c.trials));
  r.verdicts.push_back(detail::at_most("lp_verification",
                                       "LP epsilon agrees with independent re-verification", worst_verify, 1e-6));
  auto z = detail::all_of("lp_zero_on_bne", "epsilon_star = 0 whenever a candidate is a verified 0-BNE", zero_ok,
                          zero_cases);
  if (zero_cases == 0) z.detail = "no candidate was a 0-BNE on any trial";
  r.verdicts.push_back(z);
  r.verdicts.push_back(detail::all_of("bne_route_transfer",
                                      "best-response stub output transfers between empp and the true distribution",
                                      stub_ok, c.trials));
  r.tables.push_back(std::move(table));
  detail::finalize(r, c.to_json());
  return r;
}

// --- mechanism validation ------------------------------------------------------

struct ValidateConfig {
  AuctionSpec auction = AuctionSpec::first_price(2, 1.0, {0.0, 0.5, 1.0});
  std::vector<double> bid_grid;  // empty: the auction's grid
  std::size_t max_witnesses = 16;

  static ValidateConfig from_json(const json& j) {
    ValidateConfig c;
    ConfigReader r(j);
    c.auction = r.auction("auction", c.auction);
    c.bid_grid = r.numbers("bid_grid", c.auction.bid_grid());
    c.max_witnesses = r.count("max_witnesses", c.max_witnesses);
    r.finish();
    try {
      detail::check_grid(c.bid_grid, c.auction.value_cap(), "bid_grid");
      for (double b : c.bid_grid) c.auction.check_bid(b);
    } catch (const InputError& e) {
      throw ConfigError("bid_grid", e.what());
    }
    return c;
  }

  json to_json() const {
    json j;
    j["auction"] = bce::to_json(auction);
    j["bid_grid"] = bid_grid;
    j["max_witnesses"] = max_witnesses;
    return j;
  }
};

inline Report run_validate(const ValidateConfig& c) {
  Report r;
  r.kind = "validate";
  const auto rep = validate_mechanism(c.auction, c.bid_grid, c.max_witnesses);
  CsvTable table{"violations.csv", {"bidder", "low_bid", "high_bid", "opponent_bids"}, {}};
  for (const auto& v : rep.violations) {
    std::string opp;
    for (std::size_t k = 0; k < v.opponent_bids.size(); ++k) opp += (k ? " " : "") + format_number(v.opponent_bids[k]);
    table.rows.push_back({cell(v.bidder), cell(v.low_bid), cell(v.high_bid), opp});
    json rec;
    rec["bidder"] = v.bidder;
    rec["low_bid"] = v.low_bid;
    rec["high_bid"] = v.high_bid;
    rec["opponent_bids"] = v.opponent_bids;
    r.records.push_back(rec);
  }
  r.summary["probes"] = rep.probes;
  r.summary["violations"] = rep.violation_count;
  Verdict v{"payment_monotonicity", "a winning bidder's payment strictly increases in her bid on the grid",
            static_cast<double>(rep.violation_count), 0.0, "==", rep.passed, false, {}};
  v.detail = std::to_string(rep.probes) + " probes, " + std::to_string(rep.violation_count) + " violations";
  r.verdicts.push_back(v);
  r.tables.push_back(std::move(table));
  detail::finalize(r, c.to_json());
  return r;
}

// --- dispatch ----------------------------------------------------------------------

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"error-sweep", "nonmonotone-demo", "shattering", "lower-bound",
                                              "permutation", "bce-pipeline", "validate"};
  return kinds;
}

/// Experiments whose config has a "trials" key.
inline bool has_trials(const std::string& kind) { return kind != "validate"; }

inline Report run_experiment(const std::string& kind, const json& config) {
  if (kind == "error-sweep") return run_error_sweep(ErrorSweepConfig::from_json(config));
  if (kind == "nonmonotone-demo") return run_nonmonotone_demo(NonmonotoneConfig::from_json(config));
  if (kind == "shattering") return run_shattering_count(ShatteringConfig::from_json(config));
  if (kind == "lower-bound") return run_lower_bound_family(LowerBoundConfig::from_json(config));
  if (kind == "permutation") return run_permutation_demo(PermutationConfig::from_json(config));
  if (kind == "bce-pipeline") return run_bce_pipeline(BcePipelineConfig::from_json(config));
  if (kind == "validate") return run_validate(ValidateConfig::from_json(config));
  throw InputError("unknown experiment kind '" + kind + "'");
}

}  // namespace bce
