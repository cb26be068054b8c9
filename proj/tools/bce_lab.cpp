// bce-lab: runs one experiment from a JSON config and writes report.json,
// CSV tables and a run_meta.json sidecar into the output directory.
//
// Exit status: 0 all verdicts pass, 2 some verdict fails, 1 input or
// resource error.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bce/experiments.hpp"

namespace {

struct LineCol {
  std::size_t line = 1;
  std::size_t col = 1;
};

LineCol locate_offset(const std::string& text, std::size_t offset) {
  LineCol lc;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++lc.line;
      lc.col = 1;
    } else {
      ++lc.col;
    }
  }
  return lc;
}

// Finds the line of a dotted key path ("auction.n", "distribution[1]") by
// matching each named component in order. Returns nullopt if the first
// component is absent.
std::optional<std::size_t> locate_key(const std::string& text, const std::string& path) {
  // Array indices are dropped: "distribution[1]" resolves to "distribution".
  std::vector<std::string> names;
  std::stringstream parts(path);
  for (std::string part; std::getline(parts, part, '.');) {
    part = part.substr(0, part.find('['));
    if (!part.empty()) names.push_back(part);
  }

  std::optional<std::size_t> found;
  std::size_t pos = 0;
  for (const auto& name : names) {
    const std::string quoted = "\"" + name + "\"";
    std::size_t at = pos;
    bool hit = false;
    while ((at = text.find(quoted, at)) != std::string::npos) {
      std::size_t k = at + quoted.size();
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && text[k] == ':') {
        hit = true;
        break;
      }
      at += quoted.size();
    }
    if (!hit) break;
    pos = at;
    found = at;
  }
  if (!found) return std::nullopt;
  return locate_offset(text, *found).line;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::string& kind, const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<std::size_t> trials, const std::string& out_dir, const std::vector<std::string>& argv) {
  std::string text;
  nlohmann::json config = nlohmann::json::object();
  const std::string where = config_path.empty() ? "<defaults>" : config_path;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    try {
      config = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      const auto lc = locate_offset(text, e.byte == 0 ? 0 : e.byte - 1);
      std::cerr << where << ":" << lc.line << ":" << lc.col << ": malformed config: " << e.what() << "\n";
      return 1;
    }
    if (!config.is_object()) {
      std::cerr << where << ":1:1: malformed config: top level must be a JSON object\n";
      return 1;
    }
  }
  if (seed) {
    if (kind == "validate") {
      std::cerr << "error: validate takes no --seed\n";
      return 1;
    }
    config["seed"] = *seed;
  }
  if (trials) {
    if (!bce::has_trials(kind)) {
      std::cerr << "error: " << kind << " takes no --trials\n";
      return 1;
    }
    config["trials"] = *trials;
  }

  const auto start = std::chrono::steady_clock::now();
  bce::Report report;
  try {
    report = bce::run_experiment(kind, config);
  } catch (const bce::ConfigError& e) {
    const auto line = text.empty() ? std::nullopt : locate_key(text, e.path());
    std::cerr << where;
    if (line) std::cerr << ":" << *line;
    std::cerr << ": " << e.what() << "\n";
    return 1;
  } catch (const bce::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const bce::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const bce::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 1;
  } catch (const bce::SolverError& e) {
    std::cerr << "solver error (" << e.status() << "): " << e.what() << "\n";
    return 1;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    bce::write_report(report, out_dir);
    nlohmann::json meta;
    meta["kind"] = kind;
    meta["config_hash"] = report.config_hash;
    meta["timestamp"] = timestamp_utc();
    meta["elapsed_seconds"] = elapsed;
    meta["argv"] = argv;
    std::ofstream out(std::filesystem::path(out_dir) / "run_meta.json", std::ios::binary);
    out << meta.dump(2) << '\n';
  } catch (const bce::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 1;
  }

  std::size_t failed = 0;
  for (const auto& v : report.verdicts) {
    std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << bce::format_number(v.value) << ' '
              << v.relation << ' ' << bce::format_number(v.threshold);
    if (!v.detail.empty()) std::cout << " (" << v.detail << ')';
    if (v.flagged) std::cout << " [flagged]";
    std::cout << '\n';
    failed += !v.passed;
  }
  std::cout << kind << ": " << (failed ? std::to_string(failed) + " verdict(s) failed" : "all verdicts passed")
            << "; report in " << out_dir << "\n";
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sealed-bid auction equilibrium learning experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"error-sweep", "estimator sup-error vs sample size"},
      {"nonmonotone-demo", "large estimation error for a non-monotone opponent"},
      {"shattering", "label-vector counts for the utility class"},
      {"lower-bound", "lower-bound family: closed form, KL, distinguisher, separation"},
      {"permutation", "column-permutation average of emp equals empp"},
      {"bce-pipeline", "samples -> LP on the empirical product -> transfer check"},
      {"validate", "payment monotonicity of a mechanism"},
  };
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_dir;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--trials", trials, "override the config trial count");
    sub->add_option("--out", out_dir, "output directory (default out/<subcommand>)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  if (out_dir.empty()) out_dir = "out/" + kind;
  return run(kind, config_path, seed, trials, out_dir, std::vector<std::string>(argv, argv + argc));
}
