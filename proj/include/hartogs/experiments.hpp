#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hartogs/lattice.hpp"
#include "hartogs/laurent.hpp"
#include "hartogs/quadrature.hpp"

namespace hartogs {

using Json = nlohmann::ordered_json;

enum class Verdict { Pass, Inconclusive, Fail };
std::string to_string(Verdict v);

struct ExperimentReport {
  std::string id;
  Json parameters = Json::object();
  Json records = Json::array();  // one object per step, each with its resolution
  Json flags = Json::object();   // named boolean checks
  Json summary = Json::object();
  Verdict verdict = Verdict::Pass;
  std::optional<double> wall_time;

  // Records a named check; a false check downgrades the verdict to `on_fail`.
  void check(const std::string& name, bool ok, Verdict on_fail = Verdict::Fail);

  Json to_json() const;
  // Records as CSV; columns are the union of record keys in first-seen order.
  std::string to_csv() const;
  int exit_code() const;
};

// key = value lines; "# ..." comments; "[section]" prefixes later keys with
// "section.". Values may be quoted.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  Exponent get_exponent(const std::string& key, const Exponent& fallback) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Rule settings under "<prefix>.order", "<prefix>.r2_levels_low", ...
RuleConfig rule_from_config(const Config& cfg, const std::string& prefix, RuleConfig defaults);
Json to_json(const RuleConfig& rc);

// ---- lattice diagrams -------------------------------------------------------

struct DiagramLine {
  int k;  // n a1 + m a2 = k
  std::string label;
};

struct LatticeDiagram {
  HartogsTriangle h;
  int box;
  std::vector<DiagramLine> lines;
  std::vector<std::string> set_labels;
  std::vector<std::vector<MultiIndex>> sets;  // one index list per label

  Json to_json() const;
  std::string to_svg() const;
  std::string to_ascii() const;
};

// One line and one allowable set per exponent.
LatticeDiagram diagram_for_exponents(const HartogsTriangle& h, const std::vector<Exponent>& ps,
                                     int box);
// All 2m+2n threshold lines, labelled by p_k; the set is S(H, L^2).
LatticeDiagram diagram_thresholds(const HartogsTriangle& h, int box);
// S(H, A^inf_k) for k = 0..max_order; each line is the lowest n a1 + m a2
// reached by the set off the first quadrant.
LatticeDiagram diagram_sobolev(const HartogsTriangle& h, int max_order, int box);

// ---- experiments ------------------------------------------------------------

ExperimentReport run_norms(const HartogsTriangle& h, const Config& cfg);
ExperimentReport run_breakdown(const std::string& which, const HartogsTriangle& h,
                               const Config& cfg, std::uint64_t seed);
ExperimentReport run_convergence(const HartogsTriangle& h, const Config& cfg);
ExperimentReport run_kernel_validate(const HartogsTriangle& h, const Config& cfg,
                                     std::uint64_t seed);
// `input` is "builtin:conj_z2", "builtin:random", "builtin:holomorphic" or a
// CSV path of samples on the configured rule.
ExperimentReport run_minimize(const HartogsTriangle& h, const std::string& input,
                              const Config& cfg, std::uint64_t seed);

// Exact check that A = 2n + k/m reproduces (q_{k+1}, p_{k+1}) for all
// m, n <= limit and all valid k. Returns the number of failures.
int type_a_window_failures(int limit, Json* detail = nullptr);

}  // namespace hartogs
