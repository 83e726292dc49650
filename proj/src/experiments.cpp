#include "hartogs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "hartogs/errors.hpp"
#include "hartogs/kernels.hpp"
#include "hartogs/projection.hpp"

namespace hartogs {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "PASS";
    case Verdict::Inconclusive:
      return "INCONCLUSIVE";
    case Verdict::Fail:
      return "FAIL";
  }
  return "FAIL";
}

void ExperimentReport::check(const std::string& name, bool ok, Verdict on_fail) {
  flags[name] = ok;
  if (!ok && static_cast<int>(on_fail) > static_cast<int>(verdict)) verdict = on_fail;
}

Json ExperimentReport::to_json() const {
  Json j;
  j["experiment"] = id;
  j["verdict"] = to_string(verdict);
  j["parameters"] = parameters;
  j["flags"] = flags;
  j["summary"] = summary;
  j["records"] = records;
  if (wall_time) j["wall_time_s"] = *wall_time;
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::vector<std::string> cols;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.items()) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ',';
      if (!r.contains(cols[i])) continue;
      const auto& v = r[cols[i]];
      if (v.is_string()) {
        os << v.get<std::string>();
      } else {
        std::string s = v.dump();
        std::replace(s.begin(), s.end(), ',', ';');
        os << s;
      }
    }
    os << '\n';
  }
  return os.str();
}

int ExperimentReport::exit_code() const {
  switch (verdict) {
    case Verdict::Pass:
      return 0;
    case Verdict::Inconclusive:
      return 2;
    case Verdict::Fail:
      return 1;
  }
  return 1;
}

// ---- config -----------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidArgument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": unterminated string");
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find('#'); hash != std::string::npos) {
      value = trim(value.substr(0, hash));
    }
    c.values_[section.empty() ? key : section + "." + key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  return parse(in);
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(get(key, ""), &pos);
    if (pos != get(key, "").size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("config key " + key + " is not an integer");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stod(get(key, ""));
  } catch (const std::exception&) {
    throw InvalidArgument("config key " + key + " is not a number");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stoull(get(key, ""));
  } catch (const std::exception&) {
    throw InvalidArgument("config key " + key + " is not an unsigned integer");
  }
}

Exponent Config::get_exponent(const std::string& key, const Exponent& fallback) const {
  return has(key) ? Exponent::parse(get(key, "")) : fallback;
}

RuleConfig rule_from_config(const Config& cfg, const std::string& prefix, RuleConfig d) {
  d.order = cfg.get_int(prefix + ".order", d.order);
  d.r2_levels_low = cfg.get_int(prefix + ".r2_levels_low", d.r2_levels_low);
  d.r2_levels_high = cfg.get_int(prefix + ".r2_levels_high", d.r2_levels_high);
  d.u_levels_low = cfg.get_int(prefix + ".u_levels_low", d.u_levels_low);
  d.u_levels_high = cfg.get_int(prefix + ".u_levels_high", d.u_levels_high);
  d.angular = cfg.get_int(prefix + ".angular", d.angular);
  return d;
}

Json to_json(const RuleConfig& rc) {
  Json j;
  j["order"] = rc.order;
  j["r2_levels"] = {rc.r2_levels_low, rc.r2_levels_high};
  j["u_levels"] = {rc.u_levels_low, rc.u_levels_high};
  j["angular"] = rc.angular;
  j["truncation"] = {rc.truncation.r2_lo, rc.truncation.r2_hi, rc.truncation.u_hi};
  return j;
}

namespace {

std::string resolution_tag(const RuleConfig& rc) {
  std::ostringstream os;
  os << "GL" << rc.order << " r2[" << rc.r2_levels_low << "," << rc.r2_levels_high << "] u["
     << rc.u_levels_low << "," << rc.u_levels_high << "] ang" << rc.angular;
  return os.str();
}

Json index_json(MultiIndex a) { return Json::array({a.a1, a.a2}); }

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<Exponent> parse_exponent_list(const std::string& text) {
  std::vector<Exponent> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(Exponent::parse(item));
  }
  if (out.empty()) throw InvalidArgument("empty exponent list");
  return out;
}

Json domain_json(const HartogsTriangle& h) {
  Json j;
  j["m"] = h.m();
  j["n"] = h.n();
  return j;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

// ---- diagrams ---------------------------------------------------------------

Json LatticeDiagram::to_json() const {
  Json j = domain_json(h);
  j["box"] = box;
  Json lj = Json::array();
  for (const auto& l : lines) lj.push_back(Json{{"k", l.k}, {"label", l.label}});
  j["lines"] = lj;
  Json sj = Json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Json idx = Json::array();
    for (const auto& a : sets[i]) idx.push_back(index_json(a));
    sj.push_back(Json{{"label", set_labels[i]}, {"indices", idx}});
  }
  j["sets"] = sj;
  return j;
}

std::string LatticeDiagram::to_svg() const {
  const int cell = 24;
  const int margin = 60;
  const int w = 2 * margin + box * cell;
  const int hgt = 2 * margin + 2 * box * cell;
  const auto X = [&](double a1) { return margin + a1 * cell; };
  const auto Y = [&](double a2) { return margin + (box - a2) * cell; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 160 << "\" height=\"" << hgt
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<defs><marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" "
        "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#b22\"/></marker>"
     << "<clipPath id=\"plot\"><rect x=\"" << X(0) - 6 << "\" y=\"" << Y(box) - 6 << "\" width=\""
     << box * cell + 12 << "\" height=\"" << 2 * box * cell + 12 << "\"/></clipPath></defs>\n";
  // axes
  os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(box) + 10 << "\" y2=\""
     << Y(0) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(box) - 10 << "\" x2=\"" << X(0) << "\" y2=\""
     << Y(-box) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << X(box) + 14 << "\" y=\"" << Y(0) + 4 << "\">a1</text>\n";
  os << "<text x=\"" << X(0) - 8 << "\" y=\"" << Y(box) - 14 << "\">a2</text>\n";
  const std::vector<MultiIndex> none;
  const auto& filled = sets.empty() ? none : sets.front();
  for (int a1 = 0; a1 <= box; ++a1) {
    for (int a2 = -box; a2 <= box; ++a2) {
      const bool in = std::binary_search(filled.begin(), filled.end(), MultiIndex{a1, a2});
      os << "<circle cx=\"" << X(a1) << "\" cy=\"" << Y(a2) << "\" r=\"3\" "
         << (in ? "fill=\"black\"" : "fill=\"white\" stroke=\"#888\"") << "/>\n";
    }
  }
  os << "<g clip-path=\"url(#plot)\">\n";
  for (const auto& l : lines) {
    const double y0 = static_cast<double>(l.k) / h.m();
    const double y1 = static_cast<double>(l.k - h.n() * box) / h.m();
    os << "<line x1=\"" << X(0) << "\" y1=\"" << Y(y0) << "\" x2=\"" << X(box) << "\" y2=\""
       << Y(y1) << "\" stroke=\"#b22\" stroke-width=\"1.2\" marker-end=\"url(#arrow)\"/>\n";
  }
  os << "</g>\n";
  int row = 0;
  for (const auto& l : lines) {
    const double y0 = static_cast<double>(l.k) / h.m();
    os << "<text x=\"" << X(box) + 24 << "\" y=\"" << margin + 14 * row++ << "\" fill=\"#b22\">"
       << h.n() << "a1+" << h.m() << "a2=" << l.k << "  " << l.label << "</text>\n";
    os << "<text x=\"" << X(0) - 52 << "\" y=\"" << Y(y0) + 4 << "\" fill=\"#b22\">k=" << l.k
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string LatticeDiagram::to_ascii() const {
  std::ostringstream os;
  const std::vector<MultiIndex> none;
  const auto& filled = sets.empty() ? none : sets.front();
  for (int a2 = box; a2 >= -box; --a2) {
    os << (a2 < 0 ? "" : " ") << (std::abs(a2) < 10 ? " " : "") << a2 << " |";
    for (int a1 = 0; a1 <= box; ++a1) {
      const MultiIndex a{a1, a2};
      char c = std::binary_search(filled.begin(), filled.end(), a) ? '*' : '.';
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (a.line(h) == lines[i].k) {
          c = static_cast<char>('a' + static_cast<int>(i % 26));
          break;
        }
      }
      os << ' ' << c;
    }
    os << '\n';
  }
  os << "    +" << std::string(2 * (box + 1), '-') << "  a1 = 0.." << box << '\n';
  if (!set_labels.empty()) os << "* : " << set_labels.front() << '\n';
  for (std::size_t i = 0; i < lines.size(); ++i) {
    os << static_cast<char>('a' + static_cast<int>(i % 26)) << " : " << h.n() << "a1 + " << h.m()
       << "a2 = " << lines[i].k << "   " << lines[i].label << '\n';
  }
  return os.str();
}

LatticeDiagram diagram_for_exponents(const HartogsTriangle& h, const std::vector<Exponent>& ps,
                                     int box) {
  LatticeDiagram d{h, box, {}, {}, {}};
  for (const auto& p : ps) {
    const int k = floor_index(h, p);
    auto it = std::find_if(d.lines.begin(), d.lines.end(), [k](const DiagramLine& l) { return l.k == k; });
    if (it == d.lines.end()) {
      d.lines.push_back({k, "p=" + p.to_string()});
    } else {
      it->label += ", p=" + p.to_string();
    }
    d.set_labels.push_back("S(L^" + p.to_string() + ")");
    d.sets.push_back(allowable_in_box(h, p, box));
  }
  return d;
}

LatticeDiagram diagram_thresholds(const HartogsTriangle& h, int box) {
  LatticeDiagram d{h, box, {}, {"S(L^2)"}, {allowable_in_box(h, Exponent(2), box)}};
  for (const auto& t : thresholds(h)) d.lines.push_back({t.k, "p=" + to_string(t.p)});
  return d;
}

LatticeDiagram diagram_sobolev(const HartogsTriangle& h, int max_order, int box) {
  LatticeDiagram d{h, box, {}, {}, {}};
  for (int k = 0; k <= max_order; ++k) {
    auto set = enumerate_box(
        box, [&](MultiIndex a) { return sobolev_allowable(h, Exponent::infinity(), k, a); });
    std::optional<int> low;
    for (const auto& a : set) {
      if (a.a2 < 0) low = low ? std::min(*low, a.line(h)) : a.line(h);
    }
    const std::string label = "A^inf_" + std::to_string(k);
    if (low) d.lines.push_back({*low, label});
    d.set_labels.push_back("S(" + label + ")");
    d.sets.push_back(std::move(set));
  }
  return d;
}

// ---- norms ------------------------------------------------------------------

ExperimentReport run_norms(const HartogsTriangle& h, const Config& cfg) {
  ExperimentReport rep;
  rep.id = "norms";
  const auto ps = parse_exponent_list(cfg.get("norms.p", "2,5/3,4"));
  const int box = cfg.get_int("norms.box", 4);
  const double tol = cfg.get_double("norms.tol", 1e-6);
  RuleConfig rc{20, 400, 4, 4, 4, 1, {}};
  rc = rule_from_config(cfg, "norms.rule", rc);
  const QuadratureRule rule(h, rc);
  rep.parameters = domain_json(h);
  rep.parameters["box"] = box;
  rep.parameters["tol"] = tol;
  rep.parameters["rule"] = to_json(rc);

  double worst = 0.0;
  bool routes_agree = true;
  for (const auto& p : ps) {
    for (int a1 = -box; a1 <= box; ++a1) {
      for (int a2 = -box; a2 <= box; ++a2) {
        const MultiIndex a{a1, a2};
        const bool allowable = is_allowable(h, p, a);
        Json r;
        r["p"] = p.to_string();
        r["a"] = index_json(a);
        r["allowable"] = allowable;
        if (p.is_infinite()) {
          if (!allowable) continue;
          r["closed"] = monomial_lp_norm(h, a, p);
          rep.records.push_back(r);
          continue;
        }
        if (a1 < 0) {
          // Singular along z1 = 0 inside the domain, whatever the radial integral does.
          r["radial_integral"] = "not holomorphic";
          rep.records.push_back(r);
          continue;
        }
        const double pd = p.to_double();
        const auto exact = radial_monomial_integral(h, pd * a1, pd * a2);
        if (exact.has_value() != allowable) routes_agree = false;
        if (!allowable) {
          r["radial_integral"] = "divergent";
          rep.records.push_back(r);
          continue;
        }
        const double closed = monomial_lp_norm(h, a, p);
        const double numeric = lp_norm(LaurentPolynomial::monomial(a), p, rule);
        const double e = rel(numeric, closed);
        worst = std::max(worst, e);
        r["closed"] = closed;
        r["quadrature"] = numeric;
        r["rel_err"] = e;
        r["resolution"] = resolution_tag(rc);
        r["tol"] = tol;
        rep.records.push_back(r);
      }
    }
  }
  rep.summary["max_rel_err"] = worst;
  rep.check("closed_form_matches_quadrature", worst < tol, Verdict::Inconclusive);
  rep.check("divergence_iff_not_allowable", routes_agree);
  return rep;
}

// ---- breakdown --------------------------------------------------------------

namespace {

struct DualSetup {
  int k2;            // floor index at p = 2
  MultiIndex beta;   // first index on the line below the L^2 cut
  Rational p_dual;   // midpoint of the exponent interval where beta appears
};

DualSetup dual_setup(const HartogsTriangle& h) {
  const int k2 = floor_index(h, Exponent(2));
  const auto ths = thresholds(h);
  const Rational lo = ths.at(static_cast<std::size_t>(k2 - 1 - ths.front().k)).p;
  const Rational hi = ths.at(static_cast<std::size_t>(k2 - ths.front().k)).p;
  return {k2, line_base_point(h, k2 - 1), (lo + hi) / 2};
}

void breakdown_duality(const HartogsTriangle& h, const Config& cfg, ExperimentReport& rep) {
  const auto ds = dual_setup(h);
  const int box = cfg.get_int("breakdown.box", 6);
  const double tol = cfg.get_double("breakdown.tol", 1e-8);
  const Exponent p(ds.p_dual);
  const Exponent q = conjugate(p);
  rep.parameters["beta"] = index_json(ds.beta);
  rep.parameters["p"] = p.to_string();
  rep.parameters["q"] = q.to_string();
  rep.parameters["box"] = box;

  rep.check("beta_in_Lp", is_allowable(h, p, ds.beta));
  rep.check("beta_not_in_L2", !is_allowable(h, Exponent(2), ds.beta));
  rep.check("representer_not_in_Aq", !is_allowable(h, q, ds.beta));

  RuleConfig rc{12, 20, 4, 4, 4, 2 * box + 4, Truncation::annular(h, 0.05)};
  rc = rule_from_config(cfg, "breakdown.rule", rc);
  const auto rule = make_rule(h, rc);
  const auto eb = LaurentPolynomial::monomial(ds.beta);
  const auto deltas = allowable_in_box(h, Exponent(2), box);
  const auto sampled = SampledFunction::sample(rule, eb);
  const auto fft_modes = mode_integrals(sampled, deltas);
  const double nb = std::sqrt(radial_monomial_integral_numeric(2.0 * ds.beta.a1, 2.0 * ds.beta.a2, *rule));
  double worst_exact = 0.0;
  double worst_fft = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto ed = LaurentPolynomial::monomial(deltas[i]);
    const double exact = std::abs(pair(eb, ed, *rule));
    const double nd = std::sqrt(radial_monomial_integral_numeric(2.0 * deltas[i].a1, 2.0 * deltas[i].a2, *rule));
    const double fft = std::abs(fft_modes[i]) / (nb * nd);
    worst_exact = std::max(worst_exact, exact);
    worst_fft = std::max(worst_fft, fft);
    rep.records.push_back(Json{{"delta", index_json(deltas[i])},
                               {"pair_analytic", exact},
                               {"pair_sampled_normalized", fft},
                               {"resolution", resolution_tag(rc)},
                               {"tol", tol}});
  }
  const auto coeffs = torus_coefficients(
      h, [&](Complex z1, Complex z2) { return eb(z1, z2); }, 0.3, 0.6, box, 4 * box + 4);
  const Complex functional = coeffs.at(ds.beta);
  rep.summary["max_pair_analytic"] = worst_exact;
  rep.summary["max_pair_sampled_normalized"] = worst_fft;
  rep.summary["functional_value"] = complex_json(functional);
  rep.summary["coefficient_norm_on_Ap"] = coefficient_norm(h, ds.beta, p);
  rep.check("pairings_vanish", worst_exact < tol);
  rep.check("sampled_pairings_vanish", worst_fft < tol, Verdict::Inconclusive);
  rep.check("functional_is_one", std::abs(functional - 1.0) < 1e-12, Verdict::Inconclusive);
}

void breakdown_density(const HartogsTriangle& h, const Config& cfg, std::uint64_t seed,
                       ExperimentReport& rep) {
  const auto ds = dual_setup(h);
  const Exponent p(ds.p_dual);
  const int trials = cfg.get_int("breakdown.trials", 20);
  const int norm_trials = cfg.get_int("breakdown.norm_trials", 4);
  const int box = cfg.get_int("breakdown.box", 3);
  rep.parameters["beta"] = index_json(ds.beta);
  rep.parameters["p"] = p.to_string();
  rep.parameters["trials"] = trials;
  rep.parameters["box"] = box;

  RuleConfig rc{12, 40, 4, 4, 6, 16, {}};
  rc = rule_from_config(cfg, "breakdown.rule", rc);
  const QuadratureRule rule(h, rc);
  const double gap = monomial_lp_norm(h, ds.beta, p);  // ||e_beta||_p
  const auto pool = allowable_in_box(h, Exponent(2), box);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> nterms(1, 4);
  std::normal_distribution<double> gauss;
  const auto eb = LaurentPolynomial::monomial(ds.beta);

  double worst_coeff = 0.0;
  double worst_radius_drift = 0.0;
  bool bound_holds = true;
  for (int t = 0; t < trials; ++t) {
    LaurentPolynomial::Terms terms;
    const int nt = nterms(rng);
    for (int i = 0; i < nt; ++i) terms[pool[pick(rng)]] += Complex(gauss(rng), gauss(rng));
    const LaurentPolynomial fn(terms);
    const auto g = fn + eb;
    const auto ev = [&](Complex z1, Complex z2) { return g(z1, z2); };
    // a_beta via the torus Cauchy integral at two radii.
    const Complex a1 = torus_coefficients(h, ev, 0.2, 0.5, box + 2, 4 * box + 12).at(ds.beta);
    const Complex a2 = torus_coefficients(h, ev, 0.05, 0.8, box + 2, 4 * box + 12).at(ds.beta);
    const double coeff_fn = std::abs(a1 - 1.0);  // a_beta(f_n) = a_beta(g) - 1
    worst_coeff = std::max(worst_coeff, coeff_fn);
    worst_radius_drift = std::max(worst_radius_drift, std::abs(a1 - a2));
    Json r{{"trial", t}, {"terms", fn.to_json()}, {"a_beta_fn", coeff_fn}, {"radius_drift", std::abs(a1 - a2)}};
    if (t < norm_trials) {
      const double dist = lp_norm(fn - eb, p, rule);
      r["dist_to_e_beta"] = dist;
      r["lower_bound"] = gap;
      r["resolution"] = resolution_tag(rc);
      if (dist < gap * (1.0 - 1e-6)) bound_holds = false;
    }
    rep.records.push_back(r);
  }
  const Complex a_h =
      torus_coefficients(h, [&](Complex z1, Complex z2) { return eb(z1, z2); }, 0.2, 0.5, box + 2, 4 * box + 12)
          .at(ds.beta);
  rep.summary["a_beta_of_e_beta"] = complex_json(a_h);
  rep.summary["max_a_beta_fn"] = worst_coeff;
  rep.summary["max_radius_drift"] = worst_radius_drift;
  rep.summary["distance_lower_bound"] = gap;
  rep.check("a_beta_vanishes_on_L2_span", worst_coeff < 1e-10, Verdict::Inconclusive);
  rep.check("a_beta_of_e_beta_is_one", std::abs(a_h - 1.0) < 1e-10, Verdict::Inconclusive);
  rep.check("radius_independent", worst_radius_drift < 1e-8, Verdict::Inconclusive);
  rep.check("distance_bounded_below", bound_holds, Verdict::Inconclusive);
}

void breakdown_projection(const HartogsTriangle& h, const Config& cfg, ExperimentReport& rep) {
  const int box = cfg.get_int("breakdown.box", 3);
  const double coeff_tol = cfg.get_double("breakdown.coeff_tol", 1e-4);
  const double growth_tol = cfg.get_double("breakdown.growth_tol", 0.01);
  RuleConfig rc{16, 20, 4, 4, 4, 2 * box + 2, {}};
  rc = rule_from_config(cfg, "breakdown.rule", rc);
  const auto rule = make_rule(h, rc);
  const auto psi = SampledFunction::sample(rule, [](Complex, Complex z2) { return std::conj(z2); });
  const auto proj = project_sampled(h, Exponent(2), psi, box);
  const MultiIndex target{0, -1};
  const double expected = static_cast<double>(h.n()) / (h.m() + h.n());
  const Complex c = proj.coefficient(target);
  double others = 0.0;
  for (const auto& [a, v] : proj.terms()) {
    if (a != target) others = std::max(others, std::abs(v));
  }
  rep.parameters["box"] = box;
  rep.parameters["rule"] = to_json(rc);
  rep.summary["coefficient"] = complex_json(c);
  rep.summary["expected_coefficient"] = expected;
  rep.summary["max_other_coefficient"] = others;
  rep.check("single_coefficient", std::abs(c - expected) < coeff_tol && others < 1e-8,
            Verdict::Inconclusive);

  const Rational pc(2 * (h.m() + h.n()), h.m());
  const std::vector<double> ts{1e-1, 1e-2, 1e-3, 1e-4};
  const auto e = LaurentPolynomial::monomial(target);
  for (const Rational& pr : {pc, pc + 1}) {
    const Exponent p(pr);
    rep.check("not_in_L" + p.to_string(), !is_allowable(h, p, target));
    const double pd = p.to_double();
    std::vector<double> x, num, exact;
    double worst = 0.0;
    bool monotone = true;
    for (double t : ts) {
      RuleConfig tc{16, 8, 4, 4, 4, 1, Truncation::annular(h, t)};
      tc = rule_from_config(cfg, "breakdown.truncated_rule", tc);
      tc.r2_levels_low += static_cast<int>(std::ceil(std::log2(1.0 / t)));
      const QuadratureRule trule(h, tc);
      const double np = std::pow(lp_norm(e, p, trule), pd);
      const double ex = *radial_monomial_integral(h, 0.0, -pd, tc.truncation);
      const double dev = rel(np, ex);
      worst = std::max(worst, dev);
      if (!num.empty() && !(np > num.back())) monotone = false;
      x.push_back(std::log(1.0 / t));
      num.push_back(np);
      exact.push_back(ex);
      rep.records.push_back(Json{{"p", p.to_string()},
                                 {"t", t},
                                 {"norm_p_power", np},
                                 {"oracle", ex},
                                 {"rel_dev", dev},
                                 {"resolution", resolution_tag(tc)},
                                 {"tol", growth_tol}});
    }
    // Least-squares slope of ||e||_p^p against log(1/t) (log growth at the
    // critical exponent) or of log ||e||_p^p (power growth above it).
    const bool critical = pr == pc;
    const auto slope = [&](const std::vector<double>& ys) {
      const double n = static_cast<double>(x.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = critical ? ys[i] : std::log(ys[i]);
        sx += x[i];
        sy += y;
        sxx += x[i] * x[i];
        sxy += x[i] * y;
      }
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const std::string tag = "p=" + p.to_string();
    rep.summary[tag] = Json{{"growth", critical ? "logarithmic" : "power"},
                            {"slope", slope(num)},
                            {"oracle_slope", slope(exact)},
                            {"max_rel_dev", worst}};
    rep.check("monotone_growth_" + tag, monotone, Verdict::Inconclusive);
    rep.check("matches_oracle_" + tag, worst < growth_tol, Verdict::Inconclusive);
  }
}

}  // namespace

ExperimentReport run_breakdown(const std::string& which, const HartogsTriangle& h,
                               const Config& cfg, std::uint64_t seed) {
  ExperimentReport rep;
  rep.id = "breakdown-" + which;
  rep.parameters = domain_json(h);
  rep.parameters["seed"] = seed;
  if (which == "duality") {
    breakdown_duality(h, cfg, rep);
  } else if (which == "density") {
    breakdown_density(h, cfg, seed, rep);
  } else if (which == "projection") {
    breakdown_projection(h, cfg, rep);
  } else {
    throw InvalidArgument("unknown breakdown '" + which + "' (duality, density, projection)");
  }
  return rep;
}

// ---- convergence ------------------------------------------------------------

ExperimentReport run_convergence(const HartogsTriangle& h, const Config& cfg) {
  ExperimentReport rep;
  rep.id = "convergence";
  const Exponent p = cfg.get_exponent("convergence.p", Exponent(Rational(5, 3)));
  if (p.is_infinite() || p.value() <= Rational(1)) throw InvalidArgument("convergence needs 1 < p < inf");
  const int terms = cfg.get_int("convergence.J", 40);
  const int n_max = cfg.get_int("convergence.n_max", 16);
  const double tol = cfg.get_double("convergence.tol", 1e-3);
  const double stability = cfg.get_double("convergence.stability", 0.05);
  const int line = cfg.get_int("convergence.line", floor_index(h, p));
  if (line < floor_index(h, p)) throw InvalidArgument("test-family line is not L^p-allowable");
  RuleConfig rc{12, 20, 4, 4, 8, 32, {}};
  rc = rule_from_config(cfg, "convergence.rule", rc);
  const QuadratureRule rule(h, rc);

  const MultiIndex base = line_base_point(h, line);
  LaurentPolynomial::Terms t;
  for (int j = 0; j < terms; ++j) t[{base.a1 + j * h.m(), base.a2 - j * h.n()}] = std::ldexp(1.0, -j);
  const LaurentPolynomial f(t);

  rep.parameters = domain_json(h);
  rep.parameters["p"] = p.to_string();
  rep.parameters["J"] = terms;
  rep.parameters["line"] = line;
  rep.parameters["n_max"] = n_max;
  rep.parameters["family"] = f.to_json();
  rep.parameters["rule"] = to_json(rc);

  const double nf = lp_norm(f, p, rule);
  double prev = std::numeric_limits<double>::infinity();
  bool nonincreasing = true;
  bool sandwiched = true;
  double c_est = 0.0;
  std::vector<double> c_hist;
  double final_err = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const auto sn = square_partial_sum(f, n);
    const auto tail = f - sn;
    const double err = lp_norm(tail, p, rule);
    const double ratio = lp_norm(sn, p, rule) / nf;
    c_est = std::max(c_est, ratio);
    c_hist.push_back(c_est);
    // closed-form sandwich: max_a |c_a| ||e_a||_p <= ||tail||_p <= sum_a |c_a| ||e_a||_p
    double upper = 0.0;
    double lower = 0.0;
    double parseval = 0.0;
    for (const auto& [a, c] : tail.terms()) {
      const double en = monomial_lp_norm(h, a, p);
      upper += std::abs(c) * en;
      lower = std::max(lower, std::abs(c) * en);
      if (is_allowable(h, Exponent(2), a)) parseval += std::norm(c) * l2_norm_squared(h, a);
    }
    if (err > upper * (1 + 1e-9) || err < lower * (1 - 1e-9)) sandwiched = false;
    if (n >= 1 && err > prev * (1 + 1e-12)) nonincreasing = false;
    prev = err;
    final_err = err;
    Json r{{"N", n},          {"error", err},          {"ratio", ratio},
           {"C_est", c_est},  {"lower_bound", lower},  {"upper_bound", upper},
           {"resolution", resolution_tag(rc)}, {"tol", tol}};
    if (p == Exponent(2)) r["parseval_error"] = std::sqrt(parseval);
    rep.records.push_back(r);
  }
  const double c_final = c_hist.back();
  const double c_half = c_hist[c_hist.size() / 2];
  const double drift = std::abs(c_final - c_half) / c_final;
  rep.summary["final_error"] = final_err;
  rep.summary["C_est"] = c_final;
  rep.summary["C_est_drift"] = drift;
  rep.check("error_nonincreasing", nonincreasing);
  rep.check("final_error_below_tol", final_err < tol);
  rep.check("ratio_stable", drift < stability);
  rep.check("closed_form_sandwich", sandwiched, Verdict::Inconclusive);
  return rep;
}

// ---- kernel validation ------------------------------------------------------

int type_a_window_failures(int limit, Json* detail) {
  int failures = 0;
  for (int m = 1; m <= limit; ++m) {
    for (int n = 1; n <= limit; ++n) {
      if (std::gcd(m, n) != 1) continue;
      const HartogsTriangle h(m, n);
      for (int k = 1 - m - n; k <= 0; ++k) {
        const auto w = type_a_window(h, type_a_exponent(h, k));
        const Rational two_mn(2 * (m + n));
        const Exponent p_next = k == 0 ? Exponent::infinity() : Exponent(two_mn / (-k));
        const Exponent q_next = conjugate(p_next);
        const bool ok_lower = !q_next.is_infinite() && w.lower == q_next.value();
        const bool ok_upper = k == 0 ? !w.upper.has_value() : (w.upper && *w.upper == p_next.value());
        if (!(ok_lower && ok_upper)) ++failures;
        if (detail) {
          detail->push_back(Json{{"m", m},
                                 {"n", n},
                                 {"k", k},
                                 {"A", to_string(type_a_exponent(h, k))},
                                 {"lower", to_string(w.lower)},
                                 {"upper", w.upper ? to_string(*w.upper) : "inf"},
                                 {"ok", ok_lower && ok_upper}});
        }
      }
    }
  }
  return failures;
}

ExperimentReport run_kernel_validate(const HartogsTriangle& h, const Config& cfg,
                                     std::uint64_t seed) {
  ExperimentReport rep;
  rep.id = "kernel-validate";
  const int samples = cfg.get_int("kernel.samples", 20);
  const double eps = cfg.get_double("kernel.eps", 0.05);
  const int psd_points = cfg.get_int("kernel.psd_points", 8);
  const int ratio_samples = cfg.get_int("kernel.ratio_samples", 10000);
  const double ratio_eps = cfg.get_double("kernel.ratio_eps", 1e-3);
  const double tol = cfg.get_double("kernel.tol", 1e-8);
  const int window_limit = cfg.get_int("kernel.window_limit", 6);
  rep.parameters = domain_json(h);
  rep.parameters["seed"] = seed;
  rep.parameters["samples"] = samples;
  rep.parameters["eps"] = eps;
  rep.parameters["ratio_samples"] = ratio_samples;
  rep.parameters["ratio_eps"] = ratio_eps;

  std::mt19937_64 rng(seed);
  std::vector<KernelPoint> pts;
  for (int i = 0; i < samples; ++i) {
    pts.emplace_back(random_interior_point(h, eps, rng), random_interior_point(h, eps, rng));
  }
  std::vector<Point> gram_pts;
  for (int i = 0; i < psd_points; ++i) gram_pts.push_back(random_interior_point(h, eps, rng));
  std::vector<KernelPoint> ratio_pts;
  for (int i = 0; i < ratio_samples; ++i) {
    ratio_pts.emplace_back(random_interior_point(h, ratio_eps, rng),
                           random_interior_point(h, ratio_eps, rng));
  }

  bool ok_series = true, ok_sym = true, ok_psd = true, ok_ratio = true;
  for (int k = 1 - h.m() - h.n(); k <= 0; ++k) {
    const KernelSpec spec(h, k);
    double resid = 0.0, sym = 0.0, sup = 0.0;
    int max_box = 0;
    for (const auto& pt : pts) {
      const Complex closed = sub_bergman_closed(spec, pt);
      const auto series = kernel_series(spec, pt);
      max_box = std::max(max_box, series.box);
      resid = std::max(resid, std::abs(closed - series.value) / std::max(1.0, std::abs(closed)));
      const Complex back = sub_bergman_closed(spec, pt.swapped());
      sym = std::max(sym, std::abs(closed - std::conj(back)) / std::max(1.0, std::abs(closed)));
    }
    for (const auto& pt : ratio_pts) sup = std::max(sup, type_a_ratio(spec, pt));
    const auto spec_eig = gram_spectrum(spec, gram_pts);
    const double psd = spec_eig.min / spec_eig.max;
    ok_series = ok_series && resid < tol;
    ok_sym = ok_sym && sym < 1e-12;
    ok_psd = ok_psd && psd >= -1e-8;
    ok_ratio = ok_ratio && std::isfinite(sup);
    rep.records.push_back(Json{{"kernel", k == 1 - h.m() - h.n() ? "bergman" : (k == 0 ? "B_inf" : "sub_bergman")},
                               {"k", k},
                               {"A", to_string(type_a_exponent(h, k))},
                               {"max_residual_vs_series", resid},
                               {"series_box", max_box},
                               {"max_symmetry_residual", sym},
                               {"psd_min_over_max", psd},
                               {"type_a_sup", sup},
                               {"tol", tol}});
  }
  for (int k = 1 - h.m() - h.n(); k <= -1; ++k) {
    double resid = 0.0, sym = 0.0, sup = 0.0;
    for (const auto& pt : pts) {
      const Complex closed = line_kernel_closed(h, k, pt);
      resid = std::max(resid, std::abs(closed - line_series(h, k, pt)) / std::max(1.0, std::abs(closed)));
      sym = std::max(sym, std::abs(closed - std::conj(line_kernel_closed(h, k, pt.swapped()))) /
                              std::max(1.0, std::abs(closed)));
    }
    for (const auto& pt : ratio_pts) sup = std::max(sup, line_type_a_ratio(h, k, pt));
    ok_series = ok_series && resid < tol;
    ok_sym = ok_sym && sym < 1e-12;
    ok_ratio = ok_ratio && std::isfinite(sup);
    rep.records.push_back(Json{{"kernel", "line"},
                               {"k", k},
                               {"A", to_string(type_a_exponent(h, k))},
                               {"max_residual_vs_series", resid},
                               {"max_symmetry_residual", sym},
                               {"type_a_sup", sup},
                               {"tol", tol}});
  }
  Json windows = Json::array();
  for (int k = 1 - h.m() - h.n(); k <= 0; ++k) {
    const auto w = type_a_window(h, type_a_exponent(h, k));
    windows.push_back(Json{{"k", k}, {"lower", to_string(w.lower)}, {"upper", w.upper ? to_string(*w.upper) : "inf"}});
  }
  rep.summary["windows"] = windows;
  const int failures = type_a_window_failures(window_limit);
  rep.summary["window_identity_failures"] = failures;
  rep.check("closed_form_matches_series", ok_series);
  rep.check("conjugate_symmetric", ok_sym);
  rep.check("gram_psd", ok_psd);
  rep.check("type_a_ratio_finite", ok_ratio);
  rep.check("window_identity", failures == 0);
  return rep;
}

// ---- minimization -----------------------------------------------------------

namespace {

struct BuiltinInput {
  SampledFunction::Fn fn;
  Json description;
};

BuiltinInput builtin_input(const std::string& name, const HartogsTriangle& h, const Exponent& p,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  if (name == "conj_z2") {
    return {[](Complex, Complex z2) { return std::conj(z2); }, "conj(z2)"};
  }
  if (name == "random") {
    // sum c z^a conj(z)^b with a, b in {0, 1, 2}^2
    std::vector<std::pair<std::pair<MultiIndex, MultiIndex>, Complex>> terms;
    std::uniform_int_distribution<int> deg(0, 2);
    Json desc = Json::array();
    for (int i = 0; i < 4; ++i) {
      const MultiIndex a{deg(rng), deg(rng)};
      const MultiIndex b{deg(rng), deg(rng)};
      const Complex c(gauss(rng), gauss(rng));
      terms.push_back({{a, b}, c});
      desc.push_back(Json{{"a", index_json(a)}, {"b", index_json(b)}, {"c", complex_json(c)}});
    }
    return {[terms](Complex z1, Complex z2) {
              Complex s(0.0);
              for (const auto& [ab, c] : terms) {
                s += c * ipow(z1, ab.first.a1) * ipow(z2, ab.first.a2) *
                     std::conj(ipow(z1, ab.second.a1) * ipow(z2, ab.second.a2));
              }
              return s;
            },
            desc};
  }
  if (name == "holomorphic") {
    const auto pool = allowable_in_box(h, p, 2);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    LaurentPolynomial::Terms t;
    for (int i = 0; i < 3; ++i) t[pool[pick(rng)]] += Complex(gauss(rng), gauss(rng));
    const LaurentPolynomial f(t);
    return {[f](Complex z1, Complex z2) { return f(z1, z2); }, f.to_json()};
  }
  throw InvalidArgument("unknown builtin input '" + name + "' (conj_z2, random, holomorphic)");
}

}  // namespace

ExperimentReport run_minimize(const HartogsTriangle& h, const std::string& input,
                              const Config& cfg, std::uint64_t seed) {
  ExperimentReport rep;
  rep.id = "minimize";
  const Exponent p = cfg.get_exponent("minimize.p", Exponent(2));
  if (p < Exponent(2)) throw InvalidArgument("minimization needs p >= 2");
  const int box = cfg.get_int("minimize.box", 4);
  const int candidates = cfg.get_int("minimize.candidates", 200);
  const double viol_tol = cfg.get_double("minimize.violation_tol", 1e-8);
  const double pyth_tol = cfg.get_double("minimize.pythagoras_tol", 1e-6);
  RuleConfig rc{12, 16, 4, 4, 4, 2 * box + 8, {}};
  rc = rule_from_config(cfg, "minimize.rule", rc);
  const auto rule = make_rule(h, rc);

  std::mt19937_64 rng(seed);
  rep.parameters = domain_json(h);
  rep.parameters["p"] = p.to_string();
  rep.parameters["box"] = box;
  rep.parameters["seed"] = seed;
  rep.parameters["candidates"] = candidates;
  rep.parameters["rule"] = to_json(rc);

  std::optional<SampledFunction> g;
  const std::string prefix = "builtin:";
  if (input.rfind(prefix, 0) == 0) {
    const auto b = builtin_input(input.substr(prefix.size()), h, p, rng);
    rep.parameters["input"] = Json{{"builtin", input.substr(prefix.size())}, {"g", b.description}};
    g = SampledFunction::sample(rule, b.fn);
  } else {
    std::ifstream in(input);
    if (!in) throw InvalidArgument("cannot open sampled-function file " + input);
    rep.parameters["input"] = Json{{"file", input}};
    g = SampledFunction::read_csv(rule, in);
  }

  const auto near = nearest_in_Ap(h, p, *g, box);
  const auto gs = SampledFunction::sample(rule, near.approximant);
  const double d = near.distance;
  const double ng = lp_norm(*g, Exponent(2));
  const double nG = lp_norm(gs, Exponent(2));
  const double pyth = std::abs(ng * ng - (nG * nG + d * d)) / std::max(ng * ng, 1e-300);

  // Keep only coefficients above roundoff for the report.
  const auto shown = near.approximant.filter([&](MultiIndex a) {
    return std::abs(near.approximant.coefficient(a)) > 1e-12;
  });
  rep.summary["approximant"] = shown.to_json();
  rep.summary["distance"] = d;
  rep.summary["pythagoras_residual"] = pyth;

  const auto pool = allowable_in_box(h, p, box);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_real_distribution<double> log_scale(-4.0, 0.0);
  std::normal_distribution<double> gauss;
  // On the rule, distinct modes with |a - b|_inf < N_theta are exactly
  // orthogonal, so ||g - c||^2 = ||g||^2 - 2 Re <g, c> + sum |c_a|^2 ||e_a||^2.
  // The first few candidates are also measured by direct sampling.
  const auto g_modes = mode_integrals(*g, pool);
  std::vector<double> mode_norm2(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    mode_norm2[i] = radial_monomial_integral_numeric(2.0 * pool[i].a1, 2.0 * pool[i].a2, *rule);
  }
  std::map<MultiIndex, std::size_t> slot;
  for (std::size_t i = 0; i < pool.size(); ++i) slot[pool[i]] = i;
  auto expanded_dist2 = [&](const LaurentPolynomial& c) {
    KahanSum acc;
    acc.add(ng * ng);
    for (const auto& [a, ca] : c.terms()) {
      const std::size_t i = slot.at(a);
      acc.add(-2.0 * std::real(std::conj(ca) * g_modes[i]));
      acc.add(std::norm(ca) * mode_norm2[i]);
    }
    return std::max(acc.value(), 0.0);
  };
  const int sampled_checks = std::min(candidates, cfg.get_int("minimize.sampled_checks", 4));
  double route_gap = 0.0;

  int violations = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_split = 0.0;
  for (int c = 0; c < candidates; ++c) {
    LaurentPolynomial::Terms t;
    if (c > 0) {
      const int nt = nterms(rng);
      for (int i = 0; i < nt; ++i) {
        t[pool[pick(rng)]] += std::pow(10.0, log_scale(rng)) * Complex(gauss(rng), gauss(rng));
      }
    }
    const LaurentPolynomial pert(t);
    const auto cand = near.approximant + pert;
    const double dist = std::sqrt(expanded_dist2(cand));
    double pert2 = 0.0;
    for (const auto& [a, ca] : pert.terms()) pert2 += std::norm(ca) * mode_norm2[slot.at(a)];
    const double pert_norm = std::sqrt(pert2);
    if (c < sampled_checks) {
      const double direct = lp_norm(*g - SampledFunction::sample(rule, cand), Exponent(2));
      route_gap = std::max(route_gap, std::abs(direct - dist) / std::max(ng, 1e-300));
    }
    const double split = std::abs(dist * dist - d * d - pert_norm * pert_norm) / std::max(ng * ng, 1e-300);
    if (dist < d - viol_tol) ++violations;
    if (c > 0) min_gap = std::min(min_gap, dist - d);
    worst_split = std::max(worst_split, split);
    rep.records.push_back(Json{{"candidate", c},
                               {"perturbation_norm", pert_norm},
                               {"distance", dist},
                               {"excess", dist - d},
                               {"pythagoras_split", split},
                               {"resolution", resolution_tag(rc)},
                               {"tol", viol_tol}});
  }
  rep.summary["sampled_vs_expanded_gap"] = route_gap;
  rep.check("distance_routes_agree", route_gap < 1e-8);
  rep.summary["violations"] = violations;
  rep.summary["min_excess_nonzero_perturbation"] = min_gap;
  rep.summary["max_candidate_split_residual"] = worst_split;

  // Brute-force oracle for the builtin conj(z2): scan c e_{(0,-1)} on a grid.
  if (input == "builtin:conj_z2") {
    double best_c = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const bool keep = is_allowable(h, p, {0, -1});
    const auto e01 = SampledFunction::sample(rule, LaurentPolynomial::monomial({0, -1}));
    for (int i = 0; i <= 200 && keep; ++i) {
      const double cc = i / 200.0;
      const double dist = lp_norm(*g - e01 * cc, Exponent(2));
      if (dist < best) {
        best = dist;
        best_c = cc;
      }
    }
    rep.summary["grid_minimizer"] = keep ? Json(best_c) : Json("n/a: (0,-1) not allowable");
    if (keep) {
      rep.check("grid_minimizer_agrees",
                std::abs(best_c - std::abs(near.approximant.coefficient({0, -1}))) <= 0.005 + 1e-12);
    }
  }
  rep.check("no_dominance_violation", violations == 0);
  rep.check("pythagoras", pyth < pyth_tol, Verdict::Inconclusive);
  return rep;
}

}  // namespace hartogs
