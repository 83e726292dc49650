// hartogs: experiment harness for Bergman-space numerics on H_{m/n}.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hartogs/errors.hpp"
#include "hartogs/experiments.hpp"
#include "hartogs/kernels.hpp"

using namespace hartogs;

namespace {

struct Global {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out_dir;
  bool timing = false;
};

void emit(const Global& g, const std::string& name, const std::string& ext, const std::string& body) {
  if (g.out_dir.empty()) {
    std::cout << body;
    if (!body.empty() && body.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(g.out_dir);
  const auto path = std::filesystem::path(g.out_dir) / (name + "." + ext);
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path.string());
  os << body;
  if (!body.empty() && body.back() != '\n') os << '\n';
  std::cerr << "wrote " << path.string() << '\n';
}

int emit_report(const Global& g, ExperimentReport rep, double seconds) {
  if (g.timing) rep.wall_time = seconds;
  if (g.format == "csv") {
    emit(g, rep.id, "csv", rep.to_csv());
  } else if (g.format == "json") {
    emit(g, rep.id, "json", rep.to_json().dump(2));
  } else {
    throw InvalidArgument("reports support --format json or csv, not " + g.format);
  }
  std::cerr << rep.id << ": " << to_string(rep.verdict) << '\n';
  return rep.exit_code();
}

template <class F>
int timed_report(const Global& g, F&& run) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep = run();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit_report(g, std::move(rep), s);
}

std::vector<Exponent> split_exponents(const std::string& text) {
  std::vector<Exponent> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(Exponent::parse(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman-space numerics on generalized Hartogs triangles"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "svg", "ascii"}));
  app.add_option("--out", g.out_dir, "write outputs into this directory");
  app.add_flag("--timing", g.timing, "include wall time in reports");

  int m = 1, n = 1;
  const auto add_domain = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("-m", m, "numerator of the exponent m/n");
    sub->add_option("-n", n, "denominator of the exponent m/n");
  };

  // lattice
  auto* lat = app.add_subcommand("lattice", "allowable-index diagrams");
  add_domain(lat);
  std::string lat_p = "thresholds";
  int lat_box = 6;
  int lat_sobolev = -1;
  lat->add_option("--p", lat_p, "comma-separated exponents, or 'thresholds'");
  lat->add_option("--box", lat_box, "show |a|_inf <= box");
  lat->add_option("--sobolev", lat_sobolev, "draw S(A^inf_k) for k = 0..K instead");

  // breakdown
  auto* brk = app.add_subcommand("breakdown", "duality, density and projection counterexamples");
  add_domain(brk);
  std::string which;
  brk->add_option("which", which, "duality | density | projection")
      ->required()
      ->check(CLI::IsMember({"duality", "density", "projection"}));
  int brk_box = -1;
  brk->add_option("--box", brk_box, "index box");

  // convergence
  auto* conv = app.add_subcommand("convergence", "square partial sums in L^p");
  add_domain(conv);
  std::string conv_p;
  int conv_j = -1, conv_nmax = -1;
  conv->add_option("--p", conv_p, "exponent, default 5/3");
  conv->add_option("--J", conv_j, "terms in the test family");
  conv->add_option("--n-max", conv_nmax, "largest partial-sum box");

  // kernel-validate
  auto* kv = app.add_subcommand("kernel-validate", "closed-form kernels against series");
  add_domain(kv);
  int kv_samples = -1, kv_ratio = -1;
  std::string kv_batch;
  int kv_class = 1;
  kv->add_option("--samples", kv_samples, "random interior pairs");
  kv->add_option("--ratio-samples", kv_ratio, "samples for the type-A ratio supremum");
  kv->add_option("--batch", kv_batch, "evaluate a CSV of points instead (z1re,z1im,z2re,z2im,w1re,...)");
  kv->add_option("--class", kv_class, "kernel class k for --batch (default: Bergman)");

  // minimize
  auto* mn = app.add_subcommand("minimize", "L^2-nearest element of A^p");
  add_domain(mn);
  std::string mn_p, mn_input = "builtin:conj_z2";
  int mn_box = -1, mn_cand = -1;
  mn->add_option("--p", mn_p, "exponent >= 2");
  mn->add_option("--input", mn_input, "builtin:conj_z2 | builtin:random | builtin:holomorphic | CSV path");
  mn->add_option("--box", mn_box, "projection box");
  mn->add_option("--candidates", mn_cand, "random competitors");

  // norms
  auto* nm = app.add_subcommand("norms", "closed-form monomial norms against quadrature");
  add_domain(nm);
  std::string nm_p;
  int nm_box = -1;
  nm->add_option("--p", nm_p, "comma-separated exponents");
  nm->add_option("--box", nm_box, "index box");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = g.config_path.empty() ? Config{} : Config::load(g.config_path);
    if (cfg.has("seed") && app.count("--seed") == 0) g.seed = cfg.get_u64("seed", g.seed);
    const auto set_int = [&](const std::string& key, int v) {
      if (v >= 0) cfg.set(key, std::to_string(v));
    };
    const auto set_str = [&](const std::string& key, const std::string& v) {
      if (!v.empty()) cfg.set(key, v);
    };
    const HartogsTriangle h(m, n);

    if (*lat) {
      LatticeDiagram d = lat_sobolev >= 0 ? diagram_sobolev(h, lat_sobolev, lat_box)
                         : lat_p == "thresholds" ? diagram_thresholds(h, lat_box)
                                                 : diagram_for_exponents(h, split_exponents(lat_p), lat_box);
      const std::string name = "lattice";
      if (g.format == "svg") {
        emit(g, name, "svg", d.to_svg());
      } else if (g.format == "ascii") {
        emit(g, name, "txt", d.to_ascii());
      } else if (g.format == "csv") {
        std::ostringstream os;
        os << "set,a1,a2\n";
        for (std::size_t i = 0; i < d.sets.size(); ++i) {
          for (const auto& a : d.sets[i]) os << d.set_labels[i] << ',' << a.a1 << ',' << a.a2 << '\n';
        }
        emit(g, name, "csv", os.str());
      } else {
        emit(g, name, "json", d.to_json().dump(2));
      }
      return 0;
    }
    if (*brk) {
      set_int("breakdown.box", brk_box);
      return timed_report(g, [&] { return run_breakdown(which, h, cfg, g.seed); });
    }
    if (*conv) {
      set_str("convergence.p", conv_p);
      set_int("convergence.J", conv_j);
      set_int("convergence.n_max", conv_nmax);
      return timed_report(g, [&] { return run_convergence(h, cfg); });
    }
    if (*kv) {
      if (!kv_batch.empty()) {
        std::ifstream in(kv_batch);
        if (!in) throw InvalidArgument("cannot open " + kv_batch);
        const KernelSpec spec = kv_class > 0 ? KernelSpec::bergman(h) : KernelSpec(h, kv_class);
        std::ostringstream os;
        evaluate_batch(spec, in, os);
        emit(g, "kernel-batch", "csv", os.str());
        return 0;
      }
      set_int("kernel.samples", kv_samples);
      set_int("kernel.ratio_samples", kv_ratio);
      return timed_report(g, [&] { return run_kernel_validate(h, cfg, g.seed); });
    }
    if (*mn) {
      set_str("minimize.p", mn_p);
      set_int("minimize.box", mn_box);
      set_int("minimize.candidates", mn_cand);
      return timed_report(g, [&] { return run_minimize(h, mn_input, cfg, g.seed); });
    }
    if (*nm) {
      set_str("norms.p", nm_p);
      set_int("norms.box", nm_box);
      return timed_report(g, [&] { return run_norms(h, cfg); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
