// rvp_lab: scenario runner for the relativistic Vlasov-Poisson toolkit.
//
// Exit status: 0 when every requested check passed, 2 when an invariant or
// bound flag fired, 1 on invalid configuration or runtime failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rvp/bounds.hpp"
#include "rvp/criticality.hpp"
#include "rvp/dynamics.hpp"
#include "rvp/functionals.hpp"
#include "rvp/radial_field.hpp"
#include "rvp/sampling.hpp"
#include "rvp/trial_families.hpp"
#include "scenario_config.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  os << j.dump(2) << '\n';
}

// ---- data -------------------------------------------------------------------

/// Unscaled analytic family member, before the cutoff.
rvp::PhaseDensity base_density(const lab::FamilyConfig& f) {
  if (f.kind == "plummer") return rvp::power_hminus_density(rvp::plummer(1.0), f.theta);
  if (f.kind == "cusp") return rvp::power_hminus_density(rvp::cusp(f.delta), f.theta);
  if (f.kind == "product") return rvp::product_density(f.radius);
  throw lab::ConfigError("family.kind: '" + f.kind + "' has no analytic form");
}

/// Analytic datum: cutoff first, then the double scaling (or a rescale to a
/// target 3/2-norm at the given kappa).
rvp::PhaseDensity analytic_datum(const lab::FamilyConfig& f) {
  auto d = base_density(f);
  if (f.cutoff > 0.0) d = rvp::with_angular_cutoff(d, f.cutoff);
  if (f.norm_ratio) return rvp::rescale_to_norm(d, *f.norm_ratio * rvp::kCriticalNorm, f.kappa);
  return rvp::double_scale(d, f.kappa, f.lambda);
}

struct Datum {
  std::optional<rvp::PhaseDensity> analytic;
  rvp::PhaseDensity ensemble{std::vector<rvp::Characteristic>{{1.0, 0.0, 1.0, 1.0}}};
};

Datum make_datum(const lab::ScenarioConfig& c) {
  Datum d;
  if (c.family.kind == "core-halo") {
    d.ensemble = rvp::PhaseDensity(rvp::zero_energy_core_halo(c.solver.n));
    return d;
  }
  d.analytic = analytic_datum(c.family);
  d.ensemble = rvp::PhaseDensity(rvp::sample_characteristics(*d.analytic, c.solver.n, c.seed));
  return d;
}

rvp::RunConfig run_config(const lab::ScenarioConfig& c, const rvp::PhaseDensity& ensemble) {
  rvp::RunConfig r;
  r.t_end = c.solver.t_end;
  r.cadence = c.solver.cadence;
  r.integrator.dt = c.solver.dt;
  r.integrator.adaptive = c.solver.adaptive;
  r.integrator.accuracy = c.solver.accuracy;
  r.integrator.dt_min = c.solver.dt_min;
  r.integrator.dt_max = c.solver.dt_max;
  if (c.solver.frozen == "point-mass") {
    r.frozen = rvp::FrozenField::point_mass(c.solver.point_mass);
  } else if (c.solver.frozen == "initial") {
    const auto field = rvp::solve_field(rvp::project_spatial_density(ensemble, r.grid));
    r.frozen = rvp::FrozenField{[field](double x) { return field.enclosed(x); },
                                [field](double x) { return field.potential_at(x); }};
  }
  return r;
}

// ---- outputs ----------------------------------------------------------------

void write_diagnostics(const fs::path& p, const std::vector<rvp::DiagnosticsRecord>& recs) {
  std::ofstream os(p);
  os << "t,E,Ep,Eq,Epu,invgamma,V,mass,Pt,second_moment,dilation_resid,virial2_resid,bound_flags\n";
  for (const auto& d : recs) {
    os << num(d.t) << ',' << num(d.energy.total) << ',' << num(d.energy.kinetic) << ',' << num(d.energy.potential)
       << ',' << num(d.energy.ultra) << ',' << num(d.energy.inverse_gamma) << ',' << num(d.virial) << ','
       << num(d.mass) << ',' << num(d.support) << ',' << num(d.second_moment) << ',' << num(d.dilation_resid)
       << ',' << num(d.virial2_resid) << ',' << join(d.flags, "|") << '\n';
  }
}

json run_report(const rvp::RunResult& r, const std::vector<std::string>& flags) {
  json j;
  j["verdict"] = r.verdict.verdict;
  j["t_final"] = r.t_final;
  j["triggers"] = json::array();
  if (!r.verdict.trigger.empty()) j["triggers"].push_back({{"trigger", r.verdict.trigger}, {"t", jnum(r.verdict.time)}});
  j["max_drifts"] = {{"energy", r.drifts.energy},
                     {"mass", r.drifts.mass},
                     {"angular_momentum", r.drifts.angular_momentum},
                     {"weights", r.drifts.weights}};
  j["flags"] = flags;
  j["steps"] = r.steps;
  j["reflections"] = r.reflections;
  j["dilation_rms"] = jnum(r.dilation.rms);
  j["second_virial_rms"] = jnum(r.second_virial.rms);
  return j;
}

void plot_run(const fs::path& p, const std::vector<rvp::DiagnosticsRecord>& recs) {
  lab::Series e{"E", {}, {}}, v{"V", {}, {}}, q{"Q", {}, {}}, s{"P(t)", {}, {}};
  for (const auto& d : recs) {
    for (auto* x : {&e, &v, &q, &s}) x->x.push_back(d.t);
    e.y.push_back(d.energy.total);
    v.y.push_back(d.virial);
    q.y.push_back(d.second_moment);
    s.y.push_back(d.support);
  }
  lab::write_svg(p, {{"energy", {e}}, {"virial V", {v}}, {"second moment", {q}}, {"momentum support", {s}}});
}

std::vector<std::string> check_flags(const lab::ScenarioConfig& c, const rvp::RunResult& r) {
  auto flags = r.flags;
  if (!std::isnan(c.solver.max_energy_drift) && r.drifts.energy > c.solver.max_energy_drift) flags.push_back("energy-drift");
  return flags;
}

// ---- scenarios --------------------------------------------------------------

int constants(const lab::ScenarioConfig& c, const fs::path& out, bool plot) {
  std::ofstream os(out / "constants.csv");
  os << "beta,lower,upper,estimate\n";
  lab::Series lo{"lower", {}, {}}, hi{"upper", {}, {}}, est{"polytrope", {}, {}};
  for (double beta : c.constants.beta) {
    const auto r = rvp::criticality_report(beta);
    os << num(beta) << ',' << num(r.bounds.lower) << ',' << num(r.bounds.upper) << ','
       << (r.estimate ? num(*r.estimate) : "") << '\n';
    lo.x.push_back(beta);
    lo.y.push_back(r.bounds.lower);
    hi.x.push_back(beta);
    hi.y.push_back(r.bounds.upper);
    if (r.estimate) {
      est.x.push_back(beta);
      est.y.push_back(*r.estimate);
    }
  }
  if (plot) lab::write_svg(out / "constants.svg", {{"C_beta bracket and estimate", {lo, hi, est}}});
  return 0;
}

int trial_family(const lab::ScenarioConfig& c, const fs::path& out, bool plot) {
  auto base = base_density(c.family);
  if (c.family.cutoff > 0.0) base = rvp::with_angular_cutoff(base, c.family.cutoff);
  std::ofstream os(out / "family.csv");
  os << "kappa,lambda,norm_3_2,kato,field_energy,classification\n";
  std::vector<lab::Series> curves;
  for (double kappa : c.sweep.kappa) {
    std::vector<double> lambdas = c.sweep.lambda;
    for (double eps : c.sweep.epsilon) lambdas.push_back((1.0 + eps) / kappa);
    const rvp::RadialProfile phi = rvp::plummer(kappa);
    lab::Series s{"kappa " + num(kappa), {}, {}};
    for (double lambda : lambdas) {
      const auto f = rvp::double_scale(base, kappa, lambda);
      const double n = rvp::lp_norm(f, 1.5);
      const double k = rvp::kato_form(f, phi);
      const double e = rvp::field_form_energy(f, phi);
      os << num(kappa) << ',' << num(lambda) << ',' << num(n) << ',' << num(k) << ',' << num(e) << ','
         << rvp::to_string(rvp::classify_norm(n).kind) << '\n';
      s.x.push_back(kappa * lambda);
      s.y.push_back(k);
    }
    curves.push_back(s);
  }
  if (plot) lab::write_svg(out / "family.svg", {{"Kato form against kappa lambda", curves}});
  return 0;
}

int evolve(const lab::ScenarioConfig& c, const fs::path& out, bool plot, bool audit) {
  if (audit && c.family.kind == "core-halo") throw lab::ConfigError("family.kind: bounds-audit needs an analytic datum");
  const auto datum = make_datum(c);
  {
    std::ofstream os(out / "ensemble.csv");
    rvp::write_ensemble_csv(os, datum.ensemble.characteristics());
  }
  auto cfg = run_config(c, datum.ensemble);
  json report;
  if (audit || (c.solver.audit && datum.analytic)) {
    const auto norms = rvp::source_norms(*datum.analytic, c.solver.alpha);
    cfg.norms = norms;
    cfg.support_bound = rvp::predict_support_bound(norms);
    report["source"] = {{"norm_3_2", norms.norm_3_2},
                        {"alpha", norms.alpha},
                        {"norm_alpha", norms.norm_alpha},
                        {"energy", norms.energy},
                        {"support", norms.support},
                        {"varkappa", norms.varkappa()},
                        {"density_bound", norms.density_bound()},
                        {"support_bound", *cfg.support_bound}};
  }
  const auto r = rvp::run(datum.ensemble, cfg);
  write_diagnostics(out / "diagnostics.csv", r.records);
  const auto flags = check_flags(c, r);
  json j = run_report(r, flags);
  for (auto& [k, v] : report.items()) j[k] = v;

  if (cfg.norms) {
    std::ofstream os(out / "audit.csv");
    os << "t,dirichlet_ratio,kinetic_ratio,density_ratio,force_ratio,support_ratio,flags\n";
    json worst = {{"dirichlet", 0.0}, {"kinetic", 0.0}, {"density", 0.0}, {"force", 0.0}, {"support", 0.0}};
    for (const auto& d : r.records) {
      const auto a = rvp::check_apriori_bounds(d, *cfg.norms, cfg.support_bound);
      os << num(d.t) << ',' << num(a.dirichlet_ratio) << ',' << num(a.kinetic_ratio) << ',' << num(a.density_ratio)
         << ',' << num(a.force_ratio) << ',' << num(a.support_ratio) << ',' << join(a.flags, "|") << '\n';
      for (auto [key, v] : {std::pair{"dirichlet", a.dirichlet_ratio}, {"kinetic", a.kinetic_ratio},
                            {"density", a.density_ratio}, {"force", a.force_ratio}, {"support", a.support_ratio}})
        if (std::isfinite(v)) worst[key] = std::max(worst[key].get<double>(), v);
    }
    j["max_bound_ratios"] = worst;
  }
  write_json(out / "report.json", j);
  if (plot) plot_run(out / "diagnostics.svg", r.records);
  std::cout << "verdict: " << r.verdict.verdict << ", t_final " << r.t_final << ", energy drift " << r.drifts.energy
            << (flags.empty() ? "" : ", flags: " + join(flags, ",")) << '\n';
  return flags.empty() ? 0 : 2;
}

// kappa on the hyperbola kappa lambda = product with E(kappa) = target, found
// on the sampled ensemble so the sign of E is exact for the run.
std::optional<double> solve_kappa(const std::vector<rvp::Characteristic>& ens, double target) {
  auto e = [&](double kappa) {
    return rvp::energy(rvp::double_scale(rvp::PhaseDensity(ens), kappa, 1.0 / kappa)).total - target;
  };
  double prev = 1e-2;
  double fp = e(prev);
  for (int i = 1; i <= 150; ++i) {
    const double k = 1e-2 * std::pow(10.0, 0.04 * i);
    const double fk = e(k);
    if ((fp > 0.0) != (fk > 0.0)) {
      double lo = prev, hi = k;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        ((e(m) > 0.0) == (fp > 0.0) ? lo : hi) = m;
      }
      // keep the side whose sign matches the request
      return target > 0.0 ? lo : hi;
    }
    prev = k;
    fp = fk;
  }
  return std::nullopt;
}

int blowup_sweep(const lab::ScenarioConfig& c, const fs::path& out) {
  if (c.family.kind == "core-halo") throw lab::ConfigError("family.kind: blowup-sweep needs an analytic datum");
  auto base = base_density(c.family);
  base = rvp::with_angular_cutoff(base, c.family.cutoff);
  const double n0 = rvp::lp_norm(base, 1.5);
  std::ofstream os(out / "sweep.csv");
  os << "norm_ratio,energy,kappa,lambda,E0,V0,verdict,trigger,t_blowup,t_final,steps\n";
  json rows = json::array();
  for (double ratio : c.blowup.norm_ratio) {
    const double product = ratio * rvp::kCriticalNorm / n0;
    const auto ens = rvp::sample_characteristics(rvp::double_scale(base, 1.0, product), c.solver.n, c.seed);
    for (const auto& sign : c.blowup.energy) {
      const double target = sign == "negative" ? -c.blowup.energy_magnitude
                            : sign == "positive" ? c.blowup.energy_magnitude
                                                 : 0.0;
      std::optional<double> kappa;
      const double e1 = rvp::energy(rvp::PhaseDensity(ens)).total;
      if (sign == "positive" && e1 > 0.0) kappa = 1.0;
      else kappa = solve_kappa(ens, target);
      json row = {{"norm_ratio", ratio}, {"energy", sign}};
      if (!kappa) {
        os << num(ratio) << ',' << sign << ",,,,,not attainable,,,,\n";
        row["verdict"] = "not attainable";
        rows.push_back(row);
        std::cout << "norm ratio " << ratio << ", " << sign << " energy: not attainable\n";
        continue;
      }
      const rvp::PhaseDensity f = rvp::double_scale(rvp::PhaseDensity(ens), *kappa, 1.0 / *kappa);
      const auto r = rvp::run(f, run_config(c, f));
      const auto& d0 = r.records.front();
      os << num(ratio) << ',' << sign << ',' << num(*kappa) << ',' << num(product / *kappa) << ','
         << num(d0.energy.total) << ',' << num(d0.virial) << ',' << r.verdict.verdict << ',' << r.verdict.trigger << ','
         << num(r.verdict.time) << ',' << num(r.t_final) << ',' << r.steps << '\n';
      row["kappa"] = *kappa;
      row["lambda"] = product / *kappa;
      row["E0"] = d0.energy.total;
      row["V0"] = d0.virial;
      row["verdict"] = r.verdict.verdict;
      row["trigger"] = r.verdict.trigger;
      row["t_blowup"] = jnum(r.verdict.time);
      row["t_final"] = r.t_final;
      rows.push_back(row);
      std::cout << "norm ratio " << ratio << ", " << sign << " energy (E0 " << d0.energy.total
                << "): " << r.verdict.verdict << '\n';
    }
  }
  write_json(out / "report.json", {{"rows", rows}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic Vlasov-Poisson scenario runner"};
  std::string config_path, out_dir, scenario;
  std::optional<std::uint64_t> seed;
  bool plot = false;
  app.add_option("--config", config_path, "scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: value in the file, else ./out)");
  app.add_flag("--plot", plot, "write SVG plots");
  app.add_option("--seed", seed, "sampling seed (overrides the file)");
  app.add_option("--scenario", scenario, "scenario name (overrides the file)")
      ->check(CLI::IsMember(std::vector<std::string>(lab::scenario_names().begin(), lab::scenario_names().end())));
  CLI11_PARSE(app, argc, argv);

  lab::ScenarioConfig cfg;
  fs::path out;
  try {
    if (!config_path.empty()) cfg = lab::load_config(config_path);
    if (!scenario.empty()) cfg.scenario = scenario;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (cfg.scenario.empty()) throw lab::ConfigError("scenario: not set (use --scenario or the config file)");
    lab::validate(cfg);
    out = cfg.out;
    fs::create_directories(out);
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 1;
  }

  try {
    if (cfg.scenario == "constants") return constants(cfg, out, plot);
    if (cfg.scenario == "trial-family") return trial_family(cfg, out, plot);
    if (cfg.scenario == "evolve") return evolve(cfg, out, plot, false);
    if (cfg.scenario == "bounds-audit") return evolve(cfg, out, plot, true);
    if (cfg.scenario == "blowup-sweep") return blowup_sweep(cfg, out);
  } catch (const lab::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    write_json(out / "error.json", {{"error", e.what()}});
    return 1;
  }
  return 1;
}
