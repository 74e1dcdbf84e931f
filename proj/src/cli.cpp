#include "minheat/cli.hpp"

#include "minheat/decoherence.hpp"
#include "minheat/error.hpp"
#include "minheat/functionals.hpp"
#include "minheat/hybrid.hpp"
#include "minheat/io.hpp"
#include "minheat/optimizer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace minheat {

namespace {

using std::numbers::pi;

// Thrown for bad flag combinations found after parsing.
struct UsageError : Error {
  using Error::Error;
};

enum class Format { Csv, Json, Table };

// Rows of strings with a header; rendered as CSV or an aligned table.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os, Format f) const {
    if (f == Format::Csv) {
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
      };
      line(header);
      for (const auto& r : rows) line(r);
      return;
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "  " : "") << cells[i];
        if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size(), ' ');
      }
      os << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (std::size_t w : width) total += w + 2;
    os << std::string(total - 2, '-') << '\n';
    for (const auto& r : rows) line(r);
  }
};

std::string short_number(double x) {
  if (!std::isfinite(x)) return format_number(x);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Settings shared by every subcommand: flags override the config file,
// which overrides the defaults.
struct Global {
  std::string format;
  std::string out;
  std::string config;
  double r_c = 1.0;
  double r_g = 1.0;
  std::optional<double> G, hbar, m0, gamma_csl, lambda, mass, total_mass;

  ModelParams params;
  SolverOptions solver;
  Json config_json;
};

Format resolve_format(const Global& g, Format fallback) {
  std::string f = g.format;
  if (f.empty() && g.config_json.contains("format")) f = g.config_json["format"].get<std::string>();
  if (f.empty()) return fallback;
  if (f == "csv") return Format::Csv;
  if (f == "json") return Format::Json;
  if (f == "table" || f == "pretty-table") return Format::Table;
  throw UsageError("unknown format '" + f + "'");
}

void load_config(Global& g, const CLI::App& app) {
  if (!g.config.empty()) {
    std::ifstream is(g.config);
    if (!is) throw UsageError("cannot read config file " + g.config);
    try {
      g.config_json = Json::parse(is);
    } catch (const Json::exception& e) {
      throw UsageError("config file " + g.config + ": " + e.what());
    }
    if (!g.config_json.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : g.config_json.items()) {
      if (key == "model") g.params = model_params_from_json(value, g.params);
      else if (key == "solver") g.solver = solver_options_from_json(value, g.solver);
      else if (key == "r_c" || key == "r_g") {
        if (!value.is_number()) throw UsageError("config '" + key + "' must be a number");
      } else if (key == "format") {
        if (!value.is_string()) throw UsageError("config 'format' must be a string");
      } else {
        throw UsageError("unknown config key '" + key + "'");
      }
    }
    if (app.get_option("--r-c")->count() == 0 && g.config_json.contains("r_c"))
      g.r_c = g.config_json["r_c"].get<double>();
    if (app.get_option("--r-g")->count() == 0 && g.config_json.contains("r_g"))
      g.r_g = g.config_json["r_g"].get<double>();
  }
  if (g.G) g.params.G = *g.G;
  if (g.hbar) g.params.hbar = *g.hbar;
  if (g.m0) g.params.m0 = *g.m0;
  if (g.gamma_csl) g.params.gamma_csl = *g.gamma_csl;
  if (g.total_mass) g.params.total_mass = *g.total_mass;
  if (g.lambda || g.mass) {
    if (g.params.particles.size() != 1)
      throw UsageError("--lambda and --mass apply to a single particle; use the config file");
    if (g.lambda) g.params.particles[0].lambda = *g.lambda;
    if (g.mass) g.params.particles[0].mass = *g.mass;
  }
  if (!(g.r_c > 0.0) || !(g.r_g > 0.0)) throw UsageError("--r-c and --r-g must be positive");
  try {
    g.params.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  g.solver.r_c = g.r_c;
}

// A smearing given either as a closed-form family name or a profile file.
struct Smearing {
  std::string label;
  RadialProfile profile;
  std::shared_ptr<const Spectrum> spectrum;
  std::optional<ProfileKind> kind;
};

Smearing smearing_from(const std::string& source, double r_c) {
  Smearing s;
  s.label = source;
  std::optional<ProfileKind> kind;
  try {
    kind = profile_kind_from_string(source);
  } catch (const InvalidInput&) {
  }
  if (kind) {
    const ClosedFormProfile cf{*kind, r_c};
    s.kind = kind;
    s.profile = make_closed_form(cf);
    s.spectrum = make_spectrum(cf);
  } else {
    s.profile = load_profile(source);
    s.spectrum = make_spectrum(s.profile);
  }
  return s;
}

std::vector<double> distance_grid(double d_min, double d_max, std::size_t points) {
  if (!(d_min >= 0.0) || !(d_max > d_min) || points < 2)
    throw UsageError("distance range needs 0 <= d-min < d-max and at least 2 points");
  std::vector<double> d(points);
  for (std::size_t i = 0; i < points; ++i)
    d[i] = i + 1 == points ? d_max
                           : d_min + (d_max - d_min) * static_cast<double>(i) / (points - 1);
  return d;
}

// Output sink: the --out file or the given stream.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------
// table1

struct ModelRow {
  FunctionalKind kind;
  const char* rate;
  const char* optimum;
};

const ModelRow kRows[] = {
    {FunctionalKind::GRW, "(sum_j lambda_j/m_j) hbar^2 I[sqrt g]", "Gaussian, variance 3 r_C^2"},
    {FunctionalKind::CSL, "M m0^-2 gamma_CSL hbar^2 I[g]",
     "105/(32 pi R^7) (R^2 - r^2)^2, R = 3 r_C"},
    {FunctionalKind::DP, "M hbar G I_DP[g]", "15/(8 pi R^5) (R^2 - r^2), R = sqrt(7) r_C"},
};

double closed_form_value(FunctionalKind kind, ProfileKind profile, double r_c) {
  return evaluate_heating(kind, make_closed_form({profile, r_c})).geometric_value;
}

int cmd_table1(const Global& g, bool numeric, std::ostream& out) {
  const Format f = resolve_format(g, Format::Table);
  const auto num = f == Format::Csv ? format_number : short_number;
  Table t;
  t.header = {"model",         "heating_rate",  "optimal_profile", "support_radius",
              "gaussian_value", "optimal_value", "penalty_percent", "physical_optimal_rate"};
  if (numeric) t.header.push_back("optimizer_value");
  Json rows = Json::array();
  for (const auto& row : kRows) {
    const double gv = closed_form_value(row.kind, ProfileKind::Gaussian, g.r_c);
    const ProfileKind best = optimal_profile_kind(row.kind);
    const double ov = closed_form_value(row.kind, best, g.r_c);
    const auto support = ClosedFormProfile{best, g.r_c}.support_radius();
    HeatingValue hv;
    hv.kind = row.kind;
    hv.geometric_value = ov;
    const double phys = physical_heating_rate(row.kind, hv, g.params);
    const double penalty = 100.0 * (gv / ov - 1.0);
    std::optional<OptimizationResult> opt;
    if (numeric) opt = minimize(row.kind, g.solver);

    Json j;
    j["model"] = to_string(row.kind);
    j["heating_rate"] = row.rate;
    j["optimal_profile"] = row.optimum;
    j["support_radius"] = support ? Json(*support) : Json(nullptr);
    j["gaussian_value"] = gv;
    j["optimal_value"] = ov;
    j["penalty_percent"] = penalty;
    j["physical_optimal_rate"] = phys;
    if (opt) j["optimizer_value"] = opt->value;
    rows.push_back(j);

    std::vector<std::string> cells = {to_string(row.kind),
                                      row.rate,
                                      row.optimum,
                                      support ? num(*support) : "inf",
                                      num(gv),
                                      num(ov),
                                      num(penalty),
                                      num(phys)};
    if (opt) cells.push_back(num(opt->value));
    t.rows.push_back(std::move(cells));
  }
  if (f == Format::Json) {
    Json j;
    j["r_c"] = g.r_c;
    j["params"] = to_json(g.params);
    j["rows"] = std::move(rows);
    write_json(out, j);
  } else if (f == Format::Csv) {
    // Text cells contain commas; quote them.
    Table q = t;
    for (auto& r : q.rows)
      for (std::size_t i = 1; i <= 2; ++i) r[i] = '"' + r[i] + '"';
    q.write(out, f);
  } else {
    t.write(out, f);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string kind;
  std::optional<std::size_t> n, max_iter;
  std::optional<double> tol_constraint, tol_objective, r_max;
  std::optional<std::uint64_t> seed;
  std::string options_file;
  std::string profile_out;
};

int cmd_optimize(const Global& g, const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  const FunctionalKind kind = functional_kind_from_string(a.kind);
  SolverOptions o = g.solver;
  if (!a.options_file.empty()) {
    std::ifstream is(a.options_file);
    if (!is) throw UsageError("cannot read " + a.options_file);
    Json j;
    try {
      j = Json::parse(is);
    } catch (const Json::exception& e) {
      throw UsageError(a.options_file + ": " + e.what());
    }
    o = solver_options_from_json(j, o);
  }
  if (a.n) o.n_points = *a.n;
  if (a.max_iter) o.max_iter = *a.max_iter;
  if (a.tol_constraint) o.tol_constraint = *a.tol_constraint;
  if (a.tol_objective) o.tol_objective = *a.tol_objective;
  if (a.r_max) o.r_max = *a.r_max;
  if (a.seed) o.seed = *a.seed;
  o.r_c = g.r_c;

  const auto r = minimize(kind, o);
  const std::string path = a.profile_out.empty() ? "optimum_" + to_string(kind) + ".profile"
                                                 : a.profile_out;
  save_profile(path, r.profile);

  const Format f = resolve_format(g, Format::Json);
  if (f == Format::Json) {
    Json j = to_json(r);
    j["options"] = to_json(o);
    j["profile_file"] = path;
    write_json(out, j);
  } else {
    Table t;
    t.header = {"quantity", "value"};
    t.rows = {{"kind", to_string(kind)},
              {"value", short_number(r.value)},
              {"lambda", short_number(r.lambda)},
              {"mu", short_number(r.mu)},
              {"support_estimate", short_number(r.support_estimate)},
              {"iterations", std::to_string(r.iterations)},
              {"converged", r.converged ? "true" : "false"},
              {"norm_err", short_number(r.norm_err)},
              {"var_err", short_number(r.var_err)},
              {"profile_file", path}};
    t.write(out, f);
  }
  if (!r.converged) {
    err << "minheat: optimizer did not converge after " << r.iterations
        << " iterations (norm error " << format_number(r.norm_err) << ", variance error "
        << format_number(r.var_err) << ", value " << format_number(r.value) << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// heat

int cmd_heat(const Global& g, const std::string& kind_name, const std::string& smearing,
             std::ostream& out) {
  const FunctionalKind kind = functional_kind_from_string(kind_name);
  const auto s = smearing_from(smearing, g.r_c);
  const auto h = evaluate_heating(kind, s.profile);
  std::optional<double> phys;
  if (!h.divergent) phys = physical_heating_rate(kind, h, g.params);
  const Format f = resolve_format(g, Format::Table);
  if (f == Format::Json) {
    Json j = to_json(h);
    j["smearing"] = s.label;
    j["physical_rate"] = phys ? Json(*phys) : Json(nullptr);
    j["params"] = to_json(g.params);
    write_json(out, j);
  } else {
    Table t;
    t.header = {"kind", "smearing", "geometric_value", "divergent", "grid_points", "est_error",
                "physical_rate"};
    const auto num = f == Format::Csv ? format_number : short_number;
    t.rows.push_back({to_string(kind), s.label, num(h.geometric_value), h.divergent ? "true" : "false",
                      std::to_string(h.grid_points), num(h.est_error),
                      phys ? num(*phys) : "inf"});
    t.write(out, f);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// decohere

struct DecohereArgs {
  std::string model;
  std::string smearing = "gaussian";
  double d_min = 0.0;
  std::optional<double> d_max;
  std::size_t points = 101;
  bool closed_form = false;
  double sphere_radius = 100.0;
  double sphere_mass = 1.0;
};

int cmd_decohere(const Global& g, const DecohereArgs& a, std::ostream& out) {
  const auto s = smearing_from(a.smearing, g.r_c);
  DecoherenceCurve c;
  if (a.model == "grw" || a.model == "csl") {
    const auto ds = distance_grid(a.d_min, a.d_max.value_or(10.0 * g.r_c), a.points);
    c = a.model == "grw" ? grw_curve(s.profile, ds) : csl_curve(s.profile, ds);
  } else if (a.model == "rigid") {
    if (!(a.sphere_radius > 0.0) || !(a.sphere_mass > 0.0))
      throw UsageError("--sphere-radius and --sphere-mass must be positive");
    const auto ds = distance_grid(a.d_min, a.d_max.value_or(3.0 * a.sphere_radius), a.points);
    const auto rho = smear(MassDensity::uniform_sphere(a.sphere_mass, a.sphere_radius), s.profile);
    c.model = "rigid_csl";
    c.d = ds;
    c.rate_constant = "gamma_CSL/m0^2";
    for (double d : ds)
      c.rates.push_back(rigid_body_rate_csl(rho, d, g.params.gamma_csl, g.params.m0) /
                        (g.params.gamma_csl / (g.params.m0 * g.params.m0)));
    c.asymptote = overlap_k(rho.profile());
  } else {
    throw UsageError("unknown decoherence model '" + a.model + "' (expected grw, csl or rigid)");
  }
  if (a.closed_form && a.model == "rigid")
    throw UsageError("--closed-form applies to the grw and csl models");

  const Format f = resolve_format(g, Format::Csv);
  if (f == Format::Json) {
    Json j = to_json(c);
    j["smearing"] = s.label;
    j["r_c"] = g.r_c;
    if (a.model == "rigid") {
      j["sphere_radius"] = a.sphere_radius;
      j["sphere_mass"] = a.sphere_mass;
    }
    if (a.closed_form) {
      const double R = 3.0 * g.r_c;
      Json fg = Json::array(), fc = Json::array();
      for (double d : c.d) {
        fg.push_back(closed_form_F(FunctionalKind::GRW, d / R));
        fc.push_back(closed_form_F(FunctionalKind::CSL, d / R));
      }
      j["F_GRW"] = std::move(fg);
      j["F_CSL"] = std::move(fc);
    }
    write_json(out, j);
    return kExitOk;
  }
  if (!a.closed_form && f == Format::Csv) {
    write_curve_csv(out, c);
    return kExitOk;
  }
  Table t;
  t.header = {"d", "gamma_over_rate_constant"};
  if (a.closed_form) t.header.insert(t.header.end(), {"s", "F_GRW", "F_CSL", "residual"});
  const auto num = f == Format::Csv ? format_number : short_number;
  const FunctionalKind fk = a.model == "grw" ? FunctionalKind::GRW : FunctionalKind::CSL;
  for (std::size_t i = 0; i < c.d.size(); ++i) {
    std::vector<std::string> row{num(c.d[i]), num(c.rates[i])};
    if (a.closed_form) {
      const double sv = c.d[i] / (3.0 * g.r_c);
      const double fgv = closed_form_F(FunctionalKind::GRW, sv);
      const double fcv = closed_form_F(FunctionalKind::CSL, sv);
      const double model_f = fk == FunctionalKind::GRW ? fgv : fcv;
      row.insert(row.end(), {num(sv), num(fgv), num(fcv), num(c.rates[i] - (1.0 - model_f))});
    }
    t.rows.push_back(std::move(row));
  }
  t.write(out, f);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// hybrid

struct HybridArgs {
  std::string gc = "gaussian";
  std::string gg = "gaussian";
  std::string correlator = "pld";
  double mass = 1.0;
  double d_min = 0.0;
  std::optional<double> d_max;
  std::size_t points = 41;
  bool optimize = false;
};

int cmd_hybrid(const Global& g, const HybridArgs& a, std::ostream& out) {
  const auto& p = g.params;
  const auto sc = smearing_from(a.gc, g.r_c);
  const auto sg = smearing_from(a.gg, g.r_g);
  const auto k = default_k_grid();
  std::optional<Correlator> gamma_c, gamma_g;
  if (a.correlator == "pld") {
    auto pair = pld_correlators(sc.spectrum, sg.spectrum, p, k);
    gamma_c = std::move(pair.first);
    gamma_g = std::move(pair.second);
  } else if (a.correlator == "csl") {
    gamma_c = Correlator::csl_delta(p.gamma_csl, p.m0);
    gamma_g = gamma_g_from_gamma_c(*gamma_c, p);
  } else if (a.correlator == "dp") {
    gamma_c = Correlator::dp_coulomb(p.G, p.hbar);
    gamma_g = gamma_g_from_gamma_c(*gamma_c, p);
  } else {
    throw UsageError("unknown correlator '" + a.correlator + "' (expected pld, csl or dp)");
  }

  // Heating split: geometric functionals times hbar^2 M.
  const double pre = p.hbar * p.hbar * p.total_mass;
  auto heat = [&](const Correlator& c, const Spectrum& s) -> double {
    try {
      return pre * general_heating(c, s);
    } catch (const DivergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double e_c = heat(*gamma_c, *sc.spectrum);
  const double e_g = heat(*gamma_g, *sg.spectrum);

  const double scale = std::max(g.r_c, g.r_g);
  const auto ds = distance_grid(a.d_min, a.d_max.value_or(20.0 * scale), a.points);
  const auto curve =
      hybrid_single_particle_curve(*gamma_c, *sc.spectrum, *sg.spectrum, a.mass, ds, p);

  std::optional<HybridOptimum> best;
  if (a.optimize) best = optimize_hybrid(*gamma_c, g.r_c, g.r_g, p, g.solver);

  const Format f = resolve_format(g, Format::Json);
  if (f == Format::Json) {
    Json j;
    j["g_c"] = sc.label;
    j["g_g"] = sg.label;
    j["r_c"] = g.r_c;
    j["r_g"] = g.r_g;
    j["params"] = to_json(p);
    Json corr;
    corr["gamma_c"] = correlator_sidecar(*gamma_c);
    corr["gamma_g"] = correlator_sidecar(*gamma_g);
    std::vector<double> vc, vg, coul;
    for (double x : k) {
      vc.push_back(gamma_c->value(x));
      vg.push_back(gamma_g->value(x));
      coul.push_back(2.0 * pi * p.G / (p.hbar * x * x));
    }
    corr["k"] = k;
    corr["gamma_c_tilde"] = vc;
    corr["gamma_g_tilde"] = vg;
    corr["coulomb"] = coul;
    j["correlators"] = std::move(corr);
    Json h;
    h["E_C"] = std::isfinite(e_c) ? Json(e_c) : Json(nullptr);
    h["E_G"] = std::isfinite(e_g) ? Json(e_g) : Json(nullptr);
    h["total"] = std::isfinite(e_c + e_g) ? Json(e_c + e_g) : Json(nullptr);
    j["heating"] = std::move(h);
    j["curve"] = to_json(curve);
    j["curve"]["mass"] = a.mass;
    if (best) {
      Json o;
      o["measurement_method"] = best->measurement_method;
      o["feedback_method"] = best->feedback_method;
      o["measurement"] = to_json(best->measurement);
      o["feedback"] = to_json(best->feedback);
      o["warnings"] = best->warnings;
      j["optimum"] = std::move(o);
    }
    write_json(out, j);
  } else {
    const auto num = f == Format::Csv ? format_number : short_number;
    Table c;
    c.header = {"k", "gamma_c_tilde", "gamma_g_tilde", "coulomb"};
    for (double x : k)
      c.rows.push_back({num(x), num(gamma_c->value(x)), num(gamma_g->value(x)),
                        num(2.0 * pi * p.G / (p.hbar * x * x))});
    c.write(out, f);
    out << '\n';
    Table h;
    h.header = {"E_C", "E_G", "total"};
    h.rows.push_back({num(e_c), num(e_g), num(e_c + e_g)});
    h.write(out, f);
    out << '\n';
    Table t;
    t.header = {"d", "gamma"};
    for (std::size_t i = 0; i < curve.d.size(); ++i)
      t.rows.push_back({num(curve.d[i]), num(curve.rates[i])});
    t.write(out, f);
    if (best) {
      out << '\n';
      Table o;
      o.header = {"channel", "method", "value", "support_estimate", "converged"};
      o.rows.push_back({"measurement", best->measurement_method, num(best->measurement.value),
                        num(best->measurement.support_estimate),
                        best->measurement.converged ? "true" : "false"});
      o.rows.push_back({"feedback", best->feedback_method, num(best->feedback.value),
                        num(best->feedback.support_estimate),
                        best->feedback.converged ? "true" : "false"});
      o.write(out, f);
    }
  }
  if (best && (!best->measurement.converged || !best->feedback.converged)) return kExitNotConverged;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rearrange

int cmd_rearrange(const Global& g, const std::string& input, const std::string& profile_out,
                  std::ostream& out) {
  const auto s = smearing_from(input, g.r_c);
  const auto h = rearrange_and_rescale(s.profile);
  const auto before = check_constraints(s.profile);
  const auto after = check_constraints(h);
  if (!profile_out.empty()) save_profile(profile_out, h);
  struct Entry {
    const char* name;
    double before, after;
  };
  std::vector<Entry> entries = {{"norm", before.norm, after.norm},
                                {"variance", before.variance, after.variance}};
  for (auto kind : {FunctionalKind::GRW, FunctionalKind::CSL, FunctionalKind::DP}) {
    const auto hb = evaluate_heating(kind, s.profile);
    const auto ha = evaluate_heating(kind, h);
    static const std::map<FunctionalKind, const char*> names = {
        {FunctionalKind::GRW, "heating_grw"}, {FunctionalKind::CSL, "heating_csl"},
        {FunctionalKind::DP, "heating_dp"}};
    entries.push_back({names.at(kind),
                       hb.divergent ? std::numeric_limits<double>::infinity() : hb.geometric_value,
                       ha.divergent ? std::numeric_limits<double>::infinity() : ha.geometric_value});
  }
  const Format f = resolve_format(g, Format::Json);
  if (f == Format::Json) {
    Json j;
    j["input"] = s.label;
    for (const auto& e : entries) {
      j["before"][e.name] = std::isfinite(e.before) ? Json(e.before) : Json(nullptr);
      j["after"][e.name] = std::isfinite(e.after) ? Json(e.after) : Json(nullptr);
    }
    j["profile_file"] = profile_out.empty() ? Json(nullptr) : Json(profile_out);
    j["profile"] = to_json(h);
    write_json(out, j);
  } else {
    const auto num = f == Format::Csv ? format_number : short_number;
    Table t;
    t.header = {"quantity", "before", "after"};
    for (const auto& e : entries) t.rows.push_back({e.name, num(e.before), num(e.after)});
    t.write(out, f);
  }
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal-heating smearing distributions for collapse and hybrid gravity models",
               "minheat"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--format", g.format, "Output format: csv, json or table (alias pretty-table)")
      ->check(CLI::IsMember({"csv", "json", "table", "pretty-table"}));
  app.add_option("--out", g.out, "Write the report to this file instead of standard output");
  app.add_option("--config", g.config, "JSON file with model, solver, r_c, r_g and format");
  app.add_option("--r-c", g.r_c, "Smearing length r_C");
  app.add_option("--r-g", g.r_g, "Feedback smearing length r_G");
  app.add_option("--G", g.G, "Gravitational constant");
  app.add_option("--hbar", g.hbar, "Reduced Planck constant");
  app.add_option("--m0", g.m0, "CSL reference mass");
  app.add_option("--gamma-csl", g.gamma_csl, "CSL rate constant gamma");
  app.add_option("--lambda", g.lambda, "GRW collapse rate of the particle");
  app.add_option("--mass", g.mass, "Mass of the particle (GRW prefactor)");
  app.add_option("--total-mass", g.total_mass, "Total mass M");

  auto* table1 = app.add_subcommand("table1", "Heating functionals of the Gaussian and optimal smearings");
  bool numeric = false;
  table1->add_flag("--numeric", numeric, "Also run the numerical optimizer for each model");

  auto* optimize = app.add_subcommand("optimize", "Minimize a heating functional numerically");
  OptimizeArgs oa;
  optimize->add_option("--kind", oa.kind, "grw, csl or dp")->required();
  optimize->add_option("--n", oa.n, "Number of grid points");
  optimize->add_option("--max-iter", oa.max_iter, "Iteration cap");
  optimize->add_option("--tol-constraint", oa.tol_constraint, "Constraint tolerance");
  optimize->add_option("--tol-objective", oa.tol_objective, "Stationarity tolerance");
  optimize->add_option("--r-max", oa.r_max, "Grid radius in units of r_C");
  optimize->add_option("--seed", oa.seed, "Seed for a perturbed starting point");
  optimize->add_option("--options", oa.options_file, "Solver options as JSON");
  optimize->add_option("--profile-out", oa.profile_out, "Profile file to write");

  auto* heat = app.add_subcommand("heat", "Geometric heating functional of a smearing");
  std::string heat_kind, heat_smearing = "gaussian";
  heat->add_option("--kind", heat_kind, "grw, csl or dp")->required();
  heat->add_option("--smearing", heat_smearing, "gaussian, csl, dp or a profile file");

  auto* decohere = app.add_subcommand("decohere", "Spatial decoherence rate curve");
  DecohereArgs da;
  decohere->add_option("--model", da.model, "grw, csl or rigid")->required();
  decohere->add_option("--smearing", da.smearing, "gaussian, csl, dp or a profile file");
  decohere->add_option("--d-min", da.d_min, "Smallest separation");
  decohere->add_option("--d-max", da.d_max, "Largest separation");
  decohere->add_option("--points", da.points, "Number of separations");
  decohere->add_flag("--closed-form", da.closed_form, "Add the overlap polynomial columns");
  decohere->add_option("--sphere-radius", da.sphere_radius, "Rigid sphere radius");
  decohere->add_option("--sphere-mass", da.sphere_mass, "Rigid sphere mass");

  auto* hybrid = app.add_subcommand("hybrid", "Hybrid measurement and feedback model");
  HybridArgs ha;
  hybrid->add_option("--gc", ha.gc, "Measurement smearing: gaussian, csl, dp or a profile file");
  hybrid->add_option("--gg", ha.gg, "Feedback smearing: gaussian, csl, dp or a profile file");
  hybrid->add_option("--correlator", ha.correlator, "pld, csl or dp");
  hybrid->add_option("--particle-mass", ha.mass, "Particle mass in the decoherence curve");
  hybrid->add_option("--d-min", ha.d_min, "Smallest separation");
  hybrid->add_option("--d-max", ha.d_max, "Largest separation");
  hybrid->add_option("--points", ha.points, "Number of separations");
  hybrid->add_flag("--optimize", ha.optimize, "Also minimize both heating terms");

  auto* rearrange = app.add_subcommand("rearrange", "Symmetric decreasing rearrangement");
  std::string rearrange_in, rearrange_out;
  rearrange->add_option("--profile", rearrange_in, "gaussian, csl, dp or a profile file")->required();
  rearrange->add_option("--profile-out", rearrange_out, "Profile file to write");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    load_config(g, app);
    Sink sink(g.out, out);
    if (*table1) return cmd_table1(g, numeric, *sink);
    if (*optimize) return cmd_optimize(g, oa, *sink, err);
    if (*heat) return cmd_heat(g, heat_kind, heat_smearing, *sink);
    if (*decohere) return cmd_decohere(g, da, *sink);
    if (*hybrid) return cmd_hybrid(g, ha, *sink);
    if (*rearrange) return cmd_rearrange(g, rearrange_in, rearrange_out, *sink);
  } catch (const UsageError& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PldUndefined& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitModelUndefined;
  } catch (const InversionError& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitModelUndefined;
  } catch (const DivergenceError& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitModelUndefined;
  } catch (const FormatError& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "minheat: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace minheat
