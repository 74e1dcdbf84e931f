#include "minheat/io.hpp"

#include "minheat/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace minheat {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw FormatError("profile line " + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

// JSON numbers cannot hold infinities; those become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

} // namespace

void write_profile(std::ostream& os, const RadialProfile& p) {
  os << "# minheat-profile v1\n";
  os << "# panel_order = " << p.grid().order() << "\n";
  if (p.support_radius()) os << "# support_radius = " << format_number(*p.support_radius()) << "\n";
  const auto r = p.grid().nodes();
  const auto v = p.values();
  for (std::size_t i = 0; i < r.size(); ++i)
    os << format_number(r[i]) << ' ' << format_number(v[i]) << '\n';
}

RadialProfile read_profile(std::istream& is) {
  std::string line;
  std::size_t no = 0;
  bool header = false;
  int order = 2;
  std::optional<double> support;
  std::vector<double> r, v;
  while (std::getline(is, line)) {
    ++no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!header) {
      if (t != "# minheat-profile v1")
        throw FormatError("profile line " + std::to_string(no) + ": expected '# minheat-profile v1'");
      header = true;
      continue;
    }
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const auto key = trim(t.substr(1, eq - 1));
      const auto value = trim(t.substr(eq + 1));
      if (key == "support_radius") {
        support = parse_double(value, no);
      } else if (key == "panel_order") {
        const double p = parse_double(value, no);
        if (p < 2 || p > 32 || p != std::floor(p))
          throw FormatError("profile line " + std::to_string(no) + ": bad panel_order");
        order = static_cast<int>(p);
      }
      continue;
    }
    std::istringstream row(t);
    std::string a, b, extra;
    if (!(row >> a >> b) || (row >> extra))
      throw FormatError("profile line " + std::to_string(no) + ": expected two columns 'r value'");
    r.push_back(parse_double(a, no));
    v.push_back(parse_double(b, no));
    if (r.size() > 1 && !(r.back() > r[r.size() - 2]))
      throw FormatError("profile line " + std::to_string(no) + ": radii must increase");
  }
  if (!header) throw FormatError("empty profile file");
  if (r.size() < 2) throw FormatError("profile needs at least two rows");
  if (r.front() != 0.0) throw FormatError("profile must start at r = 0");
  const std::size_t step = static_cast<std::size_t>(order - 1);
  if ((r.size() - 1) % step != 0)
    throw FormatError("row count does not fit panels of order " + std::to_string(order));
  std::vector<double> breaks;
  for (std::size_t i = 0; i < r.size(); i += step) breaks.push_back(r[i]);
  RadialGrid grid(std::move(breaks), order);
  const auto nodes = grid.nodes();
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(nodes[i] - r[i]) > 1e-9 * r.back())
      throw FormatError("radius " + format_number(r[i]) + " is not a Lobatto node of order " +
                        std::to_string(order));
  return RadialProfile(std::move(grid), std::move(v), support);
}

void save_profile(const std::string& path, const RadialProfile& p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot write " + path);
  write_profile(os, p);
}

RadialProfile load_profile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot read " + path);
  return read_profile(is);
}

Json to_json(const RadialProfile& p) {
  Json j;
  j["panel_order"] = p.grid().order();
  j["support_radius"] = p.support_radius() ? Json(*p.support_radius()) : Json(nullptr);
  const auto r = p.grid().nodes();
  const auto v = p.values();
  j["r"] = std::vector<double>(r.begin(), r.end());
  j["g"] = std::vector<double>(v.begin(), v.end());
  return j;
}

Json to_json(const HeatingValue& h) {
  Json j;
  j["kind"] = to_string(h.kind);
  j["geometric_value"] = number(h.geometric_value);
  j["divergent"] = h.divergent;
  j["grid_points"] = h.grid_points;
  j["est_error"] = number(h.est_error);
  return j;
}

Json to_json(const OptimizationResult& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["value"] = number(r.value);
  j["lambda"] = number(r.lambda);
  j["mu"] = number(r.mu);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["norm_err"] = number(r.norm_err);
  j["var_err"] = number(r.var_err);
  j["min_value"] = number(r.min_value);
  j["support_estimate"] = number(r.support_estimate);
  j["profile"] = to_json(r.profile);
  return j;
}

Json to_json(const SolverOptions& o) {
  Json j;
  j["n_points"] = o.n_points;
  j["tol_constraint"] = o.tol_constraint;
  j["tol_objective"] = o.tol_objective;
  j["max_iter"] = o.max_iter;
  j["r_max"] = o.r_max;
  j["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
  j["r_c"] = o.r_c;
  return j;
}

Json to_json(const ModelParams& p) {
  Json j;
  j["G"] = p.G;
  j["hbar"] = p.hbar;
  j["m0"] = p.m0;
  j["gamma_csl"] = p.gamma_csl;
  j["total_mass"] = p.total_mass;
  Json parts = Json::array();
  for (const auto& q : p.particles) parts.push_back({{"lambda", q.lambda}, {"mass", q.mass}});
  j["particles"] = std::move(parts);
  return j;
}

Json to_json(const DecoherenceCurve& c) {
  Json j;
  j["model"] = c.model;
  j["rate_constant"] = c.rate_constant;
  j["asymptote"] = number(c.asymptote);
  j["asymptote_finite"] = std::isfinite(c.asymptote);
  j["overlap_k"] = c.overlap_k ? Json(*c.overlap_k) : Json(nullptr);
  j["d"] = c.d;
  j["gamma_over_rate_constant"] = c.rates;
  return j;
}

Json correlator_sidecar(const Correlator& c) {
  Json j;
  j["representation"] = c.name();
  Json params = Json::object();
  for (const auto& [key, value] : c.params()) params[key] = value;
  j["params"] = std::move(params);
  return j;
}

namespace {

double get_number(const Json& j, const std::string& key) {
  if (!j.is_number()) throw FormatError("'" + key + "' must be a number");
  return j.get<double>();
}

std::uint64_t get_count(const Json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw FormatError("'" + key + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

} // namespace

SolverOptions solver_options_from_json(const Json& j, SolverOptions o) {
  if (!j.is_object()) throw FormatError("solver options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n_points") o.n_points = get_count(value, key);
    else if (key == "tol_constraint") o.tol_constraint = get_number(value, key);
    else if (key == "tol_objective") o.tol_objective = get_number(value, key);
    else if (key == "max_iter") o.max_iter = get_count(value, key);
    else if (key == "r_max") o.r_max = get_number(value, key);
    else if (key == "r_c") o.r_c = get_number(value, key);
    else if (key == "seed") o.seed = value.is_null() ? std::nullopt : std::optional(get_count(value, key));
    else throw FormatError("unknown solver option '" + key + "'");
  }
  return o;
}

ModelParams model_params_from_json(const Json& j, ModelParams p) {
  if (!j.is_object()) throw FormatError("model parameters must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "G") p.G = get_number(value, key);
    else if (key == "hbar") p.hbar = get_number(value, key);
    else if (key == "m0") p.m0 = get_number(value, key);
    else if (key == "gamma_csl") p.gamma_csl = get_number(value, key);
    else if (key == "total_mass") p.total_mass = get_number(value, key);
    else if (key == "particles") {
      if (!value.is_array()) throw FormatError("'particles' must be an array");
      p.particles.clear();
      for (const auto& q : value) {
        if (!q.is_object()) throw FormatError("each particle must be an object");
        Particle part;
        for (const auto& [pk, pv] : q.items()) {
          if (pk == "lambda") part.lambda = get_number(pv, pk);
          else if (pk == "mass") part.mass = get_number(pv, pk);
          else throw FormatError("unknown particle key '" + pk + "'");
        }
        p.particles.push_back(part);
      }
    } else {
      throw FormatError("unknown model parameter '" + key + "'");
    }
  }
  return p;
}

void write_curve_csv(std::ostream& os, const DecoherenceCurve& c) {
  os << "d,gamma_over_rate_constant\n";
  for (std::size_t i = 0; i < c.d.size(); ++i)
    os << format_number(c.d[i]) << ',' << format_number(c.rates[i]) << '\n';
}

void write_correlator_csv(std::ostream& os, const Correlator& c, const std::vector<double>& k) {
  os << "k,gamma_tilde\n";
  for (double x : k) os << format_number(x) << ',' << format_number(c.value(x)) << '\n';
}

} // namespace minheat
