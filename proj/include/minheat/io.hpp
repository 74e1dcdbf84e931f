#pragma once

#include "minheat/decoherence.hpp"
#include "minheat/functionals.hpp"
#include "minheat/hybrid.hpp"
#include "minheat/optimizer.hpp"
#include "minheat/params.hpp"
#include "minheat/profiles.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace minheat {

using Json = nlohmann::ordered_json;

// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double x);

// Profile files:
//   # minheat-profile v1
//   # panel_order = 2          (optional, default 2: piecewise linear)
//   # support_radius = 3       (optional)
//   r value
//   ...
// Every node of the grid is written, so reading back is exact. With
// panel_order p the rows form panels of p Lobatto nodes sharing endpoints.
void write_profile(std::ostream& os, const RadialProfile& p);
RadialProfile read_profile(std::istream& is);
void save_profile(const std::string& path, const RadialProfile& p);
RadialProfile load_profile(const std::string& path);

Json to_json(const RadialProfile& p);
Json to_json(const HeatingValue& h);
Json to_json(const OptimizationResult& r);
Json to_json(const SolverOptions& o);
Json to_json(const ModelParams& p);
Json to_json(const DecoherenceCurve& c);
// Sidecar for a correlator file: {representation, params}.
Json correlator_sidecar(const Correlator& c);

// Strict readers: unknown keys and wrong types raise FormatError. Missing
// keys keep the values already in `base`.
SolverOptions solver_options_from_json(const Json& j, SolverOptions base = {});
ModelParams model_params_from_json(const Json& j, ModelParams base = {});

// d,gamma_over_rate_constant
void write_curve_csv(std::ostream& os, const DecoherenceCurve& c);
// k,gamma_tilde on the given wavenumbers.
void write_correlator_csv(std::ostream& os, const Correlator& c, const std::vector<double>& k);

} // namespace minheat
