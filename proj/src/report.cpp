#include "jtrace/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace jtrace {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// nlohmann writes the shortest string that parses back to the same double.
std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string spectrum_csv(const SpectralData& sd) {
  std::ostringstream os;
  os << "index,lambda,mass,residual_F,residual_matrix,refined\n";
  for (std::size_t j = 0; j < sd.lambdas.size(); ++j) {
    os << j << ',' << format_double(sd.lambdas[j]) << ',' << format_double(sd.masses[j]) << ','
       << format_double(sd.residual_F[j]) << ',' << format_double(sd.residual_matrix[j]) << ','
       << (sd.refined[j] ? 1 : 0) << '\n';
  }
  return os.str();
}

json spectrum_json(const SpectralData& sd) {
  json rows = json::array();
  for (std::size_t j = 0; j < sd.lambdas.size(); ++j) {
    rows.push_back({{"index", j},
                    {"lambda", json_number(sd.lambdas[j])},
                    {"lambda_lo", json_number(sd.lambdas_lo[j])},
                    {"section_lambda", json_number(sd.section_lambdas[j])},
                    {"mass", json_number(sd.masses[j])},
                    {"mass_fallback", static_cast<bool>(sd.mass_fallback[j])},
                    {"residual_F", json_number(sd.residual_F[j])},
                    {"residual_F_bound", json_number(sd.residual_F_bound[j])},
                    {"residual_matrix", json_number(sd.residual_matrix[j])},
                    {"refined", static_cast<bool>(sd.refined[j])}});
  }
  return {{"eigenvalues", rows},
          {"N_used", sd.N_used},
          {"gamma", json_number(sd.gamma)},
          {"trace", json_number(sd.trace)},
          {"tail_estimate", json_number(sd.tail_estimate)},
          {"completeness_defect", json_number(sd.completeness_defect)},
          {"tol", json_number(sd.tol)}};
}

namespace {
double mass_defect(const SpectralData& sd) {
  double s = 0.0;
  for (double m : sd.masses) s += m;
  return std::abs(s - 1.0);
}
}  // namespace

std::string measure_csv(const SpectralData& sd) {
  std::ostringstream os;
  os << "index,lambda,mass,fallback\n";
  for (std::size_t j = 0; j < sd.lambdas.size(); ++j) {
    os << j << ',' << format_double(sd.lambdas[j]) << ',' << format_double(sd.masses[j]) << ','
       << (sd.mass_fallback[j] ? 1 : 0) << '\n';
  }
  return os.str();
}

json measure_json(const SpectralData& sd) {
  json rows = json::array();
  for (std::size_t j = 0; j < sd.lambdas.size(); ++j) {
    rows.push_back({{"index", j},
                    {"lambda", json_number(sd.lambdas[j])},
                    {"mass", json_number(sd.masses[j])},
                    {"fallback", static_cast<bool>(sd.mass_fallback[j])}});
  }
  return {{"measure", rows}, {"mass_sum_defect", json_number(mass_defect(sd))}};
}

std::string poly_csv(const std::vector<PolyRow>& rows) {
  std::ostringstream os;
  os << "n,x,recurrence,explicit\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.x) << ',' << format_double(r.recurrence) << ','
       << format_double(r.explicit_value) << '\n';
  }
  return os.str();
}

json poly_json(const std::vector<PolyRow>& rows, const std::vector<double>& coeffs) {
  json vals = json::array();
  for (const auto& r : rows) {
    vals.push_back({{"n", r.n},
                    {"x", json_number(r.x)},
                    {"recurrence", json_number(r.recurrence)},
                    {"explicit", json_number(r.explicit_value)}});
  }
  json c = json::array();
  for (double v : coeffs) c.push_back(json_number(v));
  return {{"values", vals}, {"coefficients", c}};
}

std::string qlaguerre_csv(const std::vector<QLaguerreRow>& rows) {
  std::ostringstream os;
  os << "z,F_bessel,F_phi01,F_series,W_closed,W_series\n";
  for (const auto& r : rows) {
    os << format_double(r.z) << ',' << format_double(r.F_bessel) << ',' << format_double(r.F_phi01) << ','
       << format_double(r.F_series) << ',' << format_double(r.W_closed) << ',' << format_double(r.W_series) << '\n';
  }
  return os.str();
}

json qlaguerre_json(const std::vector<QLaguerreRow>& rows, const std::vector<double>& bessel_lambdas,
                    const std::vector<double>& eigenvalues) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"z", json_number(r.z)},
                   {"F_bessel", json_number(r.F_bessel)},
                   {"F_phi01", json_number(r.F_phi01)},
                   {"F_series", json_number(r.F_series)},
                   {"W_closed", json_number(r.W_closed)},
                   {"W_series", json_number(r.W_series)}});
  }
  json roots = json::array();
  for (std::size_t j = 0; j < bessel_lambdas.size(); ++j) {
    json row = {{"index", j}, {"from_bessel_root", json_number(bessel_lambdas[j])}};
    if (j < eigenvalues.size()) row["eigenvalue"] = json_number(eigenvalues[j]);
    roots.push_back(row);
  }
  return {{"closed_forms", out}, {"roots", roots}};
}

bool identity_passes(const IdentityReport& r, double slack) { return r.abs_err <= r.trunc_bound + slack; }

json identity_json(const IdentityReport& r, double slack) {
  const IdentityParams& p = r.params;
  json params = {{"q", json_number(p.q)}};
  switch (r.id) {
    case IdentityId::BASIC:
      params["r"] = p.r;
      params["w"] = json_number(p.w);
      break;
    case IdentityId::PHI10:
    case IdentityId::LEMMA1:
      params["m"] = p.m;
      params["w"] = json_number(p.w);
      break;
    case IdentityId::DENOM:
      params["m"] = p.m;
      params["a"] = json_number(p.a);
      break;
    case IdentityId::CHAIN_OPEN:
    case IdentityId::CHAIN_CLOSED:
      params["c"] = p.c;
      break;
    case IdentityId::SYNCHRO:
      params["a"] = json_number(p.a);
      params["s"] = p.s;
      break;
  }
  return {{"identity_id", identity_name(r.id)},
          {"params", params},
          {"lhs", json_number(r.lhs)},
          {"rhs", json_number(r.rhs)},
          {"abs_err", json_number(r.abs_err)},
          {"rel_err", json_number(r.rel_err)},
          {"trunc_bound", json_number(r.trunc_bound)},
          {"depth", r.depth},
          {"pass", identity_passes(r, slack)}};
}

std::string identities_csv(const std::vector<IdentityReport>& reports, double slack) {
  std::ostringstream os;
  os << "id,q,lhs,rhs,abs_err,rel_err,trunc_bound,depth,pass\n";
  for (const auto& r : reports) {
    os << identity_name(r.id) << ',' << format_double(r.params.q) << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << format_double(r.abs_err) << ',' << format_double(r.rel_err) << ','
       << format_double(r.trunc_bound) << ',' << r.depth << ',' << (identity_passes(r, slack) ? 1 : 0) << '\n';
  }
  return os.str();
}

json identities_json(const std::vector<IdentityReport>& reports, double slack) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(identity_json(r, slack));
  return {{"identities", arr}};
}

}  // namespace jtrace
