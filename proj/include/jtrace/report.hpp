#pragma once

// Serialization of results.  Doubles are written with 17 significant digits
// so parsing the output reproduces them bit for bit.  JSON has no NaN or
// infinity; those become null.
//
// CSV column orders:
//   spectrum    index,lambda,mass,residual_F,residual_matrix,refined
//   measure     index,lambda,mass,fallback
//   poly        n,x,recurrence,explicit
//   qlaguerre   z,F_bessel,F_phi01,F_series,W_closed,W_series
//   identities  id,q,lhs,rhs,abs_err,rel_err,trunc_bound,depth,pass

#include <string>
#include <vector>

#include <json.hpp>

#include "jtrace/identities.hpp"
#include "jtrace/polycore.hpp"
#include "jtrace/spectrum.hpp"

namespace jtrace {

/// "%.17g"; "nan", "inf", "-inf" for the non-finite values.
std::string format_double(double v);

/// Number or null.
nlohmann::json json_number(double v);

/// Serializes with the 17-digit rule.
std::string dump_json(const nlohmann::json& j);

std::string spectrum_csv(const SpectralData& sd);
nlohmann::json spectrum_json(const SpectralData& sd);

std::string measure_csv(const SpectralData& sd);
nlohmann::json measure_json(const SpectralData& sd);

struct PolyRow {
  std::size_t n = 0;
  double x = 0.0;
  double recurrence = 0.0;
  double explicit_value = 0.0;
};
std::string poly_csv(const std::vector<PolyRow>& rows);
nlohmann::json poly_json(const std::vector<PolyRow>& rows, const std::vector<double>& coeffs);

struct QLaguerreRow {
  double z = 0.0;
  double F_bessel = 0.0;
  double F_phi01 = 0.0;
  double F_series = 0.0;
  double W_closed = 0.0;
  double W_series = 0.0;
};
std::string qlaguerre_csv(const std::vector<QLaguerreRow>& rows);
nlohmann::json qlaguerre_json(const std::vector<QLaguerreRow>& rows, const std::vector<double>& bessel_lambdas,
                              const std::vector<double>& eigenvalues);

nlohmann::json identity_json(const IdentityReport& r, double slack = 1e-10);
std::string identities_csv(const std::vector<IdentityReport>& reports, double slack = 1e-10);
nlohmann::json identities_json(const std::vector<IdentityReport>& reports, double slack = 1e-10);

/// abs_err <= trunc_bound + slack.
bool identity_passes(const IdentityReport& r, double slack = 1e-10);

}  // namespace jtrace
