// jspec: command-line front end.  Exit codes: 0 success, 1 usage error,
// 2 numerical failure or a check beyond tolerance.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jtrace/config.hpp"
#include "jtrace/entire.hpp"
#include "jtrace/errors.hpp"
#include "jtrace/identities.hpp"
#include "jtrace/polycore.hpp"
#include "jtrace/qlaguerre.hpp"
#include "jtrace/report.hpp"
#include "jtrace/spectrum.hpp"
#include "jtrace/verify.hpp"

using nlohmann::json;
using namespace jtrace;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Emit {
  std::string body;
  bool ok = true;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_out(const RunConfig& cfg, const std::string& body) {
  if (cfg.out_path.empty()) {
    std::cout << body;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream f(cfg.out_path);
  if (!f) throw IoError("cannot open output file '" + cfg.out_path + "'");
  f << body;
  if (!f) throw IoError("cannot write output file '" + cfg.out_path + "'");
}

Emit cmd_spectrum(const RunConfig& cfg) {
  const SpectralData sd = spectrum(cfg.params(), cfg.count, cfg.eig_tol, cfg.matrix_size.value_or(0));
  return {cfg.format == OutputFormat::Csv ? spectrum_csv(sd) : dump_json(spectrum_json(sd))};
}

Emit cmd_measure(const RunConfig& cfg) {
  const SpectralData sd = spectrum(cfg.params(), cfg.count, cfg.eig_tol, cfg.matrix_size.value_or(0));
  for (double m : sd.masses) {
    if (!(m > 0.0)) throw MassNegative("measure: non-positive mass");
  }
  return {cfg.format == OutputFormat::Csv ? measure_csv(sd) : dump_json(measure_json(sd))};
}

Emit cmd_poly(const RunConfig& cfg) {
  const JacobiParams params = cfg.params();
  std::vector<PolyRow> rows;
  std::vector<double> coeffs;
  for (double x : cfg.poly_x) {
    const PolyEval r = eval_P(params, cfg.poly_n, x, PolyMode::Recurrence);
    const PolyEval e = eval_P(params, cfg.poly_n, x, PolyMode::Explicit);
    if (coeffs.empty()) coeffs = e.coeffs;
    for (std::size_t n = 0; n <= cfg.poly_n; ++n) rows.push_back({n, x, r.values[n], e.values[n]});
  }
  return {cfg.format == OutputFormat::Csv ? poly_csv(rows) : dump_json(poly_json(rows, coeffs))};
}

Emit cmd_qlaguerre(const RunConfig& cfg) {
  const double q = cfg.q_value();
  const JacobiParams params = cfg.params();
  std::vector<double> zs = cfg.z_points;
  if (zs.empty()) zs = {0.5, 5.0, 50.0, 500.0};
  const bool pinned = cfg.trunc_order && cfg.index_cutoff;
  std::vector<QLaguerreRow> rows;
  for (double z : zs) {
    const ClosedFormF f = closed_form_F(z, q);
    const ClosedFormW w = closed_form_W(z, q);
    QLaguerreRow row{z, f.via_bessel, f.via_phi01, f.via_series, w.via_closed, w.via_series};
    if (pinned) {
      const double inf = std::numeric_limits<double>::infinity();
      row.F_series = eval_series(series_coeffs(params, SeriesId::f(), *cfg.trunc_order, *cfg.index_cutoff), z, inf).value;
      row.W_series = eval_series(series_coeffs(params, SeriesId::w(0), *cfg.trunc_order, *cfg.index_cutoff), z, inf).value;
    }
    rows.push_back(row);
  }
  if (cfg.format == OutputFormat::Csv) return {qlaguerre_csv(rows)};
  const std::size_t count = std::min<std::size_t>(std::max<std::size_t>(cfg.count, 1), 8);
  std::vector<double> from_roots;
  for (double x : qbessel_roots(1.0, q, count)) from_roots.push_back(x * x / 4.0);
  const SpectralData sd = spectrum(params, count, cfg.eig_tol);
  return {dump_json(qlaguerre_json(rows, from_roots, sd.lambdas))};
}

Emit cmd_identities(const RunConfig& cfg) {
  std::vector<IdentityReport> reports;
  if (cfg.identity && cfg.identity_params_given) {
    reports.push_back(check(*cfg.identity, cfg.identity_params, cfg.identity_tol));
  } else {
    const std::vector<IdentityId> ids = cfg.identity ? std::vector<IdentityId>{*cfg.identity} : all_identities();
    for (IdentityId id : ids) {
      for (const IdentityParams& p : draw_params(id, 5, cfg.seed)) reports.push_back(check(id, p, cfg.identity_tol));
    }
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && identity_passes(r);
  return {cfg.format == OutputFormat::Csv ? identities_csv(reports) : dump_json(identities_json(reports)), ok};
}

Emit cmd_verify(const RunConfig& cfg) {
  const std::vector<CheckResult> checks = run_verify(cfg);
  bool ok = true;
  for (const auto& c : checks) ok = ok && c.passed;
  if (cfg.format == OutputFormat::Csv) return {format_checks(checks), ok};
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"measured", json_number(c.measured)},
                   {"threshold", json_number(c.threshold)},
                   {"note", c.note}});
  }
  return {dump_json({{"checks", arr}, {"all_passed", ok}}), ok};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and orthogonality measures of Jacobi operators with summable 1/a_n"};
  app.require_subcommand(1);

  std::string config_path, seq, format, out, id_name, params_json;
  double q = 0, k = 0, c = 0, p = 0, tol = 0, w = 0, a = 0;
  std::size_t count = 0, trunc_order = 0, index_cutoff = 0, matrix_size = 0, poly_n = 0;
  std::uint64_t seed = 0;
  int r = 0, m = 0;
  std::vector<double> c_vec, xs, zs;
  std::vector<int> s_vec;

  auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override it");
  auto* o_seq = app.add_option("--seq", seq, "Sequence: geometric | powerlaw");
  auto* o_q = app.add_option("--q", q, "q for the geometric sequence (k = sqrt(q))");
  auto* o_k = app.add_option("--k", k, "k in (0,1) for the powerlaw sequence");
  auto* o_c = app.add_option("--c", c, "powerlaw constant c");
  auto* o_p = app.add_option("--p", p, "powerlaw exponent p > 1");
  auto* o_count = app.add_option("--count", count, "number of eigenvalues");
  auto* o_tol = app.add_option("--tol", tol, "tolerance for every stage");
  auto* o_M = app.add_option("--trunc-order", trunc_order, "series order M (qlaguerre series route)");
  auto* o_J = app.add_option("--index-cutoff", index_cutoff, "chain index cutoff J (qlaguerre series route)");
  auto* o_N = app.add_option("--matrix-size", matrix_size, "initial section size N");
  auto* o_out = app.add_option("--out", out, "output path (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv | json");
  auto* o_seed = app.add_option("--seed", seed, "seed for identity parameter draws");
  auto* o_id = app.add_option("--id", id_name, "identity id");
  auto* o_params = app.add_option("--params", params_json, "identity parameters as JSON");
  auto* o_r = app.add_option("--r", r, "identity parameter r");
  auto* o_w = app.add_option("--w", w, "identity parameter w");
  auto* o_m = app.add_option("--m", m, "identity parameter m");
  auto* o_a = app.add_option("--a", a, "identity parameter a");
  auto* o_cvec = app.add_option("--c-vec", c_vec, "chain exponents c_0 .. c_m");
  auto* o_svec = app.add_option("--s", s_vec, "SYNCHRO exponents s_1 .. s_m");
  auto* o_n = app.add_option("--n", poly_n, "polynomial degree (poly)");
  auto* o_x = app.add_option("--x", xs, "evaluation points (poly)");
  auto* o_z = app.add_option("--z", zs, "evaluation points (qlaguerre)");

  auto* s_spectrum = app.add_subcommand("spectrum", "eigenvalues, masses and residuals");
  auto* s_measure = app.add_subcommand("measure", "eigenvalues and masses of the orthogonality measure");
  auto* s_poly = app.add_subcommand("poly", "P_n by recurrence and by the explicit expansion");
  auto* s_ql = app.add_subcommand("qlaguerre", "closed-form cross-checks for the geometric sequence");
  auto* s_id = app.add_subcommand("identities", "summation identity reports");
  auto* s_verify = app.add_subcommand("verify", "full invariant suite");
  for (auto* s : {s_spectrum, s_measure, s_poly, s_ql, s_id, s_verify}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  try {
    json flags = json::object();
    if (*o_seq) flags["sequence"]["kind"] = seq;
    if (*o_q) flags["sequence"]["q"] = q;
    if (*o_k) flags["sequence"]["k"] = k;
    if (*o_q && *o_k) throw UsageError("--q and --k are mutually exclusive");
    if (*o_c) flags["sequence"]["c"] = c;
    if (*o_p) flags["sequence"]["p"] = p;
    if (*o_count) flags["count"] = count;
    if (*o_tol) flags["tolerances"] = {{"eval", tol}, {"eig", tol}, {"identity", tol}};
    if (*o_M) flags["truncation"]["M"] = trunc_order;
    if (*o_J) flags["truncation"]["J"] = index_cutoff;
    if (*o_N) flags["truncation"]["N"] = matrix_size;
    if (*o_out) flags["output"]["path"] = out;
    if (*o_format) flags["output"]["format"] = format;
    if (*o_seed) flags["seed"] = seed;
    if (*o_params) {
      try {
        flags["identity"] = json::parse(params_json);
      } catch (const json::parse_error&) {
        throw UsageError("--params must be a JSON object");
      }
      if (!flags["identity"].is_object()) throw UsageError("--params must be a JSON object");
    }
    if (*o_id) flags["identity"]["id"] = id_name;
    if (*o_r) flags["identity"]["r"] = r;
    if (*o_w) flags["identity"]["w"] = w;
    if (*o_m) flags["identity"]["m"] = m;
    if (*o_a) flags["identity"]["a"] = a;
    if (*o_cvec) flags["identity"]["c"] = c_vec;
    if (*o_svec) flags["identity"]["s"] = s_vec;
    if (*o_n) flags["poly"]["n"] = poly_n;
    if (*o_x) flags["poly"]["x"] = xs;
    if (*o_z) flags["z"] = zs;

    std::optional<json> file;
    if (*o_config) file = read_config_file(config_path);
    cfg = load_config(file, flags);
    (void)cfg.params();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    Emit result;
    if (*s_spectrum) result = cmd_spectrum(cfg);
    else if (*s_measure) result = cmd_measure(cfg);
    else if (*s_poly) result = cmd_poly(cfg);
    else if (*s_ql) result = cmd_qlaguerre(cfg);
    else if (*s_id) result = cmd_identities(cfg);
    else result = cmd_verify(cfg);
    write_out(cfg, result.body);
    return result.ok ? kOk : kNumerical;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
