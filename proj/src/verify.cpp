#include "jtrace/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "jtrace/entire.hpp"
#include "jtrace/errors.hpp"
#include "jtrace/identities.hpp"
#include "jtrace/polycore.hpp"
#include "jtrace/qlaguerre.hpp"
#include "jtrace/report.hpp"
#include "jtrace/spectrum.hpp"

namespace jtrace {
namespace {

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Like std::max, but a NaN (a quantity that could not be computed) sticks.
double worse(double a, double b) { return std::isnan(b) || b > a ? b : a; }

// Runs body, which returns the worst measured value; exceptions fail the check.
void run(std::vector<CheckResult>& out, const std::string& name, double threshold,
         const std::function<double()>& body) {
  CheckResult r;
  r.name = name;
  r.threshold = threshold;
  try {
    r.measured = body();
    r.passed = r.measured <= threshold;
    if (std::isnan(r.measured)) r.note = "a route returned no value";
  } catch (const std::exception& e) {
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.note = e.what();
  }
  out.push_back(std::move(r));
}

// First n eigenvalues only; the vector checks look no further than index 6.
SpectralData head(SpectralData sd, std::size_t n) {
  n = std::min(n, sd.lambdas.size());
  for (auto* v : {&sd.lambdas, &sd.lambdas_lo, &sd.section_lambdas, &sd.masses, &sd.quadrature_weights,
                  &sd.residual_F, &sd.residual_F_bound, &sd.residual_matrix}) {
    v->resize(n);
  }
  sd.mass_fallback.resize(n);
  sd.refined.resize(n);
  return sd;
}

}  // namespace

std::vector<CheckResult> run_verify(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const JacobiParams params = cfg.params();
  const std::size_t count = std::max<std::size_t>(cfg.count, 12);

  run(out, "trace_two_routes", 1e-12, [&] {
    const TraceInverse t = trace_inverse(params, 1e-16);
    return rel(t.direct.value, t.second_kind.value);
  });

  run(out, "P_at_zero", 1e-12, [&] {
    double worst = 0.0;
    const PolyEval e = eval_P(params, 30, 0.0, PolyMode::Recurrence);
    for (std::size_t n = 0; n <= 30; ++n) worst = worse(worst, rel(e.values[n], P_at_zero(params, n)));
    return worst;
  });

  run(out, "explicit_vs_recurrence", 1e-10, [&] {
    double worst = 0.0;
    for (std::size_t n = 0; n <= 25; ++n) {
      for (int i = 0; i < 20; ++i) {
        const double x = (i % 2 == 0 ? 1.0 : -1.0) * std::pow(10.0, -1.0 + 0.25 * i);
        const double r = eval_P(params, n, x, PolyMode::Recurrence).values[n];
        const double e = eval_P(params, n, x, PolyMode::Explicit).values[n];
        worst = worse(worst, rel(r, e));
      }
    }
    return worst;
  });

  SpectralData sd;
  bool have_spectrum = false;
  run(out, "completeness_defect", 1e-8, [&] {
    sd = spectrum(params, count, cfg.eig_tol, cfg.matrix_size.value_or(0));
    have_spectrum = true;
    return sd.completeness_defect;
  });

  if (have_spectrum) {
    run(out, "masses_positive_and_sum", 1e-8, [&] {
      double s = 0.0;
      for (double m : sd.masses) {
        if (!(m > 0.0)) throw MassNegative("non-positive mass");
        s += m;
      }
      return std::abs(s - 1.0);
    });

    run(out, "orthonormality", 1e-6, [&] { return orthonormality_check(params, sd, 8, 1e-6).max_deviation; });

    MassVectors mv;
    bool have_mv = false;
    run(out, "series_vs_quadrature_masses", 1e-6, [&] {
      mv = masses_and_vectors(params, head(sd, 7), 40);
      have_mv = true;
      double worst = 0.0;
      for (std::size_t j = 0; j <= 5 && j < mv.masses.size(); ++j) {
        worst = worse(worst, rel(mv.series_masses[j], mv.quadrature_masses[j]));
      }
      return worst;
    });

    if (have_mv) {
      run(out, "eigenvector_residual", 1e-8, [&] {
        double worst = 0.0;
        for (std::size_t j = 0; j <= 6 && j < mv.eigen_residuals.size(); ++j) {
          worst = worse(worst, mv.eigen_residuals[j]);
        }
        return worst;
      });
      run(out, "norm_identity", 1e-8, [&] {
        double worst = 0.0;
        for (std::size_t j = 0; j <= 6 && j < mv.norm_residuals.size(); ++j) {
          worst = worse(worst, mv.norm_residuals[j] / mv.norm_sums[j]);
        }
        return worst;
      });
    }

    run(out, "weyl_three_routes", 1e-8, [&] {
      std::vector<double> zs{0.0, -1.0, sd.gamma / 2.0};
      for (std::size_t j = 0; j + 1 < sd.lambdas.size() && j < 3; ++j) {
        zs.push_back((sd.lambdas[j] + sd.lambdas[j + 1]) / 2.0);
      }
      double worst = 0.0;
      for (double z : zs) {
        const WeylValues w = weyl(params, z, sd);
        worst = worse(worst, rel(w.poles, w.resolvent));
        if (w.series) worst = worse(worse(worst, rel(*w.series, w.poles)), rel(*w.series, w.resolvent));
      }
      return worst;
    });

    run(out, "weyl_asymptotic", 0.02, [&] {
      const WeylValues w = weyl(params, -1e6, sd);
      return std::abs(w.resolvent * 1e6 - 1.0);
    });
  }

  run(out, "wronskian", 1e-9, [&] {
    double worst = 0.0;
    for (double z : {1.0, 5.0, 10.0}) {
      const double F = char_function(params, z).value;
      const double w0 = wronskian(params, 0, z);
      for (std::size_t n = 0; n <= 10; ++n) {
        const Residual r = wronskian_residual(params, n, z);
        worst = worse(worst, r.value / std::abs(F));
        worst = worse(worst, std::abs(wronskian(params, n, z) - w0) / std::abs(F));
      }
    }
    return worst;
  });

  run(out, "char_from_wn", 1e-9, [&] {
    double worst = 0.0;
    for (double z : {0.0, 2.0, 5.0}) {
      worst = worse(worst, rel(char_from_wn(params, z, 0).value, char_function(params, z).value));
    }
    return worst;
  });

  AssociatedReport assoc;
  bool have_assoc = false;
  run(out, "associated_trace", 1e-8, [&] {
    assoc = associated_checks(params, 60);
    have_assoc = true;
    return assoc.trace_rel_diff;
  });
  if (have_assoc) run(out, "W_zeros_vs_associated", 1e-6, [&] { return assoc.zeros_max_rel_diff; });

  run(out, "identities", 0.0, [&] {
    double worst = 0.0;
    for (IdentityId id : all_identities()) {
      for (const IdentityParams& p : draw_params(id, 5, cfg.seed)) {
        const IdentityReport r = check(id, p, cfg.identity_tol);
        worst = worse(worst, r.abs_err - r.trunc_bound - 1e-10);
      }
    }
    return std::max(worst, 0.0);
  });

  if (cfg.sequence == "geometric" && have_spectrum) {
    const double q = cfg.q_value();
    run(out, "qlaguerre_F_routes", 1e-10, [&] {
      double worst = 0.0;
      const double top = sd.lambdas.at(5);
      for (int i = 0; i < 60; ++i) {
        const double z = top * std::pow(1e-6, 1.0 - i / 60.0);
        bool near_root = false;
        for (double l : sd.lambdas) near_root = near_root || std::abs(z - l) < 1e-6 * l;
        if (near_root) continue;
        const ClosedFormF f = closed_form_F(z, q);
        worst = worse(worse(worst, rel(f.via_bessel, f.via_phi01)), rel(f.via_series, f.via_phi01));
      }
      return worst;
    });
    run(out, "qlaguerre_W_routes", 1e-9, [&] {
      double worst = 0.0;
      const double w0 = closed_form_W(0.0, q).via_closed;
      for (int i = 0; i <= 60; ++i) {
        const double z = sd.lambdas.at(3) * std::pow(1e-6, i / 60.0);
        const ClosedFormW w = closed_form_W(z, q);
        worst = worse(worst, std::abs(w.via_closed - w.via_series) / std::max(std::abs(w.via_closed), w0));
      }
      return worst;
    });
    run(out, "qlaguerre_modified_vs_P", 1e-9, [&] {
      double worst = 0.0;
      for (std::size_t n = 0; n <= 12; ++n) {
        for (double x : {0.5, 3.0, 20.0, 200.0}) worst = worse(worst, modified_vs_P(n, x, q).rel_residual);
      }
      return worst;
    });
    run(out, "qbessel_roots", 1e-6, [&] {
      const std::vector<double> roots = qbessel_roots(1.0, q, 5);
      double worst = 0.0;
      for (std::size_t j = 0; j < 5; ++j) worst = worse(worst, rel(roots.at(j) * roots.at(j) / 4.0, sd.lambdas[j]));
      return worst;
    });
  }
  return out;
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  std::size_t passed = 0;
  for (const auto& c : checks) {
    passed += c.passed ? 1 : 0;
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << format_double(c.measured)
       << " <= " << format_double(c.threshold);
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
  }
  os << passed << '/' << checks.size() << " checks passed\n";
  return os.str();
}

}  // namespace jtrace
