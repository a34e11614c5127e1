// Acceptance run: one PASS/FAIL line per criterion.  Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "brute.hpp"
#include "jtrace/entire.hpp"
#include "jtrace/identities.hpp"
#include "jtrace/polycore.hpp"
#include "jtrace/qlaguerre.hpp"
#include "jtrace/spectrum.hpp"

using namespace jtrace;

namespace {

const double kQuarter = 0.25;
const JacobiParams kQ(SequenceSpec::geometric(kQuarter), 0.5);

double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// (x;q)_n by the definition, in long double.
long double poch(long double x, long double q, int n) {
  long double p = 1.0L;
  for (int i = 0; i < n; ++i) p *= 1.0L - x * std::pow(q, static_cast<long double>(i));
  return p;
}

struct Line {
  bool ok = true;
  std::string detail;

  // Records "name=value<=limit" and folds it into ok.
  void le(const std::string& name, double value, double limit) {
    const bool pass = value <= limit;
    ok = ok && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g<=%.0e", detail.empty() ? "" : ", ", name.c_str(), value, limit);
    detail += buf;
  }
  void flag(const std::string& name, bool pass) {
    ok = ok && pass;
    detail += (detail.empty() ? "" : ", ") + name + (pass ? "=yes" : "=NO");
  }
};

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Line&)>& body) {
  Line line;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(line);
  } catch (const std::exception& e) {
    line.ok = false;
    line.detail += std::string(line.detail.empty() ? "" : ", ") + "exception: " + e.what();
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!line.ok) ++failures;
  std::printf("%s %2d %s: %s [%.0f ms]\n", line.ok ? "PASS" : "FAIL", id, title, line.detail.c_str(), ms);
  std::fflush(stdout);
}

}  // namespace

int main() {
  const SpectralData sd12 = spectrum(kQ, 12, 1e-13);

  criterion(1, "trace identity", [](Line& l) {
    l.le("trace_rel", rel(trace_inverse(kQ, 1e-16).value(), 4.0 / 45.0), 1e-12);
    const SpectralData sd = spectrum(kQ, 8, 1e-12);
    l.le("completeness_defect", sd.completeness_defect, 1e-8);
  });

  criterion(2, "explicit vs recurrence", [](Line& l) {
    double worst = 0.0;
    for (std::size_t n = 0; n <= 25; ++n) {
      for (int i = 0; i < 20; ++i) {
        const double x = (i < 10 ? -1.0 : 1.0) * std::pow(10.0, -1.0 + 0.6 * (i % 10));
        worst = std::max(worst, rel(eval_P(kQ, n, x, PolyMode::Recurrence).values[n],
                                    eval_P(kQ, n, x, PolyMode::Explicit).values[n]));
      }
    }
    l.le("max_rel", worst, 1e-10);
    double p2 = 0.0;
    for (double x : {-50.0, -1.0, 0.0, 0.3, 11.0, 24.0, 600.0}) {
      const double expect = x * x / 720.0 - 17.0 * x / 48.0 + 4.0;
      for (PolyMode mode : {PolyMode::Recurrence, PolyMode::Explicit}) {
        p2 = std::max(p2, std::abs(eval_P(kQ, 2, x, mode).values[2] - expect) / std::max(1.0, std::abs(expect)));
      }
    }
    l.le("P2", p2, 1e-12);
  });

  criterion(3, "values at zero", [](Line& l) {
    double worst = 0.0;
    const PolyEval r = eval_P(kQ, 30, 0.0, PolyMode::Recurrence);
    for (std::size_t n = 0; n <= 30; ++n) worst = std::max(worst, rel(r.values[n], std::pow(-2.0, static_cast<double>(n))));
    l.le("max_rel", worst, 1e-12);
  });

  criterion(4, "orthonormality", [&](Line& l) {
    l.le("max_dev", orthonormality_check(kQ, sd12, 8, 1e-6).max_deviation, 1e-6);
    double s = 0.0;
    for (double m : sd12.masses) s += m;
    l.le("mass_sum_defect", std::abs(s - 1.0), 1e-8);
  });

  criterion(5, "masses", [&](Line& l) {
    bool positive = true;
    for (double m : sd12.masses) positive = positive && m > 0.0;
    l.flag("all_positive", positive);
    const MassVectors mv = masses_and_vectors(kQ, sd12, 40);
    double worst = 0.0;
    for (std::size_t j = 0; j <= 5; ++j) worst = std::max(worst, rel(mv.series_masses[j], mv.quadrature_masses[j]));
    l.le("series_vs_quadrature", worst, 1e-6);
  });

  criterion(6, "Wronskian", [](Line& l) {
    double res = 0.0, drift = 0.0;
    for (double z : {1.0, 5.0, 10.0}) {
      const double F = std::abs(char_function(kQ, z).value);
      const double w0 = wronskian(kQ, 0, z);
      for (std::size_t n = 0; n <= 10; ++n) {
        res = std::max(res, wronskian_residual(kQ, n, z).value / F);
        drift = std::max(drift, std::abs(wronskian(kQ, n, z) - w0) / F);
      }
    }
    l.le("residual/|F|", res, 1e-9);
    l.le("constancy/|F|", drift, 1e-9);
  });

  criterion(7, "eigenvector and norm identity", [&](Line& l) {
    const MassVectors mv = masses_and_vectors(kQ, sd12, 40);
    double eig = 0.0, norm = 0.0;
    for (std::size_t j = 0; j <= 6; ++j) {
      eig = std::max(eig, mv.eigen_residuals[j]);
      norm = std::max(norm, mv.norm_residuals[j] / mv.norm_sums[j]);
    }
    l.le("eigen_residual", eig, 1e-8);
    l.le("norm_identity", norm, 1e-8);
  });

  criterion(8, "Weyl function routes", [&](Line& l) {
    std::vector<double> zs{0.0, -1.0, sd12.gamma / 2.0};
    for (std::size_t j = 0; j < 3; ++j) zs.push_back((sd12.lambdas[j] + sd12.lambdas[j + 1]) / 2.0);
    double worst = 0.0;
    bool series_everywhere = true;
    for (double z : zs) {
      const WeylValues w = weyl(kQ, z, sd12);
      worst = std::max(worst, rel(w.poles, w.resolvent));
      if (w.series) {
        worst = std::max({worst, rel(*w.series, w.poles), rel(*w.series, w.resolvent)});
      } else {
        series_everywhere = false;
      }
    }
    l.flag("series_route_available", series_everywhere);
    l.le("pairwise_rel", worst, 1e-8);
    const WeylValues far = weyl(kQ, -1e6, sd12);
    double asym = std::max(std::abs(far.poles * 1e6 - 1.0), std::abs(far.resolvent * 1e6 - 1.0));
    if (far.series) asym = std::max(asym, std::abs(*far.series * 1e6 - 1.0));
    l.le("w(-1e6)*1e6-1", asym, 0.02);
  });

  criterion(9, "characteristic function from w_n(0)", [](Line& l) {
    double worst = 0.0;
    for (double z : {0.0, 2.0, 5.0}) {
      const PowerSeriesApprox f = make_series(kQ, SeriesId::f(), std::abs(z), 1e-15);
      worst = std::max(worst, rel(char_from_wn(kQ, z, 0).value, eval_series(f, z).value));
    }
    l.le("max_rel", worst, 1e-9);
  });

  criterion(10, "summation identities", [](Line& l) {
    double worst = -HUGE_VAL;
    std::size_t runs = 0;
    for (IdentityId id : all_identities()) {
      for (const IdentityParams& p : draw_params(id, 5, kIdentitySeed)) {
        const IdentityReport r = check(id, p, 1e-13);
        worst = std::max(worst, r.abs_err - r.trunc_bound);
        ++runs;
      }
    }
    l.flag("35_draws", runs == 35);
    l.le("max(abs_err-trunc_bound)", worst, 1e-10);
  });

  criterion(11, "q-Laguerre closed forms", [&](Line& l) {
    double coef = 0.0;
    for (double q : {0.2, 0.5, 0.8}) {
      const JacobiParams p(SequenceSpec::geometric(q), std::sqrt(q));
      const PowerSeriesApprox s = series_coeffs(p, SeriesId::f(), 12, 200);
      for (int m = 0; m <= 12; ++m) {
        const long double expect = std::pow(static_cast<long double>(q), static_cast<long double>(m * (m + 1))) /
                                   (poch(q, q, m) * poch(static_cast<long double>(q) * q, q, m));
        coef = std::max(coef, rel(s.coeff(static_cast<std::size_t>(m)), static_cast<double>(expect)));
      }
    }
    l.le("F_coeff_rel", coef, 1e-12);

    // (0, lambda_5), log-spaced, skipping 1e-6 windows around the zeros of F
    double f3 = 0.0;
    std::size_t f_points = 0;
    for (int i = 0; i < 240; ++i) {
      const double z = sd12.lambdas[5] * std::pow(10.0, -6.0 * (1.0 - i / 240.0));
      bool near = false;
      for (double lam : sd12.lambdas) near = near || std::abs(z - lam) < 1e-6 * lam;
      if (near) continue;
      const ClosedFormF f = closed_form_F(z, kQuarter);
      f3 = std::max({f3, rel(f.via_bessel, f.via_phi01), rel(f.via_series, f.via_phi01), rel(f.via_bessel, f.via_series)});
      ++f_points;
    }
    l.le("F_three_routes", f3, 1e-10);

    // (0, lambda_3], skipping 1e-6 windows around the zeros of W
    const AssociatedReport assoc = associated_checks(kQ, 60, 3);
    double w2 = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double z = sd12.lambdas[3] * std::pow(10.0, -6.0 * i / 200.0);
      bool near = false;
      for (double zero : assoc.associated_eigenvalues) near = near || std::abs(z - zero) < 1e-6 * zero;
      if (near) continue;
      const ClosedFormW w = closed_form_W(z, kQuarter);
      w2 = std::max(w2, rel(w.via_closed, w.via_series));
    }
    l.le("W_two_routes", w2, 1e-9);
  });

  criterion(12, "modified q-Laguerre relations", [](Line& l) {
    double vsP = 0.0, ident = 0.0, recur = 0.0;
    for (std::size_t n = 0; n <= 12; ++n) {
      for (double x : {0.1, 1.0, 11.0, 100.0, 3000.0}) {
        const ModifiedVsP r = modified_vs_P(n, x, kQuarter);
        vsP = std::max({vsP, r.rel_residual, r.recurrence_residual});
        if (n <= 10) {
          ident = std::max(ident, l0_l1_residual(n, x, kQuarter));
          recur = std::max(recur, l0_recurrence_residual(n, x, kQuarter));
        }
      }
    }
    l.le("modified_vs_P", vsP, 1e-9);
    l.le("L0_L1_identity", ident, 1e-12);
    l.le("L0_recurrence", recur, 1e-12);
    std::vector<double> errs;
    for (double q : {0.9, 0.99, 0.999}) {
      double e = 0.0;
      for (std::size_t n = 1; n <= 6; ++n) {
        for (double x : {0.25, 1.0, 3.0}) e = std::max(e, std::abs(q_laguerre(n, 0, x * (1.0 - q), q) - classical_laguerre(n, x)));
      }
      errs.push_back(e);
    }
    l.flag("classical_limit_monotone", errs[1] < errs[0] && errs[2] < errs[1]);
  });

  criterion(13, "q-Bessel roots", [&](Line& l) {
    const std::vector<double> roots = qbessel_roots(1.0, kQuarter, 5);
    double worst = roots.size() == 5 ? 0.0 : HUGE_VAL;
    for (std::size_t j = 0; j < roots.size(); ++j) worst = std::max(worst, rel(roots[j] * roots[j] / 4.0, sd12.lambdas[j]));
    l.le("max_rel", worst, 1e-6);
  });

  criterion(14, "associated operator", [](Line& l) {
    const AssociatedReport r = associated_checks(kQ, 60, 5);
    l.le("trace_formula_vs_direct", r.trace_rel_diff, 1e-8);
    l.le("W_zeros_vs_eigenvalues", r.zeros_max_rel_diff, 1e-6);
  });

  criterion(15, "oracle equivalence", [](Line& l) {
    double worst = 0.0;
    for (const JacobiParams& p : {kQ, JacobiParams(SequenceSpec::power_law(1.0, 2.0), 0.6)}) {
      for (std::size_t J = 1; J <= 12; ++J) {
        const std::vector<double> a = p.seq().values(J + 1);
        const std::size_t M = std::min<std::size_t>(3, J);
        const PowerSeriesApprox f = series_coeffs(p, SeriesId::f(), M, J);
        for (std::size_t m = 0; m <= M; ++m) worst = std::max(worst, rel(f.coeff(m), brute::f_coeff(a, p.k(), m, J)));
        for (std::size_t n = 0; n < J && n <= 2; ++n) {
          const PowerSeriesApprox w = series_coeffs(p, SeriesId::w(n), M, J);
          for (std::size_t m = 0; m <= M && n + m <= J; ++m) {
            worst = std::max(worst, rel(w.coeff(m), brute::w_coeff(a, p.k(), n, m, J)));
          }
        }
      }
    }
    l.le("dp_vs_brute", worst, 1e-14);
    bool interlaced = true;
    for (std::size_t N = 1; N < 30; ++N) {
      const auto small = section_eigenvalues(truncate(kQ, N), N, 0.0);
      const auto big = section_eigenvalues(truncate(kQ, N + 1), N + 1, 0.0);
      for (std::size_t j = 0; j < N; ++j) interlaced = interlaced && big[j] <= small[j] && small[j] <= big[j + 1];
    }
    l.flag("interlacing_N<=30", interlaced);
  });

  std::printf("%d of 15 criteria failed\n", failures);
  return failures;
}
