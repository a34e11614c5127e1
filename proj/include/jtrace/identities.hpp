#pragma once

// Summation identities behind the q-Laguerre closed forms, checked at finite
// truncation.  Every left-hand side is a nested sum over ordered indices,
// evaluated by prefix-sum recursion over the innermost index so the cost is
// linear in the truncation depth.  The depth is the smallest one whose
// certified tail bound drops below the requested tolerance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jtrace {

enum class IdentityId { BASIC, PHI10, LEMMA1, DENOM, CHAIN_OPEN, CHAIN_CLOSED, SYNCHRO };

/// Alphabetical, the order used for output.
std::vector<IdentityId> all_identities();
std::string identity_name(IdentityId id);
std::optional<IdentityId> parse_identity(const std::string& name);

struct IdentityParams {
  double q = 0.5;
  int r = 1;               // BASIC
  double w = 0.0;          // BASIC, PHI10, LEMMA1
  int m = 1;               // PHI10, LEMMA1, DENOM; chain and SYNCHRO depth follow c and s
  double a = 1.0;          // DENOM, SYNCHRO
  std::vector<double> c;   // CHAIN_OPEN, CHAIN_CLOSED: c_0 .. c_m
  std::vector<int> s;      // SYNCHRO: s_1 .. s_m
};

struct IdentityReport {
  IdentityId id = IdentityId::BASIC;
  IdentityParams params;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double trunc_bound = 0.0;  // on lhs, plus the tail of any series on the right
  std::size_t depth = 0;     // truncation index of the outermost sum
};

/// Throws ParameterOutOfRange for parameters outside the identity's
/// hypotheses and TruncationTooCoarse if no depth up to the cap reaches tol.
IdentityReport check(IdentityId id, const IdentityParams& params, double tol = 1e-13);

/// `count` parameter sets drawn from a mt19937_64 stream seeded by seed and id.
std::vector<IdentityParams> draw_params(IdentityId id, std::size_t count, std::uint64_t seed);

/// Default seed for the draws.
inline constexpr std::uint64_t kIdentitySeed = 20240611;

}  // namespace jtrace
