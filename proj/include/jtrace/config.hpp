#pragma once

// Run configuration for the command-line tool.  A config file is one JSON
// document with the layout below; flags are folded into a second document of
// the same shape and merged on top, so flags win.
//
//   {
//     "sequence":    {"kind": "geometric" | "powerlaw", "q": .., "k": .., "c": .., "p": ..},
//     "count": 8,
//     "truncation":  {"M": .., "J": .., "N": ..},
//     "tolerances":  {"eval": 1e-12, "eig": 1e-12, "identity": 1e-13},
//     "output":      {"format": "csv" | "json", "path": ".."},
//     "seed": ..,
//     "identity":    {"id": "BASIC", "q": .., "r": .., "w": .., "m": .., "a": .., "c": [..], "s": [..]},
//     "poly":        {"n": .., "x": [..]},
//     "z":           [..]
//   }

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jtrace/identities.hpp"
#include "jtrace/sequences.hpp"

namespace jtrace {

/// Malformed or inconsistent configuration; the message names the field.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string sequence = "geometric";
  std::optional<double> q;  // q-Laguerre mode: k = sqrt(q)
  std::optional<double> k;  // general mode
  double c = 1.0;
  double p = 2.0;
  std::size_t count = 8;

  std::optional<std::size_t> trunc_order;   // M
  std::optional<std::size_t> index_cutoff;  // J
  std::optional<std::size_t> matrix_size;   // N; adaptive when unset

  double eval_tol = 1e-12;
  double eig_tol = 1e-12;
  double identity_tol = 1e-13;

  OutputFormat format = OutputFormat::Csv;
  std::string out_path;  // empty: stdout

  std::uint64_t seed = kIdentitySeed;

  std::optional<IdentityId> identity;  // empty: every identity
  IdentityParams identity_params;
  bool identity_params_given = false;  // otherwise random draws

  std::size_t poly_n = 5;
  std::vector<double> poly_x{0.0, 1.0, 10.0};
  std::vector<double> z_points;

  /// The Jacobi family selected by the sequence fields.
  [[nodiscard]] JacobiParams params() const;
  /// q-Laguerre parameter (geometric sequence only).
  [[nodiscard]] double q_value() const;
};

/// Builds a validated config: defaults, then `file` (if any), then `flags`.
/// A q or k in `flags` replaces both q and k from the file.
RunConfig load_config(const std::optional<nlohmann::json>& file, const nlohmann::json& flags);

/// Reads and parses a JSON config file; UsageError when missing or malformed.
nlohmann::json read_config_file(const std::string& path);

}  // namespace jtrace
