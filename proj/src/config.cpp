#include "jtrace/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace jtrace {
namespace {

using nlohmann::json;

template <class T>
T get_as(const json& node, const std::string& field) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config field '" + field + "' has the wrong type");
  }
}

template <class T>
std::optional<T> maybe(const json& parent, const char* key, const std::string& path) {
  if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  return get_as<T>(parent.at(key), path + "." + key);
}

std::size_t as_size(const json& parent, const char* key, const std::string& path, std::size_t fallback) {
  const auto v = maybe<long long>(parent, key, path);
  if (!v) return fallback;
  if (*v < 0) throw UsageError("config field '" + path + "." + key + "' must be non-negative");
  return static_cast<std::size_t>(*v);
}

void positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("config field '" + field + "' must be positive");
}

void check_known(const json& node, const std::vector<std::string>& keys, const std::string& path) {
  if (!node.is_object()) throw UsageError("config field '" + path + "' must be an object");
  for (const auto& item : node.items()) {
    bool found = false;
    for (const auto& k : keys) found = found || item.key() == k;
    if (!found) throw UsageError("unknown config field '" + (path.empty() ? "" : path + ".") + item.key() + "'");
  }
}

}  // namespace

JacobiParams RunConfig::params() const {
  if (sequence == "geometric") return JacobiParams(SequenceSpec::geometric(*q), std::sqrt(*q));
  return JacobiParams(SequenceSpec::power_law(c, p), *k);
}

double RunConfig::q_value() const {
  if (sequence != "geometric" || !q) throw UsageError("this command needs the geometric sequence with --q");
  return *q;
}

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig load_config(const std::optional<json>& file, const json& flags) {
  json doc = file.value_or(json::object());
  if (!doc.is_object()) throw UsageError("config document must be a JSON object");
  if (flags.contains("sequence") && doc.contains("sequence") && doc["sequence"].is_object()) {
    const json& fs = flags["sequence"];
    if (fs.contains("q") || fs.contains("k")) {
      doc["sequence"].erase("q");
      doc["sequence"].erase("k");
    }
  }
  doc.merge_patch(flags);

  check_known(doc, {"sequence", "count", "truncation", "tolerances", "output", "seed", "identity", "poly", "z"}, "");
  RunConfig cfg;

  const json seq = doc.value("sequence", json::object());
  check_known(seq, {"kind", "q", "k", "c", "p"}, "sequence");
  cfg.sequence = maybe<std::string>(seq, "kind", "sequence").value_or("geometric");
  if (cfg.sequence == "power_law" || cfg.sequence == "power-law") cfg.sequence = "powerlaw";
  if (cfg.sequence != "geometric" && cfg.sequence != "powerlaw") {
    throw UsageError("config field 'sequence.kind' must be geometric or powerlaw");
  }
  cfg.q = maybe<double>(seq, "q", "sequence");
  cfg.k = maybe<double>(seq, "k", "sequence");
  cfg.c = maybe<double>(seq, "c", "sequence").value_or(cfg.c);
  cfg.p = maybe<double>(seq, "p", "sequence").value_or(cfg.p);
  if (cfg.q && cfg.k) throw UsageError("config fields 'sequence.q' and 'sequence.k' are mutually exclusive");
  if (cfg.q && !(*cfg.q > 0.0 && *cfg.q < 1.0)) throw UsageError("config field 'sequence.q' must lie in (0,1)");
  if (cfg.k && !(*cfg.k > 0.0 && *cfg.k < 1.0)) throw UsageError("config field 'sequence.k' must lie in (0,1)");
  if (cfg.sequence == "geometric") {
    if (cfg.k) throw UsageError("config field 'sequence.k': the geometric sequence is set by q (k = sqrt(q))");
    if (!cfg.q) cfg.q = 0.25;
  } else {
    if (cfg.q) throw UsageError("config field 'sequence.q' only applies to the geometric sequence");
    if (!cfg.k) throw UsageError("config field 'sequence.k' is required for the powerlaw sequence");
    positive(cfg.c, "sequence.c");
    if (!(cfg.p > 1.0)) throw UsageError("config field 'sequence.p' must exceed 1");
  }

  cfg.count = as_size(doc, "count", "", cfg.count);

  const json tr = doc.value("truncation", json::object());
  check_known(tr, {"M", "J", "N"}, "truncation");
  if (tr.contains("M")) cfg.trunc_order = as_size(tr, "M", "truncation", 0);
  if (tr.contains("J")) cfg.index_cutoff = as_size(tr, "J", "truncation", 0);
  if (tr.contains("N")) cfg.matrix_size = as_size(tr, "N", "truncation", 0);
  if (cfg.trunc_order && cfg.index_cutoff && *cfg.trunc_order > *cfg.index_cutoff) {
    throw UsageError("config field 'truncation.M' must not exceed 'truncation.J'");
  }

  const json tol = doc.value("tolerances", json::object());
  check_known(tol, {"eval", "eig", "identity"}, "tolerances");
  cfg.eval_tol = maybe<double>(tol, "eval", "tolerances").value_or(cfg.eval_tol);
  cfg.eig_tol = maybe<double>(tol, "eig", "tolerances").value_or(cfg.eig_tol);
  cfg.identity_tol = maybe<double>(tol, "identity", "tolerances").value_or(cfg.identity_tol);
  positive(cfg.eval_tol, "tolerances.eval");
  positive(cfg.eig_tol, "tolerances.eig");
  positive(cfg.identity_tol, "tolerances.identity");

  const json out = doc.value("output", json::object());
  check_known(out, {"format", "path"}, "output");
  const std::string fmt = maybe<std::string>(out, "format", "output").value_or("csv");
  if (fmt == "csv") {
    cfg.format = OutputFormat::Csv;
  } else if (fmt == "json") {
    cfg.format = OutputFormat::Json;
  } else {
    throw UsageError("config field 'output.format' must be csv or json");
  }
  cfg.out_path = maybe<std::string>(out, "path", "output").value_or("");

  if (const auto seed = maybe<std::uint64_t>(doc, "seed", "")) cfg.seed = *seed;

  const json id = doc.value("identity", json::object());
  check_known(id, {"id", "q", "r", "w", "m", "a", "c", "s"}, "identity");
  if (const auto name = maybe<std::string>(id, "id", "identity")) {
    cfg.identity = parse_identity(*name);
    if (!cfg.identity) throw UsageError("config field 'identity.id': unknown identity '" + *name + "'");
  }
  IdentityParams& ip = cfg.identity_params;
  for (const char* key : {"q", "r", "w", "m", "a", "c", "s"}) cfg.identity_params_given |= id.contains(key);
  ip.q = maybe<double>(id, "q", "identity").value_or(cfg.q.value_or(ip.q));
  ip.r = maybe<int>(id, "r", "identity").value_or(ip.r);
  ip.w = maybe<double>(id, "w", "identity").value_or(ip.w);
  ip.m = maybe<int>(id, "m", "identity").value_or(ip.m);
  ip.a = maybe<double>(id, "a", "identity").value_or(ip.a);
  ip.c = maybe<std::vector<double>>(id, "c", "identity").value_or(std::vector<double>{});
  ip.s = maybe<std::vector<int>>(id, "s", "identity").value_or(std::vector<int>{});
  if (cfg.identity_params_given && !cfg.identity) {
    throw UsageError("config field 'identity.id' is required when identity parameters are given");
  }
  if (cfg.identity_params_given) {
    if (ip.c.empty()) ip.c.assign(static_cast<std::size_t>(std::max(ip.m, 0)) + 1, 1.0);
    if (ip.s.empty()) ip.s.assign(static_cast<std::size_t>(std::max(ip.m, 1)), 1);
  }

  const json poly = doc.value("poly", json::object());
  check_known(poly, {"n", "x"}, "poly");
  cfg.poly_n = as_size(poly, "n", "poly", cfg.poly_n);
  cfg.poly_x = maybe<std::vector<double>>(poly, "x", "poly").value_or(cfg.poly_x);

  if (doc.contains("z")) cfg.z_points = get_as<std::vector<double>>(doc["z"], "z");
  return cfg;
}

}  // namespace jtrace
