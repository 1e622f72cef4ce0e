#pragma once

// Problem and report files, schema_version "1". Complex scalars are
// [re, im] pairs; matrix blocks are flat row-major lists of scalars.

#include <json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/infinite.hpp"
#include "cstar/solver.hpp"

namespace cstar::io {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "1.0.0";

/// Malformed or invalid input; the message starts with the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct TailProblem {
  TailOperator x;
  std::vector<TailOperator> basis;
  std::optional<std::size_t> truncation;
};

struct ProblemFile {
  std::string schema_version;
  NormKind norm = NormKind::Operator;
  std::optional<AlgebraElement> x;
  std::optional<SubspaceBasis> basis;
  SolveOptions options;
  std::optional<TailProblem> tail;
};

struct TailSummary {
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t truncation_n = 0;
  std::optional<double> error_bound;  // absent when not trace class
};

struct ReportFile {
  std::string schema_version = kSchemaVersion;
  std::string tool_version = kToolVersion;
  std::string input_digest;
  NormKind norm = NormKind::Operator;
  double tol = 0.0;
  double distance = 0.0;
  Vector best_coeffs;
  std::optional<AlgebraElement> best_approx;
  std::optional<DualCertificate> certificate;
  double gap = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::optional<TailSummary> tail;
};

namespace detail {

inline void require_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ParseError(where + "." + item.key(), "unknown field");
  }
}

inline const Json& field(const Json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw ParseError(where + "." + key, "missing field");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, "must be finite");
  return v;
}

inline std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ParseError(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline Complex scalar(const Json& j, const std::string& where) {
  if (j.is_number()) return {number(j, where), 0.0};
  if (!j.is_array() || j.size() != 2) throw ParseError(where, "expected [re, im]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

inline Json scalar_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Matrix block(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected a flat row-major list of [re, im] entries");
  if (j.size() != n * n) {
    throw ParseError("signature", where + " has " + std::to_string(j.size()) + " entries but the signature needs " +
                                      std::to_string(n) + "x" + std::to_string(n) + "=" + std::to_string(n * n));
  }
  const auto ni = static_cast<Index>(n);
  Matrix m(ni, ni);
  for (Index r = 0; r < ni; ++r) {
    for (Index c = 0; c < ni; ++c) {
      const auto pos = static_cast<std::size_t>(r * ni + c);
      m(r, c) = scalar(j[pos], where + "[" + std::to_string(pos) + "]");
    }
  }
  return m;
}

inline Json block_json(const Matrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back(scalar_json(m(r, c)));
  }
  return out;
}

inline AlgebraElement element(const Json& j, const AlgebraSignature& sig, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected a list of blocks");
  if (j.size() != sig.block_count()) {
    throw ParseError("signature", where + " has " + std::to_string(j.size()) + " blocks but the signature has " +
                                      std::to_string(sig.block_count()));
  }
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < sig.block_count(); ++i) {
    blocks.push_back(block(j[i], sig.block_dim(i), where + "[" + std::to_string(i) + "]"));
  }
  return {sig, std::move(blocks)};
}

inline Json element_json(const AlgebraElement& e) {
  Json out = Json::array();
  for (const Matrix& b : e.blocks()) out.push_back(block_json(b));
  return out;
}

inline AlgebraSignature signature(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("signature", "expected a nonempty list of block dimensions");
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::size_t n = count(j[i], "signature[" + std::to_string(i) + "]");
    if (n == 0) throw ParseError("signature[" + std::to_string(i) + "]", "block dimensions must be >= 1");
    dims.push_back(n);
  }
  return AlgebraSignature(std::move(dims));
}

inline SolveOptions options(const Json& j) {
  require_keys(j, "options", {"tol", "max_iter", "penalty", "seed", "restarts"});
  SolveOptions o;
  if (j.contains("tol")) o.tol = number(j["tol"], "options.tol");
  if (j.contains("max_iter")) o.max_iter = count(j["max_iter"], "options.max_iter");
  if (j.contains("penalty")) o.penalty = number(j["penalty"], "options.penalty");
  if (j.contains("seed")) o.seed = count(j["seed"], "options.seed");
  if (j.contains("restarts")) o.restarts = count(j["restarts"], "options.restarts");
  if (!(o.tol > 0.0)) throw ParseError("options.tol", "must be > 0");
  if (o.max_iter < 1) throw ParseError("options.max_iter", "must be >= 1");
  if (!(o.penalty > 0.0)) throw ParseError("options.penalty", "must be > 0");
  return o;
}

inline WeightRule weights(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  const Json& rule = field(j, where, "rule");
  if (!rule.is_string()) throw ParseError(where + ".rule", "expected a string");
  const std::string name = rule.get<std::string>();
  if (name == "constant") {
    require_keys(j, where, {"rule", "value"});
    return ConstantWeights{scalar(field(j, where, "value"), where + ".value")};
  }
  if (name == "geometric") {
    require_keys(j, where, {"rule", "first", "ratio"});
    return GeometricWeights{scalar(field(j, where, "first"), where + ".first"),
                            number(field(j, where, "ratio"), where + ".ratio")};
  }
  if (name == "explicit") {
    require_keys(j, where, {"rule", "values", "tail"});
    const Json& vals = field(j, where, "values");
    if (!vals.is_array()) throw ParseError(where + ".values", "expected a list");
    ExplicitWeights w{{}, scalar(field(j, where, "tail"), where + ".tail")};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      w.values.push_back(scalar(vals[i], where + ".values[" + std::to_string(i) + "]"));
    }
    return w;
  }
  if (name == "harmonic") {
    require_keys(j, where, {"rule", "limit", "scale"});
    return HarmonicWeights{number(field(j, where, "limit"), where + ".limit"),
                           number(field(j, where, "scale"), where + ".scale")};
  }
  throw ParseError(where + ".rule", "unknown weight rule '" + name + "'");
}

inline TailOperator tail_operator(const Json& j, const std::string& where) {
  require_keys(j, where, {"head", "shift_start", "weights", "coupling"});
  const Json& head = field(j, where, "head");
  require_keys(head, where + ".head", {"dim", "entries"});
  const std::size_t d = count(field(head, where + ".head", "dim"), where + ".head.dim");
  if (d == 0) throw ParseError(where + ".head.dim", "must be >= 1");
  Matrix h = block(field(head, where + ".head", "entries"), d, where + ".head.entries");
  const std::size_t shift_start =
      j.contains("shift_start") ? count(j["shift_start"], where + ".shift_start") : d;
  WeightRule w = j.contains("weights") ? weights(j["weights"], where + ".weights") : WeightRule{ConstantWeights{0.0}};
  std::vector<CouplingEntry> coupling;
  if (j.contains("coupling")) {
    const Json& list = j["coupling"];
    if (!list.is_array()) throw ParseError(where + ".coupling", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = where + ".coupling[" + std::to_string(i) + "]";
      require_keys(list[i], at, {"row", "col", "value"});
      coupling.push_back({count(field(list[i], at, "row"), at + ".row"), count(field(list[i], at, "col"), at + ".col"),
                          scalar(field(list[i], at, "value"), at + ".value")});
    }
  }
  try {
    return TailOperator(std::move(h), shift_start, std::move(w), std::move(coupling));
  } catch (const Error& e) {
    throw ParseError(where, e.what());
  }
}

inline std::optional<double> optional_number(const Json& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  return number(j, where);
}

inline Json optional_json(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

}  // namespace detail

inline ProblemFile parse_problem(const Json& j) {
  detail::require_keys(j, "problem", {"schema_version", "norm", "signature", "x", "basis", "options", "tail"});
  ProblemFile p;
  const Json& version = detail::field(j, "problem", "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw ParseError("schema_version", std::string("expected \"") + kSchemaVersion + "\"");
  }
  p.schema_version = version.get<std::string>();
  const Json& nk = detail::field(j, "problem", "norm");
  if (!nk.is_string()) throw ParseError("norm", "expected \"operator\" or \"trace\"");
  try {
    p.norm = parse_norm_kind(nk.get<std::string>());
  } catch (const Error&) {
    throw ParseError("norm", "expected \"operator\" or \"trace\"");
  }
  if (j.contains("options")) p.options = detail::options(j["options"]);

  if (j.contains("tail")) {
    for (const char* key : {"signature", "x", "basis"}) {
      if (j.contains(key)) throw ParseError(key, "cannot be combined with a tail problem");
    }
    const Json& t = j["tail"];
    detail::require_keys(t, "tail", {"x", "basis", "truncation"});
    TailProblem tp{detail::tail_operator(detail::field(t, "tail", "x"), "tail.x"), {}, std::nullopt};
    if (t.contains("basis")) {
      const Json& b = t["basis"];
      if (!b.is_array()) throw ParseError("tail.basis", "expected a list");
      for (std::size_t i = 0; i < b.size(); ++i) {
        tp.basis.push_back(detail::tail_operator(b[i], "tail.basis[" + std::to_string(i) + "]"));
      }
    }
    if (t.contains("truncation")) {
      tp.truncation = detail::count(t["truncation"], "tail.truncation");
      if (*tp.truncation < tp.x.head_dim()) throw ParseError("tail.truncation", "smaller than the head dimension");
    }
    p.tail = std::move(tp);
    return p;
  }

  const AlgebraSignature sig = detail::signature(detail::field(j, "problem", "signature"));
  p.x = detail::element(detail::field(j, "problem", "x"), sig, "x");
  const Json& b = detail::field(j, "problem", "basis");
  if (!b.is_array() || b.empty()) throw ParseError("basis", "expected a nonempty list of elements");
  std::vector<AlgebraElement> ys;
  for (std::size_t i = 0; i < b.size(); ++i) ys.push_back(detail::element(b[i], sig, "basis[" + std::to_string(i) + "]"));
  try {
    p.basis = SubspaceBasis(std::move(ys));
  } catch (const Error& e) {
    throw ParseError("basis", e.what());
  }
  return p;
}

inline Json report_json(const ReportFile& r) {
  Json j;
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  j["input_digest"] = r.input_digest;
  j["norm"] = std::string(to_string(r.norm));
  j["tol"] = r.tol;
  j["distance"] = r.distance;
  Json coeffs = Json::array();
  for (Index i = 0; i < r.best_coeffs.size(); ++i) coeffs.push_back(detail::scalar_json(r.best_coeffs(i)));
  j["best_coeffs"] = coeffs;
  j["best_approx"] = r.best_approx ? detail::element_json(*r.best_approx) : Json(nullptr);
  if (r.certificate) {
    const DualCertificate& c = *r.certificate;
    j["certificate"] = {{"witness", detail::element_json(c.witness)},
                        {"kind", std::string(to_string(c.kind))},
                        {"dual_norm", c.dual_norm},
                        {"feasibility_residual", c.feasibility_residual},
                        {"value", c.value}};
  } else {
    j["certificate"] = nullptr;
  }
  j["gap"] = r.gap;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  if (r.tail) {
    j["tail"] = {{"interval", {{"lo", detail::optional_json(r.tail->lo)}, {"hi", detail::optional_json(r.tail->hi)}}},
                 {"truncation_n", r.tail->truncation_n},
                 {"error_bound", detail::optional_json(r.tail->error_bound)}};
  }
  return j;
}

/// Reads a report; block shapes are taken from best_approx / witness, so
/// the result can be checked against a problem without solver state.
inline ReportFile parse_report(const Json& j, const AlgebraSignature& sig) {
  detail::require_keys(j, "report",
                       {"schema_version", "tool_version", "input_digest", "norm", "tol", "distance", "best_coeffs",
                        "best_approx", "certificate", "gap", "converged", "iterations", "tail"});
  ReportFile r;
  const Json& version = detail::field(j, "report", "schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion) {
    throw ParseError("schema_version", std::string("expected \"") + kSchemaVersion + "\"");
  }
  auto str = [&](const char* key) {
    const Json& v = detail::field(j, "report", key);
    if (!v.is_string()) throw ParseError(key, "expected a string");
    return v.get<std::string>();
  };
  r.tool_version = str("tool_version");
  r.input_digest = str("input_digest");
  try {
    r.norm = parse_norm_kind(str("norm"));
  } catch (const Error&) {
    throw ParseError("norm", "expected \"operator\" or \"trace\"");
  }
  r.tol = detail::number(detail::field(j, "report", "tol"), "tol");
  r.distance = detail::number(detail::field(j, "report", "distance"), "distance");
  r.gap = detail::number(detail::field(j, "report", "gap"), "gap");
  const Json& conv = detail::field(j, "report", "converged");
  if (!conv.is_boolean()) throw ParseError("converged", "expected a boolean");
  r.converged = conv.get<bool>();
  r.iterations = detail::count(detail::field(j, "report", "iterations"), "iterations");
  const Json& coeffs = detail::field(j, "report", "best_coeffs");
  if (!coeffs.is_array()) throw ParseError("best_coeffs", "expected a list");
  r.best_coeffs.resize(static_cast<Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    r.best_coeffs(static_cast<Index>(i)) = detail::scalar(coeffs[i], "best_coeffs[" + std::to_string(i) + "]");
  }
  const Json& approx = detail::field(j, "report", "best_approx");
  if (!approx.is_null()) r.best_approx = detail::element(approx, sig, "best_approx");
  const Json& cert = detail::field(j, "report", "certificate");
  if (!cert.is_null()) {
    detail::require_keys(cert, "certificate", {"witness", "kind", "dual_norm", "feasibility_residual", "value"});
    const Json& kind = detail::field(cert, "certificate", "kind");
    if (!kind.is_string()) throw ParseError("certificate.kind", "expected a string");
    NormKind nk;
    try {
      nk = parse_norm_kind(kind.get<std::string>());
    } catch (const Error&) {
      throw ParseError("certificate.kind", "expected \"operator\" or \"trace\"");
    }
    r.certificate = DualCertificate{
        detail::element(detail::field(cert, "certificate", "witness"), sig, "certificate.witness"), nk,
        detail::number(detail::field(cert, "certificate", "feasibility_residual"), "certificate.feasibility_residual"),
        detail::number(detail::field(cert, "certificate", "dual_norm"), "certificate.dual_norm"),
        detail::number(detail::field(cert, "certificate", "value"), "certificate.value")};
  }
  if (j.contains("tail")) {
    const Json& t = j["tail"];
    detail::require_keys(t, "tail", {"interval", "truncation_n", "error_bound"});
    const Json& iv = detail::field(t, "tail", "interval");
    detail::require_keys(iv, "tail.interval", {"lo", "hi"});
    TailSummary ts;
    ts.lo = detail::optional_number(detail::field(iv, "tail.interval", "lo"), "tail.interval.lo");
    ts.hi = detail::optional_number(detail::field(iv, "tail.interval", "hi"), "tail.interval.hi");
    ts.truncation_n = detail::count(detail::field(t, "tail", "truncation_n"), "tail.truncation_n");
    ts.error_bound = detail::optional_number(detail::field(t, "tail", "error_bound"), "tail.error_bound");
    r.tail = ts;
  }
  return r;
}

/// Signature of the elements stored in a report for `problem`: the problem's
/// own signature, or a single N x N block for truncated tail problems.
inline AlgebraSignature report_signature(const Json& report, const ProblemFile& problem) {
  if (!problem.tail) return problem.x->signature();
  if (!report.is_object() || !report.contains("tail") || !report["tail"].is_object() ||
      !report["tail"].contains("truncation_n")) {
    throw ParseError("tail.truncation_n", "missing field for a tail problem");
  }
  const std::size_t n = detail::count(report["tail"]["truncation_n"], "tail.truncation_n");
  if (n == 0) throw ParseError("tail.truncation_n", "must be >= 1");
  return AlgebraSignature({n});
}

}  // namespace cstar::io
