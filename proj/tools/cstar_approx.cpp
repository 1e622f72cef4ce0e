// cstar-approx: distance to a subspace of a finite-dimensional C*-algebra,
// with dual certificates that can be checked without the solver.
//
//   cstar-approx solve  --input problem.json --output report.json [--tol T] [--seed S]
//   cstar-approx verify --input problem.json --report report.json
//   cstar-approx delta  --input tail_problem.json
//
// Exit codes: 0 ok, 1 input/validation error, 2 no convergence (report still
// written), 3 certificate rejected, 4 unsupported tail form.
// CSTAR_APPROX_THREADS is reserved and currently ignored.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "cstar/cstar.hpp"

namespace {

using cstar::io::Json;
using cstar::io::ParseError;

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2, kRejected = 3, kUnsupported = 4 };

constexpr std::size_t kDefaultOperatorTruncation = 16;

std::string read_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(flag, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json parse_json(const std::string& text, const std::string& flag) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(flag, std::string("invalid JSON: ") + e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  out << "sha256:";
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return out.str();
}

// Temp file in the target directory, then rename: readers never see a partial report.
void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("--output", "cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ParseError("--output", "write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

void fill_from(cstar::io::ReportFile& out, const cstar::DistanceReport& rep) {
  out.distance = rep.primal_value;
  out.best_coeffs = rep.best_coeffs;
  out.best_approx = rep.best_approx;
  out.certificate = rep.certificate;
  out.gap = rep.gap;
  out.converged = rep.converged;
  out.iterations = rep.iterations;
}

std::size_t operator_truncation(const cstar::io::TailProblem& tp) {
  if (tp.truncation) return *tp.truncation;
  return std::max(kDefaultOperatorTruncation, cstar::minimal_truncation(tp.x, tp.basis));
}

cstar::io::ReportFile solve_problem(const cstar::io::ProblemFile& p) {
  cstar::io::ReportFile out;
  out.norm = p.norm;
  out.tol = p.options.tol;
  if (!p.tail) {
    fill_from(out, cstar::solve_distance(*p.x, *p.basis, p.norm, p.options));
    return out;
  }
  const cstar::io::TailProblem& tp = *p.tail;
  if (tp.basis.empty()) throw ParseError("tail.basis", "solve needs at least one generator");
  cstar::io::TailSummary summary;
  if (p.norm == cstar::NormKind::Trace) {
    const cstar::TailDistance td = cstar::dist1_tail(tp.x, tp.basis, p.options.tol, p.options);
    fill_from(out, td.report);
    summary.lo = td.lo;
    summary.hi = td.hi;
    summary.truncation_n = td.n;
    summary.error_bound = td.error_bound;
  } else {
    // A certificate on the corner is a feasible functional for the full
    // operator, so its value bounds dist(x, V) from below; no upper bound.
    const std::size_t n = operator_truncation(tp);
    const cstar::TruncatedProblem prob = cstar::truncate_problem(tp.x, tp.basis, n);
    const cstar::DistanceReport rep = cstar::solve_distance(prob.element, prob.basis, p.norm, p.options);
    fill_from(out, rep);
    if (rep.certificate) summary.lo = rep.certificate->value;
    summary.truncation_n = n;
    summary.error_bound = prob.x.error_bound;
  }
  out.tail = summary;
  return out;
}

int cmd_solve(const std::string& input, const std::string& output, const std::optional<double>& tol,
              const std::optional<std::uint64_t>& seed) {
  const std::string text = read_file(input, "--input");
  cstar::io::ProblemFile p = cstar::io::parse_problem(parse_json(text, "--input"));
  if (tol) {
    if (!(*tol > 0.0)) throw ParseError("--tol", "must be > 0");
    p.options.tol = *tol;
  }
  if (seed) p.options.seed = *seed;
  cstar::io::ReportFile report = solve_problem(p);
  report.input_digest = sha256_hex(text);
  write_atomic(output, cstar::io::report_json(report).dump(2) + "\n");

  std::cout << "distance: " << fmt(report.distance) << "\n"
            << "gap: " << fmt(report.gap) << "\n"
            << "converged: " << (report.converged ? "true" : "false") << "\n";
  if (report.tail && report.tail->lo) {
    std::cout << "interval: [" << fmt(*report.tail->lo) << ", "
              << (report.tail->hi ? fmt(*report.tail->hi) : std::string("inf")) << "]\n"
              << "truncation_n: " << report.tail->truncation_n << "\n";
  }
  return report.converged && report.gap <= p.options.tol ? kOk : kNotConverged;
}

int cmd_verify(const std::string& input, const std::string& report_path) {
  const std::string text = read_file(input, "--input");
  const cstar::io::ProblemFile p = cstar::io::parse_problem(parse_json(text, "--input"));
  const Json rj = parse_json(read_file(report_path, "--report"), "--report");
  const cstar::AlgebraSignature sig = cstar::io::report_signature(rj, p);
  const cstar::io::ReportFile r = cstar::io::parse_report(rj, sig);
  if (r.input_digest != sha256_hex(text)) throw ParseError("input_digest", "does not match --input");
  if (r.norm != p.norm) throw ParseError("norm", "report and problem disagree");

  std::optional<cstar::TruncatedProblem> truncated;
  if (p.tail) {
    if (!r.tail) throw ParseError("tail", "missing for a tail problem");
    truncated = cstar::truncate_problem(p.tail->x, p.tail->basis, r.tail->truncation_n);
  }
  const cstar::AlgebraElement& x = truncated ? truncated->element : *p.x;
  const cstar::SubspaceBasis& basis = truncated ? truncated->basis : *p.basis;

  bool accepted = true;
  double lower = 0.0;
  if (r.certificate) {
    if (r.certificate->kind != p.norm) accepted = false;
    const cstar::CertificateCheck check = cstar::verify_certificate(x, basis, *r.certificate);
    lower = check.lower_bound;
    accepted = accepted && check.feasible;
    std::cout << "feasible: " << (check.feasible ? "true" : "false") << "\n"
              << "feasibility_residual: " << fmt(check.feasibility_residual) << "\n"
              << "dual_norm: " << fmt(check.dual_norm) << "\n";
  }
  const double slack = 10.0 * r.tol;
  accepted = accepted && std::abs(lower - r.distance) <= slack;

  std::optional<double> upper;
  if (static_cast<std::size_t>(r.best_coeffs.size()) == basis.size()) {
    upper = cstar::norm(x - basis.combine(r.best_coeffs), p.norm);
    accepted = accepted && *upper <= r.distance + slack;
  } else {
    accepted = false;
  }
  std::cout << "lower_bound: " << fmt(lower) << "\n";
  if (upper) std::cout << "upper_bound: " << fmt(*upper) << "\n";
  std::cout << "gap: " << fmt(r.distance - lower) << "\n"
            << "verdict: " << (accepted ? "accepted" : "rejected") << "\n";
  return accepted ? kOk : kRejected;
}

int cmd_delta(const std::string& input) {
  const cstar::io::ProblemFile p = cstar::io::parse_problem(parse_json(read_file(input, "--input"), "--input"));
  if (!p.tail) throw ParseError("tail", "delta needs a tail problem");
  const cstar::io::TailProblem& tp = *p.tail;
  double delta = 0.0;
  try {
    delta = cstar::delta_ess(tp.x);
  } catch (const cstar::Error& e) {
    if (e.code() != cstar::ErrorCode::UnsupportedForm) throw;
    std::cerr << "error: " << e.what() << "\n";
    return kUnsupported;
  }
  std::cout << "delta: " << fmt(delta) << "\n";
  if (tp.basis.empty()) return kOk;

  double distance = 0.0;
  double lower = 0.0;
  if (p.norm == cstar::NormKind::Trace) {
    const cstar::TailDistance td = cstar::dist1_tail(tp.x, tp.basis, p.options.tol, p.options);
    distance = td.report.primal_value;
    lower = td.lo;
    std::cout << "interval: [" << fmt(td.lo) << ", " << fmt(td.hi) << "]\n";
  } else {
    const std::size_t n = operator_truncation(tp);
    const cstar::TruncatedProblem prob = cstar::truncate_problem(tp.x, tp.basis, n);
    const cstar::DistanceReport rep = cstar::solve_distance(prob.element, prob.basis, p.norm, p.options);
    distance = rep.primal_value;
    lower = rep.certificate ? rep.certificate->value : 0.0;
    std::cout << "truncation_n: " << n << "\n";
  }
  const bool strict = delta < lower;
  std::cout << "distance: " << fmt(distance) << "\n"
            << "certified_lower_bound: " << fmt(lower) << "\n"
            << "strict: " << (strict ? "true" : "false") << "\n"
            << (strict ? "delta < distance" : "delta >= certified lower bound") << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distances to subspaces of finite-dimensional C*-algebras with dual certificates"};
  app.require_subcommand(1);
  app.footer("Environment: CSTAR_APPROX_THREADS is reserved and ignored in this version.");

  std::string input;
  std::string output;
  std::string report;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;

  CLI::App* solve = app.add_subcommand("solve", "Solve a problem file and write a report");
  solve->add_option("--input", input, "Problem file")->required();
  solve->add_option("--output", output, "Report file to write")->required();
  solve->add_option("--tol", tol, "Duality-gap target (overrides options.tol)");
  solve->add_option("--seed", seed, "Multistart seed (overrides options.seed)");

  CLI::App* verify = app.add_subcommand("verify", "Check a report's certificate against its problem");
  verify->add_option("--input", input, "Problem file")->required();
  verify->add_option("--report", report, "Report file")->required();

  CLI::App* delta = app.add_subcommand("delta", "Essential quantity Delta(x) of a tail problem");
  delta->add_option("--input", input, "Tail problem file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (solve->parsed()) return cmd_solve(input, output, tol, seed);
    if (verify->parsed()) return cmd_verify(input, report);
    return cmd_delta(input);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const cstar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
