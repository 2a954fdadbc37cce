#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ramana/json_io.hpp"
#include "ramana/sdpa_io.hpp"

using namespace ramana;

namespace {

// Exit codes: 0 success, 1 verification failure, 2 parse or solver error.
constexpr int kOk = 0;
constexpr int kVerifyFail = 1;
constexpr int kHardError = 2;

std::string val(double v) {
  if (std::isnan(v)) return "unavailable";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string sci(double v) {
  if (std::isnan(v)) return "unavailable";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void print_report(const GapReport& rep, const std::string& digest) {
  std::cout << "instance: n=" << rep.n << " m=" << rep.m << " " << digest
            << "\n";
  std::cout << "facial reduction: steps=" << rep.reduction_steps
            << " face_rank=" << rep.face_rank << " blocks=[";
  for (std::size_t i = 0; i < rep.block_sizes.size(); ++i)
    std::cout << (i ? "," : "") << rep.block_sizes[i];
  std::cout << "] slater_margin=" << sci(rep.slater_margin)
            << " transform_cond=" << sci(rep.transform_condition) << "\n";
  std::cout << "certificate: " << (rep.certificate_valid ? "valid" : "INVALID")
            << " eq_residual=" << sci(rep.certificate_eq_residual)
            << " pattern_residual=" << sci(rep.certificate_pattern_residual)
            << "\n";
  std::cout << "values:\n";
  std::cout << "  primal value      " << val(rep.primal_value)
            << "  (via the reduced exact dual; rendering cross-check "
            << val(rep.primal_solver_value) << " [" << rep.primal_status
            << "])\n";
  std::cout << "  classical dual    " << val(rep.classical_dual_value)
            << "  [" << rep.classical_status << ", "
            << rep.classical_attainment
            << ", max iterate norm " << sci(rep.classical_max_iterate_norm)
            << "]\n";
  std::cout << "  reduced dual      " << val(rep.strong_dual_value) << "  ["
            << rep.strong_status << "]\n";
  std::cout << "  extended dual     " << val(rep.ramana_value) << "  ["
            << (rep.ramana_verified ? "verified feasible point"
                                    : "no verified point")
            << (rep.ramana_attained ? ", attained" : "")
            << ", solver cross-check " << val(rep.ramana_solver_value)
            << " [" << rep.ramana_solver_status << "]]\n";
  std::cout << "  duality gap       " << val(rep.gap)
            << "  (classical minus extended)\n";
  if (!rep.warnings.empty()) {
    std::cout << "warnings:\n";
    for (const std::string& w : rep.warnings)
      std::cout << "  - " << w << "\n";
  }
}

int cmd_analyze(const std::string& file, const std::string& json_out) {
  const SdpInstance inst = parse_sdpa_file(file);
  AnalyzeOptions opts;
  opts.tol = Tolerances::from_env();
  const GapReport rep = gap_analysis(inst, opts);
  const std::string digest = instance_digest(inst);
  print_report(rep, digest);
  if (!json_out.empty())
    write_file(json_out, dump_json(analysis_report_json(rep, digest)));
  return kOk;
}

int cmd_build_ramana(const std::string& file, const std::string& out) {
  const SdpInstance inst = parse_sdpa_file(file);
  const RamanaDualProgram rd = build_ramana_dual(inst);
  write_file(out, write_sdpa(rd.prog));
  std::cout << "extended dual of n=" << rd.n << " m=" << rd.m
            << ": " << rd.var_count << " scalar variables, " << rd.con_count
            << " equality rows -> " << out << "\n";
  return kOk;
}

int cmd_facial_reduce(const std::string& file, const std::string& cert_out) {
  const SdpInstance inst = parse_sdpa_file(file);
  FacialOptions opts;
  opts.tol = Tolerances::from_env();
  const FacialReductionResult res = facial_reduction(inst, opts);
  std::cout << "face_rank=" << res.slack_report.rank
            << " steps=" << res.steps << " blocks=[";
  for (std::size_t i = 0; i < res.cert.block_sizes.size(); ++i)
    std::cout << (i ? "," : "") << res.cert.block_sizes[i];
  std::cout << "] slater_margin=" << sci(res.slack_report.slater_margin)
            << " transform_cond=" << sci(res.cert.transform.condition())
            << "\n";
  const CertificateCheck chk =
      verify_certificate(inst, res.cert, opts.tol.tol_fr);
  std::cout << "certificate: " << (chk.valid ? "valid" : "INVALID")
            << " eq_residual=" << sci(chk.max_eq_residual)
            << " pattern_residual=" << sci(chk.max_pattern_residual) << "\n";
  for (const std::string& f : chk.failures)
    std::cout << "  - " << f << "\n";
  if (!cert_out.empty())
    write_file(cert_out, dump_json(to_json(res.cert)));
  return chk.valid ? kOk : kVerifyFail;
}

int cmd_verify(const std::string& file, const std::string& cert_in,
               const std::string& sol_in) {
  const SdpInstance inst = parse_sdpa_file(file);
  const Tolerances tol = Tolerances::from_env();
  if (!cert_in.empty()) {
    const FacialCertificate cert =
        certificate_from_json(parse_json_file(cert_in));
    const CertificateCheck chk = verify_certificate(inst, cert, tol.tol_fr);
    std::cout << "certificate: " << (chk.valid ? "valid" : "INVALID")
              << " eq_residual=" << sci(chk.max_eq_residual)
              << " pattern_residual=" << sci(chk.max_pattern_residual)
              << " (tolerance " << sci(tol.tol_fr) << ")\n";
    for (const std::string& f : chk.failures)
      std::cout << "  - " << f << "\n";
    return chk.valid ? kOk : kVerifyFail;
  }
  const RamanaSolution sol =
      ramana_solution_from_json(parse_json_file(sol_in));
  const RamanaCheck chk = verify_ramana(inst, sol, tol.tol_eq);
  std::cout << "extended-dual point: "
            << (chk.valid ? "feasible" : "INFEASIBLE")
            << " objective=" << val(chk.objective)
            << " eq_residual=" << sci(chk.max_eq_residual)
            << " cone_violation=" << sci(chk.max_cone_violation)
            << " tangent_residual=" << sci(chk.max_tangent_residual)
            << " (tolerance " << sci(tol.tol_eq) << ")\n";
  for (const std::string& f : chk.failures)
    std::cout << "  - " << f << "\n";
  return chk.valid ? kOk : kVerifyFail;
}

int cmd_solve(const std::string& file, double gap_tol) {
  const SdpInstance inst = parse_sdpa_file(file);
  SolverOptions sopts;
  sopts.gap_tol = gap_tol;
  int rc = kOk;
  auto run = [&](const char* name, const ConicProgram& prog, double sign) {
    const SolveResult res = solve(prog, sopts);
    std::cout << name << ": value=" << val(sign * res.primal_value)
              << " status=" << to_string(res.status)
              << " iters=" << res.iterations << " gap=" << sci(res.gap_abs)
              << " pinf=" << sci(res.pinf) << " dinf=" << sci(res.dinf)
              << " max_norm=" << sci(res.max_iterate_norm()) << "\n";
    if (!res.message.empty()) std::cout << "  note: " << res.message << "\n";
    const CertifyReport cr = certify(prog, res, 1e-6);
    std::cout << "  recheck: " << (cr.ok ? "consistent" : "REJECTED")
              << " primal_eq=" << sci(cr.primal_eq_residual)
              << " dual_eq=" << sci(cr.dual_eq_residual)
              << " cone=" << sci(std::max(cr.primal_cone_violation,
                                          cr.dual_cone_violation))
              << " gap=" << sci(cr.gap_abs) << "\n";
    if (res.status == SolveStatus::Optimal && !cr.ok) rc = kVerifyFail;
  };
  run("primal rendering (value = sup form)", build_primal(inst), -1.0);
  run("classical dual rendering", build_classical_dual(inst), 1.0);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "semidefinite programs: facial reduction, exact extended duals, "
      "duality-gap analysis"};
  app.require_subcommand(1);

  std::string file, json_out, out, cert_out, cert_in, sol_in;
  double gap_tol = 1e-9;

  CLI::App* an = app.add_subcommand(
      "analyze", "facial reduction, every dual value, attainment evidence");
  an->add_option("file", file, "SDPA sparse input (.dat-s)")->required();
  an->add_option("--json", json_out, "also write the report as JSON");

  CLI::App* br = app.add_subcommand(
      "build-ramana", "render the extended exact dual to SDPA format");
  br->add_option("file", file, "SDPA sparse input (.dat-s)")->required();
  br->add_option("out", out, "output path (.dat-s)")->required();

  CLI::App* fr = app.add_subcommand(
      "facial-reduce", "reduce to a face with a verified certificate chain");
  fr->add_option("file", file, "SDPA sparse input (.dat-s)")->required();
  fr->add_option("--cert", cert_out, "write the certificate as JSON");

  CLI::App* ve = app.add_subcommand(
      "verify", "check a certificate or an extended-dual point against an "
                "instance");
  ve->add_option("file", file, "SDPA sparse input (.dat-s)")->required();
  CLI::Option* oc =
      ve->add_option("--cert", cert_in, "facial-certificate JSON");
  CLI::Option* os = ve->add_option("--ramana-solution", sol_in,
                                   "extended-dual point JSON");
  oc->excludes(os);
  os->excludes(oc);

  CLI::App* so = app.add_subcommand(
      "solve", "interior-point solve of the primal and classical dual "
               "renderings, with independent recheck");
  so->add_option("file", file, "SDPA sparse input (.dat-s)")->required();
  so->add_option("--gap-tol", gap_tol, "duality-gap target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (an->parsed()) return cmd_analyze(file, json_out);
    if (br->parsed()) return cmd_build_ramana(file, out);
    if (fr->parsed()) return cmd_facial_reduce(file, cert_out);
    if (ve->parsed()) {
      if (cert_in.empty() && sol_in.empty()) {
        std::cerr << "verify: one of --cert / --ramana-solution is required\n";
        return kHardError;
      }
      return cmd_verify(file, cert_in, sol_in);
    }
    if (so->parsed()) return cmd_solve(file, gap_tol);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kHardError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kHardError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kHardError;
  }
  return kHardError;
}
