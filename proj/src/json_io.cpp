#include "ramana/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <utility>

#include "ramana/sdpa_io.hpp"

namespace ramana {

namespace {

Json sym_to_json(const SymMat& x) {
  Json j;
  j["order"] = x.order();
  Json u = Json::array();
  for (int i = 0; i < x.order(); ++i)
    for (int k = i; k < x.order(); ++k) u.push_back(x(i, k));
  j["upper"] = std::move(u);
  return j;
}

SymMat sym_from_json(const Json& j) {
  const int n = j.at("order").get<int>();
  if (n < 1) throw Error("matrix order must be positive");
  const Json& u = j.at("upper");
  if (!u.is_array() || static_cast<int>(u.size()) != n * (n + 1) / 2)
    throw Error("upper-triangle array has the wrong length");
  SymMat x(n);
  int t = 0;
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) x.set(i, k, u[t++].get<double>());
  return x;
}

Json mat_to_json(const Mat& x) {
  Json j;
  j["rows"] = x.rows();
  j["cols"] = x.cols();
  Json e = Json::array();
  for (int i = 0; i < x.rows(); ++i)
    for (int k = 0; k < x.cols(); ++k) e.push_back(x(i, k));
  j["entries"] = std::move(e);
  return j;
}

Mat mat_from_json(const Json& j) {
  const int r = j.at("rows").get<int>();
  const int c = j.at("cols").get<int>();
  if (r < 1 || c < 1) throw Error("matrix dimensions must be positive");
  const Json& e = j.at("entries");
  if (!e.is_array() || static_cast<int>(e.size()) != r * c)
    throw Error("matrix entry array has the wrong length");
  Vec entries(e.size());
  for (std::size_t t = 0; t < e.size(); ++t) entries[t] = e[t].get<double>();
  return Mat::from_rows(r, c, std::move(entries));
}

void put_num(Json& j, const char* key, double v) {
  if (std::isnan(v))
    j[key] = nullptr;
  else
    j[key] = v;
}

double get_num(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

std::string require_schema(const Json& j, const std::string& want) {
  if (!j.is_object()) return "document is not an object";
  if (!j.contains("schema") || !j.at("schema").is_string())
    return "missing string field 'schema'";
  const std::string got = j.at("schema").get<std::string>();
  if (got != want) return "schema is '" + got + "', expected '" + want + "'";
  return {};
}

}  // namespace

Json to_json(const FacialCertificate& cert) {
  Json j;
  j["schema"] = "facial-certificate/1";
  j["n"] = cert.n;
  j["face_rank"] = cert.face_rank;
  j["block_sizes"] = cert.block_sizes;
  Json ys = Json::array();
  for (const SymMat& y : cert.ys) ys.push_back(sym_to_json(y));
  j["ys"] = std::move(ys);
  Json tr;
  tr["t"] = mat_to_json(cert.transform.T());
  // Joined labels from deserialized transforms split back into their lines,
  // so dump(parse(dump(cert))) is stable.
  Json log = Json::array();
  for (const std::string& entry : cert.transform.log()) {
    std::size_t start = 0;
    while (true) {
      const std::size_t nl = entry.find('\n', start);
      log.push_back(entry.substr(start, nl - start));
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
  tr["log"] = std::move(log);
  j["transform"] = std::move(tr);
  return j;
}

FacialCertificate certificate_from_json(const Json& j) {
  const std::string bad = require_schema(j, "facial-certificate/1");
  if (!bad.empty()) throw Error("certificate JSON: " + bad);
  try {
    FacialCertificate cert;
    cert.n = j.at("n").get<int>();
    cert.face_rank = j.at("face_rank").get<int>();
    if (cert.n < 1 || cert.face_rank < 0 || cert.face_rank > cert.n)
      throw Error("face rank out of range");
    cert.block_sizes = j.at("block_sizes").get<std::vector<int>>();
    for (const Json& y : j.at("ys")) cert.ys.push_back(sym_from_json(y));
    if (cert.ys.size() != cert.block_sizes.size())
      throw Error("ys and block_sizes disagree in length");
    const Json& tr = j.at("transform");
    std::vector<std::string> lines;
    for (const Json& entry : tr.at("log"))
      lines.push_back(entry.get<std::string>());
    // from() validates invertibility and would decorate a fresh label; the
    // stored log is then restored verbatim so dumps stay stable.
    cert.transform = RescalingTransform::from(mat_from_json(tr.at("t")),
                                              "deserialized");
    cert.transform.replace_log(std::move(lines));
    return cert;
  } catch (const Json::exception& e) {
    throw Error(std::string("certificate JSON: ") + e.what());
  }
}

Json to_json(const RamanaSolution& sol) {
  Json j;
  j["schema"] = "ramana-solution/1";
  j["n"] = sol.n;
  Json levels = Json::array();
  for (int lvl = 1; lvl <= sol.n + 1; ++lvl) {
    Json item;
    item["level"] = lvl;
    item["U"] = sym_to_json(sol.U[lvl]);
    item["V"] = sym_to_json(sol.V[lvl]);
    if (static_cast<int>(sol.witnesses.size()) == sol.n + 2 &&
        sol.witnesses[lvl].W.rows() > 0) {
      Json w;
      w["W"] = mat_to_json(sol.witnesses[lvl].W);
      w["beta"] = sol.witnesses[lvl].beta;
      item["witness"] = std::move(w);
    } else {
      item["witness"] = nullptr;
    }
    levels.push_back(std::move(item));
  }
  j["levels"] = std::move(levels);
  return j;
}

RamanaSolution ramana_solution_from_json(const Json& j) {
  const std::string bad = require_schema(j, "ramana-solution/1");
  if (!bad.empty()) throw Error("solution JSON: " + bad);
  try {
    const int n = j.at("n").get<int>();
    if (n < 1) throw Error("order must be positive");
    const Json& levels = j.at("levels");
    if (!levels.is_array() || static_cast<int>(levels.size()) != n + 1)
      throw Error("expected " + std::to_string(n + 1) + " levels");
    RamanaSolution sol;
    sol.n = n;
    const SymMat zero(n);
    sol.U.assign(n + 2, zero);
    sol.V.assign(n + 2, zero);
    sol.witnesses.assign(n + 2, TangentWitness{Mat(n, n), 0.0});
    for (int t = 0; t < n + 1; ++t) {
      const Json& item = levels[t];
      const int lvl = item.at("level").get<int>();
      if (lvl != t + 1)
        throw Error("levels must be listed in order 1.." +
                    std::to_string(n + 1));
      sol.U[lvl] = sym_from_json(item.at("U"));
      sol.V[lvl] = sym_from_json(item.at("V"));
      if (sol.U[lvl].order() != n || sol.V[lvl].order() != n)
        throw Error("level " + std::to_string(lvl) +
                    " blocks must have order " + std::to_string(n));
      const Json& w = item.at("witness");
      if (w.is_null()) {
        // Absent: verification falls back to the algebraic test.
        sol.witnesses[lvl] = TangentWitness{Mat(), 0.0};
      } else {
        sol.witnesses[lvl] = TangentWitness{mat_from_json(w.at("W")),
                                            w.at("beta").get<double>()};
      }
    }
    return sol;
  } catch (const Json::exception& e) {
    throw Error(std::string("solution JSON: ") + e.what());
  }
}

Json analysis_report_json(const GapReport& rep, const std::string& digest) {
  Json j;
  j["schema"] = "analysis-report/1";
  {
    Json inst;
    inst["digest"] = digest;
    inst["n"] = rep.n;
    inst["m"] = rep.m;
    j["instance"] = std::move(inst);
  }
  j["face_rank"] = rep.face_rank;
  j["reduction_steps"] = rep.reduction_steps;
  put_num(j, "slater_margin", rep.slater_margin);
  put_num(j, "transform_condition", rep.transform_condition);
  {
    Json v;
    put_num(v, "primal", rep.primal_value);
    put_num(v, "classical_dual", rep.classical_dual_value);
    put_num(v, "strong_dual", rep.strong_dual_value);
    put_num(v, "ramana", rep.ramana_value);
    put_num(v, "gap", rep.gap);
    put_num(v, "ramana_solver", rep.ramana_solver_value);
    put_num(v, "primal_solver", rep.primal_solver_value);
    put_num(v, "extract", rep.extract_objective);
    j["values"] = std::move(v);
  }
  {
    Json s;
    s["classical"] = rep.classical_status;
    s["strong"] = rep.strong_status;
    s["primal"] = rep.primal_status;
    s["ramana_solver"] = rep.ramana_solver_status;
    j["statuses"] = std::move(s);
  }
  {
    Json a;
    a["classical"] = rep.classical_attainment;
    put_num(a, "classical_max_iterate_norm", rep.classical_max_iterate_norm);
    a["ramana_attained"] = rep.ramana_attained;
    j["attainment"] = std::move(a);
  }
  {
    Json c;
    c["valid"] = rep.certificate_valid;
    c["k"] = static_cast<int>(rep.block_sizes.size());
    c["block_sizes"] = rep.block_sizes;
    put_num(c, "eq_residual", rep.certificate_eq_residual);
    put_num(c, "pattern_residual", rep.certificate_pattern_residual);
    j["certificate"] = std::move(c);
  }
  {
    Json r;
    r["verified"] = rep.ramana_verified;
    put_num(r, "residual", rep.ramana_residual);
    j["ramana"] = std::move(r);
  }
  j["warnings"] = rep.warnings;
  return j;
}

GapReport analysis_report_from_json(const Json& j, std::string* digest) {
  const std::string bad = require_schema(j, "analysis-report/1");
  if (!bad.empty()) throw Error("analysis-report JSON: " + bad);
  try {
    GapReport rep;
    const Json& inst = j.at("instance");
    if (digest) *digest = inst.at("digest").get<std::string>();
    rep.n = inst.at("n").get<int>();
    rep.m = inst.at("m").get<int>();
    rep.face_rank = j.at("face_rank").get<int>();
    rep.reduction_steps = j.at("reduction_steps").get<int>();
    rep.slater_margin = get_num(j, "slater_margin");
    rep.transform_condition = get_num(j, "transform_condition");
    const Json& v = j.at("values");
    rep.primal_value = get_num(v, "primal");
    rep.classical_dual_value = get_num(v, "classical_dual");
    rep.strong_dual_value = get_num(v, "strong_dual");
    rep.ramana_value = get_num(v, "ramana");
    rep.gap = get_num(v, "gap");
    rep.ramana_solver_value = get_num(v, "ramana_solver");
    rep.primal_solver_value = get_num(v, "primal_solver");
    rep.extract_objective = get_num(v, "extract");
    const Json& s = j.at("statuses");
    rep.classical_status = s.at("classical").get<std::string>();
    rep.strong_status = s.at("strong").get<std::string>();
    rep.primal_status = s.at("primal").get<std::string>();
    rep.ramana_solver_status = s.at("ramana_solver").get<std::string>();
    const Json& a = j.at("attainment");
    rep.classical_attainment = a.at("classical").get<std::string>();
    rep.classical_max_iterate_norm = get_num(a, "classical_max_iterate_norm");
    rep.ramana_attained = a.at("ramana_attained").get<bool>();
    const Json& c = j.at("certificate");
    rep.certificate_valid = c.at("valid").get<bool>();
    rep.block_sizes = c.at("block_sizes").get<std::vector<int>>();
    rep.certificate_eq_residual = get_num(c, "eq_residual");
    rep.certificate_pattern_residual = get_num(c, "pattern_residual");
    const Json& r = j.at("ramana");
    rep.ramana_verified = r.at("verified").get<bool>();
    rep.ramana_residual = get_num(r, "residual");
    rep.warnings = j.at("warnings").get<std::vector<std::string>>();
    return rep;
  } catch (const Json::exception& e) {
    throw Error(std::string("analysis-report JSON: ") + e.what());
  }
}

std::vector<std::string> validate_analysis_report(const Json& j) {
  std::vector<std::string> errs;
  const std::string bad = require_schema(j, "analysis-report/1");
  if (!bad.empty()) {
    errs.push_back(bad);
    return errs;
  }
  auto need = [&](const Json& obj, const char* key, const char* where,
                  auto pred, const char* what) {
    if (!obj.is_object() || !obj.contains(key)) {
      errs.push_back(std::string(where) + " is missing '" + key + "'");
      return;
    }
    if (!pred(obj.at(key)))
      errs.push_back(std::string(where) + "." + key + " must be " + what);
  };
  auto is_int = [](const Json& v) { return v.is_number_integer(); };
  auto is_numnull = [](const Json& v) { return v.is_number() || v.is_null(); };
  auto is_str = [](const Json& v) { return v.is_string(); };
  auto is_bool = [](const Json& v) { return v.is_boolean(); };
  auto is_strarr = [](const Json& v) {
    if (!v.is_array()) return false;
    for (const Json& e : v)
      if (!e.is_string()) return false;
    return true;
  };
  auto is_intarr = [](const Json& v) {
    if (!v.is_array()) return false;
    for (const Json& e : v)
      if (!e.is_number_integer()) return false;
    return true;
  };

  if (!j.contains("instance") || !j.at("instance").is_object()) {
    errs.push_back("missing object field 'instance'");
  } else {
    const Json& inst = j.at("instance");
    need(inst, "digest", "instance", is_str, "a string");
    need(inst, "n", "instance", is_int, "an integer");
    need(inst, "m", "instance", is_int, "an integer");
  }
  need(j, "face_rank", "report", is_int, "an integer");
  need(j, "reduction_steps", "report", is_int, "an integer");
  need(j, "slater_margin", "report", is_numnull, "a number or null");
  need(j, "transform_condition", "report", is_numnull, "a number or null");
  if (!j.contains("values") || !j.at("values").is_object()) {
    errs.push_back("missing object field 'values'");
  } else {
    for (const char* key : {"primal", "classical_dual", "strong_dual",
                            "ramana", "gap", "ramana_solver", "primal_solver",
                            "extract"})
      need(j.at("values"), key, "values", is_numnull, "a number or null");
  }
  if (!j.contains("statuses") || !j.at("statuses").is_object()) {
    errs.push_back("missing object field 'statuses'");
  } else {
    for (const char* key : {"classical", "strong", "primal", "ramana_solver"})
      need(j.at("statuses"), key, "statuses", is_str, "a string");
  }
  if (!j.contains("attainment") || !j.at("attainment").is_object()) {
    errs.push_back("missing object field 'attainment'");
  } else {
    const Json& a = j.at("attainment");
    need(a, "classical", "attainment", is_str, "a string");
    need(a, "classical_max_iterate_norm", "attainment", is_numnull,
         "a number or null");
    need(a, "ramana_attained", "attainment", is_bool, "a boolean");
    if (a.contains("classical") && a.at("classical").is_string()) {
      const std::string v = a.at("classical").get<std::string>();
      if (v != "attained" && v != "suspected-non-attained" && v != "unknown")
        errs.push_back("attainment.classical has unknown value '" + v + "'");
    }
  }
  if (!j.contains("certificate") || !j.at("certificate").is_object()) {
    errs.push_back("missing object field 'certificate'");
  } else {
    const Json& c = j.at("certificate");
    need(c, "valid", "certificate", is_bool, "a boolean");
    need(c, "k", "certificate", is_int, "an integer");
    need(c, "block_sizes", "certificate", is_intarr,
         "an array of integers");
    need(c, "eq_residual", "certificate", is_numnull, "a number or null");
    need(c, "pattern_residual", "certificate", is_numnull,
         "a number or null");
    if (c.contains("k") && c.contains("block_sizes") &&
        c.at("k").is_number_integer() && c.at("block_sizes").is_array() &&
        c.at("k").get<int>() !=
            static_cast<int>(c.at("block_sizes").size()))
      errs.push_back("certificate.k disagrees with certificate.block_sizes");
  }
  if (!j.contains("ramana") || !j.at("ramana").is_object()) {
    errs.push_back("missing object field 'ramana'");
  } else {
    need(j.at("ramana"), "verified", "ramana", is_bool, "a boolean");
    need(j.at("ramana"), "residual", "ramana", is_numnull,
         "a number or null");
  }
  need(j, "warnings", "report", is_strarr, "an array of strings");
  return errs;
}

std::string instance_digest(const SdpInstance& inst) {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  char buf[64];
  auto feed_num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    feed(buf);
  };
  feed(std::to_string(inst.n) + ";" + std::to_string(inst.m) + ";");
  for (int i = 0; i < inst.n; ++i)
    for (int k = i; k < inst.n; ++k) feed_num(inst.B(i, k));
  for (const SymMat& a : inst.A)
    for (int i = 0; i < inst.n; ++i)
      for (int k = i; k < inst.n; ++k) feed_num(a(i, k));
  for (double v : inst.c) feed_num(v);
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    int line = 1;
    const std::size_t stop =
        e.byte < text.size() ? e.byte : text.size();
    for (std::size_t i = 0; i < stop; ++i)
      if (text[i] == '\n') ++line;
    throw ParseError(line, e.what());
  }
}

Json parse_json_file(const std::string& path) {
  return parse_json(read_file(path));
}

}  // namespace ramana
