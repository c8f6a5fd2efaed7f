#include "orbitflow/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "orbitflow/adjoint.hpp"

namespace orbitflow::cli {

namespace {

// Round to 12 significant digits so reports are byte-stable across runs.
double rounded(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return doc;
}

double require_number(const Json& j, const std::string& field, const std::string& ctx) {
  if (!j.contains(field)) throw ParseError(ctx + ": missing field '" + field + "'");
  const Json& v = j.at(field);
  if (!v.is_number()) throw ParseError(ctx + ": field '" + field + "' must be a real number");
  return v.get<double>();
}

int require_int(const Json& j, const std::string& field, const std::string& ctx) {
  if (!j.contains(field)) throw ParseError(ctx + ": missing field '" + field + "'");
  const Json& v = j.at(field);
  if (!v.is_number_integer()) throw ParseError(ctx + ": field '" + field + "' must be an integer");
  return v.get<int>();
}

Matrix parse_square_matrix(const Json& rows, int n, const std::string& ctx) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n)
    throw ParseError(ctx + ": expected " + std::to_string(n) + " rows");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const Json& row = rows.at(static_cast<size_t>(r));
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError(ctx + ": row " + std::to_string(r + 1) + " must have " +
                       std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      const Json& e = row.at(static_cast<size_t>(c));
      if (!e.is_number()) throw ParseError(ctx + ": matrix entries must be real numbers");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

struct CheckList {
  Json results = Json::array();
  bool all_pass = true;

  void add_bool(const std::string& name, bool pass, double tolerance) {
    results.push_back({{"name", name},
                       {"pass", pass},
                       {"tolerance", tolerance}});
    all_pass = all_pass && pass;
  }
  void add_value(const std::string& name, double value, double tolerance) {
    results.push_back({{"name", name},
                       {"value", rounded(value)},
                       {"tolerance", tolerance}});
  }
  void add_text(const std::string& name, const std::string& value) {
    results.push_back({{"name", name}, {"value", value}});
  }
  void skip(const std::string& name, const std::string& reason) {
    results.push_back({{"name", name}, {"skipped", true}, {"reason", reason}});
  }
};

Json report_header(const std::string& command, const Json& inputs, const GlobalOptions& opts) {
  Json r;
  r["artifact_version"] = kArtifactVersion;
  r["command"] = command;
  r["seed"] = opts.seed;
  r["inputs"] = inputs;
  return r;
}

Json flow_to_json(const FlowReport& flow) {
  Json f;
  f["verdict"] = to_string(flow.verdict);
  f["steps_taken"] = flow.steps_taken;
  f["final_grad_norm"] = rounded(flow.final_grad_norm);
  f["final_moment_norm_sq"] = rounded(flow.final_moment_norm_sq);
  if (flow.critical_constant) f["critical_constant"] = rounded(*flow.critical_constant);
  if (!flow.trajectory_samples.empty()) {
    Json samples = Json::array();
    for (const auto& s : flow.trajectory_samples)
      samples.push_back({{"step", s.step},
                         {"moment_norm_sq", rounded(s.moment_norm_sq)},
                         {"grad_norm", rounded(s.grad_norm)}});
    f["trajectory"] = samples;
  }
  return f;
}

Partition parse_partition_spec(const std::string& spec) {
  Partition p;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      p.parts.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ParseError("invalid partition spec: " + spec);
    }
  }
  if (!p.valid()) throw ParseError("not a weakly decreasing positive partition: " + spec);
  return p;
}

FlowConfig flow_config(const Scenario& sc, const GlobalOptions& opts) {
  FlowConfig cfg = sc.flow;
  if (opts.max_steps > 0) cfg.max_steps = opts.max_steps;
  cfg.sample_every = opts.sample_every;
  return cfg;
}

}  // namespace

Json bracket_to_json(const BracketTensor& mu) {
  Json list = Json::array();
  for (int i = 0; i < mu.dim(); ++i)
    for (int j = i + 1; j < mu.dim(); ++j)
      for (int k = 0; k < mu.dim(); ++k)
        if (std::abs(mu.c(i, j, k)) > 1e-14)
          list.push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"c", rounded(mu.c(i, j, k))}});
  return Json{{"dim", mu.dim()}, {"brackets", list}};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(rounded(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Scenario load_scenario(const std::string& path) {
  Json doc = load_json(path);
  if (!doc.is_object()) throw ParseError(path + ": top level must be an object");
  if (require_int(doc, "schema_version", path) != kSchemaVersion)
    throw ParseError(path + ": unsupported schema_version");
  const int n = require_int(doc, "dim", path);
  if (n < 1) throw ParseError(path + ": dim must be positive");

  Scenario sc;
  sc.bracket = BracketTensor(n);
  if (!doc.contains("brackets") || !doc.at("brackets").is_array())
    throw ParseError(path + ": missing 'brackets' list");
  std::set<std::tuple<int, int, int>> seen;
  for (const Json& rec : doc.at("brackets")) {
    const std::string ctx = path + ": bracket record";
    const int i = require_int(rec, "i", ctx);
    const int j = require_int(rec, "j", ctx);
    const int k = require_int(rec, "k", ctx);
    const double c = require_number(rec, "c", ctx);
    if (i < 1 || i > n || j < 1 || j > n || k < 1 || k > n)
      throw ParseError(ctx + ": indices must be in 1.." + std::to_string(n));
    if (i == j) throw ParseError(ctx + ": antisymmetry forces i != j");
    auto key = std::make_tuple(std::min(i, j), std::max(i, j), k);
    if (!seen.insert(key).second)
      throw ParseError(ctx + ": duplicate structure constant (" + std::to_string(i) + "," +
                       std::to_string(j) + "," + std::to_string(k) + ")");
    sc.bracket.set(i - 1, j - 1, k - 1, i < j ? c : -c);
  }

  if (doc.contains("derivations")) {
    const Json& ds = doc.at("derivations");
    if (!ds.is_array()) throw ParseError(path + ": 'derivations' must be a list of matrices");
    for (size_t d = 0; d < ds.size(); ++d)
      sc.derivations.push_back(
          parse_square_matrix(ds.at(d), n, path + ": derivation " + std::to_string(d + 1)));
  }
  if (doc.contains("split")) {
    SumSplit split;
    split.dim_1 = require_int(doc.at("split"), "dim_1", path + ": split");
    split.dim_2 = require_int(doc.at("split"), "dim_2", path + ": split");
    if (split.dim() != n) throw ParseError(path + ": split dims must sum to dim");
    sc.split = split;
  }
  if (doc.contains("flow")) {
    const Json& f = doc.at("flow");
    if (f.contains("max_steps")) sc.flow.max_steps = require_int(f, "max_steps", path);
    if (f.contains("grad_tol")) sc.flow.grad_tol = require_number(f, "grad_tol", path);
    if (f.contains("initial_step")) sc.flow.initial_step = require_number(f, "initial_step", path);
  }

  sc.echo = bracket_to_json(sc.bracket);
  if (!sc.derivations.empty()) {
    Json ds = Json::array();
    for (const Matrix& D : sc.derivations) ds.push_back(matrix_to_json(D));
    sc.echo["derivations"] = ds;
  }
  if (sc.split) sc.echo["split"] = {{"dim_1", sc.split->dim_1}, {"dim_2", sc.split->dim_2}};
  return sc;
}

Matrix load_matrix(const std::string& path) {
  Json doc = load_json(path);
  const int n = require_int(doc, "dim", path);
  if (n < 1) throw ParseError(path + ": dim must be positive");
  if (!doc.contains("entries") || !doc.at("entries").is_array() ||
      static_cast<int>(doc.at("entries").size()) != n * n)
    throw ParseError(path + ": 'entries' must hold dim*dim row-major numbers");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Json& e = doc.at("entries").at(static_cast<size_t>(r * n + c));
      if (!e.is_number()) throw ParseError(path + ": entries must be real numbers");
      m(r, c) = e.get<double>();
    }
  return m;
}

std::vector<Matrix> load_matrix_list(const std::string& path) {
  Json doc = load_json(path);
  const int n = require_int(doc, "dim", path);
  if (!doc.contains("matrices") || !doc.at("matrices").is_array() || doc.at("matrices").empty())
    throw ParseError(path + ": 'matrices' must be a nonempty list");
  std::vector<Matrix> out;
  size_t idx = 0;
  for (const Json& rows : doc.at("matrices")) {
    ++idx;
    const std::string ctx = path + ": matrix " + std::to_string(idx);
    if (!rows.is_array() || static_cast<int>(rows.size()) != n * n)
      throw ParseError(ctx + ": expected dim*dim row-major numbers");
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const Json& e = rows.at(static_cast<size_t>(r * n + c));
        if (!e.is_number()) throw ParseError(ctx + ": entries must be real numbers");
        m(r, c) = e.get<double>();
      }
    out.push_back(m);
  }
  return out;
}

CommandResult cmd_soliton(const std::string& path, const GlobalOptions& opts) {
  Scenario sc = load_scenario(path);
  Json report = report_header("soliton", sc.echo, opts);
  CheckList checks;

  const double jres = sc.bracket.norm() > 0 ? jacobi_residual(sc.bracket.normalized()) : 0.0;
  checks.add_value("jacobi_residual", jres, tol::jacobi);
  checks.add_bool("jacobi_ok", jres <= tol::jacobi, tol::jacobi);

  SolitonResult result = soliton_verdict(sc.bracket, flow_config(sc, opts));
  checks.add_text("verdict", to_string(result.kind));
  if (result.critical_constant)
    checks.add_value("critical_constant", *result.critical_constant, opts.tol);
  checks.add_value("final_moment_norm_sq", result.flow.final_moment_norm_sq, 0.0);
  checks.add_value("iterations", static_cast<double>(result.flow.steps_taken), 0.0);
  checks.add_bool("soliton_found", result.kind == SolitonKind::EinsteinNilradical, opts.tol);

  report["results"] = checks.results;
  if (result.soliton_point) report["soliton_bracket"] = bracket_to_json(*result.soliton_point);
  report["pass"] = checks.all_pass;
  return {report, checks.all_pass};
}

CommandResult cmd_detect(const std::string& path, const GlobalOptions& opts) {
  Scenario sc = load_scenario(path);
  if (sc.derivations.empty() && !sc.split)
    throw ParseError(path + ": detect needs 'derivations' and/or 'split'");
  Json report = report_header("detect", sc.echo, opts);
  CheckList checks;
  const double tolerance = opts.tol;

  for (size_t d = 0; d < sc.derivations.size(); ++d) {
    const Matrix& D = sc.derivations[d];
    const std::string tag = "derivation_" + std::to_string(d + 1);
    BlockStructure blocks = eigenspace_blocks(D);
    Json sizes = Json::array();
    for (int s : blocks.block_sizes) sizes.push_back(s);
    checks.results.push_back({{"name", tag + ".block_sizes"}, {"value", sizes}});

    const bool member = in_W(sc.bracket, D, tolerance);
    checks.add_bool(tag + ".in_W", member, tolerance);
    if (!member) {
      checks.skip(tag + ".graded_bracket", "bracket is not in W for this derivation");
      checks.skip(tag + ".moment_in_h", "bracket is not in W for this derivation");
      checks.skip(tag + ".tangent_ranks_equal", "bracket is not in W for this derivation");
      continue;
    }
    checks.add_bool(tag + ".graded_bracket", graded_bracket_check(sc.bracket, blocks, tolerance),
                    tolerance);
    checks.add_bool(tag + ".moment_in_h", check_detection(sc.bracket, blocks, tolerance),
                    tolerance);
    auto [cap, horb] = tangent_intersection_rank(sc.bracket, blocks);
    checks.add_value(tag + ".dim_tangent_intersection", cap, 0.0);
    checks.add_value(tag + ".dim_h_orbit", horb, 0.0);
    checks.add_bool(tag + ".tangent_ranks_equal", cap == horb, 0.0);

    if (opts.flow_compare && sc.bracket.norm() > 0) {
      std::vector<Matrix> gens;
      for (int a = 0; a < blocks.dim; ++a)
        for (int b = a; b < blocks.dim; ++b)
          if (blocks.block_of(a) == blocks.block_of(b)) {
            Matrix E = blocks.basis.col(a) * blocks.basis.col(b).transpose();
            gens.push_back(0.5 * (E + E.transpose()));
          }
      FlowConfig cfg = flow_config(sc, opts);
      FlowReport full = run_flow(sc.bracket, cfg);
      FlowReport restricted = run_flow_restricted(sc.bracket, gens, cfg);
      checks.add_value(tag + ".flow_moment_norm_sq", full.final_moment_norm_sq, 1e-6);
      checks.add_value(tag + ".restricted_flow_moment_norm_sq",
                       restricted.final_moment_norm_sq, 1e-6);
      checks.add_bool(
          tag + ".flow_limits_agree",
          std::abs(full.final_moment_norm_sq - restricted.final_moment_norm_sq) <= 1e-6 &&
              full.verdict == restricted.verdict,
          1e-6);
    }
  }

  if (sc.split) {
    try {
      auto [mu1, mu2] = split_direct_sum(sc.bracket, *sc.split, tolerance);
      checks.add_bool("split.is_ideal_sum", true, tolerance);
      checks.add_bool("split.moment_block_diagonal",
                      check_sum_detection(sc.bracket, *sc.split, tolerance), tolerance);
      auto [cap, horb] = tangent_intersection_rank(sc.bracket, *sc.split);
      checks.add_value("split.dim_tangent_intersection", cap, 0.0);
      checks.add_value("split.dim_h_orbit", horb, 0.0);
      checks.add_bool("split.tangent_ranks_equal", cap == horb, 0.0);
      FlowConfig cfg = flow_config(sc, opts);
      SolitonResult s1 = soliton_verdict(mu1, cfg);
      SolitonResult s2 = soliton_verdict(mu2, cfg);
      checks.add_text("split.factor_1_verdict", to_string(s1.kind));
      checks.add_text("split.factor_2_verdict", to_string(s2.kind));
      checks.add_bool("split.factors_einstein",
                      s1.kind == SolitonKind::EinsteinNilradical &&
                          s2.kind == SolitonKind::EinsteinNilradical,
                      tolerance);
    } catch (const NotAnIdealSum& e) {
      checks.add_bool("split.is_ideal_sum", false, tolerance);
      checks.skip("split.moment_block_diagonal", e.what());
    }
  }

  report["results"] = checks.results;
  report["pass"] = checks.all_pass;
  return {report, checks.all_pass};
}

CommandResult cmd_flow(const std::string& path, const GlobalOptions& opts) {
  Scenario sc = load_scenario(path);
  Json report = report_header("flow", sc.echo, opts);
  FlowConfig cfg = flow_config(sc, opts);
  if (cfg.sample_every == 0) cfg.sample_every = std::max<long>(1, cfg.max_steps / 100);
  FlowReport flow = run_flow(sc.bracket, cfg);
  report["results"] = Json::array(
      {Json{{"name", "verdict"}, {"value", to_string(flow.verdict)}},
       Json{{"name", "final_grad_norm"}, {"value", rounded(flow.final_grad_norm)},
            {"tolerance", cfg.grad_tol}}});
  report["flow"] = flow_to_json(flow);
  report["final_bracket"] = bracket_to_json(flow.final_point);
  const bool pass = flow.verdict != FlowVerdict::NotConverged;
  report["pass"] = pass;
  return {report, pass};
}

CommandResult cmd_adjoint_rep(const std::string& partition_spec, const GlobalOptions& opts) {
  Partition p = parse_partition_spec(partition_spec);
  Json report = report_header("adjoint rep", Json{{"partition", p.to_string()}}, opts);
  Matrix X = jordan_rep(p);
  CheckList checks;
  std::optional<double> c = verify_adjoint_distinguished(X, opts.tol);
  if (c)
    checks.add_value("critical_constant", *c, opts.tol);
  else
    checks.add_text("critical_constant", "ABSENT");
  checks.add_bool("distinguished", c.has_value(), opts.tol);
  report["matrix"] = matrix_to_json(X);
  report["results"] = checks.results;
  report["pass"] = checks.all_pass;
  return {report, checks.all_pass};
}

CommandResult cmd_adjoint_classify(const std::string& path, const GlobalOptions& opts) {
  Matrix X = load_matrix(path);
  Json report = report_header("adjoint classify", Json{{"matrix", matrix_to_json(X)}}, opts);
  Partition p = classify_nilpotent_orbit(X);
  report["results"] =
      Json::array({Json{{"name", "partition"}, {"value", p.to_string()}}});
  report["pass"] = true;
  return {report, true};
}

CommandResult cmd_adjoint_verify(const std::string& path, const GlobalOptions& opts) {
  Matrix X = load_matrix(path);
  Json report = report_header("adjoint verify", Json{{"matrix", matrix_to_json(X)}}, opts);
  CheckList checks;
  std::optional<double> c = verify_adjoint_distinguished(X, opts.tol);
  if (c)
    checks.add_value("critical_constant", *c, opts.tol);
  else
    checks.add_text("critical_constant", "ABSENT");
  checks.add_bool("distinguished", c.has_value(), opts.tol);
  report["results"] = checks.results;
  report["pass"] = checks.all_pass;
  return {report, checks.all_pass};
}

CommandResult cmd_adjoint_partitions(int n, const GlobalOptions& opts) {
  Json report = report_header("adjoint partitions", Json{{"n", n}}, opts);
  Json list = Json::array();
  for (const Partition& p : enumerate_partitions(n)) list.push_back(p.to_string());
  report["results"] = Json::array({Json{{"name", "count"}, {"value", list.size()}}});
  report["partitions"] = list;
  report["pass"] = true;
  return {report, true};
}

CommandResult cmd_adjoint_detect(const std::string& matrix_path, const std::string& basis_path,
                                 const GlobalOptions& opts) {
  Matrix X = load_matrix(matrix_path);
  std::vector<Matrix> basis = load_matrix_list(basis_path);
  Json report = report_header("adjoint detect", Json{{"matrix", matrix_to_json(X)}}, opts);
  CheckList checks;
  const bool in_span = subalgebra_detection_check(X, basis, opts.tol);
  checks.add_bool("moment_in_subalgebra", in_span, opts.tol);
  report["results"] = checks.results;
  report["pass"] = checks.all_pass;
  return {report, checks.all_pass};
}

std::string render_text(const CommandResult& result) {
  std::ostringstream out;
  out << result.report.at("command").get<std::string>() << " (artifact "
      << kArtifactVersion << ")\n";
  if (result.report.contains("results"))
    for (const Json& r : result.report.at("results")) {
      out << "  " << r.at("name").get<std::string>() << ": ";
      if (r.contains("skipped"))
        out << "SKIPPED (" << r.at("reason").get<std::string>() << ")";
      else if (r.contains("pass"))
        out << (r.at("pass").get<bool>() ? "PASS" : "FAIL");
      else if (r.contains("value"))
        out << r.at("value").dump();
      if (r.contains("tolerance") && r.at("tolerance").get<double>() > 0)
        out << "  [tol " << r.at("tolerance").get<double>() << "]";
      out << "\n";
    }
  if (result.report.contains("partitions"))
    for (const Json& p : result.report.at("partitions"))
      out << "  " << p.get<std::string>() << "\n";
  out << (result.pass ? "OK" : "FAILED") << "\n";
  return out.str();
}

}  // namespace orbitflow::cli
