#include "spinframe/job.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "spinframe/sweep.hpp"

namespace spinframe {

namespace {

const char* known_commands[] = {"verify", "extract", "curvature", "gcr",
                                "compose", "immerse", "example"};

bool lex_less(const Vec4& a, const Vec4& b) {
  for (int i = 0; i < 4; ++i) {
    if (a[static_cast<std::size_t>(i)] < b[static_cast<std::size_t>(i)]) return true;
    if (a[static_cast<std::size_t>(i)] > b[static_cast<std::size_t>(i)]) return false;
  }
  return false;
}

GridSpec grid_from_json(const Json& j) {
  GridSpec g;
  if (j.contains("x0")) g.x0 = j.at("x0").get<double>();
  auto triple = [&](const char* key, auto& out, auto cast) {
    if (!j.contains(key)) return;
    const Json& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 3)
      throw SchemaError(std::string("grid '") + key + "' must be an array of 3 values");
    for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = cast(arr[static_cast<std::size_t>(i)]);
  };
  triple("min", g.min, [](const Json& v) { return v.get<double>(); });
  triple("max", g.max, [](const Json& v) { return v.get<double>(); });
  triple("counts", g.counts, [](const Json& v) { return v.get<int>(); });
  for (int c : g.counts)
    if (c < 1) throw SchemaError("grid counts must be >= 1");
  return g;
}

VielbeinField vielbein_from_json(const Json& j) {
  if (j.contains("diag")) {
    const Json& d = j.at("diag");
    if (!d.is_array() || d.size() != 4)
      throw SchemaError("vielbein 'diag' must hold 4 expressions");
    std::array<std::string, 4> diag;
    for (int i = 0; i < 4; ++i) diag[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)].get<std::string>();
    VielbeinField v = VielbeinField::zero();
    for (int mu = 0; mu < 4; ++mu)
      v.theta[static_cast<std::size_t>(mu)][static_cast<std::size_t>(mu)] =
          parse_named(diag[static_cast<std::size_t>(mu)], "vielbein.diag[" + std::to_string(mu) + "]");
    return v;
  }
  if (j.contains("rows")) {
    const Json& rows = j.at("rows");
    if (!rows.is_array() || rows.size() != 4)
      throw SchemaError("vielbein 'rows' must hold 4 rows of 10 expressions");
    VielbeinField v = VielbeinField::zero();
    for (int alpha = 0; alpha < 4; ++alpha) {
      const Json& row = rows[static_cast<std::size_t>(alpha)];
      if (!row.is_array() || row.size() != 10)
        throw SchemaError("vielbein 'rows' must hold 4 rows of 10 expressions");
      for (int i = 0; i < 10; ++i)
        v.theta[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(i)] = parse_named(
            row[static_cast<std::size_t>(i)].get<std::string>(),
            "vielbein.rows[" + std::to_string(alpha) + "][" + std::to_string(i) + "]");
    }
    return v;
  }
  throw SchemaError("vielbein needs 'diag' or 'rows'");
}

PathSpec path_from_json(const Json& j) {
  PathSpec p;
  if (!j.contains("waypoints") || !j.at("waypoints").is_array() || j.at("waypoints").size() < 2)
    throw SchemaError("path needs at least 2 'waypoints'");
  for (const auto& w : j.at("waypoints")) p.waypoints.push_back(vec4_from_json(w));
  if (j.contains("steps_per_segment")) {
    p.steps_per_segment = j.at("steps_per_segment").get<int>();
    if (p.steps_per_segment < 1) throw SchemaError("steps_per_segment must be >= 1");
  }
  return p;
}

}  // namespace

JobSpec job_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("job file must hold a JSON object");
  JobSpec job;
  job.raw = j;

  if (!j.contains("command")) throw SchemaError("job needs a 'command'");
  job.command = j.at("command").get<std::string>();
  bool known = false;
  for (const char* c : known_commands) known = known || job.command == c;
  if (!known) throw SchemaError("unknown command '" + job.command + "'");

  if (j.contains("field")) job.field = spin_field_from_json(j.at("field"));
  if (job.command != "example" && !job.field)
    throw SchemaError("command '" + job.command + "' needs a 'field'");

  if (j.contains("points")) {
    if (!j.at("points").is_array()) throw SchemaError("'points' must be an array");
    for (const auto& p : j.at("points")) job.points.push_back(vec4_from_json(p));
  }
  if (j.contains("grid")) job.grid = grid_from_json(j.at("grid"));

  if (j.contains("fd")) {
    if (j.at("fd").contains("step")) job.fd.step = j.at("fd").at("step").get<double>();
    if (!(job.fd.step > 0.0)) throw SchemaError("fd.step must be > 0");
  }

  if (j.contains("tolerances")) {
    if (!j.at("tolerances").is_object()) throw SchemaError("'tolerances' must be an object");
    for (const auto& [key, value] : j.at("tolerances").items()) {
      double v = value.get<double>();
      if (!(v > 0.0)) throw SchemaError("tolerance '" + key + "' must be > 0");
      job.tolerances[key] = v;
    }
  }

  if (j.contains("output")) {
    if (j.at("output").contains("path")) job.out_path = j.at("output").at("path").get<std::string>();
    if (j.at("output").contains("format")) {
      job.format = j.at("output").at("format").get<std::string>();
      if (job.format != "json" && job.format != "csv")
        throw SchemaError("output.format must be 'json' or 'csv'");
    }
  }

  if (j.contains("threads")) {
    job.threads = j.at("threads").get<int>();
    if (job.threads < 0) throw SchemaError("threads must be >= 0");
  }

  if (j.contains("vielbein")) job.vielbein = vielbein_from_json(j.at("vielbein"));
  if (j.contains("path")) job.path = path_from_json(j.at("path"));
  if (j.contains("init")) {
    const Json& init = j.at("init");
    if (init.contains("q")) {
      const Json& q = init.at("q");
      if (!q.is_array() || q.size() != 10) throw SchemaError("init.q must hold 10 numbers");
      for (int i = 0; i < 10; ++i)
        job.init_q[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)].get<double>();
    }
    if (init.contains("frame")) {
      job.init_frame = init.at("frame").get<std::string>();
      if (job.init_frame != "from_field" && job.init_frame != "identity")
        throw SchemaError("init.frame must be 'from_field' or 'identity'");
    }
  }
  if (j.contains("cloud")) {
    const Json& cloud = j.at("cloud");
    if (cloud.contains("path")) job.cloud_path = cloud.at("path").get<std::string>();
    if (cloud.contains("format")) {
      job.cloud_format = cloud.at("format").get<std::string>();
      if (job.cloud_format != "csv" && job.cloud_format != "obj")
        throw SchemaError("cloud.format must be 'csv' or 'obj'");
    }
    if (cloud.contains("steps_per_edge")) {
      job.steps_per_edge = cloud.at("steps_per_edge").get<int>();
      if (job.steps_per_edge < 1) throw SchemaError("cloud.steps_per_edge must be >= 1");
    }
    if (cloud.contains("projection")) {
      const Json& proj = cloud.at("projection");
      if (!proj.is_array() || proj.size() != 3)
        throw SchemaError("cloud.projection must hold 3 component indices");
      for (int i = 0; i < 3; ++i) {
        int c = proj[static_cast<std::size_t>(i)].get<int>();
        if (c < 0 || c > 9) throw SchemaError("cloud.projection components must be in 0..9");
        job.obj_projection[static_cast<std::size_t>(i)] = c;
      }
    }
    if (cloud.contains("q")) {
      const Json& q = cloud.at("q");
      if (!q.is_array() || q.size() != 10) throw SchemaError("cloud.q must hold 10 numbers");
      std::array<double, 10> base{};
      for (int i = 0; i < 10; ++i)
        base[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)].get<double>();
      job.cloud_q = base;
    }
  }

  bool needs_points = job.command == "verify" || job.command == "extract" ||
                      job.command == "curvature" || job.command == "gcr" ||
                      job.command == "compose";
  if (needs_points && job.points.empty() && !job.grid)
    throw SchemaError("command '" + job.command + "' needs 'points' or a 'grid'");
  if (job.command == "immerse") {
    if (!job.path) throw SchemaError("command 'immerse' needs a 'path'");
    if (!job.vielbein) throw SchemaError("command 'immerse' needs a 'vielbein'");
  }
  if (job.command == "compose") {
    const auto* prod = std::get_if<ProductSpec>(&job.field->node());
    if (!prod || prod->factors.size() < 2)
      throw SchemaError("command 'compose' needs field.family == 'product' with >= 2 factors");
    const auto& first = prod->factors.front().node();
    if (!std::holds_alternative<TypeASpec>(first) && !std::holds_alternative<TypeBSpec>(first) &&
        !std::holds_alternative<ExampleFieldSpec>(first))
      throw SchemaError("compose: the first product factor must be typeA or typeB");
  }
  return job;
}

JobSpec load_job(const std::string& file_path) {
  std::ifstream f(file_path);
  if (!f) throw SchemaError("cannot read job file " + file_path);
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw SchemaError("job file is not valid JSON: " + std::string(e.what()));
  }
  return job_from_json(j);
}

namespace {

std::vector<Vec4> resolve_points(const JobSpec& job) {
  std::vector<Vec4> pts = job.points;
  if (pts.empty() && job.grid) {
    for (int i = 0; i < job.grid->counts[0]; ++i)
      for (int jx = 0; jx < job.grid->counts[1]; ++jx)
        for (int k = 0; k < job.grid->counts[2]; ++k) pts.push_back(job.grid->coord(i, jx, k));
  }
  std::sort(pts.begin(), pts.end(), lex_less);
  return pts;
}

Json meta_block(const JobSpec& job) {
  return Json{{"tool", "spinframe"}, {"format_version", 1}, {"command", job.command},
              {"job", job.raw}};
}

std::string csv_point_prefix(const Vec4& x) {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    out += format_double17(x[static_cast<std::size_t>(i)]);
    out += ',';
  }
  return out;
}

// Each worker fills its own slot; any thrown exception survives the sweep.
template <class Fn>
void sweep_points(const std::vector<Vec4>& pts, int threads, Fn&& fn) {
  sweep::run_parallel(pts.size(), [&](std::size_t i) { fn(i, pts[i]); }, threads);
}

JobResult run_verify(const JobSpec& job) {
  std::vector<Vec4> pts = resolve_points(job);
  double tol_grade = job.tolerance("grade1", 1e-10);
  double tol_norm = job.tolerance("normalization", 1e-10);

  struct Row {
    SpinCheck check;
  };
  std::vector<Row> rows(pts.size());
  sweep_points(pts, job.threads,
               [&](std::size_t i, const Vec4& x) { rows[i].check = check_spin(*job.field, x, tol_grade); });

  JobResult result;
  Json points = Json::array();
  int failures = 0;
  double max_norm = 0.0, max_grade = 0.0;
  std::string csv = "x0,x1,x2,x3,normalization_residual,max_grade_residual,pass\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SpinCheck& c = rows[i].check;
    Json failing = Json::array();
    double worst_grade = 0.0;
    for (int idx = 0; idx < 10; ++idx) {
      worst_grade = std::max(worst_grade, c.grade_residual[static_cast<std::size_t>(idx)]);
      if (!c.sandwich_grade_ok[static_cast<std::size_t>(idx)])
        failing.push_back(Json{{"frame_index", idx},
                               {"grade_residual", c.grade_residual[static_cast<std::size_t>(idx)]},
                               {"deformed", multivector_to_json(c.deformed[static_cast<std::size_t>(idx)])}});
    }
    bool pass = failing.empty() && c.normalization_residual < tol_norm;
    if (!pass) ++failures;
    max_norm = std::max(max_norm, c.normalization_residual);
    max_grade = std::max(max_grade, worst_grade);
    points.push_back(Json{{"x", vec4_to_json(pts[i])},
                          {"normalization_residual", c.normalization_residual},
                          {"failing_indices", failing},
                          {"pass", pass}});
    csv += csv_point_prefix(pts[i]) + format_double17(c.normalization_residual) + ',' +
           format_double17(worst_grade) + ',' + (pass ? "1" : "0") + '\n';
  }
  result.exit_code = failures == 0 ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"points", points},
                       {"summary", Json{{"count", pts.size()},
                                        {"failures", failures},
                                        {"max_residuals", Json{{"normalization", max_norm},
                                                               {"grade1", max_grade}}}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

JobResult run_extract(const JobSpec& job) {
  std::vector<Vec4> pts = resolve_points(job);
  double tol_grade2 = job.tolerance("grade2", 1e-8);
  double tol_recon = job.tolerance("reconstruction", 1e-8);

  std::vector<KillingData> rows(pts.size());
  sweep_points(pts, job.threads,
               [&](std::size_t i, const Vec4& x) { rows[i] = killing_extract(*job.field, x); });

  JobResult result;
  Json points = Json::array();
  int failures = 0;
  double max_grade2 = 0.0, max_recon = 0.0;
  std::string csv = "x0,x1,x2,x3,block,alpha,first,second,value\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const KillingData& k = rows[i];
    ConnectionAtPoint conn = split_connection(k);
    double g2 = *std::max_element(k.grade2_residual.begin(), k.grade2_residual.end());
    double rc = *std::max_element(k.reconstruction_residual.begin(), k.reconstruction_residual.end());
    bool pass = g2 < tol_grade2 && rc < tol_recon;
    if (!pass) ++failures;
    max_grade2 = std::max(max_grade2, g2);
    max_recon = std::max(max_recon, rc);
    Json record = killing_to_json(k);
    record["connection"] = connection_to_json(conn);
    record["pass"] = pass;
    points.push_back(record);
    std::string conn_csv = connection_to_csv(conn);
    std::size_t header_end = conn_csv.find('\n');
    std::string body = conn_csv.substr(header_end + 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t next = body.find('\n', pos);
      csv += csv_point_prefix(pts[i]) + body.substr(pos, next - pos) + '\n';
      pos = next + 1;
    }
  }
  result.exit_code = failures == 0 ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"points", points},
                       {"summary", Json{{"count", pts.size()},
                                        {"failures", failures},
                                        {"max_residuals", Json{{"grade2", max_grade2},
                                                               {"reconstruction", max_recon}}}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

JobResult run_curvature(const JobSpec& job) {
  std::vector<Vec4> pts = resolve_points(job);
  ConnectionField source = connection_source(*job.field);

  std::vector<CurvatureAtPoint> rows(pts.size());
  sweep_points(pts, job.threads,
               [&](std::size_t i, const Vec4& x) { rows[i] = curvature(source, x, job.fd); });

  JobResult result;
  Json points = Json::array();
  double max_gauss = 0.0, max_codazzi = 0.0, max_ricci = 0.0;
  std::string csv = "x0,x1,x2,x3,block,alpha,beta,first,second,value\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Json record = curvature_to_json(rows[i]);
    record["x"] = vec4_to_json(pts[i]);
    points.push_back(record);
    max_gauss = std::max(max_gauss, rows[i].gauss_residual);
    max_codazzi = std::max(max_codazzi, rows[i].codazzi_residual);
    max_ricci = std::max(max_ricci, rows[i].ricci_residual);
    std::string curv_csv = curvature_to_csv(rows[i]);
    std::size_t header_end = curv_csv.find('\n');
    std::string body = curv_csv.substr(header_end + 1);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t next = body.find('\n', pos);
      csv += csv_point_prefix(pts[i]) + body.substr(pos, next - pos) + '\n';
      pos = next + 1;
    }
  }
  result.report = Json{{"meta", meta_block(job)},
                       {"points", points},
                       {"summary", Json{{"count", pts.size()},
                                        {"max_residuals", Json{{"gauss", max_gauss},
                                                               {"codazzi", max_codazzi},
                                                               {"ricci", max_ricci}}}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

JobResult run_gcr(const JobSpec& job) {
  std::vector<Vec4> pts = resolve_points(job);
  double tol = job.tolerance("gcr", 1e-4);
  ConnectionField source = connection_source(*job.field);

  std::vector<GcrResiduals> rows(pts.size());
  sweep_points(pts, job.threads,
               [&](std::size_t i, const Vec4& x) { rows[i] = gcr_residuals(source, x, job.fd); });

  JobResult result;
  Json points = Json::array();
  int failures = 0;
  double max_res = 0.0;
  std::string csv = "x0,x1,x2,x3,gauss,codazzi,ricci\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const GcrResiduals& r = rows[i];
    bool pass = r.max() < tol;
    if (!pass) ++failures;
    max_res = std::max(max_res, r.max());
    points.push_back(Json{{"x", vec4_to_json(pts[i])},
                          {"gauss", r.gauss},
                          {"codazzi", r.codazzi},
                          {"ricci", r.ricci},
                          {"pass", pass}});
    csv += csv_point_prefix(pts[i]) + format_double17(r.gauss) + ',' + format_double17(r.codazzi) +
           ',' + format_double17(r.ricci) + '\n';
  }
  result.exit_code = failures == 0 ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"points", points},
                       {"summary", Json{{"count", pts.size()},
                                        {"failures", failures},
                                        {"max_residuals", Json{{"gcr", max_res}}}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

JobResult run_compose(const JobSpec& job) {
  std::vector<Vec4> pts = resolve_points(job);
  double tol = job.tolerance("compose", 1e-10);
  const auto& prod = std::get<ProductSpec>(job.field->node());

  SpinFieldSpec psi2 = prod.factors.size() == 2
                           ? prod.factors[1]
                           : SpinFieldSpec(ProductSpec{{prod.factors.begin() + 1, prod.factors.end()}});

  std::vector<ComposedConnection> rows(pts.size());
  sweep_points(pts, job.threads, [&](std::size_t i, const Vec4& x) {
    ConnectionAtPoint conn2 = split_connection(killing_extract(psi2, x));
    const auto& first = prod.factors.front().node();
    if (const auto* a = std::get_if<TypeASpec>(&first))
      rows[i] = compose_connection_A(*a, x, conn2);
    else if (std::holds_alternative<ExampleFieldSpec>(first))
      rows[i] = compose_connection_A(example_field_params(), x, conn2);
    else
      rows[i] = compose_connection_B(std::get<TypeBSpec>(first), x, conn2);
  });

  JobResult result;
  Json points = Json::array();
  int failures = 0;
  double max_dev = 0.0;
  std::string csv = "x0,x1,x2,x3,formula_deviation,oracle_override\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ComposedConnection& c = rows[i];
    bool pass = c.formula_deviation < tol;
    if (!pass) ++failures;
    max_dev = std::max(max_dev, c.formula_deviation);
    points.push_back(Json{{"x", vec4_to_json(pts[i])},
                          {"primed", connection_to_json(c.primed)},
                          {"inputs", Json{{"conn1", connection_to_json(c.conn1)},
                                          {"conn2", connection_to_json(c.conn2)},
                                          {"f", c.f},
                                          {"f_mixed", c.f_mixed}}},
                          {"formula_deviation", c.formula_deviation},
                          {"oracle_override", c.oracle_override},
                          {"pass", pass}});
    csv += csv_point_prefix(pts[i]) + format_double17(c.formula_deviation) + ',' +
           (c.oracle_override ? "1" : "0") + '\n';
  }
  result.exit_code = failures == 0 ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"points", points},
                       {"summary", Json{{"count", pts.size()},
                                        {"failures", failures},
                                        {"max_residuals", Json{{"compose", max_dev}}}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

JobResult run_immerse(const JobSpec& job) {
  double tol_drift = job.tolerance("ortho_drift", 1e-8);
  double tol_exact = job.tolerance("exactness", 1e-4);
  ConnectionField source = connection_source(*job.field);

  FrameState init = job.init_frame == "identity"
                        ? FrameState::identity()
                        : FrameState::from_field(*job.field, job.path->waypoints.front(), job.init_q);
  init.q = job.init_q;

  FrameIntegration frames = integrate_frame(source, *job.path, init);
  std::vector<FrameState> states = integrate_position(*job.vielbein, frames, *job.path);

  double max_exact = 0.0;
  for (const Vec4& w : job.path->waypoints)
    max_exact = std::max(max_exact, exactness_check(*job.vielbein, source, w, job.fd));

  Json cloud_info;
  if (job.grid) {
    std::array<double, 10> base_q = job.cloud_q ? *job.cloud_q : job.init_q;
    FrameState base = job.init_frame == "identity"
                          ? FrameState::identity()
                          : FrameState::from_field(*job.field, job.grid->coord(0, 0, 0), base_q);
    base.q = base_q;
    PointCloudOptions opts;
    opts.steps_per_edge = job.steps_per_edge;
    opts.obj_projection = job.obj_projection;
    std::vector<CloudPoint> cloud = compute_pointcloud(source, *job.vielbein, *job.grid, base, opts);
    if (!job.cloud_path.empty()) {
      if (job.cloud_format == "csv")
        write_pointcloud_csv(cloud, job.cloud_path);
      else
        write_pointcloud_obj(cloud, job.cloud_path, job.obj_projection);
    }
    cloud_info = Json{{"points", cloud.size()}, {"path", job.cloud_path}, {"format", job.cloud_format}};
  }

  bool pass = frames.max_orthonormality_drift < tol_drift && max_exact < tol_exact;

  JobResult result;
  Json nodes = Json::array();
  // Per-waypoint states only; per-step data would swamp the report.
  std::size_t per_segment = static_cast<std::size_t>(job.path->steps_per_segment);
  for (std::size_t w = 0; w < job.path->waypoints.size(); ++w) {
    const FrameState& s = states[w * per_segment];
    nodes.push_back(Json{{"x", vec4_to_json(job.path->waypoints[w])}, {"q", s.q}});
  }
  std::string csv = "index,x0,x1,x2,x3,q0,q1,q2,q3,q4,q5,q6,q7,q8,q9\n";
  for (std::size_t w = 0; w < job.path->waypoints.size(); ++w) {
    const FrameState& s = states[w * per_segment];
    csv += std::to_string(w) + ',' + csv_point_prefix(job.path->waypoints[w]);
    for (int i = 0; i < 10; ++i) {
      csv += format_double17(s.q[static_cast<std::size_t>(i)]);
      csv += i == 9 ? '\n' : ',';
    }
  }

  result.exit_code = pass ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"waypoints", nodes},
                       {"cloud", cloud_info},
                       {"summary", Json{{"count", job.path->waypoints.size()},
                                        {"max_residuals",
                                         Json{{"orthonormality_drift", frames.max_orthonormality_drift},
                                              {"exactness", max_exact}}},
                                        {"pass", pass}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

// Fixed-point comparison table for the built-in example field: closed
// forms against extraction, curvature, metric, and the immersion map.
JobResult run_example(const JobSpec& job);

}  // namespace

JobResult run_job(const JobSpec& job) {
  if (job.command == "verify") return run_verify(job);
  if (job.command == "extract") return run_extract(job);
  if (job.command == "curvature") return run_curvature(job);
  if (job.command == "gcr") return run_gcr(job);
  if (job.command == "compose") return run_compose(job);
  if (job.command == "immerse") return run_immerse(job);
  return run_example(job);
}

namespace {

double example_r2(const Vec4& x) { return x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; }

// Closed immersion map of the example field.
std::array<double, 10> example_map(const Vec4& x) {
  std::array<double, 10> q{};
  double s = 1.0 / (1.0 + example_r2(x));
  q[0] = x[0];
  q[1] = x[1] * s;
  q[2] = x[2] * s;
  q[3] = x[3] * s;
  q[5] = s;
  return q;
}

VielbeinField example_vielbein() {
  return VielbeinField::diagonal(
      {"1", "1/(1+x1^2+x2^2+x3^2)", "1/(1+x1^2+x2^2+x3^2)", "1/(1+x1^2+x2^2+x3^2)"});
}

JobResult run_example(const JobSpec& job) {
  const std::vector<Vec4> pts = {{0.0, 0.0, 0.0, 0.0},
                                 {0.0, 1.0, 0.0, 0.0},
                                 {0.0, 0.3, -0.2, 0.5},
                                 {0.5, -0.4, 0.25, 0.6},
                                 {0.0, 0.2, 0.1, -0.1}};
  SpinFieldSpec field((ExampleFieldSpec()));
  const TypeASpec& params = example_field_params();

  Json table = Json::array();
  double worst = 0.0;
  int failures = 0;
  std::string csv = "quantity,x0,x1,x2,x3,abs_err,tolerance,pass\n";
  auto add_row = [&](const char* quantity, const Vec4& x, double err, double tol) {
    bool pass = err < tol;
    if (!pass) ++failures;
    worst = std::max(worst, err);
    table.push_back(Json{{"quantity", quantity}, {"x", vec4_to_json(x)}, {"abs_err", err},
                         {"tolerance", tol}, {"pass", pass}});
    csv += std::string(quantity) + ',' + csv_point_prefix(x) + format_double17(err) + ',' +
           format_double17(tol) + ',' + (pass ? "1\n" : "0\n");
  };

  ConnectionField extracted = connection_source(field);
  ConnectionField closed = typeA_connection_source(params);

  for (const Vec4& x : pts) {
    double r2 = example_r2(x);
    double s = 1.0 / (1.0 + r2);

    // H: diagonal -2/(1+r^2) on the spatial tangent block, zero elsewhere.
    ConnectionAtPoint conn = extracted.value(x);
    double h_err = 0.0;
    for (int al = 0; al < 4; ++al)
      for (int m = 0; m < 4; ++m)
        for (int i = 0; i < 6; ++i) {
          double want = (al == m && m != 0 && i == 1) ? -2.0 * s : 0.0;
          h_err = std::max(h_err, std::fabs(conn.H[al][m][i] - want));
        }
    add_row("H", x, h_err, 1e-8);

    // omega: the nine displayed entries.
    auto want_omega = [&](int al, int m, int n) -> double {
      if (al == 0 || m == 0 || n == 0) return 0.0;
      if (al == 1 && m == 1 && n == 2) return 2.0 * x[2] * s;
      if (al == 1 && m == 1 && n == 3) return 2.0 * x[3] * s;
      if (al == 1 && m == 2 && n == 3) return 0.0;
      if (al == 2 && m == 1 && n == 2) return -2.0 * x[1] * s;
      if (al == 2 && m == 1 && n == 3) return 0.0;
      if (al == 2 && m == 2 && n == 3) return 2.0 * x[3] * s;
      if (al == 3 && m == 1 && n == 2) return 0.0;
      if (al == 3 && m == 1 && n == 3) return -2.0 * x[1] * s;
      if (al == 3 && m == 2 && n == 3) return -2.0 * x[2] * s;
      return 0.0;
    };
    double omega_err = 0.0;
    for (int al = 0; al < 4; ++al)
      for (int m = 0; m < 4; ++m)
        for (int n = m + 1; n < 4; ++n)
          omega_err = std::max(omega_err, std::fabs(conn.omega[al][m][n] - want_omega(al, m, n)));
    add_row("omega", x, omega_err, 1e-8);

    // R via the closed-form derivative path.
    CurvatureAtPoint curv = curvature(closed, x, job.fd);
    double want_r = -4.0 * s * s;
    double r_err = 0.0;
    for (int al = 0; al < 4; ++al)
      for (int be = al + 1; be < 4; ++be)
        for (int m = 0; m < 4; ++m)
          for (int n = m + 1; n < 4; ++n) {
            double want = (al == m && be == n && al != 0) ? want_r : 0.0;
            r_err = std::max(r_err, std::fabs(curv.R[al][be][m][n] - want));
          }
    add_row("R", x, r_err, 1e-9);

    GcrResiduals gcr = gcr_residuals(extracted, x, job.fd);
    add_row("gcr", x, gcr.max(), 1e-4);
  }

  // Immersion: integrate from the origin to each sample point.
  VielbeinField vielbein = example_vielbein();
  for (const Vec4& x : pts) {
    Vec4 base{x[0], 0.0, 0.0, 0.0};
    FrameState init = FrameState::from_field(field, base, example_map(base));
    PathSpec path;
    path.waypoints = {base, x};
    path.steps_per_segment = 128;
    FrameState end = integrate_state(extracted, vielbein, path, init);
    std::array<double, 10> want = example_map(x);
    double q_err = 0.0;
    for (int i = 0; i < 10; ++i)
      q_err = std::max(q_err, std::fabs(end.q[static_cast<std::size_t>(i)] -
                                        want[static_cast<std::size_t>(i)]));
    add_row("immersion", x, q_err, 1e-6);

    // Induced metric via short integrated legs along each spatial axis.
    double h = 1e-3;
    double metric_err = 0.0;
    for (int m = 1; m < 4; ++m) {
      Vec4 xp = x, xm = x;
      xp[static_cast<std::size_t>(m)] += h;
      xm[static_cast<std::size_t>(m)] -= h;
      PathSpec legp{{x, xp}, 8}, legm{{x, xm}, 8};
      FrameState start = FrameState::from_field(field, x, example_map(x));
      FrameState endp = integrate_state(extracted, vielbein, legp, start);
      FrameState endm = integrate_state(extracted, vielbein, legm, start);
      double g = 0.0;
      for (int i = 0; i < 10; ++i) {
        double d = (endp.q[static_cast<std::size_t>(i)] - endm.q[static_cast<std::size_t>(i)]) /
                   (2.0 * h);
        g += eta(i) * d * d;
      }
      double s = 1.0 / (1.0 + example_r2(x));
      metric_err = std::max(metric_err, std::fabs(g - s * s));
    }
    add_row("metric", x, metric_err, 1e-5);
  }

  JobResult result;
  result.exit_code = failures == 0 ? 0 : 1;
  result.report = Json{{"meta", meta_block(job)},
                       {"table", table},
                       {"summary", Json{{"failures", failures}, {"max_abs_err", worst}}}};
  result.rendered = job.format == "csv" ? csv : result.report.dump(2) + "\n";
  return result;
}

}  // namespace

void write_report(const JobSpec& job, const JobResult& result) {
  if (job.out_path.empty()) return;
  std::ofstream f(job.out_path, std::ios::binary);
  if (!f) throw Error("cannot open output file " + job.out_path);
  f << result.rendered;
}

std::string job_schema_text() {
  static const char* schema = R"JSON({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "spinframe job",
  "type": "object",
  "required": ["command"],
  "properties": {
    "command": {"enum": ["verify", "extract", "curvature", "gcr", "compose", "immerse", "example"]},
    "field": {"$ref": "#/definitions/spin_field"},
    "points": {"type": "array", "items": {"$ref": "#/definitions/point"}},
    "grid": {
      "type": "object",
      "properties": {
        "x0": {"type": "number"},
        "min": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "max": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
        "counts": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 3, "maxItems": 3}
      }
    },
    "fd": {"type": "object", "properties": {"step": {"type": "number", "exclusiveMinimum": 0}}},
    "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
    "output": {
      "type": "object",
      "properties": {"path": {"type": "string"}, "format": {"enum": ["json", "csv"]}}
    },
    "threads": {"type": "integer", "minimum": 0},
    "vielbein": {
      "type": "object",
      "properties": {
        "diag": {"type": "array", "items": {"type": "string"}, "minItems": 4, "maxItems": 4},
        "rows": {"type": "array", "minItems": 4, "maxItems": 4,
                 "items": {"type": "array", "items": {"type": "string"}, "minItems": 10, "maxItems": 10}}
      }
    },
    "path": {
      "type": "object",
      "required": ["waypoints"],
      "properties": {
        "waypoints": {"type": "array", "items": {"$ref": "#/definitions/point"}, "minItems": 2},
        "steps_per_segment": {"type": "integer", "minimum": 1}
      }
    },
    "init": {
      "type": "object",
      "properties": {
        "q": {"type": "array", "items": {"type": "number"}, "minItems": 10, "maxItems": 10},
        "frame": {"enum": ["from_field", "identity"]}
      }
    },
    "cloud": {
      "type": "object",
      "properties": {
        "path": {"type": "string"},
        "format": {"enum": ["csv", "obj"]},
        "steps_per_edge": {"type": "integer", "minimum": 1},
        "projection": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 9}, "minItems": 3, "maxItems": 3},
        "q": {"type": "array", "items": {"type": "number"}, "minItems": 10, "maxItems": 10}
      }
    }
  },
  "definitions": {
    "point": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
    "expr": {"type": "string"},
    "spin_field": {
      "type": "object",
      "required": ["family"],
      "oneOf": [
        {"properties": {"family": {"const": "rotation"},
                        "plane": {"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 9}, "minItems": 2, "maxItems": 2},
                        "angle": {"$ref": "#/definitions/expr"}},
         "required": ["family", "plane", "angle"]},
        {"properties": {"family": {"const": "typeA"},
                        "normal_index": {"type": "integer", "minimum": 4, "maximum": 9},
                        "f": {"$ref": "#/definitions/expr"},
                        "fA": {"type": "array", "items": {"$ref": "#/definitions/expr"}, "minItems": 4, "maxItems": 4}},
         "required": ["family", "normal_index", "f", "fA"]},
        {"properties": {"family": {"const": "typeB"},
                        "tangent_index": {"type": "integer", "minimum": 0, "maximum": 3},
                        "f": {"$ref": "#/definitions/expr"},
                        "fB": {"type": "array", "items": {"$ref": "#/definitions/expr"}, "minItems": 6, "maxItems": 6}},
         "required": ["family", "tangent_index", "f", "fB"]},
        {"properties": {"family": {"const": "product"},
                        "factors": {"type": "array", "items": {"$ref": "#/definitions/spin_field"}, "minItems": 1}},
         "required": ["family", "factors"]},
        {"properties": {"family": {"const": "paper_example"}}, "required": ["family"]},
        {"properties": {"family": {"const": "constant"},
                        "terms": {"type": "array"}},
         "required": ["family", "terms"]}
      ]
    }
  }
}
)JSON";
  return schema;
}

}  // namespace spinframe
