#include "rhls/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rhls {

namespace {

ojson point_to_json(const Point& p, int dim) {
  ojson a = ojson::array();
  for (int d = 0; d < dim; ++d) a.push_back(p[d]);
  return a;
}

Point point_from_json(const ojson& j) {
  Point p{};
  for (std::size_t d = 0; d < j.size() && d < 3; ++d) p[d] = j[d].get<double>();
  return p;
}

ojson points_to_json(const std::vector<Point>& pts, int dim) {
  ojson a = ojson::array();
  for (const auto& p : pts) a.push_back(point_to_json(p, dim));
  return a;
}

ojson cell_to_json(const Cell& cell, int dim) {
  ojson j;
  if (const auto* box = std::get_if<BoxCell>(&cell)) {
    j["type"] = "box";
    j["lo"] = point_to_json(box->lo, dim);
    j["hi"] = point_to_json(box->hi, dim);
  } else if (const auto* pc = std::get_if<PolarCell>(&cell)) {
    j["type"] = "polar";
    j["r"] = {pc->r0, pc->r1};
    j["theta"] = {pc->th0, pc->th1};
  } else if (const auto* sc = std::get_if<SphericalCell>(&cell)) {
    j["type"] = "spherical";
    j["r"] = {sc->r0, sc->r1};
    j["cos_theta"] = {sc->c0, sc->c1};
    j["phi"] = {sc->ph0, sc->ph1};
  }
  return j;
}

Cell cell_from_json(const ojson& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "box") {
    BoxCell c{};
    c.lo = point_from_json(j.at("lo"));
    c.hi = point_from_json(j.at("hi"));
    return c;
  }
  if (type == "polar") {
    PolarCell c{};
    c.r0 = j.at("r")[0];
    c.r1 = j.at("r")[1];
    c.th0 = j.at("theta")[0];
    c.th1 = j.at("theta")[1];
    return c;
  }
  if (type == "spherical") {
    SphericalCell c{};
    c.r0 = j.at("r")[0];
    c.r1 = j.at("r")[1];
    c.c0 = j.at("cos_theta")[0];
    c.c1 = j.at("cos_theta")[1];
    c.ph0 = j.at("phi")[0];
    c.ph1 = j.at("phi")[1];
    return c;
  }
  throw ConsistencyError("unknown cell type: " + type);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

ojson mesh_to_json(const Mesh& mesh) {
  ojson j;
  j["dim"] = mesh.dim;
  j["shape_tag"] = shape_tag_name(mesh.shape_tag);
  j["nodes"] = points_to_json(mesh.nodes, mesh.dim);
  j["weights"] = mesh.weights;
  ojson cells = ojson::array();
  for (const auto& c : mesh.cells) cells.push_back(cell_to_json(c, mesh.dim));
  j["cells"] = cells;
  ojson b;
  b["nodes"] = points_to_json(mesh.boundary_nodes, mesh.dim);
  b["weights"] = mesh.boundary_weights;
  b["normals"] = points_to_json(mesh.boundary_normals, mesh.dim);
  j["boundary"] = b;
  ojson shape;
  if (mesh.shape_tag == ShapeTag::ball) {
    shape["center"] = point_to_json(mesh.center, mesh.dim);
    shape["radius"] = mesh.radius;
  } else if (mesh.shape_tag != ShapeTag::polygon) {
    shape["lows"] = point_to_json(mesh.lows, mesh.dim);
    shape["highs"] = point_to_json(mesh.highs, mesh.dim);
  }
  j["shape"] = shape;
  j["diameter"] = mesh.analytic_diameter;
  return j;
}

MeshPtr mesh_from_json(const ojson& j) {
  try {
    auto mesh = std::make_shared<Mesh>();
    mesh->dim = j.at("dim").get<int>();
    mesh->shape_tag = shape_tag_from_name(j.at("shape_tag").get<std::string>());
    for (const auto& p : j.at("nodes")) mesh->nodes.push_back(point_from_json(p));
    mesh->weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("cells"))
      for (const auto& c : j.at("cells")) mesh->cells.push_back(cell_from_json(c));
    const auto& b = j.at("boundary");
    for (const auto& p : b.at("nodes"))
      mesh->boundary_nodes.push_back(point_from_json(p));
    mesh->boundary_weights = b.at("weights").get<std::vector<double>>();
    for (const auto& p : b.at("normals"))
      mesh->boundary_normals.push_back(point_from_json(p));
    if (j.contains("shape")) {
      const auto& s = j.at("shape");
      if (s.contains("center")) mesh->center = point_from_json(s.at("center"));
      if (s.contains("radius")) mesh->radius = s.at("radius").get<double>();
      if (s.contains("lows")) mesh->lows = point_from_json(s.at("lows"));
      if (s.contains("highs")) mesh->highs = point_from_json(s.at("highs"));
    }
    if (j.contains("diameter"))
      mesh->analytic_diameter = j.at("diameter").get<double>();
    if (mesh->nodes.size() != mesh->weights.size() ||
        mesh->boundary_nodes.size() != mesh->boundary_weights.size() ||
        mesh->boundary_nodes.size() != mesh->boundary_normals.size())
      throw ConsistencyError("mesh arrays have inconsistent lengths");
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw ConsistencyError(std::string("malformed mesh JSON: ") + e.what());
  }
}

ojson to_json(const SharpConstant& c) {
  return ojson{{"n", c.n}, {"alpha", c.alpha}, {"value", c.value}};
}

ojson to_json(const EnergyReport& r) {
  ojson j;
  j["numerator"] = r.numerator;
  j["qnorm"] = r.qnorm;
  j["quotient"] = r.quotient;
  j["q"] = r.q;
  j["lambda"] = r.lambda;
  j["N_alpha"] = r.N_alpha;
  if (r.margin)
    j["margin"] = *r.margin;
  else
    j["margin"] = nullptr;
  return j;
}

ojson to_json(const SweepReport& r) {
  ojson j;
  j["n"] = r.n;
  j["alpha"] = r.alpha;
  j["lambda"] = r.lambda;
  j["R"] = r.R;
  j["center"] = point_to_json(r.center, r.n);
  ojson eps = ojson::array(), quo = ojson::array(), pts = ojson::array();
  for (const auto& p : r.points) {
    eps.push_back(p.epsilon);
    quo.push_back(p.quotient);
    pts.push_back(ojson{{"epsilon", p.epsilon},
                        {"quotient", p.quotient},
                        {"gap", p.gap},
                        {"tail_gap", p.tail_gap},
                        {"lambda_term", p.lambda_term},
                        {"dip", p.dip}});
  }
  j["epsilons"] = eps;
  j["quotients"] = quo;
  j["points"] = pts;
  if (r.fitted_slope)
    j["fitted_slope"] = *r.fitted_slope;
  else
    j["fitted_slope"] = nullptr;
  j["dip_detected"] = r.dip_detected;
  j["regime"] = r.regime;
  j["calibration"] = ojson{{"epsilon", r.calibration_epsilon},
                           {"margin", r.calibration_margin},
                           {"tol_disc", r.tol_disc}};
  return j;
}

ojson to_json(const SolveTrace& t, bool include_iterates) {
  ojson j;
  j["q"] = t.q;
  j["lambda"] = t.lambda;
  j["alpha"] = t.alpha;
  j["status"] = solve_status_name(t.status);
  j["iterations"] = t.iterations;
  j["residual"] = t.residual;
  j["multiplier"] = t.multiplier;
  j["raw_scale"] = t.raw_scale;
  j["floor_activations"] = t.floor_activations;
  if (!t.iterates.empty()) {
    const auto& last = t.iterates.back();
    j["min_f"] = last.min_f;
    j["max_f"] = last.max_f;
    j["quotient"] = last.quotient;
  }
  if (include_iterates) {
    ojson arr = ojson::array();
    for (const auto& it : t.iterates)
      arr.push_back(ojson{{"residual", it.residual},
                          {"min_f", it.min_f},
                          {"max_f", it.max_f},
                          {"quotient", it.quotient}});
    j["iterates"] = arr;
  }
  return j;
}

ojson to_json(const PohozaevReport& r) {
  ojson j;
  j["p"] = r.p;
  j["lhs"] = r.lhs;
  j["volume_term"] = r.volume_term;
  j["boundary_term"] = r.boundary_term;
  j["residual"] = r.residual;
  j["relative_residual"] = r.relative_residual;
  j["volume_kernel"] =
      r.variant == PohozaevVolumeKernel::derived ? "derived" : "statement";
  return j;
}

ojson to_json(const SymmetryReport& r) {
  ojson j;
  j["radial_spread"] = r.radial_spread;
  j["monotone_violations"] = r.monotone_violations;
  j["bins"] = r.bins;
  j["bin_means"] = r.bin_means;
  j["bin_counts"] = r.bin_counts;
  return j;
}

ojson to_json(const MovingPlaneResult& r) {
  ojson j;
  j["plane_lambda"] = r.plane_lambda;
  j["min_slack"] = r.min_slack;
  j["samples"] = r.sample_nodes.size();
  j["slacks"] = r.slacks;
  return j;
}

ojson to_json(const BlowupReport& r, bool include_points) {
  ojson j;
  j["mu_q"] = r.mu_q;
  j["argmax_index"] = r.argmax_index;
  j["argmax_tie_broken"] = r.argmax_tie_broken;
  j["fitted_C1"] = r.fitted_C1;
  j["fitted_C2"] = r.fitted_C2;
  j["envelope_ratio"] = r.fitted_C2 / r.fitted_C1;
  if (include_points) j["h_values"] = r.h_values;
  return j;
}

ojson to_json(const ContinuationResult& r) {
  ojson j;
  ojson pts = ojson::array();
  for (const auto& p : r.points)
    pts.push_back(ojson{{"q", p.q},
                        {"Q_lambda_q", p.Q},
                        {"min_f", p.min_f},
                        {"max_f", p.max_f},
                        {"residual", p.residual}});
  j["points"] = pts;
  j["extrapolated_Q"] = r.extrapolated_Q;
  j["extrapolation_method"] = r.extrapolation_method;
  return j;
}

ojson to_json(const NonexistenceReport& r) {
  ojson j;
  j["classification"] = probe_classification_name(r.classification);
  j["anomaly"] = r.anomaly;
  j["pohozaev_pass_tol"] = r.pohozaev_pass_tol;
  ojson runs = ojson::array();
  for (const auto& run : r.runs) {
    ojson jr;
    jr["restart"] = run.restart;
    jr["status"] = solve_status_name(run.status);
    jr["residual"] = run.residual;
    if (std::isnan(run.pohozaev_rel))
      jr["pohozaev_rel"] = nullptr;
    else
      jr["pohozaev_rel"] = run.pohozaev_rel;
    runs.push_back(jr);
  }
  j["runs"] = runs;
  return j;
}

ojson solution_to_json(const SolveTrace& trace, const ojson& config) {
  ojson j;
  j["format"] = "rhls-solution-1";
  j["config"] = config;
  const Mesh& mesh = *trace.final_field.mesh;
  j["mesh_hash"] = hash_hex(mesh_hash(mesh));
  j["alpha"] = trace.alpha;
  j["lambda"] = trace.lambda;
  j["q"] = trace.q;
  j["status"] = solve_status_name(trace.status);
  j["multiplier"] = trace.multiplier;
  j["raw_scale"] = trace.raw_scale;
  j["residual"] = trace.residual;
  j["iterations"] = trace.iterations;
  j["field"] = trace.final_field.values;
  j["mesh"] = mesh_to_json(mesh);
  return j;
}

LoadedSolution solution_from_json(const ojson& j) {
  try {
    if (j.at("format").get<std::string>() != "rhls-solution-1")
      throw ConsistencyError("unknown solution format");
    LoadedSolution s;
    s.mesh = mesh_from_json(j.at("mesh"));
    const std::string stored = j.at("mesh_hash").get<std::string>();
    if (stored != hash_hex(mesh_hash(*s.mesh)))
      throw ConsistencyError("mesh hash mismatch: solution does not belong to this mesh");
    s.field = j.at("field").get<std::vector<double>>();
    if (s.field.size() != s.mesh->nodes.size())
      throw ConsistencyError("field length does not match mesh");
    s.alpha = j.at("alpha").get<double>();
    s.lambda = j.at("lambda").get<double>();
    s.q = j.at("q").get<double>();
    s.multiplier = j.at("multiplier").get<double>();
    s.raw_scale = j.at("raw_scale").get<double>();
    s.residual = j.at("residual").get<double>();
    s.status = j.at("status").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConsistencyError(std::string("malformed solution JSON: ") + e.what());
  }
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "epsilon,quotient,quotient_minus_N,dip\n";
  for (const auto& p : r.points)
    os << fmt_double(p.epsilon) << ',' << fmt_double(p.quotient) << ','
       << fmt_double(p.gap) << ',' << (p.dip ? 1 : 0) << '\n';
  return os.str();
}

std::string iterations_csv(const SolveTrace& t) {
  std::ostringstream os;
  os << "iter,residual,min_f,max_f,quotient\n";
  for (std::size_t i = 0; i < t.iterates.size(); ++i)
    os << i << ',' << fmt_double(t.iterates[i].residual) << ','
       << fmt_double(t.iterates[i].min_f) << ','
       << fmt_double(t.iterates[i].max_f) << ','
       << fmt_double(t.iterates[i].quotient) << '\n';
  return os.str();
}

std::string continuation_csv(const ContinuationResult& r) {
  std::ostringstream os;
  os << "q,Q_lambda_q,min_f,max_f,residual\n";
  for (const auto& p : r.points)
    os << fmt_double(p.q) << ',' << fmt_double(p.Q) << ','
       << fmt_double(p.min_f) << ',' << fmt_double(p.max_f) << ','
       << fmt_double(p.residual) << '\n';
  return os.str();
}

std::string solution_csv(const Mesh& mesh, const std::vector<double>& field,
                         double raw_scale) {
  std::ostringstream os;
  os << "x0";
  for (int d = 1; d < mesh.dim; ++d) os << ",x" << d;
  os << ",f,f_raw\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (int d = 0; d < mesh.dim; ++d)
      os << (d ? "," : "") << fmt_double(mesh.nodes[i][d]);
    os << ',' << fmt_double(field[i]) << ',' << fmt_double(raw_scale * field[i])
       << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConsistencyError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ConsistencyError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConsistencyError("cannot open: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace rhls
