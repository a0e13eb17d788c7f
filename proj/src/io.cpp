#include "tentpitcher/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tentpitcher/constraints.hpp"
#include <nlohmann/json.hpp>

namespace tentpitcher {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& name, int line,
                             const std::string& what) {
  throw TpError(ErrorCode::ParseError,
                name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string Config::to_json() const {
  json j;
  j["mode"] = PitchPolicy::mode_name(policy.mode);
  j["epsilon"] = policy.params.epsilon;
  j["phi_bar"] = policy.params.phi_bar;
  j["gamma"] = policy.params.gamma;
  j["delta"] = policy.params.delta_margin;
  j["horizon"] = policy.horizon;
  j["lookahead"] = policy.lookahead;
  j["target_time"] = policy.target_time;
  j["step_budget"] = policy.step_budget;
  j["seed"] = policy.seed;
  j["lazy"] = policy.lazy_propagation;
  j["heuristic"] =
      policy.selection == PitchPolicy::Selection::GlobalMin ? "global-min"
      : policy.selection == PitchPolicy::Selection::RandomLocalMin
          ? "random-local-min"
          : "max-guarantee";
  if (std::isfinite(xi1)) j["xi1"] = xi1;
  j["xi2"] = xi2;
  return j.dump();
}

Config Config::from_json(const std::string& text) {
  const json j = json::parse(text);
  Config c;
  c.policy.mode = PitchPolicy::parse_mode(j.at("mode").get<std::string>());
  c.policy.params.epsilon = j.at("epsilon").get<double>();
  c.policy.params.phi_bar = j.at("phi_bar").get<double>();
  c.policy.params.gamma = j.at("gamma").get<double>();
  c.policy.params.delta_margin = j.at("delta").get<double>();
  c.policy.horizon = j.at("horizon").get<int>();
  c.policy.lookahead = j.at("lookahead").get<int>();
  c.policy.target_time = j.at("target_time").get<double>();
  c.policy.step_budget = j.at("step_budget").get<long>();
  c.policy.seed = j.at("seed").get<unsigned long long>();
  c.policy.lazy_propagation = j.at("lazy").get<bool>();
  const std::string h = j.at("heuristic").get<std::string>();
  c.policy.selection = h == "random-local-min"
                           ? PitchPolicy::Selection::RandomLocalMin
                       : h == "max-guarantee"
                           ? PitchPolicy::Selection::MaxGuarantee
                           : PitchPolicy::Selection::GlobalMin;
  c.xi1 = (j.contains("xi1") && j["xi1"].is_number())
              ? j["xi1"].get<double>()
              : std::numeric_limits<double>::infinity();
  c.xi2 = j.value("xi2", 0.0);
  return c;
}

SpaceMesh parse_mesh(std::istream& in, const std::string& name) {
  SpaceMesh mesh;
  std::string word;
  int line = 1;
  auto expect = [&](const std::string& key) {
    if (!(in >> word) || word != key)
      parse_fail(name, line, "expected '" + key + "'");
  };
  expect("dim");
  if (!(in >> mesh.dim) || (mesh.dim != 1 && mesh.dim != 2))
    parse_fail(name, line, "dim must be 1 or 2");
  line = 2;
  expect("vertices");
  size_t nv = 0;
  if (!(in >> nv)) parse_fail(name, line, "vertex count");
  line = 3;
  for (size_t i = 0; i < nv; ++i, ++line) {
    Vec2 p;
    int bnd;
    if (mesh.dim == 1) {
      if (!(in >> p.x >> bnd)) parse_fail(name, line, "vertex line");
    } else {
      if (!(in >> p.x >> p.y >> bnd)) parse_fail(name, line, "vertex line");
    }
    mesh.vertices.push_back(p);
    mesh.boundary.push_back(bnd != 0);
  }
  expect("cells");
  size_t nc = 0;
  if (!(in >> nc)) parse_fail(name, line, "cell count");
  ++line;
  for (size_t i = 0; i < nc; ++i, ++line) {
    std::array<int, 3> cell{-1, -1, -1};
    if (mesh.dim == 1) {
      if (!(in >> cell[0] >> cell[1])) parse_fail(name, line, "cell line");
    } else {
      int apex;
      if (!(in >> cell[0] >> cell[1] >> cell[2] >> apex))
        parse_fail(name, line, "cell line");
      if (apex < 0 || apex > 2)
        parse_fail(name, line, "apex index out of range");
      mesh.apex.push_back(apex);
    }
    for (int k = 0; k <= mesh.dim; ++k)
      if (cell[k] < 0 || cell[k] >= static_cast<int>(nv))
        parse_fail(name, line, "vertex index out of range");
    mesh.cells.push_back(cell);
  }
  return mesh;
}

SpaceMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TpError(ErrorCode::ParseError, "cannot open " + path);
  return parse_mesh(in, path);
}

std::string format_mesh(const SpaceMesh& mesh) {
  std::ostringstream out;
  out << "dim " << mesh.dim << "\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    out << fmt_double(mesh.vertices[i].x);
    if (mesh.dim == 2) out << " " << fmt_double(mesh.vertices[i].y);
    out << " " << (mesh.boundary.size() > i && mesh.boundary[i] ? 1 : 0)
        << "\n";
  }
  out << "cells " << mesh.cells.size() << "\n";
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    out << mesh.cells[c][0] << " " << mesh.cells[c][1];
    if (mesh.dim == 2)
      out << " " << mesh.cells[c][2] << " "
          << (mesh.apex.empty() ? 0 : mesh.apex[c]);
    out << "\n";
  }
  return out.str();
}

void save_mesh(const SpaceMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TpError(ErrorCode::ParseError, "cannot write " + path);
  out << format_mesh(mesh);
}

WavespeedField parse_field(const std::string& text) {
  const json j = json::parse(text);
  WavespeedField field;
  field.default_value = j.at("default").get<double>();
  for (const auto& r : j.value("regions", json::array())) {
    FieldRegion region;
    const std::string shape = r.at("shape").get<std::string>();
    if (shape == "disc") {
      region.shape = RegionShape::Disc;
      region.center = {r.at("center")[0].get<double>(),
                       r.at("center")[1].get<double>()};
      region.radius = r.at("radius").get<double>();
    } else if (shape == "half-plane") {
      region.shape = RegionShape::HalfPlane;
      region.center = {r.at("point")[0].get<double>(),
                       r.at("point")[1].get<double>()};
      region.normal = {r.at("normal")[0].get<double>(),
                       r.at("normal")[1].get<double>()};
    } else if (shape == "rect") {
      region.shape = RegionShape::Rect;
      region.lo = {r.at("lo")[0].get<double>(), r.at("lo")[1].get<double>()};
      region.hi = {r.at("hi")[0].get<double>(), r.at("hi")[1].get<double>()};
    } else {
      throw TpError(ErrorCode::ParseError, "unknown region shape " + shape);
    }
    region.t0 = r.value("t0", -std::numeric_limits<double>::infinity());
    region.t1 = r.value("t1", std::numeric_limits<double>::infinity());
    region.value = r.at("value").get<double>();
    field.regions.push_back(region);
  }
  return field;
}

WavespeedField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TpError(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_field(ss.str());
}

std::string format_field(const WavespeedField& field) {
  json j;
  // JSON has no infinity; an effectively-unbounded scale round-trips as a
  // huge finite value.
  j["default"] = std::isfinite(field.default_value) ? field.default_value
                                                    : 1e308;
  j["regions"] = json::array();
  for (const auto& r : field.regions) {
    json jr;
    switch (r.shape) {
      case RegionShape::Disc:
        jr["shape"] = "disc";
        jr["center"] = {r.center.x, r.center.y};
        jr["radius"] = r.radius;
        break;
      case RegionShape::HalfPlane:
        jr["shape"] = "half-plane";
        jr["point"] = {r.center.x, r.center.y};
        jr["normal"] = {r.normal.x, r.normal.y};
        break;
      case RegionShape::Rect:
        jr["shape"] = "rect";
        jr["lo"] = {r.lo.x, r.lo.y};
        jr["hi"] = {r.hi.x, r.hi.y};
        break;
    }
    if (std::isfinite(r.t0)) jr["t0"] = r.t0;
    if (std::isfinite(r.t1)) jr["t1"] = r.t1;
    jr["value"] = r.value;
    j["regions"].push_back(jr);
  }
  return j.dump();
}

void write_vtk(const SpacetimeMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TpError(ErrorCode::ParseError, "cannot write " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "tentpitcher spacetime mesh\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.verts.size() << " double\n";
  for (const auto& p : mesh.verts) {
    if (mesh.dim == 1)
      out << fmt_double(p.x.x) << " " << fmt_double(p.t) << " 0\n";
    else
      out << fmt_double(p.x.x) << " " << fmt_double(p.x.y) << " "
          << fmt_double(p.t) << "\n";
  }
  const int nper = mesh.dim + 2;
  out << "CELLS " << mesh.elements.size() << " "
      << mesh.elements.size() * (nper + 1) << "\n";
  for (const auto& el : mesh.elements) {
    out << nper;
    for (int v : el.v) out << " " << v;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.elements.size() << "\n";
  for (size_t i = 0; i < mesh.elements.size(); ++i)
    out << (mesh.dim == 1 ? 5 : 10) << "\n";
  out << "CELL_DATA " << mesh.elements.size() << "\n";
  out << "SCALARS patch int 1\nLOOKUP_TABLE default\n";
  for (const auto& el : mesh.elements) out << el.patch_id << "\n";
}

namespace {

json event_to_json(const StepEvent& e) {
  json j;
  j["step"] = e.step;
  j["op"] = e.op;
  j["vertex"] = e.vertex;
  j["t_old"] = e.t_old;
  j["t_new"] = e.t_new;
  j["binding"] = e.binding;
  j["patch"] = e.patch;
  return j;
}

StepEvent event_from_json(const json& j) {
  StepEvent e;
  e.step = j.at("step").get<long>();
  e.op = j.at("op").get<std::string>();
  e.vertex = j.at("vertex").get<int>();
  e.t_old = j.at("t_old").get<double>();
  e.t_new = j.at("t_new").get<double>();
  e.binding = j.at("binding").get<std::string>();
  e.patch = j.at("patch").get<int>();
  return e;
}

}  // namespace

void write_events(const Config& config, const SpaceMesh& mesh,
                  const WavespeedField& field, const WavespeedField& scale,
                  const std::vector<StepEvent>& events,
                  const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TpError(ErrorCode::ParseError, "cannot write " + path);
  json header;
  header["config"] = json::parse(config.to_json());
  header["mesh"] = format_mesh(mesh);
  header["field"] = json::parse(format_field(field));
  header["scale"] = json::parse(format_field(scale));
  header["report"] = {
      {"steps", report.steps},
      {"patches", report.patches},
      {"elements", report.elements},
      {"min_aspect", report.min_aspect},
      {"mean_aspect", report.mean_aspect},
      {"min_tentpole",
       std::isfinite(report.min_tentpole) ? report.min_tentpole : -1.0},
      {"count_bound", report.count_bound}};
  out << header.dump() << "\n";
  for (const auto& e : events) out << event_to_json(e).dump() << "\n";
}

EventLog read_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TpError(ErrorCode::ParseError, "cannot open " + path);
  EventLog log;
  std::string line;
  if (!std::getline(in, line))
    throw TpError(ErrorCode::ParseError, path + ": empty log");
  const json header = json::parse(line);
  log.config = Config::from_json(header.at("config").dump());
  std::istringstream mesh_in(header.at("mesh").get<std::string>());
  log.mesh = parse_mesh(mesh_in, path + "#mesh");
  log.field = parse_field(header.at("field").dump());
  log.scale = parse_field(header.at("scale").dump());
  log.report.steps = header.at("report").at("steps").get<long>();
  log.report.patches = header.at("report").at("patches").get<long>();
  log.report.elements = header.at("report").at("elements").get<long>();
  log.report.min_aspect = header.at("report").at("min_aspect").get<double>();
  log.report.min_tentpole =
      header.at("report").at("min_tentpole").get<double>();
  log.report.count_bound = header.at("report").at("count_bound").get<double>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    log.events.push_back(event_from_json(json::parse(line)));
  }
  return log;
}

ValidationReport verify_suite(const EventLog& log,
                              const std::string& mesh_out_path) {
  ValidationReport report;
  SpaceMesh mesh = log.mesh;
  if (mesh.dim == 2 && mesh.apex.empty()) mesh.assign_default_apexes();
  const ValidationReport input_check = validate_complex(mesh);
  for (const auto& issue : input_check.issues)
    report.add("input mesh: " + issue.what);

  MockSolver solver;
  solver.target_scale = log.scale;
  solver.xi1 = log.config.xi1;
  solver.xi2 = log.config.xi2;
  PitchPolicy policy = log.config.policy;
  policy.verify_each_step = true;  // causality re-asserted at every step

  RunResult replay;
  try {
    Pitcher pitcher(mesh, log.field, solver, policy);
    replay = pitcher.run();
  } catch (const TpError& err) {
    report.add(std::string("replay failed: ") + err.what());
    return report;
  }

  // Determinism: the replayed event stream must match the log.
  if (replay.events.size() != log.events.size()) {
    report.add("event count mismatch: replay " +
               std::to_string(replay.events.size()) + " vs log " +
               std::to_string(log.events.size()));
  } else {
    for (size_t i = 0; i < replay.events.size(); ++i) {
      const auto& a = replay.events[i];
      const auto& b = log.events[i];
      if (a.op != b.op || a.vertex != b.vertex || a.t_old != b.t_old ||
          a.t_new != b.t_new || a.binding != b.binding || a.patch != b.patch) {
        report.add("event " + std::to_string(i) + " differs on replay");
        break;
      }
    }
  }

  // Tentpole lower bounds from the event log.
  const double eps_hat = policy.params.epsilon_hat();
  const double min_slope = log.field.min_slope();
  const double max_slope = log.field.max_slope();
  for (const auto& e : log.events) {
    if (e.op != "pitch") continue;
    if (!(e.t_new > e.t_old))
      report.add("step " + std::to_string(e.step) + ": non-positive tentpole");
  }
  if (replay.report.min_tentpole <= 0.0 && replay.report.patches > 0)
    report.add("non-positive minimum tentpole height");

  // Aspect-ratio bound.
  const double aspect_floor =
      (min_slope == max_slope)
          ? eps_hat / 2.0
          : (eps_hat / 2.0) * (min_slope / max_slope);
  if (policy.mode == PitchPolicy::Mode::Linear ||
      policy.mode == PitchPolicy::Mode::Nonlocal) {
    if (replay.report.min_aspect < aspect_floor - 1e-12)
      report.add("temporal aspect ratio " +
                 std::to_string(replay.report.min_aspect) + " below floor " +
                 std::to_string(aspect_floor));
  }

  // Element count against the theoretical bound.
  if (policy.mode == PitchPolicy::Mode::Linear &&
      static_cast<double>(replay.report.elements) > replay.report.count_bound)
    report.add("element count exceeds theoretical bound");

  // Weak simplicial complex.
  if (replay.mesh.elements.size() <= 5000) {
    const ValidationReport wc = verify_weak_complex(replay.mesh);
    for (const auto& issue : wc.issues) report.add("weak complex: " + issue.what);
  }

  // Degree bound and homothety count on the replayed triangulation.
  {
    int delta0 = 0;
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      std::set<int> nb;
      for (const auto& cell : mesh.cells) {
        bool has = false;
        for (int i = 0; i < mesh.cell_size(); ++i)
          if (cell[i] == static_cast<int>(v)) has = true;
        if (has)
          for (int i = 0; i < mesh.cell_size(); ++i)
            if (cell[i] != static_cast<int>(v)) nb.insert(cell[i]);
      }
      delta0 = std::max(delta0, static_cast<int>(nb.size()));
    }
    Pitcher probe(mesh, log.field, solver, policy);
    probe.run();
    auto& tri = probe.triangulation();
    const int degree_cap = std::max(delta0 + 5, 8);
    const int max_deg = tri.max_vertex_degree();
    if (mesh.dim == 2 && max_deg > degree_cap)
      report.add("vertex degree " + std::to_string(max_deg) +
                 " exceeds bound " + std::to_string(degree_cap));
    if (mesh.dim == 2) {
      std::map<int, std::set<int>> classes;
      for (int t : tri.leaves()) {
        try {
          classes[tri.root_of(t)].insert(tri.homothety_class(t));
        } catch (const TpError&) {
          // flips in ancestry: class undefined
        }
      }
      for (const auto& [root, set] : classes)
        if (set.size() > 8)
          report.add("root " + std::to_string(root) + " has " +
                     std::to_string(set.size()) + " homothety classes");
    }
  }

  if (!mesh_out_path.empty()) {
    write_vtk(replay.mesh, mesh_out_path + ".replay.vtk");
  }
  return report;
}

}  // namespace tentpitcher
