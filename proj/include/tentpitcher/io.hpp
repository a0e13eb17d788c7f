#pragma once

#include <iosfwd>
#include <string>

#include "tentpitcher/driver.hpp"

namespace tentpitcher {

// Run configuration as carried by the CLI and the event-log header.
struct Config {
  PitchPolicy policy;
  std::string mesh_path;
  std::string field_path;
  std::string scale_path;  // target length-scale field for the mock solver
  double xi1 = std::numeric_limits<double>::infinity();
  double xi2 = 0.0;

  std::string to_json() const;
  static Config from_json(const std::string& text);
};

// Plain-text space mesh:
//   dim d
//   vertices N
//   x [y] boundary        (N lines)
//   cells M
//   v0 v1 [v2 apex]       (M lines)
SpaceMesh load_mesh(const std::string& path);
SpaceMesh parse_mesh(std::istream& in, const std::string& name);
void save_mesh(const SpaceMesh& mesh, const std::string& path);
std::string format_mesh(const SpaceMesh& mesh);

// Wavespeed / target-scale field JSON:
// { "default": s, "regions": [ {"shape":"disc","center":[x,y],"radius":r,
//   "t0":a,"t1":b,"value":v}, ... ] }  -- later regions override earlier.
WavespeedField load_field(const std::string& path);
WavespeedField parse_field(const std::string& text);
std::string format_field(const WavespeedField& field);

// Legacy ASCII VTK UNSTRUCTURED_GRID; tetra cells for 2D x time, triangle
// cells for 1D x time.
void write_vtk(const SpacetimeMesh& mesh, const std::string& path);

// JSONL event log: a header object carrying the config plus the mesh and
// field inline, then one object per step.
void write_events(const Config& config, const SpaceMesh& mesh,
                  const WavespeedField& field, const WavespeedField& scale,
                  const std::vector<StepEvent>& events,
                  const RunReport& report, const std::string& path);

struct EventLog {
  Config config;
  SpaceMesh mesh;
  WavespeedField field;
  WavespeedField scale;
  std::vector<StepEvent> events;
  RunReport report;
};

EventLog read_events(const std::string& path);

// Replays the logged run and checks: byte-identical event stream, causality
// at every step (re-asserted by the driver), tentpole lower bounds, aspect
// ratio bounds, weak simplicial complex, element count against the
// theoretical bound, vertex degree bound, and homothety class counts.
ValidationReport verify_suite(const EventLog& log,
                              const std::string& mesh_out_path = "");

}  // namespace tentpitcher
