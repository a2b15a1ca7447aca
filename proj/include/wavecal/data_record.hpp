#ifndef WAVECAL_DATA_RECORD_HPP
#define WAVECAL_DATA_RECORD_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "wavecal/io.hpp"
#include "wavecal/traces.hpp"

namespace wavecal {

/// Opaque identifier for a potential: a content hash, usable for bookkeeping
/// without revealing samples.
inline std::string potential_id(const PotentialField& pf) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t nbytes) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < nbytes; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(pf.q.v.data(), pf.q.v.size() * sizeof(double));
  mix(&pf.p1, sizeof(double));
  mix(&pf.p2, sizeof(double));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// One measurement: the prescribed input traces and the masked response of
/// the true potential. The record is the only object the inversion side may
/// read for the unknown potential.
struct DataRecord {
  Scenario scenario = Scenario::Full;
  Grid grid;
  std::string source_id;  // opaque potential id
  SolveInputs<cplx> prescribed;
  TraceBundle<cplx> outputs;
  std::optional<BoundaryMask> mask;
};

/// Runs the true-potential solve on the prescribed inputs and returns the
/// masked record. Inputs must satisfy the scenario constraints (zero initial
/// value where the scenario demands it).
inline DataRecord synthesize_data(const PotentialField& q_true,
                                  const SolveInputs<cplx>& prescribed, Scenario scenario,
                                  const BoundaryMask* mask = nullptr) {
  const Grid& g = q_true.grid();
  if (scenario_zero_initial(scenario)) {
    double m = 0.0;
    for (const cplx& x : prescribed.v0.v) m = std::max(m, std::abs(x));
    if (m > 1e-8 * std::max(1.0, prescribed.data_scale(g)))
      throw Error("synthesize_data: scenario violation, prescribed v0 != 0");
  }
  if (scenario_restricts_neumann(scenario) && mask == nullptr)
    throw Error("synthesize_data: scenario needs an observation mask");
  WaveField<cplx> sol = solve_ibvp(q_true, prescribed);
  DataRecord rec;
  rec.scenario = scenario;
  rec.grid = g;
  rec.source_id = potential_id(q_true);
  rec.prescribed = prescribed;
  rec.outputs = extract_traces(sol.u, scenario, mask);
  if (mask) rec.mask = *mask;
  return rec;
}

// ---------------------------------------------------------------------------
// Serialization: directory with manifest.json + one binary file per trace.
// Masked trace components are simply not written.

namespace recordio {

inline Grid face_grid(const Grid& g) {
  Grid fg;
  fg.n = g.n > 1 ? g.n - 1 : 1;
  fg.nx = g.n > 1 ? g.nx : 1;
  fg.nt = g.nt;
  fg.L = g.L;
  fg.T = g.T;
  fg.dx = g.dx;
  fg.dt = g.dt;
  return fg;
}

inline Grid slice_grid(const Grid& g) {
  Grid sg = g;
  sg.nt = 1;
  return sg;
}

inline void write_slice(const std::string& path, const Slice<cplx>& s) {
  Field<cplx> f;
  f.grid = slice_grid(s.grid);
  f.v = s.v;
  write_field(path, f);
}

inline Slice<cplx> read_slice(const std::string& path, const Grid& g) {
  Field<cplx> f = read_field<cplx>(path);
  Slice<cplx> s(g);
  if (f.v.size() != s.v.size()) throw Error("record io: slice size mismatch");
  s.v = f.v;
  return s;
}

}  // namespace recordio

inline void save_record(const DataRecord& rec, const std::string& dir) {
  using nlohmann::json;
  ensure_dir(dir);
  const Grid& g = rec.grid;
  json m;
  m["format_version"] = 1;
  m["scenario"] = scenario_name(rec.scenario);
  m["grid"] = {{"n", g.n}, {"L", g.L}, {"T", g.T}, {"nx", g.nx}, {"nt", g.nt}};
  m["potential_id"] = rec.source_id;

  recordio::write_slice(dir + "/prescribed_v0.wcal", rec.prescribed.v0);
  recordio::write_slice(dir + "/prescribed_v1.wcal", rec.prescribed.v1);
  for (int f = 0; f < face_count(g); ++f) {
    Field<cplx> ff;
    ff.grid = recordio::face_grid(g);
    ff.v = rec.prescribed.g.face[f];
    write_field(dir + "/prescribed_g_f" + std::to_string(f) + ".wcal", ff);
  }

  const auto& out = rec.outputs;
  json present;
  present["initial_value"] = out.initial_value.has_value();
  present["initial_rate"] = out.initial_rate.has_value();
  present["final_value"] = out.final_value.has_value();
  present["final_rate"] = out.final_rate.has_value();
  present["final_penultimate"] = out.final_penultimate.has_value();
  present["neumann"] = out.neumann.has_value();
  m["outputs_present"] = present;

  if (out.initial_value) recordio::write_slice(dir + "/out_initial_value.wcal", *out.initial_value);
  if (out.initial_rate) recordio::write_slice(dir + "/out_initial_rate.wcal", *out.initial_rate);
  if (out.final_value) recordio::write_slice(dir + "/out_final_value.wcal", *out.final_value);
  if (out.final_rate) recordio::write_slice(dir + "/out_final_rate.wcal", *out.final_rate);
  if (out.final_penultimate)
    recordio::write_slice(dir + "/out_final_penultimate.wcal", *out.final_penultimate);

  if (out.neumann) {
    json pres_nodes = json::array();
    for (int f = 0; f < face_count(g); ++f) {
      // compacted storage: only present nodes are written
      std::vector<std::int64_t> ids;
      for (std::int64_t node = 0; node < face_nodes(g); ++node)
        if (out.neumann->node_present(f, node)) ids.push_back(node);
      json jf = json::array();
      for (auto id : ids) jf.push_back(id);
      pres_nodes.push_back(jf);
      Field<cplx> ff;
      ff.grid = recordio::face_grid(g);
      ff.grid.nx = std::max<std::int64_t>(1, static_cast<std::int64_t>(ids.size()));
      ff.grid.n = 1;
      ff.v.assign(static_cast<std::size_t>(g.nt) * std::max<std::size_t>(1, ids.size()), cplx{});
      Field<cplx> fl = ff;
      for (int k = 0; k < g.nt; ++k)
        for (std::size_t j = 0; j < ids.size(); ++j) {
          ff.v[k * std::max<std::size_t>(1, ids.size()) + j] =
              out.neumann->face[f][k * face_nodes(g) + ids[j]];
          fl.v[k * std::max<std::size_t>(1, ids.size()) + j] =
              out.neumann->flux_face[f][k * face_nodes(g) + ids[j]];
        }
      write_field(dir + "/out_neumann_f" + std::to_string(f) + ".wcal", ff);
      write_field(dir + "/out_neumann_flux_f" + std::to_string(f) + ".wcal", fl);
    }
    m["neumann_present_nodes"] = pres_nodes;
  }

  if (rec.mask) {
    json jm;
    json om = json::array();
    for (int a = 0; a < g.n; ++a) om.push_back(rec.mask->omega[a]);
    jm["omega"] = om;
    jm["eps"] = rec.mask->eps;
    jm["margin_cells"] = rec.mask->margin_cells;
    m["mask"] = jm;
  }

  std::ofstream os(dir + "/manifest.json");
  os << m.dump(2) << "\n";
  if (!os) throw Error("record io: manifest write failed");
}

inline DataRecord load_record(const std::string& dir) {
  using nlohmann::json;
  std::ifstream is(dir + "/manifest.json");
  if (!is) throw Error("record io: cannot open manifest in " + dir);
  json m = json::parse(is);
  Grid g = Grid::make(m["grid"]["n"], m["grid"]["L"], m["grid"]["T"], m["grid"]["nx"],
                      m["grid"]["nt"]);
  DataRecord rec;
  rec.scenario = scenario_from_name(m["scenario"]);
  rec.grid = g;
  rec.source_id = m["potential_id"];

  rec.prescribed = SolveInputs<cplx>::zero(g);
  rec.prescribed.v0 = recordio::read_slice(dir + "/prescribed_v0.wcal", g);
  rec.prescribed.v1 = recordio::read_slice(dir + "/prescribed_v1.wcal", g);
  for (int f = 0; f < face_count(g); ++f) {
    Field<cplx> ff = read_field<cplx>(dir + "/prescribed_g_f" + std::to_string(f) + ".wcal");
    if (ff.v.size() != rec.prescribed.g.face[f].size())
      throw Error("record io: dirichlet face size mismatch");
    rec.prescribed.g.face[f] = ff.v;
  }

  TraceBundle<cplx> out;
  out.grid = g;
  out.scenario = rec.scenario;
  out.dirichlet = rec.prescribed.g;
  const json& present = m["outputs_present"];
  if (present["initial_value"].get<bool>())
    out.initial_value = recordio::read_slice(dir + "/out_initial_value.wcal", g);
  if (present["initial_rate"].get<bool>())
    out.initial_rate = recordio::read_slice(dir + "/out_initial_rate.wcal", g);
  if (present["final_value"].get<bool>())
    out.final_value = recordio::read_slice(dir + "/out_final_value.wcal", g);
  if (present["final_rate"].get<bool>())
    out.final_rate = recordio::read_slice(dir + "/out_final_rate.wcal", g);
  if (present["final_penultimate"].get<bool>())
    out.final_penultimate = recordio::read_slice(dir + "/out_final_penultimate.wcal", g);
  if (present["neumann"].get<bool>()) {
    NeumannTrace<cplx> nm(g);
    for (int f = 0; f < face_count(g); ++f) {
      std::fill(nm.present[f].begin(), nm.present[f].end(), 0);
      const json& jf = m["neumann_present_nodes"][f];
      std::vector<std::int64_t> ids;
      for (const auto& v : jf) ids.push_back(v.get<std::int64_t>());
      Field<cplx> ff = read_field<cplx>(dir + "/out_neumann_f" + std::to_string(f) + ".wcal");
      Field<cplx> fl =
          read_field<cplx>(dir + "/out_neumann_flux_f" + std::to_string(f) + ".wcal");
      for (int k = 0; k < g.nt; ++k)
        for (std::size_t j = 0; j < ids.size(); ++j) {
          nm.raw(f, k, ids[j]) = ff.v[k * std::max<std::size_t>(1, ids.size()) + j];
          nm.raw_flux(f, k, ids[j]) = fl.v[k * std::max<std::size_t>(1, ids.size()) + j];
        }
      for (auto id : ids) nm.present[f][id] = 1;
    }
    out.neumann = std::move(nm);
  }
  rec.outputs = std::move(out);

  if (m.contains("mask")) {
    Direction om{};
    for (int a = 0; a < g.n; ++a) om[a] = m["mask"]["omega"][a];
    rec.mask = boundary_partition(g, om, m["mask"]["eps"], m["mask"]["margin_cells"]);
  }
  return rec;
}

}  // namespace wavecal

#endif
