#include "eit/io_json.hpp"

#include <fstream>
#include <sstream>

namespace eit {

using nlohmann::json;

json to_json(const Partition& part) {
  json inclusions = json::array();
  for (const Polygon& p : part.inclusions) {
    json poly = json::array();
    for (const Vec2& v : p.vertices) poly.push_back({v.x(), v.y()});
    inclusions.push_back(std::move(poly));
  }
  return json{{"inclusions", std::move(inclusions)}};
}

Partition partition_from_json(const json& j) {
  Partition part;
  for (const auto& poly : j.at("inclusions")) {
    Polygon p;
    for (const auto& v : poly)
      p.vertices.emplace_back(v.at(0).get<Scalar>(), v.at(1).get<Scalar>());
    part.inclusions.push_back(std::move(p));
  }
  const PolygonCheck pc = partition_validate(part);
  if (!pc.ok) throw GeometryError("partition JSON: " + pc.reason);
  return part;
}

json to_json(const Conductivity& sigma) {
  json values = json::array();
  for (Eigen::Index i = 0; i < sigma.values.size(); ++i)
    values.push_back(sigma.values[i]);
  return json{{"partition", to_json(sigma.partition)},
              {"values", std::move(values)},
              {"background", sigma.background}};
}

Conductivity conductivity_from_json(const json& j) {
  Conductivity sigma;
  sigma.partition = partition_from_json(j.at("partition"));
  const auto& values = j.at("values");
  sigma.values.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    sigma.values[i] = values[i].get<Scalar>();
  sigma.background = j.at("background").get<Scalar>();
  check_conductivity(sigma);
  return sigma;
}

json to_json(const MeasurementSet& ms) {
  json electrodes = json::array();
  for (const Electrode& e : ms.layout.electrodes)
    electrodes.push_back({{"side", static_cast<int>(e.side)},
                          {"t0", e.t0},
                          {"t1", e.t1}});
  json patterns = json::array();
  for (const BoundaryFlux& g : ms.patterns) {
    json d = json::array();
    for (Eigen::Index i = 0; i < g.electrode_density.size(); ++i)
      d.push_back(g.electrode_density[i]);
    patterns.push_back(std::move(d));
  }
  json nodes = json::array();
  for (const Vec2& p : ms.boundary_nodes) nodes.push_back({p.x(), p.y()});
  json traces = json::array();
  for (const auto& f : ms.traces) {
    json t = json::array();
    for (Eigen::Index i = 0; i < f.size(); ++i) t.push_back(f[i]);
    traces.push_back(std::move(t));
  }
  json out{{"layout", {{"level", ms.layout.level},
                       {"electrodes", std::move(electrodes)}}},
           {"patterns", std::move(patterns)},
           {"boundary_nodes", std::move(nodes)},
           {"traces", std::move(traces)}};
  if (ms.noise_meta)
    out["noise_meta"] = {{"gamma", ms.noise_meta->gamma},
                         {"seed", ms.noise_meta->seed},
                         {"achieved_level", ms.noise_meta->achieved_level}};
  return out;
}

MeasurementSet measurements_from_json(const json& j) {
  MeasurementSet ms;
  ms.layout = electrode_layout(j.at("layout").at("level").get<int>());
  for (const auto& p : j.at("patterns")) {
    BoundaryFlux g;
    g.level = ms.layout.level;
    g.electrode_density.resize(p.size());
    for (size_t i = 0; i < p.size(); ++i)
      g.electrode_density[i] = p[i].get<Scalar>();
    check_flux(g);
    ms.patterns.push_back(std::move(g));
  }
  for (const auto& v : j.at("boundary_nodes"))
    ms.boundary_nodes.emplace_back(v.at(0).get<Scalar>(),
                                   v.at(1).get<Scalar>());
  for (const auto& t : j.at("traces")) {
    Eigen::VectorXd f(t.size());
    for (size_t i = 0; i < t.size(); ++i) f[i] = t[i].get<Scalar>();
    if (f.size() != static_cast<Eigen::Index>(ms.boundary_nodes.size()))
      throw MeasurementError("measurements JSON: trace length mismatch");
    ms.traces.push_back(std::move(f));
  }
  if (j.contains("noise_meta")) {
    NoiseMeta meta;
    meta.gamma = j["noise_meta"].at("gamma").get<Scalar>();
    meta.seed = j["noise_meta"].at("seed").get<std::uint64_t>();
    meta.achieved_level = j["noise_meta"].at("achieved_level").get<Scalar>();
    ms.noise_meta = meta;
  }
  return ms;
}

json to_json(const TriMesh& m) {
  json nodes = json::array();
  for (const Vec2& p : m.nodes) nodes.push_back({p.x(), p.y()});
  json tris = json::array();
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  return json{{"nodes", std::move(nodes)},
              {"triangles", std::move(tris)},
              {"regions", m.region}};
}

json to_json(const IterationRecord& rec) {
  json values = json::array();
  for (Eigen::Index i = 0; i < rec.values.size(); ++i)
    values.push_back(rec.values[i]);
  json out{{"iter", rec.iter},
           {"J", rec.j_value},
           {"values", std::move(values)},
           {"background", rec.background},
           {"vertex_counts", rec.vertex_counts},
           {"max_theta", rec.max_theta},
           {"effective_beta", rec.effective_beta}};
  if (rec.snapshot) out["partition"] = to_json(*rec.snapshot);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_trace_jsonl(const std::filesystem::path& path,
                       const ReconTrace& trace) {
  std::ostringstream out;
  for (const IterationRecord& rec : trace.records)
    out << to_json(rec).dump() << "\n";
  out << json{{"stop", to_string(trace.stop)},
              {"message", trace.message}}
             .dump()
      << "\n";
  write_text(path, out.str());
}

void write_convergence_csv(const std::filesystem::path& path,
                           const ReconTrace& trace) {
  std::ostringstream out;
  out << "iter,J,max_theta,effective_beta,background";
  const Eigen::Index nv =
      trace.records.empty() ? 0 : trace.records.front().values.size();
  for (Eigen::Index i = 0; i < nv; ++i) out << ",value" << i + 1;
  out << "\n";
  char buf[64];
  auto num = [&](Scalar x) {
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
  };
  for (const IterationRecord& rec : trace.records) {
    out << rec.iter << "," << num(rec.j_value) << "," << num(rec.max_theta)
        << "," << num(rec.effective_beta) << "," << num(rec.background);
    for (Eigen::Index i = 0; i < rec.values.size(); ++i)
      out << "," << num(rec.values[i]);
    out << "\n";
  }
  write_text(path, out.str());
}

void write_traces_csv(const std::filesystem::path& path,
                      const MeasurementSet& ms) {
  std::ostringstream out;
  out << "arclength";
  for (size_t j = 0; j < ms.traces.size(); ++j) out << ",pattern" << j + 1;
  out << "\n";
  char buf[64];
  auto num = [&](Scalar x) {
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
  };
  for (size_t i = 0; i < ms.boundary_nodes.size(); ++i) {
    out << num(boundary_arclength(ms.boundary_nodes[i]));
    for (const auto& f : ms.traces) out << "," << num(f[i]);
    out << "\n";
  }
  write_text(path, out.str());
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  json j{{"artifact_version", 1},
         {"command", m.command},
         {"config", m.config},
         {"config_hash", config_hash(m.config)},
         {"seeds", m.seeds},
         {"inputs", m.inputs},
         {"outputs", m.outputs}};
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace eit
