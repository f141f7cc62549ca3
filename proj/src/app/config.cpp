#include "rbs/app/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rbs/errors.hpp"

namespace rbs::app {

using nlohmann::json;

Vec3 ForceTable::force_at(double t) const {
  if (forces.size() == 1 || t <= times.front()) return forces.front();
  if (t >= times.back()) return forces.back();
  const size_t k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - s) * forces[k - 1] + s * forces[k];
}

Vec3 ForceTable::torque_at(double t) const {
  if (torques.size() == 1 || t <= times.front()) return torques.front();
  if (t >= times.back()) return torques.back();
  const size_t k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return (1.0 - s) * torques[k - 1] + s * torques[k];
}

namespace {

void expect_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

Vec3 vec3(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(where + " must be a list of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(where + " must be a list of 3 numbers");
    out(i) = v[i].get<double>();
  }
  return out;
}

Vec3 get_vec3(const json& obj, const std::string& key, const std::string& where, const Vec3& fallback) {
  return obj.contains(key) ? vec3(obj.at(key), where + "." + key) : fallback;
}

Quat quat(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) throw ConfigError(where + " must be a quaternion [w, x, y, z]");
  std::array<double, 4> q{};
  for (int i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw ConfigError(where + " must be a quaternion [w, x, y, z]");
    q[i] = v[i].get<double>();
  }
  Quat out(q[0], q[1], q[2], q[3]);
  if (!(out.norm() > 1e-12)) throw ConfigError(where + " has zero norm");
  return out.normalized();
}

BodySpec parse_body(const json& b, const std::string& where) {
  expect_keys(b, {"shape", "centroid", "orientation", "delta_mass"}, where);
  BodySpec spec;
  spec.shape = get<std::string>(b, "shape", where, spec.shape);
  spec.centroid = get_vec3(b, "centroid", where, spec.centroid);
  if (b.contains("orientation")) spec.orientation = quat(b.at("orientation"), where + ".orientation");
  spec.delta_mass = get<double>(b, "delta_mass", where, spec.delta_mass);
  return spec;
}

ForceTable parse_table(const json& t, const std::string& where) {
  expect_keys(t, {"force", "torque", "times", "forces", "torques"}, where);
  ForceTable table;
  if (t.contains("times")) {
    if (t.contains("force") || t.contains("torque"))
      throw ConfigError(where + " mixes a constant load with a schedule");
    table.times = get<std::vector<double>>(t, "times", where, {});
    if (table.times.empty()) throw ConfigError(where + ".times must not be empty");
    if (!std::is_sorted(table.times.begin(), table.times.end()) ||
        std::adjacent_find(table.times.begin(), table.times.end()) != table.times.end())
      throw ConfigError(where + ".times must be strictly increasing");
    for (const char* key : {"forces", "torques"}) {
      std::vector<Vec3>& dst = std::string(key) == "forces" ? table.forces : table.torques;
      if (!t.contains(key)) {
        dst.assign(table.times.size(), Vec3::Zero());
        continue;
      }
      const json& list = t.at(key);
      if (!list.is_array() || list.size() != table.times.size())
        throw ConfigError(where + "." + key + " needs one entry per time");
      for (size_t k = 0; k < list.size(); ++k) dst.push_back(vec3(list[k], where + "." + key));
    }
  } else {
    table.times = {0.0};
    table.forces = {get_vec3(t, "force", where, Vec3::Zero())};
    table.torques = {get_vec3(t, "torque", where, Vec3::Zero())};
  }
  return table;
}

}  // namespace

std::vector<BodySpec> lattice_bodies(const std::string& shape, int nx, int ny, int nz, double spacing,
                                     const Vec3& origin, double jitter, std::uint64_t seed) {
  if (nx < 1 || ny < 1 || nz < 1) throw ConfigError("lattice counts must be positive");
  if (!(spacing > 0.0)) throw ConfigError("lattice spacing must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-jitter, jitter);
  std::vector<BodySpec> out;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        BodySpec b;
        b.shape = shape;
        b.centroid = origin + spacing * Vec3(i, j, k);
        if (jitter > 0.0) b.centroid += Vec3(unif(rng), unif(rng), unif(rng));
        out.push_back(b);
      }
  return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  expect_keys(doc, {"version", "p", "seed", "shape_library", "bodies", "lattice", "forcing", "magnetics", "solver",
                    "stepping", "output"},
              "config");
  ScenarioConfig cfg;
  if (!doc.contains("version")) throw ConfigError("config needs a 'version' key");
  cfg.version = get<int>(doc, "version", "config", 0);
  if (cfg.version != kConfigVersion)
    throw ConfigError("unsupported config version " + std::to_string(cfg.version));
  cfg.p = get<int>(doc, "p", "config", cfg.p);
  if (cfg.p < 1) throw ConfigError("p must be at least 1");
  cfg.seed = get<std::uint64_t>(doc, "seed", "config", 0);
  cfg.shape_library = get<std::string>(doc, "shape_library", "config", "");
  if (!cfg.shape_library.empty() && !base_dir.empty() && std::filesystem::path(cfg.shape_library).is_relative())
    cfg.shape_library = (std::filesystem::path(base_dir) / cfg.shape_library).string();

  if (doc.contains("bodies")) {
    const json& list = doc.at("bodies");
    if (!list.is_array()) throw ConfigError("bodies must be a list");
    for (size_t i = 0; i < list.size(); ++i) cfg.bodies.push_back(parse_body(list[i], "bodies[" + std::to_string(i) + "]"));
  }
  if (doc.contains("lattice")) {
    const json& l = doc.at("lattice");
    expect_keys(l, {"shape", "counts", "spacing", "origin", "jitter", "delta_mass"}, "lattice");
    const auto counts = get<std::vector<int>>(l, "counts", "lattice", {});
    if (counts.size() != 3) throw ConfigError("lattice.counts must have 3 entries");
    auto bodies = lattice_bodies(get<std::string>(l, "shape", "lattice", "sphere(1)"), counts[0], counts[1], counts[2],
                                 get<double>(l, "spacing", "lattice", 5.0),
                                 get_vec3(l, "origin", "lattice", Vec3::Zero()), get<double>(l, "jitter", "lattice", 0.0),
                                 cfg.seed);
    const double dm = get<double>(l, "delta_mass", "lattice", 1.0);
    for (auto& b : bodies) b.delta_mass = dm;
    cfg.bodies.insert(cfg.bodies.end(), bodies.begin(), bodies.end());
  }
  if (cfg.bodies.empty()) throw ConfigError("config defines no bodies");

  if (doc.contains("forcing")) {
    const json& f = doc.at("forcing");
    expect_keys(f, {"type", "g", "torques", "bodies"}, "forcing");
    const std::string type = get<std::string>(f, "type", "forcing", "none");
    if (type == "none") {
      cfg.forcing.type = ForcingSpec::Type::None;
    } else if (type == "gravity") {
      cfg.forcing.type = ForcingSpec::Type::Gravity;
      cfg.forcing.g = get_vec3(f, "g", "forcing", cfg.forcing.g);
    } else if (type == "swimmer") {
      cfg.forcing.type = ForcingSpec::Type::Swimmer;
      cfg.forcing.swimmer_torques = get<bool>(f, "torques", "forcing", false);
      if (cfg.bodies.size() != 3) throw ConfigError("swimmer forcing needs exactly 3 bodies");
    } else if (type == "explicit") {
      cfg.forcing.type = ForcingSpec::Type::Explicit;
      if (!f.contains("bodies") || !f.at("bodies").is_array()) throw ConfigError("explicit forcing needs a bodies list");
      const json& list = f.at("bodies");
      if (list.size() != cfg.bodies.size()) throw ConfigError("explicit forcing needs one entry per body");
      for (size_t i = 0; i < list.size(); ++i)
        cfg.forcing.tables.push_back(parse_table(list[i], "forcing.bodies[" + std::to_string(i) + "]"));
    } else {
      throw ConfigError("unknown forcing type '" + type + "'");
    }
    if (type != "gravity" && f.contains("g")) throw ConfigError("forcing.g only applies to gravity");
    if (type != "swimmer" && f.contains("torques")) throw ConfigError("forcing.torques only applies to the swimmer");
    if (type != "explicit" && f.contains("bodies")) throw ConfigError("forcing.bodies only applies to explicit forcing");
  }

  if (doc.contains("magnetics")) {
    const json& m = doc.at("magnetics");
    expect_keys(m, {"enabled", "H0", "mu_ratio"}, "magnetics");
    cfg.magnetics.enabled = get<bool>(m, "enabled", "magnetics", true);
    cfg.magnetics.field.H0 = get_vec3(m, "H0", "magnetics", Vec3(0.0, 0.0, 1.0));
    cfg.magnetics.field.mu_ratio = get<double>(m, "mu_ratio", "magnetics", 2.0);
    if (!(cfg.magnetics.field.mu_ratio > 0.0)) throw ConfigError("magnetics.mu_ratio must be positive");
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    expect_keys(s, {"tol", "max_iter", "preconditioner", "dense_debug", "upsample", "near_factor"}, "solver");
    cfg.solver.tol = get<double>(s, "tol", "solver", cfg.solver.tol);
    cfg.solver.max_iter = get<int>(s, "max_iter", "solver", cfg.solver.max_iter);
    cfg.solver.preconditioner = get<bool>(s, "preconditioner", "solver", cfg.solver.preconditioner);
    cfg.solver.dense_debug = get<bool>(s, "dense_debug", "solver", cfg.solver.dense_debug);
    cfg.solver.near.upsample = get<int>(s, "upsample", "solver", cfg.solver.near.upsample);
    cfg.solver.near.near_factor = get<double>(s, "near_factor", "solver", cfg.solver.near.near_factor);
    if (!(cfg.solver.tol > 0.0) || cfg.solver.max_iter < 1 || cfg.solver.near.upsample < 1 ||
        !(cfg.solver.near.near_factor > 0.0))
      throw ConfigError("solver settings out of range");
  }

  if (doc.contains("stepping")) {
    const json& s = doc.at("stepping");
    expect_keys(s, {"scheme", "dt", "t_final", "contact", "contact_delta"}, "stepping");
    try {
      cfg.stepping.scheme = dynamics::parse_scheme(get<std::string>(s, "scheme", "stepping", "rk4"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    cfg.stepping.dt = get<double>(s, "dt", "stepping", cfg.stepping.dt);
    cfg.stepping.t_final = get<double>(s, "t_final", "stepping", cfg.stepping.t_final);
    cfg.stepping.contact = get<bool>(s, "contact", "stepping", false);
    if (s.contains("contact_delta")) cfg.stepping.contact_delta = get<double>(s, "contact_delta", "stepping", 0.0);
    if (cfg.stepping.contact_delta && !(*cfg.stepping.contact_delta > 0.0))
      throw ConfigError("stepping.contact_delta must be positive");
  }
  if (!(cfg.stepping.dt > 0.0)) throw ConfigError("stepping.dt must be positive");
  if (!(cfg.stepping.t_final >= 0.0)) throw ConfigError("stepping.t_final must be non-negative");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    expect_keys(o, {"trajectory", "surfaces", "surface_every", "profile"}, "output");
    cfg.output.trajectory = get<std::string>(o, "trajectory", "output", cfg.output.trajectory);
    cfg.output.surfaces = get<bool>(o, "surfaces", "output", false);
    cfg.output.surface_every = get<int>(o, "surface_every", "output", 1);
    cfg.output.profile = get<bool>(o, "profile", "output", false);
    if (cfg.output.surface_every < 1) throw ConfigError("output.surface_every must be positive");
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string to_json(const ScenarioConfig& cfg) {
  auto v3 = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  json doc;
  doc["version"] = cfg.version;
  doc["p"] = cfg.p;
  doc["seed"] = cfg.seed;
  if (!cfg.shape_library.empty()) doc["shape_library"] = cfg.shape_library;
  json bodies = json::array();
  for (const auto& b : cfg.bodies) {
    const Quat& q = b.orientation;
    bodies.push_back({{"shape", b.shape},
                      {"centroid", v3(b.centroid)},
                      {"orientation", {q.w(), q.x(), q.y(), q.z()}},
                      {"delta_mass", b.delta_mass}});
  }
  doc["bodies"] = bodies;
  json f;
  switch (cfg.forcing.type) {
    case ForcingSpec::Type::None: f["type"] = "none"; break;
    case ForcingSpec::Type::Gravity:
      f["type"] = "gravity";
      f["g"] = v3(cfg.forcing.g);
      break;
    case ForcingSpec::Type::Swimmer:
      f["type"] = "swimmer";
      f["torques"] = cfg.forcing.swimmer_torques;
      break;
    case ForcingSpec::Type::Explicit: {
      f["type"] = "explicit";
      json list = json::array();
      for (const auto& t : cfg.forcing.tables) {
        json forces = json::array(), torques = json::array();
        for (const auto& x : t.forces) forces.push_back(v3(x));
        for (const auto& x : t.torques) torques.push_back(v3(x));
        list.push_back({{"times", t.times}, {"forces", forces}, {"torques", torques}});
      }
      f["bodies"] = list;
      break;
    }
  }
  doc["forcing"] = f;
  if (cfg.magnetics.enabled)
    doc["magnetics"] = {{"enabled", true}, {"H0", v3(cfg.magnetics.field.H0)}, {"mu_ratio", cfg.magnetics.field.mu_ratio}};
  doc["solver"] = {{"tol", cfg.solver.tol},
                   {"max_iter", cfg.solver.max_iter},
                   {"preconditioner", cfg.solver.preconditioner},
                   {"dense_debug", cfg.solver.dense_debug},
                   {"upsample", cfg.solver.near.upsample},
                   {"near_factor", cfg.solver.near.near_factor}};
  json st = {{"scheme", dynamics::to_string(cfg.stepping.scheme)},
             {"dt", cfg.stepping.dt},
             {"t_final", cfg.stepping.t_final},
             {"contact", cfg.stepping.contact}};
  if (cfg.stepping.contact_delta) st["contact_delta"] = *cfg.stepping.contact_delta;
  doc["stepping"] = st;
  doc["output"] = {{"trajectory", cfg.output.trajectory},
                   {"surfaces", cfg.output.surfaces},
                   {"surface_every", cfg.output.surface_every},
                   {"profile", cfg.output.profile}};
  return doc.dump(2);
}

}  // namespace rbs::app
