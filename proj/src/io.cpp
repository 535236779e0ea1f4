#include "splx/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "splx/errors.hpp"

namespace splx {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "little-endian host required");

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double from_num(const json& j) { return j.is_null() ? kNever : j.get<double>(); }

std::ofstream open_out(const std::filesystem::path& file, std::ios::openmode mode = std::ios::out) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, mode);
  if (!os) throw IoError("cannot write " + file.string());
  return os;
}

}  // namespace

std::string read_text(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto os = open_out(file, std::ios::binary);
  os << text;
  if (!os) throw IoError("short write " + file.string());
}

void write_snapshots_jsonl(const std::filesystem::path& file, const Trajectory& traj,
                           const Stamp& stamp) {
  auto os = open_out(file, std::ios::binary);
  json h = {{"header",
             {{"suite_version", stamp.suite_version},
              {"config_hash", stamp.config_hash},
              {"n_particles", traj.n_particles},
              {"lo", traj.lo},
              {"kappa", traj.kappa},
              {"epsilon", traj.epsilon},
              {"dt", traj.dt},
              {"t_fin", traj.t_fin},
              {"bc", to_string(traj.bc)}}}};
  os << h.dump() << "\n";
  const double e2 = traj.epsilon * traj.epsilon;
  for (const auto& s : traj.snapshots) {
    json r = {{"t", s.t},
              {"tau", s.t * e2},
              {"k", s.k},
              {"inside", s.inside},
              {"kind", s.kind == SnapshotKind::event ? "event" : "regular"},
              {"u", s.u}};
    if (s.kind == SnapshotKind::event) r["event"] = to_string(s.event);
    os << r.dump() << "\n";
  }
  if (!os) throw IoError("short write " + file.string());
}

Trajectory read_snapshots_jsonl(const std::filesystem::path& file, Stamp* stamp) {
  std::ifstream is(file);
  if (!is) throw IoError("cannot read " + file.string());
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty snapshot file " + file.string());
  Trajectory tr;
  try {
    const auto h = json::parse(line).at("header");
    if (stamp) {
      stamp->suite_version = h.at("suite_version").get<std::string>();
      stamp->config_hash = h.at("config_hash").get<std::string>();
    }
    tr.n_particles = h.at("n_particles").get<long>();
    tr.lo = h.at("lo").get<long>();
    tr.kappa = h.at("kappa").get<double>();
    tr.epsilon = h.at("epsilon").get<double>();
    tr.dt = h.at("dt").get<double>();
    tr.t_fin = h.at("t_fin").get<double>();
    tr.bc = h.at("bc").get<std::string>() == "padded" ? BoundaryMode::padded : BoundaryMode::neumann;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto r = json::parse(line);
      Snapshot s;
      s.t = r.at("t").get<double>();
      s.k = r.at("k").get<long>();
      s.inside = r.at("inside").get<bool>();
      s.kind = r.at("kind").get<std::string>() == "event" ? SnapshotKind::event : SnapshotKind::regular;
      if (s.kind == SnapshotKind::event) s.event = event_kind_from_string(r.at("event").get<std::string>());
      s.u = r.at("u").get<std::vector<double>>();
      tr.snapshots.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed snapshot file " + file.string() + ": " + e.what());
  }
  return tr;
}

void write_records_bin(const std::filesystem::path& file, const std::vector<BinaryRecord>& records) {
  auto os = open_out(file, std::ios::binary);
  for (const auto& r : records) {
    os.write("SPLX", 4);
    const std::uint32_t version = kBinaryVersion;
    const auto n = static_cast<std::uint32_t>(r.values.size());
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&r.t), 8);
    os.write(reinterpret_cast<const char*>(r.values.data()),
             static_cast<std::streamsize>(8 * r.values.size()));
  }
  if (!os) throw IoError("short write " + file.string());
}

void write_snapshots_bin(const std::filesystem::path& file, const Trajectory& traj) {
  std::vector<BinaryRecord> recs;
  recs.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) recs.push_back({s.t, s.u});
  write_records_bin(file, recs);
}

std::vector<BinaryRecord> read_records_bin(const std::filesystem::path& file) {
  const std::string data = read_text(file);
  std::vector<BinaryRecord> out;
  std::size_t pos = 0;
  while (pos < data.size()) {
    if (data.size() - pos < 20 || std::memcmp(data.data() + pos, "SPLX", 4) != 0)
      throw IoError("bad record header in " + file.string());
    std::uint32_t version = 0, n = 0;
    std::memcpy(&version, data.data() + pos + 4, 4);
    std::memcpy(&n, data.data() + pos + 8, 4);
    if (version != kBinaryVersion) throw IoError("unsupported binary version");
    BinaryRecord r;
    std::memcpy(&r.t, data.data() + pos + 12, 8);
    pos += 20;
    if (data.size() - pos < 8ull * n) throw IoError("truncated record in " + file.string());
    r.values.resize(n);
    std::memcpy(r.values.data(), data.data() + pos, 8ull * n);
    pos += 8ull * n;
    out.push_back(std::move(r));
  }
  return out;
}

std::string log_to_json(const TransitionLog& log, const Stamp& stamp) {
  json j;
  j["suite_version"] = stamp.suite_version;
  j["config_hash"] = stamp.config_hash;
  j["epsilon"] = log.epsilon;
  j["t_fin"] = log.t_fin;
  j["k_initial"] = log.k_initial;
  j["K_eps"] = log.K_eps;
  j["min_waiting"] = num(log.min_waiting);
  j["d_emp"] = num(log.d_emp());
  j["records"] = json::array();
  for (const auto& r : log.records) {
    json ex = json::array();
    for (const auto& e : r.excursions) ex.push_back({num(e.enter), num(e.exit)});
    j["records"].push_back({{"k", r.k},
                            {"t_hash", num(r.t_hash)},
                            {"t_flat", num(r.t_flat)},
                            {"t_star", num(r.t_star)},
                            {"excursions", ex},
                            {"d_k", r.d_k}});
  }
  return j.dump(2);
}

TransitionLog log_from_json(const std::string& text, Stamp* stamp) {
  TransitionLog log;
  try {
    const auto j = json::parse(text);
    if (stamp) {
      stamp->suite_version = j.at("suite_version").get<std::string>();
      stamp->config_hash = j.at("config_hash").get<std::string>();
    }
    log.epsilon = j.at("epsilon").get<double>();
    log.t_fin = j.at("t_fin").get<double>();
    log.k_initial = j.at("k_initial").get<long>();
    log.K_eps = j.at("K_eps").get<long>();
    log.min_waiting = from_num(j.at("min_waiting"));
    for (const auto& r : j.at("records")) {
      TransitionRecord t;
      t.k = r.at("k").get<long>();
      t.t_hash = from_num(r.at("t_hash"));
      t.t_flat = from_num(r.at("t_flat"));
      t.t_star = from_num(r.at("t_star"));
      for (const auto& e : r.at("excursions")) t.excursions.push_back({from_num(e.at(0)), from_num(e.at(1))});
      t.d_k = r.at("d_k").get<double>();
      log.records.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed transition log: ") + e.what());
  }
  return log;
}

std::string events_to_jsonl(const std::vector<Event>& events) {
  std::ostringstream os;
  for (const auto& e : events)
    os << json{{"t", e.t}, {"kind", to_string(e.kind)}, {"k", e.k}, {"u_left", e.u_left}, {"lap_p", e.lap_p}}.dump()
       << "\n";
  return os.str();
}

std::vector<Event> events_from_jsonl(const std::string& text) {
  std::vector<Event> out;
  std::istringstream is(text);
  std::string line;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto j = json::parse(line);
      Event e;
      e.t = j.at("t").get<double>();
      e.kind = event_kind_from_string(j.at("kind").get<std::string>());
      e.k = j.at("k").get<long>();
      e.u_left = j.at("u_left").get<double>();
      e.lap_p = j.at("lap_p").get<double>();
      out.push_back(e);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed event stream: ") + e.what());
  }
  return out;
}

std::string describe(const MacroProfile& p, double kappa) {
  std::ostringstream os;
  os << std::setprecision(17) << "kappa=" << kappa << ";xi=" << p.xi_ini << ";level=" << p.level
     << ";sl=" << p.slope_left << ";sr=" << p.slope_right;
  for (const auto& b : p.bumps) os << ";bump=" << b.amplitude << "," << b.center << "," << b.width;
  for (const auto& r : p.ramps) os << ";ramp=" << r.amplitude << "," << r.center << "," << r.width;
  return os.str();
}

}  // namespace splx
