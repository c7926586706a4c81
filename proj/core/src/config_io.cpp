#include "flapsim/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "flapsim/error.hpp"

namespace flapsim {

namespace {

/// Reads fields of one JSON object and rejects any key it never consumed.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(where() + "expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    if (!j_.contains(key)) throw ParseError(where() + "missing required field '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw ParseError(where() + "'" + key + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ParseError(where() + "'" + key + "' must be an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = raw(key);
    if (!v.is_string()) throw ParseError(where() + "'" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) throw ParseError(where() + "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ParseError(where() + "'" + key + "' must hold only numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    return has(key) ? numbers(key) : fallback;
  }

  Vec3 vec3(const std::string& key) {
    const auto v = numbers(key);
    if (v.size() != 3) throw ParseError(where() + "'" + key + "' must have 3 components");
    return {v[0], v[1], v[2]};
  }
  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    return has(key) ? vec3(key) : fallback;
  }

  Mat3 mat3(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array() || v.size() != 3) {
      throw ParseError(where() + "'" + key + "' must be a 3x3 array");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      if (!v[r].is_array() || v[r].size() != 3) {
        throw ParseError(where() + "'" + key + "' must be a 3x3 array");
      }
      for (int c = 0; c < 3; ++c) {
        if (!v[r][c].is_number()) throw ParseError(where() + "'" + key + "' must be numeric");
        m(r, c) = v[r][c].get<double>();
      }
    }
    return m;
  }

  ObjectReader child(const std::string& key) { return ObjectReader(raw(key), path_ + key + "."); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (key == "description") continue;
      if (!seen_.count(key)) throw ParseError(where() + "unknown field '" + key + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_; }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json mat_json(const Mat3& m) {
  Json out = Json::array();
  for (int r = 0; r < 3; ++r) out.push_back(Json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return out;
}

WingSegment segment_from(ObjectReader r) {
  WingSegment s;
  s.mass_kg = r.number("mass_kg");
  s.length_m = r.number("length_m");
  s.com_m = r.vec3("com_m");
  s.inertia_kgm2 = r.mat3("inertia_kgm2");
  r.finish();
  return s;
}

Json segment_json(const WingSegment& s) {
  return {{"mass_kg", s.mass_kg},
          {"length_m", s.length_m},
          {"com_m", vec_json(s.com_m)},
          {"inertia_kgm2", mat_json(s.inertia_kgm2)}};
}

SinusoidWave wave_from(ObjectReader r) {
  SinusoidWave w;
  w.amplitude_rad = r.number("amplitude_rad", 0.0);
  w.offset_rad = r.number("offset_rad", 0.0);
  w.phase_rad = r.number("phase_rad", 0.0);
  r.finish();
  return w;
}

Json wave_json(const SinusoidWave& w) {
  return {{"amplitude_rad", w.amplitude_rad},
          {"offset_rad", w.offset_rad},
          {"phase_rad", w.phase_rad}};
}

PidGains gains_from(ObjectReader r, const PidGains& d) {
  PidGains g;
  g.kp = r.number("kp", d.kp);
  g.ki = r.number("ki", d.ki);
  g.kd = r.number("kd", d.kd);
  g.integrator_clamp = r.number("integrator_clamp", d.integrator_clamp);
  g.output_clamp = r.number("output_clamp", d.output_clamp);
  r.finish();
  return g;
}

Json gains_json(const PidGains& g) {
  return {{"kp", g.kp},
          {"ki", g.ki},
          {"kd", g.kd},
          {"integrator_clamp", g.integrator_clamp},
          {"output_clamp", g.output_clamp}};
}

Mode mode_from(const std::string& s) {
  if (s == "tethered") return Mode::tethered;
  if (s == "free_flight") return Mode::free_flight;
  if (s == "guard_stabilized") return Mode::guard_stabilized;
  throw ParseError("mode must be tethered, free_flight or guard_stabilized (got '" + s + "')");
}

AeroModel aero_from(const std::string& s) {
  if (s == "unsteady") return AeroModel::unsteady;
  if (s == "quasi_steady") return AeroModel::quasi_steady;
  if (s == "off") return AeroModel::off;
  throw ParseError("aero_model must be unsteady, quasi_steady or off (got '" + s + "')");
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

RobotModel robot_from_json(const Json& doc) {
  ObjectReader r(doc, "");
  RobotModel m;
  m.body_mass_kg = r.number("body_mass_kg");
  m.body_inertia_kgm2 = r.mat3("body_inertia_kgm2");
  m.shoulder_position_m = r.vec3("shoulder_position_m");
  m.shoulder_axis = r.vec3("shoulder_axis", m.shoulder_axis);
  m.elbow_axis = r.vec3("elbow_axis", m.elbow_axis);
  m.proximal = segment_from(r.child("proximal"));
  m.distal = segment_from(r.child("distal"));
  m.span_m = r.number("span_m");
  {
    ObjectReader c = r.child("chord");
    const std::string kind = c.string("kind", "table");
    if (kind == "elliptic") {
      m.chord = ChordDistribution::elliptic(c.number("root_chord_m"));
    } else if (kind == "table") {
      m.chord = ChordDistribution::table(c.numbers("stations_m"), c.numbers("chords_m"));
    } else {
      throw ParseError("chord.kind must be 'table' or 'elliptic' (got '" + kind + "')");
    }
    c.finish();
  }
  m.lift_slope_per_rad = r.number("lift_slope_per_rad", m.lift_slope_per_rad);
  m.air_density_kgm3 = r.number("air_density_kgm3", m.air_density_kgm3);
  m.profile_drag_coeff = r.number("profile_drag_coeff", m.profile_drag_coeff);
  m.n_elements = r.integer("n_elements", m.n_elements);
  m.gravity_mps2 = r.number("gravity_mps2", m.gravity_mps2);
  if (r.has("thrusters")) {
    const Json& list = r.raw("thrusters");
    if (!list.is_array()) throw ParseError("'thrusters' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      ObjectReader t(list[i], "thrusters[" + std::to_string(i) + "].");
      Thruster th;
      th.position_m = t.vec3("position_m");
      th.axis = t.vec3("axis", th.axis);
      th.max_thrust_n = t.number("max_thrust_n");
      t.finish();
      m.thrusters.push_back(th);
    }
  }
  r.finish();
  validate(m);
  return m;
}

Json to_json(const RobotModel& m) {
  Json chord;
  if (m.chord.kind() == ChordDistribution::Kind::elliptic) {
    chord = {{"kind", "elliptic"}, {"root_chord_m", m.chord.root_chord()}};
  } else {
    chord = {{"kind", "table"}, {"stations_m", m.chord.stations()}, {"chords_m", m.chord.chords()}};
  }
  Json thrusters = Json::array();
  for (const auto& t : m.thrusters) {
    thrusters.push_back({{"position_m", vec_json(t.position_m)},
                         {"axis", vec_json(t.axis)},
                         {"max_thrust_n", t.max_thrust_n}});
  }
  return {{"body_mass_kg", m.body_mass_kg},
          {"body_inertia_kgm2", mat_json(m.body_inertia_kgm2)},
          {"shoulder_position_m", vec_json(m.shoulder_position_m)},
          {"shoulder_axis", vec_json(m.shoulder_axis)},
          {"elbow_axis", vec_json(m.elbow_axis)},
          {"proximal", segment_json(m.proximal)},
          {"distal", segment_json(m.distal)},
          {"span_m", m.span_m},
          {"chord", chord},
          {"lift_slope_per_rad", m.lift_slope_per_rad},
          {"air_density_kgm3", m.air_density_kgm3},
          {"profile_drag_coeff", m.profile_drag_coeff},
          {"n_elements", m.n_elements},
          {"gravity_mps2", m.gravity_mps2},
          {"thrusters", thrusters}};
}

GaitSchedule gait_from_json(const Json& doc) {
  ObjectReader r(doc, "");
  GaitSchedule g;
  const std::string waveform = r.string("waveform", "sinusoid");
  g.frequency_hz = r.number("frequency_hz");
  if (waveform == "sinusoid") {
    g.waveform = GaitSchedule::Waveform::sinusoid;
    g.shoulder = wave_from(r.child("shoulder"));
    g.elbow = wave_from(r.child("elbow"));
  } else if (waveform == "tabulated") {
    g.waveform = GaitSchedule::Waveform::tabulated;
    ObjectReader s = r.child("shoulder");
    g.shoulder_table = TabulatedWave(s.numbers("samples_rad"));
    s.finish();
    ObjectReader e = r.child("elbow");
    g.elbow_table = TabulatedWave(e.numbers("samples_rad"));
    e.finish();
  } else {
    throw ParseError("waveform must be 'sinusoid' or 'tabulated' (got '" + waveform + "')");
  }
  r.finish();
  validate(g);
  return g;
}

Json to_json(const GaitSchedule& g) {
  if (g.waveform == GaitSchedule::Waveform::tabulated) {
    return {{"waveform", "tabulated"},
            {"frequency_hz", g.frequency_hz},
            {"shoulder", {{"samples_rad", g.shoulder_table.samples()}}},
            {"elbow", {{"samples_rad", g.elbow_table.samples()}}}};
  }
  return {{"waveform", "sinusoid"},
          {"frequency_hz", g.frequency_hz},
          {"shoulder", wave_json(g.shoulder)},
          {"elbow", wave_json(g.elbow)}};
}

ScenarioConfig scenario_from_json(const Json& doc) {
  ObjectReader r(doc, "");
  ScenarioConfig s;
  s.mode = mode_from(r.string("mode", "tethered"));
  s.aero_model = aero_from(r.string("aero_model", "unsteady"));
  if (r.has("wind_mps")) {
    const Json& w = r.raw("wind_mps");
    if (w.is_number()) {
      s.wind_mps = headwind(w.get<double>());
    } else {
      s.wind_mps = r.vec3("wind_mps");
    }
  }
  s.duration_s = r.number("duration_s", s.duration_s);
  s.dt_s = r.number("dt_s", s.dt_s);
  s.decimation = r.integer("decimation", s.decimation);
  s.transient_cycles = r.integer("transient_cycles", s.transient_cycles);
  s.freestream_floor_mps = r.number("freestream_floor_mps", s.freestream_floor_mps);
  if (r.has("initial")) {
    ObjectReader i = r.child("initial");
    s.initial.position_m = i.vec3("position_m", Vec3::Zero());
    s.initial.attitude_rad = i.vec3("attitude_rad", Vec3::Zero());
    s.initial.velocity_mps = i.vec3("velocity_mps", Vec3::Zero());
    s.initial.euler_rates_radps = i.vec3("euler_rates_radps", Vec3::Zero());
    i.finish();
  }
  if (r.has("sweep")) {
    ObjectReader g = r.child("sweep");
    s.sweep.wind_mps = g.numbers("wind_mps", {});
    s.sweep.flap_frequency_hz = g.numbers("flap_frequency_hz", {});
    g.finish();
  }
  if (r.has("controller")) {
    ObjectReader c = r.child("controller");
    const CascadeGains d;
    if (c.has("roll")) s.controller.roll = gains_from(c.child("roll"), d.roll);
    if (c.has("pitch")) s.controller.pitch = gains_from(c.child("pitch"), d.pitch);
    if (c.has("vx")) s.controller.vx = gains_from(c.child("vx"), d.vx);
    if (c.has("vy")) s.controller.vy = gains_from(c.child("vy"), d.vy);
    s.controller.collective_n = c.number("collective_n", d.collective_n);
    c.finish();
  }
  if (r.has("setpoint")) {
    ObjectReader p = r.child("setpoint");
    s.setpoint.vx_mps = p.number("vx_mps", 0.0);
    s.setpoint.vy_mps = p.number("vy_mps", 0.0);
    s.setpoint.roll_trim_rad = p.number("roll_trim_rad", 0.0);
    s.setpoint.pitch_trim_rad = p.number("pitch_trim_rad", 0.0);
    p.finish();
  }
  if (r.has("seed")) {
    const Json& v = r.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ParseError("'seed' must be a non-negative integer");
    }
    s.seed = v.get<std::uint64_t>();
  }
  s.mass_perturbation = r.number("mass_perturbation", s.mass_perturbation);
  r.finish();
  validate(s);
  return s;
}

Json to_json(const ScenarioConfig& s) {
  const bool pure_headwind = s.wind_mps.y() == 0.0 && s.wind_mps.z() == 0.0;
  Json wind = pure_headwind ? Json(-s.wind_mps.x()) : vec_json(s.wind_mps);
  return {{"mode", to_string(s.mode)},
          {"aero_model", to_string(s.aero_model)},
          {"wind_mps", wind},
          {"duration_s", s.duration_s},
          {"dt_s", s.dt_s},
          {"decimation", s.decimation},
          {"transient_cycles", s.transient_cycles},
          {"freestream_floor_mps", s.freestream_floor_mps},
          {"initial",
           {{"position_m", vec_json(s.initial.position_m)},
            {"attitude_rad", vec_json(s.initial.attitude_rad)},
            {"velocity_mps", vec_json(s.initial.velocity_mps)},
            {"euler_rates_radps", vec_json(s.initial.euler_rates_radps)}}},
          {"sweep", {{"wind_mps", s.sweep.wind_mps}, {"flap_frequency_hz", s.sweep.flap_frequency_hz}}},
          {"controller",
           {{"roll", gains_json(s.controller.roll)},
            {"pitch", gains_json(s.controller.pitch)},
            {"vx", gains_json(s.controller.vx)},
            {"vy", gains_json(s.controller.vy)},
            {"collective_n", s.controller.collective_n}}},
          {"setpoint",
           {{"vx_mps", s.setpoint.vx_mps},
            {"vy_mps", s.setpoint.vy_mps},
            {"roll_trim_rad", s.setpoint.roll_trim_rad},
            {"pitch_trim_rad", s.setpoint.pitch_trim_rad}}},
          {"seed", s.seed},
          {"mass_perturbation", s.mass_perturbation}};
}

RobotModel load_robot(const std::filesystem::path& path) {
  return robot_from_json(read_json_file(path));
}

GaitSchedule load_gait(const std::filesystem::path& path) {
  return gait_from_json(read_json_file(path));
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path));
}

namespace {

std::vector<std::string> split_path(std::string_view key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.emplace_back(key.substr(start, dot - start));
    if (parts.back().empty()) throw ParseError("empty component in override key '" +
                                               std::string(key) + "'");
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

std::pair<std::string, std::string> split_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ParseError("override must look like key=value (got '" + std::string(assignment) + "')");
  }
  return {std::string(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1))};
}

std::string kind_name(const Json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

bool same_kind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) {
    return !a.is_number_integer() || b.is_number_integer();
  }
  return a.type() == b.type();
}

}  // namespace

void apply_override(Json& doc, std::string_view assignment) {
  const auto [key, text] = split_assignment(assignment);
  const auto parts = split_path(key);
  Json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) {
      throw ParseError("override: unknown key '" + key + "'");
    }
    node = &(*node)[parts[i]];
  }
  if (!node->is_object() || !node->contains(parts.back())) {
    throw ParseError("override: unknown key '" + key + "'");
  }
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json& target = (*node)[parts.back()];
  if (!same_kind(target, value)) {
    throw ParseError("override: '" + key + "' expects " + kind_name(target) + ", got " +
                     kind_name(value));
  }
  target = value;
}

void apply_overrides(std::vector<Json*> documents, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto [key, text] = split_assignment(a);
    const std::string head = split_path(key).front();
    bool applied = false;
    for (Json* doc : documents) {
      if (doc->is_object() && doc->contains(head)) {
        apply_override(*doc, a);
        applied = true;
        break;
      }
    }
    if (!applied) throw ParseError("override: no configuration has a field '" + head + "'");
  }
}

}  // namespace flapsim
