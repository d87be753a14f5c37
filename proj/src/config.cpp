#include "vprobe/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <initializer_list>

#ifndef VPROBE_VERSION
#define VPROBE_VERSION "0.0.0"
#endif

namespace vprobe {

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  expect_object(j, path.empty() ? "config" : path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + child(path, key) + "'");
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

template <typename F>
void rethrow_as_config(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

AxisSpec read_axis(const Json& j, const std::string& path) {
  check_keys(j, path, {"name", "values", "range"});
  if (!j.contains("name")) throw ConfigError(path + ": missing 'name'");
  AxisSpec a;
  rethrow_as_config(path + ".name", [&] { a.axis = parse_sweep_axis(text(j["name"], path + ".name")); });
  if (j.contains("values") == j.contains("range")) {
    throw ConfigError(path + ": give exactly one of 'values' or 'range'");
  }
  if (j.contains("values")) {
    const Json& v = j["values"];
    if (!v.is_array()) throw ConfigError(path + ".values: expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) a.values.push_back(number(v[i], path + ".values[" + std::to_string(i) + "]"));
  } else {
    const Json& r = j["range"];
    const std::string rp = path + ".range";
    check_keys(r, rp, {"start", "stop", "count"});
    for (const char* k : {"start", "stop", "count"}) {
      if (!r.contains(k)) throw ConfigError(rp + ": missing '" + k + "'");
    }
    const int count = integer(r["count"], rp + ".count");
    if (count < 1) throw ConfigError(rp + ".count: must be >= 1");
    a.values = linspace(number(r["start"], rp + ".start"), number(r["stop"], rp + ".stop"), count);
  }
  return a;
}

Json axis_json(const AxisSpec& a) { return Json{{"name", to_string(a.axis)}, {"values", a.values}}; }

std::string method_name(SteadyStateMethod m) { return m == SteadyStateMethod::Harmonic ? "harmonic" : "time_integration"; }

SweepSpec default_spec() {
  SweepSpec s;
  s.name = "custom";
  s.model.kind = ModelKind::Dicke;
  s.model.N = 3;
  s.ancilla = {2.75, 0.1};
  s.dissipation = {0.01, 0.01, 0.01, JumpMode::Dressed};
  s.drive = {0.0, 0.005};
  s.axis = {SweepAxis::Lambda, {0.0}};
  return s;
}

}  // namespace

Json to_json(const SweepSpec& s) {
  Json j;
  j["name"] = s.name;
  j["model"] = {{"kind", to_string(s.model.kind)},
                {"omega_c", s.model.omega_c},
                {"omega_0", s.model.omega_0},
                {"lambda", s.model.lambda},
                {"N", s.model.N},
                {"D", s.model.D_override ? Json(*s.model.D_override) : Json(nullptr)}};
  j["ancilla"] = {{"omega_M", s.ancilla.omega_M}, {"g_M", s.ancilla.g_M}};
  j["dissipation"] = {{"gamma_c", s.dissipation.gamma_c},
                      {"gamma_0", s.dissipation.gamma_0},
                      {"gamma_M", s.dissipation.gamma_M},
                      {"mode", s.dissipation.mode == JumpMode::Dressed ? "dressed" : "bare"}};
  j["drive"] = {{"omega_p", s.drive.omega_p}, {"Omega_p", s.drive.Omega_p}};
  j["axis"] = axis_json(s.axis);
  j["series"] = s.series ? axis_json(*s.series) : Json(nullptr);
  Json outputs = Json::array();
  for (Quantity q : s.outputs) outputs.push_back(to_string(q));
  j["outputs"] = outputs;
  j["workers"] = s.workers;
  const Numerics& n = s.numerics;
  j["numerics"] = {{"n_max", n.n_max},
                   {"validate_truncation", n.validate_truncation},
                   {"truncation_tol", n.truncation_tol},
                   {"shift_tol", n.shift_tol},
                   {"max_n_max", n.max_n_max},
                   {"K", n.K},
                   {"degeneracy_tol", n.degeneracy_tol},
                   {"method", method_name(n.method)},
                   {"harmonics", n.harmonics},
                   {"omega_p_relative", n.omega_p_relative},
                   {"dicke_v_factor", static_cast<int>(n.convention)},
                   {"levels", n.levels},
                   {"propagation",
                    {{"max_time", n.propagation.max_time},
                     {"rel_tol", n.propagation.rel_tol},
                     {"window_periods", n.propagation.window_periods},
                     {"min_steps_per_period", n.propagation.min_steps_per_period},
                     {"step_scale", n.propagation.step_scale},
                     {"check_invariants", n.propagation.check_invariants}}}};
  return j;
}

SweepSpec apply_config(const SweepSpec& base, const Json& doc) {
  SweepSpec s = base;
  check_keys(doc, "", {"preset", "name", "model", "ancilla", "dissipation", "drive", "axis", "series", "outputs",
                       "workers", "numerics"});

  if (doc.contains("name")) s.name = text(doc["name"], "name");

  if (doc.contains("model")) {
    const Json& m = doc["model"];
    check_keys(m, "model", {"kind", "omega_c", "omega_0", "lambda", "N", "D"});
    if (m.contains("kind")) {
      rethrow_as_config("model.kind", [&] { s.model.kind = parse_model_kind(text(m["kind"], "model.kind")); });
    }
    if (m.contains("omega_c")) s.model.omega_c = number(m["omega_c"], "model.omega_c");
    if (m.contains("omega_0")) s.model.omega_0 = number(m["omega_0"], "model.omega_0");
    if (m.contains("lambda")) s.model.lambda = number(m["lambda"], "model.lambda");
    if (m.contains("N")) s.model.N = integer(m["N"], "model.N");
    if (m.contains("D")) {
      if (m["D"].is_null()) {
        s.model.D_override.reset();
      } else {
        s.model.D_override = number(m["D"], "model.D");
      }
    }
  }

  if (doc.contains("ancilla")) {
    const Json& a = doc["ancilla"];
    check_keys(a, "ancilla", {"omega_M", "g_M"});
    if (a.contains("omega_M")) s.ancilla.omega_M = number(a["omega_M"], "ancilla.omega_M");
    if (a.contains("g_M")) s.ancilla.g_M = number(a["g_M"], "ancilla.g_M");
  }

  if (doc.contains("dissipation")) {
    const Json& d = doc["dissipation"];
    check_keys(d, "dissipation", {"gamma_c", "gamma_0", "gamma_M", "mode"});
    if (d.contains("gamma_c")) s.dissipation.gamma_c = number(d["gamma_c"], "dissipation.gamma_c");
    if (d.contains("gamma_0")) s.dissipation.gamma_0 = number(d["gamma_0"], "dissipation.gamma_0");
    if (d.contains("gamma_M")) s.dissipation.gamma_M = number(d["gamma_M"], "dissipation.gamma_M");
    if (d.contains("mode")) {
      const std::string mode = text(d["mode"], "dissipation.mode");
      if (mode == "dressed") {
        s.dissipation.mode = JumpMode::Dressed;
      } else if (mode == "bare") {
        s.dissipation.mode = JumpMode::Bare;
      } else {
        throw ConfigError("dissipation.mode: expected 'dressed' or 'bare', got '" + mode + "'");
      }
    }
  }

  if (doc.contains("drive")) {
    const Json& d = doc["drive"];
    check_keys(d, "drive", {"omega_p", "Omega_p"});
    if (d.contains("omega_p")) s.drive.omega_p = number(d["omega_p"], "drive.omega_p");
    if (d.contains("Omega_p")) s.drive.Omega_p = number(d["Omega_p"], "drive.Omega_p");
  }

  if (doc.contains("axis")) s.axis = read_axis(doc["axis"], "axis");
  if (doc.contains("series")) {
    if (doc["series"].is_null()) {
      s.series.reset();
    } else {
      s.series = read_axis(doc["series"], "series");
    }
  }

  if (doc.contains("outputs")) {
    const Json& o = doc["outputs"];
    if (!o.is_array()) throw ConfigError("outputs: expected an array of quantity names");
    s.outputs.clear();
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string path = "outputs[" + std::to_string(i) + "]";
      rethrow_as_config(path, [&] { s.outputs.push_back(parse_quantity(text(o[i], path))); });
    }
  }

  if (doc.contains("workers")) s.workers = integer(doc["workers"], "workers");

  if (doc.contains("numerics")) {
    const Json& n = doc["numerics"];
    check_keys(n, "numerics",
               {"n_max", "validate_truncation", "truncation_tol", "shift_tol", "max_n_max", "K", "degeneracy_tol",
                "method", "harmonics", "omega_p_relative", "dicke_v_factor", "levels", "propagation"});
    Numerics& u = s.numerics;
    if (n.contains("n_max")) u.n_max = integer(n["n_max"], "numerics.n_max");
    if (n.contains("validate_truncation")) {
      u.validate_truncation = boolean(n["validate_truncation"], "numerics.validate_truncation");
    }
    if (n.contains("truncation_tol")) u.truncation_tol = number(n["truncation_tol"], "numerics.truncation_tol");
    if (n.contains("shift_tol")) u.shift_tol = number(n["shift_tol"], "numerics.shift_tol");
    if (n.contains("max_n_max")) u.max_n_max = integer(n["max_n_max"], "numerics.max_n_max");
    if (n.contains("K")) u.K = integer(n["K"], "numerics.K");
    if (n.contains("degeneracy_tol")) u.degeneracy_tol = number(n["degeneracy_tol"], "numerics.degeneracy_tol");
    if (n.contains("method")) {
      const std::string m = text(n["method"], "numerics.method");
      if (m == "harmonic") {
        u.method = SteadyStateMethod::Harmonic;
      } else if (m == "time_integration") {
        u.method = SteadyStateMethod::TimeIntegration;
      } else {
        throw ConfigError("numerics.method: expected 'harmonic' or 'time_integration', got '" + m + "'");
      }
    }
    if (n.contains("harmonics")) u.harmonics = integer(n["harmonics"], "numerics.harmonics");
    if (n.contains("omega_p_relative")) u.omega_p_relative = boolean(n["omega_p_relative"], "numerics.omega_p_relative");
    if (n.contains("dicke_v_factor")) {
      const int f = integer(n["dicke_v_factor"], "numerics.dicke_v_factor");
      if (f != 1 && f != 2) throw ConfigError("numerics.dicke_v_factor: must be 1 or 2");
      u.convention = static_cast<DickeVConvention>(f);
    }
    if (n.contains("levels")) u.levels = integer(n["levels"], "numerics.levels");
    if (n.contains("propagation")) {
      const Json& p = n["propagation"];
      const std::string pp = "numerics.propagation";
      check_keys(p, pp, {"max_time", "rel_tol", "window_periods", "min_steps_per_period", "step_scale", "check_invariants"});
      PropagationSettings& q = u.propagation;
      if (p.contains("max_time")) q.max_time = number(p["max_time"], pp + ".max_time");
      if (p.contains("rel_tol")) q.rel_tol = number(p["rel_tol"], pp + ".rel_tol");
      if (p.contains("window_periods")) q.window_periods = integer(p["window_periods"], pp + ".window_periods");
      if (p.contains("min_steps_per_period")) {
        q.min_steps_per_period = integer(p["min_steps_per_period"], pp + ".min_steps_per_period");
      }
      if (p.contains("step_scale")) q.step_scale = number(p["step_scale"], pp + ".step_scale");
      if (p.contains("check_invariants")) q.check_invariants = boolean(p["check_invariants"], pp + ".check_invariants");
    }
  }

  rethrow_as_config("config", [&] { s.validate(); });
  return s;
}

SweepSpec resolve_config(const Json& doc, const std::optional<std::string>& preset) {
  std::optional<std::string> name = preset;
  if (!name && doc.is_object() && doc.contains("preset")) name = text(doc["preset"], "preset");
  SweepSpec base = default_spec();
  if (name) rethrow_as_config("preset", [&] { base = find_preset(*name); });
  return apply_config(base, doc.is_null() ? Json::object() : doc);
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

Json sidecar_json(const SweepResult& result, const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  Json truncation = Json::array();
  for (const SeriesTruncation& t : result.truncation) {
    Json entry = {{"series_value", t.series_value}, {"n_max", t.n_max}, {"validated", t.validated}};
    if (t.validated) {
      entry["converged"] = t.report.converged;
      entry["edge_occupancy"] = t.report.edge_occupancy;
      entry["shift_change"] = std::isfinite(t.report.shift_change) ? Json(t.report.shift_change) : Json(nullptr);
    }
    truncation.push_back(entry);
  }
  Json errors = Json::array();
  for (const SweepRow& r : result.rows) {
    if (r.fatal()) errors.push_back({{"row", r.index}, {"error", r.error}});
  }
  return Json{{"command", command},
              {"spec", to_json(result.spec)},
              {"provenance",
               {{"version", VPROBE_VERSION},
                {"timestamp", stamp},
                {"wall_seconds", result.wall_seconds},
                {"rows", result.rows.size()},
                {"fatal_rows", result.fatal_count()},
                {"truncation", truncation},
                {"errors", errors}}}};
}

}  // namespace vprobe
