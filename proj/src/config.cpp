#include "homokin/config.hpp"

#include <cmath>
#include <numbers>

#include "homokin/errors.hpp"

namespace homokin::cfg {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const Json& require(const Json& obj, const std::string& path, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required entry");
  return *it;
}

double as_num(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

}  // namespace

void require_allowed_keys(const Json& obj, const std::string& path,
                          const std::vector<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const std::string& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

double num(const Json& obj, const std::string& path, const std::string& key) {
  return as_num(require(obj, path, key), path + "." + key);
}

double num_or(const Json& obj, const std::string& path, const std::string& key, double dflt) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : as_num(*it, path + "." + key);
}

long integer(const Json& obj, const std::string& path, const std::string& key) {
  const Json& v = require(obj, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

long integer_or(const Json& obj, const std::string& path, const std::string& key, long dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_number_integer()) fail(path + "." + key, "expected an integer");
  return it->get<long>();
}

std::string str_or(const Json& obj, const std::string& path, const std::string& key,
                   const std::string& dflt) {
  auto it = obj.find(key);
  if (it == obj.end()) return dflt;
  if (!it->is_string()) fail(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::vector<double> num_list(const Json& obj, const std::string& path, const std::string& key) {
  const Json& v = require(obj, path, key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(as_num(v[i], path + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

Json expand_potential_preset(const Json& spec, const std::string& path) {
  if (spec.is_object()) return spec;
  if (!spec.is_string()) fail(path, "expected a preset name or an object");
  const std::string name = spec.get<std::string>();
  if (name == "cos-well") return Json{{"kind", "cosine-well"}};
  if (name == "harmonic-well")
    return Json{{"kind", "harmonic-well"}, {"half_width", 0.25}, {"cap_rise", 0.1}};
  if (name == "constant") return Json{{"kind", "constant"}, {"value", 0.0}};
  if (name == "random-phase") {
    Json modes = Json::array();
    for (const RandomPhaseMode& m : RandomPhaseModel::standard().modes)
      modes.push_back({{"amplitude", m.amplitude}, {"wavenumber", m.wavenumber}});
    return Json{{"kind", "random-phase"}, {"modes", modes}, {"window", 1e4}};
  }
  fail(path, "unknown potential preset '" + name + "'");
}

namespace {

std::vector<FourierTerm> terms_from_json(const Json& spec, const std::string& path) {
  const Json& arr = require(spec, path, "terms");
  if (!arr.is_array() || arr.empty()) fail(path + ".terms", "expected a nonempty array");
  std::vector<FourierTerm> terms;
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string tp = path + ".terms[" + std::to_string(i) + "]";
    require_allowed_keys(arr[i], tp, {"amplitude", "wavenumber", "phase"});
    FourierTerm t;
    t.amplitude = num(arr[i], tp, "amplitude");
    t.wavenumber = num(arr[i], tp, "wavenumber");
    t.phase = num_or(arr[i], tp, "phase", 0.0);
    terms.push_back(t);
  }
  return terms;
}

}  // namespace

RandomPhaseModel random_phase_model_from_json(const Json& spec, const std::string& path) {
  require_allowed_keys(spec, path, {"kind", "modes", "window", "seed"});
  RandomPhaseModel model;
  const Json& arr = require(spec, path, "modes");
  if (!arr.is_array() || arr.empty()) fail(path + ".modes", "expected a nonempty array");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string mp = path + ".modes[" + std::to_string(i) + "]";
    require_allowed_keys(arr[i], mp, {"amplitude", "wavenumber"});
    model.modes.push_back({num(arr[i], mp, "amplitude"), num(arr[i], mp, "wavenumber")});
  }
  model.window = num_or(spec, path, "window", 1e4);
  if (!(model.window > 0.0)) fail(path + ".window", "must be positive");
  return model;
}

Potential potential_from_json(const Json& spec, const std::string& path,
                              std::optional<std::uint64_t> seed) {
  const Json obj = expand_potential_preset(spec, path);
  const std::string kind = str_or(obj, path, "kind", "");
  if (kind.empty()) fail(path + ".kind", "missing potential kind");
  try {
    if (kind == "constant") {
      require_allowed_keys(obj, path, {"kind", "value"});
      return Potential::constant(num_or(obj, path, "value", 0.0));
    }
    if (kind == "cosine-well") {
      require_allowed_keys(obj, path, {"kind"});
      return Potential::cosine_well();
    }
    if (kind == "periodic1d") {
      require_allowed_keys(obj, path, {"kind", "terms"});
      return Potential::periodic1d(terms_from_json(obj, path));
    }
    if (kind == "harmonic-well") {
      require_allowed_keys(obj, path, {"kind", "half_width", "cap_rise"});
      return Potential::harmonic_well(num_or(obj, path, "half_width", 0.25),
                                      num_or(obj, path, "cap_rise", 0.1));
    }
    if (kind == "random-phase") {
      RandomPhaseModel model = random_phase_model_from_json(obj, path);
      std::uint64_t s;
      if (seed)
        s = *seed;
      else if (obj.contains("seed"))
        s = static_cast<std::uint64_t>(integer(obj, path, "seed"));
      else
        fail(path + ".seed", "random-phase potentials need a realization seed");
      return model.realize(s);
    }
    if (kind == "separable") {
      require_allowed_keys(obj, path, {"kind", "axes"});
      const Json& arr = require(obj, path, "axes");
      if (!arr.is_array() || arr.size() < 2)
        fail(path + ".axes", "expected an array of at least two axis potentials");
      std::vector<Potential> axes;
      for (size_t i = 0; i < arr.size(); ++i)
        axes.push_back(
            potential_from_json(arr[i], path + ".axes[" + std::to_string(i) + "]", seed));
      return Potential::separable(std::move(axes));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown potential kind '" + kind + "'");
}

Observable observable_from_json(const Json& spec, const std::string& path) {
  if (!spec.is_object()) fail(path, "expected an object");
  const std::string kind = str_or(spec, path, "kind", "");
  if (kind.empty()) fail(path + ".kind", "missing observable kind");
  try {
    if (kind == "coordinate") {
      require_allowed_keys(spec, path, {"kind"});
      return Observable::coordinate();
    }
    if (kind == "momentum") {
      require_allowed_keys(spec, path, {"kind"});
      return Observable::momentum();
    }
    if (kind == "kinetic") {
      require_allowed_keys(spec, path, {"kind"});
      return Observable::kinetic();
    }
    if (kind == "constant") {
      require_allowed_keys(spec, path, {"kind", "value"});
      return Observable::constant(num(spec, path, "value"));
    }
    if (kind == "sin_y") {
      require_allowed_keys(spec, path, {"kind", "wavenumber"});
      return Observable::sin_y(num_or(spec, path, "wavenumber", 1.0));
    }
    if (kind == "cos_y") {
      require_allowed_keys(spec, path, {"kind", "wavenumber"});
      return Observable::cos_y(num_or(spec, path, "wavenumber", 1.0));
    }
    if (kind == "speed_band") {
      require_allowed_keys(spec, path, {"kind", "lo", "hi"});
      return Observable::speed_band(num(spec, path, "lo"), num(spec, path, "hi"));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path + ".kind", "unknown observable kind '" + kind + "'");
}

}  // namespace homokin::cfg
