#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homokin/io.hpp"
#include "homokin/observable.hpp"
#include "homokin/potential.hpp"

namespace homokin::cfg {

using Json = io::Json;

// All throw ValidationError carrying the field path (e.g. "potential.terms[2].phase").

void require_allowed_keys(const Json& obj, const std::string& path,
                          const std::vector<std::string>& allowed);

double num(const Json& obj, const std::string& path, const std::string& key);
double num_or(const Json& obj, const std::string& path, const std::string& key, double dflt);
long integer(const Json& obj, const std::string& path, const std::string& key);
long integer_or(const Json& obj, const std::string& path, const std::string& key, long dflt);
std::string str_or(const Json& obj, const std::string& path, const std::string& key,
                   const std::string& dflt);
std::vector<double> num_list(const Json& obj, const std::string& path, const std::string& key);

// Expands string presets ("cos-well", "harmonic-well", "constant",
// "random-phase") into their full object form; objects pass through.
Json expand_potential_preset(const Json& spec, const std::string& path);

// Builds the potential; `seed` overrides/supplies the realization seed for
// random-phase kinds (which otherwise require a "seed" entry).
Potential potential_from_json(const Json& spec, const std::string& path,
                              std::optional<std::uint64_t> seed = {});

RandomPhaseModel random_phase_model_from_json(const Json& spec, const std::string& path);

Observable observable_from_json(const Json& spec, const std::string& path);

}  // namespace homokin::cfg
