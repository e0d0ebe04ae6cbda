// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <string>

#include "secwave/harness.hpp"

/**
 * @file config.hpp
 * @brief Flat `key = value` scenario files.
 *
 * One assignment per line, `#` starts a comment, blank lines are ignored.
 * Every file must declare `schema_version = 1`. Unknown keys are rejected so
 * that a typo never silently falls back to a default. See docs/config.md.
 */

namespace secwave::config {

inline constexpr int schema_version = 1;

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ValidationError("'" + key + "' expects a number, got '" + v + "'");
    return x;
}

inline long long to_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ValidationError("'" + key + "' expects an integer, got '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ValidationError("'" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace detail

inline KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ValidationError("line " + std::to_string(lineno) + ": empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw ValidationError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

/// Builds a sweep specification; absent keys keep their defaults.
inline harness::SweepSpec spec_from_key_values(const KeyValues& kv) {
    auto it = kv.find("schema_version");
    if (it == kv.end()) throw ValidationError("missing schema_version");
    if (detail::to_integer("schema_version", it->second) != schema_version) {
        throw ValidationError("unsupported schema_version " + it->second);
    }
    harness::SweepSpec s;
    bool range_given = false;
    for (const auto& [key, v] : kv) {
        if (key == "schema_version") continue;
        else if (key == "mode") s.mode = harness::parse_mode(v);
        else if (key == "chips") s.scenario.chips = detail::to_integer(key, v);
        else if (key == "paths") s.scenario.paths = detail::to_integer(key, v);
        else if (key == "noise_variance") s.scenario.noise_variance = detail::to_double(key, v);
        else if (key == "interferers_min") s.scenario.interferers_min = detail::to_integer(key, v);
        else if (key == "interferers_max") s.scenario.interferers_max = detail::to_integer(key, v);
        else if (key == "interferer_energy_min") s.scenario.interferer_energy_min = detail::to_double(key, v);
        else if (key == "interferer_energy_max") s.scenario.interferer_energy_max = detail::to_double(key, v);
        else if (key == "isi") s.scenario.isi_enabled = detail::to_bool(key, v);
        else if (key == "seed") {
            const long long x = detail::to_integer(key, v);
            if (x < 0) throw ValidationError("seed must be non-negative");
            s.scenario.seed = static_cast<std::uint64_t>(x);
        } else if (key == "trials") s.scenario.trials = detail::to_integer(key, v);
        else if (key == "receivers") s.receivers = detail::to_integer(key, v);
        else if (key == "gamma_db") s.gamma_db = detail::to_double(key, v);
        else if (key == "emax") s.e_max = detail::to_double(key, v);
        else if (key == "sweep") s.variable = harness::parse_sweep_variable(v);
        else if (key == "sweep_start") { s.start = detail::to_double(key, v); range_given = true; }
        else if (key == "sweep_stop") { s.stop = detail::to_double(key, v); range_given = true; }
        else if (key == "sweep_step") { s.step = detail::to_double(key, v); range_given = true; }
        else if (key == "bits_per_trial") s.bits_per_trial = detail::to_integer(key, v);
        else if (key == "randomization_samples") s.randomization_samples = static_cast<int>(detail::to_integer(key, v));
        else if (key == "threads") {
            const long long x = detail::to_integer(key, v);
            if (x < 1) throw ValidationError("threads must be >= 1");
            s.threads = static_cast<unsigned>(x);
        } else if (key == "eve_average") {
            if (v == "linear") s.eve_average = harness::EveAverage::linear;
            else if (v == "db") s.eve_average = harness::EveAverage::db;
            else throw ValidationError("eve_average must be linear or db");
        } else {
            throw ValidationError("unknown key '" + key + "'");
        }
    }
    if (!range_given) {
        // A file without a range describes a single operating point.
        const double v = s.variable == harness::SweepVariable::gamma_db ? s.gamma_db
                         : s.variable == harness::SweepVariable::e_max ? s.e_max
                                                                       : static_cast<double>(s.scenario.chips);
        s.start = s.stop = v;
    }
    s.validate();
    return s;
}

inline harness::SweepSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return spec_from_key_values(parse_key_values(in));
}

}  // namespace secwave::config
