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

// Command-line front end: single-instance designs, BER simulation and sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "secwave/config.hpp"
#include "secwave/harness.hpp"

namespace {

using namespace secwave;
using json = nlohmann::json;

struct Overrides {
    std::string config;
    std::optional<double> gamma_db;
    std::optional<long long> chips;
    std::optional<double> e_max;
    std::optional<long long> receivers;
    std::optional<long long> trials;
    std::optional<long long> seed;
    std::optional<long long> bits;
    std::optional<std::string> mode;
    std::optional<std::string> eve_average;
    std::optional<unsigned> threads;
    std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "scenario file (key = value)")->required();
    cmd->add_option("--gamma-db", o.gamma_db, "SINR target in dB");
    cmd->add_option("--l", o.chips, "waveform length L in chips");
    cmd->add_option("--emax", o.e_max, "energy budget per bit");
    cmd->add_option("--k", o.receivers, "number of legitimate receivers");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per swept value");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--mode", o.mode, "design mode");
    cmd->add_option("--out", o.out, "output path (default: stdout)");
}

// A flag that fixes the swept variable collapses the sweep to that point.
harness::SweepSpec resolve(const Overrides& o) {
    harness::SweepSpec s = config::load_spec(o.config);
    auto pin = [&](harness::SweepVariable v, double value) {
        if (s.variable == v) s.start = s.stop = value;
    };
    if (o.gamma_db) {
        s.gamma_db = *o.gamma_db;
        pin(harness::SweepVariable::gamma_db, *o.gamma_db);
    }
    if (o.chips) {
        s.scenario.chips = *o.chips;
        pin(harness::SweepVariable::chips, static_cast<double>(*o.chips));
    }
    if (o.e_max) {
        s.e_max = *o.e_max;
        pin(harness::SweepVariable::e_max, *o.e_max);
    }
    if (o.receivers) s.receivers = *o.receivers;
    if (o.trials) s.scenario.trials = *o.trials;
    if (o.seed) {
        if (*o.seed < 0) throw ValidationError("seed must be non-negative");
        s.scenario.seed = static_cast<std::uint64_t>(*o.seed);
    }
    if (o.mode) s.mode = harness::parse_mode(*o.mode);
    if (o.bits) s.bits_per_trial = *o.bits;
    if (o.threads) s.threads = *o.threads;
    if (o.eve_average) {
        if (*o.eve_average == "linear") s.eve_average = harness::EveAverage::linear;
        else if (*o.eve_average == "db") s.eve_average = harness::EveAverage::db;
        else throw ValidationError("--eve-average must be linear or db");
    }
    s.validate();
    return s;
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw IoError("write to '" + path + "' failed");
}

json complex_array(const CVector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
    return a;
}

// Designs one instance: the links of trial 0 at the configured point.
std::string design_instance(const harness::SweepSpec& s) {
    const harness::PointSettings ps = harness::point_settings(s, s.start);
    const harness::TrialLinks links = harness::draw_trial_links(ps.scenario, s.receivers, 0);
    Rng rng = substream(ps.scenario.seed, 0, 1);
    const harness::TrialSolution sol =
        harness::design_for_mode(s.mode, links, ps.gamma, ps.e_max, s.randomization_samples, rng);
    json j;
    j["mode"] = harness::to_string(s.mode);
    j["chips"] = ps.scenario.chips;
    j["receivers"] = s.receivers;
    j["gamma_db"] = harness::linear_to_db(ps.gamma);
    j["e_max"] = ps.e_max;
    j["seed"] = ps.scenario.seed;
    j["branch"] = to_string(sol.design.branch);
    j["energy"] = sol.design.energy;
    j["energy_an"] = sol.noise ? sol.noise->budget : 0.0;
    json bob = json::array();
    for (const channel::Link& l : links.bobs) bob.push_back(harness::receiver_sinr(l, sol));
    j["sinr_bob"] = bob;
    j["sinr_eve"] = harness::receiver_sinr(links.eve, sol);
    if (sol.lower_bound) j["sdp_lower_bound"] = *sol.lower_bound;
    j["waveform"] = complex_array(sol.design.waveform);
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure waveform design for multipath wiretap channels"};
    app.require_subcommand(1);

    Overrides p2p, multicast, ber, sweep;
    auto* c_p2p = app.add_subcommand("design-p2p", "design one point-to-point waveform and print it as JSON");
    add_common(c_p2p, p2p);
    auto* c_mc = app.add_subcommand("design-multicast", "design one multicast waveform and print it as JSON");
    add_common(c_mc, multicast);
    auto* c_ber = app.add_subcommand("simulate-ber", "SINR sweep with simulated uncoded BER, as CSV");
    add_common(c_ber, ber);
    c_ber->add_option("--bits", ber.bits, "bits per trial (>= 1000)");
    auto* c_sweep = app.add_subcommand("sweep", "analytic SINR sweep, as CSV");
    add_common(c_sweep, sweep);
    for (auto [cmd, o] : {std::pair{c_ber, &ber}, std::pair{c_sweep, &sweep}}) {
        cmd->add_option("--eve-average", o->eve_average, "average Eve SINR in 'linear' or 'db' scale");
        cmd->add_option("--threads", o->threads, "worker threads");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*c_p2p) {
            harness::SweepSpec s = resolve(p2p);
            if (harness::is_multicast(s.mode)) throw ValidationError("design-p2p needs a single-receiver mode");
            write_output(design_instance(s), p2p.out);
        } else if (*c_mc) {
            if (!multicast.mode) multicast.mode = "multicast-sdr";
            harness::SweepSpec s = resolve(multicast);
            if (!harness::is_multicast(s.mode)) throw ValidationError("design-multicast needs a multicast mode");
            write_output(design_instance(s), multicast.out);
        } else if (*c_ber) {
            harness::SweepSpec s = resolve(ber);
            write_output(harness::format_csv(harness::estimate_ber(s, s.bits_per_trial)), ber.out);
        } else if (*c_sweep) {
            harness::SweepSpec s = resolve(sweep);
            write_output(harness::format_csv(harness::run_sweep(s)), sweep.out);
        }
    } catch (const Error& e) {
        std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
