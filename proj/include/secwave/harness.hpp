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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <exception>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "secwave/an.hpp"
#include "secwave/channel.hpp"
#include "secwave/design.hpp"
#include "secwave/p2p.hpp"
#include "secwave/rng.hpp"
#include "secwave/sdr.hpp"

/**
 * @file harness.hpp
 * @brief Monte Carlo driver for SINR and BER sweeps.
 *
 * Every trial draws fresh links for the K receivers and Eve from substream
 * (seed, trial, 0); the draws do not depend on the swept value, so all points
 * of a gamma or E_max sweep see the same channel realizations. Randomization
 * and bit-level simulation use further substreams of the same trial. Trials
 * may run on several threads; aggregation always walks trials in order, so
 * output is bit-identical for any thread count.
 */

namespace secwave::harness {

enum class DesignMode {
    eigen_known_csi,
    an_unknown_csi,
    min_energy_no_an,
    multicast_sdr,
    multicast_min_energy_an,
    sum_sinr,
};

inline const char* to_string(DesignMode m) {
    switch (m) {
        case DesignMode::eigen_known_csi: return "eigen-known-csi";
        case DesignMode::an_unknown_csi: return "an-unknown-csi";
        case DesignMode::min_energy_no_an: return "min-energy-no-an";
        case DesignMode::multicast_sdr: return "multicast-sdr";
        case DesignMode::multicast_min_energy_an: return "multicast-min-energy-an";
        case DesignMode::sum_sinr: return "sum-sinr";
    }
    return "unknown";
}

inline DesignMode parse_mode(const std::string& s) {
    for (DesignMode m : {DesignMode::eigen_known_csi, DesignMode::an_unknown_csi, DesignMode::min_energy_no_an,
                         DesignMode::multicast_sdr, DesignMode::multicast_min_energy_an, DesignMode::sum_sinr}) {
        if (s == to_string(m)) return m;
    }
    throw ValidationError("unknown design mode '" + s + "'");
}

inline bool is_multicast(DesignMode m) {
    return m == DesignMode::multicast_sdr || m == DesignMode::multicast_min_energy_an || m == DesignMode::sum_sinr;
}

inline bool uses_an(DesignMode m) {
    return m == DesignMode::an_unknown_csi || m == DesignMode::multicast_min_energy_an;
}

enum class SweepVariable { gamma_db, chips, e_max };

inline const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::gamma_db: return "gamma_db";
        case SweepVariable::chips: return "chips";
        case SweepVariable::e_max: return "emax";
    }
    return "unknown";
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "gamma_db") return SweepVariable::gamma_db;
    if (s == "chips" || s == "L") return SweepVariable::chips;
    if (s == "emax" || s == "e_max") return SweepVariable::e_max;
    throw ValidationError("unknown sweep variable '" + s + "'");
}

/// How Eve's per-trial SINRs are averaged before the dB conversion.
enum class EveAverage { linear, db };

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct SweepSpec {
    channel::ScenarioConfig scenario;
    DesignMode mode = DesignMode::eigen_known_csi;
    SweepVariable variable = SweepVariable::gamma_db;
    double start = 0.0;
    double stop = 10.0;
    double step = 1.0;
    double gamma_db = 6.0;  // used when gamma is not swept
    double e_max = 100.0;   // used when E_max is not swept
    Index receivers = 1;    // K
    Index bits_per_trial = 10000;
    int randomization_samples = sdr::default_randomization_samples;
    EveAverage eve_average = EveAverage::linear;
    unsigned threads = 1;

    std::vector<double> swept_values() const {
        std::vector<double> v;
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) v.push_back(start + static_cast<double>(i) * step);
        return v;
    }

    void validate() const {
        scenario.validate();
        if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop)) {
            throw ValidationError("sweep range must satisfy start <= stop with step > 0");
        }
        if (variable == SweepVariable::chips) {
            if (start < 2.0 || std::floor(start) != start || std::floor(step) != step) {
                throw ValidationError("chip sweep needs integer start >= 2 and integer step");
            }
        }
        if (variable == SweepVariable::e_max && !(start > 0.0)) throw ValidationError("E_max sweep must be positive");
        if (!(e_max > 0.0)) throw ValidationError("E_max must be positive");
        if (receivers < 1) throw ValidationError("receivers (K) must be >= 1");
        if (!is_multicast(mode) && receivers != 1) {
            throw ValidationError(std::string("mode ") + to_string(mode) + " serves exactly one receiver");
        }
        if (randomization_samples < 1) throw ValidationError("randomization_samples must be >= 1");
    }
};

/// Design-dependent part of a trial; absent when Alice does not transmit.
struct TrialDesign {
    std::vector<double> sinr_bob;  // per receiver, with AN when present
    double sinr_eve = 0.0;
    double energy = 0.0;
    double energy_an = 0.0;
    DesignBranch branch = DesignBranch::eigen;
    std::uint64_t bits = 0;                // per receiver
    std::vector<std::uint64_t> errors_bob;
    std::uint64_t errors_eve = 0;
};

struct TrialRecord {
    std::uint64_t stream = 0;  // trial index = substream id
    std::optional<TrialDesign> design;
    double seconds = 0.0;

    bool solvable() const { return design.has_value(); }
};

/// Links of one trial: receivers 0..K-1 and Eve.
struct TrialLinks {
    std::vector<channel::Link> bobs;
    channel::Link eve;
};

inline TrialLinks draw_trial_links(const channel::ScenarioConfig& cfg, Index receivers, std::uint64_t trial) {
    Rng rng = substream(cfg.seed, trial, 0);
    TrialLinks t;
    for (Index k = 0; k < receivers; ++k) t.bobs.push_back(channel::draw_link(cfg, rng));
    t.eve = channel::draw_link(cfg, rng);
    return t;
}

/// Designed transmission of one trial, kept whole for the CLI.
struct TrialSolution {
    WaveformDesign design;
    std::optional<an::AnCovariance> noise;
    std::optional<double> lower_bound;  // SDR modes
};

/// Runs the design routine of `mode`; throws NoTransmitError when unsolvable.
inline TrialSolution design_for_mode(DesignMode mode, const TrialLinks& links, double gamma, double e_max,
                                     int samples, Rng& rng) {
    std::vector<HermitianMatrix> qs;
    for (const channel::Link& l : links.bobs) qs.push_back(l.q);
    TrialSolution out;
    switch (mode) {
        case DesignMode::eigen_known_csi:
            out.design = p2p::design_p2p(p2p::P2pProblem{qs.front(), links.eve.q, gamma, e_max});
            break;
        case DesignMode::min_energy_no_an:
            out.design = an::min_energy_design(qs.front(), gamma, e_max);
            break;
        case DesignMode::an_unknown_csi: {
            an::AnDesign d = an::an_pipeline_single(qs.front(), gamma, e_max);
            out.design = std::move(d.design);
            out.noise = std::move(d.noise);
            break;
        }
        case DesignMode::sum_sinr:
            out.design = sdr::sum_sinr_design(qs, links.eve.q, gamma, e_max);
            break;
        case DesignMode::multicast_sdr:
        case DesignMode::multicast_min_energy_an: {
            const bool min_eve = mode == DesignMode::multicast_sdr;
            sdr::MulticastProblem p{qs, links.eve.q, std::vector<double>(qs.size(), gamma), e_max, samples};
            if (!min_eve) p.q_eve.reset();
            sdr::MulticastResult r =
                sdr::multicast_design(p, min_eve ? sdr::MulticastMode::min_eve : sdr::MulticastMode::min_energy, rng);
            out.design = r.design;
            out.lower_bound = r.lower_bound;
            if (!min_eve) out.noise = an::multicast_an(qs, out.design, e_max);
            break;
        }
    }
    return out;
}

/// Post-filter SINR at a receiver; AN-aware (genie-aided for Eve) when AN is on.
inline double receiver_sinr(const channel::Link& link, const TrialSolution& sol) {
    if (sol.noise) return channel::sinr_with_an(link.channel.h, link.disturbance.r, sol.noise->covariance, sol.design);
    return sol.design.sinr(link.q);
}

/// Sign errors of the receiver's max-SINR filter over the given bits.
inline std::uint64_t count_bit_errors(const channel::Link& link, const TrialSolution& sol, std::span<const int> bits,
                                      bool isi, Rng& rng) {
    const an::AnCovariance* noise = sol.noise ? &*sol.noise : nullptr;
    HermitianMatrix r = link.disturbance.r;
    if (noise) {
        r = HermitianMatrix(r.matrix() + link.channel.h * noise->covariance.matrix() * link.channel.h.adjoint());
    }
    const CVector w = channel::max_sinr_filter(link.channel.h, r, sol.design.waveform);
    const std::vector<CVector> ys = channel::simulate_received_block(sol.design, link.channel, link.disturbance, bits,
                                                                     noise, isi, rng);
    std::uint64_t errors = 0;
    for (std::size_t n = 0; n < ys.size(); ++n) {
        const double stat = w.dot(ys[n]).real();
        const int decided = stat >= 0.0 ? 1 : -1;
        if (decided != bits[n]) ++errors;
    }
    return errors;
}

/// Scenario and targets at one swept value.
struct PointSettings {
    channel::ScenarioConfig scenario;
    double gamma = 1.0;  // linear
    double e_max = 1.0;
};

inline PointSettings point_settings(const SweepSpec& spec, double swept_value) {
    PointSettings ps{spec.scenario, db_to_linear(spec.gamma_db), spec.e_max};
    switch (spec.variable) {
        case SweepVariable::gamma_db: ps.gamma = db_to_linear(swept_value); break;
        case SweepVariable::chips: ps.scenario.chips = static_cast<Index>(std::llround(swept_value)); break;
        case SweepVariable::e_max: ps.e_max = swept_value; break;
    }
    return ps;
}

/// One Monte Carlo trial at one swept value; `bits` > 0 adds BER counts.
inline TrialRecord run_trial(const SweepSpec& spec, double swept_value, std::uint64_t trial, Index bits = 0) {
    const auto t0 = std::chrono::steady_clock::now();
    const PointSettings ps = point_settings(spec, swept_value);
    TrialRecord rec;
    rec.stream = trial;
    const TrialLinks links = draw_trial_links(ps.scenario, spec.receivers, trial);
    Rng design_rng = substream(ps.scenario.seed, trial, 1);
    std::optional<TrialSolution> sol;
    try {
        sol = design_for_mode(spec.mode, links, ps.gamma, ps.e_max, spec.randomization_samples, design_rng);
    } catch (const NoTransmitError&) {
        sol.reset();
    }
    if (sol) {
        TrialDesign d;
        for (const channel::Link& l : links.bobs) d.sinr_bob.push_back(receiver_sinr(l, *sol));
        d.sinr_eve = receiver_sinr(links.eve, *sol);
        d.energy = sol->design.energy;
        d.energy_an = sol->noise ? sol->noise->budget : 0.0;
        d.branch = sol->design.branch;
        if (bits > 0) {
            Rng bit_rng = substream(ps.scenario.seed, trial, 2);
            std::bernoulli_distribution coin(0.5);
            std::vector<int> tx(static_cast<std::size_t>(bits));
            for (int& b : tx) b = coin(bit_rng) ? 1 : -1;
            d.bits = static_cast<std::uint64_t>(bits);
            for (std::size_t k = 0; k < links.bobs.size(); ++k) {
                Rng rx_rng = substream(ps.scenario.seed, trial, 3 + k);
                d.errors_bob.push_back(count_bit_errors(links.bobs[k], *sol, tx, ps.scenario.isi_enabled, rx_rng));
            }
            Rng eve_rng = substream(ps.scenario.seed, trial, 3 + links.bobs.size());
            d.errors_eve = count_bit_errors(links.eve, *sol, tx, ps.scenario.isi_enabled, eve_rng);
        }
        rec.design = std::move(d);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline constexpr double ci_z = 1.96;  // two-sided 95% normal quantile

struct ResultRow {
    double swept_value = 0.0;
    double mean_sinr_eve_db = std::numeric_limits<double>::quiet_NaN();
    double mean_sinr_bob_db = std::numeric_limits<double>::quiet_NaN();
    double solvability = 0.0;
    double an_fraction = std::numeric_limits<double>::quiet_NaN();
    double ber_bob = std::numeric_limits<double>::quiet_NaN();
    double ber_eve = std::numeric_limits<double>::quiet_NaN();
    double sinr_eve_ci = std::numeric_limits<double>::quiet_NaN();  // linear units
    double ber_bob_ci = std::numeric_limits<double>::quiet_NaN();
    double ber_eve_ci = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t n_solvable = 0;
    std::uint64_t n_trials = 0;
};

struct ResultTable {
    SweepVariable variable = SweepVariable::gamma_db;
    std::vector<ResultRow> rows;
};

/// Aggregates trial records of one swept value. SINR, AN and BER statistics
/// use solvable trials only.
inline ResultRow aggregate(double swept_value, const std::vector<TrialRecord>& recs, double e_max,
                           EveAverage eve_average) {
    ResultRow row;
    row.swept_value = swept_value;
    row.n_trials = recs.size();
    double eve_sum = 0.0, eve_sq = 0.0, eve_db_sum = 0.0, bob_sum = 0.0, an_sum = 0.0;
    std::uint64_t bob_count = 0, bits_bob = 0, err_bob = 0, bits_eve = 0, err_eve = 0;
    for (const TrialRecord& r : recs) {
        if (!r.solvable()) continue;
        const TrialDesign& d = *r.design;
        ++row.n_solvable;
        eve_sum += d.sinr_eve;
        eve_sq += d.sinr_eve * d.sinr_eve;
        eve_db_sum += linear_to_db(d.sinr_eve);
        for (double b : d.sinr_bob) bob_sum += b;
        bob_count += d.sinr_bob.size();
        an_sum += d.energy_an / e_max;
        if (d.bits > 0) {
            for (std::uint64_t e : d.errors_bob) {
                bits_bob += d.bits;
                err_bob += e;
            }
            bits_eve += d.bits;
            err_eve += d.errors_eve;
        }
    }
    row.solvability = recs.empty() ? 0.0 : static_cast<double>(row.n_solvable) / static_cast<double>(recs.size());
    if (row.n_solvable > 0) {
        const double n = static_cast<double>(row.n_solvable);
        const double mean = eve_sum / n;
        row.mean_sinr_eve_db = eve_average == EveAverage::linear ? linear_to_db(mean) : eve_db_sum / n;
        const double var = n > 1 ? std::max(0.0, (eve_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        row.sinr_eve_ci = ci_z * std::sqrt(var / n);
        row.mean_sinr_bob_db = linear_to_db(bob_sum / static_cast<double>(bob_count));
        row.an_fraction = an_sum / n;
    }
    auto ber = [](std::uint64_t errors, std::uint64_t bits, double& p, double& ci) {
        if (bits == 0) return;
        p = static_cast<double>(errors) / static_cast<double>(bits);
        ci = ci_z * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
    };
    ber(err_bob, bits_bob, row.ber_bob, row.ber_bob_ci);
    ber(err_eve, bits_eve, row.ber_eve, row.ber_eve_ci);
    return row;
}

/// All trials of one swept value, in trial order.
inline std::vector<TrialRecord> run_point(const SweepSpec& spec, double swept_value, Index bits = 0) {
    const auto trials = static_cast<std::size_t>(spec.scenario.trials);
    std::vector<TrialRecord> recs(trials);
    const unsigned nthreads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(trials)));
    if (nthreads == 1) {
        for (std::size_t t = 0; t < trials; ++t) recs[t] = run_trial(spec, swept_value, t, bits);
        return recs;
    }
    std::vector<std::exception_ptr> errors(nthreads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < trials; t += nthreads) recs[t] = run_trial(spec, swept_value, t, bits);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return recs;
}

inline double point_e_max(const SweepSpec& spec, double swept_value) {
    return spec.variable == SweepVariable::e_max ? swept_value : spec.e_max;
}

/// Analytic post-filter SINR sweep.
inline ResultTable run_sweep(const SweepSpec& spec) {
    spec.validate();
    ResultTable table{spec.variable, {}};
    for (double v : spec.swept_values()) {
        table.rows.push_back(aggregate(v, run_point(spec, v), point_e_max(spec, v), spec.eve_average));
    }
    return table;
}

/// SINR sweep plus simulated uncoded BER of every receiver and of Eve.
inline ResultTable estimate_ber(const SweepSpec& spec, Index bits_per_trial) {
    spec.validate();
    if (bits_per_trial < 1000) throw ValidationError("bits_per_trial must be >= 1000");
    ResultTable table{spec.variable, {}};
    for (double v : spec.swept_values()) {
        table.rows.push_back(
            aggregate(v, run_point(spec, v, bits_per_trial), point_e_max(spec, v), spec.eve_average));
    }
    return table;
}

inline constexpr const char* csv_header =
    "swept_value,mean_sinr_eve_db,mean_sinr_bob_db,solvability,an_fraction,ber_bob,ber_eve,"
    "sinr_eve_ci,ber_bob_ci,ber_eve_ci,n_solvable,n_trials";

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string format_csv(const ResultTable& table) {
    if (table.rows.empty()) throw ValidationError("result table is empty");
    std::ostringstream os;
    os << csv_header << '\n';
    for (const ResultRow& r : table.rows) {
        for (double v : {r.swept_value, r.mean_sinr_eve_db, r.mean_sinr_bob_db, r.solvability, r.an_fraction,
                         r.ber_bob, r.ber_eve, r.sinr_eve_ci, r.ber_bob_ci, r.ber_eve_ci}) {
            os << format_number(v) << ',';
        }
        os << r.n_solvable << ',' << r.n_trials << '\n';
    }
    return os.str();
}

inline void emit_results(const ResultTable& table, const std::string& path) {
    const std::string text = format_csv(table);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace secwave::harness
