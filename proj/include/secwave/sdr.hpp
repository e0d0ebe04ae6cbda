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
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "secwave/design.hpp"
#include "secwave/kernel.hpp"
#include "secwave/p2p.hpp"
#include "secwave/rng.hpp"
#include "secwave/sdp.hpp"

// Secure multicast to K receivers. With x = sqrt(E) s and X = x x^H the
// per-receiver QCQP becomes a trace-form SDP once rank(X) = 1 is dropped.
// A rank-one solution is the exact design; otherwise candidates are drawn from
// CN(0, X') and rescaled until the tightest SINR constraint is met.

namespace secwave::sdr {

inline constexpr double default_rank_tol = 1e-6;
inline constexpr int default_randomization_samples = 1000;

enum class MulticastMode {
    min_eve,     // minimize Eve's SINR, Q_e known
    min_energy,  // minimize transmit energy, leftover budget goes to AN
};

inline const char* to_string(MulticastMode m) {
    return m == MulticastMode::min_eve ? "min-eve" : "min-energy";
}

struct MulticastProblem {
    std::vector<HermitianMatrix> q_bobs;
    std::optional<HermitianMatrix> q_eve;
    std::vector<double> gammas;  // linear scale, one per receiver
    double e_max = 1.0;
    int samples = default_randomization_samples;

    Index receivers() const { return static_cast<Index>(q_bobs.size()); }
    Index chips() const { return q_bobs.empty() ? 0 : q_bobs.front().dim(); }

    void validate(MulticastMode mode) const {
        if (q_bobs.empty()) throw ValidationError("multicast needs at least one receiver");
        if (gammas.size() != q_bobs.size()) throw ValidationError("one SINR target per receiver is required");
        for (const HermitianMatrix& q : q_bobs) {
            if (q.dim() != chips()) throw DimensionError("receiver matrices differ in dimension");
        }
        for (double g : gammas) {
            if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("SINR targets must be positive");
        }
        if (!(e_max > 0.0)) throw ValidationError("E_max must be positive");
        if (samples < 1) throw ValidationError("randomization needs at least one sample");
        if (mode == MulticastMode::min_eve) {
            if (!q_eve) throw ValidationError("min-eve mode requires Q_e");
            if (q_eve->dim() != chips()) throw DimensionError("Q_e dimension mismatch");
        }
    }

    /// Objective of a candidate x = sqrt(E) s.
    double objective(const CVector& x, MulticastMode mode) const {
        return mode == MulticastMode::min_eve ? kernel::quad_form(*q_eve, x) : x.squaredNorm();
    }
};

/// Lifted SDP: min Tr(C X) s.t. Tr(Q_{b,k} X) >= gamma_k, Tr(X) <= E_max.
inline SdpProblem lift(const MulticastProblem& p, MulticastMode mode) {
    p.validate(mode);
    SdpProblem sdp;
    sdp.objective = mode == MulticastMode::min_eve ? *p.q_eve : HermitianMatrix::identity(p.chips());
    for (std::size_t k = 0; k < p.q_bobs.size(); ++k) sdp.constraints.push_back({p.q_bobs[k], p.gammas[k]});
    sdp.trace_cap = p.e_max;
    return sdp;
}

/// (E, s) = (lambda_1, a_1) when lambda_2 / lambda_1 <= rank_tol.
inline std::optional<WaveformDesign> extract_rank1(const SdpSolution& sol, double rank_tol = default_rank_tol) {
    const kernel::EigenPairSet eig = kernel::hermitian_eig(sol.x);
    const double l1 = eig.values(0);
    if (!(l1 > 0.0)) return std::nullopt;
    const double l2 = eig.values.size() > 1 ? std::max(0.0, eig.values(1)) : 0.0;
    if (l2 / l1 > rank_tol) return std::nullopt;
    return WaveformDesign{eig.vectors.col(0), l1, DesignBranch::sdr};
}

/// Factor sqrt(max_k gamma_k / x^H Q_k x) that makes the tightest SINR constraint active.
inline double feasibility_scale(const MulticastProblem& p, const CVector& x) {
    double t = 0.0;
    for (std::size_t k = 0; k < p.q_bobs.size(); ++k) {
        const double g = kernel::quad_form(p.q_bobs[k], x);
        if (!(g > 0.0)) return std::numeric_limits<double>::infinity();
        t = std::max(t, p.gammas[k] / g);
    }
    return std::sqrt(t);
}

struct RandomizationOutcome {
    std::optional<WaveformDesign> design;
    int survivors = 0;  // rescaled samples inside the energy cap
    double objective = std::numeric_limits<double>::infinity();
};

/**
 * Gaussian randomization: draws `samples` x_i ~ CN(0, X') through the PSD square
 * root of X' (negative eigenvalues clamped), rescales each with
 * feasibility_scale, drops those with |x|^2 > E_max and keeps the best objective.
 */
inline RandomizationOutcome gaussian_randomization(const SdpSolution& sol, const MulticastProblem& p,
                                                   MulticastMode mode, int samples, Rng& rng) {
    p.validate(mode);
    const kernel::EigenPairSet eig = kernel::hermitian_eig(sol.x);
    const Index n = eig.values.size();
    const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    const CMatrix factor = eig.vectors * root.asDiagonal();

    RandomizationOutcome out;
    CVector g(n);
    CVector best;
    for (int i = 0; i < samples; ++i) {
        for (Index j = 0; j < n; ++j) g(j) = complex_normal(rng);
        CVector x = factor * g;
        const double scale = feasibility_scale(p, x);
        if (!std::isfinite(scale)) continue;
        x *= scale;
        if (x.squaredNorm() > p.e_max) continue;
        ++out.survivors;
        const double obj = p.objective(x, mode);
        if (obj < out.objective) {
            out.objective = obj;
            best = std::move(x);
        }
    }
    if (out.survivors > 0) {
        const double e = best.squaredNorm();
        CVector s = best / std::sqrt(e);
        kernel::normalize_phase(s);
        out.design = WaveformDesign{s, e, DesignBranch::sdr};
    }
    return out;
}

struct MulticastResult {
    WaveformDesign design;
    double lower_bound = 0.0;  // certified SDP bound on the QCQP optimum
    double objective = 0.0;    // achieved E s^H Q_e s (min-eve) or E (min-energy)
    bool rank_one = false;
    SdpSolution sdp;
};

/**
 * Lift, solve, then take the rank-one eigenvector or fall back to Gaussian
 * randomization. A rank-one design is rescaled so its tightest SINR constraint
 * holds with equality (the solver meets constraints only to tolerance), capped
 * at E_max.
 */
inline MulticastResult multicast_design(const MulticastProblem& p, MulticastMode mode, Rng& rng,
                                        const SdpOptions& opt = {}, double rank_tol = default_rank_tol) {
    const SdpProblem sdp = lift(p, mode);
    MulticastResult out;
    try {
        out.sdp = solve_sdp(sdp, opt);
    } catch (const SdpInfeasible& e) {
        throw NoTransmitError(std::string("multicast SINR targets unreachable: ") + e.what());
    }
    out.lower_bound = out.sdp.dual_objective;

    if (auto r1 = extract_rank1(out.sdp, rank_tol)) {
        const CVector x = std::sqrt(r1->energy) * r1->waveform;
        const double scale = feasibility_scale(p, x);
        r1->energy = std::min(p.e_max, r1->energy * scale * scale);
        out.design = *r1;
        out.rank_one = true;
    } else {
        RandomizationOutcome rnd = gaussian_randomization(out.sdp, p, mode, p.samples, rng);
        if (!rnd.design) {
            throw NoTransmitError("Gaussian randomization failed: none of " + std::to_string(p.samples) +
                                  " rescaled samples fits within E_max");
        }
        out.design = *rnd.design;
    }
    out.objective = p.objective(std::sqrt(out.design.energy) * out.design.waveform, mode);
    return out;
}

/// Sum-SINR variant: the single-receiver design on Q~_b = sum_k Q_{b,k}.
inline WaveformDesign sum_sinr_design(const std::vector<HermitianMatrix>& q_bobs, const HermitianMatrix& q_eve,
                                      double gamma, double e_max) {
    if (q_bobs.empty()) throw ValidationError("sum-SINR design needs at least one receiver");
    CMatrix sum = CMatrix::Zero(q_eve.dim(), q_eve.dim());
    for (const HermitianMatrix& q : q_bobs) {
        if (q.dim() != q_eve.dim()) throw DimensionError("receiver matrix dimension mismatch");
        sum += q.matrix();
    }
    return p2p::design_p2p(p2p::P2pProblem{HermitianMatrix(sum), q_eve, gamma, e_max});
}

}  // namespace secwave::sdr
