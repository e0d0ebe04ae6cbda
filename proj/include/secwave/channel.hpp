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

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "secwave/an.hpp"
#include "secwave/design.hpp"
#include "secwave/kernel.hpp"
#include "secwave/rng.hpp"

/**
 * @file channel.hpp
 * @brief Chip-domain multipath link model.
 *
 * A bit of L chips sent over an M-path channel is observed over
 * L_M = L + M - 1 chips: y = sqrt(E) b H s + z + n, where H is the banded
 * Toeplitz convolution matrix of the taps, z the interference of concurrent
 * users and n white noise. Interferers are bit-synchronous with Alice and
 * each reaches the receiver through its own independent M-path channel.
 */

namespace secwave::channel {

struct ChannelRealization {
    std::vector<cplx> taps;
    Index paths() const { return static_cast<Index>(taps.size()); }
};

/// M i.i.d. CN(0, 1/M) taps, so E sum |h_m|^2 = 1.
inline ChannelRealization draw_multipath_channel(Index paths, Rng& rng) {
    if (paths < 1) throw ValidationError("path count must be >= 1");
    ChannelRealization h;
    h.taps.reserve(static_cast<std::size_t>(paths));
    for (Index m = 0; m < paths; ++m) h.taps.push_back(complex_normal(rng, 1.0 / static_cast<double>(paths)));
    return h;
}

struct ConvolutionChannelMatrix {
    CMatrix h;  // (L + M - 1) x L
    ChannelRealization source;

    Index chips() const { return h.cols(); }
    Index paths() const { return source.paths(); }
    Index window() const { return h.rows(); }
};

/// Entry (i, j) = h_{i-j} for 0 <= i - j < M, zero elsewhere.
inline ConvolutionChannelMatrix convolution_channel_matrix(const ChannelRealization& taps, Index chips) {
    if (chips < 1) throw ValidationError("chip count must be >= 1");
    if (taps.taps.empty()) throw ValidationError("channel has no taps");
    const Index m = taps.paths();
    ConvolutionChannelMatrix out{CMatrix::Zero(chips + m - 1, chips), taps};
    for (Index j = 0; j < chips; ++j) {
        for (Index t = 0; t < m; ++t) out.h(j + t, j) = taps.taps[static_cast<std::size_t>(t)];
    }
    return out;
}

/// Scenario parameters shared by every link of one experiment.
struct ScenarioConfig {
    Index chips = 8;   // L
    Index paths = 3;   // M
    double noise_variance = 1.0;
    Index interferers_min = 5;
    Index interferers_max = 10;
    double interferer_energy_min = 1.0;
    double interferer_energy_max = 4.0;
    std::uint64_t seed = 1;
    bool isi_enabled = false;
    Index trials = 10000;

    Index window() const { return chips + paths - 1; }

    void validate() const {
        if (chips < 2) throw ValidationError("chips (L) must be >= 2");
        if (paths < 1) throw ValidationError("paths (M) must be >= 1");
        if (trials < 1) throw ValidationError("trials must be >= 1");
        if (!(noise_variance > 0.0)) throw ValidationError("noise_variance must be positive");
        if (interferers_min < 0 || interferers_max < interferers_min) {
            throw ValidationError("interferer count range is empty");
        }
        if (!(interferer_energy_min >= 0.0) || interferer_energy_max < interferer_energy_min) {
            throw ValidationError("interferer energy range is empty");
        }
    }
};

/// Concurrent user: unit-norm waveform with energy per bit, through its own channel.
struct Interferer {
    double energy = 0.0;
    CVector waveform;
    ConvolutionChannelMatrix channel;
    CVector signature;  // H_j s_j
};

struct DisturbanceCovariance {
    HermitianMatrix r;  // sum_j E_j (H_j s_j)(H_j s_j)^H + sigma^2 I
    double noise_variance = 1.0;
    std::vector<Interferer> interferers;

    Index window() const { return r.dim(); }
};

/// Draws this receiver's interferers and assembles their covariance with the noise floor.
inline DisturbanceCovariance build_disturbance_covariance(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    const Index lm = cfg.window();
    std::uniform_int_distribution<Index> count_dist(cfg.interferers_min, cfg.interferers_max);
    std::uniform_real_distribution<double> energy_dist(cfg.interferer_energy_min, cfg.interferer_energy_max);
    const Index count = count_dist(rng);

    DisturbanceCovariance out;
    out.noise_variance = cfg.noise_variance;
    CMatrix r = cfg.noise_variance * CMatrix::Identity(lm, lm);
    for (Index j = 0; j < count; ++j) {
        Interferer it;
        it.energy = energy_dist(rng);
        it.waveform.resize(cfg.chips);
        for (Index i = 0; i < cfg.chips; ++i) it.waveform(i) = complex_normal(rng);
        it.waveform.normalize();
        it.channel = convolution_channel_matrix(draw_multipath_channel(cfg.paths, rng), cfg.chips);
        it.signature = it.channel.h * it.waveform;
        r += it.energy * it.signature * it.signature.adjoint();
        out.interferers.push_back(std::move(it));
    }
    out.r = HermitianMatrix(r);
    return out;
}

/// Q = H^H R^-1 H, formed as G^H G with G = L^-1 H (R = L L^H).
inline HermitianMatrix effective_q(const CMatrix& h, const HermitianMatrix& r) {
    if (h.rows() != r.dim()) throw DimensionError("channel rows do not match disturbance dimension");
    const CMatrix l = kernel::cholesky_factor(r);
    const CMatrix g = l.triangularView<Eigen::Lower>().solve(h);
    return HermitianMatrix(g.adjoint() * g);
}

inline HermitianMatrix effective_q(const ConvolutionChannelMatrix& h, const DisturbanceCovariance& r) {
    return effective_q(h.h, r.r);
}

/// Output SINR of the max-SINR filter when Alice also radiates AN with
/// covariance R_w: E s^H H^H (R + H R_w H^H)^-1 H s.
inline double sinr_with_an(const CMatrix& h, const HermitianMatrix& r, const HermitianMatrix& rw,
                           const WaveformDesign& d) {
    const HermitianMatrix total(r.matrix() + h * rw.matrix() * h.adjoint());
    const CMatrix l = kernel::cholesky_factor(total);
    const CVector g = l.triangularView<Eigen::Lower>().solve(h * d.waveform);
    return d.energy * g.squaredNorm();
}

/// Max-SINR (MMSE up to scale) filter R^-1 H s.
inline CVector max_sinr_filter(const CMatrix& h, const HermitianMatrix& r, const CVector& s) {
    Eigen::LLT<CMatrix> llt(r.matrix());
    if (llt.info() != Eigen::Success) throw DefinitenessError("disturbance covariance is not positive definite");
    return llt.solve(h * s);
}

/// One disturbance vector: interferers with fresh +-1 symbols plus CN(0, sigma^2) noise.
inline CVector draw_disturbance(const DisturbanceCovariance& dist, Rng& rng) {
    const Index lm = dist.window();
    CVector z(lm);
    for (Index i = 0; i < lm; ++i) z(i) = complex_normal(rng, dist.noise_variance);
    std::bernoulli_distribution coin(0.5);
    for (const Interferer& it : dist.interferers) {
        const double a = coin(rng) ? 1.0 : -1.0;
        z += (a * std::sqrt(it.energy)) * it.signature;
    }
    return z;
}

/**
 * Received blocks y(n) = sqrt(E) b(n) H s + H w(n) + z(n) + n(n), n = 0..N-1.
 *
 * With isi_enabled the first M-1 chips of block n also collect the last M-1
 * chips of H x(n-1), x(n) = sqrt(E) b(n) s + w(n) being Alice's full chip
 * block; block 0 has no predecessor. Only the previous bit leaks.
 */
inline std::vector<CVector> simulate_received_block(const WaveformDesign& design, const ConvolutionChannelMatrix& h,
                                                    const DisturbanceCovariance& dist, std::span<const int> bits,
                                                    const an::AnCovariance* noise, bool isi_enabled, Rng& rng) {
    if (bits.empty()) throw ValidationError("bit sequence is empty");
    if (design.chips() != h.chips() || dist.window() != h.window()) {
        throw DimensionError("waveform, channel and disturbance dimensions disagree");
    }
    if (noise != nullptr && noise->chips() != h.chips()) throw DimensionError("AN covariance dimension mismatch");

    const Index tail = h.paths() - 1;
    const CVector hs = h.h * design.waveform;
    const double amp = std::sqrt(design.energy);
    std::vector<CVector> out;
    out.reserve(bits.size());
    CVector prev;
    for (const int b : bits) {
        if (b != 1 && b != -1) throw ValidationError("bits must be +1 or -1");
        CVector tx = (amp * static_cast<double>(b)) * hs;
        if (noise != nullptr) tx += h.h * an::sample_an(*noise, rng);
        CVector y = tx + draw_disturbance(dist, rng);
        if (isi_enabled && tail > 0 && prev.size() > 0) y.head(tail) += prev.tail(tail);
        prev = std::move(tx);
        out.push_back(std::move(y));
    }
    return out;
}

/// A transmitter-to-receiver link with its disturbance and effective matrix.
struct Link {
    ConvolutionChannelMatrix channel;
    DisturbanceCovariance disturbance;
    HermitianMatrix q;
};

inline Link draw_link(const ScenarioConfig& cfg, Rng& rng) {
    Link link;
    link.channel = convolution_channel_matrix(draw_multipath_channel(cfg.paths, rng), cfg.chips);
    link.disturbance = build_disturbance_covariance(cfg, rng);
    link.q = effective_q(link.channel, link.disturbance);
    return link;
}

}  // namespace secwave::channel
