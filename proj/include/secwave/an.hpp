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
#include <string>
#include <vector>

#include "secwave/design.hpp"
#include "secwave/kernel.hpp"
#include "secwave/rng.hpp"

// Designs for an eavesdropper whose channel is unknown: spend the least energy
// that meets the receivers' SINR targets and fill the rest of the budget with
// artificial noise (AN) confined to directions the receivers' max-SINR filters
// cannot see.

namespace secwave::an {

/// AN autocorrelation R_w = E_AN / (L - r) * W W^H, where W is an orthonormal
/// basis of the complement of the blocked directions (rank r).
struct AnCovariance {
    HermitianMatrix covariance;
    double budget = 0.0;
    CMatrix blocked;  // L x K, columns v_k with v_k^H R_w = 0
    CMatrix basis;    // L x (L - r)

    Index chips() const { return covariance.dim(); }
    double per_dimension_energy() const {
        return basis.cols() > 0 ? budget / static_cast<double>(basis.cols()) : 0.0;
    }
};

/// Minimum-energy waveform: s = q_1 (top eigenvector of Q_b), E = gamma / lambda_1.
inline WaveformDesign min_energy_design(const HermitianMatrix& q_bob, double gamma, double e_max) {
    if (!(gamma > 0.0) || !(e_max > 0.0)) throw ValidationError("gamma and E_max must be positive");
    const kernel::EigenPairSet eig = kernel::hermitian_eig(q_bob);
    const double lambda1 = eig.values(0);
    if (!(lambda1 > 0.0)) throw DefinitenessError("Q_b is not positive definite");
    const double e_min = gamma / lambda1;
    if (e_min > e_max) {
        throw NoTransmitError("minimum energy " + std::to_string(e_min) + " exceeds E_max " +
                              std::to_string(e_max));
    }
    return {eig.vectors.col(0), e_min, DesignBranch::min_energy};
}

/// Isotropic AN over the orthogonal complement of span{blocking columns}.
inline AnCovariance an_covariance(const CMatrix& blocking, double budget, Index chips) {
    if (blocking.rows() != chips) {
        throw DimensionError("blocking vectors have length " + std::to_string(blocking.rows()) +
                             ", expected " + std::to_string(chips));
    }
    if (!(budget >= 0.0)) throw ValidationError("AN budget must be non-negative");
    const kernel::SingularBasis svd = kernel::left_singular_basis(blocking);
    AnCovariance out;
    out.budget = budget;
    out.blocked = blocking;
    out.basis = svd.complement();
    // divide by the complement dimension L - r so Tr(R_w) = E_AN even when V is rank deficient
    const double per_dim = budget / static_cast<double>(out.basis.cols());
    out.covariance = HermitianMatrix(per_dim * out.basis * out.basis.adjoint());
    return out;
}

/// One AN vector w = sqrt(E_AN / (L - r)) W g, g ~ CN(0, I).
inline CVector sample_an(const AnCovariance& rw, Rng& rng) {
    CVector g(rw.basis.cols());
    for (Index i = 0; i < g.size(); ++i) g(i) = complex_normal(rng);
    return std::sqrt(rw.per_dimension_energy()) * (rw.basis * g);
}

struct AnDesign {
    WaveformDesign design;
    AnCovariance noise;
};

/// Single receiver: minimum-energy waveform plus AN with E_AN = E_max - E_min
/// blocked along Q_b q_1.
inline AnDesign an_pipeline_single(const HermitianMatrix& q_bob, double gamma, double e_max) {
    WaveformDesign d = min_energy_design(q_bob, gamma, e_max);
    const CMatrix v = q_bob.matrix() * d.waveform;
    AnCovariance rw = an_covariance(v, std::max(0.0, e_max - d.energy), d.chips());
    return {std::move(d), std::move(rw)};
}

/// Multicast: blocking vectors v_k = Q_{b,k} s for every receiver.
inline AnCovariance multicast_an(const std::vector<HermitianMatrix>& q_bobs, const WaveformDesign& design,
                                 double e_max) {
    if (q_bobs.empty()) throw ValidationError("multicast AN needs at least one receiver");
    const Index l = design.chips();
    CMatrix v(l, static_cast<Index>(q_bobs.size()));
    for (std::size_t k = 0; k < q_bobs.size(); ++k) {
        if (q_bobs[k].dim() != l) throw DimensionError("receiver matrix dimension mismatch");
        v.col(static_cast<Index>(k)) = q_bobs[k].matrix() * design.waveform;
    }
    return an_covariance(v, std::max(0.0, e_max - design.energy), l);
}

}  // namespace secwave::an
