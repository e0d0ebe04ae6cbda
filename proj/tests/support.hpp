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

// Fixtures and independent reference computations shared by the test binaries.
// Nothing here calls the library's decompositions: the eigen oracle is a cyclic
// Jacobi sweep on the real embedding and the covariance builders are written
// out from the definitions.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "secwave/channel.hpp"
#include "secwave/kernel.hpp"
#include "secwave/rng.hpp"

namespace testing {

using secwave::CMatrix;
using secwave::cplx;
using secwave::CVector;
using secwave::HermitianMatrix;
using secwave::Index;
using secwave::Rng;

inline CMatrix random_complex(Index rows, Index cols, Rng& rng) {
    CMatrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) a(i, j) = secwave::complex_normal(rng);
    return a;
}

inline CVector random_unit(Index n, Rng& rng) {
    CVector v = random_complex(n, 1, rng).col(0);
    return v / v.norm();
}

/// Random Hermitian positive definite matrix: G G^H + shift I.
inline HermitianMatrix random_pd(Index n, Rng& rng, double shift = 0.1) {
    const CMatrix g = random_complex(n, n, rng);
    return HermitianMatrix(g * g.adjoint() + shift * CMatrix::Identity(n, n));
}

/// Effective matrix of a freshly drawn multipath link in the default scenario.
inline HermitianMatrix random_link_q(Index chips, Rng& rng) {
    secwave::channel::ScenarioConfig cfg;
    cfg.chips = chips;
    return secwave::channel::draw_link(cfg, rng).q;
}

/// All eigenvalues of a Hermitian matrix, descending, by cyclic Jacobi rotations
/// on the 2n x 2n real symmetric embedding (each eigenvalue appears twice there).
inline std::vector<double> jacobi_eigenvalues(const CMatrix& a) {
    const Index n = a.rows();
    const Index m = 2 * n;
    std::vector<double> s(static_cast<std::size_t>(m * m));
    auto at = [&](Index i, Index j) -> double& { return s[static_cast<std::size_t>(i * m + j)]; };
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            at(i, j) = a(i, j).real();
            at(i + n, j + n) = a(i, j).real();
            at(i, j + n) = -a(i, j).imag();
            at(i + n, j) = a(i, j).imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index i = 0; i < m; ++i)
            for (Index j = i + 1; j < m; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (Index p = 0; p < m; ++p) {
            for (Index q = p + 1; q < m; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (Index k = 0; k < m; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - sn * akq;
                    at(k, q) = sn * akp + c * akq;
                }
                for (Index k = 0; k < m; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - sn * aqk;
                    at(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> d;
    for (Index i = 0; i < m; ++i) d.push_back(at(i, i));
    std::sort(d.begin(), d.end(), std::greater<>());
    std::vector<double> out;
    for (Index i = 0; i < n; ++i) out.push_back(0.5 * (d[static_cast<std::size_t>(2 * i)] + d[static_cast<std::size_t>(2 * i + 1)]));
    return out;
}

/// Full linear convolution of taps with s, written as a double sum.
inline CVector direct_convolution(const CVector& taps, const CVector& s) {
    const Index m = taps.size(), l = s.size();
    CVector y = CVector::Zero(l + m - 1);
    for (Index n = 0; n < l + m - 1; ++n)
        for (Index k = 0; k < m; ++k)
            if (n - k >= 0 && n - k < l) y(n) += taps(k) * s(n - k);
    return y;
}

struct P2pFixture {
    HermitianMatrix q_bob;
    HermitianMatrix q_eve;
    double gamma = 1.0;
    double e_max = 1.0;
};

/// Feasible instance whose eigen design overshoots the energy cap: E_max is
/// placed strictly between gamma / lambda_max(Q_b) and the eigen design energy.
inline P2pFixture bisection_fixture(Index chips, Rng& rng, double gamma = 2.0) {
    for (;;) {
        P2pFixture f{random_link_q(chips, rng), random_link_q(chips, rng), gamma, 1.0};
        const double lmax = jacobi_eigenvalues(f.q_bob.matrix()).front();
        // Bob gain of the minimum Rayleigh-quotient direction, taken from a
        // general (non-Hermitian) eigensolve of Q_b^-1 Q_e.
        const CMatrix m = f.q_bob.matrix().inverse() * f.q_eve.matrix();
        Eigen::ComplexEigenSolver<CMatrix> es(m);
        Index imin = 0;
        es.eigenvalues().real().minCoeff(&imin);
        CVector p = es.eigenvectors().col(imin);
        p.normalize();
        const double g_eig = p.dot(f.q_bob.matrix() * p).real();
        if (g_eig > 0.9 * lmax) continue;
        std::uniform_real_distribution<double> u(0.2, 0.8);
        const double g_target = g_eig + u(rng) * (lmax - g_eig);
        f.e_max = gamma / g_target;
        return f;
    }
}

/// Standard normal upper tail.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
