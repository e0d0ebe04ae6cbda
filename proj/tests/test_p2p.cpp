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

#include <catch_amalgamated.hpp>

#include "secwave/p2p.hpp"
#include "support.hpp"

using namespace secwave;
using namespace secwave::p2p;

namespace {

HermitianMatrix diag(std::initializer_list<double> d) {
    CMatrix m = CMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    Index i = 0;
    for (double x : d) m(i, i) = x, ++i;
    return HermitianMatrix(m);
}

P2pProblem from(const testing::P2pFixture& f) { return P2pProblem{f.q_bob, f.q_eve, f.gamma, f.e_max}; }

double objective(const WaveformDesign& d, const HermitianMatrix& q_eve) { return d.sinr(q_eve); }

}  // namespace

TEST_CASE("feasibility is lambda_max(Q_b) >= gamma / E_max", "[p2p]") {
    CHECK(check_feasibility(P2pProblem{HermitianMatrix::identity(3), HermitianMatrix::identity(3), 1.0, 1.0}));
    CHECK_FALSE(check_feasibility(P2pProblem{HermitianMatrix::identity(3), HermitianMatrix::identity(3), 2.0, 1.0}));
    Rng rng = substream(41, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const HermitianMatrix qb = testing::random_link_q(8, rng);
        const double lmax = testing::jacobi_eigenvalues(qb.matrix()).front();
        CHECK(check_feasibility(P2pProblem{qb, qb, lmax * 0.999, 1.0}));
        CHECK_FALSE(check_feasibility(P2pProblem{qb, qb, lmax * 1.001, 1.0}));
    }
    CHECK_THROWS_AS(P2pProblem({HermitianMatrix::identity(2), HermitianMatrix::identity(3), 1.0, 1.0}).validate(),
                    DimensionError);
    CHECK_THROWS_AS(P2pProblem({HermitianMatrix::identity(2), HermitianMatrix::identity(2), -1.0, 1.0}).validate(),
                    ValidationError);
}

TEST_CASE("eigen design on diagonal and identical channels", "[p2p]") {
    const auto d = eigen_design(P2pProblem{diag({4, 1}), HermitianMatrix::identity(2), 4.0, 100.0});
    REQUIRE(d);
    CHECK(std::abs(d->energy - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(d->waveform(0)) - 1.0) < 1e-12);
    CHECK(std::abs(objective(*d, HermitianMatrix::identity(2)) / d->sinr(diag({4, 1})) - 0.25) < 1e-12);

    Rng rng = substream(42, 0);
    const HermitianMatrix q = testing::random_link_q(6, rng);
    const auto same = eigen_design(P2pProblem{q, q, 2.0, 1e6});
    REQUIRE(same);
    CHECK(testing::rel_diff(same->sinr(q), 2.0) < 1e-10);
    CHECK(testing::rel_diff(same->energy, 2.0 / kernel::quad_form(q, same->waveform)) < 1e-12);
}

TEST_CASE("eigen design beats random unit waveforms", "[p2p]") {
    Rng rng = substream(43, 0);
    for (int rep = 0; rep < 3; ++rep) {
        const HermitianMatrix qb = testing::random_link_q(4, rng);
        const HermitianMatrix qe = testing::random_link_q(4, rng);
        const auto d = eigen_design(P2pProblem{qb, qe, 1.0, 1e9});
        REQUIRE(d);
        const double ratio = kernel::quad_form(qe, d->waveform) / kernel::quad_form(qb, d->waveform);
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000000; ++i) {
            const CVector s = testing::random_unit(4, rng);
            best = std::min(best, kernel::quad_form(qe, s) / kernel::quad_form(qb, s));
        }
        CHECK(ratio <= best * (1 + 1e-12));
        CHECK(best <= ratio * 1.25);
    }
}

TEST_CASE("ties in the minimum eigenvalue resolve to the largest Bob gain", "[p2p]") {
    // Rayleigh quotients 0.5, 0.5, 5: e1 and e2 tie, e2 has gain 4.
    const P2pProblem p{diag({2, 4, 1}), diag({1, 2, 5}), 1.0, 100.0};
    const auto d1 = eigen_design(p);
    const auto d2 = eigen_design(p);
    REQUIRE(d1);
    CHECK(std::abs(std::abs(d1->waveform(1)) - 1.0) < 1e-10);
    CHECK(d1->waveform == d2->waveform);
    CHECK(std::abs(d1->energy - 0.25) < 1e-10);
}

TEST_CASE("eigen design signals when the energy cap binds", "[p2p]") {
    Rng rng = substream(44, 0);
    const testing::P2pFixture f = testing::bisection_fixture(4, rng);
    CHECK_FALSE(eigen_design(from(f)).has_value());
    CHECK_THROWS_AS(eigen_design(P2pProblem{f.q_bob, f.q_eve, 1e9, 1.0}), NoTransmitError);
}

TEST_CASE("bisection refuses problems the eigen design already solves", "[p2p]") {
    CHECK_THROWS_AS(kkt_bisection(P2pProblem{diag({4, 1}), HermitianMatrix::identity(2), 4.0, 100.0}),
                    ValidationError);
}

TEST_CASE("bisection pencil at mu~ = 0 is the eigen design pencil", "[p2p]") {
    Rng rng = substream(45, 0);
    const testing::P2pFixture f = testing::bisection_fixture(5, rng);
    const kernel::EigenPair a = bisection_pencil_pair(from(f), 0.0);
    const kernel::EigenPair b = min_generalized_pair(f.q_eve, f.q_bob);
    CHECK(a.value == b.value);
    CHECK((a.vector - b.vector).norm() == 0.0);
    CHECK_THROWS_AS(bisection_pencil_pair(from(f), 1.0), ValidationError);
}

TEST_CASE("Bob gain along the bisection path is non-decreasing", "[p2p]") {
    Rng rng = substream(46, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const P2pProblem p{testing::random_link_q(6, rng), testing::random_link_q(6, rng), 1.0, 1.0};
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double mt = 0.99 * i / 99.0;
            const double g = kernel::quad_form(p.q_bob, bisection_pencil_pair(p, mt).vector);
            CHECK(g >= prev - 1e-10);
            prev = g;
        }
    }
}

TEST_CASE("bisection meets the KKT conditions and the grid-search optimum", "[p2p]") {
    Rng rng = substream(47, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const testing::P2pFixture f = testing::bisection_fixture(4, rng);
        const P2pProblem p = from(f);
        const BisectionResult r = kkt_bisection(p);
        const CVector& s = r.design.waveform;
        const double mu = r.mu();
        CHECK(mu > 0.0);
        CHECK(r.beta > 0.0);
        const CVector resid = (f.q_eve.matrix() + mu * CMatrix::Identity(4, 4)) * s - r.beta * (f.q_bob.matrix() * s);
        CHECK(resid.norm() <= 1e-8);
        CHECK(std::abs(kernel::quad_form(f.q_bob, s) - f.gamma / f.e_max) < 1e-8);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        CHECK(r.design.energy <= f.e_max);
        CHECK(testing::rel_diff(r.design.energy, f.e_max) < 1e-6);
        CHECK(testing::rel_diff(r.design.sinr(f.q_bob), f.gamma) < 1e-9);

        double grid = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10000; ++i) {
            const double mt = i / 10000.0;
            const CVector g = bisection_pencil_pair(p, mt).vector;
            const double gain = kernel::quad_form(f.q_bob, g);
            if (gain < f.gamma / f.e_max) continue;
            grid = std::min(grid, f.gamma / gain * kernel::quad_form(f.q_eve, g));
        }
        REQUIRE(std::isfinite(grid));
        const double obj = r.design.sinr(f.q_eve);
        CHECK(obj <= grid * (1 + 1e-4));
        CHECK(grid <= obj * (1 + 1e-2));
    }
}

TEST_CASE("design_p2p dispatches and keeps the SINR constraint active", "[p2p]") {
    CHECK(design_p2p(P2pProblem{diag({4, 1}), HermitianMatrix::identity(2), 4.0, 100.0}).branch ==
          DesignBranch::eigen);
    Rng rng = substream(48, 0);
    const testing::P2pFixture f = testing::bisection_fixture(8, rng);
    const WaveformDesign b = design_p2p(from(f));
    CHECK(b.branch == DesignBranch::bisection);
    CHECK(b.energy <= f.e_max);
    CHECK(testing::rel_diff(b.energy, f.e_max) < 1e-6);
    CHECK_THROWS_AS(design_p2p(P2pProblem{f.q_bob, f.q_eve, 1e9, 1.0}), NoTransmitError);

    for (int rep = 0; rep < 200; ++rep) {
        const P2pProblem p{testing::random_link_q(8, rng), testing::random_link_q(8, rng), 3.0, 5.0};
        if (!check_feasibility(p)) continue;
        const WaveformDesign d = design_p2p(p);
        CHECK(std::abs(d.sinr(p.q_bob) - p.gamma) / p.gamma <= 1e-9);
        CHECK(d.energy <= p.e_max);
        CHECK(std::abs(d.waveform.norm() - 1.0) < 1e-10);
        // A global phase rotation leaves both SINRs unchanged.
        WaveformDesign r = d;
        r.waveform *= std::polar(1.0, 0.7);
        CHECK(testing::rel_diff(r.sinr(p.q_bob), d.sinr(p.q_bob)) < 1e-14);
        CHECK(testing::rel_diff(r.sinr(p.q_eve), d.sinr(p.q_eve)) < 1e-14);
    }
}
