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

#include "secwave/an.hpp"
#include "secwave/channel.hpp"
#include "support.hpp"

using namespace secwave;

TEST_CASE("minimum-energy design uses the top eigenvector", "[an]") {
    CMatrix q = CMatrix::Zero(2, 2);
    q(0, 0) = 4.0;
    q(1, 1) = 1.0;
    const WaveformDesign d = an::min_energy_design(HermitianMatrix(q), 4.0, 100.0);
    CHECK(std::abs(d.energy - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(d.waveform(0)) - 1.0) < 1e-14);
    CHECK(d.branch == DesignBranch::min_energy);
    CHECK_THROWS_AS(an::min_energy_design(HermitianMatrix(q), 500.0, 100.0), NoTransmitError);

    Rng rng = substream(31, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const HermitianMatrix qb = testing::random_link_q(8, rng);
        const WaveformDesign m = an::min_energy_design(qb, 2.0, 100.0);
        const double lmax = testing::jacobi_eigenvalues(qb.matrix()).front();
        CHECK(testing::rel_diff(m.energy, 2.0 / lmax) < 1e-10);
        CHECK(testing::rel_diff(m.sinr(qb), 2.0) < 1e-12);
    }
}

TEST_CASE("AN covariance lives in the blocked complement with the full budget", "[an]") {
    Rng rng = substream(32, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const HermitianMatrix qb = testing::random_link_q(8, rng);
        const an::AnDesign d = an::an_pipeline_single(qb, 3.0, 100.0);
        const CVector v = qb.matrix() * d.design.waveform;
        CHECK((d.noise.covariance.matrix() * v).norm() <= 1e-12 * d.noise.covariance.norm() * v.norm());
        CHECK(testing::rel_diff(d.noise.covariance.trace(), 100.0 - d.design.energy) < 1e-10);
        CHECK(d.noise.basis.cols() == 7);
        const std::vector<double> eig = testing::jacobi_eigenvalues(d.noise.covariance.matrix());
        CHECK(eig.back() >= -1e-12 * eig.front());
        // Flat spectrum over the complement: L - 1 equal eigenvalues and one zero.
        const double per = d.noise.per_dimension_energy();
        for (std::size_t i = 0; i + 1 < eig.size(); ++i) CHECK(std::abs(eig[i] - per) <= 1e-10 * per);
    }
}

TEST_CASE("AN leaves the intended receiver's SINR unchanged", "[an]") {
    channel::ScenarioConfig cfg;
    Rng rng = substream(33, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const channel::Link bob = channel::draw_link(cfg, rng);
        const an::AnDesign d = an::an_pipeline_single(bob.q, 4.0, 100.0);
        const double with = channel::sinr_with_an(bob.channel.h, bob.disturbance.r, d.noise.covariance, d.design);
        CHECK(testing::rel_diff(with, d.design.sinr(bob.q)) < 1e-9);
        CHECK(testing::rel_diff(with, 4.0) < 1e-9);
    }
}

TEST_CASE("multicast AN blocks every receiver", "[an]") {
    channel::ScenarioConfig cfg;
    cfg.chips = 16;
    Rng rng = substream(34, 0);
    for (int k = 1; k <= 4; ++k) {
        std::vector<channel::Link> links;
        std::vector<HermitianMatrix> qs;
        for (int i = 0; i < k; ++i) {
            links.push_back(channel::draw_link(cfg, rng));
            qs.push_back(links.back().q);
        }
        const CVector s = testing::random_unit(16, rng);
        const WaveformDesign d{s, 10.0, DesignBranch::sdr};
        const an::AnCovariance rw = an::multicast_an(qs, d, 100.0);
        CHECK(rw.basis.cols() == 16 - k);
        CHECK(testing::rel_diff(rw.covariance.trace(), 90.0) < 1e-10);
        for (const channel::Link& l : links) {
            const double with = channel::sinr_with_an(l.channel.h, l.disturbance.r, rw.covariance, d);
            CHECK(testing::rel_diff(with, d.sinr(l.q)) < 1e-9);
        }
    }
}

TEST_CASE("AN with no spare budget is the zero matrix", "[an]") {
    Rng rng = substream(35, 0);
    const HermitianMatrix qb = testing::random_link_q(8, rng);
    const double e_min = an::min_energy_design(qb, 2.0, 1e9).energy;
    const an::AnDesign d = an::an_pipeline_single(qb, 2.0, e_min);
    CHECK(d.noise.covariance.norm() <= 1e-12);
    CHECK(d.noise.budget == 0.0);
}

TEST_CASE("AN samples have the designed covariance", "[an]") {
    Rng rng = substream(36, 0);
    const HermitianMatrix qb = testing::random_link_q(6, rng);
    const an::AnDesign d = an::an_pipeline_single(qb, 1.0, 10.0);
    const int n = 60000;
    CMatrix acc = CMatrix::Zero(6, 6);
    for (int i = 0; i < n; ++i) {
        const CVector w = an::sample_an(d.noise, rng);
        acc += w * w.adjoint();
    }
    acc /= static_cast<double>(n);
    CHECK((acc - d.noise.covariance.matrix()).norm() / d.noise.covariance.norm() < 0.03);
}
