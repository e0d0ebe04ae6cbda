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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "secwave/errors.hpp"
#include "secwave/kernel.hpp"

/**
 * @file sdp.hpp
 * @brief Small dense Hermitian SDP solver for trace-form problems
 *
 *     minimize    Tr(C X)
 *     subject to  Tr(A_k X) >= b_k,  k = 1..K
 *                 Tr(X) <= c,  X >= 0 (Hermitian PSD).
 *
 * Hermitian X of order L is carried as the real symmetric embedding
 * [[Re X, -Im X], [Im X, Re X]] of order 2L; traces double under the
 * embedding, so b and c are doubled going in and objectives halved coming out.
 * Inequalities get nonnegative slacks, giving a primal in standard form over
 * the cone S^{2L}_+ x R^{K+1}_+ that is solved by an infeasible primal-dual
 * interior-point method with Nesterov-Todd scaling and Mehrotra
 * predictor-corrector steps.
 */

namespace secwave::sdr {

struct SdpConstraint {
    HermitianMatrix a;
    double b = 0.0;  // Tr(A X) >= b
};

struct SdpProblem {
    HermitianMatrix objective;
    std::vector<SdpConstraint> constraints;
    double trace_cap = 1.0;

    Index dim() const { return objective.dim(); }

    void validate() const {
        if (constraints.empty()) throw ValidationError("SDP needs at least one trace constraint");
        if (!(trace_cap > 0.0) || !std::isfinite(trace_cap)) throw ValidationError("trace cap must be positive");
        for (const SdpConstraint& k : constraints) {
            if (k.a.dim() != dim()) throw DimensionError("SDP constraint matrix dimension mismatch");
            if (!(k.b > 0.0) || !std::isfinite(k.b)) throw ValidationError("SDP constraint bounds must be positive");
        }
    }
};

struct SdpSolution {
    HermitianMatrix x;
    double objective = 0.0;       // Tr(C X)
    double dual_objective = 0.0;  // certified lower bound on the optimum
    double gap = 0.0;             // objective - dual_objective
    double max_violation = 0.0;   // worst of the trace constraints and -lambda_min(X)
    int iterations = 0;
    RVector multipliers;          // y_k >= 0 of the K trace constraints
    double cap_multiplier = 0.0;  // <= 0
};

struct SdpOptions {
    double tol = 1e-8;
    int max_iterations = 200;
};

/// Raised when the constraint set has no point; `attainable_fraction` is the
/// largest t with Tr(A_k X) >= t b_k for all k inside the trace cap (t < 1).
struct SdpInfeasible : InfeasibleError {
    SdpInfeasible(const std::string& w, double fraction) : InfeasibleError(w), attainable_fraction(fraction) {}
    double attainable_fraction;
};

namespace detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// min <C,X> + c_lp.x  s.t.  <A_i,X> + a_lp.row(i).x = b_i,  X >= 0, x >= 0.
struct RealSdp {
    MatrixXd c;
    VectorXd c_lp;
    std::vector<MatrixXd> a;
    MatrixXd a_lp;
    VectorXd b;

    Index n() const { return c.rows(); }
    Index p() const { return c_lp.size(); }
    Index m() const { return b.size(); }
};

struct Iterate {
    MatrixXd x;
    VectorXd xl;
    VectorXd y;
    MatrixXd z;
    VectorXd zl;
};

inline double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

inline MatrixXd embed(const CMatrix& a) {
    const Index n = a.rows();
    MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = a.real();
    r.topRightCorner(n, n) = -a.imag();
    r.bottomLeftCorner(n, n) = a.imag();
    r.bottomRightCorner(n, n) = a.real();
    return r;
}

/// Inverse of embed(), averaging the two copies of each part.
inline CMatrix unembed(const MatrixXd& r) {
    const Index n = r.rows() / 2;
    CMatrix a(n, n);
    a.real() = 0.5 * (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n));
    a.imag() = 0.5 * (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n));
    return 0.5 * (a + a.adjoint());
}

inline MatrixXd sym(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

struct Residuals {
    VectorXd rp;   // b - A(x)
    MatrixXd rd;   // C - A*(y) - Z
    VectorXd rdl;
    double pobj = 0.0;
    double dobj = 0.0;
    double mu = 0.0;
};

inline Residuals residuals(const RealSdp& pr, const Iterate& it) {
    Residuals r;
    r.rp = pr.b - pr.a_lp * it.xl;
    MatrixXd aty = MatrixXd::Zero(pr.n(), pr.n());
    for (Index i = 0; i < pr.m(); ++i) {
        r.rp(i) -= inner(pr.a[static_cast<std::size_t>(i)], it.x);
        aty += it.y(i) * pr.a[static_cast<std::size_t>(i)];
    }
    r.rd = pr.c - aty - it.z;
    r.rdl = pr.c_lp - pr.a_lp.transpose() * it.y - it.zl;
    r.pobj = inner(pr.c, it.x) + pr.c_lp.dot(it.xl);
    r.dobj = pr.b.dot(it.y);
    r.mu = (inner(it.x, it.z) + it.xl.dot(it.zl)) / static_cast<double>(pr.n() + pr.p());
    return r;
}

/// NT scaling point: X = G D G^T, Z = G^-T D G^-1, W = G G^T (so W Z W = X).
struct Scaling {
    MatrixXd g;
    MatrixXd ginv;
    MatrixXd w;
    VectorXd d;
    VectorXd wl;  // sqrt(x / z); the LP analogue of W
    VectorXd dl;  // sqrt(x z)
};

inline bool nt_scaling(const Iterate& it, Scaling& s) {
    Eigen::LLT<MatrixXd> llt(it.x);
    if (llt.info() != Eigen::Success) return false;
    const MatrixXd l = llt.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(l.transpose() * it.z * l));
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) return false;
    s.d = es.eigenvalues().cwiseSqrt();
    const VectorXd dm = s.d.cwiseSqrt().cwiseInverse();
    s.g = l * es.eigenvectors() * dm.asDiagonal();
    const MatrixXd linv = l.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(l.rows(), l.cols()));
    s.ginv = s.d.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose() * linv;
    s.w = sym(s.g * s.g.transpose());
    s.wl = (it.xl.array() / it.zl.array()).sqrt().matrix();
    s.dl = (it.xl.array() * it.zl.array()).sqrt().matrix();
    return true;
}

/// Largest alpha with X + alpha dX PSD (infinity when dX is PSD).
inline double max_step(const MatrixXd& x, const MatrixXd& dx) {
    Eigen::LLT<MatrixXd> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const auto l = llt.matrixL();
    MatrixXd t = l.solve(dx);
    t = l.solve(t.transpose()).transpose();
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(sym(t), Eigen::EigenvaluesOnly).eigenvalues()(0);
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

inline double max_step(const VectorXd& x, const VectorXd& dx) {
    double a = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < x.size(); ++i) {
        if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
    }
    return a;
}

struct Direction {
    MatrixXd dx;
    VectorXd dxl;
    VectorXd dy;
    MatrixXd dz;
    VectorXd dzl;
};

/// Solves A(dX) = rp, A*(dy) + dZ = Rd, dX + W dZ W = Rc through the Schur
/// complement M_ij = <A_i, W A_j W> + a_i^T diag(wl^2) a_j.
inline Direction solve_direction(const RealSdp& pr, const Scaling& s, const Eigen::LLT<MatrixXd>& schur,
                                 const Residuals& r, const MatrixXd& rc, const VectorXd& rcl) {
    const VectorXd wl2 = s.wl.cwiseAbs2();
    const MatrixXd wrw = s.w * r.rd * s.w;
    VectorXd rhs = r.rp - pr.a_lp * (rcl - wl2.cwiseProduct(r.rdl));
    for (Index i = 0; i < pr.m(); ++i) {
        const MatrixXd& ai = pr.a[static_cast<std::size_t>(i)];
        rhs(i) += inner(ai, wrw) - inner(ai, rc);
    }
    Direction d;
    d.dy = schur.solve(rhs);
    d.dz = r.rd;
    for (Index i = 0; i < pr.m(); ++i) d.dz -= d.dy(i) * pr.a[static_cast<std::size_t>(i)];
    d.dz = sym(d.dz);
    d.dzl = r.rdl - pr.a_lp.transpose() * d.dy;
    d.dx = sym(rc - s.w * d.dz * s.w);
    d.dxl = rcl - wl2.cwiseProduct(d.dzl);
    return d;
}

enum class Status { converged, stalled, max_iterations };

struct RealResult {
    Status status = Status::max_iterations;
    Iterate point;
    int iterations = 0;
};

inline RealResult solve_real(const RealSdp& pr, int max_iterations,
                             const std::function<bool(const Iterate&, const Residuals&)>& done) {
    const Index n = pr.n();
    const Index p = pr.p();
    const Index m = pr.m();

    double anorm = 0.0;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (Index i = 0; i < m; ++i) {
        const double ai = std::sqrt(pr.a[static_cast<std::size_t>(i)].squaredNorm() + pr.a_lp.row(i).squaredNorm());
        anorm = std::max(anorm, ai);
        xi = std::max(xi, static_cast<double>(n) * (1.0 + std::abs(pr.b(i))) / (1.0 + ai));
    }
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), anorm, pr.c.norm(), pr.c_lp.norm()});

    RealResult res;
    Iterate& it = res.point;
    it.x = xi * MatrixXd::Identity(n, n);
    it.xl = VectorXd::Constant(p, xi);
    it.y = VectorXd::Zero(m);
    it.z = eta * MatrixXd::Identity(n, n);
    it.zl = VectorXd::Constant(p, eta);

    const double nu = static_cast<double>(n + p);
    for (int k = 0; k < max_iterations; ++k) {
        res.iterations = k;
        const Residuals r = residuals(pr, it);
        if (done(it, r)) {
            res.status = Status::converged;
            return res;
        }
        Scaling s;
        if (!nt_scaling(it, s)) {
            res.status = Status::stalled;
            return res;
        }

        std::vector<MatrixXd> waw(static_cast<std::size_t>(m));
        for (Index j = 0; j < m; ++j) waw[static_cast<std::size_t>(j)] = s.w * pr.a[static_cast<std::size_t>(j)] * s.w;
        MatrixXd schur(m, m);
        const VectorXd wl2 = s.wl.cwiseAbs2();
        for (Index i = 0; i < m; ++i) {
            for (Index j = 0; j <= i; ++j) {
                const double v = inner(pr.a[static_cast<std::size_t>(i)], waw[static_cast<std::size_t>(j)]) +
                                 pr.a_lp.row(i).dot(wl2.cwiseProduct(pr.a_lp.row(j).transpose()));
                schur(i, j) = v;
                schur(j, i) = v;
            }
        }
        Eigen::LLT<MatrixXd> schur_llt(schur);
        if (schur_llt.info() != Eigen::Success) {
            res.status = Status::stalled;
            return res;
        }

        // predictor: affine-scaling direction
        const Direction aff = solve_direction(pr, s, schur_llt, r, -it.x, -it.xl);
        const double ap_aff = std::min({1.0, max_step(it.x, aff.dx), max_step(it.xl, aff.dxl)});
        const double ad_aff = std::min({1.0, max_step(it.z, aff.dz), max_step(it.zl, aff.dzl)});
        const double mu_aff = (inner(it.x + ap_aff * aff.dx, it.z + ad_aff * aff.dz) +
                               (it.xl + ap_aff * aff.dxl).dot(it.zl + ad_aff * aff.dzl)) / nu;
        const double sigma = std::clamp(std::pow(mu_aff / r.mu, 3.0), 0.0, 1.0);

        // corrector: centering plus the second-order term, in the NT-scaled space
        const MatrixXd dxt = s.ginv * aff.dx * s.ginv.transpose();
        const MatrixXd dzt = s.g.transpose() * aff.dz * s.g;
        const MatrixXd so = dxt * dzt + dzt * dxt;
        MatrixXd dhat(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                const double diag = (i == j) ? 2.0 * (sigma * r.mu - s.d(i) * s.d(i)) : 0.0;
                dhat(i, j) = (diag - so(i, j)) / (s.d(i) + s.d(j));
            }
        }
        const MatrixXd rc = sym(s.g * dhat * s.g.transpose());
        const VectorXd dxlt = aff.dxl.cwiseQuotient(s.wl);
        const VectorXd dzlt = aff.dzl.cwiseProduct(s.wl);
        const VectorXd dlhat = ((sigma * r.mu - s.dl.array().square() - dxlt.array() * dzlt.array()) / s.dl.array()).matrix();
        const VectorXd rcl = s.wl.cwiseProduct(dlhat);
        const Direction dir = solve_direction(pr, s, schur_llt, r, rc, rcl);

        constexpr double tau = 0.98;
        const double ap = std::min(1.0, tau * std::min(max_step(it.x, dir.dx), max_step(it.xl, dir.dxl)));
        const double ad = std::min(1.0, tau * std::min(max_step(it.z, dir.dz), max_step(it.zl, dir.dzl)));
        if (ap < 1e-12 && ad < 1e-12) {
            res.status = Status::stalled;
            return res;
        }
        it.x = sym(it.x + ap * dir.dx);
        it.xl += ap * dir.dxl;
        it.y += ad * dir.dy;
        it.z = sym(it.z + ad * dir.dz);
        it.zl += ad * dir.dzl;
        if (!it.y.allFinite() || it.y.cwiseAbs().maxCoeff() > 1e12) {
            res.status = Status::stalled;
            return res;
        }
    }
    res.iterations = max_iterations;
    res.status = done(it, residuals(pr, it)) ? Status::converged : Status::max_iterations;
    return res;
}

/// Builds the embedded standard form. Row i of the K trace constraints is
/// scaled by row_scale(i); the cap row is last. With `phase_one`, an extra
/// LP variable t multiplies b_k and the objective becomes -t.
inline RealSdp build_real(const SdpProblem& p, VectorXd& row_scale, double& obj_scale, bool phase_one) {
    const Index kc = static_cast<Index>(p.constraints.size());
    const Index n = 2 * p.dim();
    const Index m = kc + 1;
    const Index lp = phase_one ? kc + 2 : kc + 1;
    RealSdp r;
    row_scale.resize(m);
    r.a.resize(static_cast<std::size_t>(m));
    r.a_lp = MatrixXd::Zero(m, lp);
    r.b = VectorXd::Zero(m);
    r.c_lp = VectorXd::Zero(lp);
    for (Index k = 0; k < kc; ++k) {
        MatrixXd ak = embed(p.constraints[static_cast<std::size_t>(k)].a.matrix());
        const double bk = 2.0 * p.constraints[static_cast<std::size_t>(k)].b;
        const double sc = 1.0 / std::max(ak.norm(), 1e-300);
        row_scale(k) = sc;
        r.a[static_cast<std::size_t>(k)] = sc * ak;
        r.a_lp(k, k) = -sc;
        if (phase_one) {
            r.a_lp(k, kc + 1) = -sc * bk;
        } else {
            r.b(k) = sc * bk;
        }
    }
    const double sc = 1.0 / std::sqrt(static_cast<double>(n));
    row_scale(kc) = sc;
    r.a[static_cast<std::size_t>(kc)] = sc * MatrixXd::Identity(n, n);
    r.a_lp(kc, kc) = sc;
    r.b(kc) = sc * 2.0 * p.trace_cap;
    if (phase_one) {
        r.c = MatrixXd::Zero(n, n);
        r.c_lp(kc + 1) = -1.0;
        obj_scale = 1.0;
    } else {
        const MatrixXd c = embed(p.objective.matrix());
        obj_scale = c.norm() > 0.0 ? c.norm() : 1.0;
        r.c = c / obj_scale;
    }
    return r;
}

inline bool standard_done(const Residuals& r, double bnorm, double tol) {
    const double pinf = r.rp.norm() / (1.0 + bnorm);
    const double dinf = std::sqrt(r.rd.squaredNorm() + r.rdl.squaredNorm());
    const double rgap = std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj) + std::abs(r.dobj));
    return pinf <= tol && dinf <= tol && rgap <= tol;
}

}  // namespace detail

/// Largest t such that Tr(A_k X) >= t b_k for every k with Tr(X) <= c, X >= 0.
inline double attainable_fraction(const SdpProblem& p, int max_iterations = 200) {
    p.validate();
    Eigen::VectorXd rs;
    double os = 1.0;
    const detail::RealSdp real = detail::build_real(p, rs, os, true);
    const detail::RealResult res =
        detail::solve_real(real, max_iterations, [&](const detail::Iterate&, const detail::Residuals& r) {
            return detail::standard_done(r, real.b.norm(), 1e-9);
        });
    if (res.status != detail::Status::converged) throw ConvergenceError("phase-1 SDP did not converge");
    return res.point.xl(real.p() - 1);
}

/**
 * Solves the trace-form SDP to `opt.tol`: every trace constraint and
 * -lambda_min(X) violated by at most tol (absolute), and the gap to a certified
 * dual bound at most tol * (1 + |objective|).
 *
 * On a stall or iteration limit a phase-1 problem decides between
 * SdpInfeasible and ConvergenceError.
 */
inline SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {}) {
    p.validate();
    const Index kc = static_cast<Index>(p.constraints.size());
    const Index l = p.dim();
    Eigen::VectorXd row_scale;
    double obj_scale = 1.0;
    const detail::RealSdp real = detail::build_real(p, row_scale, obj_scale, false);

    SdpSolution sol;
    auto evaluate = [&](const detail::Iterate& it) {
        const CMatrix x = detail::unembed(it.x);
        sol.x = HermitianMatrix(x);
        sol.objective = (p.objective.matrix() * x).trace().real();
        sol.max_violation = 0.0;
        sol.multipliers.resize(kc);
        CMatrix zc = p.objective.matrix();
        double dual = 0.0;
        for (Index k = 0; k < kc; ++k) {
            const SdpConstraint& ck = p.constraints[static_cast<std::size_t>(k)];
            sol.max_violation = std::max(sol.max_violation, ck.b - (ck.a.matrix() * x).trace().real());
            const double yk = std::max(0.0, obj_scale * row_scale(k) * it.y(k));
            sol.multipliers(k) = yk;
            zc -= yk * ck.a.matrix();
            dual += yk * ck.b;
        }
        const double yc = std::min(0.0, obj_scale * row_scale(kc) * it.y(kc));
        sol.cap_multiplier = yc;
        zc -= yc * CMatrix::Identity(l, l);
        dual += yc * p.trace_cap;
        sol.max_violation = std::max(sol.max_violation, sol.x.trace() - p.trace_cap);
        const double xmin = kernel::hermitian_eig(sol.x).values(l - 1);
        sol.max_violation = std::max(sol.max_violation, -xmin);
        // weak duality with an inexact dual slack: Tr(Z X) >= lambda_min(Z) * c
        const double zmin = kernel::hermitian_eig(HermitianMatrix(0.5 * (zc + zc.adjoint()))).values(l - 1);
        sol.dual_objective = dual + std::min(0.0, zmin) * p.trace_cap;
        sol.gap = sol.objective - sol.dual_objective;
    };

    const detail::RealResult res =
        detail::solve_real(real, opt.max_iterations, [&](const detail::Iterate& it, const detail::Residuals&) {
            evaluate(it);
            return sol.max_violation <= opt.tol && sol.gap <= opt.tol * (1.0 + std::abs(sol.objective));
        });
    sol.iterations = res.iterations;
    if (res.status == detail::Status::converged) return sol;

    const double frac = attainable_fraction(p, opt.max_iterations);
    if (frac < 1.0 - 1e-6) {
        throw SdpInfeasible("SDP is infeasible: at most " + std::to_string(frac) +
                                " of every SINR target is attainable within the trace cap",
                            frac);
    }
    throw ConvergenceError("SDP did not converge after " + std::to_string(res.iterations) +
                           " iterations (violation " + std::to_string(sol.max_violation) + ", gap " +
                           std::to_string(sol.gap) + ")");
}

}  // namespace secwave::sdr
