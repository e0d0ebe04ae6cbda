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
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "secwave/errors.hpp"

/**
 * @file kernel.hpp
 * @brief Dense complex-Hermitian linear algebra shared by all design routines.
 *
 * Decompositions are delegated to Eigen; this layer adds input validation,
 * descending spectra, deterministic eigenvector phases and the Cholesky
 * reduction used for the generalized problem.
 */

namespace secwave {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace kernel {

inline constexpr double hermitian_tol = 1e-12;

/// Complex matrix known to be Hermitian (A = A^H) with finite entries.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    /// Validates conjugate symmetry to 1e-12 relative and stores the exact
    /// Hermitian part.
    explicit HermitianMatrix(const CMatrix& a) {
        if (a.rows() != a.cols() || a.rows() == 0) {
            throw ValidationError("Hermitian matrix must be square and non-empty, got " +
                                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
        }
        if (!a.allFinite()) throw ValidationError("Hermitian matrix has non-finite entries");
        const double scale = a.cwiseAbs().maxCoeff();
        const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
        if (asym > hermitian_tol * scale) {
            throw ValidationError("matrix is not Hermitian (asymmetry " + std::to_string(asym) + ")");
        }
        m_ = 0.5 * (a + a.adjoint());
    }

    static HermitianMatrix identity(Index n) { return HermitianMatrix(CMatrix::Identity(n, n)); }
    static HermitianMatrix zero(Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

    Index dim() const { return m_.rows(); }
    const CMatrix& matrix() const { return m_; }
    double trace() const { return m_.diagonal().real().sum(); }
    double norm() const { return m_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(m_ + o.m_); }
    HermitianMatrix operator*(double s) const { return HermitianMatrix(m_ * s); }

private:
    CMatrix m_;
};

/// s^H A s for Hermitian A (the imaginary part is rounding noise).
inline double quad_form(const HermitianMatrix& a, const CVector& s) {
    return s.dot(a.matrix() * s).real();
}

/// Rotates v so that its largest-magnitude entry is real and positive.
inline void normalize_phase(Eigen::Ref<CVector> v) {
    Index imax = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        // strict > keeps the first index among exact ties
        if (std::abs(v(i)) > best * (1.0 + 1e-12)) {
            best = std::abs(v(i));
            imax = i;
        }
    }
    if (best > 0.0) {
        v *= std::conj(v(imax)) / best;
        v(imax) = cplx(std::abs(v(imax)), 0.0);
    }
}

struct EigenPairSet {
    RVector values;   // descending
    CMatrix vectors;  // column i pairs with values(i)
};

inline EigenPairSet hermitian_eig(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    const Index n = a.dim();
    EigenPairSet out{RVector(n), CMatrix(n, n)};
    for (Index i = 0; i < n; ++i) {
        out.values(i) = es.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
        normalize_phase(out.vectors.col(i));
    }
    return out;
}

inline double max_eigenvalue(const HermitianMatrix& a) { return hermitian_eig(a).values(0); }

/// Lower Cholesky factor of a Hermitian positive definite matrix.
///
/// Rejects near-singular input: the smallest pivot must exceed
/// 1e-12 * trace / dim.
inline CMatrix cholesky_factor(const HermitianMatrix& b) {
    Eigen::LLT<CMatrix> llt(b.matrix());
    if (llt.info() != Eigen::Success) throw DefinitenessError("matrix is not positive definite");
    CMatrix l = llt.matrixL();
    const double floor = 1e-12 * b.trace() / static_cast<double>(b.dim());
    const double min_pivot = l.diagonal().cwiseAbs2().minCoeff();
    if (!(min_pivot >= floor) || !(floor > 0.0)) {
        throw DefinitenessError("matrix is numerically singular (Cholesky pivot " +
                                std::to_string(min_pivot) + ")");
    }
    return l;
}

/// Full generalized spectrum of A p = lambda B p, descending, with unit
/// Euclidean-norm, phase-normalized vectors.
inline EigenPairSet generalized_eig(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("generalized eigenproblem dimension mismatch");
    const CMatrix l = cholesky_factor(b);
    const auto tri = l.triangularView<Eigen::Lower>();
    // C = L^-1 A L^-H
    CMatrix c = tri.solve(a.matrix());
    c = tri.solve(c.adjoint()).adjoint();
    EigenPairSet std_pairs = hermitian_eig(HermitianMatrix(0.5 * (c + c.adjoint())));
    CMatrix p = l.adjoint().triangularView<Eigen::Upper>().solve(std_pairs.vectors);
    for (Index i = 0; i < p.cols(); ++i) {
        p.col(i).normalize();
        normalize_phase(p.col(i));
    }
    return {std::move(std_pairs.values), std::move(p)};
}

struct EigenPair {
    double value = 0.0;
    CVector vector;
};

struct ExtremePairs {
    EigenPair min;
    EigenPair max;
};

inline ExtremePairs generalized_eig_extremes(const HermitianMatrix& a, const HermitianMatrix& b) {
    EigenPairSet all = generalized_eig(a, b);
    const Index n = all.values.size();
    return {{all.values(n - 1), all.vectors.col(n - 1)}, {all.values(0), all.vectors.col(0)}};
}

struct SingularBasis {
    RVector singular_values;  // length L, descending, zero-padded past min(L, K)
    CMatrix left_vectors;     // L x L unitary
    Index rank = 0;

    /// Orthonormal basis of the orthogonal complement of range(V).
    CMatrix complement() const {
        return left_vectors.rightCols(left_vectors.cols() - rank);
    }
};

/// Full left singular basis of an L x K matrix with L >= K + 1.
///
/// Rank counts singular values above 1e-10 * sigma_1.
inline SingularBasis left_singular_basis(const CMatrix& v) {
    const Index l = v.rows();
    const Index k = v.cols();
    if (l <= k) {
        throw DimensionError("left singular basis needs L >= K+1, got L=" + std::to_string(l) +
                             ", K=" + std::to_string(k));
    }
    if (!v.allFinite()) throw ValidationError("matrix has non-finite entries");
    Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU);
    SingularBasis out;
    out.left_vectors = svd.matrixU();
    out.singular_values = RVector::Zero(l);
    out.singular_values.head(svd.singularValues().size()) = svd.singularValues();
    const double s1 = out.singular_values(0);
    for (Index i = 0; i < l; ++i) {
        if (s1 > 0.0 && out.singular_values(i) > 1e-10 * s1) out.rank = i + 1;
    }
    return out;
}

}  // namespace kernel

using kernel::HermitianMatrix;

}  // namespace secwave
