// Copyright 2026 The dehaze Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once
#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>
#include <dehaze/image.hpp>
#include <dehaze/min_filter.hpp>
#include <dehaze/resize.hpp>

namespace dehaze {

enum class RefineMode
{
    none,
    matting,
    downscale_matting
};

struct RefineConfig
{
    double omega = 0.95;
    double lambda = 1e-4;
    double epsilon = 1e-7;
    Index matting_window_radius = 1;
    Index max_solve_dim = 200;
    double solver_tol = 1e-5;
    int solver_max_iter = 10000;
    RefineMode mode = RefineMode::downscale_matting;

    void validate() const
    {
        if (!(omega > 0.0 && omega <= 1.0)) throw ArgumentError("omega must be in (0, 1]");
        if (!(lambda > 0.0)) throw ArgumentError("lambda must be > 0");
        if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be > 0");
        if (matting_window_radius < 1) throw ArgumentError("matting window radius must be >= 1");
        if (max_solve_dim < 1) throw ArgumentError("max solve dim must be >= 1");
        if (!(solver_tol > 0.0)) throw ArgumentError("solver tolerance must be > 0");
        if (solver_max_iter < 1) throw ArgumentError("solver max iterations must be >= 1");
    }
};

// Lower bound applied to each airlight channel before dividing by it.
inline constexpr double kMinAirlight = 0.05;

/// t(x) = 1 - omega * min over channels and the clipped window of I / A,
/// clamped to [0, 1].
template <class Scalar>
ScalarMap<Scalar> rough_transmission(const Image<Scalar>& img, const Color<Scalar>& airlight,
                                     double omega, Index radius)
{
    if (!(omega > 0.0 && omega <= 1.0)) throw ArgumentError("rough_transmission: omega must be in (0, 1]");
    Plane<Scalar> ratio = img.channel(0) / std::max<Scalar>(airlight[0], Scalar(kMinAirlight));
    for (int c = 1; c < 3; ++c) {
        ratio = ratio.min(img.channel(c) / std::max<Scalar>(airlight[c], Scalar(kMinAirlight)));
    }
    return clamp01(Scalar(1) - Scalar(omega) * min_filter(ratio, radius));
}

/// (L + lambda I) t = lambda t_rough over the pixels of one image, unknowns
/// in row-major order.
template <class Scalar>
struct SparseSystem
{
    using matrix_type = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
    using vector_type = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Index rows = 0;
    Index cols = 0;
    Scalar lambda = 0;
    matrix_type laplacian;
    matrix_type matrix;     // laplacian + lambda * I
    vector_type rhs;        // lambda * t_rough
};

/// Closed-form matting Laplacian over every (2r+1)^2 window that fits
/// inside the image. For window w with color mean mu and covariance S,
///   L_ij += delta_ij - (1 + (I_i - mu)^T (S + eps/|w| Id)^-1 (I_j - mu)) / |w|.
/// Pairs are accumulated once and mirrored, so L is exactly symmetric.
template <class Scalar>
SparseSystem<Scalar> build_matting_system(const Image<Scalar>& img, const ScalarMap<Scalar>& rough,
                                          const RefineConfig& cfg)
{
    using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
    using MatX3 = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>;
    using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    require_same_size(img, rough, "build_matting_system");
    cfg.validate();

    const Index h = img.rows(), w = img.cols(), n = h * w;
    const Index r = cfg.matting_window_radius;
    const Index side = 2 * r + 1;
    const Index wsize = side * side;
    // neighbor offsets span [-2r, 2r] in each direction
    const Index span = 4 * r + 1;
    const Index band = span * span;
    auto band_slot = [&](Index dr, Index dc) { return (dr + 2 * r) * span + (dc + 2 * r); };

    std::vector<Scalar> acc(static_cast<std::size_t>(n * band), Scalar(0));
    std::vector<unsigned char> touched(acc.size(), 0);

    MatX3 centered(wsize, 3);
    std::vector<Index> idx(static_cast<std::size_t>(wsize));
    const Scalar inv_w = Scalar(1) / static_cast<Scalar>(wsize);
    for (Index kr = r; kr + r < h; ++kr) {
        for (Index kc = r; kc + r < w; ++kc) {
            Index m = 0;
            for (Index dr = -r; dr <= r; ++dr) {
                for (Index dc = -r; dc <= r; ++dc, ++m) {
                    const Index pr = kr + dr, pc = kc + dc;
                    idx[m] = pr * w + pc;
                    for (int c = 0; c < 3; ++c) centered(m, c) = img(pr, pc, c);
                }
            }
            const Eigen::Matrix<Scalar, 1, 3> mean = centered.colwise().mean();
            centered.rowwise() -= mean;
            const Mat3 cov = (centered.transpose() * centered) * inv_w
                           + Mat3::Identity() * (static_cast<Scalar>(cfg.epsilon) * inv_w);
            const MatX3 proj = centered * cov.inverse();
            const MatX gram = proj * centered.transpose();

            for (Index a = 0; a < wsize; ++a) {
                for (Index b = a; b < wsize; ++b) {
                    const Scalar v = (a == b ? Scalar(1) : Scalar(0)) - (Scalar(1) + gram(a, b)) * inv_w;
                    const Index ia = idx[a], ib = idx[b];
                    const Index dr = ib / w - ia / w, dc = ib % w - ia % w;
                    const auto sa = static_cast<std::size_t>(ia * band + band_slot(dr, dc));
                    acc[sa] += v;
                    touched[sa] = 1;
                    if (a != b) {
                        const auto sb = static_cast<std::size_t>(ib * band + band_slot(-dr, -dc));
                        acc[sb] += v;
                        touched[sb] = 1;
                    }
                }
            }
        }
    }

    SparseSystem<Scalar> sys;
    sys.rows = h;
    sys.cols = w;
    sys.lambda = static_cast<Scalar>(cfg.lambda);
    std::vector<Eigen::Triplet<Scalar>> trip;
    std::vector<Eigen::Triplet<Scalar>> trip_sys;
    trip.reserve(static_cast<std::size_t>(n * wsize));
    trip_sys.reserve(static_cast<std::size_t>(n * wsize));
    for (Index i = 0; i < n; ++i) {
        const Index ir = i / w, ic = i % w;
        bool diag = false;
        for (Index dr = -2 * r; dr <= 2 * r; ++dr) {
            for (Index dc = -2 * r; dc <= 2 * r; ++dc) {
                const auto s = static_cast<std::size_t>(i * band + band_slot(dr, dc));
                if (!touched[s]) continue;
                const Index j = (ir + dr) * w + (ic + dc);
                trip.emplace_back(i, j, acc[s]);
                if (j == i) {
                    trip_sys.emplace_back(i, j, acc[s] + sys.lambda);
                    diag = true;
                } else {
                    trip_sys.emplace_back(i, j, acc[s]);
                }
            }
        }
        if (!diag) trip_sys.emplace_back(i, i, sys.lambda);
    }
    sys.laplacian.resize(n, n);
    sys.laplacian.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trip_sys.begin(), trip_sys.end());

    sys.rhs.resize(n);
    for (Index i = 0; i < n; ++i) sys.rhs[i] = sys.lambda * rough(i / w, i % w);
    return sys;
}

template <class Scalar>
struct SolveResult
{
    ScalarMap<Scalar> transmission;  // clamped to [0, 1]
    int iterations = 0;
    double relative_residual = 0.0;  // of the unclamped solution
};

/// Jacobi-preconditioned conjugate gradient from a zero start. A run counts
/// as converged only when the recomputed residual ||b - Ax|| / ||b|| meets
/// the tolerance. Throws SolverError otherwise.
template <class Scalar>
SolveResult<Scalar> solve_refined(const SparseSystem<Scalar>& sys, const RefineConfig& cfg)
{
    using Vec = typename SparseSystem<Scalar>::vector_type;
    const auto& A = sys.matrix;
    const Vec& b = sys.rhs;
    const Index n = b.size();
    if (A.rows() != n || A.cols() != n) throw ArgumentError("solve_refined: malformed system");

    SolveResult<Scalar> res;
    Vec x = Vec::Zero(n);
    const Scalar bnorm = b.norm();
    if (bnorm == Scalar(0)) {
        res.transmission = ScalarMap<Scalar>::Zero(sys.rows, sys.cols);
        return res;
    }
    const Vec inv_diag = A.diagonal().cwiseInverse();
    const Scalar tol = static_cast<Scalar>(cfg.solver_tol);

    Vec rvec = b;
    Vec z = inv_diag.cwiseProduct(rvec);
    Vec p = z;
    Vec ap(n);
    Scalar rz = rvec.dot(z);
    double rel = 1.0;
    int it = 0;
    while (it < cfg.solver_max_iter) {
        ap.noalias() = A * p;
        const Scalar alpha = rz / p.dot(ap);
        x += alpha * p;
        rvec -= alpha * ap;
        ++it;
        if (rvec.norm() <= tol * bnorm) {
            // recursive residual drifts; confirm against b - Ax
            rvec = b - A * x;
            rel = static_cast<double>(rvec.norm() / bnorm);
            if (rel <= cfg.solver_tol) break;
            z = inv_diag.cwiseProduct(rvec);
            p = z;
            rz = rvec.dot(z);
            continue;
        }
        z = inv_diag.cwiseProduct(rvec);
        const Scalar rz_next = rvec.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    rel = static_cast<double>((b - A * x).norm() / bnorm);
    res.iterations = it;
    res.relative_residual = rel;
    if (!(rel <= cfg.solver_tol)) {
        throw SolverError("conjugate gradient did not converge: relative residual " +
                          std::to_string(rel) + " after " + std::to_string(it) + " iterations",
                          rel, it);
    }
    res.transmission.resize(sys.rows, sys.cols);
    for (Index i = 0; i < n; ++i) {
        res.transmission(i / sys.cols, i % sys.cols) = std::clamp(x[i], Scalar(0), Scalar(1));
    }
    return res;
}

/// Solve-resolution size for downscale_matting: the longer side becomes
/// max_dim when the image exceeds it, the shorter side scales with it.
inline std::pair<Index, Index> solve_size(Index rows, Index cols, Index max_dim)
{
    const Index longer = std::max(rows, cols);
    if (longer <= max_dim) return {rows, cols};
    const double s = static_cast<double>(max_dim) / static_cast<double>(longer);
    auto scaled = [&](Index v) {
        return std::clamp<Index>(static_cast<Index>(std::lround(static_cast<double>(v) * s)), 1, max_dim);
    };
    return {rows >= cols ? max_dim : scaled(rows), cols > rows ? max_dim : scaled(cols)};
}

template <class Scalar>
struct RefineResult
{
    ScalarMap<Scalar> transmission;
    int iterations = 0;
    double relative_residual = 0.0;
    Index solve_rows = 0;
    Index solve_cols = 0;
};

template <class Scalar>
RefineResult<Scalar> refine_transmission(const Image<Scalar>& img, const ScalarMap<Scalar>& rough,
                                         const RefineConfig& cfg)
{
    require_same_size(img, rough, "refine_transmission");
    cfg.validate();
    RefineResult<Scalar> out;
    if (cfg.mode == RefineMode::none) {
        out.transmission = rough;
        return out;
    }
    auto [sr, sc] = cfg.mode == RefineMode::matting
                        ? std::pair<Index, Index>{img.rows(), img.cols()}
                        : solve_size(img.rows(), img.cols(), cfg.max_solve_dim);
    out.solve_rows = sr;
    out.solve_cols = sc;
    if (sr == img.rows() && sc == img.cols()) {
        auto s = solve_refined(build_matting_system(img, rough, cfg), cfg);
        out.transmission = std::move(s.transmission);
        out.iterations = s.iterations;
        out.relative_residual = s.relative_residual;
        return out;
    }
    const Image<Scalar> small = resize(img, sr, sc);
    const ScalarMap<Scalar> small_rough = clamp01(resize_plane(rough, sr, sc));
    auto s = solve_refined(build_matting_system(small, small_rough, cfg), cfg);
    out.transmission = clamp01(resize_plane(s.transmission, img.rows(), img.cols()));
    out.iterations = s.iterations;
    out.relative_residual = s.relative_residual;
    return out;
}

} // namespace dehaze
