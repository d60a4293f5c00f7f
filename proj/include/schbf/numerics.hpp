// SPDX-License-Identifier: Apache-2.0
//
// schbf: hybrid beamforming design and SC-FDE link simulation for mmWave MIMO
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

// Dense complex linear algebra kernel shared by all modules: Hermitian EVD,
// checked inversion, unitary DFT pair along the sample axis, and seeded
// random matrices.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace schbf
{

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;

// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending, column i
// of `eigenvectors` paired with eigenvalue i.
struct HermitianEig
{
    RVector eigenvalues;
    CMatrix eigenvectors;
};

inline std::string shape_str(const CMatrix &m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_nonempty(const CMatrix &m, const char *what)
{
    if (m.rows() < 1 || m.cols() < 1)
        throw DimensionError(std::string(what) + ": empty matrix");
}

inline void require_square(const CMatrix &m, const char *what)
{
    require_nonempty(m, what);
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": expected square matrix, got " + shape_str(m));
}

inline bool all_finite(const CMatrix &m)
{
    return m.allFinite();
}

// Ascending eigenvalues; input is symmetrized as (M + M^H)/2 first.
inline HermitianEig hermitian_eig(const CMatrix &m)
{
    require_square(m, "hermitian_eig");
    if (!all_finite(m))
        throw DimensionError("hermitian_eig: non-finite entries");
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw SingularityError("hermitian_eig: eigen solver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Inverse with a singularity guard: reciprocal condition estimate below 1e-12
// raises SingularityError.
inline CMatrix inverse(const CMatrix &m)
{
    require_square(m, "inverse");
    if (!all_finite(m))
        throw DimensionError("inverse: non-finite entries");
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond >= 1e-12))
        throw SingularityError("inverse: matrix is singular to working precision (rcond=" +
                               std::to_string(rcond) + ")");
    return lu.inverse();
}

namespace detail
{
template <bool Forward>
CMatrix unitary_transform(const CMatrix &x, const char *what)
{
    require_nonempty(x, what);
    const Index n = x.cols();
    // kissfft faults on length-1 plans; the transform is the identity there.
    if (n == 1)
        return x;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix out(x.rows(), n);
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cx> in_row(static_cast<size_t>(n)), out_row;
    for (Index r = 0; r < x.rows(); ++r)
    {
        for (Index c = 0; c < n; ++c)
            in_row[static_cast<size_t>(c)] = x(r, c);
        if constexpr (Forward)
            fft.fwd(out_row, in_row);
        else
            fft.inv(out_row, in_row);
        for (Index c = 0; c < n; ++c)
            out(r, c) = out_row[static_cast<size_t>(c)] * scale;
    }
    return out;
}
} // namespace detail

// Column n of `time` is the vector at time n; column k of the result is
// (1/sqrt(N)) sum_n x_n exp(-j 2 pi n k / N).
inline CMatrix unitary_dft(const CMatrix &time)
{
    return detail::unitary_transform<true>(time, "unitary_dft");
}

// Inverse of unitary_dft: (1/sqrt(N)) sum_k y_k exp(+j 2 pi n k / N).
inline CMatrix unitary_idft(const CMatrix &freq)
{
    return detail::unitary_transform<false>(freq, "unitary_idft");
}

// ---- random numbers ------------------------------------------------------
//
// Distributions are built directly on the 64-bit engine output so that
// seeded results do not depend on the standard library implementation.

// splitmix64 finalizer, used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed of the node reached from `root` by following `path` in the seed tree.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = mix_seed(root);
    for (auto p : path)
        s = mix_seed(s ^ mix_seed(p + 0x632BE59BD9B4E019ULL));
    return s;
}

// Uniform on [0, 1).
inline double uniform01(Rng &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1].
inline double uniform01_open(Rng &rng)
{
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform(Rng &rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

// Circularly symmetric complex Gaussian with E|z|^2 = variance (Box-Muller).
inline cx complex_gaussian(Rng &rng, double variance = 1.0)
{
    const double r = std::sqrt(-std::log(uniform01_open(rng)) * variance);
    const double phi = 2.0 * kPi * uniform01(rng);
    return {r * std::cos(phi), r * std::sin(phi)};
}

// Zero-mean Laplacian with scale b.
inline double laplacian(Rng &rng, double scale)
{
    const double u = uniform01(rng) - 0.5;
    const double mag = -std::log1p(-2.0 * std::abs(u));
    return u < 0 ? -scale * mag : scale * mag;
}

inline CMatrix random_gaussian(Index rows, Index cols, Rng &rng, double variance = 1.0)
{
    CMatrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r)
            m(r, c) = complex_gaussian(rng, variance);
    return m;
}

// m x n matrix with orthonormal columns (thin Q of a complex Gaussian matrix).
inline CMatrix random_para_unitary(Index m, Index n, Rng &rng)
{
    if (n < 1 || m < n)
        throw DimensionError("random_para_unitary: need m >= n >= 1, got m=" + std::to_string(m) +
                             " n=" + std::to_string(n));
    const CMatrix g = random_gaussian(m, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    return qr.householderQ() * CMatrix::Identity(m, n);
}

// Random Hermitian matrix with i.i.d. Gaussian upper triangle.
inline CMatrix random_hermitian(Index n, Rng &rng)
{
    const CMatrix g = random_gaussian(n, n, rng);
    return 0.5 * (g + g.adjoint());
}

// Matrix of unit-modulus phase factors e^{j arg(x)}; a zero entry maps to 1.
inline CMatrix unit_modulus(const CMatrix &x)
{
    CMatrix out(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c)
        for (Index r = 0; r < x.rows(); ++r)
        {
            const cx v = x(r, c);
            out(r, c) = (v == cx{0.0, 0.0}) ? cx{1.0, 0.0} : std::polar(1.0, std::arg(v));
        }
    return out;
}

// Uniform random phases on [0, 2 pi).
inline CMatrix random_phases(Index rows, Index cols, Rng &rng)
{
    CMatrix out(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r)
            out(r, c) = std::polar(1.0, 2.0 * kPi * uniform01(rng));
    return out;
}

inline double relative_difference(double a, double b)
{
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

} // namespace schbf
