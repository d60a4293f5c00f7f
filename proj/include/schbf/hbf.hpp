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

// MMSE hybrid analog/digital beamforming for single-carrier broadband links.
//
// Notation used throughout (all per tone k of an N-point block):
//   H_k    Nr x Nt channel frequency response
//   V_RF   Nt x N_RF analog precoder, unit-modulus entries
//   V_D    N_RF x Ns digital precoder, shared by all tones
//   W_RF   Nr x N_RF analog combiner, unit-modulus entries
//   W_D,k  N_RF x Ns digital combiner of tone k
//   A      (W_RF^H W_RF)^{-1}
//   B_k    W_RF^H H_k V_RF V_D
//   C_k    W_RF^H H_k V_RF
//
// The solver alternates closed-form EVD updates of V_RF and W_RF, then
// picks the unitary part of V_D, normalizes transmit power and computes the
// per-tone MMSE combiners.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"
#include "numerics.hpp"

namespace schbf
{

inline double noise_var_from_snr_db(double snr_db)
{
    return std::pow(10.0, -snr_db / 10.0);
}

struct SystemConfig
{
    int n_tx = 16;
    int n_rx = 16;
    int n_rf = 2;
    int n_s = 2;
    int block_len = 64; // N
    double noise_var = 1.0;

    double snr_db() const { return -10.0 * std::log10(noise_var); }

    void set_snr_db(double snr) { noise_var = noise_var_from_snr_db(snr); }

    void validate() const
    {
        if (n_s < 1)
            throw ConfigError("system: n_s must be >= 1");
        if (n_rf < n_s)
            throw ConfigError("system: n_rf (" + std::to_string(n_rf) + ") must be >= n_s (" +
                              std::to_string(n_s) + ")");
        if (std::min(n_tx, n_rx) < n_rf)
            throw ConfigError("system: min(n_tx, n_rx) must be >= n_rf");
        if (block_len < 1)
            throw ConfigError("system: block_len must be >= 1");
        if (!(noise_var > 0.0) || !std::isfinite(noise_var))
            throw ConfigError("system: noise_var must be positive and finite");
    }
};

struct HbfSolution
{
    CMatrix v_rf;              // Nt x N_RF
    CMatrix v_d;               // N_RF x Ns
    CMatrix w_rf;              // Nr x N_RF
    std::vector<CMatrix> w_d;  // N of N_RF x Ns
    double gamma = 0.0;
    CMatrix v_u;               // N_RF x Ns, V_D = sqrt(gamma) V_U
};

// Starting point of the alternating minimization. Only W_RF,0 influences
// the iterates (the first step recomputes V_RF from it).
enum class SolverInit
{
    covariance, // phases of the dominant eigenvectors of sum_k H_k H_k^H
    random      // i.i.d. uniform phases from `seed`
};

inline const char *to_string(SolverInit i)
{
    return i == SolverInit::covariance ? "covariance" : "random";
}

struct SolverConfig
{
    int max_iters = 50;
    double rel_tol = 1e-4;
    std::uint64_t seed = 1;
    SolverInit init = SolverInit::covariance;

    void validate() const
    {
        if (max_iters < 1)
            throw ConfigError("solver: max_iters must be >= 1");
        if (!(rel_tol > 0.0))
            throw ConfigError("solver: rel_tol must be > 0");
    }
};

enum class StopReason
{
    tolerance,
    max_iters
};

inline const char *to_string(StopReason r)
{
    return r == StopReason::tolerance ? "tolerance" : "max_iters";
}

struct SolverDiagnostics
{
    double initial_objective = 0.0;       // sum-MSE at the random initialization
    std::vector<double> objective_trace;  // sum-MSE after each outer iteration
    double lower_bound = 0.0;             // J_L at the returned solution
    int iterations = 0;
    StopReason stop_reason = StopReason::max_iters;
    int objective_increases = 0;          // iterations where J went up (not an error)
};

struct HbfResult
{
    HbfSolution solution;
    SolverDiagnostics diagnostics;
};

// Generic linear transceiver: frequency-flat or per-tone precoder, analog
// combiner (identity for full-digital receivers) and per-tone digital combiners.
struct Transceiver
{
    std::vector<CMatrix> precoders;          // 1 (flat) or N entries, Nt x Ns
    CMatrix analog_combiner;                 // Nr x N_RF
    std::vector<CMatrix> digital_combiners;  // N entries, N_RF x Ns

    bool frequency_flat() const { return precoders.size() == 1; }
    const CMatrix &precoder(size_t k) const { return frequency_flat() ? precoders.front() : precoders[k]; }
    Index n_streams() const { return precoders.front().cols(); }
};

inline Transceiver transceiver(const HbfSolution &s)
{
    return {{s.v_rf * s.v_d}, s.w_rf, s.w_d};
}

namespace detail
{
inline void require_tones(const ChannelFrequencyResponse &h, const char *what)
{
    if (h.tones.empty())
        throw DimensionError(std::string(what) + ": empty channel frequency response");
}

inline void require_rows(const CMatrix &m, Index rows, const char *what, const char *name)
{
    if (m.rows() != rows)
        throw DimensionError(std::string(what) + ": " + name + " has " + std::to_string(m.rows()) +
                             " rows, expected " + std::to_string(rows));
}

// tr(X^{-1}) for a Hermitian positive definite X.
inline double trace_inverse_hpd(const CMatrix &x)
{
    Eigen::LLT<CMatrix> llt(x);
    if (llt.info() != Eigen::Success)
        return inverse(x).trace().real();
    return llt.solve(CMatrix::Identity(x.rows(), x.cols())).trace().real();
}
} // namespace detail

// A = (W_RF^H W_RF)^{-1}.
inline CMatrix combiner_gram_inverse(const CMatrix &w_rf)
{
    return inverse(w_rf.adjoint() * w_rf);
}

// C_k = W_RF^H H_k V_RF.
inline CMatrix effective_channel(const CMatrix &w_rf, const CMatrix &h_k, const CMatrix &v_rf)
{
    return w_rf.adjoint() * h_k * v_rf;
}

// Per-tone MMSE combiner W_D,k = (B_k B_k^H + sigma^2 A^{-1})^{-1} B_k.
inline CMatrix digital_combiner(const CMatrix &w_rf, const CMatrix &h_k, const CMatrix &v_rf,
                                const CMatrix &v_d, double noise_var)
{
    if (h_k.rows() != w_rf.rows() || h_k.cols() != v_rf.rows() || v_rf.cols() != v_d.rows())
        throw DimensionError("digital_combiner: inconsistent dimensions W_RF " + shape_str(w_rf) +
                             ", H " + shape_str(h_k) + ", V_RF " + shape_str(v_rf) + ", V_D " +
                             shape_str(v_d));
    const CMatrix b = w_rf.adjoint() * h_k * v_rf * v_d;
    const CMatrix gram = w_rf.adjoint() * w_rf; // A^{-1}
    return inverse(b * b.adjoint() + noise_var * gram) * b;
}

// Per-tone contributions ||I - G_k||_F^2 + sigma^2 ||W_RF W_D,k||_F^2.
inline std::vector<double> per_tone_mse(const Transceiver &t, const ChannelFrequencyResponse &h,
                                        double noise_var)
{
    detail::require_tones(h, "sum_mse");
    if (t.digital_combiners.size() != h.size() || (!t.frequency_flat() && t.precoders.size() != h.size()))
        throw DimensionError("sum_mse: transceiver does not cover all " + std::to_string(h.size()) + " tones");
    std::vector<double> out;
    out.reserve(h.size());
    const Index ns = t.n_streams();
    for (size_t k = 0; k < h.size(); ++k)
    {
        const CMatrix w = t.analog_combiner * t.digital_combiners[k];
        const CMatrix g = w.adjoint() * h[k] * t.precoder(k);
        out.push_back((CMatrix::Identity(ns, ns) - g).squaredNorm() + noise_var * w.squaredNorm());
    }
    return out;
}

// J = (1/N) sum_k (||I - G_k||_F^2 + sigma^2 ||W_RF W_D,k||_F^2).
inline double sum_mse(const Transceiver &t, const ChannelFrequencyResponse &h, double noise_var)
{
    const auto per_tone = per_tone_mse(t, h, noise_var);
    double j = 0.0;
    for (double v : per_tone)
        j += v;
    return j / static_cast<double>(per_tone.size());
}

inline double sum_mse(const HbfSolution &s, const ChannelFrequencyResponse &h, double noise_var)
{
    return sum_mse(transceiver(s), h, noise_var);
}

// Sum-MSE with the MMSE combiners substituted:
// J = (1/N) sum_k tr((1/sigma^2) B_k^H A B_k + I)^{-1}.
inline double reduced_mse(const CMatrix &v_rf, const CMatrix &w_rf, const CMatrix &v_d,
                          const ChannelFrequencyResponse &h, double noise_var)
{
    detail::require_tones(h, "reduced_mse");
    const CMatrix a = combiner_gram_inverse(w_rf);
    const Index ns = v_d.cols();
    double j = 0.0;
    for (const auto &hk : h.tones)
    {
        const CMatrix b = w_rf.adjoint() * hk * v_rf * v_d;
        j += detail::trace_inverse_hpd(b.adjoint() * a * b / noise_var + CMatrix::Identity(ns, ns));
    }
    return j / static_cast<double>(h.size());
}

// J = (1/N) sum_k tr((gamma/sigma^2) C_k^H A C_k + I)^{-1}; equals reduced_mse
// when N_RF = Ns and V_D = sqrt(gamma) x unitary.
inline double objective_ck(const CMatrix &v_rf, const CMatrix &w_rf, double gamma,
                           const ChannelFrequencyResponse &h, double noise_var)
{
    detail::require_tones(h, "objective_ck");
    const CMatrix a = combiner_gram_inverse(w_rf);
    const Index nrf = v_rf.cols();
    double j = 0.0;
    for (const auto &hk : h.tones)
    {
        const CMatrix c = effective_channel(w_rf, hk, v_rf);
        j += detail::trace_inverse_hpd((gamma / noise_var) * c.adjoint() * a * c +
                                       CMatrix::Identity(nrf, nrf));
    }
    return j / static_cast<double>(h.size());
}

// Analog design objective with W_RF^H W_RF = Nr I assumed:
// (1/N) sum_k tr((gamma/(Nr sigma^2)) C_k^H C_k + I)^{-1}.
inline double analog_objective(const CMatrix &v_rf, const CMatrix &w_rf, double gamma,
                               const ChannelFrequencyResponse &h, double noise_var)
{
    detail::require_tones(h, "analog_objective");
    const double c_scale = gamma / (static_cast<double>(h.n_rx()) * noise_var);
    const Index nrf = v_rf.cols();
    double j = 0.0;
    for (const auto &hk : h.tones)
    {
        const CMatrix c = effective_channel(w_rf, hk, v_rf);
        j += detail::trace_inverse_hpd(c_scale * c.adjoint() * c + CMatrix::Identity(nrf, nrf));
    }
    return j / static_cast<double>(h.size());
}

// Scale of the signal term in M_k and M'_k. The analog objective is
// written for constant-modulus matrices with V_RF^H V_RF = Nt I and
// W_RF^H W_RF = Nr I; the EVD works on the isometries R = V_RF/sqrt(Nt) and
// Q = W_RF/sqrt(Nr), so the factor absorbed from the fixed side differs:
//   precoder: tr((g/(Nr s2)) C^H C + I)^{-1} = tr(R^H M_k R)^{-1},
//             M_k  = (g Nt/(Nr s2)) H_k^H W_RF W_RF^H H_k + I_Nt
//   combiner: tr((g/(Nr s2)) C C^H + I)^{-1} = tr(Q^H M'_k Q)^{-1},
//             M'_k = (g/s2) H_k V_RF V_RF^H H_k^H + I_Nr
inline double mk_precoder_scale(double gamma, double noise_var, Index n_tx, Index n_rx)
{
    return gamma * static_cast<double>(n_tx) / (static_cast<double>(n_rx) * noise_var);
}

inline double mk_combiner_scale(double gamma, double noise_var)
{
    return gamma / noise_var;
}

inline CMatrix build_mk_precoder(const CMatrix &w_rf, const CMatrix &h_k, double gamma, double noise_var)
{
    detail::require_rows(w_rf, h_k.rows(), "build_mk_precoder", "W_RF");
    const CMatrix g = h_k.adjoint() * w_rf;
    const double c = mk_precoder_scale(gamma, noise_var, h_k.cols(), h_k.rows());
    return c * g * g.adjoint() + CMatrix::Identity(h_k.cols(), h_k.cols());
}

inline CMatrix build_mk_combiner(const CMatrix &v_rf, const CMatrix &h_k, double gamma, double noise_var)
{
    detail::require_rows(v_rf, h_k.cols(), "build_mk_combiner", "V_RF");
    const CMatrix g = h_k * v_rf;
    return mk_combiner_scale(gamma, noise_var) * g * g.adjoint() + CMatrix::Identity(h_k.rows(), h_k.rows());
}

namespace detail
{
// sum_k (I + c G_k G_k^H)^{-1} via the Woodbury identity; G_k is tall and thin.
template <class GFn>
CMatrix sum_inverse_low_rank_update(size_t n_tones, Index dim, double c, GFn &&g_of)
{
    CMatrix s = CMatrix::Identity(dim, dim) * static_cast<double>(n_tones);
    for (size_t k = 0; k < n_tones; ++k)
    {
        const CMatrix g = g_of(k);
        const CMatrix core = CMatrix::Identity(g.cols(), g.cols()) + c * g.adjoint() * g;
        s.noalias() -= c * g * core.llt().solve(g.adjoint());
    }
    return 0.5 * (s + s.adjoint());
}
} // namespace detail

// sum_k M_k^{-1} for the precoder update (Nt x Nt).
inline CMatrix sum_inverse_mk_precoder(const CMatrix &w_rf, const ChannelFrequencyResponse &h, double gamma,
                                       double noise_var)
{
    detail::require_tones(h, "sum_inverse_mk_precoder");
    detail::require_rows(w_rf, h.n_rx(), "sum_inverse_mk_precoder", "W_RF");
    const double c = mk_precoder_scale(gamma, noise_var, h.n_tx(), h.n_rx());
    return detail::sum_inverse_low_rank_update(h.size(), h.n_tx(), c,
                                               [&](size_t k) -> CMatrix { return h[k].adjoint() * w_rf; });
}

// sum_k M'_k^{-1} for the combiner update (Nr x Nr).
inline CMatrix sum_inverse_mk_combiner(const CMatrix &v_rf, const ChannelFrequencyResponse &h, double gamma,
                                       double noise_var)
{
    detail::require_tones(h, "sum_inverse_mk_combiner");
    detail::require_rows(v_rf, h.n_tx(), "sum_inverse_mk_combiner", "V_RF");
    const double c = mk_combiner_scale(gamma, noise_var);
    return detail::sum_inverse_low_rank_update(h.size(), h.n_rx(), c,
                                               [&](size_t k) -> CMatrix { return h[k] * v_rf; });
}

// Orthonormal eigenvectors of the n smallest eigenvalues (ties in EVD order).
inline CMatrix smallest_eigenvectors(const CMatrix &s, Index n)
{
    if (n < 1 || n > s.rows())
        throw DimensionError("smallest_eigenvectors: cannot select " + std::to_string(n) + " of " +
                             std::to_string(s.rows()) + " eigenvectors");
    return hermitian_eig(s).eigenvectors.leftCols(n);
}

// Result of one EVD analog update: the minimizing isometry before phase
// extraction, and the constant-modulus matrix actually used.
struct AnalogUpdate
{
    CMatrix isometry;
    CMatrix analog;
};

inline AnalogUpdate analog_precoder_step(const CMatrix &w_rf, const ChannelFrequencyResponse &h, double gamma,
                                         double noise_var)
{
    const CMatrix s = sum_inverse_mk_precoder(w_rf, h, gamma, noise_var);
    CMatrix r = smallest_eigenvectors(s, w_rf.cols());
    // sqrt(Nt) scaling does not change the extracted phases.
    CMatrix v = unit_modulus(std::sqrt(static_cast<double>(h.n_tx())) * r);
    return {std::move(r), std::move(v)};
}

inline AnalogUpdate analog_combiner_step(const CMatrix &v_rf, const ChannelFrequencyResponse &h, double gamma,
                                         double noise_var)
{
    const CMatrix s = sum_inverse_mk_combiner(v_rf, h, gamma, noise_var);
    CMatrix r = smallest_eigenvectors(s, v_rf.cols());
    CMatrix w = unit_modulus(std::sqrt(static_cast<double>(h.n_rx())) * r);
    return {std::move(r), std::move(w)};
}

// V_RF from the smallest-eigenvalue eigenvectors of sum_k M_k^{-1}, phase-extracted.
inline CMatrix analog_precoder_update(const CMatrix &w_rf, const ChannelFrequencyResponse &h, double gamma,
                                      double noise_var)
{
    return analog_precoder_step(w_rf, h, gamma, noise_var).analog;
}

// W_RF by the same procedure applied to the receive side.
inline CMatrix analog_combiner_update(const CMatrix &v_rf, const ChannelFrequencyResponse &h, double gamma,
                                      double noise_var)
{
    return analog_combiner_step(v_rf, h, gamma, noise_var).analog;
}

// Objective of the unitary digital precoder problem:
// sum_k tr((gamma/(Nr sigma^2)) V_U^H C_k^H C_k V_U + I)^{-1}, averaged over tones.
inline double unitary_precoder_objective(const CMatrix &v_u, const CMatrix &v_rf, const CMatrix &w_rf,
                                         double gamma, const ChannelFrequencyResponse &h, double noise_var)
{
    detail::require_tones(h, "unitary_precoder_objective");
    const double c_scale = gamma / (static_cast<double>(h.n_rx()) * noise_var);
    const Index ns = v_u.cols();
    double j = 0.0;
    for (const auto &hk : h.tones)
    {
        const CMatrix cu = effective_channel(w_rf, hk, v_rf) * v_u;
        j += detail::trace_inverse_hpd(c_scale * cu.adjoint() * cu + CMatrix::Identity(ns, ns));
    }
    return j / static_cast<double>(h.size());
}

// sum_k ((gamma/(Nr sigma^2)) C_k^H C_k + I)^{-1}, the matrix whose smallest
// eigenvectors give V_U.
inline CMatrix sum_inverse_unitary_precoder(const CMatrix &v_rf, const CMatrix &w_rf, double gamma,
                                            const ChannelFrequencyResponse &h, double noise_var)
{
    detail::require_tones(h, "digital_precoder_unitary_update");
    const Index nrf = v_rf.cols();
    const double c_scale = gamma / (static_cast<double>(h.n_rx()) * noise_var);
    CMatrix s = CMatrix::Zero(nrf, nrf);
    for (const auto &hk : h.tones)
    {
        const CMatrix c = effective_channel(w_rf, hk, v_rf);
        const CMatrix x = c_scale * c.adjoint() * c + CMatrix::Identity(nrf, nrf);
        s += x.llt().solve(CMatrix::Identity(nrf, nrf));
    }
    return 0.5 * (s + s.adjoint());
}

// N_RF x Ns para-unitary V_U (no phase extraction).
inline CMatrix digital_precoder_unitary_update(const CMatrix &v_rf, const CMatrix &w_rf,
                                               const ChannelFrequencyResponse &h, double gamma, double noise_var,
                                               Index n_s)
{
    if (n_s < 1 || n_s > v_rf.cols())
        throw DimensionError("digital_precoder_unitary_update: need 1 <= Ns <= N_RF");
    return smallest_eigenvectors(sum_inverse_unitary_precoder(v_rf, w_rf, gamma, h, noise_var), n_s);
}

struct DigitalPrecoder
{
    CMatrix v_d;
    double gamma = 0.0;
};

// gamma = 1/tr(V_RF V_U V_U^H V_RF^H), V_D = sqrt(gamma) V_U.
inline DigitalPrecoder normalize_digital_precoder(const CMatrix &v_rf, const CMatrix &v_u)
{
    if (v_rf.cols() != v_u.rows())
        throw DimensionError("normalize_digital_precoder: V_RF " + shape_str(v_rf) + " and V_U " +
                             shape_str(v_u) + " do not chain");
    const double power = (v_rf * v_u).squaredNorm();
    if (!(power > 0.0))
        throw SingularityError("normalize_digital_precoder: zero transmit power");
    const double gamma = 1.0 / power;
    return {std::sqrt(gamma) * v_u, gamma};
}

// J_L = (1/N) sum_k (tr((gamma/sigma^2) C_k^H A C_k + I)^{-1} + Ns - N_RF).
inline double lower_bound_jl(const CMatrix &v_rf, const CMatrix &w_rf, double gamma,
                             const ChannelFrequencyResponse &h, double noise_var, Index n_s)
{
    if (n_s > v_rf.cols())
        throw DimensionError("lower_bound_jl: Ns exceeds N_RF");
    return objective_ck(v_rf, w_rf, gamma, h, noise_var) + static_cast<double>(n_s - v_rf.cols());
}

// gamma used inside the analog and unitary updates, 1/(Nt Ns).
inline double design_gamma(const SystemConfig &sys)
{
    return 1.0 / (static_cast<double>(sys.n_tx) * sys.n_s);
}

namespace detail
{
struct CompletedPrecoder
{
    CMatrix v_u;
    DigitalPrecoder digital;
};

inline CompletedPrecoder complete_precoder(const CMatrix &v_rf, const CMatrix &w_rf,
                                           const ChannelFrequencyResponse &h, const SystemConfig &sys)
{
    // N_RF = Ns: the objective does not depend on V_U, so V_U = I.
    CMatrix v_u = (sys.n_rf == sys.n_s)
                      ? CMatrix(CMatrix::Identity(sys.n_rf, sys.n_s))
                      : digital_precoder_unitary_update(v_rf, w_rf, h, design_gamma(sys), sys.noise_var, sys.n_s);
    auto digital = normalize_digital_precoder(v_rf, v_u);
    return {std::move(v_u), std::move(digital)};
}

inline void check_system(const ChannelFrequencyResponse &h, const SystemConfig &sys)
{
    sys.validate();
    require_tones(h, "solve_hbf");
    if (static_cast<int>(h.size()) != sys.block_len || h.n_rx() != sys.n_rx || h.n_tx() != sys.n_tx)
        throw DimensionError("solve_hbf: channel has " + std::to_string(h.size()) + " tones of " +
                             std::to_string(h.n_rx()) + "x" + std::to_string(h.n_tx()) +
                             ", system expects " + std::to_string(sys.block_len) + " of " +
                             std::to_string(sys.n_rx) + "x" + std::to_string(sys.n_tx));
}
} // namespace detail

// Per-tone MMSE combiners for a fixed transmitter.
inline std::vector<CMatrix> digital_combiners(const CMatrix &w_rf, const ChannelFrequencyResponse &h,
                                              const CMatrix &v_rf, const CMatrix &v_d, double noise_var)
{
    std::vector<CMatrix> out;
    out.reserve(h.size());
    for (const auto &hk : h.tones)
        out.push_back(digital_combiner(w_rf, hk, v_rf, v_d, noise_var));
    return out;
}

// Alternating-minimization EVD hybrid beamformer design.
inline HbfResult solve_hbf(const ChannelFrequencyResponse &h, const SystemConfig &sys, const SolverConfig &solver)
{
    detail::check_system(h, sys);
    solver.validate();

    const double gamma = design_gamma(sys);
    const double noise = sys.noise_var;

    Rng rng(solver.seed);
    CMatrix v_rf = random_phases(sys.n_tx, sys.n_rf, rng);
    CMatrix w_rf = random_phases(sys.n_rx, sys.n_rf, rng);
    if (solver.init == SolverInit::covariance)
    {
        CMatrix cov = CMatrix::Zero(sys.n_rx, sys.n_rx);
        for (const auto &hk : h.tones)
            cov.noalias() += hk * hk.adjoint();
        w_rf = unit_modulus(hermitian_eig(cov).eigenvectors.rightCols(sys.n_rf).rowwise().reverse());
    }

    auto evaluate = [&](const CMatrix &v, const CMatrix &w) {
        const auto done = detail::complete_precoder(v, w, h, sys);
        return reduced_mse(v, w, done.digital.v_d, h, noise);
    };

    SolverDiagnostics diag;
    diag.initial_objective = evaluate(v_rf, w_rf);
    double previous = diag.initial_objective;
    for (int i = 1; i <= solver.max_iters; ++i)
    {
        v_rf = analog_precoder_update(w_rf, h, gamma, noise);
        w_rf = analog_combiner_update(v_rf, h, gamma, noise);
        const double j = evaluate(v_rf, w_rf);
        diag.objective_trace.push_back(j);
        diag.iterations = i;
        if (j > previous)
            ++diag.objective_increases;
        const bool converged = std::abs(j - previous) < solver.rel_tol * std::abs(previous);
        previous = j;
        if (converged)
        {
            diag.stop_reason = StopReason::tolerance;
            break;
        }
    }

    auto done = detail::complete_precoder(v_rf, w_rf, h, sys);
    HbfSolution sol;
    sol.v_rf = std::move(v_rf);
    sol.w_rf = std::move(w_rf);
    sol.v_u = std::move(done.v_u);
    sol.gamma = done.digital.gamma;
    sol.v_d = std::move(done.digital.v_d);
    sol.w_d = digital_combiners(sol.w_rf, h, sol.v_rf, sol.v_d, noise);
    diag.lower_bound = lower_bound_jl(sol.v_rf, sol.w_rf, sol.gamma, h, noise, sys.n_s);
    return {std::move(sol), std::move(diag)};
}

} // namespace schbf
