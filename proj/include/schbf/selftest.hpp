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

// Randomized invariant suites over the whole library. Each suite draws its
// instances from a seeded generator and reports the worst observed margin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "channel.hpp"
#include "hbf.hpp"
#include "link.hpp"
#include "numerics.hpp"

namespace schbf::selftest
{

struct SuiteResult
{
    std::string name;
    bool passed = true;
    int instances = 0;
    int violations = 0;
    double worst = 0.0; // worst observed value of the suite's checked quantity
    std::string detail;
};

using CombinerFn = std::function<CMatrix(const CMatrix &, const CMatrix &, const CMatrix &, const CMatrix &, double)>;

inline CombinerFn default_combiner()
{
    return [](const CMatrix &w, const CMatrix &h, const CMatrix &v, const CMatrix &d, double s2) {
        return digital_combiner(w, h, v, d, s2);
    };
}

// Random hybrid system with a cluster-ray channel and arbitrary (not
// optimized) beamformers.
struct RandomSystem
{
    SystemConfig sys;
    ClusterRayChannel geometry;
    std::vector<ChannelTap> taps;
    ChannelFrequencyResponse freq;
    CMatrix v_rf, w_rf, v_d;
    int cp_len = 0;
};

inline int uniform_int(Rng &rng, int lo, int hi)
{
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

inline RandomSystem random_system(Rng &rng, int max_antennas = 16, int block_len = 16, int n_rf = 0, int n_s = 0)
{
    RandomSystem r;
    r.sys.n_s = n_s > 0 ? n_s : uniform_int(rng, 1, 2);
    r.sys.n_rf = n_rf > 0 ? n_rf : uniform_int(rng, r.sys.n_s, r.sys.n_s + 2);
    r.sys.n_tx = uniform_int(rng, std::max(r.sys.n_rf, 4), max_antennas);
    r.sys.n_rx = uniform_int(rng, std::max(r.sys.n_rf, 4), max_antennas);
    r.sys.block_len = block_len;
    r.sys.noise_var = std::pow(10.0, uniform(rng, -2.0, 1.0));
    r.cp_len = std::max(1, block_len / 4);

    ChannelModelConfig c;
    c.n_clusters = std::min(3, r.cp_len);
    c.n_rays = 4;
    c.n_tx = r.sys.n_tx;
    c.n_rx = r.sys.n_rx;
    c.cp_length = r.cp_len;
    r.geometry = sample_channel(c, rng);
    r.taps = tap_matrices(r.geometry, c.n_tx, c.n_rx);
    r.freq = frequency_response(r.taps, block_len);

    r.v_rf = random_phases(r.sys.n_tx, r.sys.n_rf, rng);
    r.w_rf = random_phases(r.sys.n_rx, r.sys.n_rf, rng);
    r.v_d = normalize_digital_precoder(r.v_rf, random_gaussian(r.sys.n_rf, r.sys.n_s, rng)).v_d;
    return r;
}

inline void record(SuiteResult &s, bool ok)
{
    ++s.instances;
    if (!ok)
    {
        ++s.violations;
        s.passed = false;
    }
}

inline std::string summary(const SuiteResult &s)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d instances, %d violations, worst %.3e", s.instances, s.violations, s.worst);
    return buf + (s.detail.empty() ? std::string{} : "; " + s.detail);
}

// (R^H M R)^{-1} is dominated eigenvalue-wise by R^H M^{-1} R for Hermitian
// positive definite M and para-unitary R.
inline SuiteResult compressed_inverse_bound(int count = 200, std::uint64_t seed = 101)
{
    SuiteResult s;
    s.name = "compressed-inverse-eigenvalue-bound";
    Rng rng(seed);
    s.worst = -INFINITY;
    for (int i = 0; i < count; ++i)
    {
        const int m = uniform_int(rng, 2, 16);
        const int n = uniform_int(rng, 1, m - 1);
        const CMatrix g = random_gaussian(m, m, rng);
        const CMatrix mat = g.adjoint() * g + 1e-6 * CMatrix::Identity(m, m);
        const CMatrix r = random_para_unitary(m, n, rng);
        const RVector mu = hermitian_eig(inverse(r.adjoint() * mat * r)).eigenvalues;
        const RVector lambda = hermitian_eig(r.adjoint() * inverse(mat) * r).eigenvalues;
        const double excess = (mu - lambda).maxCoeff(); // must be <= 1e-9
        s.worst = std::max(s.worst, excess);
        record(s, excess <= 1e-9);
    }
    return s;
}

// Reduced objective equals the sum-MSE evaluated with the MMSE combiners.
inline SuiteResult substitution_identity(int count = 100, std::uint64_t seed = 102,
                                         const CombinerFn &combiner = default_combiner())
{
    SuiteResult s;
    s.name = "substitution-identity";
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
    {
        const auto r = random_system(rng);
        Transceiver t{{r.v_rf * r.v_d}, r.w_rf, {}};
        for (const auto &hk : r.freq.tones)
            t.digital_combiners.push_back(combiner(r.w_rf, hk, r.v_rf, r.v_d, r.sys.noise_var));
        const double full = sum_mse(t, r.freq, r.sys.noise_var);
        const double reduced = reduced_mse(r.v_rf, r.w_rf, r.v_d, r.freq, r.sys.noise_var);
        const double rel = relative_difference(full, reduced);
        s.worst = std::max(s.worst, rel);
        record(s, rel <= 1e-10);
    }
    return s;
}

// MMSE combiners are not improved by small random perturbations.
inline SuiteResult combiner_optimality(int count = 50, int perturbations = 100, std::uint64_t seed = 103)
{
    SuiteResult s;
    s.name = "combiner-local-optimality";
    Rng rng(seed);
    s.worst = INFINITY;
    for (int i = 0; i < count; ++i)
    {
        const auto r = random_system(rng);
        Transceiver t{{r.v_rf * r.v_d}, r.w_rf,
                      digital_combiners(r.w_rf, r.freq, r.v_rf, r.v_d, r.sys.noise_var)};
        const double best = sum_mse(t, r.freq, r.sys.noise_var);
        bool ok = true;
        for (int p = 0; p < perturbations; ++p)
        {
            Transceiver q = t;
            for (auto &w : q.digital_combiners)
            {
                const CMatrix d = random_gaussian(w.rows(), w.cols(), rng);
                w += 1e-3 * d / d.norm();
            }
            const double j = sum_mse(q, r.freq, r.sys.noise_var);
            s.worst = std::min(s.worst, j - best); // must stay >= 0
            ok = ok && j >= best;
        }
        record(s, ok);
    }
    return s;
}

// With N_RF = Ns and V_D = sqrt(gamma) x unitary, the reduced objective does
// not depend on the unitary factor.
inline SuiteResult equality_case_identity(int count = 50, std::uint64_t seed = 104)
{
    SuiteResult s;
    s.name = "equality-case-objective-identity";
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
    {
        const int ns = uniform_int(rng, 1, 3);
        const auto r = random_system(rng, 16, 16, ns, ns);
        const double gamma = uniform(rng, 0.2, 2.0) * design_gamma(r.sys);
        const CMatrix v_d = std::sqrt(gamma) * random_para_unitary(ns, ns, rng);
        const double a = reduced_mse(r.v_rf, r.w_rf, v_d, r.freq, r.sys.noise_var);
        const double b = objective_ck(r.v_rf, r.w_rf, gamma, r.freq, r.sys.noise_var);
        const double rel = relative_difference(a, b);
        s.worst = std::max(s.worst, rel);
        record(s, rel <= 1e-10);
    }
    return s;
}

// The EVD isometry minimizes tr(R^H S R) over para-unitary R.
inline SuiteResult evd_minimizer(int count = 20, int samples = 500, std::uint64_t seed = 105)
{
    SuiteResult s;
    s.name = "evd-minimizer-dominance";
    Rng rng(seed);
    s.worst = INFINITY;
    for (int i = 0; i < count; ++i)
    {
        const auto r = random_system(rng);
        const bool tx_side = (i % 2) == 0;
        const double gamma = design_gamma(r.sys);
        const CMatrix sum_inv = tx_side ? sum_inverse_mk_precoder(r.w_rf, r.freq, gamma, r.sys.noise_var)
                                        : sum_inverse_mk_combiner(r.v_rf, r.freq, gamma, r.sys.noise_var);
        const CMatrix iso = tx_side ? analog_precoder_step(r.w_rf, r.freq, gamma, r.sys.noise_var).isometry
                                    : analog_combiner_step(r.v_rf, r.freq, gamma, r.sys.noise_var).isometry;
        const double f_evd = (iso.adjoint() * sum_inv * iso).trace().real();
        bool ok = true;
        for (int k = 0; k < samples; ++k)
        {
            const CMatrix q = random_para_unitary(sum_inv.rows(), iso.cols(), rng);
            const double f = (q.adjoint() * sum_inv * q).trace().real();
            s.worst = std::min(s.worst, f - f_evd); // must stay >= -1e-9
            ok = ok && f_evd <= f + 1e-9;
        }
        record(s, ok);
    }
    return s;
}

// J_L never exceeds the reduced objective for V_D = sqrt(gamma) V_U.
inline SuiteResult lower_bound_validity(int count = 100, std::uint64_t seed = 106)
{
    SuiteResult s;
    s.name = "lower-bound-validity";
    Rng rng(seed);
    s.worst = -INFINITY;
    for (int i = 0; i < count; ++i)
    {
        const int nrf = 3 + (i % 2);
        auto r = random_system(rng, 16, 16, nrf, 2);
        const CMatrix v_u = random_para_unitary(nrf, 2, rng);
        const auto digital = normalize_digital_precoder(r.v_rf, v_u);
        const double j = reduced_mse(r.v_rf, r.w_rf, digital.v_d, r.freq, r.sys.noise_var);
        const double jl = lower_bound_jl(r.v_rf, r.w_rf, digital.gamma, r.freq, r.sys.noise_var, 2);
        s.worst = std::max(s.worst, jl - j); // must be <= 1e-9
        record(s, jl <= j + 1e-9);
    }
    return s;
}

// Noiseless time-domain chain with CP equals the per-tone model
// y_k = W_D,k^H W_RF^H H_k V_RF V_D s_k.
inline SuiteResult cp_equivalence(int count = 50, std::uint64_t seed = 107)
{
    SuiteResult s;
    s.name = "cp-frequency-domain-equivalence";
    Rng rng(seed);
    const QamConstellation qam(4);
    for (int i = 0; i < count; ++i)
    {
        const auto r = random_system(rng, 16, 32);
        std::vector<CMatrix> w_d;
        for (int k = 0; k < r.sys.block_len; ++k)
            w_d.push_back(random_gaussian(r.sys.n_rf, r.sys.n_s, rng));
        const auto frame = random_frame(r.sys.n_s, r.sys.block_len, qam, rng);
        const CMatrix tx = transmit_block(frame.symbols, r.v_rf, r.v_d, r.cp_len);
        const CMatrix rx = apply_channel(tx, r.taps, 0.0, rng, r.cp_len);
        const auto rec = receive_block(rx, r.w_rf, w_d, r.cp_len, r.sys.block_len);

        const CMatrix s_k = unitary_dft(frame.symbols);
        CMatrix ref(r.sys.n_s, r.sys.block_len);
        for (int k = 0; k < r.sys.block_len; ++k)
            ref.col(k) = w_d[static_cast<size_t>(k)].adjoint() * r.w_rf.adjoint() * r.freq[static_cast<size_t>(k)] *
                         r.v_rf * r.v_d * s_k.col(k);
        const double rel = (rec.freq - ref).norm() / ref.norm();
        s.worst = std::max(s.worst, rel);
        record(s, rel <= 1e-10);
    }
    return s;
}

// Monte Carlo time-domain MSE of the EVD design matches the analytic sum-MSE.
inline SuiteResult empirical_mse(int count = 10, std::uint64_t min_symbols = 100000, std::uint64_t seed = 108)
{
    SuiteResult s;
    s.name = "analytic-vs-empirical-mse";
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
    {
        auto r = random_system(rng, 16, 64, 2, 2);
        r.sys.noise_var = std::pow(10.0, uniform(rng, 0.5, 1.5)); // -15 .. -5 dB
        const auto sol = solve_hbf(r.freq, r.sys, {20, 1e-4, derive_seed(seed, {static_cast<std::uint64_t>(i)})});
        const Transceiver t = transceiver(sol.solution);
        const double analytic = sum_mse(t, r.freq, r.sys.noise_var);
        LinkConfig link;
        link.cp_len = r.cp_len;
        link.n_blocks = static_cast<int>((min_symbols + r.sys.block_len - 1) / r.sys.block_len);
        link.min_errors = 0;
        const auto sim = run_ber_point(r.sys, t, r.taps, link, derive_seed(seed, {1000 + static_cast<std::uint64_t>(i)}));
        const double rel = std::abs(sim.mse() - analytic) / analytic;
        s.worst = std::max(s.worst, rel);
        record(s, rel <= 0.03 && sim.symbol_vectors >= min_symbols);
    }
    return s;
}

// Constant modulus, para-unitarity and unit transmit power on solver outputs,
// plus exact gamma = 1/(Nt Ns) for orthogonal DFT analog precoders.
inline SuiteResult solution_invariants(int count = 20, std::uint64_t seed = 109)
{
    SuiteResult s;
    s.name = "solution-invariants";
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
    {
        const int ns = 1 + (i % 2);
        const int nrf = ns + (i % 3);
        const auto r = random_system(rng, 16, 16, nrf, ns);
        SolverConfig sc{30, 1e-4, derive_seed(seed, {static_cast<std::uint64_t>(i)}),
                        (i % 2) ? SolverInit::random : SolverInit::covariance};
        const auto sol = solve_hbf(r.freq, r.sys, sc).solution;
        double modulus = 0.0;
        for (const CMatrix *m : {&sol.v_rf, &sol.w_rf})
            modulus = std::max(modulus, (m->cwiseAbs().array() - 1.0).abs().maxCoeff());
        const double unitary = (sol.v_u.adjoint() * sol.v_u - CMatrix::Identity(ns, ns)).cwiseAbs().maxCoeff();
        const double power = std::abs((sol.v_rf * sol.v_d).squaredNorm() - 1.0);
        const double factor = (sol.v_d - std::sqrt(sol.gamma) * sol.v_u).cwiseAbs().maxCoeff();
        s.worst = std::max({s.worst, modulus, unitary, power});
        record(s, modulus <= 1e-12 && unitary <= 1e-10 && power <= 1e-9 && factor <= 1e-12);
    }
    // Orthogonal DFT columns satisfy V_RF^H V_RF = Nt I exactly.
    for (int nt : {4, 8, 16, 64})
        for (int ns : {1, 2, 3})
        {
            CMatrix v_rf(nt, ns);
            for (int r = 0; r < nt; ++r)
                for (int c = 0; c < ns; ++c)
                    v_rf(r, c) = std::polar(1.0, 2.0 * kPi * r * c / nt);
            const CMatrix v_u = random_para_unitary(ns, ns, rng);
            const double gamma = normalize_digital_precoder(v_rf, v_u).gamma;
            const double expected = 1.0 / (static_cast<double>(nt) * ns);
            const double rel = relative_difference(gamma, expected);
            s.worst = std::max(s.worst, rel);
            record(s, rel <= 1e-12);
        }
    return s;
}

// Runs every suite. `scale` in (0, 1] shrinks instance counts for quick runs.
inline std::vector<SuiteResult> run_all(double scale = 1.0)
{
    auto n = [scale](int full) { return std::max(1, static_cast<int>(std::lround(full * scale))); };
    std::vector<SuiteResult> out;
    out.push_back(compressed_inverse_bound(n(200)));
    out.push_back(substitution_identity(n(100)));
    out.push_back(combiner_optimality(n(50), 100));
    out.push_back(equality_case_identity(n(50)));
    out.push_back(evd_minimizer(n(20), 500));
    out.push_back(lower_bound_validity(n(100)));
    out.push_back(cp_equivalence(n(50)));
    out.push_back(empirical_mse(n(10)));
    out.push_back(solution_invariants(n(20)));
    return out;
}

} // namespace schbf::selftest
