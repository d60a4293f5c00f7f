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

// Geometry-based cluster-ray mmWave MIMO channel with half-wavelength ULAs at
// both ends. Cluster delays are integer sample indices inside the cyclic
// prefix, so block transmission over the channel is exactly circular.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace schbf
{

struct ChannelModelConfig
{
    int n_clusters = 5;
    int n_rays = 10;
    int n_tx = 16;
    int n_rx = 16;
    double angle_spread = 10.0 * kPi / 180.0; // Laplacian scale [rad]
    int cp_length = 16;                       // delays are drawn from [0, cp_length - 1]
    std::uint64_t seed = 1;

    void validate() const
    {
        if (n_clusters < 1 || n_rays < 1)
            throw ConfigError("channel: need n_clusters >= 1 and n_rays >= 1");
        if (n_tx < 1 || n_rx < 1)
            throw ConfigError("channel: need n_tx >= 1 and n_rx >= 1");
        if (cp_length < 1)
            throw ConfigError("channel: cp_length must be >= 1");
        if (!(angle_spread > 0.0))
            throw ConfigError("channel: angle_spread must be > 0");
        if (n_clusters > cp_length)
            throw ConfigError("channel: cannot assign " + std::to_string(n_clusters) +
                              " distinct cluster delays inside a cyclic prefix of " +
                              std::to_string(cp_length) + " samples");
    }
};

struct Ray
{
    cx gain;
    double aod = 0.0; // departure angle [rad]
    double aoa = 0.0; // arrival angle [rad]
};

struct Cluster
{
    int delay = 0; // [samples]
    std::vector<Ray> rays;
};

struct ClusterRayChannel
{
    std::vector<Cluster> clusters;

    int max_delay() const
    {
        int d = 0;
        for (const auto &c : clusters)
            d = std::max(d, c.delay);
        return d;
    }

    size_t n_rays() const
    {
        size_t n = 0;
        for (const auto &c : clusters)
            n += c.rays.size();
        return n;
    }

    double total_power() const
    {
        double p = 0.0;
        for (const auto &c : clusters)
            for (const auto &r : c.rays)
                p += std::norm(r.gain);
        return p;
    }
};

struct ChannelTap
{
    int delay = 0;
    CMatrix matrix; // n_rx x n_tx
};

// Per-tone matrices H_k = sum_i H(tau_i) exp(-j 2 pi k tau_i / N).
struct ChannelFrequencyResponse
{
    std::vector<CMatrix> tones;

    size_t size() const { return tones.size(); }
    Index n_rx() const { return tones.empty() ? 0 : tones.front().rows(); }
    Index n_tx() const { return tones.empty() ? 0 : tones.front().cols(); }
    const CMatrix &operator[](size_t k) const { return tones[k]; }
};

// ULA steering vector, half-wavelength spacing, unit norm.
inline CVector array_response(double theta, Index n)
{
    if (n < 1)
        throw DimensionError("array_response: n must be >= 1");
    CVector a(n);
    const double phase = kPi * std::sin(theta);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index i = 0; i < n; ++i)
        a(i) = std::polar(scale, phase * static_cast<double>(i));
    return a;
}

inline ClusterRayChannel sample_channel(const ChannelModelConfig &cfg, Rng &rng)
{
    cfg.validate();
    const double gain_var = 1.0 / (static_cast<double>(cfg.n_clusters) * cfg.n_rays);

    // First cluster at delay 0, the rest without replacement from [1, L-1].
    std::vector<int> pool(static_cast<size_t>(cfg.cp_length - 1));
    std::iota(pool.begin(), pool.end(), 1);
    std::vector<int> delays{0};
    for (int i = 1; i < cfg.n_clusters; ++i)
    {
        const size_t remaining = pool.size() - static_cast<size_t>(i - 1);
        const size_t pick = static_cast<size_t>(i - 1) +
                            static_cast<size_t>(uniform01(rng) * static_cast<double>(remaining));
        std::swap(pool[static_cast<size_t>(i - 1)], pool[pick]);
        delays.push_back(pool[static_cast<size_t>(i - 1)]);
    }

    ClusterRayChannel ch;
    ch.clusters.reserve(static_cast<size_t>(cfg.n_clusters));
    for (int i = 0; i < cfg.n_clusters; ++i)
    {
        Cluster cl;
        cl.delay = delays[static_cast<size_t>(i)];
        const double aod_center = uniform(rng, -kPi / 2, kPi / 2);
        const double aoa_center = uniform(rng, -kPi / 2, kPi / 2);
        cl.rays.reserve(static_cast<size_t>(cfg.n_rays));
        for (int j = 0; j < cfg.n_rays; ++j)
        {
            Ray r;
            r.gain = complex_gaussian(rng, gain_var);
            r.aod = aod_center + laplacian(rng, cfg.angle_spread);
            r.aoa = aoa_center + laplacian(rng, cfg.angle_spread);
            cl.rays.push_back(r);
        }
        ch.clusters.push_back(std::move(cl));
    }
    return ch;
}

inline ClusterRayChannel sample_channel(const ChannelModelConfig &cfg)
{
    Rng rng(cfg.seed);
    return sample_channel(cfg, rng);
}

// One matrix per cluster: H(tau_i) = sqrt(Nt Nr) sum_j alpha_ij a_r a_t^H.
inline std::vector<ChannelTap> tap_matrices(const ClusterRayChannel &ch, Index n_tx, Index n_rx)
{
    if (n_tx < 1 || n_rx < 1)
        throw DimensionError("tap_matrices: array sizes must be >= 1");
    const double scale = std::sqrt(static_cast<double>(n_tx * n_rx));
    std::vector<ChannelTap> taps;
    for (const auto &cl : ch.clusters)
    {
        CMatrix h = CMatrix::Zero(n_rx, n_tx);
        for (const auto &r : cl.rays)
            h.noalias() += (scale * r.gain) * array_response(r.aoa, n_rx) *
                           array_response(r.aod, n_tx).adjoint();
        // Clusters sharing a delay collapse into one tap.
        auto it = std::find_if(taps.begin(), taps.end(),
                               [&](const ChannelTap &t) { return t.delay == cl.delay; });
        if (it != taps.end())
            it->matrix += h;
        else
            taps.push_back({cl.delay, std::move(h)});
    }
    return taps;
}

inline ChannelFrequencyResponse frequency_response(const std::vector<ChannelTap> &taps, Index n)
{
    if (n < 1)
        throw DimensionError("frequency_response: block length must be >= 1");
    if (taps.empty())
        throw DimensionError("frequency_response: no taps");
    for (const auto &t : taps)
        if (t.delay < 0 || t.delay >= n)
            throw DimensionError("frequency_response: delay " + std::to_string(t.delay) +
                                 " outside [0, " + std::to_string(n - 1) + "]");
    ChannelFrequencyResponse out;
    out.tones.reserve(static_cast<size_t>(n));
    for (Index k = 0; k < n; ++k)
    {
        CMatrix hk = CMatrix::Zero(taps.front().matrix.rows(), taps.front().matrix.cols());
        for (const auto &t : taps)
        {
            // Reduce k * delay mod N before forming the angle.
            const auto m = (k * t.delay) % n;
            hk += std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / static_cast<double>(n)) * t.matrix;
        }
        out.tones.push_back(std::move(hk));
    }
    return out;
}

// Tap-domain energy sum_i ||H(tau_i)||_F^2.
inline double tap_energy(const std::vector<ChannelTap> &taps)
{
    double e = 0.0;
    for (const auto &t : taps)
        e += t.matrix.squaredNorm();
    return e;
}

// Tone-domain energy (1/N) sum_k ||H_k||_F^2.
inline double mean_tone_energy(const ChannelFrequencyResponse &h)
{
    double e = 0.0;
    for (const auto &hk : h.tones)
        e += hk.squaredNorm();
    return h.tones.empty() ? 0.0 : e / static_cast<double>(h.tones.size());
}

} // namespace schbf
