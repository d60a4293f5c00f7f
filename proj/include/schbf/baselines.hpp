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

// Reference transceivers for comparison with the EVD hybrid design.
//
//   ifd            per-tone SVD precoder with equal power per stream and tone,
//                  full-digital MMSE combiner (ignores the single-carrier
//                  PAPR constraint; benchmark only)
//   fd-strongest   one wideband full-digital precoder spanning the transmit
//                  steering vectors of the Ns strongest rays
//   hbf-strongest  analog beams steered at the N_RF strongest rays, trace
//                  normalized digital precoder, per-tone MMSE combiners
//
// The two strongest-path schemes are approximations of conventional
// single-path designs, not reimplementations of any specific published one.

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "hbf.hpp"

namespace schbf
{

enum class Scheme
{
    evd_hbf,
    ifd,
    fd_strongest,
    hbf_strongest
};

inline constexpr std::string_view scheme_name(Scheme s)
{
    switch (s)
    {
    case Scheme::evd_hbf: return "evd-hbf";
    case Scheme::ifd: return "ifd";
    case Scheme::fd_strongest: return "fd-strongest";
    case Scheme::hbf_strongest: return "hbf-strongest";
    }
    return "unknown";
}

inline constexpr std::string_view valid_scheme_names = "evd-hbf, ifd, fd-strongest, hbf-strongest";

inline std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (auto s : {Scheme::evd_hbf, Scheme::ifd, Scheme::fd_strongest, Scheme::hbf_strongest})
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

struct BaselineSolution
{
    Scheme scheme = Scheme::ifd;
    std::vector<CMatrix> precoders; // N per-tone (ifd) or one wideband, Nt x Ns
    CMatrix v_rf;                   // hbf-strongest only
    CMatrix v_d;                    // hbf-strongest only
    double gamma = 0.0;             // hbf-strongest only
    CMatrix w_rf;                   // analog combiner; identity for full-digital schemes
    std::vector<CMatrix> w_d;       // per-tone digital combiners
};

inline Transceiver transceiver(const BaselineSolution &b)
{
    return {b.precoders, b.w_rf, b.w_d};
}

// Rays sorted by decreasing |gain|; equal gains keep (cluster, ray) order.
inline std::vector<Ray> strongest_rays(const ClusterRayChannel &ch)
{
    std::vector<Ray> rays;
    for (const auto &cl : ch.clusters)
        rays.insert(rays.end(), cl.rays.begin(), cl.rays.end());
    std::stable_sort(rays.begin(), rays.end(),
                     [](const Ray &a, const Ray &b) { return std::abs(a.gain) > std::abs(b.gain); });
    return rays;
}

inline BaselineSolution ifd_solution(const ChannelFrequencyResponse &h, const SystemConfig &sys)
{
    detail::check_system(h, sys);
    BaselineSolution out;
    out.scheme = Scheme::ifd;
    out.w_rf = CMatrix::Identity(sys.n_rx, sys.n_rx);
    const CMatrix eye_tx = CMatrix::Identity(sys.n_tx, sys.n_tx);
    const double scale = 1.0 / std::sqrt(static_cast<double>(sys.n_s));
    for (const auto &hk : h.tones)
    {
        Eigen::JacobiSVD<CMatrix> svd(hk, Eigen::ComputeThinV);
        CMatrix v = scale * svd.matrixV().leftCols(sys.n_s);
        out.w_d.push_back(digital_combiner(out.w_rf, hk, eye_tx, v, sys.noise_var));
        out.precoders.push_back(std::move(v));
    }
    return out;
}

inline BaselineSolution strongest_path_hbf(const ClusterRayChannel &ch, const ChannelFrequencyResponse &h,
                                           const SystemConfig &sys)
{
    detail::check_system(h, sys);
    const auto rays = strongest_rays(ch);
    if (rays.size() < static_cast<size_t>(sys.n_rf))
        throw ConfigError("hbf-strongest: channel has " + std::to_string(rays.size()) + " rays, need n_rf=" +
                          std::to_string(sys.n_rf));
    BaselineSolution out;
    out.scheme = Scheme::hbf_strongest;
    out.v_rf.resize(sys.n_tx, sys.n_rf);
    out.w_rf.resize(sys.n_rx, sys.n_rf);
    for (int i = 0; i < sys.n_rf; ++i)
    {
        const auto &r = rays[static_cast<size_t>(i)];
        out.v_rf.col(i) = unit_modulus(array_response(r.aod, sys.n_tx));
        out.w_rf.col(i) = unit_modulus(array_response(r.aoa, sys.n_rx));
    }
    const CMatrix v_u = CMatrix::Identity(sys.n_rf, sys.n_s);
    auto digital = normalize_digital_precoder(out.v_rf, v_u);
    out.v_d = std::move(digital.v_d);
    out.gamma = digital.gamma;
    out.precoders = {out.v_rf * out.v_d};
    out.w_d = digital_combiners(out.w_rf, h, out.v_rf, out.v_d, sys.noise_var);
    return out;
}

inline BaselineSolution strongest_path_fd(const ClusterRayChannel &ch, const ChannelFrequencyResponse &h,
                                          const SystemConfig &sys)
{
    detail::check_system(h, sys);
    const auto rays = strongest_rays(ch);
    if (rays.size() < static_cast<size_t>(sys.n_s))
        throw ConfigError("fd-strongest: channel has " + std::to_string(rays.size()) + " rays, need n_s=" +
                          std::to_string(sys.n_s));
    CMatrix steering(sys.n_tx, sys.n_s);
    for (int i = 0; i < sys.n_s; ++i)
        steering.col(i) = array_response(rays[static_cast<size_t>(i)].aod, sys.n_tx);
    Eigen::HouseholderQR<CMatrix> qr(steering);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(sys.n_tx, sys.n_s);

    BaselineSolution out;
    out.scheme = Scheme::fd_strongest;
    out.precoders = {q / std::sqrt(static_cast<double>(sys.n_s))};
    out.w_rf = CMatrix::Identity(sys.n_rx, sys.n_rx);
    out.w_d = digital_combiners(out.w_rf, h, CMatrix::Identity(sys.n_tx, sys.n_tx), out.precoders.front(),
                                sys.noise_var);
    return out;
}

} // namespace schbf
