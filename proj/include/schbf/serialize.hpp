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

// JSON documents for channel realizations and beamformer solutions.
//
// Matrix:  {"rows": R, "cols": C, "re": [...], "im": [...]}   (row-major)
// Channel: {"format": "schbf-channel/1",
//           "clusters": [{"delay": d, "rays": [{"gain": [re, im], "aod": rad, "aoa": rad}, ...]}, ...]}
// Solution documents are written by to_json(HbfResult) / to_json(BaselineSolution)
// and carry "format": "schbf-solution/1".

#include <string>

#include <json.hpp>

#include "baselines.hpp"
#include "channel.hpp"
#include "hbf.hpp"

namespace schbf
{

using Json = nlohmann::ordered_json;

inline constexpr const char *kChannelFormat = "schbf-channel/1";
inline constexpr const char *kSolutionFormat = "schbf-solution/1";

inline Json matrix_to_json(const CMatrix &m)
{
    Json re = Json::array(), im = Json::array();
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c)
        {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline CMatrix matrix_from_json(const Json &j)
{
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (rows < 0 || cols < 0 || re.size() != static_cast<size_t>(rows * cols) || im.size() != re.size())
        throw DimensionError("matrix_from_json: entry count does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    CMatrix m(rows, cols);
    size_t i = 0;
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c, ++i)
            m(r, c) = {re[i].get<double>(), im[i].get<double>()};
    return m;
}

inline Json matrices_to_json(const std::vector<CMatrix> &ms)
{
    Json a = Json::array();
    for (const auto &m : ms)
        a.push_back(matrix_to_json(m));
    return a;
}

inline Json channel_to_json(const ClusterRayChannel &ch)
{
    Json clusters = Json::array();
    for (const auto &cl : ch.clusters)
    {
        Json rays = Json::array();
        for (const auto &r : cl.rays)
            rays.push_back({{"gain", {r.gain.real(), r.gain.imag()}}, {"aod", r.aod}, {"aoa", r.aoa}});
        clusters.push_back({{"delay", cl.delay}, {"rays", rays}});
    }
    return {{"format", kChannelFormat}, {"clusters", clusters}};
}

inline ClusterRayChannel channel_from_json(const Json &j)
{
    if (j.value("format", std::string{}) != kChannelFormat)
        throw ConfigError(std::string("channel document: expected format ") + kChannelFormat);
    ClusterRayChannel ch;
    for (const auto &jc : j.at("clusters"))
    {
        Cluster cl;
        cl.delay = jc.at("delay").get<int>();
        for (const auto &jr : jc.at("rays"))
        {
            const auto &g = jr.at("gain");
            cl.rays.push_back({{g.at(0).get<double>(), g.at(1).get<double>()},
                               jr.at("aod").get<double>(),
                               jr.at("aoa").get<double>()});
        }
        ch.clusters.push_back(std::move(cl));
    }
    return ch;
}

inline Json diagnostics_to_json(const SolverDiagnostics &d)
{
    return {{"initial_objective", d.initial_objective},
            {"objective_trace", d.objective_trace},
            {"lower_bound", d.lower_bound},
            {"iterations", d.iterations},
            {"stop_reason", to_string(d.stop_reason)},
            {"objective_increases", d.objective_increases}};
}

inline Json to_json(const HbfResult &r)
{
    const auto &s = r.solution;
    return {{"format", kSolutionFormat},
            {"scheme", scheme_name(Scheme::evd_hbf)},
            {"gamma", s.gamma},
            {"V_RF", matrix_to_json(s.v_rf)},
            {"V_D", matrix_to_json(s.v_d)},
            {"V_U", matrix_to_json(s.v_u)},
            {"W_RF", matrix_to_json(s.w_rf)},
            {"W_D", matrices_to_json(s.w_d)},
            {"diagnostics", diagnostics_to_json(r.diagnostics)}};
}

inline Json to_json(const BaselineSolution &b)
{
    Json j = {{"format", kSolutionFormat}, {"scheme", scheme_name(b.scheme)}};
    if (b.scheme == Scheme::hbf_strongest)
    {
        j["gamma"] = b.gamma;
        j["V_RF"] = matrix_to_json(b.v_rf);
        j["V_D"] = matrix_to_json(b.v_d);
    }
    j["precoders"] = matrices_to_json(b.precoders);
    j["W_RF"] = matrix_to_json(b.w_rf);
    j["W_D"] = matrices_to_json(b.w_d);
    return j;
}

} // namespace schbf
