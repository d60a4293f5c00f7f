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

// Batch BER experiments: config files, SNR and N_RF sweeps, CSV output.
//
// Seed tree below the root seed:
//   {0, t}     channel realization of trial t
//   {1, t}     solver seed of trial t
//   {2, t, p}  payload and noise of pass p over trial t (blocks below that)
// Channels, payloads and noise depend only on (trial, pass), so every scheme,
// SNR and N_RF value sees the same random draws.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "baselines.hpp"
#include "channel.hpp"
#include "hbf.hpp"
#include "link.hpp"

namespace schbf
{

inline constexpr const char *kCsvVersion = "schbf-results/1";
inline constexpr const char *kCsvColumns = "scheme,snr_db,n_rf,blocks,bits,errors,ber,mse,papr_p50_db,papr_p99_db";

enum class SweepKind
{
    snr,
    nrf
};

struct ExperimentConfig
{
    // system
    int n_tx = 16;
    int n_rx = 16;
    int n_rf = 2;
    int n_s = 2;
    int block_len = 64;
    int cp_len = 16;
    int qam_order = 4;
    // channel
    int n_clusters = 5;
    int n_rays = 10;
    double angle_spread_deg = 10.0;
    // solver
    int max_iters = 50;
    double rel_tol = 1e-4;
    SolverInit init = SolverInit::covariance;
    // experiment
    SweepKind sweep = SweepKind::snr;
    std::vector<Scheme> schemes{Scheme::evd_hbf, Scheme::ifd, Scheme::hbf_strongest, Scheme::fd_strongest};
    std::vector<double> snr_db{-20, -15, -10, -5, 0};
    std::vector<int> n_rf_list{2, 3, 4};
    double nrf_snr_db = -18.0;
    int trials = 20;
    int blocks_per_trial = 20;
    std::uint64_t min_errors = 100;
    int max_passes = 8;
    std::uint64_t seed = 1;

    SystemConfig system(int rf, double snr) const
    {
        SystemConfig s;
        s.n_tx = n_tx;
        s.n_rx = n_rx;
        s.n_rf = rf;
        s.n_s = n_s;
        s.block_len = block_len;
        s.set_snr_db(snr);
        return s;
    }

    ChannelModelConfig channel(std::uint64_t channel_seed) const
    {
        ChannelModelConfig c;
        c.n_clusters = n_clusters;
        c.n_rays = n_rays;
        c.n_tx = n_tx;
        c.n_rx = n_rx;
        c.angle_spread = angle_spread_deg * kPi / 180.0;
        c.cp_length = cp_len;
        c.seed = channel_seed;
        return c;
    }

    SolverConfig solver(std::uint64_t solver_seed) const { return {max_iters, rel_tol, solver_seed, init}; }

    LinkConfig link() const { return {cp_len, qam_order, blocks_per_trial, 0}; }

    void validate() const
    {
        if (schemes.empty())
            throw ConfigError("experiment: no schemes selected (valid: " + std::string(valid_scheme_names) + ")");
        if (trials < 1)
            throw ConfigError("experiment: trials must be >= 1");
        if (blocks_per_trial < 1)
            throw ConfigError("experiment: blocks_per_trial must be >= 1");
        if (max_passes < 1)
            throw ConfigError("experiment: max_passes must be >= 1");
        if (sweep == SweepKind::snr && snr_db.empty())
            throw ConfigError("experiment: snr_db sweep list is empty");
        if (sweep == SweepKind::nrf && n_rf_list.empty())
            throw ConfigError("experiment: n_rf_list sweep list is empty");
        for (int rf : n_rf_list)
            if (rf < n_s)
                throw ConfigError("experiment: n_rf_list entry " + std::to_string(rf) + " is below n_s=" +
                                  std::to_string(n_s));
        const std::vector<int> rfs = sweep == SweepKind::nrf ? n_rf_list : std::vector<int>{n_rf};
        for (int rf : rfs)
            system(rf, 0.0).validate();
        channel(0).validate();
        solver(0).validate();
        link().validate(block_len);
    }
};

namespace detail
{
inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string &v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string &key, const std::string &v)
{
    std::istringstream is(v);
    T x{};
    is >> x;
    if (is.fail() || !is.eof())
        throw ConfigError("config: invalid value '" + v + "' for key '" + key + "'");
    return x;
}

template <class T>
std::vector<T> parse_numbers(const std::string &key, const std::string &v)
{
    std::vector<T> out;
    for (const auto &item : split_list(v))
        out.push_back(parse_number<T>(key, item));
    return out;
}

inline std::string fmt_g(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_e(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

inline std::string fmt_f(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T> &xs, F &&f)
{
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i)
        out += (i ? ", " : "") + f(xs[i]);
    return out;
}
} // namespace detail

// Applies one `key = value` setting.
inline void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value)
{
    using detail::parse_number;
    using detail::parse_numbers;
    if (key == "n_tx") cfg.n_tx = parse_number<int>(key, value);
    else if (key == "n_rx") cfg.n_rx = parse_number<int>(key, value);
    else if (key == "n_rf") cfg.n_rf = parse_number<int>(key, value);
    else if (key == "n_s") cfg.n_s = parse_number<int>(key, value);
    else if (key == "block_len") cfg.block_len = parse_number<int>(key, value);
    else if (key == "cp_len") cfg.cp_len = parse_number<int>(key, value);
    else if (key == "qam_order") cfg.qam_order = parse_number<int>(key, value);
    else if (key == "n_clusters") cfg.n_clusters = parse_number<int>(key, value);
    else if (key == "n_rays") cfg.n_rays = parse_number<int>(key, value);
    else if (key == "angle_spread_deg") cfg.angle_spread_deg = parse_number<double>(key, value);
    else if (key == "max_iters") cfg.max_iters = parse_number<int>(key, value);
    else if (key == "rel_tol") cfg.rel_tol = parse_number<double>(key, value);
    else if (key == "init")
    {
        if (value == "covariance") cfg.init = SolverInit::covariance;
        else if (value == "random") cfg.init = SolverInit::random;
        else throw ConfigError("config: init must be 'covariance' or 'random', got '" + value + "'");
    }
    else if (key == "sweep")
    {
        if (value == "snr") cfg.sweep = SweepKind::snr;
        else if (value == "nrf") cfg.sweep = SweepKind::nrf;
        else throw ConfigError("config: sweep must be 'snr' or 'nrf', got '" + value + "'");
    }
    else if (key == "schemes")
    {
        cfg.schemes.clear();
        for (const auto &name : detail::split_list(value))
        {
            const auto s = parse_scheme(name);
            if (!s)
                throw ConfigError("config: unknown scheme '" + name + "' (valid: " +
                                  std::string(valid_scheme_names) + ")");
            cfg.schemes.push_back(*s);
        }
    }
    else if (key == "snr_db") cfg.snr_db = parse_numbers<double>(key, value);
    else if (key == "n_rf_list") cfg.n_rf_list = parse_numbers<int>(key, value);
    else if (key == "nrf_snr_db") cfg.nrf_snr_db = parse_number<double>(key, value);
    else if (key == "trials") cfg.trials = parse_number<int>(key, value);
    else if (key == "blocks_per_trial") cfg.blocks_per_trial = parse_number<int>(key, value);
    else if (key == "min_errors") cfg.min_errors = parse_number<std::uint64_t>(key, value);
    else if (key == "max_passes") cfg.max_passes = parse_number<int>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

// Flat `key = value` text; '#' starts a comment. Unset keys keep defaults.
inline ExperimentConfig parse_config(std::istream &in)
{
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

// Fully resolved configuration, in the same syntax parse_config reads.
inline std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig &c)
{
    using detail::fmt_g;
    auto i = [](auto x) { return std::to_string(x); };
    return {{"n_tx", i(c.n_tx)},
            {"n_rx", i(c.n_rx)},
            {"n_rf", i(c.n_rf)},
            {"n_s", i(c.n_s)},
            {"block_len", i(c.block_len)},
            {"cp_len", i(c.cp_len)},
            {"qam_order", i(c.qam_order)},
            {"n_clusters", i(c.n_clusters)},
            {"n_rays", i(c.n_rays)},
            {"angle_spread_deg", fmt_g(c.angle_spread_deg)},
            {"max_iters", i(c.max_iters)},
            {"rel_tol", fmt_g(c.rel_tol)},
            {"init", to_string(c.init)},
            {"sweep", c.sweep == SweepKind::snr ? "snr" : "nrf"},
            {"schemes", detail::join(c.schemes, [](Scheme s) { return std::string(scheme_name(s)); })},
            {"snr_db", detail::join(c.snr_db, [](double x) { return fmt_g(x); })},
            {"n_rf_list", detail::join(c.n_rf_list, [](int x) { return std::to_string(x); })},
            {"nrf_snr_db", fmt_g(c.nrf_snr_db)},
            {"trials", i(c.trials)},
            {"blocks_per_trial", i(c.blocks_per_trial)},
            {"min_errors", i(c.min_errors)},
            {"max_passes", i(c.max_passes)},
            {"seed", i(c.seed)}};
}

// Channel realization of one trial with its tap and tone representations.
struct TrialChannel
{
    ClusterRayChannel geometry;
    std::vector<ChannelTap> taps;
    ChannelFrequencyResponse freq;
};

inline TrialChannel trial_channel(const ExperimentConfig &cfg, int trial)
{
    const auto ccfg = cfg.channel(derive_seed(cfg.seed, {0, static_cast<std::uint64_t>(trial)}));
    TrialChannel t;
    t.geometry = sample_channel(ccfg);
    t.taps = tap_matrices(t.geometry, cfg.n_tx, cfg.n_rx);
    t.freq = frequency_response(t.taps, cfg.block_len);
    return t;
}

// Transceiver of `scheme` for one channel realization.
inline Transceiver design(Scheme scheme, const TrialChannel &ch, const SystemConfig &sys, const SolverConfig &solver)
{
    switch (scheme)
    {
    case Scheme::evd_hbf: return transceiver(solve_hbf(ch.freq, sys, solver).solution);
    case Scheme::ifd: return transceiver(ifd_solution(ch.freq, sys));
    case Scheme::fd_strongest: return transceiver(strongest_path_fd(ch.geometry, ch.freq, sys));
    case Scheme::hbf_strongest: return transceiver(strongest_path_hbf(ch.geometry, ch.freq, sys));
    }
    throw ConfigError("unknown scheme");
}

struct TrialRecord
{
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double analytic_mse = 0.0;

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(bits); }
};

struct PointResult
{
    Scheme scheme = Scheme::evd_hbf;
    double snr_db = 0.0;
    int n_rf = 0;
    SimulationResult total;
    std::vector<TrialRecord> trials;
    int passes = 0;
};

struct SweepResult
{
    ExperimentConfig config;
    std::vector<PointResult> points;

    const PointResult *find(Scheme s, double snr, int n_rf) const
    {
        for (const auto &p : points)
            if (p.scheme == s && p.snr_db == snr && p.n_rf == n_rf)
                return &p;
        return nullptr;
    }
};

// Linear interpolation between order statistics, q in [0, 1].
inline double percentile(std::vector<double> xs, double q)
{
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<size_t>(pos);
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double median(std::vector<double> xs)
{
    return percentile(std::move(xs), 0.5);
}

// One (scheme, SNR, N_RF) point. Runs whole passes over all trials until
// min_errors bit errors are collected or max_passes is reached, so every
// channel realization carries the same weight in the BER.
inline PointResult run_point(const ExperimentConfig &cfg, const std::vector<TrialChannel> &channels, Scheme scheme,
                             double snr, int n_rf)
{
    const SystemConfig sys = cfg.system(n_rf, snr);
    std::vector<Transceiver> designs;
    designs.reserve(channels.size());
    PointResult out;
    out.scheme = scheme;
    out.snr_db = snr;
    out.n_rf = n_rf;
    out.trials.resize(channels.size());
    for (size_t t = 0; t < channels.size(); ++t)
    {
        designs.push_back(design(scheme, channels[t], sys, cfg.solver(derive_seed(cfg.seed, {1, t}))));
        out.trials[t].analytic_mse = sum_mse(designs.back(), channels[t].freq, sys.noise_var);
    }
    const LinkConfig link = cfg.link();
    for (int p = 0; p < cfg.max_passes; ++p)
    {
        for (size_t t = 0; t < channels.size(); ++t)
        {
            const auto seed = derive_seed(cfg.seed, {2, t, static_cast<std::uint64_t>(p)});
            const auto r = run_ber_point(sys, designs[t], channels[t].taps, link, seed);
            out.trials[t].bits += r.bits;
            out.trials[t].errors += r.bit_errors;
            out.total.merge(r);
        }
        out.passes = p + 1;
        if (out.total.bit_errors >= cfg.min_errors)
            break;
    }
    return out;
}

inline std::vector<TrialChannel> trial_channels(const ExperimentConfig &cfg)
{
    std::vector<TrialChannel> channels;
    channels.reserve(static_cast<size_t>(cfg.trials));
    for (int t = 0; t < cfg.trials; ++t)
        channels.push_back(trial_channel(cfg, t));
    return channels;
}

inline SweepResult run_snr_sweep(const ExperimentConfig &cfg)
{
    cfg.validate();
    const auto channels = trial_channels(cfg);
    SweepResult out{cfg, {}};
    out.config.sweep = SweepKind::snr;
    for (double snr : cfg.snr_db)
        for (Scheme s : cfg.schemes)
            out.points.push_back(run_point(cfg, channels, s, snr, cfg.n_rf));
    return out;
}

inline SweepResult run_nrf_sweep(const ExperimentConfig &cfg)
{
    ExperimentConfig c = cfg;
    c.sweep = SweepKind::nrf;
    c.validate();
    const auto channels = trial_channels(c);
    SweepResult out{c, {}};
    for (int rf : c.n_rf_list)
        for (Scheme s : c.schemes)
            out.points.push_back(run_point(c, channels, s, c.nrf_snr_db, rf));
    return out;
}

inline std::string format_csv(const SweepResult &r)
{
    std::ostringstream os;
    os << "# " << kCsvVersion << "\n";
    os << "# fd-strongest and hbf-strongest are strongest-path approximations of conventional designs\n";
    os << "# points run whole passes over all trials until min_errors errors or max_passes\n";
    for (const auto &[k, v] : resolved_settings(r.config))
        os << "# " << k << " = " << v << "\n";
    os << kCsvColumns << "\n";
    for (const auto &p : r.points)
    {
        os << scheme_name(p.scheme) << ',' << detail::fmt_f(p.snr_db, 2) << ',' << p.n_rf << ',' << p.total.blocks
           << ',' << p.total.bits << ',' << p.total.bit_errors << ',' << detail::fmt_e(p.total.ber()) << ','
           << detail::fmt_e(p.total.mse()) << ',' << detail::fmt_f(percentile(p.total.papr_db, 0.5), 4) << ','
           << detail::fmt_f(percentile(p.total.papr_db, 0.99), 4) << "\n";
    }
    return os.str();
}

} // namespace schbf
