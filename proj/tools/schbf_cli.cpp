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


// Command-line front end: design a transceiver for one channel, run BER
// sweeps, or run the randomized self-test suites.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <schbf/schbf.hpp>

namespace fs = std::filesystem;
using namespace schbf;

namespace
{

struct CommonOptions
{
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};

void add_common(CLI::App *cmd, CommonOptions &o)
{
    cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (created if missing)");
    cmd->add_option("--seed", o.seed, "root seed, overrides the config value");
    cmd->add_option("--trials", o.trials, "channel realizations per point, overrides the config value");
}

ExperimentConfig resolve(const CommonOptions &o)
{
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.trials)
        cfg.trials = *o.trials;
    cfg.validate();
    return cfg;
}

void write_file(const fs::path &path, const std::string &text)
{
    if (!path.parent_path().empty())
        fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << text;
}

int run_solve(const CommonOptions &o, const std::string &channel_path, std::optional<double> snr)
{
    const ExperimentConfig cfg = resolve(o);
    const SystemConfig sys = cfg.system(cfg.n_rf, snr.value_or(cfg.snr_db.front()));
    sys.validate();

    TrialChannel ch;
    if (channel_path.empty())
        ch = trial_channel(cfg, 0);
    else
    {
        std::ifstream f(channel_path);
        if (!f)
            throw ConfigError("cannot read channel file " + channel_path);
        ch.geometry = channel_from_json(Json::parse(f));
        ch.taps = tap_matrices(ch.geometry, cfg.n_tx, cfg.n_rx);
        ch.freq = frequency_response(ch.taps, cfg.block_len);
    }

    const auto result = solve_hbf(ch.freq, sys, cfg.solver(derive_seed(cfg.seed, {1, 0})));
    Json doc;
    Json settings = Json::object();
    for (const auto &[k, v] : resolved_settings(cfg))
        settings[k] = v;
    doc["config"] = settings;
    doc["snr_db"] = sys.snr_db();
    doc["noise_var"] = sys.noise_var;
    doc["channel"] = channel_to_json(ch.geometry);

    Json schemes = Json::object();
    Json evd = to_json(result);
    evd["sum_mse"] = sum_mse(result.solution, ch.freq, sys.noise_var);
    schemes[std::string(scheme_name(Scheme::evd_hbf))] = evd;
    const BaselineSolution baselines[] = {ifd_solution(ch.freq, sys), strongest_path_fd(ch.geometry, ch.freq, sys),
                                          strongest_path_hbf(ch.geometry, ch.freq, sys)};
    for (const auto &b : baselines)
    {
        Json j = to_json(b);
        j["sum_mse"] = sum_mse(transceiver(b), ch.freq, sys.noise_var);
        schemes[std::string(scheme_name(b.scheme))] = j;
    }
    doc["solutions"] = schemes;

    const fs::path dir(o.out);
    write_file(dir / "solution.json", doc.dump(1) + "\n");
    write_file(dir / "channel.json", channel_to_json(ch.geometry).dump(1) + "\n");

    const auto &d = result.diagnostics;
    std::printf("snr %.2f dB, %d iterations (%s), J = %.6e, J_L = %.6e\n", sys.snr_db(), d.iterations,
                to_string(d.stop_reason), d.objective_trace.empty() ? d.initial_objective : d.objective_trace.back(),
                d.lower_bound);
    for (const auto &[name, j] : schemes.items())
        std::printf("  %-14s sum-MSE %.6e\n", name.c_str(), j["sum_mse"].get<double>());
    std::printf("wrote %s\n", (dir / "solution.json").string().c_str());
    return 0;
}

int run_sweep(const CommonOptions &o, SweepKind kind)
{
    const ExperimentConfig cfg = resolve(o);
    const SweepResult r = kind == SweepKind::snr ? run_snr_sweep(cfg) : run_nrf_sweep(cfg);
    const fs::path path = fs::path(o.out) / (kind == SweepKind::snr ? "ber_sweep.csv" : "nrf_sweep.csv");
    write_file(path, format_csv(r));
    for (const auto &p : r.points)
        std::printf("%-14s snr %7.2f  n_rf %d  errors %8llu  ber %.4e\n", std::string(scheme_name(p.scheme)).c_str(),
                    p.snr_db, p.n_rf, static_cast<unsigned long long>(p.total.bit_errors), p.total.ber());
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

int run_selftest(double scale)
{
    bool ok = true;
    for (const auto &s : selftest::run_all(scale))
    {
        std::printf("%s %s: %s\n", s.passed ? "PASS" : "FAIL", s.name.c_str(), selftest::summary(s).c_str());
        ok = ok && s.passed;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"schbf: hybrid beamforming design and SC-FDE link simulation"};
    app.require_subcommand(1);

    CommonOptions solve_opts, ber_opts, nrf_opts;
    std::string channel_path;
    std::optional<double> snr;
    double scale = 1.0;

    auto *solve = app.add_subcommand("solve", "design all schemes for one channel and dump JSON");
    add_common(solve, solve_opts);
    solve->add_option("--channel", channel_path, "channel JSON to use instead of sampling")->check(CLI::ExistingFile);
    solve->add_option("--snr-db", snr, "SNR in dB (default: first snr_db entry)");

    auto *ber = app.add_subcommand("ber-sweep", "BER versus SNR for the selected schemes");
    add_common(ber, ber_opts);
    auto *nrf = app.add_subcommand("nrf-sweep", "BER versus number of RF chains at fixed SNR");
    add_common(nrf, nrf_opts);

    auto *self = app.add_subcommand("selftest", "run the randomized invariant suites");
    self->add_option("--scale", scale, "instance-count multiplier in (0, 1]")->check(CLI::Range(1e-3, 1.0));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*solve)
            return run_solve(solve_opts, channel_path, snr);
        if (*ber)
            return run_sweep(ber_opts, SweepKind::snr);
        if (*nrf)
            return run_sweep(nrf_opts, SweepKind::nrf);
        if (*self)
            return run_selftest(scale);
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
