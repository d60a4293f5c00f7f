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


#include <catch_amalgamated.hpp>

#include <schbf/link.hpp>
#include <schbf/selftest.hpp>

using namespace schbf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
std::vector<std::uint8_t> label_bits(int label, int bits)
{
    std::vector<std::uint8_t> out;
    for (int b = bits - 1; b >= 0; --b)
        out.push_back(static_cast<std::uint8_t>((label >> b) & 1));
    return out;
}

int hamming(int a, int b)
{
    return __builtin_popcount(static_cast<unsigned>(a ^ b));
}

// Identity transceiver for an n x n channel with Ns = n.
Transceiver identity_transceiver(Index n, Index tones)
{
    return {{CMatrix::Identity(n, n)}, CMatrix::Identity(n, n),
            std::vector<CMatrix>(static_cast<size_t>(tones), CMatrix::Identity(n, n))};
}
} // namespace

TEST_CASE("qam: 4QAM mapping table", "[link]")
{
    const QamConstellation q(4);
    const double a = 1.0 / std::sqrt(2.0);
    const std::vector<std::uint8_t> bits{0, 0, 0, 1, 1, 0, 1, 1};
    const auto s = qam_modulate(bits, q);
    REQUIRE(s.size() == 4);
    CHECK(std::abs(s[0] - cx(a, a)) <= 1e-15);
    CHECK(std::abs(s[1] - cx(a, -a)) <= 1e-15);
    CHECK(std::abs(s[2] - cx(-a, a)) <= 1e-15);
    CHECK(std::abs(s[3] - cx(-a, -a)) <= 1e-15);
}

TEST_CASE("qam: unit energy and Gray adjacency", "[link]")
{
    for (int order : {4, 16, 64})
    {
        const QamConstellation q(order);
        double energy = 0.0;
        for (const cx &p : q.points())
            energy += std::norm(p);
        CHECK_THAT(energy / order, WithinAbs(1.0, 1e-12));

        // Nearest neighbours (minimum distance) differ in exactly one bit.
        double dmin = INFINITY;
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
                dmin = std::min(dmin, std::abs(q.point(i) - q.point(j)));
        for (int i = 0; i < order; ++i)
            for (int j = i + 1; j < order; ++j)
                if (std::abs(q.point(i) - q.point(j)) < dmin * (1 + 1e-9))
                    REQUIRE(hamming(i, j) == 1);
    }
    CHECK_THROWS_AS(QamConstellation(8), ConfigError);
}

TEST_CASE("qam: round trip and framing", "[link]")
{
    Rng rng(51);
    for (int order : {4, 16, 64})
    {
        const QamConstellation q(order);
        std::vector<std::uint8_t> bits(static_cast<size_t>(q.bits_per_symbol() * 300));
        for (auto &b : bits)
            b = static_cast<std::uint8_t>(rng() & 1);
        const auto s = qam_modulate(bits, q);
        CHECK(qam_demodulate(s, q) == bits);

        // Small perturbations stay inside the decision region.
        std::vector<cx> noisy = s;
        const double half = q.point(0).real() / static_cast<double>((1 << (q.bits_per_symbol() / 2)) - 1);
        for (auto &x : noisy)
            x += cx(uniform(rng, -0.9, 0.9) * half, uniform(rng, -0.9, 0.9) * half);
        CHECK(qam_demodulate(noisy, q) == bits);
        CHECK_THROWS_AS(qam_modulate(std::vector<std::uint8_t>(static_cast<size_t>(q.bits_per_symbol() + 1)), q),
                        FramingError);
    }
}

TEST_CASE("qam: 4QAM decision regions", "[link]")
{
    // Exhaustive grid check against brute-force nearest point; ties on an
    // axis go to the lower PAM index, i.e. the positive level.
    const QamConstellation q(4);
    for (int i = -20; i <= 20; ++i)
        for (int j = -20; j <= 20; ++j)
        {
            const cx y(0.1 * i, 0.1 * j);
            int best = 0;
            for (int l = 1; l < 4; ++l)
                if (std::abs(y - q.point(l)) < std::abs(y - q.point(best)) - 1e-12)
                    best = l;
            if (i != 0 && j != 0)
                REQUIRE(q.decide(y) == best);
        }
    CHECK(q.decide(cx(0.0, 0.0)) == 0);
    CHECK(q.decide(cx(0.0, -0.3)) == 1);
    CHECK(q.decide(cx(-0.3, 0.0)) == 2);
    const auto bits = qam_demodulate(std::vector<cx>{cx(-0.1, -2.0)}, q);
    CHECK(bits == label_bits(3, 2));
}

TEST_CASE("random_frame: unit symbol covariance", "[link][statistical]")
{
    const QamConstellation q(16);
    Rng rng(52);
    CMatrix cov = CMatrix::Zero(2, 2);
    const int blocks = 400, n = 64;
    for (int b = 0; b < blocks; ++b)
    {
        const auto f = random_frame(2, n, q, rng);
        REQUIRE(f.bits.size() == static_cast<size_t>(2 * n * 4));
        cov += f.symbols * f.symbols.adjoint();
    }
    cov /= static_cast<double>(blocks * n);
    CHECK((cov - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("transmit_block", "[link]")
{
    Rng rng(53);
    const CMatrix s = random_gaussian(2, 4, rng);
    const CMatrix v_rf = random_phases(3, 2, rng);
    const CMatrix v_d = random_gaussian(2, 2, rng);
    const CMatrix x = v_rf * v_d * s;
    CHECK((transmit_block(s, v_rf, v_d, 0) - x).norm() <= 1e-13);

    const CMatrix t = transmit_block(s, v_rf, v_d, 2);
    REQUIRE(t.cols() == 6);
    const int order[] = {2, 3, 0, 1, 2, 3};
    for (int c = 0; c < 6; ++c)
        CHECK((t.col(c) - x.col(order[c])).norm() <= 1e-13);

    CHECK_THROWS_AS(transmit_block(s, v_rf, v_d, 4), ConfigError);
    CHECK_THROWS_AS(transmit_block(s, v_rf, CMatrix::Ones(3, 2), 1), DimensionError);
}

TEST_CASE("transmit_block: mean power equals the precoder energy", "[link][statistical]")
{
    Rng rng(54);
    const QamConstellation q(4);
    const CMatrix v_rf = random_phases(8, 2, rng);
    const auto p = normalize_digital_precoder(v_rf, random_para_unitary(2, 2, rng));
    double power = 0.0;
    const int blocks = 500, n = 64;
    for (int b = 0; b < blocks; ++b)
        power += transmit_block(random_frame(2, n, q, rng).symbols, v_rf, p.v_d, 0).squaredNorm();
    CHECK_THAT(power / (blocks * n), WithinRel((v_rf * p.v_d).squaredNorm(), 0.02));
}

TEST_CASE("apply_channel", "[link]")
{
    Rng rng(55);
    const CMatrix x = random_gaussian(3, 10, rng);
    CHECK((apply_channel(x, {{0, CMatrix::Identity(3, 3)}}, 0.0, rng, 2) - x).norm() == 0.0);

    const CMatrix shifted = apply_channel(x, {{2, CMatrix::Identity(3, 3)}}, 0.0, rng, 2);
    CHECK(shifted.leftCols(2).norm() == 0.0);
    CHECK((shifted.rightCols(8) - x.leftCols(8)).norm() == 0.0);

    const double s2 = 0.37;
    const CMatrix noise = apply_channel(CMatrix::Zero(4, 25000), {{0, CMatrix::Identity(4, 4)}}, s2, rng, 0);
    CHECK_THAT(noise.squaredNorm() / static_cast<double>(noise.size()), WithinRel(s2, 0.02));
    CHECK_THAT(std::abs(noise.sum()) / static_cast<double>(noise.size()), WithinAbs(0.0, 0.01));

    CHECK_THROWS_AS(apply_channel(x, {{3, CMatrix::Identity(3, 3)}}, 0.0, rng, 2), ConfigError);
    CHECK_THROWS_AS(apply_channel(x, {{0, CMatrix::Identity(2, 2)}}, 0.0, rng, 2), DimensionError);
}

TEST_CASE("receive_block", "[link]")
{
    Rng rng(56);
    const QamConstellation q(4);
    const int n = 16, cp = 4;
    const auto f = random_frame(3, n, q, rng);
    const auto t = identity_transceiver(3, n);
    const CMatrix rx = apply_channel(transmit_block(f.symbols, t, cp), {{0, CMatrix::Identity(3, 3)}}, 0.0, rng, cp);
    const auto rec = receive_block(rx, t.analog_combiner, t.digital_combiners, cp, n);
    CHECK((rec.time - f.symbols).norm() <= 1e-13);
    CHECK((rec.freq - unitary_dft(f.symbols)).norm() <= 1e-13);

    CHECK_THROWS_AS(receive_block(rx, t.analog_combiner, t.digital_combiners, cp + 1, n), DimensionError);
    auto short_wd = t.digital_combiners;
    short_wd.pop_back();
    CHECK_THROWS_AS(receive_block(rx, t.analog_combiner, short_wd, cp, n), DimensionError);
}

TEST_CASE("receive_block: zero-forcing per tone gives zero error", "[link]")
{
    // G_k = I construction on a square multipath system.
    Rng rng(57);
    const int nt = 4, n = 16, cp = 3;
    const std::vector<ChannelTap> taps{{0, random_gaussian(nt, nt, rng) + 2.0 * CMatrix::Identity(nt, nt)},
                                       {3, 0.3 * random_gaussian(nt, nt, rng)}};
    const auto h = frequency_response(taps, n);
    Transceiver t{{CMatrix::Identity(nt, 2)}, CMatrix::Identity(nt, nt), {}};
    for (const auto &hk : h.tones)
        t.digital_combiners.push_back((hk * t.precoders[0]).completeOrthogonalDecomposition().pseudoInverse().adjoint());
    CHECK_THAT(sum_mse(t, h, 0.0), WithinAbs(0.0, 1e-20));
    const QamConstellation q(4);
    const auto f = random_frame(2, n, q, rng);
    const auto rec = receive_block(apply_channel(transmit_block(f.symbols, t, cp), taps, 0.0, rng, cp),
                                   t.analog_combiner, t.digital_combiners, cp, n);
    CHECK((rec.time - f.symbols).norm() <= 1e-12);
}

TEST_CASE("CP / frequency-domain equivalence", "[link][property]")
{
    const auto s = selftest::cp_equivalence(50);
    INFO(selftest::summary(s));
    CHECK(s.passed);
}

TEST_CASE("per-tone precoders through the time-domain chain", "[link]")
{
    // Noiseless per-tone transmitter: y_k = W_D,k^H W_RF^H H_k V_k s_k.
    Rng rng(58);
    const int n = 16, cp = 4;
    const std::vector<ChannelTap> taps{{0, random_gaussian(5, 6, rng)}, {2, random_gaussian(5, 6, rng)}};
    const auto h = frequency_response(taps, n);
    Transceiver t{{}, random_phases(5, 3, rng), {}};
    for (int k = 0; k < n; ++k)
    {
        t.precoders.push_back(random_gaussian(6, 2, rng));
        t.digital_combiners.push_back(random_gaussian(3, 2, rng));
    }
    const auto f = random_frame(2, n, QamConstellation(4), rng);
    const auto rec = receive_block(apply_channel(transmit_block(f.symbols, t, cp), taps, 0.0, rng, cp),
                                   t.analog_combiner, t.digital_combiners, cp, n);
    const CMatrix s_k = unitary_dft(f.symbols);
    for (int k = 0; k < n; ++k)
    {
        const CVector ref = t.digital_combiners[static_cast<size_t>(k)].adjoint() * t.analog_combiner.adjoint() *
                            h[static_cast<size_t>(k)] * t.precoders[static_cast<size_t>(k)] * s_k.col(k);
        REQUIRE((rec.freq.col(k) - ref).norm() <= 1e-10 * ref.norm());
    }
}

TEST_CASE("measure_papr", "[link]")
{
    CMatrix c(2, 8);
    for (int i = 0; i < 8; ++i)
    {
        c(0, i) = std::polar(1.0, 0.7 * i);
        c(1, i) = i == 3 ? cx(2.0, 0.0) : cx(0.0, 0.0);
    }
    const auto p = measure_papr(c);
    CHECK_THAT(p[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(p[1], WithinAbs(10.0 * std::log10(8.0), 1e-12));

    Rng rng(59);
    const auto f = random_frame(2, 64, QamConstellation(4), rng);
    const CMatrix v_rf = random_phases(4, 2, rng);
    for (double v : measure_papr(transmit_block(f.symbols, v_rf, 0.25 * CMatrix::Identity(2, 2), 16)))
    {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
    CHECK_THROWS_AS(measure_papr(CMatrix::Zero(2, 4)), MetricError);
    CHECK_THROWS_AS(measure_papr(CMatrix()), DimensionError);
}

TEST_CASE("run_ber_point", "[link]")
{
    Rng rng(60);
    const auto r = selftest::random_system(rng, 8, 16, 2, 2);
    SystemConfig sys = r.sys;
    LinkConfig link;
    link.cp_len = r.cp_len;
    link.n_blocks = 50;

    // Square full-rank flat channel, noiseless limit.
    {
        SystemConfig s = sys;
        s.n_tx = s.n_rx = 4;
        s.set_snr_db(60);
        const std::vector<ChannelTap> taps{{0, random_gaussian(4, 4, rng) + 3.0 * CMatrix::Identity(4, 4)}};
        const auto h = frequency_response(taps, s.block_len);
        const auto sol = solve_hbf(h, s, {});
        const auto res = run_ber_point(s, transceiver(sol.solution), taps, link, 1);
        CHECK(res.bit_errors == 0);
        CHECK(res.blocks == 50);
        CHECK(res.ber() == 0.0);
    }
    // Zero combiners decide every symbol as label 0: BER 1/2 on random payloads.
    {
        Transceiver t{{r.v_rf * r.v_d}, r.w_rf,
                      std::vector<CMatrix>(static_cast<size_t>(sys.block_len), CMatrix::Zero(2, 2))};
        LinkConfig l = link;
        l.n_blocks = 400;
        l.min_errors = 0;
        const auto res = run_ber_point(sys, t, r.taps, l, 2);
        CHECK_THAT(res.ber(), WithinAbs(0.5, 0.01));
        CHECK(res.bits == 400u * static_cast<std::uint64_t>(2 * sys.block_len * 2));
    }
    // Early stop once min_errors is reached.
    {
        Transceiver t{{r.v_rf * r.v_d}, r.w_rf,
                      std::vector<CMatrix>(static_cast<size_t>(sys.block_len), CMatrix::Zero(2, 2))};
        const auto res = run_ber_point(sys, t, r.taps, link, 3);
        CHECK(res.bit_errors >= 100);
        CHECK(res.blocks < 50);
    }
    // Same seed, same result.
    {
        const auto sol = solve_hbf(r.freq, sys, {});
        const auto a = run_ber_point(sys, transceiver(sol.solution), r.taps, link, 4);
        const auto b = run_ber_point(sys, transceiver(sol.solution), r.taps, link, 4);
        CHECK(a.bit_errors == b.bit_errors);
        CHECK(a.squared_error_sum == b.squared_error_sum);
        CHECK(a.papr_db == b.papr_db);
    }
    LinkConfig bad = link;
    bad.cp_len = sys.block_len;
    CHECK_THROWS_AS(run_ber_point(sys, transceiver(solve_hbf(r.freq, sys, {}).solution), r.taps, bad, 1),
                    ConfigError);
}

TEST_CASE("analytic vs empirical MSE", "[link][statistical]")
{
    const auto s = selftest::empirical_mse(10, 100000);
    INFO(selftest::summary(s));
    CHECK(s.passed);
}
