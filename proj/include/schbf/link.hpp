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

// Single-carrier block transmission with cyclic prefix and frequency-domain
// equalization: Gray QAM, CP insertion, tap-domain MIMO convolution with
// AWGN, receive-side hybrid combining and per-tone equalization, BER / MSE /
// PAPR measurement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "channel.hpp"
#include "hbf.hpp"
#include "numerics.hpp"

namespace schbf
{

// Square Gray-mapped QAM with unit average energy.
//
// A label of b = log2(M) bits is split MSB-first into b/2 in-phase bits and
// b/2 quadrature bits. Each half is a Gray code over the PAM levels
// (sqrt(M)-1) - 2i, i = 0 .. sqrt(M)-1, so an all-zero half maps to the most
// positive level. 4QAM: 00 -> (1+j)/sqrt2, 01 -> (1-j)/sqrt2,
// 10 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2.
class QamConstellation
{
public:
    explicit QamConstellation(int order = 4) : order_(order)
    {
        if (order != 4 && order != 16 && order != 64)
            throw ConfigError("qam: unsupported order " + std::to_string(order) + " (use 4, 16 or 64)");
        bits_ = order == 4 ? 2 : order == 16 ? 4 : 6;
        side_ = 1 << (bits_ / 2);
        scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
        points_.resize(static_cast<size_t>(order));
        const int half = bits_ / 2;
        for (int label = 0; label < order; ++label)
        {
            const int gi = label >> half;
            const int gq = label & (side_ - 1);
            points_[static_cast<size_t>(label)] = {level(gray_to_index(gi)), level(gray_to_index(gq))};
        }
    }

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_; }
    const std::vector<cx> &points() const { return points_; }
    cx point(int label) const { return points_.at(static_cast<size_t>(label)); }

    // Nearest point per axis; ties go to the lower PAM index.
    int decide(cx y) const
    {
        const int half = bits_ / 2;
        return (index_to_gray(nearest(y.real())) << half) | index_to_gray(nearest(y.imag()));
    }

private:
    static int gray_to_index(int g)
    {
        int b = g;
        for (int shift = 1; shift < 8; shift <<= 1)
            b ^= b >> shift;
        return b;
    }
    static int index_to_gray(int i) { return i ^ (i >> 1); }

    double level(int i) const { return scale_ * static_cast<double>((side_ - 1) - 2 * i); }

    int nearest(double x) const
    {
        const double v = (static_cast<double>(side_ - 1) - x / scale_) / 2.0;
        const int i = static_cast<int>(std::ceil(v - 0.5));
        return std::clamp(i, 0, side_ - 1);
    }

    int order_;
    int bits_ = 2;
    int side_ = 2;
    double scale_ = 1.0;
    std::vector<cx> points_;
};

inline std::vector<cx> qam_modulate(std::span<const std::uint8_t> bits, const QamConstellation &qam)
{
    const auto b = static_cast<size_t>(qam.bits_per_symbol());
    if (bits.size() % b != 0)
        throw FramingError("qam_modulate: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                           std::to_string(b));
    std::vector<cx> out;
    out.reserve(bits.size() / b);
    for (size_t s = 0; s < bits.size(); s += b)
    {
        int label = 0;
        for (size_t i = 0; i < b; ++i)
            label = (label << 1) | (bits[s + i] & 1);
        out.push_back(qam.point(label));
    }
    return out;
}

inline std::vector<std::uint8_t> qam_demodulate(std::span<const cx> symbols, const QamConstellation &qam)
{
    const int b = qam.bits_per_symbol();
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() * static_cast<size_t>(b));
    for (const cx &y : symbols)
    {
        const int label = qam.decide(y);
        for (int i = b - 1; i >= 0; --i)
            out.push_back(static_cast<std::uint8_t>((label >> i) & 1));
    }
    return out;
}

// Ns x N symbol block and its bit payload; symbol (s, n) carries bits
// [(s N + n) b, (s N + n + 1) b).
struct BlockFrame
{
    CMatrix symbols;
    std::vector<std::uint8_t> bits;
};

inline BlockFrame random_frame(Index n_s, Index n, const QamConstellation &qam, Rng &rng)
{
    BlockFrame f;
    f.bits.resize(static_cast<size_t>(n_s * n * qam.bits_per_symbol()));
    for (size_t i = 0; i < f.bits.size(); i += 64)
    {
        std::uint64_t word = rng();
        for (size_t j = i; j < std::min(i + 64, f.bits.size()); ++j, word >>= 1)
            f.bits[j] = static_cast<std::uint8_t>(word & 1);
    }
    const auto sym = qam_modulate(f.bits, qam);
    f.symbols.resize(n_s, n);
    for (Index s = 0; s < n_s; ++s)
        for (Index t = 0; t < n; ++t)
            f.symbols(s, t) = sym[static_cast<size_t>(s * n + t)];
    return f;
}

inline std::vector<std::uint8_t> demodulate_block(const CMatrix &y, const QamConstellation &qam)
{
    std::vector<cx> flat(static_cast<size_t>(y.size()));
    for (Index s = 0; s < y.rows(); ++s)
        for (Index t = 0; t < y.cols(); ++t)
            flat[static_cast<size_t>(s * y.cols() + t)] = y(s, t);
    return qam_demodulate(flat, qam);
}

namespace detail
{
inline CMatrix add_cyclic_prefix(const CMatrix &x, Index cp_len)
{
    if (cp_len < 0 || (cp_len > 0 && cp_len >= x.cols()))
        throw ConfigError("cyclic prefix length " + std::to_string(cp_len) + " must be in [0, N-1] for N=" +
                          std::to_string(x.cols()));
    CMatrix out(x.rows(), x.cols() + cp_len);
    out.leftCols(cp_len) = x.rightCols(cp_len);
    out.rightCols(x.cols()) = x;
    return out;
}
} // namespace detail

// x_n = V_RF V_D s_n with the last L samples prepended: Nt x (N + L).
inline CMatrix transmit_block(const CMatrix &symbols, const CMatrix &v_rf, const CMatrix &v_d, Index cp_len)
{
    if (v_rf.cols() != v_d.rows() || v_d.cols() != symbols.rows())
        throw DimensionError("transmit_block: V_RF " + shape_str(v_rf) + ", V_D " + shape_str(v_d) +
                             " and symbols " + shape_str(symbols) + " do not chain");
    return detail::add_cyclic_prefix(v_rf * (v_d * symbols), cp_len);
}

// Generic transmitter: wideband precoder in time, or per-tone precoders
// applied between a unitary DFT and IDFT.
inline CMatrix transmit_block(const CMatrix &symbols, const Transceiver &t, Index cp_len)
{
    if (t.frequency_flat())
        return detail::add_cyclic_prefix(t.precoders.front() * symbols, cp_len);
    if (static_cast<Index>(t.precoders.size()) != symbols.cols())
        throw DimensionError("transmit_block: per-tone precoders do not match block length");
    const CMatrix s = unitary_dft(symbols);
    CMatrix x(t.precoders.front().rows(), symbols.cols());
    for (Index k = 0; k < symbols.cols(); ++k)
        x.col(k) = t.precoders[static_cast<size_t>(k)] * s.col(k);
    return detail::add_cyclic_prefix(unitary_idft(x), cp_len);
}

// Linear convolution with the tap matrices over the CP-extended block plus
// CN(0, sigma^2) noise on every receive sample.
inline CMatrix apply_channel(const CMatrix &tx, const std::vector<ChannelTap> &taps, double noise_var, Rng &rng,
                             Index cp_len)
{
    if (taps.empty())
        throw DimensionError("apply_channel: no taps");
    for (const auto &t : taps)
    {
        if (t.delay < 0 || t.delay > cp_len)
            throw ConfigError("apply_channel: tap delay " + std::to_string(t.delay) +
                              " exceeds the cyclic prefix length " + std::to_string(cp_len));
        if (t.matrix.cols() != tx.rows())
            throw DimensionError("apply_channel: tap is " + shape_str(t.matrix) + " but tx has " +
                                 std::to_string(tx.rows()) + " antennas");
    }
    const Index len = tx.cols();
    CMatrix rx = CMatrix::Zero(taps.front().matrix.rows(), len);
    for (const auto &t : taps)
    {
        const Index d = t.delay;
        if (d < len)
            rx.rightCols(len - d).noalias() += t.matrix * tx.leftCols(len - d);
    }
    if (noise_var > 0.0)
    {
        for (Index c = 0; c < len; ++c)
            for (Index r = 0; r < rx.rows(); ++r)
                rx(r, c) += complex_gaussian(rng, noise_var);
    }
    return rx;
}

struct ReceivedBlock
{
    CMatrix freq; // y_k, Ns x N
    CMatrix time; // equalized time-domain samples, Ns x N
};

// Drop CP, analog combining, DFT, per-tone W_D,k^H, IDFT.
inline ReceivedBlock receive_block(const CMatrix &rx, const CMatrix &w_rf, const std::vector<CMatrix> &w_d,
                                   Index cp_len, Index n)
{
    if (rx.cols() != n + cp_len)
        throw DimensionError("receive_block: expected " + std::to_string(n + cp_len) + " samples, got " +
                             std::to_string(rx.cols()));
    if (rx.rows() != w_rf.rows())
        throw DimensionError("receive_block: W_RF " + shape_str(w_rf) + " does not match " +
                             std::to_string(rx.rows()) + " receive antennas");
    if (static_cast<Index>(w_d.size()) != n)
        throw DimensionError("receive_block: need one digital combiner per tone");
    const CMatrix z = unitary_dft(w_rf.adjoint() * rx.rightCols(n));
    ReceivedBlock out;
    out.freq.resize(w_d.front().cols(), n);
    for (Index k = 0; k < n; ++k)
    {
        const auto &wk = w_d[static_cast<size_t>(k)];
        if (wk.rows() != z.rows())
            throw DimensionError("receive_block: W_D," + std::to_string(k) + " is " + shape_str(wk));
        out.freq.col(k) = wk.adjoint() * z.col(k);
    }
    out.time = unitary_idft(out.freq);
    return out;
}

// 10 log10(max|x|^2 / mean|x|^2) per antenna (row).
inline std::vector<double> measure_papr(const CMatrix &tx)
{
    require_nonempty(tx, "measure_papr");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(tx.rows()));
    for (Index r = 0; r < tx.rows(); ++r)
    {
        const auto p = tx.row(r).cwiseAbs2();
        const double mean = p.mean();
        if (!(mean > 0.0))
            throw MetricError("measure_papr: zero-power block on antenna " + std::to_string(r));
        out.push_back(10.0 * std::log10(p.maxCoeff() / mean));
    }
    return out;
}

struct LinkConfig
{
    int cp_len = 16;
    int qam_order = 4;
    int n_blocks = 100;
    std::uint64_t min_errors = 100; // early stop once reached; 0 disables

    void validate(int block_len) const
    {
        if (cp_len < 0 || (cp_len > 0 && cp_len >= block_len))
            throw ConfigError("link: cp_len must be in [0, N-1]");
        if (n_blocks < 1)
            throw ConfigError("link: n_blocks must be >= 1");
        QamConstellation{qam_order};
    }
};

struct SimulationResult
{
    std::uint64_t blocks = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double squared_error_sum = 0.0; // sum over time vectors of ||y_n - s_n||^2
    std::uint64_t symbol_vectors = 0;
    std::vector<double> papr_db;

    double ber() const { return bits == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits); }
    double mse() const { return symbol_vectors == 0 ? 0.0 : squared_error_sum / static_cast<double>(symbol_vectors); }

    void merge(const SimulationResult &o)
    {
        blocks += o.blocks;
        bits += o.bits;
        bit_errors += o.bit_errors;
        squared_error_sum += o.squared_error_sum;
        symbol_vectors += o.symbol_vectors;
        papr_db.insert(papr_db.end(), o.papr_db.begin(), o.papr_db.end());
    }
};

// One block through the whole chain; the block's payload and noise come
// from `rng`.
inline SimulationResult simulate_block(const SystemConfig &sys, const Transceiver &t,
                                       const std::vector<ChannelTap> &taps, const QamConstellation &qam,
                                       Index cp_len, Rng &rng)
{
    const auto frame = random_frame(sys.n_s, sys.block_len, qam, rng);
    const CMatrix tx = transmit_block(frame.symbols, t, cp_len);
    const CMatrix rx = apply_channel(tx, taps, sys.noise_var, rng, cp_len);
    const auto rec = receive_block(rx, t.analog_combiner, t.digital_combiners, cp_len, sys.block_len);
    const auto decided = demodulate_block(rec.time, qam);

    SimulationResult r;
    r.blocks = 1;
    r.bits = frame.bits.size();
    for (size_t i = 0; i < decided.size(); ++i)
        r.bit_errors += decided[i] != frame.bits[i];
    r.squared_error_sum = (rec.time - frame.symbols).squaredNorm();
    r.symbol_vectors = static_cast<std::uint64_t>(sys.block_len);
    r.papr_db = measure_papr(tx);
    return r;
}

// Monte Carlo over blocks; block b draws payload and noise from
// derive_seed(seed, {b}). Stops after n_blocks or once min_errors is reached.
inline SimulationResult run_ber_point(const SystemConfig &sys, const Transceiver &t,
                                      const std::vector<ChannelTap> &taps, const LinkConfig &link,
                                      std::uint64_t seed)
{
    sys.validate();
    link.validate(sys.block_len);
    const QamConstellation qam(link.qam_order);
    SimulationResult total;
    for (int b = 0; b < link.n_blocks; ++b)
    {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
        total.merge(simulate_block(sys, t, taps, qam, link.cp_len, rng));
        if (link.min_errors > 0 && total.bit_errors >= link.min_errors)
            break;
    }
    return total;
}

} // namespace schbf
