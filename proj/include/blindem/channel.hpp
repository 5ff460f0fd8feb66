#pragma once

#include "blindem/rng.hpp"
#include "blindem/types.hpp"

namespace blindem {

/// Block-invariant channel impulse response h_0..h_{L-1}; h_0 multiplies the current symbol.
struct ChannelTaps {
    CVec taps;

    ChannelTaps() = default;
    explicit ChannelTaps(CVec t);

    std::size_t length() const { return taps.size(); }
    double energy() const;
};

/// Circular complex Gaussian noise with total variance sigma2 (sigma2/2 per dimension).
struct NoiseSpec {
    double variance = 0.0;

    double snr_db(const ChannelTaps& h, double symbol_energy = 1.0) const;
};

/// Tap-magnitude profiles of the L = 2, 3, 4 test channels.
enum class ChannelProfile { L2 = 2, L3 = 3, L4 = 4 };

ChannelProfile profile_from_length(int L);

/// Taps of `profile` with the given phases (one per tap).
ChannelTaps profile_taps(ChannelProfile profile, std::span<const double> phases);

/// Uniform i.i.d. tap phases on [0, 2*pi).
ChannelTaps draw_channel(ChannelProfile profile, std::uint64_t seed);

/// y_t = sum_l h_l x_{t-l} + w_t. x_{t} for t < 0 comes from `preamble`,
/// stored oldest first (preamble.back() is x_{-1}). Zero variance skips noise.
CVec apply_channel(std::span<const Complex> x, const ChannelTaps& h,
                   std::span<const Complex> preamble, const NoiseSpec& noise, std::uint64_t seed);

/// sigma_w^2 = ||h||^2 * Es / 10^(snr/10).
double sigma_from_snr(const ChannelTaps& h, double snr_db, double symbol_energy = 1.0);

/// Adds CN(0, sigma_h2) to every tap.
ChannelTaps perturb_init(const ChannelTaps& h, double sigma_h2, std::uint64_t seed);

/// One CN(0, variance) draw.
inline Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace blindem
