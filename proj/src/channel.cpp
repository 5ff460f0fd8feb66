#include "blindem/channel.hpp"

namespace blindem {

ChannelTaps::ChannelTaps(CVec t) : taps(std::move(t)) {
    if (taps.empty()) throw std::invalid_argument("channel needs at least one tap");
    for (const auto& h : taps)
        if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
            throw std::invalid_argument("channel taps must be finite");
}

double ChannelTaps::energy() const {
    double e = 0.0;
    for (const auto& h : taps) e += std::norm(h);
    return e;
}

double NoiseSpec::snr_db(const ChannelTaps& h, double symbol_energy) const {
    return 10.0 * std::log10(h.energy() * symbol_energy / variance);
}

ChannelProfile profile_from_length(int L) {
    switch (L) {
        case 2: return ChannelProfile::L2;
        case 3: return ChannelProfile::L3;
        case 4: return ChannelProfile::L4;
        default: throw std::invalid_argument("channel profile must have L = 2, 3 or 4");
    }
}

namespace {

std::vector<double> profile_magnitudes(ChannelProfile p) {
    switch (p) {
        // The second L=2 tap carries a -1, applied as an extra pi of phase.
        case ChannelProfile::L2: return {1.0, -1.0};
        case ChannelProfile::L3: return {0.5, 0.7, 0.5};
        case ChannelProfile::L4: return {0.38, 0.6, 0.6, 0.38};
    }
    throw std::invalid_argument("unknown channel profile");
}

}  // namespace

ChannelTaps profile_taps(ChannelProfile profile, std::span<const double> phases) {
    const auto mags = profile_magnitudes(profile);
    if (phases.size() != mags.size()) throw std::invalid_argument("one phase per tap required");
    CVec t(mags.size());
    for (std::size_t l = 0; l < mags.size(); ++l) t[l] = mags[l] * std::polar(1.0, phases[l]);
    return ChannelTaps(std::move(t));
}

ChannelTaps draw_channel(ChannelProfile profile, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    std::vector<double> phases(static_cast<std::size_t>(profile));
    for (double& p : phases) p = u(rng);
    return profile_taps(profile, phases);
}

CVec apply_channel(std::span<const Complex> x, const ChannelTaps& h,
                   std::span<const Complex> preamble, const NoiseSpec& noise, std::uint64_t seed) {
    const std::size_t L = h.length();
    if (preamble.size() != L - 1)
        throw std::invalid_argument("preamble length must be L-1");
    if (noise.variance < 0.0) throw std::invalid_argument("noise variance must be non-negative");

    const std::size_t P = preamble.size();
    auto symbol = [&](std::ptrdiff_t t) -> Complex {
        if (t >= 0) return x[static_cast<std::size_t>(t)];
        return preamble[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(P) + t)];
    };

    Rng rng(seed);
    CVec y(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        Complex z{};
        for (std::size_t l = 0; l < L; ++l)
            z += h.taps[l] * symbol(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(l));
        if (noise.variance > 0.0) z += complex_gaussian(rng, noise.variance);
        y[t] = z;
    }
    return y;
}

double sigma_from_snr(const ChannelTaps& h, double snr_db, double symbol_energy) {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr must be finite");
    if (symbol_energy <= 0.0) throw std::invalid_argument("symbol energy must be positive");
    return h.energy() * symbol_energy / std::pow(10.0, snr_db / 10.0);
}

ChannelTaps perturb_init(const ChannelTaps& h, double sigma_h2, std::uint64_t seed) {
    if (sigma_h2 < 0.0) throw std::invalid_argument("sigma_h2 must be non-negative");
    if (sigma_h2 == 0.0) return h;
    Rng rng(seed);
    CVec t = h.taps;
    for (auto& v : t) v += complex_gaussian(rng, sigma_h2);
    return ChannelTaps(std::move(t));
}

}  // namespace blindem
