#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blindem/channel.hpp"
#include "blindem/trellis.hpp"

#include <set>

using namespace blindem;

namespace {

CVec zero_preamble(std::size_t L) { return CVec(L - 1, Complex{}); }

}  // namespace

TEST_CASE("two-tap (1,-1) channel cancels a repeated symbol") {
    const ChannelTaps h(CVec{1.0, -1.0});
    const CVec x{1.0, 1.0, Complex(0, 1), Complex(0, 1)};
    const CVec pre{1.0};
    const CVec y = apply_channel(x, h, pre, NoiseSpec{0.0}, 1);
    CHECK(std::abs(y[0]) < 1e-12);
    CHECK(std::abs(y[1]) < 1e-12);
    CHECK(std::abs(y[2] - Complex(-1, 1)) < 1e-12);
    CHECK(std::abs(y[3]) < 1e-12);
}

TEST_CASE("profile taps and noiseless outputs") {
    const double zeros[3] = {0, 0, 0};
    const ChannelTaps h = profile_taps(ChannelProfile::L3, zeros);
    CHECK(h.energy() == doctest::Approx(0.99));
    const CVec x{1.0, 1.0, 1.0};
    const CVec y = apply_channel(x, h, CVec{1.0, 1.0}, NoiseSpec{0.0}, 7);
    for (const auto& v : y) CHECK(std::abs(v - 1.7) < 1e-12);

    const double z2[2] = {0, 0};
    CHECK(profile_taps(ChannelProfile::L2, z2).energy() == doctest::Approx(2.0));
    const double z4[4] = {0, 0, 0, 0};
    CHECK(profile_taps(ChannelProfile::L4, z4).energy() == doctest::Approx(2 * 0.38 * 0.38 + 2 * 0.36));

    CHECK_THROWS_AS(profile_from_length(5), std::invalid_argument);
    CHECK_THROWS_AS(ChannelTaps(CVec{}), std::invalid_argument);
}

TEST_CASE("noise variance from SNR") {
    const double z2[2] = {0, 0};
    const double z3[3] = {0, 0, 0};
    CHECK(sigma_from_snr(profile_taps(ChannelProfile::L2, z2), 6.0) == doctest::Approx(0.50238).epsilon(1e-4));
    CHECK(sigma_from_snr(profile_taps(ChannelProfile::L3, z3), 6.0) == doctest::Approx(0.24868).epsilon(1e-4));
    const ChannelTaps h = profile_taps(ChannelProfile::L3, z3);
    CHECK(NoiseSpec{sigma_from_snr(h, 6.0)}.snr_db(h) == doctest::Approx(6.0));
}

TEST_CASE("drawn channels keep the profile magnitudes") {
    for (int L : {2, 3, 4}) {
        const auto profile = profile_from_length(L);
        std::vector<double> zeros(static_cast<std::size_t>(L), 0.0);
        const ChannelTaps ref = profile_taps(profile, zeros);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const ChannelTaps h = draw_channel(profile, seed);
            REQUIRE(h.length() == static_cast<std::size_t>(L));
            for (std::size_t l = 0; l < h.length(); ++l)
                CHECK(std::abs(h.taps[l]) == doctest::Approx(std::abs(ref.taps[l])));
        }
    }
    CHECK(draw_channel(ChannelProfile::L3, 4).taps == draw_channel(ChannelProfile::L3, 4).taps);
    CHECK(draw_channel(ChannelProfile::L3, 4).taps != draw_channel(ChannelProfile::L3, 5).taps);
}

TEST_CASE("initialization perturbation has the requested variance") {
    const double z3[3] = {0, 0, 0};
    const ChannelTaps h = profile_taps(ChannelProfile::L3, z3);
    const double sigma_h2 = 0.5;
    double acc = 0.0;
    Complex mean{};
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        const ChannelTaps p = perturb_init(h, sigma_h2, i);
        const Complex d = p.taps[0] - h.taps[0];
        acc += std::norm(d);
        mean += d;
    }
    CHECK(std::abs(acc / n / sigma_h2 - 1.0) < 0.02);
    CHECK(std::abs(mean / static_cast<double>(n)) < 0.01);
    CHECK(perturb_init(h, 0.0, 3).taps == h.taps);
}

TEST_CASE("empirical SNR matches the nominal value") {
    const ChannelTaps h = draw_channel(ChannelProfile::L3, 12);
    const double sigma2 = sigma_from_snr(h, 6.0);
    Rng rng(1);
    std::uniform_int_distribution<int> sym(0, 3);
    const std::size_t T = 200000;
    CVec x(T);
    for (auto& v : x) v = std::polar(1.0, kPi / 2 * sym(rng));
    const CVec pre = zero_preamble(3);
    const CVec clean = apply_channel(x, h, pre, NoiseSpec{0.0}, 0);
    const CVec noisy = apply_channel(x, h, pre, NoiseSpec{sigma2}, 99);
    double ps = 0.0, pn = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        ps += std::norm(clean[t]);
        pn += std::norm(noisy[t] - clean[t]);
    }
    const double snr = 10.0 * std::log10(ps / pn);
    CHECK(std::abs(snr - 6.0) < 0.1);

    CHECK(apply_channel(x, h, pre, NoiseSpec{sigma2}, 99) == noisy);
    CHECK(apply_channel(x, h, pre, NoiseSpec{sigma2}, 98) != noisy);
}

TEST_CASE("noiseless outputs lie in the set of trellis means") {
    const Constellation c(4);
    const IsiTrellis tr(c, 3);
    const ChannelTaps h = draw_channel(ChannelProfile::L3, 2);
    const CVec mu = means_from_taps(tr, h.taps);
    Rng rng(8);
    std::uniform_int_distribution<std::size_t> sym(0, 3);
    CVec x(200), pre(2);
    for (auto& v : x) v = c.point(sym(rng));
    for (auto& v : pre) v = c.point(sym(rng));
    const CVec y = apply_channel(x, h, pre, NoiseSpec{0.0}, 0);
    for (const auto& v : y) {
        double best = 1e9;
        for (const auto& m : mu) best = std::min(best, std::abs(v - m));
        CHECK(best < 1e-12);
    }
    CHECK_THROWS_AS(apply_channel(x, h, CVec{1.0}, NoiseSpec{0.0}, 0), std::invalid_argument);
}
