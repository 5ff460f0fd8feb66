#include "blindem/coding.hpp"

#include "blindem/rng.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace blindem {

CodeSpec CodeSpec::conv57() { return CodeSpec{{05, 07}, 3, 2}; }

void CodeSpec::validate() const {
    if (generators.empty()) throw std::invalid_argument("code needs at least one generator");
    if (constraint_length < 1 || constraint_length > 16)
        throw std::invalid_argument("constraint length out of range");
    unsigned highest = 0;
    for (unsigned g : generators) {
        if (g == 0) throw std::invalid_argument("zero generator polynomial");
        highest = std::max(highest, static_cast<unsigned>(std::bit_width(g)));
    }
    if (highest != constraint_length)
        throw std::invalid_argument("highest generator degree + 1 must equal the constraint length");
}

unsigned encoder_outputs(const CodeSpec& spec, unsigned state, unsigned input) {
    const unsigned reg = (input << (spec.constraint_length - 1)) | state;
    unsigned out = 0;
    for (std::size_t j = 0; j < spec.generators.size(); ++j) {
        const unsigned bit = static_cast<unsigned>(std::popcount(reg & spec.generators[j]) & 1);
        out |= bit << j;
    }
    return out;
}

unsigned encoder_next_state(const CodeSpec& spec, unsigned state, unsigned input) {
    const unsigned reg = (input << (spec.constraint_length - 1)) | state;
    return reg >> 1;
}

Bits conv_encode(std::span<const std::uint8_t> info_bits, const CodeSpec& spec) {
    spec.validate();
    if (info_bits.empty()) throw std::invalid_argument("conv_encode: empty input");
    const std::size_t r = spec.rate_inv();
    Bits out;
    out.reserve(spec.codeword_length(info_bits.size()));
    unsigned state = 0;
    auto step = [&](unsigned u) {
        const unsigned o = encoder_outputs(spec, state, u);
        for (std::size_t j = 0; j < r; ++j) out.push_back(static_cast<std::uint8_t>((o >> j) & 1U));
        state = encoder_next_state(spec, state, u);
    };
    for (std::uint8_t b : info_bits) step(b & 1U);
    for (std::size_t i = 0; i < spec.termination_bits; ++i) step(0);
    return out;
}

Interleaver::Interleaver(std::vector<std::size_t> permutation) : perm_(std::move(permutation)) {
    std::vector<std::size_t> sorted = perm_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) throw std::invalid_argument("interleaver permutation is not a bijection");
}

Interleaver Interleaver::random(std::size_t length, std::uint64_t seed) {
    std::vector<std::size_t> p(length);
    std::iota(p.begin(), p.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(p.begin(), p.end(), rng);
    Interleaver il(std::move(p));
    il.seed_ = seed;
    return il;
}

Interleaver Interleaver::identity(std::size_t length) {
    std::vector<std::size_t> p(length);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return Interleaver(std::move(p));
}

BitMessage Interleaver::interleave(const BitMessage& in) const {
    check(in.rows());
    BitMessage out(in.rows(), in.alphabet());
    for (std::size_t i = 0; i < perm_.size(); ++i)
        std::copy_n(in.row(perm_[i]).begin(), in.alphabet(), out.row(i).begin());
    out.mark_normalized(in.normalized());
    return out;
}

BitMessage Interleaver::deinterleave(const BitMessage& in) const {
    check(in.rows());
    BitMessage out(in.rows(), in.alphabet());
    for (std::size_t i = 0; i < perm_.size(); ++i)
        std::copy_n(in.row(i).begin(), in.alphabet(), out.row(perm_[i]).begin());
    out.mark_normalized(in.normalized());
    return out;
}

}  // namespace blindem
