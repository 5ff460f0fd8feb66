#pragma once

#include "blindem/types.hpp"

#include <cstdint>

namespace blindem {

/// Feed-forward convolutional code given by octal generator polynomials.
///
/// The register holds [u_k, u_{k-1}, ..., u_{k-Lc+1}] with u_k in the most
/// significant position, so the polynomial's MSB taps the current input.
struct CodeSpec {
    std::vector<unsigned> generators;  // octal-specified, e.g. {05, 07}
    std::size_t constraint_length = 0;
    std::size_t termination_bits = 0;

    /// Rate-1/2 (5,7)_8 code with two zero tail bits.
    static CodeSpec conv57();

    std::size_t rate_inv() const { return generators.size(); }
    std::size_t num_states() const { return std::size_t{1} << (constraint_length - 1); }
    std::size_t codeword_length(std::size_t info_bits) const {
        return (info_bits + termination_bits) * rate_inv();
    }

    /// Throws std::invalid_argument on inconsistent polynomials.
    void validate() const;
};

/// Output bits of one encoder step from `state` (the previous Lc-1 inputs) on `input`.
unsigned encoder_outputs(const CodeSpec& spec, unsigned state, unsigned input);
unsigned encoder_next_state(const CodeSpec& spec, unsigned state, unsigned input);

/// Encodes info bits followed by termination zeros; starts and ends in state 0.
Bits conv_encode(std::span<const std::uint8_t> info_bits, const CodeSpec& spec);

/// Random permutation with convention output[i] = input[perm[i]].
class Interleaver {
public:
    Interleaver() = default;
    explicit Interleaver(std::vector<std::size_t> permutation);

    static Interleaver random(std::size_t length, std::uint64_t seed);
    static Interleaver identity(std::size_t length);

    std::size_t size() const { return perm_.size(); }
    const std::vector<std::size_t>& permutation() const { return perm_; }
    std::uint64_t seed() const { return seed_; }

    template <class T>
    std::vector<T> interleave(std::span<const T> in) const {
        check(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = in[perm_[i]];
        return out;
    }
    template <class T>
    std::vector<T> deinterleave(std::span<const T> in) const {
        check(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < perm_.size(); ++i) out[perm_[i]] = in[i];
        return out;
    }

    BitMessage interleave(const BitMessage& in) const;
    BitMessage deinterleave(const BitMessage& in) const;

private:
    void check(std::size_t n) const {
        if (n != perm_.size()) throw std::invalid_argument("interleaver length mismatch");
    }

    std::vector<std::size_t> perm_;
    std::uint64_t seed_ = 0;
};

}  // namespace blindem
