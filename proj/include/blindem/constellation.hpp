#pragma once

#include "blindem/types.hpp"

namespace blindem {

/// M-PSK alphabet, points[i] = exp(j*2*pi*i/M).
///
/// Labels use natural binary: symbol index i carries the bits of i,
/// most significant bit first. A rotation by 2*pi*k/M is then a pure
/// index shift, which the phase-ambiguity detector relies on.
class Constellation {
public:
    explicit Constellation(std::size_t order);

    std::size_t order() const { return points_.size(); }
    std::size_t bits_per_symbol() const { return bits_per_symbol_; }
    const CVec& points() const { return points_; }
    Complex point(std::size_t i) const { return points_[i]; }

    /// Bit j (0 = MSB) of symbol label i.
    std::uint8_t label_bit(std::size_t i, std::size_t j) const {
        return static_cast<std::uint8_t>((i >> (bits_per_symbol_ - 1 - j)) & 1U);
    }

private:
    CVec points_;
    std::size_t bits_per_symbol_ = 0;
};

/// Natural-binary mapping of coded bits onto symbols.
CVec map_symbols(std::span<const std::uint8_t> bits, const Constellation& c);

/// Symbol indices of the mapped sequence; same grouping as map_symbols.
std::vector<std::size_t> symbol_indices(std::span<const std::uint8_t> bits, const Constellation& c);

struct DemapStats {
    std::size_t degenerate_rows = 0;
};

/// Soft symbol-to-bit demapping with sibling-bit priors (extrinsic per bit).
///
/// For bit j of symbol t the output is
///   log sum_{x : bit_j(x) = b} sym(t, x) * prod_{i != j} prior(t, i, bit_i(x)).
/// Offsets of `symbol_likelihoods` are carried through unchanged. Rows that
/// vanish entirely are replaced by uniform and counted in `stats`.
BitMessage demap_soft(const SymbolMessage& symbol_likelihoods, const BitMessage& bit_priors,
                      const Constellation& c, DemapStats* stats = nullptr);

/// Bit-to-symbol mapping: p(x = i) = prod_j p(bit_j = label_bit(i, j)), rows normalized.
SymbolMessage map_soft(const BitMessage& bit_probs, const Constellation& c);

}  // namespace blindem
