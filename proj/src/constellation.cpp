#include "blindem/constellation.hpp"

#include <bit>

namespace blindem {

Constellation::Constellation(std::size_t order) {
    if (order < 2 || !std::has_single_bit(order))
        throw std::invalid_argument("constellation order must be a power of two >= 2");
    bits_per_symbol_ = static_cast<std::size_t>(std::countr_zero(order));
    points_.resize(order);
    for (std::size_t i = 0; i < order; ++i)
        points_[i] = std::polar(1.0, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(order));
}

std::vector<std::size_t> symbol_indices(std::span<const std::uint8_t> bits, const Constellation& c) {
    const std::size_t m = c.bits_per_symbol();
    if (bits.size() % m != 0)
        throw std::invalid_argument("bit count is not a multiple of bits per symbol");
    std::vector<std::size_t> idx(bits.size() / m);
    for (std::size_t t = 0; t < idx.size(); ++t) {
        std::size_t v = 0;
        for (std::size_t j = 0; j < m; ++j) v = (v << 1) | (bits[t * m + j] & 1U);
        idx[t] = v;
    }
    return idx;
}

CVec map_symbols(std::span<const std::uint8_t> bits, const Constellation& c) {
    const auto idx = symbol_indices(bits, c);
    CVec out(idx.size());
    for (std::size_t t = 0; t < idx.size(); ++t) out[t] = c.point(idx[t]);
    return out;
}

BitMessage demap_soft(const SymbolMessage& symbol_likelihoods, const BitMessage& bit_priors,
                      const Constellation& c, DemapStats* stats) {
    const std::size_t M = c.order();
    const std::size_t m = c.bits_per_symbol();
    const std::size_t T = symbol_likelihoods.rows();
    if (symbol_likelihoods.alphabet() != M)
        throw std::invalid_argument("demap_soft: symbol message alphabet does not match constellation");
    if (bit_priors.rows() != T * m || bit_priors.alphabet() != 2)
        throw std::invalid_argument("demap_soft: bit prior length does not match symbol count");

    const BitMessage priors = bit_priors.normalized_copy();
    BitMessage out(T * m, 2, kNegInf);
    std::vector<double> prior_sum(M);

    for (std::size_t t = 0; t < T; ++t) {
        // Sum of all bit priors for each label; sibling sums subtract the own bit.
        for (std::size_t x = 0; x < M; ++x) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += priors.at(t * m + j, c.label_bit(x, j));
            prior_sum[x] = s;
        }
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = t * m + j;
            for (std::size_t x = 0; x < M; ++x) {
                const std::uint8_t b = c.label_bit(x, j);
                const double own = priors.at(k, b);
                double sibling = prior_sum[x] - own;
                if (own == kNegInf) {
                    // Recompute without the -inf own term to avoid inf - inf.
                    sibling = 0.0;
                    for (std::size_t i = 0; i < m; ++i)
                        if (i != j) sibling += priors.at(t * m + i, c.label_bit(x, i));
                }
                const double term = symbol_likelihoods.at(t, x) + sibling;
                out.at(k, b) = log_add(out.at(k, b), term);
            }
            if (out.at(k, 0) == kNegInf && out.at(k, 1) == kNegInf) {
                out.at(k, 0) = out.at(k, 1) = -std::log(2.0);
                if (stats) ++stats->degenerate_rows;
            }
        }
    }
    return out;
}

SymbolMessage map_soft(const BitMessage& bit_probs, const Constellation& c) {
    const std::size_t M = c.order();
    const std::size_t m = c.bits_per_symbol();
    if (bit_probs.alphabet() != 2 || bit_probs.rows() % m != 0)
        throw std::invalid_argument("map_soft: bit count is not a multiple of bits per symbol");
    const BitMessage bits = bit_probs.normalized_copy();
    const std::size_t T = bits.rows() / m;
    SymbolMessage out(T, M);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t x = 0; x < M; ++x) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += bits.at(t * m + j, c.label_bit(x, j));
            out.at(t, x) = s;
        }
    }
    out.normalize();
    return out;
}

}  // namespace blindem
