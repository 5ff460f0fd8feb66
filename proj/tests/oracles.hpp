#pragma once

// Brute-force reference computations. These enumerate every symbol sequence
// or codeword directly and share no code with the trellis recursions.

#include "blindem/coding.hpp"
#include "blindem/constellation.hpp"
#include "blindem/types.hpp"

#include <array>
#include <random>

namespace blindem::oracle {

struct IsiEnumeration {
    std::vector<std::vector<double>> edge_posteriors;    // T x E
    std::vector<std::vector<double>> symbol_posteriors;  // T x M
    double log_evidence = 0.0;
};

/// Enumerates all M^(L-1) initial memories (uniform) and all M^T sequences.
/// `log_priors[t][i]` is log p(x_t = i). Edge index = sum_l idx(x_{t-l}) M^l.
inline IsiEnumeration enumerate_isi(const CVec& y, const CVec& taps, double sigma2,
                                    const Constellation& c,
                                    const std::vector<std::vector<double>>& log_priors) {
    const std::size_t M = c.order();
    const std::size_t L = taps.size();
    const std::size_t T = y.size();
    std::size_t E = 1;
    for (std::size_t l = 0; l < L; ++l) E *= M;
    std::size_t S = E / M;

    std::size_t total = S;
    for (std::size_t t = 0; t < T; ++t) total *= M;

    // seq holds L-1 memory symbols (oldest first) then x_0..x_{T-1}.
    std::vector<std::size_t> seq(L - 1 + T);
    std::vector<double> log_w(total);
    std::vector<std::vector<std::size_t>> edges(total, std::vector<std::size_t>(T));
    std::vector<std::vector<std::size_t>> syms(total, std::vector<std::size_t>(T));

    for (std::size_t n = 0; n < total; ++n) {
        std::size_t v = n;
        for (auto& s : seq) {
            s = v % M;
            v /= M;
        }
        double lw = -std::log(static_cast<double>(S));
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t pos = L - 1 + t;
            Complex z{};
            std::size_t e = 0, mul = 1;
            for (std::size_t l = 0; l < L; ++l) {
                const std::size_t idx = seq[pos - l];
                z += taps[l] * c.point(idx);
                e += idx * mul;
                mul *= M;
            }
            lw += -std::log(kPi * sigma2) - std::norm(y[t] - z) / sigma2 + log_priors[t][seq[pos]];
            edges[n][t] = e;
            syms[n][t] = seq[pos];
        }
        log_w[n] = lw;
    }

    IsiEnumeration out;
    out.log_evidence = log_sum_exp(log_w);
    out.edge_posteriors.assign(T, std::vector<double>(E, 0.0));
    out.symbol_posteriors.assign(T, std::vector<double>(M, 0.0));
    for (std::size_t n = 0; n < total; ++n) {
        const double p = std::exp(log_w[n] - out.log_evidence);
        for (std::size_t t = 0; t < T; ++t) {
            out.edge_posteriors[t][edges[n][t]] += p;
            out.symbol_posteriors[t][syms[n][t]] += p;
        }
    }
    return out;
}

struct CodebookEnumeration {
    std::vector<std::array<double, 2>> coded_posteriors;  // per coded bit
    std::vector<std::array<double, 2>> info_posteriors;   // per info bit
    double log_evidence = 0.0;
};

/// Exhaustive Bayes over all 2^K codewords with a uniform prior 2^-K.
/// `log_lik[k][b]` is log p(y | c_k = b).
inline CodebookEnumeration enumerate_codebook(std::size_t K, const CodeSpec& spec,
                                              const std::vector<std::array<double, 2>>& log_lik) {
    const std::size_t words = std::size_t{1} << K;
    std::vector<double> log_w(words);
    std::vector<Bits> code(words), info(words);
    for (std::size_t w = 0; w < words; ++w) {
        Bits u(K);
        for (std::size_t k = 0; k < K; ++k) u[k] = static_cast<std::uint8_t>((w >> k) & 1U);
        // Direct polynomial convolution: c_j[k] = XOR_i g_j[i] u[k - i].
        const std::size_t Lc = spec.constraint_length;
        Bits padded = u;
        padded.resize(K + spec.termination_bits, 0);
        Bits c;
        for (std::size_t k = 0; k < padded.size(); ++k) {
            for (unsigned g : spec.generators) {
                unsigned bit = 0;
                for (std::size_t i = 0; i < Lc; ++i) {
                    const bool tap = (g >> (Lc - 1 - i)) & 1U;
                    if (tap && k >= i) bit ^= padded[k - i];
                }
                c.push_back(static_cast<std::uint8_t>(bit));
            }
        }
        double lw = -static_cast<double>(K) * std::log(2.0);
        for (std::size_t k = 0; k < c.size(); ++k) lw += log_lik[k][c[k]];
        log_w[w] = lw;
        code[w] = std::move(c);
        info[w] = std::move(u);
    }
    CodebookEnumeration out;
    out.log_evidence = log_sum_exp(log_w);
    out.coded_posteriors.assign(code[0].size(), {0.0, 0.0});
    out.info_posteriors.assign(K, {0.0, 0.0});
    for (std::size_t w = 0; w < words; ++w) {
        const double p = std::exp(log_w[w] - out.log_evidence);
        for (std::size_t k = 0; k < code[w].size(); ++k) out.coded_posteriors[k][code[w][k]] += p;
        for (std::size_t k = 0; k < K; ++k) out.info_posteriors[k][info[w][k]] += p;
    }
    return out;
}

/// Exhaustive demapping: enumerate every bit pattern of every symbol, weight
/// by the symbol likelihood and the priors of all bits except the target.
inline std::vector<std::array<double, 2>> enumerate_demap(const std::vector<std::vector<double>>& sym_lik,
                                                          const std::vector<std::array<double, 2>>& bit_prior,
                                                          std::size_t bits_per_symbol) {
    const std::size_t m = bits_per_symbol;
    const std::size_t T = sym_lik.size();
    const std::size_t nbits = T * m;
    std::vector<std::array<double, 2>> out(nbits, {0.0, 0.0});
    for (std::size_t pattern = 0; pattern < (std::size_t{1} << nbits); ++pattern) {
        auto bit = [&](std::size_t k) { return static_cast<std::size_t>((pattern >> (nbits - 1 - k)) & 1U); };
        for (std::size_t target = 0; target < nbits; ++target) {
            double w = 1.0;
            for (std::size_t t = 0; t < T; ++t) {
                std::size_t idx = 0;
                for (std::size_t j = 0; j < m; ++j) idx = (idx << 1) | bit(t * m + j);
                w *= sym_lik[t][idx];
            }
            for (std::size_t k = 0; k < nbits; ++k)
                if (k != target) w *= bit_prior[k][bit(k)];
            out[target][bit(target)] += w;
        }
    }
    // The other symbols contribute a common factor per target; divide it out
    // so values compare with a per-symbol demapper.
    for (std::size_t target = 0; target < nbits; ++target) {
        const std::size_t own = target / m;
        double common = 1.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (t == own) continue;
            double s = 0.0;
            for (std::size_t idx = 0; idx < (std::size_t{1} << m); ++idx) {
                double w = sym_lik[t][idx];
                for (std::size_t j = 0; j < m; ++j) w *= bit_prior[t * m + j][(idx >> (m - 1 - j)) & 1U];
                s += w;
            }
            common *= s;
        }
        out[target][0] /= common;
        out[target][1] /= common;
    }
    return out;
}

/// Complex normal equations solved by explicit Gaussian elimination.
inline CVec least_squares_normal_equations(const std::vector<CVec>& rows, const CVec& rhs) {
    const std::size_t n = rows.front().size();
    std::vector<CVec> a(n, CVec(n + 1, Complex{}));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i][j] += std::conj(rows[r][i]) * rows[r][j];
            a[i][n] += std::conj(rows[r][i]) * rhs[r];
        }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    CVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return x;
}

inline CVec random_cvec(std::mt19937_64& rng, std::size_t n, double variance = 1.0) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    CVec v(n);
    for (auto& z : v) {
        const double re = nd(rng);
        z = {re, nd(rng)};
    }
    return v;
}

}  // namespace blindem::oracle
