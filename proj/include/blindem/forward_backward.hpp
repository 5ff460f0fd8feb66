#pragma once

#include "blindem/trellis.hpp"

#include <cstdint>

namespace blindem {

/// Branch-update tallies. ISI updates count one likelihood-times-prior per
/// edge per section; decoder updates count one bit-likelihood term per
/// output bit per branch per section.
struct OpCounter {
    std::uint64_t isi_branch_updates = 0;
    std::uint64_t decoder_branch_updates = 0;
    std::uint64_t isi_passes = 0;
    std::uint64_t decoder_passes = 0;
};

/// Closed-form branch-update counts for T symbols.
struct OperationCount {
    std::uint64_t isi_branch_updates = 0;      // T * M^L
    std::uint64_t decoder_branch_updates = 0;  // T * log2(M) * 2^Lc
};

OperationCount count_operations(const IsiTrellis& tr, const CodeSpec& code, std::size_t T);

/// T x E table of log branch metrics; -inf marks a forbidden branch.
struct BranchMetrics {
    std::size_t steps = 0;
    std::size_t num_edges = 0;
    std::vector<double> log_gamma;

    BranchMetrics() = default;
    BranchMetrics(std::size_t T, std::size_t E) : steps(T), num_edges(E), log_gamma(T * E, 0.0) {}

    double& at(std::size_t t, std::size_t e) { return log_gamma[t * num_edges + e]; }
    double at(std::size_t t, std::size_t e) const { return log_gamma[t * num_edges + e]; }
    std::span<double> row(std::size_t t) { return {log_gamma.data() + t * num_edges, num_edges}; }
    std::span<const double> row(std::size_t t) const {
        return {log_gamma.data() + t * num_edges, num_edges};
    }
};

/// log gamma_t(e) = -log(pi s2) - |y_t - mu_e|^2 / s2 + log p(x_t = input(e)).
BranchMetrics isi_branch_metrics(std::span<const Complex> y, std::span<const Complex> means,
                                 double sigma2, const SymbolMessage& symbol_priors,
                                 const IsiTrellis& tr, OpCounter* counter = nullptr);

/// Decoder branch metrics from per-coded-bit log likelihoods. The first
/// `info_bits` sections carry a log(1/2) input prior; the remaining tail
/// sections only allow input 0.
BranchMetrics code_branch_metrics(const BitMessage& bit_likelihoods, const CodeTrellis& tr,
                                  std::size_t info_bits, OpCounter* counter = nullptr);

struct FbResult {
    std::size_t steps = 0;
    std::size_t num_states = 0;
    std::size_t num_edges = 0;
    std::vector<double> log_alpha;        // (T+1) x S, unnormalized
    std::vector<double> log_beta;         // (T+1) x S, unnormalized
    std::vector<double> log_posteriors;   // T x E, rows log-sum-exp to 0
    double log_evidence = 0.0;

    double alpha(std::size_t t, std::size_t s) const { return log_alpha[t * num_states + s]; }
    double beta(std::size_t t, std::size_t s) const { return log_beta[t * num_states + s]; }
    double log_posterior(std::size_t t, std::size_t e) const { return log_posteriors[t * num_edges + e]; }
    double posterior(std::size_t t, std::size_t e) const { return std::exp(log_posterior(t, e)); }
    std::span<const double> log_posterior_row(std::size_t t) const {
        return {log_posteriors.data() + t * num_edges, num_edges};
    }
};

/// Log-domain BCJR. `log_init_alpha` weights the start states and
/// `log_final_beta` the end states (all zeros leaves the end free).
/// Throws std::runtime_error when no path survives.
FbResult run_forward_backward(const BranchMetrics& bm, const TrellisGraph& graph,
                              std::span<const double> log_init_alpha,
                              std::span<const double> log_final_beta);

/// log p(x_t = i, y): edge posteriors summed per driving symbol, plus log evidence.
SymbolMessage marginalize_symbols(const FbResult& fb, const IsiTrellis& tr);

/// log p(c_k = b, y) for every coded bit; rows log-sum-exp to the log evidence.
BitMessage marginalize_bits(const FbResult& fb, const CodeTrellis& tr);

/// Normalized posterior of each section's input bit.
BitMessage marginalize_inputs(const FbResult& fb, const CodeTrellis& tr);

}  // namespace blindem
