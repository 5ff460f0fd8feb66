#pragma once

#include "blindem/em.hpp"

#include <optional>

namespace blindem {

/// Everything the receiver knows about the frame format.
struct Receiver {
    Constellation constellation;
    IsiTrellis isi;
    CodeSpec code;
    CodeTrellis code_trellis;
    Interleaver interleaver;
    std::size_t info_bits = 0;

    Receiver(Constellation c, std::size_t channel_memory, CodeSpec spec, Interleaver il, std::size_t info_bits);

    std::size_t codeword_length() const { return code.codeword_length(info_bits); }
    std::size_t symbol_count() const { return codeword_length() / constellation.bits_per_symbol(); }
};

/// Probabilities below this are clamped before being divided out.
inline constexpr double kLogProbFloor = -27.631021115928547;  // log(1e-12)

/// p^E(y | x_t) = p(x_t, y) / p^E(x_t). The joint's absolute offset is kept.
SymbolMessage equalizer_extrinsic(const SymbolMessage& joint, const SymbolMessage& symbol_prior);

struct DecoderOutput {
    BitMessage joint;      // log p(c_k, y), rows sum to the evidence
    BitMessage extrinsic;  // p^E(c_k), normalized
    double log_evidence = 0.0;
    Bits info_decisions;
};

/// Soft-in soft-out decoding with known zero start and end states.
DecoderOutput decoder_pass(const BitMessage& bit_likelihoods, const CodeTrellis& tr,
                           std::size_t info_bits, OpCounter* counter = nullptr);

enum class DetectorMode { off, phase, joint };

struct MarginRule {
    double threshold = 1e3;  // natural-log evidence units
};

struct TurboConfig {
    std::size_t n_turbo = 7;
    std::size_t n_em = 5;
    DetectorMode detector = DetectorMode::off;
    MarginRule margin;
};

struct HypothesisScore {
    std::size_t phase_index = 0;
    std::size_t shift_index = 0;
    double log_evidence = 0.0;
};

struct Refinement {
    GaussianModel model;
    bool applied = false;
    std::size_t phase_index = 0;
    std::size_t shift_index = 0;
    double margin = 0.0;  // best minus runner-up log evidence
};

struct Detection {
    std::vector<HypothesisScore> scores;
    Refinement refinement;
};

struct TurboOutcome {
    std::vector<GaussianModel> models;  // one per EM iteration, n_turbo * n_em
    std::optional<Detection> detection;
    Bits info_decisions;
    double decoder_log_evidence = 0.0;
    std::size_t degenerate_demap_rows = 0;
};

/// Code-aided EM with turbo equalization. Ambiguity detection, when enabled,
/// runs once after the first turbo iteration's EM pass. With `genie_priors`
/// the equalizer priors stay fixed at the given table instead of decoder feedback.
TurboOutcome run_turbo(const Receiver& rx, std::span<const Complex> y, const CVec& init_taps,
                       double sigma2, const TurboConfig& config, OpCounter* counter = nullptr,
                       const SymbolMessage* genie_priors = nullptr);

}  // namespace blindem
