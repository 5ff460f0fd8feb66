#include "blindem/turbo.hpp"

#include "blindem/ambiguity.hpp"

namespace blindem {

Receiver::Receiver(Constellation c, std::size_t channel_memory, CodeSpec spec, Interleaver il,
                   std::size_t info_bits_)
    : constellation(std::move(c)),
      isi(constellation, channel_memory),
      code(std::move(spec)),
      code_trellis(code),
      interleaver(std::move(il)),
      info_bits(info_bits_) {
    if (info_bits == 0) throw std::invalid_argument("receiver needs at least one info bit");
    if (interleaver.size() != codeword_length())
        throw std::invalid_argument("interleaver length must equal the codeword length");
    if (codeword_length() % constellation.bits_per_symbol() != 0)
        throw std::invalid_argument("codeword length is not a multiple of bits per symbol");
}

SymbolMessage equalizer_extrinsic(const SymbolMessage& joint, const SymbolMessage& symbol_prior) {
    if (joint.rows() != symbol_prior.rows() || joint.alphabet() != symbol_prior.alphabet())
        throw std::invalid_argument("equalizer_extrinsic: shape mismatch");
    const SymbolMessage prior = symbol_prior.normalized_copy();
    SymbolMessage out(joint.rows(), joint.alphabet());
    for (std::size_t t = 0; t < joint.rows(); ++t)
        for (std::size_t i = 0; i < joint.alphabet(); ++i)
            out.at(t, i) = joint.at(t, i) - std::max(prior.at(t, i), kLogProbFloor);
    return out;
}

DecoderOutput decoder_pass(const BitMessage& bit_likelihoods, const CodeTrellis& tr,
                           std::size_t info_bits, OpCounter* counter) {
    const std::size_t S = tr.num_states();
    std::vector<double> known_zero(S, kNegInf);
    known_zero[0] = 0.0;

    const auto bm = code_branch_metrics(bit_likelihoods, tr, info_bits, counter);
    const FbResult fb = run_forward_backward(bm, tr.graph(), known_zero, known_zero);

    DecoderOutput out;
    out.log_evidence = fb.log_evidence;
    out.joint = marginalize_bits(fb, tr);

    const BitMessage input = bit_likelihoods.normalized_copy();
    out.extrinsic = BitMessage(out.joint.rows(), 2);
    for (std::size_t k = 0; k < out.joint.rows(); ++k)
        for (std::size_t b = 0; b < 2; ++b)
            out.extrinsic.at(k, b) = out.joint.at(k, b) - std::max(input.at(k, b), kLogProbFloor);
    out.extrinsic.normalize();

    const BitMessage inputs = marginalize_inputs(fb, tr);
    out.info_decisions.resize(info_bits);
    for (std::size_t k = 0; k < info_bits; ++k)
        out.info_decisions[k] = static_cast<std::uint8_t>(inputs.argmax(k));
    return out;
}

TurboOutcome run_turbo(const Receiver& rx, std::span<const Complex> y, const CVec& init_taps,
                       double sigma2, const TurboConfig& config, OpCounter* counter,
                       const SymbolMessage* genie_priors) {
    if (config.n_turbo < 1 || config.n_em < 1)
        throw std::invalid_argument("turbo and EM iteration counts must be positive");
    const std::size_t M = rx.constellation.order();
    const std::size_t T = y.size();
    if (T != rx.symbol_count()) throw std::invalid_argument("observation length does not match the frame");

    TurboOutcome out;
    out.models.reserve(config.n_turbo * config.n_em);

    SymbolMessage prior = genie_priors ? *genie_priors : SymbolMessage::uniform(T, M);
    BitMessage bit_prior = BitMessage::uniform(rx.codeword_length(), 2);
    GaussianModel model = GaussianModel::from_taps(rx.isi, init_taps, sigma2);
    const EmOptions em_options{config.n_em, true};

    for (std::size_t it = 0; it < config.n_turbo; ++it) {
        EmRun em = run_em(y, model, prior, rx.isi, em_options, counter);
        model = em.trajectory.back();
        for (auto& m : em.trajectory) out.models.push_back(std::move(m));
        FbResult fb = std::move(em.final);

        if (it == 0 && config.detector != DetectorMode::off) {
            Detection det = detect_ambiguity(y, model, rx, config.detector, config.margin, counter);
            if (det.refinement.applied) {
                model = det.refinement.model;
                out.models.back() = model;
                fb = em_e_step(y, model, prior, rx.isi, counter);
            }
            out.detection = std::move(det);
        }

        const SymbolMessage joint = marginalize_symbols(fb, rx.isi);
        const SymbolMessage sym_ext = equalizer_extrinsic(joint, prior);
        DemapStats stats;
        const BitMessage d_lik = demap_soft(sym_ext, bit_prior, rx.constellation, &stats);
        out.degenerate_demap_rows += stats.degenerate_rows;

        DecoderOutput dec = decoder_pass(rx.interleaver.deinterleave(d_lik), rx.code_trellis, rx.info_bits, counter);
        out.decoder_log_evidence = dec.log_evidence;
        out.info_decisions = std::move(dec.info_decisions);

        bit_prior = rx.interleaver.interleave(dec.extrinsic);
        prior = genie_priors ? *genie_priors : map_soft(bit_prior, rx.constellation);
    }
    return out;
}

}  // namespace blindem
