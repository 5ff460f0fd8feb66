#include "blindem/ambiguity.hpp"

namespace blindem {

std::vector<SymbolMessage> phase_hypotheses(const SymbolMessage& extrinsic) {
    const std::size_t M = extrinsic.alphabet();
    std::vector<SymbolMessage> out;
    out.reserve(M);
    for (std::size_t i = 0; i < M; ++i) {
        SymbolMessage cand(extrinsic.rows(), M);
        for (std::size_t t = 0; t < extrinsic.rows(); ++t)
            for (std::size_t m = 0; m < M; ++m) cand.at(t, m) = extrinsic.at(t, (m + M - i) % M);
        cand.mark_normalized(extrinsic.normalized());
        out.push_back(std::move(cand));
    }
    return out;
}

std::vector<CVec> shift_hypotheses(std::span<const Complex> taps) {
    const std::size_t L = taps.size();
    if (L == 0) throw std::invalid_argument("shift_hypotheses needs at least one tap");
    std::vector<CVec> out(L, CVec(L));
    for (std::size_t tau = 0; tau < L; ++tau)
        for (std::size_t l = 0; l < L; ++l) out[tau][l] = taps[(l + L - tau) % L];
    return out;
}

std::vector<HypothesisScore> score_hypotheses(std::span<const Complex> y, std::span<const Complex> taps,
                                              double sigma2, const Receiver& rx, DetectorMode mode,
                                              OpCounter* counter) {
    if (mode == DetectorMode::off) return {};
    const std::size_t M = rx.constellation.order();
    const std::size_t T = y.size();
    const auto shifts = shift_hypotheses(taps);
    const std::size_t n_shift = mode == DetectorMode::joint ? shifts.size() : 1;
    const SymbolMessage uniform = SymbolMessage::uniform(T, M);
    const BitMessage uniform_bits = BitMessage::uniform(rx.codeword_length(), 2);

    std::vector<HypothesisScore> scores;
    scores.reserve(n_shift * M);
    for (std::size_t tau = 0; tau < n_shift; ++tau) {
        const GaussianModel candidate = GaussianModel::from_taps(rx.isi, shifts[tau], sigma2);
        const FbResult fb = em_e_step(y, candidate, uniform, rx.isi, counter);
        const SymbolMessage ext = equalizer_extrinsic(marginalize_symbols(fb, rx.isi), uniform);
        const auto phases = phase_hypotheses(ext);
        for (std::size_t i = 0; i < M; ++i) {
            BitMessage d_lik = demap_soft(phases[i], uniform_bits, rx.constellation);
            d_lik.normalize();
            const DecoderOutput dec =
                decoder_pass(rx.interleaver.deinterleave(d_lik), rx.code_trellis, rx.info_bits, counter);
            scores.push_back({i, tau, dec.log_evidence});
        }
    }
    return scores;
}

Refinement select_and_refine(std::span<const HypothesisScore> scores, const GaussianModel& model,
                             const MarginRule& rule, const IsiTrellis& tr) {
    if (scores.empty()) throw std::invalid_argument("select_and_refine needs at least one score");
    if (rule.threshold < 0.0) throw std::invalid_argument("margin threshold must be non-negative");

    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k)
        if (scores[k].log_evidence > scores[best].log_evidence) best = k;
    double runner_up = kNegInf;
    for (std::size_t k = 0; k < scores.size(); ++k)
        if (k != best) runner_up = std::max(runner_up, scores[k].log_evidence);

    Refinement r;
    r.model = model;
    r.phase_index = scores[best].phase_index;
    r.shift_index = scores[best].shift_index;
    r.margin = scores[best].log_evidence - runner_up;
    if (!(r.margin >= rule.threshold)) return r;

    const double phi = 2.0 * kPi * static_cast<double>(r.phase_index) / static_cast<double>(tr.order());
    const Complex derotate = std::polar(1.0, -phi);
    CVec taps = shift_hypotheses(model.taps)[r.shift_index];
    for (auto& h : taps) h *= derotate;
    r.model = GaussianModel::from_taps(tr, std::move(taps), model.sigma2);
    r.model.iteration = model.iteration;
    r.applied = true;
    return r;
}

Detection detect_ambiguity(std::span<const Complex> y, const GaussianModel& model, const Receiver& rx,
                           DetectorMode mode, const MarginRule& rule, OpCounter* counter) {
    Detection d;
    d.scores = score_hypotheses(y, model.taps, model.sigma2, rx, mode, counter);
    if (d.scores.empty()) {
        d.refinement.model = model;
        return d;
    }
    d.refinement = select_and_refine(d.scores, model, rule, rx.isi);
    return d;
}

}  // namespace blindem
