#pragma once

#include "blindem/turbo.hpp"

namespace blindem {

/// The M phase candidates of an extrinsic symbol table. Candidate i reads
/// row entry m from index (m - i) mod M: if the estimate is the true channel
/// rotated by e^{j 2 pi k / M}, candidate k realigns the symbol labels.
std::vector<SymbolMessage> phase_hypotheses(const SymbolMessage& extrinsic);

/// The L circular tap shifts; candidate tau has taps[(l - tau) mod L] at l.
std::vector<CVec> shift_hypotheses(std::span<const Complex> taps);

/// Decoder log evidence of every (phase, shift) model, shift-major order.
///
/// For each shift the equalizer runs once with uniform priors on
/// D * (taps shifted by tau); each phase candidate of its extrinsic output
/// is then demapped, deinterleaved and decoded. Bit likelihoods are
/// normalized per bit before decoding, so the evidence measures how well
/// the bit beliefs agree with the code. Phase mode scores tau = 0 only.
std::vector<HypothesisScore> score_hypotheses(std::span<const Complex> y, std::span<const Complex> taps,
                                              double sigma2, const Receiver& rx, DetectorMode mode,
                                              OpCounter* counter = nullptr);

/// Argmax with a margin: refine to e^{-j phi} D (taps shifted by tau) only when
/// the winner beats the runner-up by at least `rule.threshold`.
Refinement select_and_refine(std::span<const HypothesisScore> scores, const GaussianModel& model,
                             const MarginRule& rule, const IsiTrellis& tr);

/// Scores the current model and applies the refinement rule.
Detection detect_ambiguity(std::span<const Complex> y, const GaussianModel& model, const Receiver& rx,
                           DetectorMode mode, const MarginRule& rule, OpCounter* counter = nullptr);

}  // namespace blindem
