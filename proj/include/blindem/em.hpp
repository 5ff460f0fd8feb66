#pragma once

#include "blindem/forward_backward.hpp"

namespace blindem {

/// EM parameter set: one Gaussian mean per ISI edge, known noise variance.
struct GaussianModel {
    CVec means;
    CVec taps;
    double sigma2 = 0.0;
    std::size_t iteration = 0;

    /// Means constrained to D * taps.
    static GaussianModel from_taps(const IsiTrellis& tr, CVec taps, double sigma2);
};

/// Uniform start states and a free end, as seen by a blind receiver.
std::vector<double> isi_initial_alpha(const IsiTrellis& tr);
std::vector<double> isi_final_beta(const IsiTrellis& tr);

/// Edge responsibilities p(delta_t = l | y, model).
FbResult em_e_step(std::span<const Complex> y, const GaussianModel& model,
                   const SymbolMessage& symbol_priors, const IsiTrellis& tr,
                   OpCounter* counter = nullptr);

/// Responsibility-weighted mean per edge. Edges whose total responsibility
/// is below 1e-8 * T keep `previous_means`.
CVec em_m_step_unconstrained(const FbResult& fb, std::span<const Complex> y,
                             std::span<const Complex> previous_means);

struct Projection {
    CVec taps;
    CVec means;
};

/// Least-squares taps h = (D^H D)^{-1} D^H mu and the constrained means D h.
Projection project_linear(std::span<const Complex> unconstrained_means, const IsiTrellis& tr);

struct EmOptions {
    std::size_t iterations = 5;
    bool constrained = true;
};

struct EmRun {
    std::vector<GaussianModel> trajectory;  // model after each M-step
    std::vector<double> log_evidence;       // one per E-step, including the final one
    FbResult final;                         // E-step on the last model
};

/// Alternates E-step, M-step and (optionally) projection with the symbol
/// priors held fixed, then runs one more E-step on the final model.
EmRun run_em(std::span<const Complex> y, const GaussianModel& init,
             const SymbolMessage& symbol_priors, const IsiTrellis& tr, const EmOptions& options,
             OpCounter* counter = nullptr);

}  // namespace blindem
