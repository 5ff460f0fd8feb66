#include "blindem/em.hpp"

namespace blindem {

GaussianModel GaussianModel::from_taps(const IsiTrellis& tr, CVec taps, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
    GaussianModel m;
    m.means = means_from_taps(tr, taps);
    m.taps = std::move(taps);
    m.sigma2 = sigma2;
    return m;
}

std::vector<double> isi_initial_alpha(const IsiTrellis& tr) {
    return std::vector<double>(tr.num_states(), -std::log(static_cast<double>(tr.num_states())));
}

std::vector<double> isi_final_beta(const IsiTrellis& tr) {
    return std::vector<double>(tr.num_states(), 0.0);
}

FbResult em_e_step(std::span<const Complex> y, const GaussianModel& model,
                   const SymbolMessage& symbol_priors, const IsiTrellis& tr, OpCounter* counter) {
    const auto bm = isi_branch_metrics(y, model.means, model.sigma2, symbol_priors, tr, counter);
    return run_forward_backward(bm, tr.graph(), isi_initial_alpha(tr), isi_final_beta(tr));
}

CVec em_m_step_unconstrained(const FbResult& fb, std::span<const Complex> y,
                             std::span<const Complex> previous_means) {
    const std::size_t T = fb.steps;
    const std::size_t E = fb.num_edges;
    if (y.size() != T) throw std::invalid_argument("observation length does not match responsibilities");
    if (previous_means.size() != E) throw std::invalid_argument("previous means length must equal edge count");

    CVec num(E, Complex{});
    std::vector<double> den(E, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const auto lp = fb.log_posterior_row(t);
        for (std::size_t e = 0; e < E; ++e) {
            const double r = std::exp(lp[e]);
            num[e] += r * y[t];
            den[e] += r;
        }
    }
    const double floor = 1e-8 * static_cast<double>(T);
    CVec out(E);
    for (std::size_t e = 0; e < E; ++e) out[e] = den[e] < floor ? previous_means[e] : num[e] / den[e];
    return out;
}

Projection project_linear(std::span<const Complex> unconstrained_means, const IsiTrellis& tr) {
    if (unconstrained_means.size() != tr.num_edges())
        throw std::invalid_argument("unconstrained means length must equal edge count");
    const auto& pinv = tr.pseudo_inverse();
    const auto& d = tr.d_matrix();
    Eigen::Map<const Eigen::VectorXcd> mu(unconstrained_means.data(),
                                          static_cast<Eigen::Index>(unconstrained_means.size()));
    const Eigen::VectorXcd h = pinv * mu;
    const Eigen::VectorXcd fitted = d * h;
    Projection p;
    p.taps.assign(h.data(), h.data() + h.size());
    p.means.assign(fitted.data(), fitted.data() + fitted.size());
    return p;
}

EmRun run_em(std::span<const Complex> y, const GaussianModel& init,
             const SymbolMessage& symbol_priors, const IsiTrellis& tr, const EmOptions& options,
             OpCounter* counter) {
    if (options.iterations < 1) throw std::invalid_argument("run_em needs at least one iteration");
    EmRun run;
    run.trajectory.reserve(options.iterations);
    GaussianModel model = init;
    for (std::size_t n = 0; n < options.iterations; ++n) {
        FbResult fb = em_e_step(y, model, symbol_priors, tr, counter);
        run.log_evidence.push_back(fb.log_evidence);
        CVec mu = em_m_step_unconstrained(fb, y, model.means);
        if (options.constrained) {
            auto proj = project_linear(mu, tr);
            model.taps = std::move(proj.taps);
            model.means = std::move(proj.means);
        } else {
            model.taps = project_linear(mu, tr).taps;
            model.means = std::move(mu);
        }
        ++model.iteration;
        run.trajectory.push_back(model);
    }
    run.final = em_e_step(y, model, symbol_priors, tr, counter);
    run.log_evidence.push_back(run.final.log_evidence);
    return run;
}

}  // namespace blindem
