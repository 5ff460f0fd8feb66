#include "blindem/forward_backward.hpp"

#include <string>

namespace blindem {

OperationCount count_operations(const IsiTrellis& tr, const CodeSpec& code, std::size_t T) {
    const std::size_t M = tr.order();
    std::size_t log2m = 0;
    while ((std::size_t{1} << log2m) < M) ++log2m;
    OperationCount c;
    c.isi_branch_updates = static_cast<std::uint64_t>(T * tr.num_edges());
    c.decoder_branch_updates = static_cast<std::uint64_t>(T * log2m * (std::size_t{1} << code.constraint_length));
    return c;
}

BranchMetrics isi_branch_metrics(std::span<const Complex> y, std::span<const Complex> means,
                                 double sigma2, const SymbolMessage& symbol_priors,
                                 const IsiTrellis& tr, OpCounter* counter) {
    const std::size_t T = y.size();
    const std::size_t E = tr.num_edges();
    const std::size_t M = tr.order();
    if (means.size() != E) throw std::invalid_argument("means length must equal edge count");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
    if (symbol_priors.rows() != T || symbol_priors.alphabet() != M)
        throw std::invalid_argument("symbol priors do not match observation length");

    BranchMetrics bm(T, E);
    const double log_norm = -std::log(kPi * sigma2);
    const double inv_s2 = 1.0 / sigma2;
    for (std::size_t t = 0; t < T; ++t) {
        auto row = bm.row(t);
        const auto prior = symbol_priors.row(t);
        for (std::size_t e = 0; e < E; ++e)
            row[e] = log_norm - std::norm(y[t] - means[e]) * inv_s2 + prior[e % M];
    }
    if (counter) {
        counter->isi_branch_updates += static_cast<std::uint64_t>(T * E);
        ++counter->isi_passes;
    }
    return bm;
}

BranchMetrics code_branch_metrics(const BitMessage& bit_likelihoods, const CodeTrellis& tr,
                                  std::size_t info_bits, OpCounter* counter) {
    const std::size_t r = tr.spec().rate_inv();
    if (bit_likelihoods.alphabet() != 2 || bit_likelihoods.rows() % r != 0)
        throw std::invalid_argument("bit likelihoods do not align with the code rate");
    const std::size_t K = bit_likelihoods.rows() / r;
    if (info_bits > K) throw std::invalid_argument("more info bits than trellis sections");
    const std::size_t E = tr.num_edges();
    const double half = -std::log(2.0);

    BranchMetrics bm(K, E);
    for (std::size_t k = 0; k < K; ++k) {
        const bool tail = k >= info_bits;
        auto row = bm.row(k);
        for (std::size_t e = 0; e < E; ++e) {
            if (tail && tr.input_bit(e) == 1) {
                row[e] = kNegInf;
                continue;
            }
            double g = tail ? 0.0 : half;
            for (std::size_t j = 0; j < r; ++j) g += bit_likelihoods.at(k * r + j, tr.output_bit(e, j));
            row[e] = g;
        }
    }
    if (counter) {
        counter->decoder_branch_updates += static_cast<std::uint64_t>(K * E * r);
        ++counter->decoder_passes;
    }
    return bm;
}

FbResult run_forward_backward(const BranchMetrics& bm, const TrellisGraph& graph,
                              std::span<const double> log_init_alpha,
                              std::span<const double> log_final_beta) {
    const std::size_t T = bm.steps;
    const std::size_t S = graph.num_states;
    const std::size_t E = graph.num_edges();
    if (bm.num_edges != E) throw std::invalid_argument("branch metrics do not match trellis");
    if (log_init_alpha.size() != S || log_final_beta.size() != S)
        throw std::invalid_argument("boundary distributions must cover every state");

    FbResult fb;
    fb.steps = T;
    fb.num_states = S;
    fb.num_edges = E;
    fb.log_alpha.assign((T + 1) * S, kNegInf);
    fb.log_beta.assign((T + 1) * S, kNegInf);
    fb.log_posteriors.assign(T * E, kNegInf);

    std::copy(log_init_alpha.begin(), log_init_alpha.end(), fb.log_alpha.begin());
    std::copy(log_final_beta.begin(), log_final_beta.end(), fb.log_beta.begin() + static_cast<std::ptrdiff_t>(T * S));

    std::vector<double> term(E);
    std::vector<double> peak(S);
    std::vector<double> acc(S);

    // Every state sums its incoming terms around its own maximum, so a state
    // only becomes -inf when all of its paths are forbidden. A shared
    // per-section maximum would flush states that are far below the current
    // leader but still on the best complete path.
    auto reduce = [&](std::size_t t, auto endpoint, double* out) {
        std::fill(peak.begin(), peak.end(), kNegInf);
        bool alive = false;
        for (std::size_t e = 0; e < E; ++e) {
            if (std::isnan(term[e]))
                throw std::runtime_error("inconsistent trellis/metrics: NaN metric at step " + std::to_string(t));
            double& p = peak[endpoint(graph.edges[e])];
            p = std::max(p, term[e]);
            alive = alive || term[e] != kNegInf;
        }
        if (!alive)
            throw std::runtime_error("inconsistent trellis/metrics: no surviving path at step " + std::to_string(t));
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t e = 0; e < E; ++e) {
            const std::size_t s = endpoint(graph.edges[e]);
            if (peak[s] != kNegInf) acc[s] += std::exp(term[e] - peak[s]);
        }
        for (std::size_t s = 0; s < S; ++s) out[s] = peak[s] == kNegInf ? kNegInf : peak[s] + std::log(acc[s]);
    };

    for (std::size_t t = 0; t < T; ++t) {
        const double* a = &fb.log_alpha[t * S];
        const auto g = bm.row(t);
        for (std::size_t e = 0; e < E; ++e) term[e] = a[graph.edges[e].from] + g[e];
        reduce(t, [](const TrellisEdge& e) { return e.to; }, &fb.log_alpha[(t + 1) * S]);
    }

    for (std::size_t t = T; t-- > 0;) {
        const double* b = &fb.log_beta[(t + 1) * S];
        const auto g = bm.row(t);
        for (std::size_t e = 0; e < E; ++e) term[e] = b[graph.edges[e].to] + g[e];
        reduce(t, [](const TrellisEdge& e) { return e.from; }, &fb.log_beta[t * S]);
    }

    {
        std::vector<double> end(S);
        for (std::size_t s = 0; s < S; ++s) end[s] = fb.alpha(T, s) + fb.beta(T, s);
        fb.log_evidence = log_sum_exp(end);
        if (!std::isfinite(fb.log_evidence))
            throw std::runtime_error("inconsistent trellis/metrics: evidence is not finite");
    }

    for (std::size_t t = 0; t < T; ++t) {
        const auto g = bm.row(t);
        double m = kNegInf;
        for (std::size_t e = 0; e < E; ++e) {
            term[e] = fb.alpha(t, graph.edges[e].from) + g[e] + fb.beta(t + 1, graph.edges[e].to);
            m = std::max(m, term[e]);
        }
        double z = 0.0;
        for (std::size_t e = 0; e < E; ++e) z += std::exp(term[e] - m);
        const double lz = m + std::log(z);
        double* post = &fb.log_posteriors[t * E];
        for (std::size_t e = 0; e < E; ++e) post[e] = term[e] - lz;
    }
    return fb;
}

namespace {

/// Log-sum-exp of a section's log posteriors grouped by `key(e)` into `out`.
template <class Key>
void group_log_sum(std::span<const double> lp, std::size_t groups, Key key, std::vector<double>& out) {
    std::vector<double> m(groups, kNegInf);
    for (std::size_t e = 0; e < lp.size(); ++e) m[key(e)] = std::max(m[key(e)], lp[e]);
    out.assign(groups, 0.0);
    for (std::size_t e = 0; e < lp.size(); ++e)
        if (m[key(e)] != kNegInf) out[key(e)] += std::exp(lp[e] - m[key(e)]);
    for (std::size_t g = 0; g < groups; ++g) out[g] = m[g] == kNegInf ? kNegInf : m[g] + std::log(out[g]);
}

}  // namespace

SymbolMessage marginalize_symbols(const FbResult& fb, const IsiTrellis& tr) {
    if (fb.num_edges != tr.num_edges()) throw std::invalid_argument("result does not match ISI trellis");
    const std::size_t M = tr.order();
    SymbolMessage out(fb.steps, M);
    std::vector<double> p;
    for (std::size_t t = 0; t < fb.steps; ++t) {
        group_log_sum(fb.log_posterior_row(t), M, [M](std::size_t e) { return e % M; }, p);
        for (std::size_t i = 0; i < M; ++i) out.at(t, i) = p[i] + fb.log_evidence;
    }
    return out;
}

BitMessage marginalize_bits(const FbResult& fb, const CodeTrellis& tr) {
    if (fb.num_edges != tr.num_edges()) throw std::invalid_argument("result does not match code trellis");
    const std::size_t r = tr.spec().rate_inv();
    BitMessage out(fb.steps * r, 2);
    std::vector<double> p;
    for (std::size_t k = 0; k < fb.steps; ++k) {
        for (std::size_t j = 0; j < r; ++j) {
            group_log_sum(fb.log_posterior_row(k), 2, [&](std::size_t e) { return tr.output_bit(e, j); }, p);
            out.at(k * r + j, 0) = p[0] + fb.log_evidence;
            out.at(k * r + j, 1) = p[1] + fb.log_evidence;
        }
    }
    return out;
}

BitMessage marginalize_inputs(const FbResult& fb, const CodeTrellis& tr) {
    if (fb.num_edges != tr.num_edges()) throw std::invalid_argument("result does not match code trellis");
    BitMessage out(fb.steps, 2);
    std::vector<double> p;
    for (std::size_t k = 0; k < fb.steps; ++k) {
        group_log_sum(fb.log_posterior_row(k), 2, [&](std::size_t e) { return tr.input_bit(e); }, p);
        out.at(k, 0) = p[0];
        out.at(k, 1) = p[1];
    }
    out.mark_normalized(true);
    return out;
}

}  // namespace blindem
