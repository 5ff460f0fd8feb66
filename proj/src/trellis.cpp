#include "blindem/trellis.hpp"

namespace blindem {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

IsiTrellis::IsiTrellis(const Constellation& c, std::size_t L) : M_(c.order()), L_(L) {
    if (L < 1) throw std::invalid_argument("ISI trellis needs L >= 1");
    const std::size_t S = ipow(M_, L - 1);
    const std::size_t E = S * M_;
    graph_.num_states = S;
    graph_.edges.resize(E);
    for (std::size_t e = 0; e < E; ++e) {
        const std::size_t from = e / M_;
        graph_.edges[e] = {from, e % S};
    }

    d_.resize(static_cast<Eigen::Index>(E), static_cast<Eigen::Index>(L));
    for (std::size_t e = 0; e < E; ++e)
        for (std::size_t l = 0; l < L; ++l)
            d_(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(l)) = c.point(symbol_at_lag(e, l));

    const Eigen::MatrixXcd gram = d_.adjoint() * d_;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
    if (lu.rank() < static_cast<Eigen::Index>(L))
        throw std::runtime_error("regression matrix D is rank deficient");
    pinv_ = lu.solve(d_.adjoint());
}

std::size_t IsiTrellis::symbol_at_lag(std::size_t e, std::size_t l) const {
    for (std::size_t i = 0; i < l; ++i) e /= M_;
    return e % M_;
}

std::size_t IsiTrellis::edge_of(std::span<const std::size_t> current_then_past) const {
    if (current_then_past.size() != L_) throw std::invalid_argument("edge_of needs L symbol indices");
    std::size_t e = 0;
    for (std::size_t l = L_; l-- > 0;) e = e * M_ + current_then_past[l];
    return e;
}

CVec means_from_taps(const IsiTrellis& tr, std::span<const Complex> taps) {
    if (taps.size() != tr.memory()) throw std::invalid_argument("tap count does not match trellis memory");
    const auto& d = tr.d_matrix();
    CVec mu(tr.num_edges());
    for (std::size_t e = 0; e < mu.size(); ++e) {
        Complex s{};
        for (std::size_t l = 0; l < taps.size(); ++l)
            s += d(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(l)) * taps[l];
        mu[e] = s;
    }
    return mu;
}

CodeTrellis::CodeTrellis(const CodeSpec& spec) : spec_(spec) {
    spec_.validate();
    const std::size_t S = spec_.num_states();
    graph_.num_states = S;
    graph_.edges.resize(2 * S);
    outputs_.resize(2 * S);
    for (std::size_t s = 0; s < S; ++s) {
        for (unsigned u = 0; u < 2; ++u) {
            const std::size_t e = s * 2 + u;
            const auto st = static_cast<unsigned>(s);
            graph_.edges[e] = {s, encoder_next_state(spec_, st, u)};
            outputs_[e] = encoder_outputs(spec_, st, u);
        }
    }
}

}  // namespace blindem
