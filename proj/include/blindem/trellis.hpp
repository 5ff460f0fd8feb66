#pragma once

#include "blindem/channel.hpp"
#include "blindem/coding.hpp"
#include "blindem/constellation.hpp"

#include <Eigen/Dense>

namespace blindem {

struct TrellisEdge {
    std::size_t from = 0;
    std::size_t to = 0;
};

/// Time-invariant state graph shared by the forward-backward engine.
struct TrellisGraph {
    std::size_t num_states = 0;
    std::vector<TrellisEdge> edges;

    std::size_t num_edges() const { return edges.size(); }
};

/// ISI trellis for an L-tap channel over an M-PSK alphabet.
///
/// A state holds the previous L-1 symbol indices as a base-M number with the
/// most recent symbol in the least significant digit. Edge e = from*M + x_t,
/// so digit l of e (base M) is the index of x_{t-l}, and row e of D is
/// [x_t, x_{t-1}, ..., x_{t-L+1}].
class IsiTrellis {
public:
    IsiTrellis(const Constellation& c, std::size_t L);

    std::size_t order() const { return M_; }
    std::size_t memory() const { return L_; }
    std::size_t num_states() const { return graph_.num_states; }
    std::size_t num_edges() const { return graph_.num_edges(); }
    const TrellisGraph& graph() const { return graph_; }

    /// Index of the symbol driving edge e.
    std::size_t input_symbol(std::size_t e) const { return e % M_; }
    /// Symbol index of x_{t-l} on edge e.
    std::size_t symbol_at_lag(std::size_t e, std::size_t l) const;

    /// E x L regression matrix D.
    const Eigen::MatrixXcd& d_matrix() const { return d_; }
    /// (D^H D)^{-1} D^H, L x E.
    const Eigen::MatrixXcd& pseudo_inverse() const { return pinv_; }

    /// Edge that a noiseless transmission of symbol indices takes at time t,
    /// given the current symbol and L-1 predecessors (most recent first).
    std::size_t edge_of(std::span<const std::size_t> current_then_past) const;

private:
    std::size_t M_ = 0;
    std::size_t L_ = 0;
    TrellisGraph graph_;
    Eigen::MatrixXcd d_;
    Eigen::MatrixXcd pinv_;
};

inline IsiTrellis build_isi_trellis(const Constellation& c, std::size_t L) { return IsiTrellis(c, L); }

/// mu = D h: noiseless output of every edge.
CVec means_from_taps(const IsiTrellis& tr, std::span<const Complex> taps);

/// Convolutional code trellis. Edge e = state*2 + input bit; state holds
/// the previous Lc-1 inputs with the newest in the most significant bit.
class CodeTrellis {
public:
    explicit CodeTrellis(const CodeSpec& spec);

    const CodeSpec& spec() const { return spec_; }
    const TrellisGraph& graph() const { return graph_; }
    std::size_t num_states() const { return graph_.num_states; }
    std::size_t num_edges() const { return graph_.num_edges(); }

    unsigned input_bit(std::size_t e) const { return static_cast<unsigned>(e & 1U); }
    /// Output bit j (generator j) on edge e.
    unsigned output_bit(std::size_t e, std::size_t j) const { return (outputs_[e] >> j) & 1U; }

private:
    CodeSpec spec_;
    TrellisGraph graph_;
    std::vector<unsigned> outputs_;
};

inline CodeTrellis build_code_trellis(const CodeSpec& spec) { return CodeTrellis(spec); }

}  // namespace blindem
