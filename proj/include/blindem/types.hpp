#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace blindem {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// Row-major table of log-domain weights over positions x alphabet.
///
/// Rows are "normalized" when each row log-sum-exps to zero. Unnormalized
/// tables keep their absolute offsets, which carry likelihood scale
/// between the equalizer, demapper and decoder.
template <class Tag>
class LogMessage {
public:
    LogMessage() = default;
    LogMessage(std::size_t rows, std::size_t alphabet, double fill = 0.0)
        : rows_(rows), alphabet_(alphabet), log_(rows * alphabet, fill) {}

    static LogMessage uniform(std::size_t rows, std::size_t alphabet) {
        LogMessage m(rows, alphabet, -std::log(static_cast<double>(alphabet)));
        m.normalized_ = true;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t alphabet() const { return alphabet_; }
    bool normalized() const { return normalized_; }
    void mark_normalized(bool v) { normalized_ = v; }

    std::span<double> row(std::size_t r) { return {log_.data() + r * alphabet_, alphabet_}; }
    std::span<const double> row(std::size_t r) const {
        return {log_.data() + r * alphabet_, alphabet_};
    }
    double& at(std::size_t r, std::size_t a) { return log_[r * alphabet_ + a]; }
    double at(std::size_t r, std::size_t a) const { return log_[r * alphabet_ + a]; }

    /// Linear-domain probability of a normalized entry.
    double prob(std::size_t r, std::size_t a) const { return std::exp(at(r, a)); }

    const std::vector<double>& data() const { return log_; }

    /// Subtracts each row's log-sum-exp. Rows that are entirely -inf become uniform.
    void normalize() {
        const double uni = -std::log(static_cast<double>(alphabet_));
        for (std::size_t r = 0; r < rows_; ++r) {
            auto rw = row(r);
            const double z = log_sum_exp(rw);
            if (z == kNegInf) {
                std::fill(rw.begin(), rw.end(), uni);
                continue;
            }
            for (double& x : rw) x -= z;
        }
        normalized_ = true;
    }

    LogMessage normalized_copy() const {
        LogMessage out = *this;
        out.normalize();
        return out;
    }

    /// Index of the largest entry in row r; lowest index wins ties.
    std::size_t argmax(std::size_t r) const {
        auto rw = row(r);
        return static_cast<std::size_t>(std::max_element(rw.begin(), rw.end()) - rw.begin());
    }

private:
    std::size_t rows_ = 0;
    std::size_t alphabet_ = 0;
    std::vector<double> log_;
    bool normalized_ = false;
};

struct BitTag {};
struct SymbolTag {};
using BitMessage = LogMessage<BitTag>;
using SymbolMessage = LogMessage<SymbolTag>;

}  // namespace blindem
