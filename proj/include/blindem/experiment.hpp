#pragma once

#include "blindem/ambiguity.hpp"
#include "blindem/channel.hpp"

#include <iosfwd>
#include <string>

namespace blindem {

enum class MseNorm { means, taps };

std::string to_string(DetectorMode m);
DetectorMode parse_detector_mode(const std::string& s);
std::string to_string(MseNorm n);
MseNorm parse_mse_norm(const std::string& s);

/// Monte Carlo experiment settings. Frames use QPSK and the (5,7)_8 code.
struct RunConfig {
    int profile = 3;  // channel memory L
    double snr_db = 6.0;
    double sigma_h2 = 0.5;
    std::size_t info_bits = 2000;
    std::size_t n_trials = 200;
    std::size_t n_turbo = 7;
    std::size_t n_em_per_turbo = 5;
    DetectorMode detector = DetectorMode::off;
    double margin = 1e3;
    std::uint64_t base_seed = 1;
    MseNorm mse_norm = MseNorm::means;
    std::size_t threads = 0;  // 0: BLINDEM_THREADS or hardware concurrency

    void validate() const;
};

/// One transmitted block with its ground truth.
struct Frame {
    ChannelTaps channel;
    ChannelTaps init;
    CVec preamble;
    Bits info_bits;
    Bits coded_bits;
    std::vector<std::size_t> symbol_indices;
    CVec y;
    double sigma2 = 0.0;
    Interleaver interleaver;
};

Frame generate_frame(const RunConfig& config, std::size_t trial_id);
Receiver make_receiver(const RunConfig& config, const Frame& frame);

/// Genie table: probability one on the transmitted symbol.
SymbolMessage genie_symbol_priors(const Frame& frame, std::size_t order);

struct TrialRecord {
    std::size_t trial_id = 0;
    std::vector<double> mse;  // one per EM iteration
    double final_mse = 0.0;
    bool failed = false;
    int phase_index = -1;  // detector argmax, -1 without detection
    int shift_index = -1;
    bool refined = false;
    std::size_t info_bit_errors = 0;
};

inline constexpr double kFailureThreshold = 0.1;

/// Mean of |estimate - truth|^2.
double compute_mse(std::span<const Complex> estimate, std::span<const Complex> truth);

TrialRecord run_trial(const RunConfig& config, std::size_t trial_id, OpCounter* counter = nullptr);

struct Summary {
    RunConfig config;
    std::size_t n_trials = 0;
    std::vector<double> mean, median, p25, p75;  // per EM iteration
    double failure_rate = 0.0;
    double refinement_rate = 0.0;
    double bit_error_rate = 0.0;
};

/// Linear-interpolated percentile (q in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double q);

Summary summarize(std::span<const TrialRecord> records, const RunConfig& config);

struct Experiment {
    std::vector<TrialRecord> records;
    Summary summary;
};

std::size_t resolve_thread_count(const RunConfig& config);

/// Runs every trial on a worker pool; records are ordered by trial id.
Experiment run_experiment(const RunConfig& config);

/// "%.12g" with '.' as decimal separator.
std::string format_number(double v);

void write_records_csv(std::ostream& os, std::span<const TrialRecord> records);
void write_summary(std::ostream& os, const Summary& summary);
void emit_results(std::span<const TrialRecord> records, const Summary& summary,
                  const std::string& csv_path, const std::string& summary_path);

/// Reads a table written by write_records_csv. Only the columns present in
/// the table are restored (bit error counts are not part of it).
std::vector<TrialRecord> parse_records_csv(std::istream& is);

struct SweepPoint {
    double sigma_h2 = 0.0;
    DetectorMode detector = DetectorMode::off;
    std::size_t n_trials = 0;
    double failure_rate = 0.0;
};

std::vector<SweepPoint> run_sweep(const RunConfig& base, std::span<const double> sigma_h2_values,
                                  std::span<const DetectorMode> detectors);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

}  // namespace blindem
