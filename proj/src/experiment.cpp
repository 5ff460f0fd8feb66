#include "blindem/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace blindem {

namespace {

constexpr std::size_t kOrder = 4;

}  // namespace

std::string to_string(DetectorMode m) {
    switch (m) {
        case DetectorMode::off: return "off";
        case DetectorMode::phase: return "phase";
        case DetectorMode::joint: return "joint";
    }
    return "off";
}

DetectorMode parse_detector_mode(const std::string& s) {
    if (s == "off") return DetectorMode::off;
    if (s == "phase") return DetectorMode::phase;
    if (s == "joint") return DetectorMode::joint;
    throw std::invalid_argument("unknown detector mode '" + s + "' (expected off, phase or joint)");
}

std::string to_string(MseNorm n) { return n == MseNorm::means ? "means" : "taps"; }

MseNorm parse_mse_norm(const std::string& s) {
    if (s == "means") return MseNorm::means;
    if (s == "taps") return MseNorm::taps;
    throw std::invalid_argument("unknown MSE normalization '" + s + "' (expected means or taps)");
}

void RunConfig::validate() const {
    profile_from_length(profile);
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr must be finite");
    if (!(sigma_h2 >= 0.0)) throw std::invalid_argument("sigma_h2 must be non-negative");
    if (info_bits == 0 || n_trials == 0 || n_turbo == 0 || n_em_per_turbo == 0)
        throw std::invalid_argument("counts must be positive");
    if (!(margin >= 0.0)) throw std::invalid_argument("margin must be non-negative");
}

Frame generate_frame(const RunConfig& config, std::size_t trial_id) {
    const Constellation c(kOrder);
    const CodeSpec code = CodeSpec::conv57();
    const auto profile = profile_from_length(config.profile);
    const std::size_t L = static_cast<std::size_t>(config.profile);
    auto seed = [&](StreamRole r) { return derive_seed(config.base_seed, trial_id, r); };

    Frame f;
    {
        Rng rng(seed(StreamRole::data));
        std::bernoulli_distribution coin(0.5);
        f.info_bits.resize(config.info_bits);
        for (auto& b : f.info_bits) b = coin(rng) ? 1 : 0;
    }
    f.coded_bits = conv_encode(f.info_bits, code);
    f.interleaver = Interleaver::random(f.coded_bits.size(), seed(StreamRole::interleaver));
    const Bits d = f.interleaver.interleave(std::span<const std::uint8_t>(f.coded_bits));
    f.symbol_indices = symbol_indices(d, c);
    CVec x(f.symbol_indices.size());
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = c.point(f.symbol_indices[t]);

    f.channel = draw_channel(profile, seed(StreamRole::channel));
    {
        Rng rng(seed(StreamRole::preamble));
        std::uniform_int_distribution<std::size_t> pick(0, kOrder - 1);
        f.preamble.resize(L - 1);
        for (auto& p : f.preamble) p = c.point(pick(rng));
    }
    f.sigma2 = sigma_from_snr(f.channel, config.snr_db);
    f.y = apply_channel(x, f.channel, f.preamble, NoiseSpec{f.sigma2}, seed(StreamRole::noise));
    f.init = perturb_init(f.channel, config.sigma_h2, seed(StreamRole::init));
    return f;
}

Receiver make_receiver(const RunConfig& config, const Frame& frame) {
    return Receiver(Constellation(kOrder), static_cast<std::size_t>(config.profile), CodeSpec::conv57(),
                    frame.interleaver, config.info_bits);
}

SymbolMessage genie_symbol_priors(const Frame& frame, std::size_t order) {
    SymbolMessage p(frame.symbol_indices.size(), order, kNegInf);
    for (std::size_t t = 0; t < frame.symbol_indices.size(); ++t) p.at(t, frame.symbol_indices[t]) = 0.0;
    p.mark_normalized(true);
    return p;
}

double compute_mse(std::span<const Complex> estimate, std::span<const Complex> truth) {
    if (estimate.size() != truth.size() || truth.empty())
        throw std::invalid_argument("compute_mse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += std::norm(estimate[i] - truth[i]);
    return s / static_cast<double>(truth.size());
}

TrialRecord run_trial(const RunConfig& config, std::size_t trial_id, OpCounter* counter) {
    const Frame frame = generate_frame(config, trial_id);
    const Receiver rx = make_receiver(config, frame);
    TurboConfig tc;
    tc.n_turbo = config.n_turbo;
    tc.n_em = config.n_em_per_turbo;
    tc.detector = config.detector;
    tc.margin.threshold = config.margin;

    const TurboOutcome out = run_turbo(rx, frame.y, frame.init.taps, frame.sigma2, tc, counter);
    const CVec truth_means = means_from_taps(rx.isi, frame.channel.taps);

    TrialRecord r;
    r.trial_id = trial_id;
    r.mse.reserve(out.models.size());
    for (const auto& m : out.models)
        r.mse.push_back(config.mse_norm == MseNorm::means ? compute_mse(m.means, truth_means)
                                                          : compute_mse(m.taps, frame.channel.taps));
    r.final_mse = r.mse.back();
    r.failed = r.final_mse > kFailureThreshold;
    if (out.detection) {
        r.phase_index = static_cast<int>(out.detection->refinement.phase_index);
        r.shift_index = static_cast<int>(out.detection->refinement.shift_index);
        r.refined = out.detection->refinement.applied;
    }
    for (std::size_t k = 0; k < frame.info_bits.size(); ++k)
        r.info_bit_errors += out.info_decisions[k] != frame.info_bits[k] ? 1 : 0;
    return r;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile of empty set");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Summary summarize(std::span<const TrialRecord> records, const RunConfig& config) {
    if (records.empty()) throw std::invalid_argument("no trial records to summarize");
    Summary s;
    s.config = config;
    s.n_trials = records.size();
    const std::size_t iters = records.front().mse.size();
    std::vector<double> column(records.size());
    for (std::size_t n = 0; n < iters; ++n) {
        double sum = 0.0;
        for (std::size_t k = 0; k < records.size(); ++k) {
            column[k] = records[k].mse.at(n);
            sum += column[k];
        }
        s.mean.push_back(sum / static_cast<double>(records.size()));
        s.p25.push_back(percentile(column, 0.25));
        s.median.push_back(percentile(column, 0.5));
        s.p75.push_back(percentile(column, 0.75));
    }
    std::size_t failed = 0, refined = 0, bit_errors = 0;
    for (const auto& r : records) {
        failed += r.failed ? 1 : 0;
        refined += r.refined ? 1 : 0;
        bit_errors += r.info_bit_errors;
    }
    const auto n = static_cast<double>(records.size());
    s.failure_rate = static_cast<double>(failed) / n;
    s.refinement_rate = static_cast<double>(refined) / n;
    s.bit_error_rate = static_cast<double>(bit_errors) / (n * static_cast<double>(config.info_bits));
    return s;
}

std::size_t resolve_thread_count(const RunConfig& config) {
    if (config.threads > 0) return config.threads;
    if (const char* env = std::getenv("BLINDEM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

Experiment run_experiment(const RunConfig& config) {
    config.validate();
    Experiment ex;
    ex.records.resize(config.n_trials);
    const std::size_t workers = std::min(resolve_thread_count(config), config.n_trials);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= config.n_trials || failed.load()) return;
            try {
                ex.records[k] = run_trial(config, k);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    ex.summary = summarize(ex.records, config);
    return ex;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_records_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << "trial_id,em_iter,mse,failed,phase_idx,shift_idx,refined\n";
    for (const auto& r : records) {
        for (std::size_t n = 0; n < r.mse.size(); ++n) {
            os << r.trial_id << ',' << (n + 1) << ',' << format_number(r.mse[n]) << ','
               << (r.failed ? 1 : 0) << ',' << r.phase_index << ',' << r.shift_index << ','
               << (r.refined ? 1 : 0) << '\n';
        }
    }
}

namespace {

void write_series(std::ostream& os, const char* key, const std::vector<double>& v) {
    os << key << " = ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_number(v[i]);
    os << '\n';
}

}  // namespace

void write_summary(std::ostream& os, const Summary& s) {
    const RunConfig& c = s.config;
    os << "profile = " << c.profile << '\n'
       << "snr_db = " << format_number(c.snr_db) << '\n'
       << "sigma_h2 = " << format_number(c.sigma_h2) << '\n'
       << "info_bits = " << c.info_bits << '\n'
       << "n_trials = " << s.n_trials << '\n'
       << "n_turbo = " << c.n_turbo << '\n'
       << "n_em_per_turbo = " << c.n_em_per_turbo << '\n'
       << "detector = " << to_string(c.detector) << '\n'
       << "margin = " << format_number(c.margin) << '\n'
       << "base_seed = " << c.base_seed << '\n'
       << "mse_norm = " << to_string(c.mse_norm) << '\n'
       << "failure_rate = " << format_number(s.failure_rate) << '\n'
       << "refinement_rate = " << format_number(s.refinement_rate) << '\n'
       << "bit_error_rate = " << format_number(s.bit_error_rate) << '\n';
    write_series(os, "mse_mean", s.mean);
    write_series(os, "mse_median", s.median);
    write_series(os, "mse_p25", s.p25);
    write_series(os, "mse_p75", s.p75);
}

void emit_results(std::span<const TrialRecord> records, const Summary& summary,
                  const std::string& csv_path, const std::string& summary_path) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    auto write_file = [](const std::string& path, auto&& body) {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
        body(os);
        os.flush();
        if (!os) throw std::runtime_error("write to '" + path + "' failed");
    };
    if (!csv_path.empty()) write_file(csv_path, [&](std::ostream& os) { write_records_csv(os, records); });
    if (!summary_path.empty()) write_file(summary_path, [&](std::ostream& os) { write_summary(os, summary); });
}

std::vector<TrialRecord> parse_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "trial_id,em_iter,mse,failed,phase_idx,shift_idx,refined")
        throw std::runtime_error("unexpected CSV header");
    std::vector<TrialRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field[7];
        for (auto& f : field)
            if (!std::getline(ss, f, ',')) throw std::runtime_error("malformed CSV row: " + line);
        const auto id = static_cast<std::size_t>(std::stoull(field[0]));
        const auto iter = static_cast<std::size_t>(std::stoull(field[1]));
        if (out.empty() || out.back().trial_id != id) {
            out.emplace_back();
            out.back().trial_id = id;
        }
        TrialRecord& r = out.back();
        if (iter != r.mse.size() + 1) throw std::runtime_error("EM iterations out of order: " + line);
        r.mse.push_back(std::stod(field[2]));
        r.final_mse = r.mse.back();
        r.failed = field[3] == "1";
        r.phase_index = std::stoi(field[4]);
        r.shift_index = std::stoi(field[5]);
        r.refined = field[6] == "1";
    }
    return out;
}

std::vector<SweepPoint> run_sweep(const RunConfig& base, std::span<const double> sigma_h2_values,
                                  std::span<const DetectorMode> detectors) {
    std::vector<SweepPoint> out;
    for (double s2 : sigma_h2_values) {
        for (DetectorMode mode : detectors) {
            RunConfig c = base;
            c.sigma_h2 = s2;
            c.detector = mode;
            const Experiment ex = run_experiment(c);
            out.push_back({s2, mode, ex.summary.n_trials, ex.summary.failure_rate});
        }
    }
    return out;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
    os << "sigma_h2,detector,n_trials,failure_rate\n";
    for (const auto& p : points)
        os << format_number(p.sigma_h2) << ',' << to_string(p.detector) << ',' << p.n_trials << ','
           << format_number(p.failure_rate) << '\n';
}

}  // namespace blindem
