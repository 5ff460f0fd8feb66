// Command-line driver for the blind channel estimation experiments.
//
//   blindem run    --profile 3 --sigma-h2 0.5 --detector joint --csv out.csv --summary out.txt
//   blindem trial  --trial-id 7 --detector phase
//   blindem sweep  --sigma-h2-list 0.25,0.5,1,2 --sweep-csv fr.csv

#include "blindem/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace blindem;

namespace {

struct CliOptions {
    RunConfig config;
    std::string detector = "off";
    std::string mse_norm = "means";
    std::string csv_path;
    std::string summary_path;
    std::size_t trial_id = 0;
    std::vector<double> sigma_list{0.25, 0.5, 1.0, 2.0};
    std::vector<std::string> detector_list{"off", "phase", "joint"};
    std::string sweep_path;
};

void add_config_flags(CLI::App* app, CliOptions& o) {
    RunConfig& c = o.config;
    app->add_option("--profile", c.profile, "channel memory L (2, 3 or 4)")->capture_default_str();
    app->add_option("--snr-db", c.snr_db, "SNR in dB")->capture_default_str();
    app->add_option("--sigma-h2", c.sigma_h2, "initialization error variance")->capture_default_str();
    app->add_option("--info-bits", c.info_bits, "information bits per frame")->capture_default_str();
    app->add_option("--n-trials", c.n_trials, "Monte Carlo trials")->capture_default_str();
    app->add_option("--n-turbo", c.n_turbo, "turbo iterations")->capture_default_str();
    app->add_option("--n-em-per-turbo", c.n_em_per_turbo, "EM iterations per turbo iteration")
        ->capture_default_str();
    app->add_option("--detector", o.detector, "ambiguity detector: off, phase or joint")->capture_default_str();
    app->add_option("--margin", c.margin, "log-evidence margin required to refine")->capture_default_str();
    app->add_option("--base-seed", c.base_seed, "base RNG seed")->capture_default_str();
    app->add_option("--mse-norm", o.mse_norm, "MSE over Gaussian means or channel taps")->capture_default_str();
    app->add_option("--threads", c.threads, "worker threads (0: BLINDEM_THREADS or all cores)")
        ->capture_default_str();
}

void finalize(CliOptions& o) {
    o.config.detector = parse_detector_mode(o.detector);
    o.config.mse_norm = parse_mse_norm(o.mse_norm);
    o.config.validate();
}

int cmd_run(CliOptions& o) {
    finalize(o);
    const Experiment ex = run_experiment(o.config);
    if (o.csv_path.empty() && o.summary_path.empty()) {
        write_summary(std::cout, ex.summary);
    } else {
        emit_results(ex.records, ex.summary, o.csv_path, o.summary_path);
        std::cout << "failure_rate = " << format_number(ex.summary.failure_rate) << '\n';
    }
    return 0;
}

int cmd_trial(CliOptions& o) {
    finalize(o);
    const TrialRecord r = run_trial(o.config, o.trial_id);
    std::cout << "em_iter,mse\n";
    for (std::size_t n = 0; n < r.mse.size(); ++n) std::cout << n + 1 << ',' << format_number(r.mse[n]) << '\n';
    std::cout << "# failed = " << (r.failed ? 1 : 0) << ", phase_idx = " << r.phase_index
              << ", shift_idx = " << r.shift_index << ", refined = " << (r.refined ? 1 : 0)
              << ", info_bit_errors = " << r.info_bit_errors << '\n';
    return 0;
}

int cmd_sweep(CliOptions& o) {
    finalize(o);
    std::vector<DetectorMode> modes;
    for (const auto& d : o.detector_list) modes.push_back(parse_detector_mode(d));
    const auto points = run_sweep(o.config, o.sigma_list, modes);
    if (o.sweep_path.empty()) {
        write_sweep_csv(std::cout, points);
        return 0;
    }
    std::ofstream os(o.sweep_path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + o.sweep_path + "' for writing");
    write_sweep_csv(os, points);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Code-aided EM blind channel estimation with phase/shift ambiguity detection"};
    app.require_subcommand(1);
    CliOptions opts;

    auto* run = app.add_subcommand("run", "run a Monte Carlo experiment");
    add_config_flags(run, opts);
    run->add_option("--csv", opts.csv_path, "per-trial CSV output path");
    run->add_option("--summary", opts.summary_path, "key-value summary output path");

    auto* trial = app.add_subcommand("trial", "run one seeded trial and dump its MSE trajectory");
    add_config_flags(trial, opts);
    trial->add_option("--trial-id", opts.trial_id, "trial index")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "failure rate over a grid of initialization errors");
    add_config_flags(sweep, opts);
    sweep->add_option("--sigma-h2-list", opts.sigma_list, "comma-separated sigma_h2 values")->delimiter(',');
    sweep->add_option("--detectors", opts.detector_list, "comma-separated detector modes")->delimiter(',');
    sweep->add_option("--sweep-csv", opts.sweep_path, "sweep CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(opts);
        if (*trial) return cmd_trial(opts);
        if (*sweep) return cmd_sweep(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
