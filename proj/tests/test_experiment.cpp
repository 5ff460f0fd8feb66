#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "blindem/experiment.hpp"
#include "oracles.hpp"

#include <sstream>

using namespace blindem;

namespace {

RunConfig tiny() {
    RunConfig cfg;
    cfg.info_bits = 150;
    cfg.n_trials = 6;
    cfg.n_turbo = 2;
    cfg.n_em_per_turbo = 3;
    cfg.sigma_h2 = 0.5;
    cfg.base_seed = 42;
    return cfg;
}

std::string csv_of(std::span<const TrialRecord> records) {
    std::ostringstream os;
    write_records_csv(os, records);
    return os.str();
}

TrialRecord record(std::size_t id, std::vector<double> mse) {
    TrialRecord r;
    r.trial_id = id;
    r.mse = std::move(mse);
    r.final_mse = r.mse.back();
    r.failed = r.final_mse > kFailureThreshold;
    return r;
}

}  // namespace

TEST_CASE("compute_mse") {
    const CVec mu{1.0, Complex(0, 1), -2.0};
    CHECK(compute_mse(mu, mu) == 0.0);
    CVec off = mu;
    for (auto& v : off) v += 0.1;
    CHECK(compute_mse(off, mu) == doctest::Approx(0.01).epsilon(1e-12));

    std::mt19937_64 rng(3);
    const CVec a = oracle::random_cvec(rng, 64), b = oracle::random_cvec(rng, 64);
    double direct = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        const double dr = a[i].real() - b[i].real(), di = a[i].imag() - b[i].imag();
        direct += dr * dr + di * di;
    }
    CHECK(std::abs(compute_mse(a, b) - direct / 64.0) < 1e-12);
    CHECK_THROWS_AS(compute_mse(a, CVec(3)), std::invalid_argument);
}

TEST_CASE("percentiles and summary statistics") {
    CHECK(percentile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(percentile({3.0, 1.0, 2.0, 4.0}, 0.25) == doctest::Approx(1.75));
    CHECK(percentile({5.0}, 0.75) == 5.0);

    const std::vector<TrialRecord> recs{record(0, {1.0, 0.5}), record(1, {0.2, 0.01}), record(2, {0.3, 0.02}),
                                        record(3, {0.1, 0.03})};
    RunConfig cfg;
    cfg.info_bits = 10;
    const Summary s = summarize(recs, cfg);
    CHECK(s.failure_rate == 0.25);
    CHECK(s.n_trials == 4);
    REQUIRE(s.mean.size() == 2);
    CHECK(s.mean[1] == doctest::Approx((0.5 + 0.01 + 0.02 + 0.03) / 4));
    for (std::size_t n = 0; n < 2; ++n) {
        CHECK(s.p25[n] <= s.median[n]);
        CHECK(s.median[n] <= s.p75[n]);
    }
}

TEST_CASE("CSV layout and roundtrip") {
    TrialRecord r = record(0, {0.5, 0.25, 0.125, 1e-4, 3.14159265358979});
    r.phase_index = 2;
    r.shift_index = 0;
    r.refined = true;
    const std::vector<TrialRecord> one{r};
    const std::string csv = csv_of(one);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.rfind("trial_id,em_iter,mse,failed,phase_idx,shift_idx,refined\n", 0) == 0);
    CHECK(csv.find("0,5,3.14159265359,1,2,0,1\n") != std::string::npos);

    const Experiment ex = run_experiment(tiny());
    const std::string emitted = csv_of(ex.records);
    std::istringstream is(emitted);
    const auto parsed = parse_records_csv(is);
    REQUIRE(parsed.size() == ex.records.size());
    CHECK(csv_of(parsed) == emitted);
    for (std::size_t k = 0; k < parsed.size(); ++k) {
        CHECK(parsed[k].failed == ex.records[k].failed);
        CHECK(parsed[k].mse.size() == 6);
    }

    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(parse_records_csv(bad), std::runtime_error);
}

TEST_CASE("summary is key-value text") {
    const Experiment ex = run_experiment(tiny());
    std::ostringstream os;
    write_summary(os, ex.summary);
    const std::string text = os.str();
    CHECK(text.find("failure_rate = ") != std::string::npos);
    CHECK(text.find("mse_median = ") != std::string::npos);
    CHECK(text.find("detector = off\n") != std::string::npos);
    CHECK(text.find("sigma_h2 = 0.5\n") != std::string::npos);
}

TEST_CASE("results are identical across thread counts") {
    RunConfig a = tiny();
    a.threads = 1;
    RunConfig b = tiny();
    b.threads = 4;
    b.detector = a.detector = DetectorMode::joint;
    const std::string ca = csv_of(run_experiment(a).records);
    const std::string cb = csv_of(run_experiment(b).records);
    CHECK(ca == cb);
}

TEST_CASE("trials are independent of each other") {
    RunConfig cfg = tiny();
    const Experiment ex = run_experiment(cfg);
    for (std::size_t k : {0, 3, 5}) {
        const TrialRecord alone = run_trial(cfg, k);
        CHECK(alone.mse == ex.records[k].mse);
    }
    RunConfig fewer = cfg;
    fewer.n_trials = 2;
    const Experiment ex2 = run_experiment(fewer);
    CHECK(ex2.records[1].mse == ex.records[1].mse);

    // Different trials see different channels and data.
    const Frame f0 = generate_frame(cfg, 0), f1 = generate_frame(cfg, 1);
    CHECK(f0.channel.taps != f1.channel.taps);
    CHECK(f0.info_bits != f1.info_bits);
}

TEST_CASE("perfect initialization converges at 6 dB") {
    RunConfig cfg;
    cfg.n_trials = 1;
    cfg.sigma_h2 = 0.0;
    cfg.info_bits = 1000;
    const Experiment ex = run_experiment(cfg);
    CHECK_FALSE(ex.records[0].failed);
    CHECK(ex.records[0].final_mse < 1e-2);
    CHECK(ex.records[0].mse.size() == 35);
    CHECK(ex.records[0].phase_index == -1);
}

TEST_CASE("configuration and I/O errors") {
    RunConfig cfg = tiny();
    cfg.profile = 7;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_detector_mode("both"), std::invalid_argument);
    CHECK(parse_mse_norm("taps") == MseNorm::taps);

    const std::vector<TrialRecord> one{record(0, {0.5})};
    const Summary s = summarize(one, tiny());
    try {
        emit_results(one, s, "/nonexistent-dir/out.csv", "");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(emit_results(std::vector<TrialRecord>{}, s, "x.csv", ""), std::invalid_argument);
}
