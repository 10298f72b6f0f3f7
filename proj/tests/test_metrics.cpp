#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "airage/errors.hpp"
#include "airage/evaluation.hpp"
#include "airage/rng.hpp"

using namespace airage;

namespace {

/// Definition-level recomputation of the metric tuple, independent of the
/// kernel reductions.
MetricSet naive_metrics(const std::vector<double>& preds, const std::vector<double>& targets) {
    MetricSet m;
    m.n_samples = preds.size();
    double mape_sum = 0.0;
    std::size_t mape_n = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double e = preds[i] - targets[i];
        m.mae += std::abs(e);
        m.me += e;
        m.mse += e * e;
        if (targets[i] > 1.0) {
            mape_sum += std::abs(e) / targets[i];
            ++mape_n;
        } else {
            ++m.mape_excluded;
        }
    }
    const double n = static_cast<double>(preds.size());
    m.mae /= n;
    m.me /= n;
    m.mse /= n;
    m.mape = mape_n > 0 ? mape_sum / static_cast<double>(mape_n) : 0.0;
    m.bias_ratio = m.mse > 0.0 ? (m.me * m.me) / m.mse : 0.0;
    return m;
}

std::vector<FlightSample> aged_samples(const std::vector<double>& ages,
                                       const std::vector<double>& ffs) {
    std::vector<FlightSample> out;
    for (std::size_t i = 0; i < ages.size(); ++i) {
        FlightSample s;
        s.tail_id = "T001";
        s.flight_id = "T001-F0001";
        s.age = ages[i];
        s.fuel_flow = ffs[i];
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("perfect predictions zero every metric") {
    const std::vector<double> t = {2400.0, 2500.0, 2600.0};
    const MetricSet m = metrics(t, t);
    CHECK(m.mae == 0.0);
    CHECK(m.mape == 0.0);
    CHECK(m.me == 0.0);
    CHECK(m.mse == 0.0);
    CHECK(m.bias_ratio == 0.0);  // 0/0 convention
    CHECK(m.n_samples == 3);
}

TEST_CASE("constant offset is pure bias") {
    const std::vector<double> t = {2400.0, 2500.0, 2600.0};
    std::vector<double> p = t;
    for (auto& v : p) v += 10.0;
    const MetricSet m = metrics(p, t);
    CHECK(m.mae == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(m.me == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(m.mse == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(m.bias_ratio == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("symmetric errors carry zero bias") {
    const MetricSet m = metrics({110.0, 90.0}, {100.0, 100.0});
    CHECK(m.mae == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(m.me == 0.0);
    CHECK(m.mse == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(m.bias_ratio == 0.0);
    CHECK(m.mape == doctest::Approx(0.10).epsilon(1e-15));
}

TEST_CASE("metrics match the naive recomputation on random instances") {
    Rng rng(0x4772);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        std::vector<double> preds(n), targets(n);
        for (std::size_t i = 0; i < n; ++i) {
            targets[i] = rng.uniform(0.0, 3200.0);  // some fall under the MAPE floor
            preds[i] = targets[i] + rng.normal() * 50.0;
        }
        const MetricSet got = metrics(preds, targets);
        const MetricSet want = naive_metrics(preds, targets);
        CHECK(got.mae == doctest::Approx(want.mae).epsilon(1e-12));
        CHECK(got.mape == doctest::Approx(want.mape).epsilon(1e-12));
        CHECK(got.me == doctest::Approx(want.me).epsilon(1e-12));
        CHECK(got.mse == doctest::Approx(want.mse).epsilon(1e-12));
        CHECK(got.bias_ratio == doctest::Approx(want.bias_ratio).epsilon(1e-12));
        CHECK(got.mape_excluded == want.mape_excluded);

        // Structural invariants.
        CHECK(got.bias_ratio >= 0.0);
        CHECK(got.bias_ratio <= 1.0 + 1e-12);
        // MSE decomposes into squared bias plus error variance.
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (preds[i] - targets[i]) - got.me;
            var += d * d;
        }
        var /= static_cast<double>(n);
        CHECK(got.mse == doctest::Approx(got.me * got.me + var).epsilon(1e-9));
    }
}

TEST_CASE("MAPE exclusion counts near-zero targets") {
    const MetricSet m = metrics({10.0, 20.0, 30.0}, {0.5, 1.0, 20.0});
    CHECK(m.mape_excluded == 2);
    CHECK(m.mape == doctest::Approx(0.5).epsilon(1e-15));  // |30-20|/20
}

TEST_CASE("metrics input validation") {
    CHECK_THROWS_AS(metrics({}, {}), data_error);
    CHECK_THROWS_AS(metrics({1.0}, {1.0, 2.0}), data_error);
}

TEST_CASE("age-binned metrics partition the sample set") {
    Rng rng(0xB1B);
    std::vector<double> ages, ffs, preds;
    for (int i = 0; i < 500; ++i) {
        ages.push_back(rng.uniform(0.0, 15.0));
        ffs.push_back(rng.uniform(2000.0, 3000.0));
        preds.push_back(ffs.back() + rng.normal() * 40.0);
    }
    const auto samples = aged_samples(ages, ffs);
    const auto bins = metrics_by_age(preds, samples, 1.0);

    std::size_t total = 0;
    int prev_bin = -1;
    for (const auto& b : bins) {
        CHECK(b.bin > prev_bin);  // ascending, no duplicates
        prev_bin = b.bin;
        total += b.metrics.n_samples;

        // Recompute the bucket from scratch.
        std::vector<double> bp, bt;
        for (std::size_t i = 0; i < ages.size(); ++i) {
            if (static_cast<int>(std::floor(ages[i] / 1.0)) == b.bin) {
                bp.push_back(preds[i]);
                bt.push_back(ffs[i]);
            }
        }
        REQUIRE(bp.size() == b.metrics.n_samples);
        const MetricSet want = naive_metrics(bp, bt);
        CHECK(b.metrics.mae == doctest::Approx(want.mae).epsilon(1e-12));
        CHECK(b.metrics.me == doctest::Approx(want.me).epsilon(1e-12));
        CHECK(b.low_confidence == (b.metrics.n_samples < kLowConfidenceBinCount));
    }
    CHECK(total == ages.size());
}

TEST_CASE("age binning uses floor(age / width)") {
    const auto samples = aged_samples({5.5, 5.9, 5.0}, {2000.0, 2000.0, 2000.0});
    const auto bins = metrics_by_age({2000.0, 2000.0, 2000.0}, samples, 1.0);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].bin == 5);
    CHECK(bins[0].metrics.n_samples == 3);
    CHECK(bins[0].low_confidence);

    const auto wide = metrics_by_age({2000.0, 2000.0, 2000.0}, samples, 2.0);
    REQUIRE(wide.size() == 1);
    CHECK(wide[0].bin == 2);

    CHECK_THROWS_AS(metrics_by_age({1.0}, aged_samples({1.0}, {1.0}), 0.0), data_error);
}

TEST_CASE("total consumption integrates exactly on a constant series") {
    // 900 samples of 3600 kg/h at 4 s: each sample is 4 kg, total 3.6 t.
    const std::vector<double> ff(900, 3600.0);
    CHECK(total_consumption(ff, 4.0) == 3.6);

    CHECK(total_consumption({}, 4.0) == 0.0);

    // Random series against a plain accumulation.
    Rng rng(0xACC);
    std::vector<double> series(777);
    for (auto& v : series) v = rng.uniform(300.0, 3000.0);
    double want = 0.0;
    for (double v : series) want += v * 4.0 / 3600.0 / 1000.0;
    CHECK(total_consumption(series, 4.0) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("consumption table puts truth first and scales ratios") {
    std::vector<FlightSample> samples;
    for (int i = 0; i < 100; ++i) {
        FlightSample s;
        s.age = 5.0;
        s.fuel_flow = 2500.0;
        samples.push_back(s);
    }
    std::vector<double> perfect(100, 2500.0);
    std::vector<double> low(100, 2500.0 * 0.95);

    const auto rows = consumption_table({{"exact", perfect}, {"low", low}}, samples, 4.0);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].model == "truth");
    CHECK(rows[0].diff_t == 0.0);
    CHECK(rows[1].model == "exact");
    CHECK(rows[1].diff_t == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rows[1].diff_ratio == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rows[2].model == "low");
    CHECK(rows[2].diff_ratio == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(rows[2].diff_t ==
          doctest::Approx(rows[2].consumption_t - rows[0].consumption_t).epsilon(1e-12));
}

TEST_CASE("evaluate assembles a consistent report") {
    Rng rng(0xE7A1);
    std::vector<double> ages, ffs, preds;
    for (int i = 0; i < 300; ++i) {
        ages.push_back(rng.uniform(2.0, 12.0));
        ffs.push_back(rng.uniform(2000.0, 2800.0));
        preds.push_back(ffs.back() * 0.97);
    }
    const auto samples = aged_samples(ages, ffs);
    const EvalReport r = evaluate(preds, samples, 1.0, 4.0);

    CHECK(r.n_samples == 300);
    CHECK(r.overall.n_samples == 300);
    CHECK(r.diff_t == doctest::Approx(r.total_consumption_pred_t -
                                      r.total_consumption_true_t).epsilon(1e-12));
    CHECK(r.diff_ratio == doctest::Approx(-0.03).epsilon(1e-9));
    CHECK(r.overall.me < 0.0);

    std::size_t binned = 0;
    for (const auto& b : r.per_age_bin) binned += b.metrics.n_samples;
    CHECK(binned == 300);

    CHECK_THROWS_AS(evaluate({1.0}, aged_samples({1.0}, {1.0}), 1.0, 0.0), data_error);
}

TEST_CASE("report serialization round-trips through JSON and CSV headers") {
    Rng rng(0x10);
    std::vector<double> ages, ffs, preds;
    for (int i = 0; i < 64; ++i) {
        ages.push_back(rng.uniform(3.0, 9.0));
        ffs.push_back(rng.uniform(2100.0, 2700.0));
        preds.push_back(ffs.back() + rng.normal() * 25.0);
    }
    const auto samples = aged_samples(ages, ffs);
    const EvalReport r = evaluate(preds, samples);

    const std::string jpath = "/tmp/airage_test_eval.json";
    const std::string cpath = "/tmp/airage_test_eval.csv";
    write_eval_report_json(r, "demo", jpath);
    write_eval_report_csv(r, "demo", cpath);

    std::ifstream jf(jpath);
    REQUIRE(jf.good());
    const std::string jtext((std::istreambuf_iterator<char>(jf)), {});
    CHECK(jtext.find("\"model\"") != std::string::npos);
    CHECK(jtext.find("\"overall\"") != std::string::npos);
    CHECK(jtext.find("\"per_age_bin\"") != std::string::npos);

    std::ifstream cf(cpath);
    REQUIRE(cf.good());
    std::string header;
    std::getline(cf, header);
    CHECK(header ==
          "model,bin,n_samples,mae_kgh,mape_pct,me_kgh,mse_kgh2,bias_ratio,"
          "mape_excluded,low_confidence");
    std::size_t rows = 0;
    std::string line;
    bool saw_overall = false;
    while (std::getline(cf, line)) {
        if (!line.empty()) ++rows;
        if (line.find("overall") != std::string::npos) saw_overall = true;
    }
    CHECK(rows == r.per_age_bin.size() + 1);
    CHECK(saw_overall);
    std::remove(jpath.c_str());
    std::remove(cpath.c_str());
}

TEST_CASE("consumption CSV serialization") {
    const std::vector<ConsumptionRow> rows = {
        {"observed", 3.6, 0.0, 0.0},
        {"model_a", 3.42, -0.18, -0.05},
    };
    const std::string path = "/tmp/airage_test_cons.csv";
    write_consumption_csv(rows, path);
    std::ifstream f(path);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "model,consumption_t,diff_t,diff_ratio_pct");
    std::string line1;
    std::getline(f, line1);
    CHECK(line1.find("observed") == 0);
    std::string line2;
    std::getline(f, line2);
    CHECK(line2.find("model_a") == 0);
    CHECK(line2.find("-5") != std::string::npos);  // percent formatting
    std::remove(path.c_str());
}
