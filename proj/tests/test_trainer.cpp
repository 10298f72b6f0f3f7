#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "airage/errors.hpp"
#include "airage/kernels.hpp"
#include "airage/log.hpp"
#include "airage/mlp.hpp"
#include "airage/rng.hpp"
#include "airage/trainer.hpp"

using namespace airage;

namespace {

struct WarnCatcher {
    std::vector<std::string> messages;
    WarnCatcher() {
        set_warn_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarnCatcher() { set_warn_handler(nullptr); }
    bool contains(const std::string& needle) const {
        for (const auto& m : messages)
            if (m.find(needle) != std::string::npos) return true;
        return false;
    }
};

/// Synthetic dataset whose target is a smooth positive function of two
/// features: easily learnable by a tiny network.
Dataset learnable_dataset(int n_flights, int per_flight, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    for (int f = 0; f < n_flights; ++f) {
        for (int i = 0; i < per_flight; ++i) {
            FlightSample s;
            s.tail_id = "T001";
            s.flight_id = "T001-F" + std::to_string(f + 1);
            s.date_days = 16800 + f * 30;
            s.t = 4.0 * i;
            s.pressure_alt = rng.uniform(28000.0, 38000.0);
            s.tas = rng.uniform(400.0, 470.0);
            s.dtas_dt = rng.uniform(-0.2, 0.2);
            s.vertical_speed = rng.uniform(-200.0, 200.0);
            s.ground_speed = s.tas;
            s.mass = rng.uniform(55000.0, 75000.0);
            s.age = rng.uniform(0.0, 15.0);
            s.sat = rng.uniform(210.0, 240.0);
            s.fuel_flow = 1000.0 + 0.02 * s.mass + 2.0 * (s.tas - 400.0);
            ds.samples.push_back(s);
        }
    }
    return ds;
}

double target_std(const Dataset& ds) {
    double mean = 0.0;
    for (const auto& s : ds.samples) mean += *s.fuel_flow;
    mean /= static_cast<double>(ds.samples.size());
    double var = 0.0;
    for (const auto& s : ds.samples) {
        const double d = *s.fuel_flow - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(ds.samples.size()));
}

bool params_equal(const MlpParams& a, const MlpParams& b) {
    if (a.weights.size() != b.weights.size()) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        if (a.weights[l].v != b.weights[l].v) return false;
        if (a.biases[l] != b.biases[l]) return false;
    }
    return a.age_coeff == b.age_coeff;
}

} // namespace

TEST_CASE("learning-rate schedule endpoints and midpoint") {
    TrainConfig cfg;
    cfg.base_lr = 1e-3;
    cfg.warmup_frac = 0.10;
    const int total = 100;  // W = 10

    CHECK(lr_at(0, total, cfg) == 0.0);
    CHECK(lr_at(10, total, cfg) == doctest::Approx(1e-3).epsilon(1e-12));
    // Cosine midpoint: (10 + 100) / 2 = 55 -> base * 0.5.
    CHECK(lr_at(55, total, cfg) == doctest::Approx(0.5e-3).epsilon(1e-12));
    // End of schedule decays to ~0.
    CHECK(lr_at(total, total, cfg) <= 1e-12 * cfg.base_lr);

    // Warmup is linear.
    CHECK(lr_at(5, total, cfg) == doctest::Approx(0.5e-3).epsilon(1e-12));

    // No discontinuity at the junction.
    const double before = lr_at(9, total, cfg);
    const double at = lr_at(10, total, cfg);
    CHECK(at - before <= cfg.base_lr * 0.11);
    CHECK(at > before);
}

TEST_CASE("learning-rate schedule edge cases") {
    TrainConfig cfg;
    cfg.base_lr = 2e-3;
    cfg.warmup_frac = 1.0;
    // Degenerate all-warmup schedule stays finite.
    CHECK(lr_at(50, 100, cfg) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(lr_at(100, 100, cfg) == doctest::Approx(2e-3).epsilon(1e-12));

    cfg.warmup_frac = 0.0;
    CHECK(lr_at(0, 100, cfg) == doctest::Approx(2e-3).epsilon(1e-12));

    CHECK_THROWS_AS(lr_at(0, 0, TrainConfig{}), data_error);
    CHECK_THROWS_AS(lr_at(-1, 100, TrainConfig{}), data_error);
    CHECK_THROWS_AS(lr_at(101, 100, TrainConfig{}), data_error);
}

TEST_CASE("adamw_step single-parameter hand fixture") {
    MlpParams p;
    p.weights.emplace_back(1, 1);
    p.weights[0].v = {1.0};
    p.biases.push_back({0.5});

    Gradients g;
    g.weights.emplace_back(1, 1);
    g.weights[0].v = {0.5};
    g.biases.push_back({0.2});

    TrainConfig cfg;
    cfg.weight_decay = 0.0;
    OptState st = OptState::zeros_like(p);

    adamw_step(&p, g, &st, 0.1, cfg);

    // First step: m=(1-b1)g, v=(1-b2)g^2, bc1=1-b1, bc2=1-b2, so
    // mhat=g, vhat=g^2, p -= lr*g/(|g|+eps) = lr*sign(g) (up to eps).
    const double mhat_w = 0.5, vhat_w = 0.25;
    const double want_w = 1.0 - 0.1 * mhat_w / (std::sqrt(vhat_w) + cfg.adam_eps);
    CHECK(p.weights[0].v[0] == doctest::Approx(want_w).epsilon(1e-14));
    const double want_b = 0.5 - 0.1 * 0.2 / (std::sqrt(0.04) + cfg.adam_eps);
    CHECK(p.biases[0][0] == doctest::Approx(want_b).epsilon(1e-14));
    CHECK(st.step == 1);
}

TEST_CASE("adamw_step decays weights only") {
    MlpParams p;
    p.weights.emplace_back(2, 2);
    p.weights[0].v = {1.0, -2.0, 3.0, -4.0};
    p.biases.push_back({0.5, -0.5});
    p.age_coeff = 0.02;

    Gradients g;
    g.weights.emplace_back(2, 2);  // zero gradients
    g.biases.push_back({0.0, 0.0});
    g.age_coeff = 0.0;

    TrainConfig cfg;
    cfg.weight_decay = 0.01;
    OptState st = OptState::zeros_like(p);
    adamw_step(&p, g, &st, 0.1, cfg);

    // Zero gradient: Adam term vanishes, weights shrink by (1 - lr*wd).
    const double shrink = 1.0 - 0.1 * 0.01;
    CHECK(p.weights[0].v[0] == doctest::Approx(1.0 * shrink).epsilon(1e-14));
    CHECK(p.weights[0].v[3] == doctest::Approx(-4.0 * shrink).epsilon(1e-14));
    CHECK(p.biases[0][0] == 0.5);
    CHECK(p.biases[0][1] == -0.5);
    CHECK(p.age_coeff == 0.02);
}

TEST_CASE("adamw_step matches a textbook Adam oracle over many steps") {
    Rng rng(0xADA);
    MlpParams p;
    p.weights.emplace_back(3, 4);
    for (auto& v : p.weights[0].v) v = rng.uniform(-1.0, 1.0);
    p.biases.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    p.age_coeff = 0.01;

    // Mirror state for the oracle.
    std::vector<double> op = p.weights[0].v;
    std::vector<double> ob = p.biases[0];
    double oa = p.age_coeff;
    std::vector<double> m(op.size(), 0.0), v(op.size(), 0.0);
    std::vector<double> mb(ob.size(), 0.0), vb(ob.size(), 0.0);
    double ma = 0.0, va = 0.0;

    TrainConfig cfg;
    cfg.weight_decay = 0.0;  // plain Adam comparison
    OptState st = OptState::zeros_like(p);

    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2, eps = cfg.adam_eps;
    for (int t = 1; t <= 25; ++t) {
        Gradients g;
        g.weights.emplace_back(3, 4);
        for (auto& gv : g.weights[0].v) gv = rng.uniform(-0.5, 0.5);
        g.biases.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                            rng.uniform(-0.5, 0.5)});
        g.age_coeff = rng.uniform(-0.5, 0.5);
        const double lr = 1e-3 * (1.0 + 0.1 * t);

        adamw_step(&p, g, &st, lr, cfg);

        auto upd = [&](double* par, double* mm, double* vv, double gr) {
            *mm = b1 * *mm + (1.0 - b1) * gr;
            *vv = b2 * *vv + (1.0 - b2) * gr * gr;
            const double mhat = *mm / (1.0 - std::pow(b1, t));
            const double vhat = *vv / (1.0 - std::pow(b2, t));
            *par -= lr * mhat / (std::sqrt(vhat) + eps);
        };
        for (std::size_t i = 0; i < op.size(); ++i) upd(&op[i], &m[i], &v[i], g.weights[0].v[i]);
        for (std::size_t i = 0; i < ob.size(); ++i) upd(&ob[i], &mb[i], &vb[i], g.biases[0][i]);
        upd(&oa, &ma, &va, g.age_coeff);
    }

    for (std::size_t i = 0; i < op.size(); ++i)
        CHECK(p.weights[0].v[i] == doctest::Approx(op[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < ob.size(); ++i)
        CHECK(p.biases[0][i] == doctest::Approx(ob[i]).epsilon(1e-12));
    CHECK(p.age_coeff == doctest::Approx(oa).epsilon(1e-12));
}

TEST_CASE("adamw_step rejects non-finite gradients") {
    MlpParams p;
    p.weights.emplace_back(1, 1);
    p.weights[0].v = {1.0};
    p.biases.push_back({0.0});

    Gradients g;
    g.weights.emplace_back(1, 1);
    g.weights[0].v = {std::numeric_limits<double>::quiet_NaN()};
    g.biases.push_back({0.0});

    OptState st = OptState::zeros_like(p);
    CHECK_THROWS_AS(adamw_step(&p, g, &st, 1e-3, TrainConfig{}), numeric_error);
}

TEST_CASE("best tracker keeps the earliest strict minimum") {
    BestTracker t;
    CHECK(t.update(1, 3.0));
    CHECK_FALSE(t.update(2, 3.0));  // ties do not replace
    CHECK(t.update(3, 1.0));
    CHECK_FALSE(t.update(4, 2.0));
    CHECK(t.best_epoch == 3);
    CHECK(t.best_loss == 1.0);
}

TEST_CASE("training fits an easy smooth target") {
    kernels::force("scalar");
    const Dataset ds = learnable_dataset(6, 40, 0x600D);

    MlpArch arch;
    arch.n_hidden_layers = 1;
    arch.units = 32;
    arch.l2_lambda = 0.0;
    arch.variant = MlpVariant::AgeBlind;

    TrainConfig cfg;
    cfg.epochs = 800;
    cfg.batch_size = 64;
    cfg.base_lr = 5e-3;
    cfg.seed = 3;

    const TrainResult res = train(arch, ds, cfg);
    REQUIRE(res.log.size() <= 800);
    CHECK(res.best.train_meta.epochs_run <= 800);

    // Final fit: MAE over the whole set well under 5% of the target spread.
    double mae = 0.0;
    for (const auto& s : ds.samples) mae += std::abs(forward(res.best, s) - *s.fuel_flow);
    mae /= static_cast<double>(ds.samples.size());
    CHECK(mae < 0.05 * target_std(ds));
    kernels::force("auto");
}

TEST_CASE("training is deterministic for a fixed seed") {
    kernels::force("scalar");
    const Dataset ds = learnable_dataset(4, 30, 0xFEED);

    MlpArch arch;
    arch.n_hidden_layers = 2;
    arch.units = 8;
    arch.variant = MlpVariant::InductiveBias;

    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 32;
    cfg.seed = 9;

    const TrainResult a = train(arch, ds, cfg);
    const TrainResult b = train(arch, ds, cfg);
    CHECK(params_equal(a.best.params, b.best.params));
    REQUIRE(a.log.size() == b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].train_loss == b.log[i].train_loss);
        CHECK(a.log[i].val_loss == b.log[i].val_loss);
    }

    // Saved checkpoints are byte-identical.
    save_checkpoint(a.best, "/tmp/airage_test_det_a.json");
    save_checkpoint(b.best, "/tmp/airage_test_det_b.json");
    std::ifstream fa("/tmp/airage_test_det_a.json", std::ios::binary);
    std::ifstream fb("/tmp/airage_test_det_b.json", std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(sa == sb);
    std::remove("/tmp/airage_test_det_a.json");
    std::remove("/tmp/airage_test_det_b.json");

    TrainConfig other = cfg;
    other.seed = 10;
    const TrainResult c = train(arch, ds, other);
    CHECK_FALSE(params_equal(a.best.params, c.best.params));
    kernels::force("auto");
}

TEST_CASE("retained checkpoint has the lowest validation loss in the log") {
    kernels::force("scalar");
    const Dataset ds = learnable_dataset(5, 25, 0xBEE);

    MlpArch arch;
    arch.n_hidden_layers = 1;
    arch.units = 8;

    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.batch_size = 32;
    cfg.seed = 4;

    const TrainResult res = train(arch, ds, cfg);
    REQUIRE(!res.log.empty());
    double min_val = res.log[0].val_loss;
    for (const auto& e : res.log) min_val = std::min(min_val, e.val_loss);
    CHECK(res.best.train_meta.best_val_loss == min_val);
    kernels::force("auto");
}

TEST_CASE("single-flight datasets fall back to validating on the fit set") {
    kernels::force("scalar");
    const Dataset ds = learnable_dataset(1, 60, 0x501);

    MlpArch arch;
    arch.n_hidden_layers = 1;
    arch.units = 4;

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 16;

    WarnCatcher warns;
    const TrainResult res = train(arch, ds, cfg);
    CHECK(warns.contains("validating on the training flight"));
    CHECK(res.log.size() == 5);
    kernels::force("auto");
}

TEST_CASE("divergence aborts with the last good checkpoint") {
    kernels::force("scalar");
    const Dataset ds = learnable_dataset(3, 30, 0xABAD);

    MlpArch arch;
    arch.n_hidden_layers = 1;
    arch.units = 8;

    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    // Adam updates are bounded by the learning rate, so the weights land at
    // ~1e200 after one step and the next forward pass overflows to inf.
    cfg.base_lr = 1e200;
    cfg.seed = 2;

    WarnCatcher warns;
    TrainResult res;
    CHECK_NOTHROW(res = train(arch, ds, cfg));
    CHECK(warns.contains("aborting with the last good checkpoint"));
    CHECK(res.best.train_meta.epochs_run < 50);
    // Whatever was retained must still be finite.
    for (const auto& w : res.best.params.weights)
        for (double v : w.v) CHECK(std::isfinite(v));
    kernels::force("auto");
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), data_error);
    cfg = TrainConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), data_error);
    cfg = TrainConfig{};
    cfg.base_lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), data_error);
    cfg = TrainConfig{};
    cfg.warmup_frac = 1.5;
    CHECK_THROWS_AS(cfg.validate(), data_error);
    cfg = TrainConfig{};
    cfg.val_fraction = 0.9999;
    CHECK_NOTHROW(cfg.validate());
    cfg.val_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), data_error);
}
