#include "airage/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "airage/errors.hpp"
#include "airage/evaluation.hpp"
#include "airage/kernels.hpp"
#include "airage/log.hpp"
#include "airage/rng.hpp"

namespace airage {

namespace {

// Stream salts; distinct per purpose so draws never interleave.
constexpr std::uint64_t kSaltInit = 0x11;
constexpr std::uint64_t kSaltValSplit = 0x22;
constexpr std::uint64_t kSaltShuffle = 0x33;
constexpr std::uint64_t kSaltDropout = 0x44;

bool all_finite(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

void adamw_tensor(double* p, double* m, double* v, const double* g, std::size_t n,
                  double lr, const TrainConfig& cfg, double bc1, double bc2, double wd) {
    if (!all_finite(g, n)) throw numeric_error("adamw_step: non-finite gradient");
    kernels::active().adamw_update(p, m, v, g, n, lr, cfg.adam_beta1, cfg.adam_beta2,
                                   cfg.adam_eps, bc1, bc2, wd);
}

/// Validation loss/MAE/MAPE over whole flights, evaluated in chunks.
struct ValScores {
    double loss = 0.0;
    double mae = 0.0;
    double mape = 0.0;
};

ValScores score_validation(const MlpCheckpoint& ck,
                           const std::vector<const FlightSample*>& val_samples,
                           int batch_size) {
    std::vector<double> preds;
    std::vector<double> targets;
    preds.reserve(val_samples.size());
    targets.reserve(val_samples.size());

    double se_norm = 0.0;
    for (std::size_t start = 0; start < val_samples.size();
         start += static_cast<std::size_t>(batch_size)) {
        const std::size_t stop =
            std::min(val_samples.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<const FlightSample*> chunk(val_samples.begin() + start,
                                               val_samples.begin() + stop);
        const Batch b = make_batch(chunk, ck);
        const std::vector<double> p = forward_batch(ck, b);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double dz = normalize_target(p[i], ck.norm_stats) -
                              normalize_target(b.y[i], ck.norm_stats);
            se_norm += dz * dz;
            preds.push_back(p[i]);
            targets.push_back(b.y[i]);
        }
    }

    ValScores s;
    double l2 = 0.0;
    for (const Mat& w : ck.params.weights) l2 += kernels::sum_sq(w.v.data(), w.v.size());
    s.loss = se_norm / static_cast<double>(val_samples.size()) + ck.arch.l2_lambda * l2;
    const MetricSet m = metrics(preds, targets);
    s.mae = m.mae;
    s.mape = m.mape;
    return s;
}

} // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw data_error("train config: epochs must be >= 1");
    if (batch_size < 1) throw data_error("train config: batch_size must be >= 1");
    if (!(base_lr > 0.0)) throw data_error("train config: base_lr must be > 0");
    if (!(warmup_frac > 0.0 && warmup_frac < 1.0))
        throw data_error("train config: warmup_frac must be in (0, 1)");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
        throw data_error("train config: betas must be in [0, 1)");
    if (!(adam_eps > 0.0)) throw data_error("train config: adam_eps must be > 0");
    if (!(weight_decay >= 0.0)) throw data_error("train config: weight_decay must be >= 0");
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw data_error("train config: val_fraction must be in (0, 1)");
}

double lr_at(int step, int total_steps, const TrainConfig& cfg) {
    if (total_steps <= 0) throw data_error("lr_at: total_steps must be > 0");
    if (step < 0 || step > total_steps) throw data_error("lr_at: step out of range");
    const int warmup = static_cast<int>(std::lround(cfg.warmup_frac * total_steps));
    if (step < warmup) return cfg.base_lr * static_cast<double>(step) / warmup;
    if (total_steps == warmup) return cfg.base_lr;  // degenerate all-warmup case
    const double x = static_cast<double>(step - warmup) / (total_steps - warmup);
    const double pi = 3.14159265358979323846;
    return cfg.base_lr * 0.5 * (1.0 + std::cos(pi * x));
}

OptState OptState::zeros_like(const MlpParams& p) {
    OptState s;
    for (const Mat& w : p.weights) {
        s.m_w.emplace_back(w.rows, w.cols);
        s.v_w.emplace_back(w.rows, w.cols);
    }
    for (const auto& b : p.biases) {
        s.m_b.emplace_back(b.size(), 0.0);
        s.v_b.emplace_back(b.size(), 0.0);
    }
    return s;
}

void adamw_step(MlpParams* params, const Gradients& grads, OptState* state, double lr,
                const TrainConfig& cfg) {
    if (params->weights.size() != grads.weights.size() ||
        params->biases.size() != grads.biases.size())
        throw data_error("adamw_step: gradient shapes do not match parameters");

    state->step += 1;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state->step));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state->step));

    for (std::size_t l = 0; l < params->weights.size(); ++l) {
        adamw_tensor(params->weights[l].v.data(), state->m_w[l].v.data(),
                     state->v_w[l].v.data(), grads.weights[l].v.data(),
                     params->weights[l].v.size(), lr, cfg, bc1, bc2, cfg.weight_decay);
        adamw_tensor(params->biases[l].data(), state->m_b[l].data(), state->v_b[l].data(),
                     grads.biases[l].data(), params->biases[l].size(), lr, cfg, bc1, bc2,
                     0.0);
    }
    adamw_tensor(&params->age_coeff, &state->m_a, &state->v_a, &grads.age_coeff, 1, lr,
                 cfg, bc1, bc2, 0.0);
}

TrainResult train(const MlpArch& arch, const Dataset& train_ds, const TrainConfig& cfg) {
    arch.validate();
    cfg.validate();
    if (train_ds.samples.empty()) throw data_error("train: empty dataset");

    const std::vector<FlightSpan> spans = flight_spans(train_ds);

    // Flight-level validation split: 4 s samples within a flight are heavily
    // autocorrelated, so sample-level splits would leak.
    std::vector<std::size_t> order(spans.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_stream(cfg.seed, kSaltValSplit));
    split_rng.shuffle(order);

    std::size_t n_val_flights = 0;
    if (spans.size() >= 2) {
        n_val_flights = static_cast<std::size_t>(
            std::lround(cfg.val_fraction * static_cast<double>(spans.size())));
        n_val_flights = std::clamp<std::size_t>(n_val_flights, 1, spans.size() - 1);
    } else {
        warn("train: single flight in dataset; validating on the training flight");
    }

    std::vector<const FlightSample*> fit_samples;
    std::vector<const FlightSample*> val_samples;
    Dataset fit_ds;
    fit_ds.provenance = train_ds.provenance;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const FlightSpan& span = spans[order[rank]];
        const bool is_val = rank < n_val_flights;
        for (std::size_t i = span.begin; i < span.end; ++i) {
            if (is_val)
                val_samples.push_back(&train_ds.samples[i]);
            else
                fit_samples.push_back(&train_ds.samples[i]);
        }
        if (!is_val) {
            fit_ds.samples.insert(fit_ds.samples.end(),
                                  train_ds.samples.begin() + static_cast<std::ptrdiff_t>(span.begin),
                                  train_ds.samples.begin() + static_cast<std::ptrdiff_t>(span.end));
        }
    }
    if (val_samples.empty()) val_samples = fit_samples;

    const std::vector<std::string> features = variant_features(arch.variant);

    MlpCheckpoint ck;
    ck.arch = arch;
    ck.norm_stats = compute_norm_stats(fit_ds, features);
    ck.feature_list = features;
    Rng init_rng(derive_stream(cfg.seed, kSaltInit));
    ck.params = init_params(arch, static_cast<int>(features.size()), init_rng);
    ck.train_meta.seed = cfg.seed;

    const std::size_t n_fit = fit_samples.size();
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    const int steps_per_epoch = static_cast<int>((n_fit + batch - 1) / batch);
    const int total_steps = cfg.epochs * steps_per_epoch;

    OptState opt = OptState::zeros_like(ck.params);
    Rng shuffle_rng(derive_stream(cfg.seed, kSaltShuffle));
    Rng dropout_rng(derive_stream(cfg.seed, kSaltDropout));

    std::vector<std::size_t> idx(n_fit);
    std::iota(idx.begin(), idx.end(), 0);

    TrainResult result;
    result.best = ck;
    BestTracker best;
    Gradients grads;
    int global_step = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(idx);
        double epoch_loss_sum = 0.0;
        int epoch_batches = 0;
        double last_lr = 0.0;
        bool diverged = false;

        for (std::size_t start = 0; start < n_fit; start += batch) {
            const std::size_t stop = std::min(n_fit, start + batch);
            std::vector<const FlightSample*> chunk;
            chunk.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) chunk.push_back(fit_samples[idx[i]]);
            const Batch b = make_batch(chunk, ck);

            std::vector<std::vector<double>> masks;
            const std::vector<std::vector<double>>* masks_ptr = nullptr;
            if (arch.dropout_rate > 0.0) {
                const double keep = 1.0 - arch.dropout_rate;
                masks.assign(static_cast<std::size_t>(arch.n_hidden_layers),
                             std::vector<double>(static_cast<std::size_t>(arch.units), 0.0));
                for (auto& mask : masks)
                    for (double& v : mask)
                        v = dropout_rng.uniform() < keep ? 1.0 / keep : 0.0;
                masks_ptr = &masks;
            }

            const double batch_loss = backward(ck, b, &grads, masks_ptr);
            if (!std::isfinite(batch_loss)) {
                warn("train: non-finite loss at epoch " + std::to_string(epoch) +
                     "; aborting with the last good checkpoint");
                diverged = true;
                break;
            }
            last_lr = lr_at(global_step, total_steps, cfg);
            try {
                adamw_step(&ck.params, grads, &opt, last_lr, cfg);
            } catch (const numeric_error& e) {
                warn("train: " + std::string(e.what()) + " at epoch " +
                     std::to_string(epoch) + "; aborting with the last good checkpoint");
                diverged = true;
                break;
            }
            ++global_step;
            epoch_loss_sum += batch_loss;
            ++epoch_batches;
        }
        if (diverged) break;

        const ValScores val = score_validation(ck, val_samples, cfg.batch_size);
        if (!std::isfinite(val.loss)) {
            warn("train: non-finite validation loss at epoch " + std::to_string(epoch) +
                 "; aborting with the last good checkpoint");
            break;
        }

        EpochLog row;
        row.epoch = epoch;
        row.train_loss = epoch_loss_sum / std::max(1, epoch_batches);
        row.val_loss = val.loss;
        row.val_mae_kgh = val.mae;
        row.val_mape_pct = val.mape * 100.0;
        row.lr = last_lr;
        result.log.push_back(row);

        if (best.update(epoch, val.loss)) result.best = ck;
        result.best.train_meta.epochs_run = epoch;
        result.best.train_meta.best_val_loss = best.best_loss;
    }

    if (!best.any) warn("train: no epoch completed; returning the initial parameters");
    return result;
}

} // namespace airage
