#pragma once

#include <cstdint>
#include <vector>

#include "airage/mlp.hpp"

namespace airage {

struct TrainConfig {
    int epochs = 200;
    int batch_size = 4096;
    double base_lr = 1e-3;
    double warmup_frac = 0.10;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.0;  ///< decoupled; L2 already lives in the loss
    std::uint64_t seed = 1;
    double val_fraction = 0.1;  ///< fraction of train flights held out

    void validate() const;
};

/// Warmup-cosine schedule. W = round(warmup_frac * total_steps):
/// step < W -> base_lr * step / W, else
/// base_lr * 0.5 * (1 + cos(pi * (step - W) / (total_steps - W))).
double lr_at(int step, int total_steps, const TrainConfig& cfg);

/// Adam moment accumulators, shaped like MlpParams.
struct OptState {
    std::vector<Mat> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    double m_a = 0.0, v_a = 0.0;
    long step = 0;

    static OptState zeros_like(const MlpParams& p);
};

/// One AdamW update with bias-corrected moments. Weight decay touches only
/// the weight matrices, never biases or the age coefficient. Throws
/// numeric_error on a non-finite gradient.
void adamw_step(MlpParams* params, const Gradients& grads, OptState* state, double lr,
                const TrainConfig& cfg);

/// Lowest-validation-loss retention (strict improvement keeps the earliest
/// minimum).
struct BestTracker {
    double best_loss = 0.0;
    int best_epoch = 0;
    bool any = false;

    /// True when this epoch's value becomes the new best.
    bool update(int epoch, double val_loss) {
        if (!any || val_loss < best_loss) {
            any = true;
            best_loss = val_loss;
            best_epoch = epoch;
            return true;
        }
        return false;
    }
};

struct EpochLog {
    int epoch = 0;  ///< 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_mae_kgh = 0.0;
    double val_mape_pct = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    MlpCheckpoint best;
    std::vector<EpochLog> log;
};

/// Full loop: flight-level validation split, normalization statistics from
/// the remaining train portion, seeded-shuffled mini-batches, AdamW with the
/// warmup-cosine schedule, per-epoch validation, best-checkpoint retention.
/// Divergence (non-finite loss or gradient) aborts with the last good
/// checkpoint and a warning. Deterministic for a fixed seed.
TrainResult train(const MlpArch& arch, const Dataset& train_ds, const TrainConfig& cfg);

} // namespace airage
