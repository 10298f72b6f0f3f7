#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airage/domain.hpp"
#include "airage/rng.hpp"

namespace airage {

enum class MlpVariant { AgeBlind, AgeInput, InductiveBias };

std::string variant_name(MlpVariant v);
MlpVariant variant_from_name(const std::string& name);

/// Feature list a variant consumes through the normalized input stack.
/// AgeInput appends age_yr as a plain feature; InductiveBias routes raw age
/// around the network into the multiplicative head instead.
std::vector<std::string> variant_features(MlpVariant v);

struct MlpArch {
    int n_hidden_layers = 5;
    int units = 128;
    double l2_lambda = 1e-5;
    double dropout_rate = 0.0;  ///< [0, 1), inverted dropout at train time
    MlpVariant variant = MlpVariant::AgeBlind;

    void validate() const;
};

/// Row-major matrix.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
};

/// Dense stack parameters. weights[l] maps layer l input to output
/// (rows = out, cols = in); layer count = n_hidden_layers + 1 (final scalar).
/// age_coeff is live only for the InductiveBias variant.
struct MlpParams {
    std::vector<Mat> weights;
    std::vector<std::vector<double>> biases;
    double age_coeff = 0.0;
};

/// He-uniform weights from the given stream, zero biases, age_coeff = 0 so
/// the inductive-bias head starts age-neutral.
MlpParams init_params(const MlpArch& arch, int input_dim, Rng& rng);

struct TrainMeta {
    int epochs_run = 0;
    double best_val_loss = 0.0;
    std::uint64_t seed = 0;
};

struct MlpCheckpoint {
    MlpArch arch;
    MlpParams params;
    NormStats norm_stats;
    std::vector<std::string> feature_list;
    TrainMeta train_meta;
};

/// Mini-batch in model coordinates: normalized inputs, raw targets (kg/h)
/// and raw ages (years) for the head.
struct Batch {
    Mat x;                    ///< n x input_dim, z-normalized
    std::vector<double> y;    ///< kg/h
    std::vector<double> age;  ///< years
};

Batch make_batch(const std::vector<const FlightSample*>& samples,
                 const MlpCheckpoint& ck);

/// Forward pass for one sample: ŷ_base from the denormalized stack output,
/// then max(0, ŷ_base) or max(0, ŷ_base·(1 + a·ln(age+1))) for InductiveBias.
double forward(const MlpCheckpoint& ck, const FlightSample& s);

/// Forward over a batch; returns predictions in kg/h.
std::vector<double> forward_batch(const MlpCheckpoint& ck, const Batch& b);

/// MSE on the normalized final output plus l2_lambda * sum of squared weight
/// matrix entries (biases and age_coeff excluded).
double loss(const MlpCheckpoint& ck, const Batch& b);

struct Gradients {
    std::vector<Mat> weights;
    std::vector<std::vector<double>> biases;
    double age_coeff = 0.0;
};

/// Exact analytic gradient of loss(). ReLU' (0) = 0; the output clamp
/// contributes zero gradient where it is active. Optional dropout masks
/// (one per hidden layer, values 0 or 1/keep) apply to both the loss value
/// returned and the gradients, matching train-time inverted dropout.
double backward(const MlpCheckpoint& ck, const Batch& b, Gradients* grads,
                const std::vector<std::vector<double>>* dropout_masks = nullptr);

/// Versioned JSON checkpoint; numeric round trip is exact.
void save_checkpoint(const MlpCheckpoint& ck, const std::string& path);
MlpCheckpoint load_checkpoint(const std::string& path);

} // namespace airage
