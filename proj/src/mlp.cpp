#include "airage/mlp.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "airage/errors.hpp"
#include "airage/kernels.hpp"

namespace airage {

namespace {

using nlohmann::json;

std::vector<int> layer_dims(const MlpArch& arch, int input_dim) {
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int l = 0; l < arch.n_hidden_layers; ++l) dims.push_back(arch.units);
    dims.push_back(1);
    return dims;
}

/// Hidden activations for a batch: A[0] = input, A[l+1] = layer l output.
/// The final layer output stays linear (normalized target scale).
struct StackTrace {
    std::vector<Mat> acts;       ///< pre-dropout ReLU outputs per hidden layer
    std::vector<double> z_out;   ///< final linear outputs, one per sample
};

void apply_layer(const Mat& in, const Mat& w, const std::vector<double>& bias, Mat* out) {
    for (int i = 0; i < in.rows; ++i) {
        const double* xi = in.row(i);
        double* oi = out->row(i);
        for (int o = 0; o < w.rows; ++o)
            oi[o] = kernels::dot(xi, w.row(o), static_cast<std::size_t>(w.cols)) + bias[o];
    }
}

StackTrace run_stack(const MlpParams& p, const Mat& x,
                     const std::vector<std::vector<double>>* dropout_masks) {
    const std::size_t layers = p.weights.size();
    StackTrace trace;
    trace.acts.reserve(layers);

    Mat current = x;
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        Mat z(current.rows, p.weights[l].rows);
        apply_layer(current, p.weights[l], p.biases[l], &z);
        kernels::relu(z.v.data(), z.v.size());
        trace.acts.push_back(z);
        if (dropout_masks != nullptr) {
            const std::vector<double>& mask = (*dropout_masks)[l];
            for (int i = 0; i < z.rows; ++i)
                for (int j = 0; j < z.cols; ++j) z.row(i)[j] *= mask[static_cast<std::size_t>(j)];
        }
        current = std::move(z);
    }

    const Mat& w_out = p.weights[layers - 1];
    trace.z_out.resize(static_cast<std::size_t>(current.rows));
    for (int i = 0; i < current.rows; ++i)
        trace.z_out[static_cast<std::size_t>(i)] =
            kernels::dot(current.row(i), w_out.row(0), static_cast<std::size_t>(w_out.cols)) +
            p.biases[layers - 1][0];
    return trace;
}

double head_coeff(const MlpArch& arch, double age_coeff, double age_years) {
    return arch.variant == MlpVariant::InductiveBias
               ? 1.0 + age_coeff * std::log(age_years + 1.0)
               : 1.0;
}

double weight_sq_norm(const MlpParams& p) {
    double s = 0.0;
    for (const Mat& w : p.weights) s += kernels::sum_sq(w.v.data(), w.v.size());
    return s;
}

json mat_to_json(const Mat& m) { return json(m.v); }

std::vector<double> doubles_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw schema_error("checkpoint: " + what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw schema_error("checkpoint: " + what + " holds a non-number");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace

std::string variant_name(MlpVariant v) {
    switch (v) {
        case MlpVariant::AgeBlind: return "age_blind";
        case MlpVariant::AgeInput: return "age_input";
        case MlpVariant::InductiveBias: return "inductive_bias";
    }
    throw numeric_error("unknown variant enum value");
}

MlpVariant variant_from_name(const std::string& name) {
    if (name == "age_blind") return MlpVariant::AgeBlind;
    if (name == "age_input") return MlpVariant::AgeInput;
    if (name == "inductive_bias") return MlpVariant::InductiveBias;
    throw schema_error("unknown model variant '" + name +
                       "' (expected age_blind, age_input, or inductive_bias)");
}

std::vector<std::string> variant_features(MlpVariant v) {
    std::vector<std::string> features = base_feature_names();
    if (v == MlpVariant::AgeInput) features.push_back("age_yr");
    return features;
}

void MlpArch::validate() const {
    if (n_hidden_layers < 1) throw data_error("arch: n_hidden_layers must be >= 1");
    if (units < 1) throw data_error("arch: units must be >= 1");
    if (!(l2_lambda >= 0.0)) throw data_error("arch: l2_lambda must be >= 0");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw data_error("arch: dropout_rate must be in [0, 1)");
}

MlpParams init_params(const MlpArch& arch, int input_dim, Rng& rng) {
    arch.validate();
    if (input_dim < 1) throw data_error("init_params: input_dim must be >= 1");
    const std::vector<int> dims = layer_dims(arch, input_dim);
    MlpParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Mat w(dims[l + 1], dims[l]);
        const double limit = std::sqrt(6.0 / dims[l]);
        for (double& v : w.v) v = rng.uniform(-limit, limit);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(static_cast<std::size_t>(dims[l + 1]), 0.0);
    }
    p.age_coeff = 0.0;
    return p;
}

Batch make_batch(const std::vector<const FlightSample*>& samples, const MlpCheckpoint& ck) {
    if (samples.empty()) throw data_error("make_batch: empty batch");
    const int d = static_cast<int>(ck.norm_stats.features.size());
    Batch b;
    b.x = Mat(static_cast<int>(samples.size()), d);
    b.y.reserve(samples.size());
    b.age.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const FlightSample& s = *samples[i];
        normalize_features(s, ck.norm_stats, b.x.row(static_cast<int>(i)));
        if (!s.fuel_flow.has_value())
            throw data_error("make_batch: sample without fuel_flow target");
        b.y.push_back(*s.fuel_flow);
        b.age.push_back(s.age);
    }
    return b;
}

double forward(const MlpCheckpoint& ck, const FlightSample& s) {
    Mat x(1, static_cast<int>(ck.norm_stats.features.size()));
    normalize_features(s, ck.norm_stats, x.row(0));
    const StackTrace trace = run_stack(ck.params, x, nullptr);
    const double y_base = denormalize_target(trace.z_out[0], ck.norm_stats);
    return std::max(0.0, y_base * head_coeff(ck.arch, ck.params.age_coeff, s.age));
}

std::vector<double> forward_batch(const MlpCheckpoint& ck, const Batch& b) {
    const StackTrace trace = run_stack(ck.params, b.x, nullptr);
    std::vector<double> pred(b.y.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double y_base = denormalize_target(trace.z_out[i], ck.norm_stats);
        pred[i] = std::max(0.0, y_base * head_coeff(ck.arch, ck.params.age_coeff, b.age[i]));
    }
    return pred;
}

double loss(const MlpCheckpoint& ck, const Batch& b) {
    if (b.y.empty()) throw data_error("loss: empty batch");
    const std::vector<double> pred = forward_batch(ck, b);
    double mse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dz = normalize_target(pred[i], ck.norm_stats) -
                          normalize_target(b.y[i], ck.norm_stats);
        mse += dz * dz;
    }
    mse /= static_cast<double>(pred.size());
    return mse + ck.arch.l2_lambda * weight_sq_norm(ck.params);
}

double backward(const MlpCheckpoint& ck, const Batch& b, Gradients* grads,
                const std::vector<std::vector<double>>* dropout_masks) {
    if (b.y.empty()) throw data_error("backward: empty batch");
    const MlpParams& p = ck.params;
    const NormStats& ns = ck.norm_stats;
    const std::size_t layers = p.weights.size();
    const std::size_t n = b.y.size();

    grads->weights.clear();
    grads->biases.clear();
    for (std::size_t l = 0; l < layers; ++l) {
        grads->weights.emplace_back(p.weights[l].rows, p.weights[l].cols);
        grads->biases.emplace_back(p.biases[l].size(), 0.0);
    }
    grads->age_coeff = 0.0;

    StackTrace trace = run_stack(p, b.x, dropout_masks);

    // Head: y_base = denorm(z_out); u = y_base * C(age); yhat = max(0, u);
    // data loss = mean over ((yhat - y)/target_std)^2.
    double mse = 0.0;
    std::vector<double> dz_out(n, 0.0);
    const double std_t = ns.target_stddev;
    for (std::size_t i = 0; i < n; ++i) {
        const double y_base = denormalize_target(trace.z_out[i], ns);
        const double coeff = head_coeff(ck.arch, p.age_coeff, b.age[i]);
        const double u = y_base * coeff;
        const double yhat = std::max(0.0, u);
        const double dz = (yhat - b.y[i]) / std_t;
        mse += dz * dz;
        const double dl_dyhat = 2.0 * dz / (static_cast<double>(n) * std_t);
        const double dl_du = u > 0.0 ? dl_dyhat : 0.0;
        if (ck.arch.variant == MlpVariant::InductiveBias)
            grads->age_coeff += dl_du * y_base * std::log(b.age[i] + 1.0);
        dz_out[i] = dl_du * coeff * std_t;
    }
    mse /= static_cast<double>(n);

    // Dense stack, last layer first. delta holds dL/d(layer output).
    const Mat& w_out = p.weights[layers - 1];
    Mat& gw_out = grads->weights[layers - 1];
    const Mat& last_act = layers > 1 ? trace.acts.back() : b.x;
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = last_act.row(static_cast<int>(i));
        const double g = dz_out[i];
        if (dropout_masks != nullptr && layers > 1) {
            // Activations were stored pre-dropout; fold the mask into the
            // input the output layer actually saw.
            const std::vector<double>& mask = dropout_masks->back();
            for (int j = 0; j < w_out.cols; ++j)
                gw_out.row(0)[j] += g * a[j] * mask[static_cast<std::size_t>(j)];
        } else {
            kernels::axpy(g, a, gw_out.row(0), static_cast<std::size_t>(w_out.cols));
        }
        grads->biases[layers - 1][0] += g;
    }

    // dL/d(input of output layer), i.e. post-dropout activation of the last
    // hidden layer (or the network input when there is no hidden layer).
    Mat delta(static_cast<int>(n), w_out.cols);
    for (std::size_t i = 0; i < n; ++i) {
        double* d = delta.row(static_cast<int>(i));
        for (int j = 0; j < w_out.cols; ++j) d[j] = dz_out[i] * w_out.row(0)[j];
    }

    for (std::size_t l = layers - 1; l-- > 0;) {
        // delta currently holds dL/d(post-dropout output of hidden layer l).
        const Mat& act = trace.acts[l];
        const std::vector<double>* mask =
            dropout_masks != nullptr ? &(*dropout_masks)[l] : nullptr;
        for (int i = 0; i < delta.rows; ++i) {
            double* d = delta.row(i);
            const double* a = act.row(i);
            for (int j = 0; j < delta.cols; ++j) {
                if (mask != nullptr) d[j] *= (*mask)[static_cast<std::size_t>(j)];
                if (a[j] <= 0.0) d[j] = 0.0;  // ReLU'(0) = 0
            }
        }

        const Mat& input = l > 0 ? trace.acts[l - 1] : b.x;
        Mat& gw = grads->weights[l];
        std::vector<double>& gb = grads->biases[l];
        const std::vector<double>* in_mask =
            (dropout_masks != nullptr && l > 0) ? &(*dropout_masks)[l - 1] : nullptr;
        for (int i = 0; i < delta.rows; ++i) {
            const double* d = delta.row(i);
            const double* a = input.row(i);
            for (int o = 0; o < gw.rows; ++o) {
                if (in_mask != nullptr) {
                    double* gwo = gw.row(o);
                    for (int j = 0; j < gw.cols; ++j)
                        gwo[j] += d[o] * a[j] * (*in_mask)[static_cast<std::size_t>(j)];
                } else {
                    kernels::axpy(d[o], a, gw.row(o), static_cast<std::size_t>(gw.cols));
                }
                gb[static_cast<std::size_t>(o)] += d[o];
            }
        }

        if (l == 0) break;
        const Mat& w = p.weights[l];
        Mat prev(delta.rows, w.cols);
        for (int i = 0; i < delta.rows; ++i) {
            const double* d = delta.row(i);
            double* pv = prev.row(i);
            for (int o = 0; o < w.rows; ++o)
                kernels::axpy(d[o], w.row(o), pv, static_cast<std::size_t>(w.cols));
        }
        delta = std::move(prev);
    }

    double total = mse;
    for (std::size_t l = 0; l < layers; ++l) {
        kernels::axpy(2.0 * ck.arch.l2_lambda, p.weights[l].v.data(),
                      grads->weights[l].v.data(), p.weights[l].v.size());
        total += ck.arch.l2_lambda * kernels::sum_sq(p.weights[l].v.data(),
                                                     p.weights[l].v.size());
    }
    return total;
}

void save_checkpoint(const MlpCheckpoint& ck, const std::string& path) {
    json j;
    j["version"] = 1;
    j["arch"] = {{"n_hidden_layers", ck.arch.n_hidden_layers},
                 {"units", ck.arch.units},
                 {"l2_lambda", ck.arch.l2_lambda},
                 {"dropout_rate", ck.arch.dropout_rate},
                 {"variant", variant_name(ck.arch.variant)}};
    j["feature_list"] = ck.feature_list;
    j["norm_stats"] = {{"features", ck.norm_stats.features},
                       {"mean", ck.norm_stats.mean},
                       {"stddev", ck.norm_stats.stddev},
                       {"target_mean", ck.norm_stats.target_mean},
                       {"target_stddev", ck.norm_stats.target_stddev}};
    json weights = json::array();
    for (const Mat& w : ck.params.weights) weights.push_back(mat_to_json(w));
    j["weights"] = weights;
    json biases = json::array();
    for (const auto& b : ck.params.biases) biases.push_back(json(b));
    j["biases"] = biases;
    if (ck.arch.variant == MlpVariant::InductiveBias)
        j["age_coeff"] = ck.params.age_coeff;
    else
        j["age_coeff"] = nullptr;
    j["train_meta"] = {{"epochs_run", ck.train_meta.epochs_run},
                       {"best_val_loss", ck.train_meta.best_val_loss},
                       {"seed", ck.train_meta.seed}};

    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw data_error("write to " + path + " failed");
}

MlpCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open checkpoint " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw schema_error("checkpoint " + path + ": invalid JSON: " + e.what());
    }

    try {
        if (!j.contains("version") || j["version"].get<int>() != 1)
            throw schema_error("checkpoint " + path + ": unsupported version");

        MlpCheckpoint ck;
        const json& arch = j.at("arch");
        ck.arch.n_hidden_layers = arch.at("n_hidden_layers").get<int>();
        ck.arch.units = arch.at("units").get<int>();
        ck.arch.l2_lambda = arch.at("l2_lambda").get<double>();
        ck.arch.dropout_rate = arch.at("dropout_rate").get<double>();
        ck.arch.variant = variant_from_name(arch.at("variant").get<std::string>());
        ck.arch.validate();

        ck.feature_list = j.at("feature_list").get<std::vector<std::string>>();
        const json& ns = j.at("norm_stats");
        ck.norm_stats.features = ns.at("features").get<std::vector<std::string>>();
        ck.norm_stats.mean = doubles_from_json(ns.at("mean"), "norm_stats.mean");
        ck.norm_stats.stddev = doubles_from_json(ns.at("stddev"), "norm_stats.stddev");
        ck.norm_stats.target_mean = ns.at("target_mean").get<double>();
        ck.norm_stats.target_stddev = ns.at("target_stddev").get<double>();

        if (ck.feature_list != ck.norm_stats.features)
            throw schema_error("checkpoint " + path +
                               ": feature_list and norm_stats.features disagree");
        const std::vector<std::string> expected = variant_features(ck.arch.variant);
        if (ck.feature_list != expected)
            throw schema_error("checkpoint " + path + ": feature_list does not match the " +
                               variant_name(ck.arch.variant) + " variant");

        const std::vector<int> dims = layer_dims(ck.arch, static_cast<int>(ck.feature_list.size()));
        const json& weights = j.at("weights");
        const json& biases = j.at("biases");
        if (weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1)
            throw schema_error("checkpoint " + path + ": wrong layer count");
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            Mat w(dims[l + 1], dims[l]);
            w.v = doubles_from_json(weights[l], "weights[" + std::to_string(l) + "]");
            if (w.v.size() != static_cast<std::size_t>(dims[l + 1]) * dims[l])
                throw schema_error("checkpoint " + path + ": weights[" + std::to_string(l) +
                                   "] has wrong size");
            ck.params.weights.push_back(std::move(w));
            auto b = doubles_from_json(biases[l], "biases[" + std::to_string(l) + "]");
            if (b.size() != static_cast<std::size_t>(dims[l + 1]))
                throw schema_error("checkpoint " + path + ": biases[" + std::to_string(l) +
                                   "] has wrong size");
            ck.params.biases.push_back(std::move(b));
        }

        const json& a = j.at("age_coeff");
        if (ck.arch.variant == MlpVariant::InductiveBias) {
            if (!a.is_number())
                throw schema_error("checkpoint " + path +
                                   ": inductive_bias requires a numeric age_coeff");
            ck.params.age_coeff = a.get<double>();
        } else if (!a.is_null()) {
            throw schema_error("checkpoint " + path + ": age_coeff must be null for " +
                               variant_name(ck.arch.variant));
        }

        const json& tm = j.at("train_meta");
        ck.train_meta.epochs_run = tm.at("epochs_run").get<int>();
        ck.train_meta.best_val_loss = tm.at("best_val_loss").get<double>();
        ck.train_meta.seed = tm.at("seed").get<std::uint64_t>();

        for (const Mat& w : ck.params.weights)
            for (double v : w.v)
                if (!std::isfinite(v))
                    throw schema_error("checkpoint " + path + ": non-finite weight");
        return ck;
    } catch (const json::exception& e) {
        throw schema_error("checkpoint " + path + ": " + e.what());
    }
}

} // namespace airage
