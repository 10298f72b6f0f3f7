#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airage/age_model.hpp"
#include "airage/errors.hpp"
#include "airage/evaluation.hpp"
#include "airage/ingest.hpp"
#include "airage/kernels.hpp"
#include "airage/kv.hpp"
#include "airage/log.hpp"
#include "airage/mlp.hpp"
#include "airage/physics.hpp"
#include "airage/projection.hpp"
#include "airage/svg.hpp"
#include "airage/synthgen.hpp"
#include "airage/trainer.hpp"

namespace {

using namespace airage;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
    std::uint64_t seed = 1;
    bool deterministic = false;
    std::string out_dir = "out";
    std::string config_file;
};

void add_common(CLI::App* sub, CommonOpts* c) {
    sub->add_option("--seed", c->seed, "Master RNG seed");
    sub->add_flag("--deterministic", c->deterministic,
                  "Force the scalar kernel backend for machine-independent output")
        ->default_str("false");
    sub->add_option("--out-dir", c->out_dir, "Output directory");
    sub->add_option("--config", c->config_file,
                    "Flat key = value config file; explicit flags win");
}

// CLI11 only processes config files on the top-level app, never on subcommands,
// so config values are injected as arguments ahead of the user's own flags.
// Keys already present on the command line are skipped, which gives explicit
// flags precedence. `model` holds comma-joined repeats and is re-split here.
void inject_config(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return;
    std::size_t pos = 0;
    while (pos < args.size() && args[pos].rfind("-", 0) == 0) ++pos;
    if (pos == args.size()) return;
    ++pos;

    const KvMap kv = read_kv_file(path);
    std::set<std::string> given;
    for (const std::string& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));

    std::vector<std::string> injected;
    for (const auto& [key, value] : kv) {
        if (key == "config" || value.empty() || given.count(key) != 0) continue;
        if (key == "model") {
            std::size_t start = 0;
            while (start <= value.size()) {
                std::size_t end = value.find(',', start);
                if (end == std::string::npos) end = value.size();
                if (end > start)
                    injected.push_back("--model=" + value.substr(start, end - start));
                start = end + 1;
            }
        } else {
            injected.push_back("--" + key + "=" + value);
        }
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), injected.begin(),
                injected.end());
}

std::string out_path(const CommonOpts& c, const std::string& file) {
    return (std::filesystem::path(c.out_dir) / file).string();
}

// The manifest records every option of the run as flat key = value pairs:
// given options keep their exact command-line text, the rest their defaults,
// so `--config run_manifest.cfg` replays the run.
void start_run(const CLI::App* sub, const CommonOpts& c) {
    if (c.deterministic) kernels::force("scalar");
    std::filesystem::create_directories(c.out_dir);
    KvMap kv;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& key = opt->get_lnames()[0];
        if (key == "config" || key == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const std::string& r : opt->results()) {
                if (!value.empty()) value += ',';
                value += r;
            }
        } else {
            value = opt->get_default_str();
        }
        kv[key] = value;
    }
    write_kv_file(kv, out_path(c, "run_manifest.cfg"));
}

ParametricCoeffs coeffs_from_arg(const std::string& arg) {
    if (arg.empty() || arg == "default") return ParametricCoeffs{};
    return load_parametric_coeffs(arg);
}

// ---------------------------------------------------------------------------
// Prediction CSV (written by `baseline`, consumed by `calibrate`).

const char* kPredHeader = "tail_id,flight_id,t_s,age_yr,pred_kgh";

void write_predictions_csv(const Dataset& ds, const std::vector<double>& preds,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    out << kPredHeader << '\n';
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const FlightSample& s = ds.samples[i];
        out << s.tail_id << ',' << s.flight_id << ',' << format_double(s.t) << ','
            << format_double(s.age) << ',' << format_double(preds[i]) << '\n';
    }
    if (!out) throw data_error("write to " + path + " failed");
}

struct PredictionRow {
    std::string tail_id;
    std::string flight_id;
    double t = 0.0;
    double age = 0.0;
    double pred = 0.0;
};

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw schema_error("prediction file " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPredHeader)
        throw schema_error("prediction file " + path + ": expected header '" +
                           std::string(kPredHeader) + "'");
    std::vector<PredictionRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (cells.size() != 5)
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 5 columns");
        const auto num = [&](const std::string& text, const char* col) {
            try {
                std::size_t used = 0;
                const double v = std::stod(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
                return v;
            } catch (const std::exception&) {
                throw data_error(path + ":" + std::to_string(lineno) + ": unparseable " +
                                 std::string(col) + " '" + text + "'");
            }
        };
        PredictionRow r;
        r.tail_id = cells[0];
        r.flight_id = cells[1];
        r.t = num(cells[2], "t_s");
        r.age = num(cells[3], "age_yr");
        r.pred = num(cells[4], "pred_kgh");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw data_error("prediction file " + path + " has no rows");
    return rows;
}

// ---------------------------------------------------------------------------
// Model references for `eval` and `curve`:
//   <name>=baseline[:coeffs.cfg]
//   <name>=baseline+seymour[:coeffs.cfg]
//   <name>=baseline+coeff:<coeffs.cfg|default>:<age_model.cfg>
//   <name>=mlp:<checkpoint.json>

struct ModelRef {
    enum class Kind { Baseline, BaselineSeymour, BaselineCoeff, Mlp };
    std::string name;
    Kind kind = Kind::Baseline;
    ParametricCoeffs coeffs;
    AgeCoeffModel age_model;
    MlpCheckpoint ckpt;
};

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

ModelRef parse_model_ref(const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw data_error("model spec '" + spec + "': expected <name>=<kind>[:args]");
    ModelRef m;
    m.name = spec.substr(0, eq);
    const std::vector<std::string> parts = split_on(spec.substr(eq + 1), ':');
    const std::string& kind = parts[0];
    if (kind == "baseline" || kind == "baseline+seymour") {
        if (parts.size() > 2)
            throw data_error("model spec '" + spec + "': too many arguments");
        m.kind = kind == "baseline" ? ModelRef::Kind::Baseline
                                    : ModelRef::Kind::BaselineSeymour;
        m.coeffs = coeffs_from_arg(parts.size() > 1 ? parts[1] : "");
    } else if (kind == "baseline+coeff") {
        if (parts.size() != 3)
            throw data_error("model spec '" + spec +
                             "': expected baseline+coeff:<coeffs|default>:<age_model.cfg>");
        m.kind = ModelRef::Kind::BaselineCoeff;
        m.coeffs = coeffs_from_arg(parts[1]);
        m.age_model = load_age_coeff(parts[2]);
    } else if (kind == "mlp") {
        if (parts.size() != 2)
            throw data_error("model spec '" + spec + "': expected mlp:<checkpoint.json>");
        m.kind = ModelRef::Kind::Mlp;
        m.ckpt = load_checkpoint(parts[1]);
    } else {
        throw data_error("model spec '" + spec + "': unknown kind '" + kind + "'");
    }
    return m;
}

double predict(const ModelRef& m, const FlightSample& s) {
    switch (m.kind) {
        case ModelRef::Kind::Baseline:
            return fuel_flow_baseline(s, m.coeffs);
        case ModelRef::Kind::BaselineSeymour:
            return fuel_flow_baseline(s, m.coeffs) * seymour_coeff(s.age);
        case ModelRef::Kind::BaselineCoeff:
            return apply_coeff(fuel_flow_baseline(s, m.coeffs), s.age, m.age_model);
        case ModelRef::Kind::Mlp:
            return forward(m.ckpt, s);
    }
    throw numeric_error("unknown model kind");
}

// ---------------------------------------------------------------------------
// Curve references for `project`:
//   <name>=blind | <name>=seymour | <name>=a:<value> |
//   <name>=coeff:<age_model.cfg> | <name>=curve:<curve.csv>

struct CurveRef {
    std::string name;
    AgeCurveFn fn;
};

CurveRef parse_curve_ref(const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw data_error("curve spec '" + spec + "': expected <name>=<kind>[:arg]");
    CurveRef c;
    c.name = spec.substr(0, eq);
    const std::vector<std::string> parts = split_on(spec.substr(eq + 1), ':');
    const std::string& kind = parts[0];
    if (kind == "blind" && parts.size() == 1) {
        c.fn = [](double) { return 1.0; };
    } else if (kind == "seymour" && parts.size() == 1) {
        c.fn = [](double age) { return seymour_coeff(age); };
    } else if (kind == "a" && parts.size() == 2) {
        AgeCoeffModel m;
        try {
            std::size_t used = 0;
            m.a = std::stod(parts[1], &used);
            if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        } catch (const std::exception&) {
            throw data_error("curve spec '" + spec + "': bad coefficient value");
        }
        c.fn = curve_fn(m);
    } else if (kind == "coeff" && parts.size() == 2) {
        c.fn = curve_fn(load_age_coeff(parts[1]));
    } else if (kind == "curve" && parts.size() == 2) {
        c.fn = curve_fn(load_coeff_curve(parts[1]));
    } else {
        throw data_error("curve spec '" + spec + "': unknown kind '" + kind + "'");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Subcommand implementations.

struct GenOpts {
    CommonOpts common;
    SynthConfig synth;
    std::string coeffs_file;
};

void cmd_gen(const CLI::App* sub, GenOpts& o) {
    o.synth.seed = o.common.seed;
    if (!o.coeffs_file.empty()) o.synth.coeffs = load_parametric_coeffs(o.coeffs_file);
    start_run(sub, o.common);
    const Dataset ds = generate_fleet(o.synth);
    const std::string path = out_path(o.common, "dataset.csv");
    write_qar_csv(ds, path);
    std::cout << "wrote " << ds.samples.size() << " samples to " << path << '\n';
}

struct PrepOpts {
    CommonOpts common;
    std::string in_csv;
    SavGolConfig savgol;
    SplitConfig split;
};

void cmd_prep(const CLI::App* sub, PrepOpts& o) {
    start_run(sub, o.common);
    const Dataset raw = parse_qar_csv(o.in_csv);
    const Dataset prepped = preprocess_dataset(raw, o.savgol);
    write_qar_csv(prepped, out_path(o.common, "prep.csv"), /*include_accel=*/true);
    const SplitResult split = temporal_split(prepped, o.split);
    write_qar_csv(split.train, out_path(o.common, "train.csv"), true);
    write_qar_csv(split.test, out_path(o.common, "test.csv"), true);
    std::cout << "prep: " << prepped.samples.size() << " samples, "
              << split.train.samples.size() << " train / " << split.test.samples.size()
              << " test\n";
}

struct BaselineOpts {
    CommonOpts common;
    std::string in_csv;
    std::string coeffs_file;
};

void cmd_baseline(const CLI::App* sub, BaselineOpts& o) {
    start_run(sub, o.common);
    const ParametricCoeffs coeffs = coeffs_from_arg(o.coeffs_file);
    const Dataset ds = parse_qar_csv(o.in_csv);
    std::vector<double> preds;
    preds.reserve(ds.samples.size());
    for (const FlightSample& s : ds.samples) preds.push_back(fuel_flow_baseline(s, coeffs));
    const std::string path = out_path(o.common, "predictions.csv");
    write_predictions_csv(ds, preds, path);
    std::cout << "wrote " << preds.size() << " predictions to " << path << '\n';
}

struct CalibrateOpts {
    CommonOpts common;
    std::string obs_csv;
    std::string pred_csv;
};

void cmd_calibrate(const CLI::App* sub, CalibrateOpts& o) {
    start_run(sub, o.common);
    const Dataset obs = parse_qar_csv(o.obs_csv);
    const std::vector<PredictionRow> preds = read_predictions_csv(o.pred_csv);
    if (obs.samples.size() != preds.size())
        throw data_error("calibrate: " + std::to_string(obs.samples.size()) +
                         " observations vs " + std::to_string(preds.size()) +
                         " predictions");
    std::vector<double> observed, baseline, ages;
    observed.reserve(preds.size());
    baseline.reserve(preds.size());
    ages.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const FlightSample& s = obs.samples[i];
        if (s.tail_id != preds[i].tail_id || s.flight_id != preds[i].flight_id ||
            s.t != preds[i].t)
            throw data_error("calibrate: row " + std::to_string(i + 1) +
                             " does not align between observations and predictions");
        if (!s.fuel_flow.has_value())
            throw data_error("calibrate: observation row " + std::to_string(i + 1) +
                             " has no fuel_flow");
        observed.push_back(*s.fuel_flow);
        baseline.push_back(preds[i].pred);
        ages.push_back(s.age);
    }
    const AgeCoeffModel model = fit_log_coeff(observed, baseline, ages);
    const std::string path = out_path(o.common, "age_coeff.cfg");
    save_age_coeff(model, path);

    std::cout << "calibrated a = " << format_double(model.a) << '\n';
    std::cout << "age_yr  calibrated  seymour\n";
    for (const double age : {0.0, 5.0, 10.0, 15.0, 20.0, 25.0}) {
        char line[64];
        std::snprintf(line, sizeof(line), "%6.0f  %10.6f  %8.6f", age, model.coeff(age),
                      seymour_coeff(age));
        std::cout << line << '\n';
    }
    std::cout << "wrote " << path << '\n';
}

struct TrainOpts {
    CommonOpts common;
    std::string train_csv;
    std::string variant = "age_blind";
    MlpArch arch;
    TrainConfig train;
};

void cmd_train(const CLI::App* sub, TrainOpts& o) {
    o.arch.variant = variant_from_name(o.variant);
    o.train.seed = o.common.seed;
    start_run(sub, o.common);
    const Dataset ds = parse_qar_csv(o.train_csv);
    const TrainResult result = train(o.arch, ds, o.train);

    const std::string ckpt_path = out_path(o.common, "checkpoint.json");
    save_checkpoint(result.best, ckpt_path);

    const std::string log_path = out_path(o.common, "training_log.csv");
    std::ofstream log(log_path);
    if (!log) throw data_error("cannot open " + log_path + " for writing");
    log << "epoch,train_loss,val_loss,val_mae_kgh,val_mape_pct,lr\n";
    for (const EpochLog& row : result.log) {
        log << row.epoch << ',' << format_double(row.train_loss) << ','
            << format_double(row.val_loss) << ',' << format_double(row.val_mae_kgh) << ','
            << format_double(row.val_mape_pct) << ',' << format_double(row.lr) << '\n';
    }
    if (!log) throw data_error("write to " + log_path + " failed");

    std::cout << "trained " << o.variant << " for " << result.best.train_meta.epochs_run
              << " epochs, best val loss " << format_double(result.best.train_meta.best_val_loss)
              << ", wrote " << ckpt_path << '\n';
}

struct EvalOpts {
    CommonOpts common;
    std::string test_csv;
    std::vector<std::string> model_specs;
    double bin_width = 1.0;
};

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_')
                   ? c
                   : '_';
    return out;
}

void cmd_eval(const CLI::App* sub, EvalOpts& o) {
    start_run(sub, o.common);
    const Dataset ds = parse_qar_csv(o.test_csv);
    std::vector<std::pair<std::string, std::vector<double>>> all_preds;
    for (const std::string& spec : o.model_specs) {
        const ModelRef m = parse_model_ref(spec);
        std::vector<double> preds;
        preds.reserve(ds.samples.size());
        for (const FlightSample& s : ds.samples) preds.push_back(predict(m, s));
        const EvalReport report = evaluate(preds, ds.samples, o.bin_width);
        write_eval_report_json(report, m.name,
                               out_path(o.common, "eval_" + sanitize(m.name) + ".json"));
        write_eval_report_csv(report, m.name,
                              out_path(o.common, "eval_" + sanitize(m.name) + ".csv"));
        std::cout << m.name << ": mae " << format_double(report.overall.mae) << " kg/h, mape "
                  << format_double(report.overall.mape * 100.0) << " %, me "
                  << format_double(report.overall.me) << " kg/h, bias_ratio "
                  << format_double(report.overall.bias_ratio) << '\n';
        all_preds.emplace_back(m.name, std::move(preds));
    }
    const auto table = consumption_table(all_preds, ds.samples);
    write_consumption_csv(table, out_path(o.common, "consumption.csv"));
}

struct CurveOpts {
    CommonOpts common;
    std::string model_spec;
    std::string probe_csv;
    double grid_min = 0.0;
    double grid_max = 25.0;
    double grid_step = 1.0;
    int probe_count = 200;
};

void cmd_curve(const CLI::App* sub, CurveOpts& o) {
    if (!(o.grid_step > 0.0) || !(o.grid_max > o.grid_min))
        throw data_error("curve: need grid_max > grid_min and grid_step > 0");
    if (o.probe_count < 1) throw data_error("curve: probe_count must be >= 1");
    start_run(sub, o.common);

    const ModelRef m = parse_model_ref(o.model_spec);
    const Dataset ds = parse_qar_csv(o.probe_csv);

    // Evenly strided probe subset keeps the extraction cheap on large files.
    std::vector<FlightSample> probes;
    const std::size_t count =
        std::min<std::size_t>(static_cast<std::size_t>(o.probe_count), ds.samples.size());
    const std::size_t stride = ds.samples.size() / count;
    for (std::size_t i = 0; i < count; ++i) probes.push_back(ds.samples[i * stride]);

    std::vector<double> grid;
    for (double g = o.grid_min; g <= o.grid_max + 1e-9; g += o.grid_step) grid.push_back(g);

    const AgedPredictor predictor = [&m](const FlightSample& s, double age) {
        FlightSample probe = s;
        probe.age = age;
        return predict(m, probe);
    };
    const CoeffCurve curve = extract_model_coeff_curve(predictor, probes, grid);

    const std::string base = "curve_" + sanitize(m.name);
    save_coeff_curve(curve, out_path(o.common, base + ".csv"));
    SvgSeries series{m.name, curve.ages, curve.coeffs};
    write_line_chart({series}, "Deterioration coefficient vs age", "age (years)",
                     "coefficient", out_path(o.common, base + ".svg"));
    std::cout << "wrote " << out_path(o.common, base + ".csv") << '\n';
}

struct ProjectOpts {
    CommonOpts common;
    std::string fleet_file;
    std::vector<std::string> curve_specs;
    double ref_a = 0.0231;
};

void cmd_project(const CLI::App* sub, ProjectOpts& o) {
    start_run(sub, o.common);
    FleetSpec fleet;
    if (!o.fleet_file.empty()) fleet = load_fleet_spec(o.fleet_file);
    ReferenceCurve ref{o.ref_a};

    std::vector<std::pair<std::string, std::vector<ProjectionRow>>> results;
    std::vector<SvgSeries> series;
    for (const std::string& spec : o.curve_specs) {
        const CurveRef c = parse_curve_ref(spec);
        std::vector<ProjectionRow> rows = project(fleet, c.fn, ref);
        SvgSeries s;
        s.label = c.name;
        for (const ProjectionRow& r : rows) {
            s.x.push_back(r.year);
            s.y.push_back(r.diff_t);
        }
        series.push_back(std::move(s));
        results.emplace_back(c.name, std::move(rows));
    }
    projection_report(results, out_path(o.common, "projection.csv"));
    write_line_chart(series, "Cumulative fuel difference vs reference curve",
                     "horizon (years)", "difference (tonnes)",
                     out_path(o.common, "projection.svg"));
    std::cout << "wrote " << out_path(o.common, "projection.csv") << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuel-flow modelling toolkit: parametric baseline, ageing corrections, "
                 "neural regressors, and fleet projection"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    GenOpts gen;
    CLI::App* sub_gen = app.add_subcommand("gen", "Generate a synthetic QAR-like fleet");
    add_common(sub_gen, &gen.common);
    sub_gen->add_option("--n-tails", gen.synth.n_tails, "Number of airframes");
    sub_gen->add_option("--age-min", gen.synth.age_min, "Minimum entry age, years");
    sub_gen->add_option("--age-max", gen.synth.age_max, "Maximum entry age, years");
    sub_gen->add_option("--flights-per-tail", gen.synth.flights_per_tail, "Flights per tail");
    sub_gen->add_option("--a-true", gen.synth.a_true, "Planted deterioration coefficient");
    sub_gen->add_option("--tail-bias-sd", gen.synth.tail_bias_sd,
                        "Log-normal per-tail bias sd");
    sub_gen->add_option("--noise-sd", gen.synth.noise_sd, "Relative measurement noise sd");
    sub_gen->add_option("--profile-jitter", gen.synth.profile_jitter,
                        "Per-flight profile spread, 0 = identical profiles");
    sub_gen->add_option("--calendar-span-days", gen.synth.calendar_span_days,
                        "Calendar span covered by each tail's flights");
    sub_gen->add_option("--coeffs", gen.coeffs_file, "Parametric coefficient file");

    PrepOpts prep;
    CLI::App* sub_prep =
        app.add_subcommand("prep", "Smooth kinematics, derive acceleration, split");
    add_common(sub_prep, &prep.common);
    sub_prep->add_option("--in", prep.in_csv, "Input dataset CSV")->required();
    sub_prep->add_option("--savgol-window", prep.savgol.window_len,
                         "Savitzky-Golay window length (odd)");
    sub_prep->add_option("--savgol-poly", prep.savgol.poly_order,
                         "Savitzky-Golay polynomial order");
    // Captured default strings round through the manifest, so 2/3 needs the
    // full-precision form rather than CLI11's six-digit capture.
    sub_prep
        ->add_option("--train-fraction", prep.split.train_fraction,
                     "Per-tail temporal train fraction")
        ->default_str(format_double(prep.split.train_fraction));

    BaselineOpts baseline;
    CLI::App* sub_baseline =
        app.add_subcommand("baseline", "Physics baseline predictions per sample");
    add_common(sub_baseline, &baseline.common);
    sub_baseline->add_option("--in", baseline.in_csv, "Preprocessed dataset CSV")->required();
    sub_baseline->add_option("--coeffs", baseline.coeffs_file, "Parametric coefficient file");

    CalibrateOpts calibrate;
    CLI::App* sub_calibrate =
        app.add_subcommand("calibrate", "Fit the logarithmic ageing coefficient");
    add_common(sub_calibrate, &calibrate.common);
    sub_calibrate->add_option("--obs", calibrate.obs_csv, "Observed dataset CSV")->required();
    sub_calibrate->add_option("--pred", calibrate.pred_csv, "Baseline predictions CSV")
        ->required();

    TrainOpts train_opts;
    CLI::App* sub_train = app.add_subcommand("train", "Train a neural regressor");
    add_common(sub_train, &train_opts.common);
    sub_train->add_option("--train", train_opts.train_csv, "Preprocessed train CSV")
        ->required();
    sub_train->add_option("--variant", train_opts.variant,
                          "age_blind | age_input | inductive_bias");
    sub_train->add_option("--layers", train_opts.arch.n_hidden_layers, "Hidden layers");
    sub_train->add_option("--units", train_opts.arch.units, "Units per hidden layer");
    sub_train->add_option("--l2-lambda", train_opts.arch.l2_lambda, "L2 penalty weight");
    sub_train->add_option("--dropout", train_opts.arch.dropout_rate, "Dropout rate");
    sub_train->add_option("--epochs", train_opts.train.epochs, "Training epochs");
    sub_train->add_option("--batch-size", train_opts.train.batch_size, "Mini-batch size");
    sub_train->add_option("--base-lr", train_opts.train.base_lr, "Peak learning rate");
    sub_train->add_option("--warmup-frac", train_opts.train.warmup_frac,
                          "Warmup fraction of total steps");
    sub_train->add_option("--weight-decay", train_opts.train.weight_decay,
                          "Decoupled weight decay");
    sub_train->add_option("--val-fraction", train_opts.train.val_fraction,
                          "Validation flight fraction");

    EvalOpts eval_opts;
    CLI::App* sub_eval = app.add_subcommand("eval", "Evaluate models on a test set");
    add_common(sub_eval, &eval_opts.common);
    sub_eval->add_option("--test", eval_opts.test_csv, "Preprocessed test CSV")->required();
    sub_eval->add_option("--model", eval_opts.model_specs,
                         "Model spec <name>=<kind>[:args], repeatable")
        ->required();
    sub_eval->add_option("--bin-width", eval_opts.bin_width, "Age bin width, years");

    CurveOpts curve_opts;
    CLI::App* sub_curve =
        app.add_subcommand("curve", "Extract a model's implied deterioration curve");
    add_common(sub_curve, &curve_opts.common);
    sub_curve->add_option("--model", curve_opts.model_spec, "Model spec <name>=<kind>[:args]")
        ->required();
    sub_curve->add_option("--probe", curve_opts.probe_csv, "Probe sample CSV")->required();
    sub_curve->add_option("--grid-min", curve_opts.grid_min, "Grid start age");
    sub_curve->add_option("--grid-max", curve_opts.grid_max, "Grid end age");
    sub_curve->add_option("--grid-step", curve_opts.grid_step, "Grid step");
    sub_curve->add_option("--probe-count", curve_opts.probe_count, "Probe sample cap");

    ProjectOpts project_opts;
    CLI::App* sub_project =
        app.add_subcommand("project", "Constant-fleet cumulative fuel projection");
    add_common(sub_project, &project_opts.common);
    sub_project->add_option("--fleet", project_opts.fleet_file, "Fleet spec config file");
    sub_project->add_option("--model", project_opts.curve_specs,
                            "Curve spec <name>=<kind>[:arg], repeatable")
        ->required();
    sub_project->add_option("--ref-a", project_opts.ref_a, "Reference curve coefficient");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        inject_config(args);
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    try {
        // CLI11's vector overload consumes the args back to front.
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*sub_gen) cmd_gen(sub_gen, gen);
        if (*sub_prep) cmd_prep(sub_prep, prep);
        if (*sub_baseline) cmd_baseline(sub_baseline, baseline);
        if (*sub_calibrate) cmd_calibrate(sub_calibrate, calibrate);
        if (*sub_train) cmd_train(sub_train, train_opts);
        if (*sub_eval) cmd_eval(sub_eval, eval_opts);
        if (*sub_curve) cmd_curve(sub_curve, curve_opts);
        if (*sub_project) cmd_project(sub_project, project_opts);
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const schema_error& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitData;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
