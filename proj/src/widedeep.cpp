#include "p2pscore/widedeep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "model_container.hpp"
#include "p2pscore/errors.hpp"

namespace p2p {

using json = nlohmann::ordered_json;

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(Task t) {
    return t == Task::Classification ? "classification" : "regression";
}

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::Wide: return "wide";
        case Architecture::Deep: return "deep";
        default: return "widedeep";
    }
}

std::string to_string(LossKind k) {
    return k == LossKind::CrossEntropy ? "cross_entropy" : "mse";
}

Task task_from_string(std::string_view text) {
    if (text == "classification") return Task::Classification;
    if (text == "regression") return Task::Regression;
    throw UsageError("unknown task: " + std::string(text));
}

Architecture architecture_from_string(std::string_view text) {
    if (text == "wide") return Architecture::Wide;
    if (text == "deep") return Architecture::Deep;
    if (text == "widedeep" || text == "wide_deep") return Architecture::WideDeep;
    throw UsageError("unknown architecture: " + std::string(text) +
                     " (expected wide, deep, or widedeep)");
}

LossKind loss_from_string(std::string_view text) {
    if (text == "cross_entropy") return LossKind::CrossEntropy;
    if (text == "mse" || text == "mean_squared_error") return LossKind::MeanSquaredError;
    throw UsageError("unknown loss: " + std::string(text) +
                     " (expected cross_entropy or mse)");
}

Task task_for(LossKind loss) {
    return loss == LossKind::CrossEntropy ? Task::Classification : Task::Regression;
}

size_t ModelParams::deep_input_dim() const {
    size_t total = dense_count;
    for (int d : embedding_dims) total += static_cast<size_t>(d);
    return total;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

namespace {

void validate_config(const TrainConfig& config) {
    if (config.steps < 0) throw UsageError("steps must be non-negative");
    if (config.batch_size <= 0) throw UsageError("batch_size must be positive");
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw UsageError("learning_rate must be positive");
    }
    if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
        throw UsageError("dropout_rate must be in [0, 1)");
    }
    for (int w : config.hidden_layers) {
        if (w <= 0) throw UsageError("hidden layer widths must be positive");
    }
}

ModelParams init_params_with(const FeatureSchema& schema, const TrainConfig& config, Rng& rng) {
    ModelParams p;
    p.task = task_for(config.loss);
    p.architecture = config.architecture;
    p.wide_dim = schema.wide_dim();
    p.dense_count = schema.dense_count();
    for (const auto& [name, dim] : schema.embedding_specs) {
        p.embedding_rows.push_back(schema.levels_with_unk(name));
        p.embedding_dims.push_back(dim);
    }

    if (p.uses_wide()) {
        double sd = 1.0 / std::sqrt(static_cast<double>(p.wide_dim));
        p.wide_weights.resize(p.wide_dim);
        for (auto& w : p.wide_weights) w = rng.normal(0.0, sd);
    }
    if (p.uses_deep()) {
        for (size_t e = 0; e < p.embedding_rows.size(); ++e) {
            double sd = 1.0 / std::sqrt(static_cast<double>(p.embedding_dims[e]));
            std::vector<double> table(p.embedding_rows[e] *
                                      static_cast<size_t>(p.embedding_dims[e]));
            for (auto& w : table) w = rng.normal(0.0, sd);
            p.embedding_tables.push_back(std::move(table));
        }
        size_t in = p.deep_input_dim();
        for (int width : config.hidden_layers) {
            DenseLayer layer;
            layer.in = static_cast<int>(in);
            layer.out = width;
            layer.weights.resize(in * static_cast<size_t>(width));
            double sd = 1.0 / std::sqrt(static_cast<double>(in));
            for (auto& w : layer.weights) w = rng.normal(0.0, sd);
            layer.bias.assign(static_cast<size_t>(width), 0.0);
            p.layers.push_back(std::move(layer));
            in = static_cast<size_t>(width);
        }
        double sd = 1.0 / std::sqrt(static_cast<double>(in));
        p.output_deep_weights.resize(in);
        for (auto& w : p.output_deep_weights) w = rng.normal(0.0, sd);
    }
    p.output_bias = 0.0;
    return p;
}

}  // namespace

ModelParams init_params(const FeatureSchema& schema, const TrainConfig& config) {
    validate_config(config);
    Rng rng(config.seed);
    return init_params_with(schema, config, rng);
}

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

double forward(const ModelParams& params, const WideVector& wide, const DeepVector& deep,
               Mode mode, double dropout_rate, Rng* rng, ForwardTrace* trace) {
    double s = params.output_bias;

    if (params.uses_wide()) {
        if (wide.dim != params.wide_dim) {
            throw ShapeMismatchError("wide vector dim " + std::to_string(wide.dim) +
                                     " does not match model wide_dim " +
                                     std::to_string(params.wide_dim));
        }
        double wide_sum = 0.0;
        for (uint32_t idx : wide.active) {
            if (idx >= params.wide_dim) {
                throw ShapeMismatchError("wide index " + std::to_string(idx) + " out of range");
            }
            wide_sum += params.wide_weights[idx];
        }
        s += wide_sum;
        if (trace) trace->wide_sum = wide_sum;
    }

    if (params.uses_deep()) {
        if (deep.dense.size() != params.dense_count) {
            throw ShapeMismatchError("dense feature count " + std::to_string(deep.dense.size()) +
                                     " does not match model dense_count " +
                                     std::to_string(params.dense_count));
        }
        if (deep.embedding_ids.size() != params.embedding_tables.size()) {
            throw ShapeMismatchError("embedding id count " +
                                     std::to_string(deep.embedding_ids.size()) +
                                     " does not match model table count " +
                                     std::to_string(params.embedding_tables.size()));
        }
        std::vector<double> x;
        x.reserve(params.deep_input_dim());
        x.insert(x.end(), deep.dense.begin(), deep.dense.end());
        for (size_t e = 0; e < params.embedding_tables.size(); ++e) {
            uint32_t id = deep.embedding_ids[e];
            if (id >= params.embedding_rows[e]) {
                throw ShapeMismatchError("embedding id " + std::to_string(id) +
                                         " out of range for table " + std::to_string(e));
            }
            const auto& table = params.embedding_tables[e];
            size_t dim = static_cast<size_t>(params.embedding_dims[e]);
            x.insert(x.end(), table.begin() + id * dim, table.begin() + (id + 1) * dim);
        }
        if (trace) trace->deep_input = x;

        bool drop = mode == Mode::Train && dropout_rate > 0.0;
        std::vector<double> h = std::move(x);
        for (const auto& layer : params.layers) {
            std::vector<double> z(static_cast<size_t>(layer.out));
            for (int o = 0; o < layer.out; ++o) {
                double acc = layer.bias[static_cast<size_t>(o)];
                const double* row = layer.weights.data() + static_cast<size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) acc += row[i] * h[static_cast<size_t>(i)];
                z[static_cast<size_t>(o)] = acc;
            }
            std::vector<double> a(z.size());
            for (size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
            std::vector<double> mask;
            if (drop) {
                mask.resize(a.size());
                double keep_scale = 1.0 / (1.0 - dropout_rate);
                for (size_t i = 0; i < a.size(); ++i) {
                    mask[i] = rng->uniform() < dropout_rate ? 0.0 : keep_scale;
                    a[i] *= mask[i];
                }
            }
            if (trace) {
                trace->pre_activations.push_back(std::move(z));
                trace->dropout_masks.push_back(std::move(mask));
                trace->activations.push_back(a);
            }
            h = std::move(a);
        }
        double deep_dot = 0.0;
        for (size_t i = 0; i < params.output_deep_weights.size(); ++i) {
            deep_dot += params.output_deep_weights[i] * h[i];
        }
        s += deep_dot;
    }

    double out = params.task == Task::Classification ? sigmoid(s) : s;
    if (trace) {
        trace->logit = s;
        trace->output = out;
    }
    return out;
}

double loss_value(LossKind kind, double output, double label) {
    if (kind == LossKind::CrossEntropy) {
        double p = clamp_prob(output);
        return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
    }
    double diff = output - label;
    return diff * diff;
}

// ---------------------------------------------------------------------------
// Gradients
// ---------------------------------------------------------------------------

namespace {

// Dense mirrors of every parameter family, accumulated over a batch.
struct Gradients {
    std::vector<double> wide;
    std::vector<std::vector<double>> embeddings;
    std::vector<std::vector<double>> layer_weights;
    std::vector<std::vector<double>> layer_bias;
    std::vector<double> output_deep;
    double output_bias = 0.0;

    explicit Gradients(const ModelParams& p)
        : wide(p.wide_weights.size(), 0.0),
          output_deep(p.output_deep_weights.size(), 0.0) {
        for (const auto& t : p.embedding_tables) embeddings.emplace_back(t.size(), 0.0);
        for (const auto& l : p.layers) {
            layer_weights.emplace_back(l.weights.size(), 0.0);
            layer_bias.emplace_back(l.bias.size(), 0.0);
        }
    }

    void scale(double factor) {
        auto scale_vec = [factor](std::vector<double>& v) {
            for (auto& x : v) x *= factor;
        };
        scale_vec(wide);
        for (auto& t : embeddings) scale_vec(t);
        for (auto& w : layer_weights) scale_vec(w);
        for (auto& b : layer_bias) scale_vec(b);
        scale_vec(output_deep);
        output_bias *= factor;
    }
};

// Accumulates dLoss/dtheta for one sample into `g` via reverse accumulation.
// `trace` must come from the forward pass that produced `output`.
void backward_sample(const ModelParams& params, const WideVector& wide, const DeepVector& deep,
                     const ForwardTrace& trace, double output, double label, LossKind loss,
                     Gradients& g) {
    // dL/ds for both losses; the cross-entropy clamp only affects saturated
    // outputs where the finite-difference loss is flat anyway.
    double dls = loss == LossKind::CrossEntropy ? output - label : 2.0 * (output - label);

    g.output_bias += dls;
    if (params.uses_wide()) {
        for (uint32_t idx : wide.active) g.wide[idx] += dls;
    }
    if (!params.uses_deep()) return;

    const auto& a_last =
        trace.activations.empty() ? trace.deep_input : trace.activations.back();
    std::vector<double> d_h(a_last.size());
    for (size_t i = 0; i < a_last.size(); ++i) {
        g.output_deep[i] += dls * a_last[i];
        d_h[i] = dls * params.output_deep_weights[i];
    }

    for (size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        const auto& z = trace.pre_activations[l];
        const auto& mask = trace.dropout_masks[l];
        const auto& input = l == 0 ? trace.deep_input : trace.activations[l - 1];

        std::vector<double> d_z(static_cast<size_t>(layer.out));
        for (int o = 0; o < layer.out; ++o) {
            double grad = d_h[static_cast<size_t>(o)];
            if (!mask.empty()) grad *= mask[static_cast<size_t>(o)];
            d_z[static_cast<size_t>(o)] = z[static_cast<size_t>(o)] > 0.0 ? grad : 0.0;
        }
        auto& gw = g.layer_weights[l];
        auto& gb = g.layer_bias[l];
        std::vector<double> d_input(static_cast<size_t>(layer.in), 0.0);
        for (int o = 0; o < layer.out; ++o) {
            double dz = d_z[static_cast<size_t>(o)];
            gb[static_cast<size_t>(o)] += dz;
            if (dz == 0.0) continue;
            const double* row = layer.weights.data() + static_cast<size_t>(o) * layer.in;
            double* grow = gw.data() + static_cast<size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) {
                grow[i] += dz * input[static_cast<size_t>(i)];
                d_input[static_cast<size_t>(i)] += dz * row[i];
            }
        }
        d_h = std::move(d_input);
    }

    // d_h now holds dL/d(deep input): route the embedding segments into the
    // looked-up rows (the dense segment has no trainable parameters).
    size_t offset = params.dense_count;
    for (size_t e = 0; e < params.embedding_tables.size(); ++e) {
        size_t dim = static_cast<size_t>(params.embedding_dims[e]);
        size_t row = deep.embedding_ids[e] * dim;
        for (size_t t = 0; t < dim; ++t) g.embeddings[e][row + t] += d_h[offset + t];
        offset += dim;
    }
}

// Mean loss over the batch; gradients for the mean loss accumulated into `g`.
double batch_gradients(const ModelParams& params, const TrainMatrix& data,
                       const std::vector<size_t>& batch, const TrainConfig& config, Rng* rng,
                       Gradients& g) {
    if (batch.empty()) throw UsageError("training batch is empty");
    double total_loss = 0.0;
    bool drop = config.dropout_rate > 0.0;
    for (size_t idx : batch) {
        const EncodedRow& row = data.rows[idx];
        ForwardTrace trace;
        double out = forward(params, row.wide, row.deep, drop ? Mode::Train : Mode::Eval,
                             config.dropout_rate, rng, &trace);
        total_loss += loss_value(config.loss, out, data.labels[idx]);
        backward_sample(params, row.wide, row.deep, trace, out, data.labels[idx], config.loss,
                        g);
    }
    g.scale(1.0 / static_cast<double>(batch.size()));
    return total_loss / static_cast<double>(batch.size());
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool params_finite(const ModelParams& p) {
    if (!all_finite(p.wide_weights) || !all_finite(p.output_deep_weights) ||
        !std::isfinite(p.output_bias)) {
        return false;
    }
    for (const auto& t : p.embedding_tables) {
        if (!all_finite(t)) return false;
    }
    for (const auto& l : p.layers) {
        if (!all_finite(l.weights) || !all_finite(l.bias)) return false;
    }
    return true;
}

}  // namespace

double train_step(ModelParams& params, const TrainMatrix& data,
                  const std::vector<size_t>& batch, const TrainConfig& config, Rng& rng,
                  size_t step) {
    Gradients g(params);
    double mean_loss = batch_gradients(params, data, batch, config, &rng, g);

    double lr = config.learning_rate;
    for (size_t i = 0; i < params.wide_weights.size(); ++i) params.wide_weights[i] -= lr * g.wide[i];
    for (size_t e = 0; e < params.embedding_tables.size(); ++e) {
        auto& table = params.embedding_tables[e];
        for (size_t i = 0; i < table.size(); ++i) table[i] -= lr * g.embeddings[e][i];
    }
    for (size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        for (size_t i = 0; i < layer.weights.size(); ++i) {
            layer.weights[i] -= lr * g.layer_weights[l][i];
        }
        for (size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= lr * g.layer_bias[l][i];
    }
    for (size_t i = 0; i < params.output_deep_weights.size(); ++i) {
        params.output_deep_weights[i] -= lr * g.output_deep[i];
    }
    params.output_bias -= lr * g.output_bias;

    if (!params_finite(params) || !std::isfinite(mean_loss)) {
        throw NonFiniteGradientError("training produced a non-finite parameter or loss", step);
    }
    return mean_loss;
}

TrainedModel train(const FeatureSchema& schema, const TrainMatrix& data,
                   const TrainConfig& config) {
    validate_config(config);
    if (data.size() < static_cast<size_t>(config.batch_size)) {
        throw UsageError("dataset size " + std::to_string(data.size()) +
                         " is smaller than batch_size " + std::to_string(config.batch_size));
    }
    if (data.rows.size() != data.labels.size()) {
        throw UsageError("row and label counts differ");
    }
    if (config.loss == LossKind::CrossEntropy) {
        for (double y : data.labels) {
            if (y != 0.0 && y != 1.0) {
                throw UsageError("cross-entropy training requires 0/1 labels");
            }
        }
    }

    TrainedModel out;
    out.schema = schema;
    Rng rng(config.seed);
    out.params = init_params_with(schema, config, rng);
    out.loss_curve.reserve(static_cast<size_t>(config.steps));
    for (int step = 0; step < config.steps; ++step) {
        auto batch = rng.sample_indices(data.size(), static_cast<size_t>(config.batch_size));
        out.loss_curve.push_back(
            train_step(out.params, data, batch, config, rng, static_cast<size_t>(step)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

namespace {

struct Coordinate {
    std::string family;
    size_t index;
};

// Addressable view over every parameter family present in the model.
std::vector<std::pair<std::string, size_t>> family_sizes(const ModelParams& p) {
    std::vector<std::pair<std::string, size_t>> fams;
    if (!p.wide_weights.empty()) fams.push_back({"wide", p.wide_weights.size()});
    for (size_t e = 0; e < p.embedding_tables.size(); ++e) {
        fams.push_back({"embedding[" + std::to_string(e) + "]", p.embedding_tables[e].size()});
    }
    for (size_t l = 0; l < p.layers.size(); ++l) {
        fams.push_back({"layer[" + std::to_string(l) + "].weights", p.layers[l].weights.size()});
        fams.push_back({"layer[" + std::to_string(l) + "].bias", p.layers[l].bias.size()});
    }
    if (!p.output_deep_weights.empty()) {
        fams.push_back({"output_deep_weights", p.output_deep_weights.size()});
    }
    fams.push_back({"output_bias", 1});
    return fams;
}

double* coordinate_ptr(ModelParams& p, const std::string& family, size_t index) {
    if (family == "wide") return &p.wide_weights[index];
    if (family == "output_deep_weights") return &p.output_deep_weights[index];
    if (family == "output_bias") return &p.output_bias;
    if (family.rfind("embedding[", 0) == 0) {
        size_t e = std::stoul(family.substr(10));
        return &p.embedding_tables[e][index];
    }
    size_t l = std::stoul(family.substr(6));
    if (family.find(".bias") != std::string::npos) return &p.layers[l].bias[index];
    return &p.layers[l].weights[index];
}

double analytic_coordinate(const Gradients& g, const std::string& family, size_t index) {
    if (family == "wide") return g.wide[index];
    if (family == "output_deep_weights") return g.output_deep[index];
    if (family == "output_bias") return g.output_bias;
    if (family.rfind("embedding[", 0) == 0) {
        size_t e = std::stoul(family.substr(10));
        return g.embeddings[e][index];
    }
    size_t l = std::stoul(family.substr(6));
    if (family.find(".bias") != std::string::npos) return g.layer_bias[l][index];
    return g.layer_weights[l][index];
}

double batch_mean_loss(const ModelParams& params, const TrainMatrix& data,
                       const std::vector<size_t>& batch, LossKind loss) {
    double total = 0.0;
    for (size_t idx : batch) {
        double out = forward(params, data.rows[idx].wide, data.rows[idx].deep, Mode::Eval);
        total += loss_value(loss, out, data.labels[idx]);
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace

GradientCheckReport gradient_check(const ModelParams& params, const TrainMatrix& data,
                                   const TrainConfig& config, size_t n_coordinates, double h,
                                   uint64_t seed) {
    if (data.size() == 0) throw EmptyInputError("gradient check needs at least one sample");

    std::vector<size_t> batch(data.size());
    for (size_t i = 0; i < batch.size(); ++i) batch[i] = i;

    TrainConfig no_dropout = config;
    no_dropout.dropout_rate = 0.0;
    Gradients analytic(params);
    batch_gradients(params, data, batch, no_dropout, nullptr, analytic);

    auto fams = family_sizes(params);
    size_t total_params = 0;
    for (const auto& [name, size] : fams) total_params += size;
    n_coordinates = std::min(n_coordinates, total_params);

    Rng rng(seed);
    GradientCheckReport report;
    ModelParams probe = params;
    const double loss_at = batch_mean_loss(probe, data, batch, config.loss);

    auto loss_shifted = [&](double* slot, double saved, double step) {
        *slot = saved + step;
        double loss = batch_mean_loss(probe, data, batch, config.loss);
        *slot = saved;
        return loss;
    };

    auto rel_gap = [](double a, double b) {
        return std::fabs(a - b) / std::max(1e-8, std::fabs(a) + std::fabs(b));
    };

    auto check_one = [&](const std::string& family, size_t size) {
        // A finite difference is only a derivative estimate where the loss is
        // smooth; a relu kink inside the probe window makes it measure the
        // kink instead. Two symptoms cover the cases. A kink strictly inside
        // the window makes the full-step and half-step central differences
        // disagree. A kink at the point itself — a unit whose pre-activation
        // is exactly zero, so the central difference averages the two
        // one-sided slopes — leaves the central differences consistent, but
        // the forward/backward asymmetry it creates does not shrink when the
        // step is halved, whereas for a smooth loss that asymmetry is O(h).
        // (The asymmetry's size alone is not a usable signal: one kinked row
        // in a batch mean dilutes it by 1/batch.) Such coordinates are
        // resampled; a genuinely wrong analytic gradient is self-consistent
        // across all of these probes and still gets flagged. A family can be
        // entirely non-smooth (a layer whose inputs are all dead leaves every
        // bias at an exact kink); then no comparison is valid and the draw is
        // skipped.
        size_t index = rng.uniform_index(size);
        for (int attempt = 0; attempt < 64; ++attempt) {
            double* slot = coordinate_ptr(probe, family, index);
            double saved = *slot;
            double loss_hi = loss_shifted(slot, saved, h);
            double loss_lo = loss_shifted(slot, saved, -h);
            double loss_hi_half = loss_shifted(slot, saved, 0.5 * h);
            double loss_lo_half = loss_shifted(slot, saved, -0.5 * h);
            double g_fd = (loss_hi - loss_lo) / (2.0 * h);
            double g_half = (loss_hi_half - loss_lo_half) / h;
            double g_fwd = (loss_hi - loss_at) / h;
            double g_bwd = (loss_at - loss_lo) / h;
            double g_fwd_half = (loss_hi_half - loss_at) / (0.5 * h);
            double g_bwd_half = (loss_at - loss_lo_half) / (0.5 * h);
            double asym = rel_gap(g_fwd, g_bwd);
            double asym_half = rel_gap(g_fwd_half, g_bwd_half);
            bool centered_consistent = rel_gap(g_fd, g_half) < 3e-5;
            bool asymmetry_shrinks = asym < 1e-4 || asym_half < 0.7 * asym;
            if (centered_consistent && asymmetry_shrinks) {
                double g_an = analytic_coordinate(analytic, family, index);
                double rel =
                    std::fabs(g_an - g_fd) / std::max(1e-8, std::fabs(g_an) + std::fabs(g_fd));
                report.max_rel_error = std::max(report.max_rel_error, rel);
                ++report.coordinates_checked;
                ++report.family_checked[family];
                auto it = report.family_max_rel_error.find(family);
                if (it == report.family_max_rel_error.end()) {
                    report.family_max_rel_error[family] = rel;
                } else {
                    it->second = std::max(it->second, rel);
                }
                return;
            }
            index = rng.uniform_index(size);
        }
    };

    for (const auto& [name, size] : fams) check_one(name, size);
    // Top up to the requested count from random families, with a draw budget
    // so pathological models (every family at a kink) still terminate.
    size_t draws = 0;
    const size_t max_draws = 64 * std::max<size_t>(n_coordinates, 1);
    while (report.coordinates_checked < n_coordinates && draws++ < max_draws) {
        const auto& [name, size] = fams[rng.uniform_index(fams.size())];
        check_one(name, size);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

double predict_pd(const ModelParams& params, const EncodedRow& row) {
    if (params.task != Task::Classification) {
        throw TaskMismatchError("predict_pd requires a classification model, got " +
                                to_string(params.task));
    }
    return clamp_prob(forward(params, row.wide, row.deep, Mode::Eval));
}

double predict_irr(const ModelParams& params, const EncodedRow& row) {
    if (params.task != Task::Regression) {
        throw TaskMismatchError("predict_irr requires a regression model, got " +
                                to_string(params.task));
    }
    return forward(params, row.wide, row.deep, Mode::Eval);
}

std::vector<double> predict_pd(const ModelParams& params, const std::vector<EncodedRow>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(predict_pd(params, row));
    return out;
}

std::vector<double> predict_irr(const ModelParams& params, const std::vector<EncodedRow>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(predict_irr(params, row));
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json model_body(const ModelParams& p, const FeatureSchema& schema) {
    json body;
    body["model_type"] = "widedeep";
    body["task"] = to_string(p.task);
    body["architecture"] = to_string(p.architecture);
    body["wide_dim"] = p.wide_dim;
    body["dense_count"] = p.dense_count;
    body["embedding_rows"] = p.embedding_rows;
    body["embedding_dims"] = p.embedding_dims;
    body["wide_weights"] = p.wide_weights;
    body["embedding_tables"] = p.embedding_tables;
    json layers = json::array();
    for (const auto& l : p.layers) {
        layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights},
                          {"bias", l.bias}});
    }
    body["layers"] = layers;
    body["output_deep_weights"] = p.output_deep_weights;
    body["output_bias"] = p.output_bias;
    body["schema"] = json::parse(schema_to_json(schema));
    return body;
}

}  // namespace

std::string model_to_json(const ModelParams& params, const FeatureSchema& schema) {
    return container::wrap(model_body(params, schema));
}

TrainedModel model_from_json(const std::string& text) {
    json body = container::unwrap(text);
    try {
        if (body.at("model_type").get<std::string>() != "widedeep") {
            throw ParseError("model file holds a " +
                             body["model_type"].get<std::string>() +
                             " model, not a widedeep model");
        }

        TrainedModel out;
        ModelParams& p = out.params;
        p.task = task_from_string(body.at("task").get<std::string>());
        p.architecture = architecture_from_string(body.at("architecture").get<std::string>());
        p.wide_dim = body.at("wide_dim").get<size_t>();
        p.dense_count = body.at("dense_count").get<size_t>();
        p.embedding_rows = body.at("embedding_rows").get<std::vector<size_t>>();
        p.embedding_dims = body.at("embedding_dims").get<std::vector<int>>();
        p.wide_weights = body.at("wide_weights").get<std::vector<double>>();
        p.embedding_tables = body.at("embedding_tables").get<std::vector<std::vector<double>>>();
        for (const auto& l : body.at("layers")) {
            DenseLayer layer;
            layer.in = l.at("in").get<int>();
            layer.out = l.at("out").get<int>();
            layer.weights = l.at("weights").get<std::vector<double>>();
            layer.bias = l.at("bias").get<std::vector<double>>();
            p.layers.push_back(std::move(layer));
        }
        p.output_deep_weights = body.at("output_deep_weights").get<std::vector<double>>();
        p.output_bias = body.at("output_bias").get<double>();
        out.schema = schema_from_json(body.at("schema").dump());
        return out;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const ModelParams& params, const FeatureSchema& schema,
                const std::string& path) {
    container::write_file(path, model_to_json(params, schema));
}

TrainedModel load_model(const std::string& path) {
    return model_from_json(container::read_file(path));
}

}  // namespace p2p
