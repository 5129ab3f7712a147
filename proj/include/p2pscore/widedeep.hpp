#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "p2pscore/features.hpp"
#include "p2pscore/resample.hpp"
#include "p2pscore/rng.hpp"

namespace p2p {

enum class Task { Classification, Regression };
enum class Architecture { Wide, Deep, WideDeep };
enum class LossKind { CrossEntropy, MeanSquaredError };

std::string to_string(Task t);
std::string to_string(Architecture a);
std::string to_string(LossKind k);
Task task_from_string(std::string_view text);                  // throws UsageError
Architecture architecture_from_string(std::string_view text);  // throws UsageError
LossKind loss_from_string(std::string_view text);              // throws UsageError

// The loss fixes the task: cross-entropy trains a default-probability
// classifier, mean squared error an IRR regressor.
Task task_for(LossKind loss);

struct TrainConfig {
    int steps = 1000;
    int batch_size = 100;
    double learning_rate = 0.002;
    double dropout_rate = 0.2;              // inverted dropout on hidden activations
    std::vector<int> hidden_layers = {100, 50, 10};
    uint64_t seed = 0;
    LossKind loss = LossKind::CrossEntropy;
    Architecture architecture = Architecture::WideDeep;
};

// One fully connected layer: row-major weights (out x in) and a bias per
// output unit.
struct DenseLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // weights[o * in + i]
    std::vector<double> bias;     // out
};

// The joint model: a sparse linear part over the wide indicator vector and an
// embedding MLP over the deep input, combined as
//   s = sum(wide_weights[active]) + output_deep_weights . a_last + output_bias
// with sigma(s) for classification and s itself for regression. The Wide
// architecture drops the deep term, Deep drops the wide term.
struct ModelParams {
    Task task = Task::Classification;
    Architecture architecture = Architecture::WideDeep;

    std::vector<double> wide_weights;                   // wide_dim; empty for Deep
    std::vector<std::vector<double>> embedding_tables;  // per table: rows x dim, row-major
    std::vector<DenseLayer> layers;                     // hidden layers
    std::vector<double> output_deep_weights;            // last hidden width; empty for Wide
    double output_bias = 0.0;

    // Expected encoding shapes, used to validate inputs at forward time.
    size_t wide_dim = 0;
    size_t dense_count = 0;
    std::vector<size_t> embedding_rows;  // per table (vocabulary + unknown)
    std::vector<int> embedding_dims;     // per table

    size_t deep_input_dim() const;
    bool uses_wide() const { return architecture != Architecture::Deep; }
    bool uses_deep() const { return architecture != Architecture::Wide; }
};

// Backprop bookkeeping captured by a Train-mode forward pass.
struct ForwardTrace {
    std::vector<double> deep_input;
    std::vector<std::vector<double>> pre_activations;  // z per hidden layer
    std::vector<std::vector<double>> activations;      // post-relu, post-dropout
    std::vector<std::vector<double>> dropout_masks;    // 0 or 1/(1-p) per unit
    double wide_sum = 0.0;
    double logit = 0.0;
    double output = 0.0;
};

enum class Mode { Train, Eval };

// Gaussian init with per-layer scale 1/sqrt(fan_in) (wide: 1/sqrt(wide_dim),
// embeddings: 1/sqrt(dim)); biases zero. Deterministic per config.seed.
ModelParams init_params(const FeatureSchema& schema, const TrainConfig& config);

// Single forward pass. Train mode draws inverted-dropout masks from `rng`
// (required unless dropout_rate is zero) and fills `trace` when given; Eval
// mode ignores both. Returns sigma(s) for classification, s for regression.
// Throws ShapeMismatchError when the encodings disagree with the params.
double forward(const ModelParams& params, const WideVector& wide, const DeepVector& deep,
               Mode mode, double dropout_rate = 0.0, Rng* rng = nullptr,
               ForwardTrace* trace = nullptr);

// Per-sample loss. Cross-entropy clamps the probability to
// [1e-12, 1 - 1e-12] so labels on a saturated output stay finite.
double loss_value(LossKind kind, double output, double label);

// One SGD step on the given batch rows: mean-loss gradients by reverse
// accumulation (sparse into wide weights and looked-up embedding rows),
// then theta <- theta - lr * grad. Returns the batch mean loss. Throws
// NonFiniteGradientError (reporting `step`) if any parameter leaves the
// finite range.
double train_step(ModelParams& params, const TrainMatrix& data,
                  const std::vector<size_t>& batch, const TrainConfig& config, Rng& rng,
                  size_t step = 0);

struct TrainedModel {
    ModelParams params;
    FeatureSchema schema;
    std::vector<double> loss_curve;  // mean batch loss per step
};

// Full training run: init from config.seed, then config.steps batches drawn
// uniformly without replacement within each step. Deterministic per
// (seed, dataset, config). Throws UsageError on bad config or when the
// dataset is smaller than batch_size.
TrainedModel train(const FeatureSchema& schema, const TrainMatrix& data,
                   const TrainConfig& config);

struct GradientCheckReport {
    double max_rel_error = 0.0;
    size_t coordinates_checked = 0;
    // family name ("wide", "embedding[0]", "layer[1].weights", "output_bias",
    // ...) -> coordinates checked / worst relative error in that family.
    std::map<std::string, size_t> family_checked;
    std::map<std::string, double> family_max_rel_error;
};

// Central finite differences (step h) against the analytic batch-mean
// gradient, dropout disabled. Checks at least one coordinate per parameter
// family and n_coordinates total (capped by the parameter count); relative
// error is |ga - gfd| / max(1e-8, |ga| + |gfd|). Coordinates where the loss
// is locally non-smooth — a relu kink inside the probe window, detected by
// step-halving inconsistency and by forward/backward asymmetry that fails to
// shrink with the step — are resampled, since the difference quotient is not
// a derivative there.
GradientCheckReport gradient_check(const ModelParams& params, const TrainMatrix& data,
                                   const TrainConfig& config, size_t n_coordinates, double h,
                                   uint64_t seed);

// Eval-mode predictions. predict_pd requires a classification model and
// returns the default probability clamped to (0, 1); predict_irr requires a
// regression model. Throws TaskMismatchError.
double predict_pd(const ModelParams& params, const EncodedRow& row);
double predict_irr(const ModelParams& params, const EncodedRow& row);
std::vector<double> predict_pd(const ModelParams& params, const std::vector<EncodedRow>& rows);
std::vector<double> predict_irr(const ModelParams& params, const std::vector<EncodedRow>& rows);

// Versioned JSON model container with the schema embedded and an fnv1a-64
// checksum over the canonical payload. Round trips are bit-exact. Loading
// checks the format version before the checksum; files that do not parse at
// all (truncation, corruption) raise ChecksumMismatchError.
std::string model_to_json(const ModelParams& params, const FeatureSchema& schema);
TrainedModel model_from_json(const std::string& text);  // loss_curve left empty
void save_model(const ModelParams& params, const FeatureSchema& schema, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace p2p
