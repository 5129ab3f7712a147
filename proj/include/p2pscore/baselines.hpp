#pragma once

#include <memory>
#include <string>
#include <vector>

#include "p2pscore/domain.hpp"
#include "p2pscore/features.hpp"
#include "p2pscore/widedeep.hpp"

namespace p2p {

// ---------------------------------------------------------------------------
// Credit-scoring baseline: logistic regression over the wide encoding.
// ---------------------------------------------------------------------------

// Logistic regression as the degenerate wide-only model: the deep path is
// absent, so the score is sigma(wide_weights . x + bias). Unlike the joint
// model this convex problem starts from all-zero weights, so an untrained
// classifier (steps = 0) predicts exactly 0.5 everywhere. The architecture
// and loss in `config` are ignored (forced to wide-only cross-entropy).
// Throws UsageError on bad config or non-0/1 labels.
TrainedModel train_logistic(const FeatureSchema& schema, const TrainMatrix& data,
                            const TrainConfig& config);

// ---------------------------------------------------------------------------
// Profit-scoring baseline: regression tree over raw feature values.
// ---------------------------------------------------------------------------

struct CartConfig {
    int max_depth = 6;
    int min_leaf = 20;
};

// One node of a fitted regression tree. Continuous splits send
// value <= threshold left; categorical splits send levels in left_levels
// left, levels in right_levels right, and levels never seen at the node to
// the child that held more training samples.
struct CartNode {
    bool leaf = true;
    double prediction = 0.0;  // mean label over the node's training samples
    size_t count = 0;         // training samples that reached the node

    std::string feature;
    bool categorical = false;
    double threshold = 0.0;
    std::vector<std::string> left_levels;   // sorted
    std::vector<std::string> right_levels;  // sorted
    bool unseen_goes_left = false;
    std::unique_ptr<CartNode> left;
    std::unique_ptr<CartNode> right;
};

struct CartModel {
    CartConfig config;
    std::unique_ptr<CartNode> root;
};

// Fits a greedy variance-reduction tree predicting realized IRR from the raw
// (unstandardized) model features: the continuous list plus the
// never-delinquent indicator and the six categorical features. Continuous
// candidates are midpoints between adjacent distinct sorted values;
// categorical candidates are prefix cuts of the node's levels ordered by
// mean label. Splitting stops at max_depth, when either child would fall
// under min_leaf, or when no split reduces the summed squared error.
// Records without an IRR label are ignored; throws EmptyInputError when none
// remain.
CartModel train_cart(const std::vector<LoanRecord>& records, const CartConfig& config = {});

// Routes the record to a leaf and returns that leaf's mean label.
double cart_predict(const CartModel& model, const LoanRecord& record);
std::vector<double> cart_predict(const CartModel& model, const std::vector<LoanRecord>& records);

// Weighted training loss: sum over leaves of within-leaf squared error,
// divided by the training count. Non-increasing in max_depth.
double cart_training_loss(const CartModel& model, const std::vector<LoanRecord>& records);

// Same versioned, checksummed container as the joint model, with
// model_type "cart".
std::string cart_to_json(const CartModel& model);
CartModel cart_from_json(const std::string& text);
void save_cart(const CartModel& model, const std::string& path);
CartModel load_cart(const std::string& path);

}  // namespace p2p
