#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "p2pscore/domain.hpp"

namespace p2p {

// Fixed canonical feature orders. Categorical features feed the sparse
// (wide) encoding; the continuous list is the dense deep input order.
const std::vector<std::string>& categorical_feature_names();  // 6 features
const std::vector<std::string>& continuous_feature_names();   // 11 features

// Raw (unstandardized) value of a named feature. Missing
// months_since_last_delinq reads as 0, and the derived "never_delinq"
// indicator reads 1 exactly when it is missing. Throws SchemaError on an
// unknown feature name.
const std::string& categorical_value(const LoanRecord& record, const std::string& feature);
double continuous_value(const LoanRecord& record, const std::string& feature);

struct SchemaConfig {
    // Pairs of categorical features combined into cross-product indicators.
    std::vector<std::pair<std::string, std::string>> cross_specs = {{"fico", "purpose"},
                                                                    {"subgrade", "fico"}};
    // Embedded categorical features and their embedding widths, in deep-input
    // order.
    std::vector<std::pair<std::string, int>> embedding_specs = {
        {"subgrade", 8}, {"purpose", 8}, {"fico", 8}};
    // When true, "never delinquent" becomes an extra dense indicator column
    // (and months_since_last_delinq contributes 0 for such records).
    bool never_delinq_indicator = true;
};

struct FeatureSchema {
    int version = 1;
    // Aligned with categorical_feature_names(): sorted observed levels per
    // feature; the unknown-level slot is implicit at index levels.size().
    std::vector<std::vector<std::string>> vocabularies;
    std::vector<std::pair<std::string, std::string>> cross_specs;
    std::vector<std::pair<std::string, int>> embedding_specs;
    // Aligned with dense_feature_names(): (mean, std) fitted on train.
    std::vector<std::pair<double, double>> continuous_stats;
    bool never_delinq_indicator = true;

    size_t categorical_index(const std::string& name) const;  // throws SchemaError
    // Vocabulary size including the unknown slot.
    size_t levels_with_unk(const std::string& name) const;

    // Dense layout: continuous_feature_names() plus the optional indicator.
    std::vector<std::string> dense_feature_names() const;
    size_t dense_count() const;

    // Wide layout: one block per categorical feature then one per cross.
    std::vector<std::string> wide_block_names() const;
    std::vector<size_t> wide_block_sizes() const;
    std::vector<size_t> wide_block_offsets() const;
    size_t wide_dim() const;

    size_t deep_input_dim() const;  // dense_count + sum of embedding dims
};

// Sparse indicator vector: exactly one active index (value 1) per categorical
// block and per cross block, sorted ascending.
struct WideVector {
    std::vector<uint32_t> active;
    uint32_t dim = 0;
};

// Dense standardized values plus embedding row ids (one per embedding spec).
struct DeepVector {
    std::vector<double> dense;
    std::vector<uint32_t> embedding_ids;
};

struct EncodedRow {
    WideVector wide;
    DeepVector deep;
};

// Learns vocabularies (observed levels, sorted, deduplicated) and continuous
// statistics from the training split only. Population std (divide by n);
// stds below 1e-12 are recorded as 1 so constant features stay harmless.
// Throws EmptyInputError.
FeatureSchema fit_schema(const std::vector<LoanRecord>& train, const SchemaConfig& config = {});

// Index of `level` inside its feature block; unseen levels map to the
// unknown slot (last index of the block).
uint32_t encode_onehot(const FeatureSchema& schema, const std::string& feature,
                       const std::string& level);

// Row-major cell index inside the cross block for the pair:
// index_a * (levels_b + unk) + index_b.
uint32_t encode_cross(const FeatureSchema& schema,
                      const std::pair<std::string, std::string>& pair, const std::string& level_a,
                      const std::string& level_b);

WideVector encode_wide(const FeatureSchema& schema, const LoanRecord& record);
DeepVector encode_deep(const FeatureSchema& schema, const LoanRecord& record);
EncodedRow encode_row(const FeatureSchema& schema, const LoanRecord& record);

// Names of categorical features whose level was not in the vocabulary
// (useful for flagging UNK-scored listings).
std::vector<std::string> unseen_levels(const FeatureSchema& schema, const LoanRecord& record);

// Versioned JSON round trip.
std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const std::string& text);

}  // namespace p2p
