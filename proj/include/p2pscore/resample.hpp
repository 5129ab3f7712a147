#pragma once

#include <cstdint>
#include <vector>

#include "p2pscore/features.hpp"

namespace p2p {

enum class ResampleMethod { None, Undersample, Oversample, Smote };

std::string to_string(ResampleMethod m);
ResampleMethod resample_method_from_string(std::string_view text);  // throws UsageError

struct ResamplePlan {
    ResampleMethod method = ResampleMethod::None;
    int k_neighbors = 5;  // SMOTE only
    uint64_t seed = 0;
};

// Encoded, labeled training set. For classification the label is 1.0 for the
// positive-coded class (Default) and 0.0 otherwise; for regression it is the
// target value.
struct TrainMatrix {
    std::vector<EncodedRow> rows;
    std::vector<double> labels;

    size_t size() const { return rows.size(); }
};

// Majority class cut down (without replacement) to the minority count.
// Deterministic per plan.seed. Throws OneClassOnlyError.
TrainMatrix undersample(const TrainMatrix& data, const ResamplePlan& plan);

// Minority class replicated (with replacement) up to the majority count;
// every added row is an exact copy of a minority row. Throws
// OneClassOnlyError.
TrainMatrix oversample(const TrainMatrix& data, const ResamplePlan& plan);

// Synthetic minority rows: each one is base + u * (neighbor - base) on the
// dense block only (u ~ U(0,1), neighbor among the base's k nearest minority
// neighbors by Euclidean distance on the dense block); the wide indicators
// and embedding ids are copied from the base row. Emits exactly
// (majority_count - minority rows) rows; bases are visited round-robin.
// Throws TooFewMinorityError when minority <= k_neighbors.
std::vector<EncodedRow> smote(const std::vector<EncodedRow>& minority, size_t majority_count,
                              const ResamplePlan& plan);

// Dispatch on plan.method; None returns the input unchanged. Classification
// labels only (0/1).
TrainMatrix resample(const TrainMatrix& data, const ResamplePlan& plan);

}  // namespace p2p
