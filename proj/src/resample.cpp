#include "p2pscore/resample.hpp"

#include <algorithm>
#include <cmath>

#include "p2pscore/errors.hpp"
#include "p2pscore/rng.hpp"

namespace p2p {

std::string to_string(ResampleMethod m) {
    switch (m) {
        case ResampleMethod::None: return "none";
        case ResampleMethod::Undersample: return "undersample";
        case ResampleMethod::Oversample: return "oversample";
        case ResampleMethod::Smote: return "smote";
    }
    return "none";
}

ResampleMethod resample_method_from_string(std::string_view text) {
    if (text == "none") return ResampleMethod::None;
    if (text == "undersample" || text == "under") return ResampleMethod::Undersample;
    if (text == "oversample" || text == "over") return ResampleMethod::Oversample;
    if (text == "smote") return ResampleMethod::Smote;
    throw UsageError("unknown resample method '" + std::string(text) +
                     "' (expected none/undersample/oversample/smote)");
}

namespace {

struct ClassSplit {
    std::vector<size_t> minority;
    std::vector<size_t> majority;
};

ClassSplit split_classes(const TrainMatrix& data) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < data.size(); ++i) {
        (data.labels[i] == 1.0 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw OneClassOnlyError("resampling needs both classes present, got " +
                                std::to_string(pos.size()) + " positive / " +
                                std::to_string(neg.size()) + " negative");
    }
    if (pos.size() <= neg.size()) return {pos, neg};
    return {neg, pos};
}

TrainMatrix gather(const TrainMatrix& data, const std::vector<size_t>& keep) {
    TrainMatrix out;
    out.rows.reserve(keep.size());
    out.labels.reserve(keep.size());
    for (size_t i : keep) {
        out.rows.push_back(data.rows[i]);
        out.labels.push_back(data.labels[i]);
    }
    return out;
}

}  // namespace

TrainMatrix undersample(const TrainMatrix& data, const ResamplePlan& plan) {
    ClassSplit cls = split_classes(data);
    Rng rng(plan.seed);
    std::vector<size_t> picked = rng.sample_indices(cls.majority.size(), cls.minority.size());
    std::vector<size_t> keep = cls.minority;
    for (size_t p : picked) keep.push_back(cls.majority[p]);
    std::sort(keep.begin(), keep.end());  // canonical order: original positions
    return gather(data, keep);
}

TrainMatrix oversample(const TrainMatrix& data, const ResamplePlan& plan) {
    ClassSplit cls = split_classes(data);
    Rng rng(plan.seed);
    TrainMatrix out = data;
    size_t need = cls.majority.size() - cls.minority.size();
    for (size_t i = 0; i < need; ++i) {
        size_t pick = cls.minority[rng.uniform_index(cls.minority.size())];
        out.rows.push_back(data.rows[pick]);
        out.labels.push_back(data.labels[pick]);
    }
    return out;
}

std::vector<EncodedRow> smote(const std::vector<EncodedRow>& minority, size_t majority_count,
                              const ResamplePlan& plan) {
    const size_t n = minority.size();
    const size_t k = static_cast<size_t>(std::max(1, plan.k_neighbors));
    if (n <= k) {
        throw TooFewMinorityError("SMOTE needs more minority rows (" + std::to_string(n) +
                                  ") than neighbors k=" + std::to_string(k));
    }
    if (majority_count <= n) return {};
    const size_t need = majority_count - n;
    const size_t dim = minority.front().deep.dense.size();

    // k nearest minority neighbors per row, Euclidean on the dense block.
    // Ties broken by index so the neighbor lists are a deterministic
    // function of the data.
    std::vector<std::vector<uint32_t>> knn(n);
    std::vector<std::pair<double, uint32_t>> dist;
    dist.reserve(n - 1);
    for (size_t i = 0; i < n; ++i) {
        dist.clear();
        const auto& xi = minority[i].deep.dense;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto& xj = minority[j].deep.dense;
            double d2 = 0.0;
            for (size_t c = 0; c < dim; ++c) {
                double d = xi[c] - xj[c];
                d2 += d * d;
            }
            dist.emplace_back(d2, static_cast<uint32_t>(j));
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        knn[i].reserve(k);
        for (size_t t = 0; t < k; ++t) knn[i].push_back(dist[t].second);
    }

    Rng rng(plan.seed);
    std::vector<EncodedRow> out;
    out.reserve(need);
    // Bases visited round-robin: emission e interpolates from minority row
    // e % n. The emission order is already sorted by (base, visit) because
    // e % n cycles and e / n increases, so output order is canonical.
    std::vector<std::vector<EncodedRow>> per_base(n);
    for (size_t e = 0; e < need; ++e) {
        size_t b = e % n;
        const auto& neighbors = knn[b];
        size_t z = neighbors[rng.uniform_index(neighbors.size())];
        double u = rng.uniform();
        EncodedRow row = minority[b];  // wide indicators + embedding ids copied
        const auto& zd = minority[z].deep.dense;
        for (size_t c = 0; c < dim; ++c) {
            row.deep.dense[c] += u * (zd[c] - row.deep.dense[c]);
        }
        per_base[b].push_back(std::move(row));
    }
    for (auto& rows : per_base) {
        for (auto& r : rows) out.push_back(std::move(r));
    }
    return out;
}

TrainMatrix resample(const TrainMatrix& data, const ResamplePlan& plan) {
    switch (plan.method) {
        case ResampleMethod::None:
            return data;
        case ResampleMethod::Undersample:
            return undersample(data, plan);
        case ResampleMethod::Oversample:
            return oversample(data, plan);
        case ResampleMethod::Smote: {
            ClassSplit cls = split_classes(data);
            double minority_label = data.labels[cls.minority.front()];
            std::vector<EncodedRow> minority_rows;
            minority_rows.reserve(cls.minority.size());
            for (size_t i : cls.minority) minority_rows.push_back(data.rows[i]);
            auto synthetic = smote(minority_rows, cls.majority.size(), plan);
            TrainMatrix out = data;
            for (auto& row : synthetic) {
                out.rows.push_back(std::move(row));
                out.labels.push_back(minority_label);
            }
            return out;
        }
    }
    return data;
}

}  // namespace p2p
