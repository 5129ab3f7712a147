#include "p2pscore/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <nlohmann/json.hpp>

#include "model_container.hpp"
#include "p2pscore/errors.hpp"
#include "p2pscore/rng.hpp"

namespace p2p {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Logistic regression baseline
// ---------------------------------------------------------------------------

TrainedModel train_logistic(const FeatureSchema& schema, const TrainMatrix& data,
                            const TrainConfig& config) {
    TrainConfig cfg = config;
    cfg.architecture = Architecture::Wide;
    cfg.loss = LossKind::CrossEntropy;

    // init_params validates the config; the Gaussian draw is then overwritten
    // because the convex logistic problem starts from the canonical zero
    // point (an untrained classifier scores 0.5 everywhere).
    ModelParams params = init_params(schema, cfg);
    std::fill(params.wide_weights.begin(), params.wide_weights.end(), 0.0);
    params.output_bias = 0.0;

    if (data.rows.size() != data.labels.size()) {
        throw UsageError("rows and labels differ in length");
    }
    if (data.size() < static_cast<size_t>(cfg.batch_size)) {
        throw UsageError("dataset size " + std::to_string(data.size()) +
                         " is smaller than batch_size " + std::to_string(cfg.batch_size));
    }
    for (double y : data.labels) {
        if (y != 0.0 && y != 1.0) {
            throw UsageError("cross-entropy labels must be 0 or 1");
        }
    }

    TrainedModel out;
    out.schema = schema;
    Rng rng(cfg.seed);
    for (int step = 0; step < cfg.steps; ++step) {
        auto batch = rng.sample_indices(data.size(), static_cast<size_t>(cfg.batch_size));
        out.loss_curve.push_back(
            train_step(params, data, batch, cfg, rng, static_cast<size_t>(step)));
    }
    out.params = std::move(params);
    return out;
}

// ---------------------------------------------------------------------------
// Regression tree baseline
// ---------------------------------------------------------------------------

namespace {

// Split search is over the same features the joint model sees, on raw values.
const std::vector<std::string>& cart_continuous_features() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out = continuous_feature_names();
        out.push_back("never_delinq");
        return out;
    }();
    return names;
}

struct NodeStats {
    size_t n = 0;
    double sum = 0.0;
    double sumsq = 0.0;

    void add(double y) {
        ++n;
        sum += y;
        sumsq += y * y;
    }
    double mean() const { return sum / static_cast<double>(n); }
    // Within-node sum of squared errors around the mean, clamped against
    // cancellation noise.
    double sse() const {
        return std::max(0.0, sumsq - sum * sum / static_cast<double>(n));
    }
};

struct BestSplit {
    double gain = 0.0;  // sse(parent) - sse(left) - sse(right); must be > 0
    bool found = false;
    std::string feature;
    bool categorical = false;
    double threshold = 0.0;
    std::vector<std::string> left_levels;
};

void consider(BestSplit& best, double gain, const std::string& feature, bool categorical,
              double threshold, std::vector<std::string> left_levels) {
    if (gain <= 0.0) return;
    if (best.found && gain <= best.gain) return;
    best.found = true;
    best.gain = gain;
    best.feature = feature;
    best.categorical = categorical;
    best.threshold = threshold;
    best.left_levels = std::move(left_levels);
}

std::unique_ptr<CartNode> build_node(const std::vector<const LoanRecord*>& rows,
                                     const std::vector<double>& labels,
                                     const std::vector<size_t>& members, int depth,
                                     const CartConfig& config) {
    NodeStats stats;
    for (size_t i : members) stats.add(labels[i]);

    auto node = std::make_unique<CartNode>();
    node->prediction = stats.mean();
    node->count = stats.n;

    size_t min_leaf = static_cast<size_t>(config.min_leaf);
    if (depth >= config.max_depth || stats.n < 2 * min_leaf || stats.sse() <= 1e-12) {
        return node;
    }

    BestSplit best;

    for (const auto& feature : cart_continuous_features()) {
        std::vector<std::pair<double, double>> items;  // (value, label)
        items.reserve(members.size());
        for (size_t i : members) {
            items.push_back({continuous_value(*rows[i], feature), labels[i]});
        }
        std::sort(items.begin(), items.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double left_sum = 0.0;
        double left_sumsq = 0.0;
        for (size_t k = 0; k + 1 < items.size(); ++k) {
            left_sum += items[k].second;
            left_sumsq += items[k].second * items[k].second;
            size_t nl = k + 1;
            size_t nr = items.size() - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            if (!(items[k].first < items[k + 1].first)) continue;  // not a boundary
            double lsse =
                std::max(0.0, left_sumsq - left_sum * left_sum / static_cast<double>(nl));
            double rsum = stats.sum - left_sum;
            double rsse = std::max(0.0, (stats.sumsq - left_sumsq) -
                                            rsum * rsum / static_cast<double>(nr));
            consider(best, stats.sse() - lsse - rsse, feature, false,
                     (items[k].first + items[k + 1].first) / 2.0, {});
        }
    }

    for (const auto& feature : categorical_feature_names()) {
        std::map<std::string, NodeStats> groups;  // level-sorted: deterministic
        for (size_t i : members) groups[categorical_value(*rows[i], feature)].add(labels[i]);
        if (groups.size() < 2) continue;

        // Order levels by mean label (level name breaks ties), then scan
        // prefix cuts of that ordering.
        std::vector<std::pair<std::string, NodeStats>> ordered(groups.begin(), groups.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            double ma = a.second.mean();
            double mb = b.second.mean();
            return ma != mb ? ma < mb : a.first < b.first;
        });

        NodeStats left;
        std::vector<std::string> levels;
        for (size_t k = 0; k + 1 < ordered.size(); ++k) {
            left.n += ordered[k].second.n;
            left.sum += ordered[k].second.sum;
            left.sumsq += ordered[k].second.sumsq;
            levels.push_back(ordered[k].first);
            size_t nr = stats.n - left.n;
            if (left.n < min_leaf || nr < min_leaf) continue;
            double rsum = stats.sum - left.sum;
            double rsse = std::max(0.0, (stats.sumsq - left.sumsq) -
                                            rsum * rsum / static_cast<double>(nr));
            consider(best, stats.sse() - left.sse() - rsse, feature, true, 0.0, levels);
        }
    }

    if (!best.found) return node;

    std::vector<std::string> left_sorted = best.left_levels;
    std::sort(left_sorted.begin(), left_sorted.end());
    std::vector<size_t> left_members;
    std::vector<size_t> right_members;
    std::vector<std::string> right_levels;
    for (size_t i : members) {
        bool go_left;
        if (best.categorical) {
            const std::string& level = categorical_value(*rows[i], best.feature);
            go_left = std::binary_search(left_sorted.begin(), left_sorted.end(), level);
            if (!go_left &&
                !std::binary_search(right_levels.begin(), right_levels.end(), level)) {
                right_levels.insert(
                    std::upper_bound(right_levels.begin(), right_levels.end(), level), level);
            }
        } else {
            go_left = continuous_value(*rows[i], best.feature) <= best.threshold;
        }
        (go_left ? left_members : right_members).push_back(i);
    }

    node->leaf = false;
    node->feature = best.feature;
    node->categorical = best.categorical;
    node->threshold = best.threshold;
    node->left_levels = std::move(left_sorted);
    node->right_levels = std::move(right_levels);
    node->unseen_goes_left = left_members.size() >= right_members.size();
    node->left = build_node(rows, labels, left_members, depth + 1, config);
    node->right = build_node(rows, labels, right_members, depth + 1, config);
    return node;
}

}  // namespace

CartModel train_cart(const std::vector<LoanRecord>& records, const CartConfig& config) {
    if (config.max_depth < 0) throw UsageError("max_depth must be non-negative");
    if (config.min_leaf < 1) throw UsageError("min_leaf must be at least 1");

    std::vector<const LoanRecord*> rows;
    std::vector<double> labels;
    for (const auto& r : records) {
        if (!r.irr) continue;
        rows.push_back(&r);
        labels.push_back(*r.irr);
    }
    if (rows.empty()) throw EmptyInputError("no records carry an IRR label");

    std::vector<size_t> members(rows.size());
    for (size_t i = 0; i < members.size(); ++i) members[i] = i;

    CartModel model;
    model.config = config;
    model.root = build_node(rows, labels, members, 0, config);
    return model;
}

double cart_predict(const CartModel& model, const LoanRecord& record) {
    const CartNode* node = model.root.get();
    while (!node->leaf) {
        bool go_left;
        if (node->categorical) {
            const std::string& level = categorical_value(record, node->feature);
            if (std::binary_search(node->left_levels.begin(), node->left_levels.end(), level)) {
                go_left = true;
            } else if (std::binary_search(node->right_levels.begin(), node->right_levels.end(),
                                          level)) {
                go_left = false;
            } else {
                go_left = node->unseen_goes_left;
            }
        } else {
            go_left = continuous_value(record, node->feature) <= node->threshold;
        }
        node = go_left ? node->left.get() : node->right.get();
    }
    return node->prediction;
}

std::vector<double> cart_predict(const CartModel& model, const std::vector<LoanRecord>& records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(cart_predict(model, r));
    return out;
}

double cart_training_loss(const CartModel& model, const std::vector<LoanRecord>& records) {
    double total = 0.0;
    size_t n = 0;
    for (const auto& r : records) {
        if (!r.irr) continue;
        double err = *r.irr - cart_predict(model, r);
        total += err * err;
        ++n;
    }
    if (n == 0) throw EmptyInputError("no records carry an IRR label");
    return total / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json node_to_json(const CartNode& node) {
    json j;
    j["leaf"] = node.leaf;
    j["prediction"] = node.prediction;
    j["count"] = node.count;
    if (!node.leaf) {
        j["feature"] = node.feature;
        j["kind"] = node.categorical ? "categorical" : "continuous";
        if (node.categorical) {
            j["left_levels"] = node.left_levels;
            j["right_levels"] = node.right_levels;
            j["unseen_goes_left"] = node.unseen_goes_left;
        } else {
            j["threshold"] = node.threshold;
        }
        j["left"] = node_to_json(*node.left);
        j["right"] = node_to_json(*node.right);
    }
    return j;
}

std::unique_ptr<CartNode> node_from_json(const json& j) {
    auto node = std::make_unique<CartNode>();
    node->leaf = j.at("leaf").get<bool>();
    node->prediction = j.at("prediction").get<double>();
    node->count = j.at("count").get<size_t>();
    if (!node->leaf) {
        node->feature = j.at("feature").get<std::string>();
        node->categorical = j.at("kind").get<std::string>() == "categorical";
        if (node->categorical) {
            node->left_levels = j.at("left_levels").get<std::vector<std::string>>();
            node->right_levels = j.at("right_levels").get<std::vector<std::string>>();
            node->unseen_goes_left = j.at("unseen_goes_left").get<bool>();
        } else {
            node->threshold = j.at("threshold").get<double>();
        }
        node->left = node_from_json(j.at("left"));
        node->right = node_from_json(j.at("right"));
    }
    return node;
}

}  // namespace

std::string cart_to_json(const CartModel& model) {
    json body;
    body["model_type"] = "cart";
    body["task"] = "regression";
    body["max_depth"] = model.config.max_depth;
    body["min_leaf"] = model.config.min_leaf;
    body["tree"] = node_to_json(*model.root);
    return container::wrap(std::move(body));
}

CartModel cart_from_json(const std::string& text) {
    json body = container::unwrap(text);
    try {
        if (body.at("model_type").get<std::string>() != "cart") {
            throw ParseError("model file holds a " + body["model_type"].get<std::string>() +
                             " model, not a cart model");
        }
        CartModel model;
        model.config.max_depth = body.at("max_depth").get<int>();
        model.config.min_leaf = body.at("min_leaf").get<int>();
        model.root = node_from_json(body.at("tree"));
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed model file: ") + e.what());
    }
}

void save_cart(const CartModel& model, const std::string& path) {
    container::write_file(path, cart_to_json(model));
}

CartModel load_cart(const std::string& path) {
    return cart_from_json(container::read_file(path));
}

}  // namespace p2p
