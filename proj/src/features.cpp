#include "p2pscore/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "p2pscore/errors.hpp"

namespace p2p {

using nlohmann::json;

const std::vector<std::string>& categorical_feature_names() {
    static const std::vector<std::string> names{"grade",   "subgrade", "purpose",
                                                "fico",    "housing",  "employment_length"};
    return names;
}

const std::vector<std::string>& continuous_feature_names() {
    static const std::vector<std::string> names{
        "annual_income",  "credit_history_length", "delinq_2yrs",
        "inquiries_6m",   "public_records",        "revol_util",
        "open_accounts",  "months_since_last_delinq", "loan_to_income",
        "installment_to_income", "dti"};
    return names;
}

const std::string& categorical_value(const LoanRecord& r, const std::string& feature) {
    if (feature == "grade") return r.grade;
    if (feature == "subgrade") return r.subgrade;
    if (feature == "purpose") return r.purpose;
    if (feature == "fico") return r.fico;
    if (feature == "housing") return r.housing;
    if (feature == "employment_length") return r.employment_length;
    throw SchemaError("unknown categorical feature '" + feature + "'");
}

namespace {

double ratio_or_derived(const std::optional<double>& stored, double numerator, double income) {
    if (stored) return *stored;
    return income > 0.0 ? numerator / income : 0.0;
}

}  // namespace

double continuous_value(const LoanRecord& r, const std::string& feature) {
    if (feature == "annual_income") return r.annual_income;
    if (feature == "credit_history_length") return r.credit_history_length;
    if (feature == "delinq_2yrs") return r.delinq_2yrs;
    if (feature == "inquiries_6m") return r.inquiries_6m;
    if (feature == "public_records") return r.public_records;
    if (feature == "revol_util") return r.revol_util;
    if (feature == "open_accounts") return r.open_accounts;
    if (feature == "months_since_last_delinq") {
        return r.months_since_last_delinq ? static_cast<double>(*r.months_since_last_delinq) : 0.0;
    }
    if (feature == "loan_to_income") {
        return ratio_or_derived(r.loan_to_income, r.funded_amount, r.annual_income);
    }
    if (feature == "installment_to_income") {
        return ratio_or_derived(r.installment_to_income, 12.0 * r.installment, r.annual_income);
    }
    if (feature == "dti") return r.dti;
    if (feature == "never_delinq") return r.months_since_last_delinq ? 0.0 : 1.0;
    throw SchemaError("unknown continuous feature '" + feature + "'");
}

size_t FeatureSchema::categorical_index(const std::string& name) const {
    const auto& names = categorical_feature_names();
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw SchemaError("unknown categorical feature '" + name + "'");
}

size_t FeatureSchema::levels_with_unk(const std::string& name) const {
    return vocabularies[categorical_index(name)].size() + 1;
}

std::vector<std::string> FeatureSchema::dense_feature_names() const {
    std::vector<std::string> names = continuous_feature_names();
    if (never_delinq_indicator) names.push_back("never_delinq");
    return names;
}

size_t FeatureSchema::dense_count() const {
    return continuous_feature_names().size() + (never_delinq_indicator ? 1 : 0);
}

std::vector<std::string> FeatureSchema::wide_block_names() const {
    std::vector<std::string> names = categorical_feature_names();
    for (const auto& [a, b] : cross_specs) names.push_back("cross:" + a + "*" + b);
    return names;
}

std::vector<size_t> FeatureSchema::wide_block_sizes() const {
    std::vector<size_t> sizes;
    for (const auto& name : categorical_feature_names()) sizes.push_back(levels_with_unk(name));
    for (const auto& [a, b] : cross_specs) {
        sizes.push_back(levels_with_unk(a) * levels_with_unk(b));
    }
    return sizes;
}

std::vector<size_t> FeatureSchema::wide_block_offsets() const {
    std::vector<size_t> offsets;
    size_t at = 0;
    for (size_t s : wide_block_sizes()) {
        offsets.push_back(at);
        at += s;
    }
    return offsets;
}

size_t FeatureSchema::wide_dim() const {
    size_t total = 0;
    for (size_t s : wide_block_sizes()) total += s;
    return total;
}

size_t FeatureSchema::deep_input_dim() const {
    size_t total = dense_count();
    for (const auto& [name, dim] : embedding_specs) {
        (void)name;
        total += static_cast<size_t>(dim);
    }
    return total;
}

FeatureSchema fit_schema(const std::vector<LoanRecord>& train, const SchemaConfig& config) {
    if (train.empty()) throw EmptyInputError("cannot fit a feature schema on an empty set");

    FeatureSchema schema;
    schema.cross_specs = config.cross_specs;
    schema.embedding_specs = config.embedding_specs;
    schema.never_delinq_indicator = config.never_delinq_indicator;

    for (const auto& feature : categorical_feature_names()) {
        std::set<std::string> levels;
        for (const auto& r : train) levels.insert(categorical_value(r, feature));
        schema.vocabularies.emplace_back(levels.begin(), levels.end());
    }

    const auto dense_names = schema.dense_feature_names();
    const double n = static_cast<double>(train.size());
    for (const auto& feature : dense_names) {
        double sum = 0.0;
        for (const auto& r : train) sum += continuous_value(r, feature);
        double mean = sum / n;
        double sq = 0.0;
        for (const auto& r : train) {
            double d = continuous_value(r, feature) - mean;
            sq += d * d;
        }
        double std_dev = std::sqrt(sq / n);  // population std
        if (std_dev < 1e-12) std_dev = 1.0;
        schema.continuous_stats.emplace_back(mean, std_dev);
    }
    return schema;
}

uint32_t encode_onehot(const FeatureSchema& schema, const std::string& feature,
                       const std::string& level) {
    const auto& vocab = schema.vocabularies[schema.categorical_index(feature)];
    auto it = std::lower_bound(vocab.begin(), vocab.end(), level);
    if (it != vocab.end() && *it == level) {
        return static_cast<uint32_t>(it - vocab.begin());
    }
    return static_cast<uint32_t>(vocab.size());  // unknown slot, last
}

uint32_t encode_cross(const FeatureSchema& schema,
                      const std::pair<std::string, std::string>& pair, const std::string& level_a,
                      const std::string& level_b) {
    uint32_t ia = encode_onehot(schema, pair.first, level_a);
    uint32_t ib = encode_onehot(schema, pair.second, level_b);
    uint32_t width_b = static_cast<uint32_t>(schema.levels_with_unk(pair.second));
    return ia * width_b + ib;
}

WideVector encode_wide(const FeatureSchema& schema, const LoanRecord& record) {
    WideVector out;
    out.dim = static_cast<uint32_t>(schema.wide_dim());
    const auto offsets = schema.wide_block_offsets();
    const auto& names = categorical_feature_names();
    size_t block = 0;
    for (; block < names.size(); ++block) {
        uint32_t idx = encode_onehot(schema, names[block], categorical_value(record, names[block]));
        out.active.push_back(static_cast<uint32_t>(offsets[block]) + idx);
    }
    for (const auto& pair : schema.cross_specs) {
        uint32_t idx = encode_cross(schema, pair, categorical_value(record, pair.first),
                                    categorical_value(record, pair.second));
        out.active.push_back(static_cast<uint32_t>(offsets[block++]) + idx);
    }
    return out;
}

DeepVector encode_deep(const FeatureSchema& schema, const LoanRecord& record) {
    DeepVector out;
    const auto dense_names = schema.dense_feature_names();
    out.dense.reserve(dense_names.size());
    for (size_t i = 0; i < dense_names.size(); ++i) {
        const auto& [mean, std_dev] = schema.continuous_stats[i];
        out.dense.push_back((continuous_value(record, dense_names[i]) - mean) / std_dev);
    }
    for (const auto& [feature, dim] : schema.embedding_specs) {
        (void)dim;
        out.embedding_ids.push_back(
            encode_onehot(schema, feature, categorical_value(record, feature)));
    }
    return out;
}

EncodedRow encode_row(const FeatureSchema& schema, const LoanRecord& record) {
    return {encode_wide(schema, record), encode_deep(schema, record)};
}

std::vector<std::string> unseen_levels(const FeatureSchema& schema, const LoanRecord& record) {
    std::vector<std::string> out;
    for (const auto& feature : categorical_feature_names()) {
        const auto& vocab = schema.vocabularies[schema.categorical_index(feature)];
        uint32_t idx = encode_onehot(schema, feature, categorical_value(record, feature));
        if (idx == vocab.size()) out.push_back(feature);
    }
    return out;
}

std::string schema_to_json(const FeatureSchema& schema) {
    json doc;
    doc["format_version"] = schema.version;
    doc["kind"] = "p2pscore-schema";
    doc["never_delinq_indicator"] = schema.never_delinq_indicator;
    json vocab = json::object();
    const auto& names = categorical_feature_names();
    for (size_t i = 0; i < names.size(); ++i) vocab[names[i]] = schema.vocabularies[i];
    doc["vocabularies"] = vocab;
    doc["cross_specs"] = schema.cross_specs;
    doc["embedding_specs"] = schema.embedding_specs;
    json stats = json::object();
    const auto dense_names = schema.dense_feature_names();
    for (size_t i = 0; i < dense_names.size(); ++i) {
        stats[dense_names[i]] = {schema.continuous_stats[i].first,
                                 schema.continuous_stats[i].second};
    }
    doc["continuous_stats"] = stats;
    return doc.dump(2) + "\n";
}

FeatureSchema schema_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema JSON unreadable: ") + e.what());
    }
    if (!doc.contains("kind") || doc["kind"] != "p2pscore-schema") {
        throw ParseError("not a feature-schema document");
    }
    int version = doc.value("format_version", -1);
    if (version != 1) {
        throw VersionMismatchError("schema format_version " + std::to_string(version) +
                                   " unsupported; this build reads version 1");
    }
    FeatureSchema schema;
    schema.version = version;
    schema.never_delinq_indicator = doc.at("never_delinq_indicator").get<bool>();
    for (const auto& name : categorical_feature_names()) {
        schema.vocabularies.push_back(doc.at("vocabularies").at(name).get<std::vector<std::string>>());
    }
    schema.cross_specs =
        doc.at("cross_specs").get<std::vector<std::pair<std::string, std::string>>>();
    schema.embedding_specs =
        doc.at("embedding_specs").get<std::vector<std::pair<std::string, int>>>();
    for (const auto& name : schema.dense_feature_names()) {
        auto pair = doc.at("continuous_stats").at(name).get<std::vector<double>>();
        if (pair.size() != 2) throw ParseError("continuous_stats entries must be [mean, std]");
        schema.continuous_stats.emplace_back(pair[0], pair[1]);
    }
    return schema;
}

}  // namespace p2p
