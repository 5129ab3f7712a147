#include "p2pscore/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "p2pscore/baselines.hpp"
#include "p2pscore/csvio.hpp"
#include "p2pscore/dates.hpp"
#include "p2pscore/errors.hpp"
#include "p2pscore/features.hpp"
#include "p2pscore/ingest.hpp"
#include "p2pscore/irr.hpp"
#include "p2pscore/pipeline.hpp"
#include "p2pscore/resample.hpp"
#include "p2pscore/version.hpp"
#include "p2pscore/widedeep.hpp"

namespace p2p {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration: a flat key=value file, overridden by flags, resolved into a
// complete key->value map that is echoed into every report.
// ---------------------------------------------------------------------------

struct KeyDefault {
    const char* key;
    const char* value;
};

// Every recognized config key with its default. Empty seed defaults mean
// "derive from the master seed" (documented offsets below).
const std::vector<KeyDefault>& known_keys() {
    static const std::vector<KeyDefault> keys = {
        {"loans", ""},
        {"payments", ""},
        {"listings", ""},
        {"model_dir", ""},
        {"out_dir", "out"},
        {"seed", "1"},
        {"cohort.min_year", "2008"},
        {"cohort.max_year", "2013"},
        {"split.train_fraction", "0.8"},
        {"split.seed", ""},
        {"synth.n_loans", "20000"},
        {"synth.default_rate_target", "0.15"},
        {"synth.seed", ""},
        {"synth.note_rate_lo", "0.05"},
        {"synth.note_rate_hi", "0.31"},
        {"synth.term_months", "36,60"},
        {"synth.prepay_fraction", "0.1"},
        {"resample.method", "smote"},
        {"resample.k_neighbors", "5"},
        {"resample.seed", ""},
        {"stage1.steps", "1000"},
        {"stage1.batch_size", "100"},
        {"stage1.learning_rate", "0.002"},
        {"stage1.dropout_rate", "0.2"},
        {"stage1.hidden_layers", "100,50,10"},
        {"stage1.architecture", "widedeep"},
        {"stage1.seed", ""},
        {"stage2.steps", "1000"},
        {"stage2.batch_size", "100"},
        {"stage2.learning_rate", "0.002"},
        {"stage2.dropout_rate", "0.2"},
        {"stage2.hidden_layers", "100,50,10"},
        {"stage2.architecture", "widedeep"},
        {"stage2.seed", ""},
        {"logistic.steps", "1000"},
        {"logistic.batch_size", "100"},
        {"logistic.learning_rate", "0.002"},
        {"logistic.seed", ""},
        {"cart.max_depth", "6"},
        {"cart.min_leaf", "20"},
        {"gamma", "0.5"},
        {"top_k", "30"},
    };
    return keys;
}

bool is_column_key(const std::string& key) { return key.rfind("column.", 0) == 0; }

bool is_known_field(const std::string& field) {
    const auto& req = ColumnMap::required_fields();
    const auto& opt = ColumnMap::optional_fields();
    return std::find(req.begin(), req.end(), field) != req.end() ||
           std::find(opt.begin(), opt.end(), field) != opt.end();
}

std::string trimmed(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

void check_key(const std::string& key) {
    if (is_column_key(key)) {
        std::string field = key.substr(7);
        if (!is_known_field(field))
            throw UsageError("unknown record field in config key '" + key + "'");
        return;
    }
    for (const auto& kd : known_keys())
        if (key == kd.key) return;
    throw UsageError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::map<std::string, std::string> values;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) +
                             " is not key=value: " + t);
        std::string key = trimmed(t.substr(0, eq));
        std::string value = trimmed(t.substr(eq + 1));
        check_key(key);
        values[key] = value;  // last assignment wins
    }
    return values;
}

// Flag values; unset optionals fall through to the config file / defaults.
struct FlagOverrides {
    std::optional<std::string> config;
    std::optional<std::string> out_dir, loans, payments, listings, model_dir, resample;
    std::optional<uint64_t> seed;
    std::optional<double> gamma;
    std::optional<long> top_k;
};

struct RunConfig {
    std::map<std::string, std::string> resolved;  // echoed into reports

    std::string loans, payments, listings, model_dir, out_dir;
    int cohort_min_year = 2008, cohort_max_year = 2013;
    double train_fraction = 0.8;
    uint64_t split_seed = 0;
    ColumnMap columns = ColumnMap::identity();
    SynthConfig synth;
    ResamplePlan plan;
    TrainConfig stage1, stage2, logistic;
    CartConfig cart;
    double gamma = 0.5;
    size_t top_k = 30;
};

long config_long(const std::map<std::string, std::string>& r, const std::string& key) {
    try {
        return parse_long(r.at(key));
    } catch (const ParseError&) {
        throw UsageError("config key '" + key + "' is not an integer: " + r.at(key));
    }
}

double config_double(const std::map<std::string, std::string>& r, const std::string& key) {
    try {
        return parse_double(r.at(key));
    } catch (const ParseError&) {
        throw UsageError("config key '" + key + "' is not a number: " + r.at(key));
    }
}

size_t config_count(const std::map<std::string, std::string>& r, const std::string& key) {
    long v = config_long(r, key);
    if (v < 0) throw UsageError("config key '" + key + "' must be non-negative");
    return static_cast<size_t>(v);
}

uint64_t config_seed(const std::map<std::string, std::string>& r, const std::string& key) {
    long v = config_long(r, key);
    if (v < 0) throw UsageError("config key '" + key + "' must be non-negative");
    return static_cast<uint64_t>(v);
}

std::vector<int> config_int_list(const std::map<std::string, std::string>& r,
                                 const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(r.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string t = trimmed(item);
        if (t.empty()) continue;
        try {
            out.push_back(static_cast<int>(parse_long(t)));
        } catch (const ParseError&) {
            throw UsageError("config key '" + key + "' holds a non-integer item: " + t);
        }
    }
    return out;
}

void fill_train_config(const std::map<std::string, std::string>& r, const std::string& prefix,
                       bool with_architecture, TrainConfig& c) {
    c.steps = static_cast<int>(config_long(r, prefix + ".steps"));
    c.batch_size = static_cast<int>(config_long(r, prefix + ".batch_size"));
    c.learning_rate = config_double(r, prefix + ".learning_rate");
    c.seed = config_seed(r, prefix + ".seed");
    if (with_architecture) {
        c.dropout_rate = config_double(r, prefix + ".dropout_rate");
        auto widths = config_int_list(r, prefix + ".hidden_layers");
        c.hidden_layers.assign(widths.begin(), widths.end());
        c.architecture = architecture_from_string(r.at(prefix + ".architecture"));
    }
}

RunConfig resolve_config(const FlagOverrides& flags) {
    std::map<std::string, std::string> r;
    for (const auto& kd : known_keys()) r[kd.key] = kd.value;
    if (flags.config) {
        for (auto& [k, v] : read_config_file(*flags.config)) r[k] = v;
    }
    if (flags.out_dir) r["out_dir"] = *flags.out_dir;
    if (flags.loans) r["loans"] = *flags.loans;
    if (flags.payments) r["payments"] = *flags.payments;
    if (flags.listings) r["listings"] = *flags.listings;
    if (flags.model_dir) r["model_dir"] = *flags.model_dir;
    if (flags.resample) r["resample.method"] = *flags.resample;
    if (flags.seed) r["seed"] = std::to_string(*flags.seed);
    if (flags.gamma) r["gamma"] = format_double(*flags.gamma);
    if (flags.top_k) r["top_k"] = std::to_string(*flags.top_k);

    // Module seeds not set explicitly derive from the master seed at fixed
    // offsets, so one --seed reseeds the whole pipeline reproducibly.
    uint64_t master = config_seed(r, "seed");
    auto derive = [&](const char* key, uint64_t offset) {
        if (r.at(key).empty()) r[key] = std::to_string(master + offset);
    };
    derive("synth.seed", 0);
    derive("split.seed", 1);
    derive("resample.seed", 2);
    derive("stage1.seed", 3);
    derive("stage2.seed", 4);
    derive("logistic.seed", 5);

    RunConfig cfg;
    cfg.resolved = r;
    cfg.loans = r.at("loans");
    cfg.payments = r.at("payments");
    cfg.listings = r.at("listings");
    cfg.model_dir = r.at("model_dir");
    cfg.out_dir = r.at("out_dir");
    cfg.cohort_min_year = static_cast<int>(config_long(r, "cohort.min_year"));
    cfg.cohort_max_year = static_cast<int>(config_long(r, "cohort.max_year"));
    if (cfg.cohort_min_year > cfg.cohort_max_year)
        throw UsageError("cohort.min_year exceeds cohort.max_year");
    cfg.train_fraction = config_double(r, "split.train_fraction");
    cfg.split_seed = config_seed(r, "split.seed");

    for (const auto& [k, v] : r) {
        if (is_column_key(k)) cfg.columns.field_to_column[k.substr(7)] = v;
    }

    cfg.synth.n_loans = config_count(r, "synth.n_loans");
    cfg.synth.default_rate_target = config_double(r, "synth.default_rate_target");
    cfg.synth.seed = config_seed(r, "synth.seed");
    cfg.synth.note_rate_lo = config_double(r, "synth.note_rate_lo");
    cfg.synth.note_rate_hi = config_double(r, "synth.note_rate_hi");
    cfg.synth.term_months = config_int_list(r, "synth.term_months");
    cfg.synth.prepay_fraction = config_double(r, "synth.prepay_fraction");

    cfg.plan.method = resample_method_from_string(r.at("resample.method"));
    cfg.plan.k_neighbors = static_cast<int>(config_long(r, "resample.k_neighbors"));
    cfg.plan.seed = config_seed(r, "resample.seed");

    fill_train_config(r, "stage1", true, cfg.stage1);
    fill_train_config(r, "stage2", true, cfg.stage2);
    fill_train_config(r, "logistic", false, cfg.logistic);
    cfg.stage1.loss = LossKind::CrossEntropy;
    cfg.stage2.loss = LossKind::MeanSquaredError;
    cfg.logistic.loss = LossKind::CrossEntropy;
    cfg.logistic.architecture = Architecture::Wide;

    cfg.cart.max_depth = static_cast<int>(config_long(r, "cart.max_depth"));
    cfg.cart.min_leaf = static_cast<int>(config_long(r, "cart.min_leaf"));

    cfg.gamma = config_double(r, "gamma");
    if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0))
        throw UsageError("gamma must lie in [0, 1]");
    long k = config_long(r, "top_k");
    if (k < 1) throw UsageError("top_k must be at least 1");
    cfg.top_k = static_cast<size_t>(k);
    return cfg;
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

json config_echo(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.resolved) j[k] = v;
    return j;
}

json report_skeleton(const char* command, const RunConfig& cfg) {
    json j;
    j["kind"] = "p2pscore-report";
    j["command"] = command;
    j["artifact_version"] = kVersion;
    j["config"] = config_echo(cfg);
    return j;
}

void write_report(const RunConfig& cfg, const std::string& name, const json& j) {
    write_text_file(out_path(cfg, name), j.dump(2) + "\n");
}

struct LoadedData {
    std::vector<LoanRecord> records;
    std::vector<RejectRow> rejects;
    size_t rows_loaded = 0;
    AttachReport attach;
    IrrReport irr;
    size_t cohort_kept = 0;
};

// loans -> ratio derivation -> cohort filter -> optional payments + realized
// IRR. Validation rejects are collected, written to rejects.csv, never fatal.
LoadedData load_dataset(const RunConfig& cfg, bool with_payments, bool cohort_filter) {
    if (cfg.loans.empty())
        throw UsageError("a loans CSV is required (set loans= in the config or pass --loans)");
    LoadedData data;
    LoadResult loaded = load_loans(cfg.loans, cfg.columns);
    data.records = std::move(loaded.records);
    data.rejects = std::move(loaded.rejects);
    data.rows_loaded = data.records.size();
    for (auto& reject : derive_ratios_all(data.records)) data.rejects.push_back(reject);
    if (cohort_filter)
        data.records =
            filter_cohort(std::move(data.records), cfg.cohort_min_year, cfg.cohort_max_year);
    data.cohort_kept = data.records.size();
    if (with_payments) {
        if (cfg.payments.empty())
            throw UsageError(
                "a payments CSV is required to compute realized IRR labels "
                "(set payments= in the config or pass --payments)");
        auto payments = load_payments(cfg.payments);
        data.attach = attach_cashflows(data.records, payments);
        data.irr = assign_irr(data.records);
    }
    return data;
}

void write_rejects(const RunConfig& cfg, const LoadedData& data) {
    if (!data.rejects.empty()) write_rejects_csv(out_path(cfg, "rejects.csv"), data.rejects);
}

json data_summary(const LoadedData& data, const RunConfig& cfg) {
    json j;
    j["loans_csv"] = cfg.loans;
    j["rows_loaded"] = data.rows_loaded;
    j["rejected_violations"] = data.rejects.size();
    j["cohort_kept"] = data.cohort_kept;
    if (!cfg.payments.empty()) {
        j["payments_csv"] = cfg.payments;
        j["loans_with_payments"] = data.attach.attached;
        j["loans_without_payments"] = data.attach.without_payments;
        j["unknown_payment_loan_ids"] = data.attach.unknown_loan_ids;
        j["irr_labeled"] = data.irr.labeled;
        j["irr_total_loss"] = data.irr.total_loss;
        j["irr_solver_failures"] = data.irr.failed;
    }
    return j;
}

double mean_of(const std::vector<double>& v, size_t begin, size_t end) {
    if (begin >= end) return 0.0;
    return std::accumulate(v.begin() + begin, v.begin() + end, 0.0) /
           static_cast<double>(end - begin);
}

json loss_digest(const std::vector<double>& curve) {
    json j;
    size_t n = curve.size();
    size_t w = std::min<size_t>(100, n);
    j["steps"] = n;
    j["first100_mean"] = mean_of(curve, 0, w);
    j["last100_mean"] = mean_of(curve, n - w, n);
    return j;
}

void write_loss_csv(const std::string& path, const std::vector<double>& curve) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(curve.size());
    for (size_t i = 0; i < curve.size(); ++i)
        rows.push_back({std::to_string(i + 1), format_double(curve[i])});
    write_csv(path, {"step", "loss"}, rows);
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    auto loans = gen_synthetic(cfg.synth);
    size_t defaults = 0, positive_irr = 0;
    for (const auto& l : loans) {
        if (l.status && *l.status == LoanStatus::Default) ++defaults;
        if (l.irr && *l.irr > 0.0) ++positive_irr;
    }
    std::string loans_path = out_path(cfg, "loans.csv");
    std::string payments_path = out_path(cfg, "payments.csv");
    write_loans_csv(loans_path, loans);
    write_payments_csv(payments_path, loans);

    json report = report_skeleton("synth", cfg);
    report["loans"] = loans.size();
    report["default_rate"] =
        loans.empty() ? 0.0 : static_cast<double>(defaults) / static_cast<double>(loans.size());
    report["positive_irr_fraction"] =
        loans.empty() ? 0.0
                      : static_cast<double>(positive_irr) / static_cast<double>(loans.size());
    report["files"] = {loans_path, payments_path};
    write_report(cfg, "synth_report.json", report);

    out << "generated " << loans.size() << " loans (default rate "
        << format_double(report["default_rate"].get<double>()) << ")\n"
        << "wrote " << loans_path << ", " << payments_path << ", "
        << out_path(cfg, "synth_report.json") << "\n";
    return 0;
}

int cmd_describe(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    LoadedData data = load_dataset(cfg, !cfg.payments.empty(), true);
    write_rejects(cfg, data);
    SummaryReport summary = summarize(data.records);

    json report = report_skeleton("describe", cfg);
    report["data"] = data_summary(data, cfg);
    report["summary"] = json::parse(summary_to_json(summary));
    write_report(cfg, "describe_report.json", report);

    out << "records: " << summary.count << " (" << summary.labeled << " labeled";
    if (summary.default_rate)
        out << ", default rate " << format_double(*summary.default_rate);
    out << ")\n";
    out << "never delinquent: " << summary.never_delinq << "\n";
    for (const auto& [name, s] : summary.continuous) {
        char line[160];
        std::snprintf(line, sizeof(line),
                      "  %-26s mean %12.4f  std %12.4f  min %10.4f  median %10.4f  max %12.4f",
                      name.c_str(), s.mean, s.std_dev, s.min, s.median, s.max);
        out << line << "\n";
    }
    for (const auto& [name, levels] : summary.categorical)
        out << "  " << name << ": " << levels.size() << " levels\n";
    out << "wrote " << out_path(cfg, "describe_report.json") << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    LoadedData data = load_dataset(cfg, true, true);
    write_rejects(cfg, data);
    DatasetSplit split = split_train_test(data.records, cfg.train_fraction, cfg.split_seed);

    TwoStageTraining trained =
        train_two_stage(split.train, cfg.plan, cfg.stage1, cfg.stage2, cfg.gamma);

    save_model(trained.model.stage1, trained.model.schema, out_path(cfg, "stage1_model.json"));
    save_model(trained.model.stage2, trained.model.schema, out_path(cfg, "stage2_model.json"));
    write_loss_csv(out_path(cfg, "stage1_loss.csv"), trained.stage1_loss_curve);
    write_loss_csv(out_path(cfg, "stage2_loss.csv"), trained.stage2_loss_curve);

    json report = report_skeleton("train", cfg);
    report["data"] = data_summary(data, cfg);
    report["train_rows"] = split.train.size();
    report["test_rows"] = split.test.size();
    report["stage1"] = {{"architecture", to_string(cfg.stage1.architecture)},
                        {"resample", to_string(cfg.plan.method)},
                        {"train_rows", trained.stage1_train_rows},
                        {"default_rows", trained.stage1_default_rows},
                        {"loss", loss_digest(trained.stage1_loss_curve)}};
    report["stage2"] = {{"architecture", to_string(cfg.stage2.architecture)},
                        {"train_rows", trained.stage2_train_rows},
                        {"loss", loss_digest(trained.stage2_loss_curve)}};
    report["files"] = {out_path(cfg, "stage1_model.json"), out_path(cfg, "stage2_model.json"),
                       out_path(cfg, "stage1_loss.csv"), out_path(cfg, "stage2_loss.csv")};
    write_report(cfg, "train_report.json", report);

    json d1 = loss_digest(trained.stage1_loss_curve);
    json d2 = loss_digest(trained.stage2_loss_curve);
    out << "train/test split: " << split.train.size() << "/" << split.test.size() << "\n"
        << "stage 1 (" << to_string(cfg.plan.method) << ", " << to_string(cfg.stage1.architecture)
        << "): " << trained.stage1_train_rows << " rows, cross-entropy "
        << format_double(d1["first100_mean"].get<double>()) << " -> "
        << format_double(d1["last100_mean"].get<double>()) << "\n"
        << "stage 2 (" << to_string(cfg.stage2.architecture)
        << "): " << trained.stage2_train_rows << " rows, mse "
        << format_double(d2["first100_mean"].get<double>()) << " -> "
        << format_double(d2["last100_mean"].get<double>()) << "\n"
        << "wrote models and loss curves under " << cfg.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    LoadedData data = load_dataset(cfg, true, true);
    write_rejects(cfg, data);
    DatasetSplit split = split_train_test(data.records, cfg.train_fraction, cfg.split_seed);

    FeatureSchema schema = fit_schema(split.train);
    TrainMatrix classify = encode_classification(schema, split.train);
    TrainMatrix regress = encode_positive_irr(schema, split.train);

    const ResampleMethod methods[] = {ResampleMethod::Undersample, ResampleMethod::Oversample,
                                      ResampleMethod::Smote};
    const Architecture archs[] = {Architecture::Wide, Architecture::Deep,
                                  Architecture::WideDeep};

    json report = report_skeleton("evaluate", cfg);
    report["train_rows"] = split.train.size();
    report["test_rows"] = split.test.size();
    json cls = json::array();
    std::map<std::pair<int, int>, ClassificationReport> grid;
    for (int mi = 0; mi < 3; ++mi) {
        ResamplePlan plan = cfg.plan;
        plan.method = methods[mi];
        TrainMatrix balanced = resample(classify, plan);
        for (int ai = 0; ai < 3; ++ai) {
            TrainConfig c = cfg.stage1;
            c.architecture = archs[ai];
            TrainedModel model = train(schema, balanced, c);
            ClassificationReport r =
                eval_classification(model.params, schema, split.test, cfg.gamma);
            grid[{mi, ai}] = r;
            cls.push_back({{"architecture", to_string(archs[ai])},
                           {"resample", to_string(methods[mi])},
                           {"train_rows", balanced.size()},
                           {"tp", r.tp},
                           {"fn", r.fn},
                           {"fp", r.fp},
                           {"tn", r.tn},
                           {"precision_p", r.precision_p},
                           {"recall_p", r.recall_p},
                           {"precision_n", r.precision_n},
                           {"recall_n", r.recall_n}});
        }
    }
    report["classification"] = cls;

    json reg = json::array();
    std::vector<double> mses;
    for (int ai = 0; ai < 3; ++ai) {
        TrainConfig c = cfg.stage2;
        c.architecture = archs[ai];
        TrainedModel model = train(schema, regress, c);
        double mse = eval_regression(model.params, schema, split.test);
        mses.push_back(mse);
        reg.push_back({{"architecture", to_string(archs[ai])},
                       {"train_rows", regress.size()},
                       {"mse", mse}});
    }
    report["regression"] = reg;
    write_report(cfg, "eval_report.json", report);

    out << "classification (gamma " << format_double(cfg.gamma)
        << "; cells are precision_p/recall_p/precision_n/recall_n)\n";
    char line[200];
    std::snprintf(line, sizeof(line), "  %-12s %-28s %-28s %-28s", "", "wide", "deep",
                  "widedeep");
    out << line << "\n";
    for (int mi = 0; mi < 3; ++mi) {
        std::string cells[3];
        for (int ai = 0; ai < 3; ++ai) {
            const auto& r = grid[{mi, ai}];
            char cell[64];
            std::snprintf(cell, sizeof(cell), "%.3f/%.3f/%.3f/%.3f", r.precision_p, r.recall_p,
                          r.precision_n, r.recall_n);
            cells[ai] = cell;
        }
        std::snprintf(line, sizeof(line), "  %-12s %-28s %-28s %-28s",
                      to_string(methods[mi]).c_str(), cells[0].c_str(), cells[1].c_str(),
                      cells[2].c_str());
        out << line << "\n";
    }
    std::snprintf(line, sizeof(line), "  %-12s %-28.5f %-28.5f %-28.5f", "irr mse", mses[0],
                  mses[1], mses[2]);
    out << line << "\n";
    out << "wrote " << out_path(cfg, "eval_report.json") << "\n";
    return 0;
}

json selection_json(const ApproachResult& result) {
    json rows = json::array();
    for (size_t i = 0; i < result.selection.size(); ++i) {
        const auto& s = result.selection[i];
        json row;
        row["rank"] = i + 1;
        row["loan_id"] = s.loan_id;
        row["grade"] = s.grade;
        if (s.pd) row["pd"] = *s.pd;
        if (s.predicted_irr) row["predicted_irr"] = *s.predicted_irr;
        row["gate"] = to_string(s.gate);
        if (s.actual_irr) row["actual_irr"] = *s.actual_irr;
        rows.push_back(row);
    }
    return rows;
}

void write_scatter_csv(const std::string& path, const std::vector<ScoredLoan>& scored) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : scored) {
        if (s.predicted_irr && s.actual_irr)
            rows.push_back({s.loan_id, format_double(*s.actual_irr),
                            format_double(*s.predicted_irr)});
    }
    write_csv(path, {"loan_id", "actual_irr", "predicted_irr"}, rows);
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    ensure_out_dir(cfg);
    LoadedData data = load_dataset(cfg, true, true);
    write_rejects(cfg, data);
    DatasetSplit split = split_train_test(data.records, cfg.train_fraction, cfg.split_seed);

    TwoStageTraining trained =
        train_two_stage(split.train, cfg.plan, cfg.stage1, cfg.stage2, cfg.gamma);
    CartModel cart = train_cart(split.train, cfg.cart);
    TrainMatrix balanced =
        resample(encode_classification(trained.model.schema, split.train), cfg.plan);
    TrainedModel logistic = train_logistic(trained.model.schema, balanced, cfg.logistic);

    CompareReport cmp =
        compare_approaches(trained.model, cart, logistic, split.test, cfg.top_k);

    json report = report_skeleton("compare", cfg);
    report["data"] = data_summary(data, cfg);
    report["train_rows"] = split.train.size();
    report["test_rows"] = split.test.size();
    report["k"] = cmp.k;
    json approaches = json::array();
    for (const auto& a : cmp.approaches) {
        json aj;
        aj["approach"] = to_string(a.approach);
        aj["avg_actual_irr"] = a.avg_actual_irr;
        aj["selection_size"] = a.selection.size();
        aj["shortfall"] = a.shortfall;
        aj["selection"] = selection_json(a);
        approaches.push_back(aj);
    }
    report["approaches"] = approaches;
    write_report(cfg, "compare_report.json", report);

    std::vector<std::vector<std::string>> rows;
    for (const auto& a : cmp.approaches) {
        for (size_t i = 0; i < a.selection.size(); ++i) {
            const auto& s = a.selection[i];
            rows.push_back({to_string(a.approach), std::to_string(i + 1), s.loan_id, s.grade,
                            opt_cell(s.pd), opt_cell(s.predicted_irr), opt_cell(s.actual_irr)});
        }
    }
    write_csv(out_path(cfg, "compare_selection.csv"),
              {"approach", "rank", "loan_id", "grade", "pd", "predicted_irr", "actual_irr"},
              rows);
    write_scatter_csv(out_path(cfg, "scatter_profit_scoring.csv"),
                      cmp.approaches[1].scored);
    write_scatter_csv(out_path(cfg, "scatter_two_stage.csv"), cmp.approaches[2].scored);

    out << "top-" << cmp.k << " average realized IRR\n";
    for (const auto& a : cmp.approaches) {
        char line[120];
        std::snprintf(line, sizeof(line), "  %-16s %+.4f  (selected %zu%s)",
                      to_string(a.approach).c_str(), a.avg_actual_irr, a.selection.size(),
                      a.shortfall ? ", shortfall" : "");
        out << line << "\n";
    }
    out << "wrote " << out_path(cfg, "compare_report.json") << " and selection/scatter CSVs\n";
    return 0;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
    if (cfg.listings.empty())
        throw UsageError(
            "a listings CSV is required (set listings= in the config or pass --listings)");
    if (cfg.model_dir.empty())
        throw UsageError(
            "a model directory is required (set model_dir= in the config or pass --model-dir)");
    ensure_out_dir(cfg);

    TrainedModel stage1 = load_model((fs::path(cfg.model_dir) / "stage1_model.json").string());
    TrainedModel stage2 = load_model((fs::path(cfg.model_dir) / "stage2_model.json").string());
    if (stage1.params.task != Task::Classification)
        throw SchemaError("stage1_model.json does not hold a classification model");
    if (stage2.params.task != Task::Regression)
        throw SchemaError("stage2_model.json does not hold a regression model");
    if (schema_to_json(stage1.schema) != schema_to_json(stage2.schema))
        throw SchemaError("stage-1 and stage-2 models were fitted on different schemas");

    RunConfig listing_cfg = cfg;
    listing_cfg.loans = cfg.listings;
    LoadedData data = load_dataset(listing_cfg, false, false);  // listings skip the cohort filter
    write_rejects(cfg, data);

    TwoStageModel model;
    model.stage1 = std::move(stage1.params);
    model.stage2 = std::move(stage2.params);
    model.schema = std::move(stage1.schema);
    model.gamma = cfg.gamma;
    auto scored = score_loans(model, data.records);

    size_t passed = 0, flagged = 0;
    std::vector<std::vector<std::string>> rows;
    rows.reserve(scored.size());
    for (size_t i = 0; i < scored.size(); ++i) {
        const auto& s = scored[i];
        auto unseen = unseen_levels(model.schema, data.records[i]);
        if (!unseen.empty()) ++flagged;
        if (s.gate == Gate::Passed) ++passed;
        std::string joined;
        for (size_t u = 0; u < unseen.size(); ++u) {
            if (u) joined += ';';
            joined += unseen[u];
        }
        rows.push_back({s.loan_id, opt_cell(s.pd), to_string(s.gate),
                        opt_cell(s.predicted_irr), joined});
    }
    write_csv(out_path(cfg, "scores.csv"),
              {"loan_id", "pd", "gate", "predicted_irr", "unseen_levels"}, rows);

    json report = report_skeleton("score", cfg);
    report["model_dir"] = cfg.model_dir;
    report["listings_csv"] = cfg.listings;
    report["rows_loaded"] = data.rows_loaded;
    report["rejected_violations"] = data.rejects.size();
    report["scored"] = scored.size();
    report["passed"] = passed;
    report["filtered"] = scored.size() - passed;
    report["unseen_level_rows"] = flagged;
    write_report(cfg, "score_report.json", report);

    out << "scored " << scored.size() << " listings: " << passed << " passed, "
        << (scored.size() - passed) << " filtered (gamma " << format_double(cfg.gamma) << ")";
    if (flagged) out << "; " << flagged << " rows carry unseen categorical levels";
    out << "\nwrote " << out_path(cfg, "scores.csv") << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"p2pscore: two-stage loan scoring (default-probability gate + IRR regression)"};
    app.require_subcommand(1);

    FlagOverrides flags;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config, "flat key=value config file");
        cmd->add_option("--seed", flags.seed, "master seed (module seeds derive from it)");
        cmd->add_option("--out-dir", flags.out_dir, "output directory (default: out)");
        cmd->add_option("--resample", flags.resample,
                        "stage-1 rebalancing: none|undersample|oversample|smote");
        cmd->add_option("--gamma", flags.gamma, "default-probability gate threshold in [0,1]");
        cmd->add_option("--top-k", flags.top_k, "portfolio size for approach comparison");
    };
    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--loans", flags.loans, "loans CSV path");
        cmd->add_option("--payments", flags.payments, "payments CSV path (loan_id,date,amount)");
    };

    CLI::App* synth = app.add_subcommand(
        "synth", "generate a seeded synthetic cohort (loans.csv + payments.csv)");
    add_common(synth);
    CLI::App* describe =
        app.add_subcommand("describe", "descriptive statistics of a loan dataset");
    add_common(describe);
    add_inputs(describe);
    CLI::App* train_cmd =
        app.add_subcommand("train", "train the two-stage model; writes models + loss curves");
    add_common(train_cmd);
    add_inputs(train_cmd);
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "architecture x resampling metric grid on a held-out test split");
    add_common(evaluate);
    add_inputs(evaluate);
    CLI::App* compare = app.add_subcommand(
        "compare", "rank credit-scoring, profit-scoring, and two-stage portfolios");
    add_common(compare);
    add_inputs(compare);
    CLI::App* score =
        app.add_subcommand("score", "score unlabeled listings with a trained model pair");
    add_common(score);
    score->add_option("--listings", flags.listings, "listings CSV path");
    score->add_option("--model-dir", flags.model_dir,
                      "directory holding stage1_model.json and stage2_model.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = resolve_config(flags);
        if (synth->parsed()) return cmd_synth(cfg, out);
        if (describe->parsed()) return cmd_describe(cfg, out);
        if (train_cmd->parsed()) return cmd_train(cfg, out);
        if (evaluate->parsed()) return cmd_evaluate(cfg, out);
        if (compare->parsed()) return cmd_compare(cfg, out);
        if (score->parsed()) return cmd_score(cfg, out);
        throw UsageError("no command given");
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const TrainError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace p2p
