// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// fails. Each criterion re-derives what it checks from first principles
// (finite differences, grid-scan NPV oracle, reconstruction of interpolated
// rows) rather than trusting the implementation under test.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "p2pscore/baselines.hpp"
#include "p2pscore/cli.hpp"
#include "p2pscore/dates.hpp"
#include "p2pscore/domain.hpp"
#include "p2pscore/errors.hpp"
#include "p2pscore/features.hpp"
#include "p2pscore/ingest.hpp"
#include "p2pscore/irr.hpp"
#include "p2pscore/pipeline.hpp"
#include "p2pscore/resample.hpp"
#include "p2pscore/widedeep.hpp"

namespace {

using namespace p2p;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Shared fixtures, built lazily so each criterion's clock covers its own work.
// ---------------------------------------------------------------------------

constexpr size_t kCohortSize = 20000;
constexpr double kGamma = 0.5;
constexpr int kStage1Steps = 3000;
constexpr int kStage2Steps = 2000;

TrainConfig stage_config(int steps, double learning_rate, LossKind loss, uint64_t seed) {
    TrainConfig c;
    c.steps = steps;
    c.batch_size = 100;
    c.learning_rate = learning_rate;
    c.dropout_rate = 0.2;
    c.hidden_layers = {100, 50, 10};
    c.loss = loss;
    c.architecture = Architecture::WideDeep;
    c.seed = seed;
    return c;
}

ResamplePlan smote_plan() {
    ResamplePlan plan;
    plan.method = ResampleMethod::Smote;
    plan.k_neighbors = 5;
    plan.seed = 3;
    return plan;
}

struct Shared {
    std::vector<LoanRecord> cohort;
    DatasetSplit split;
    TwoStageTraining two_stage;
    bool cohort_ready = false;
    bool model_ready = false;

    void ensure_cohort() {
        if (cohort_ready) return;
        SynthConfig config;
        config.n_loans = kCohortSize;
        config.seed = 1;
        cohort = gen_synthetic(config);
        split = split_train_test(cohort, 0.8, 2);
        cohort_ready = true;
    }

    void ensure_model() {
        if (model_ready) return;
        ensure_cohort();
        // Training lengths are sized so the portfolio ordering is stable across
        // seeds rather than a single lucky draw: at 1000 steps the top-30 margin
        // flips sign on 3 of 8 master seeds, at 3000/2000 it is positive on all 8.
        two_stage = train_two_stage(split.train, smote_plan(),
                                    stage_config(kStage1Steps, 0.08, LossKind::CrossEntropy, 4),
                                    stage_config(kStage2Steps, 0.02, LossKind::MeanSquaredError, 5),
                                    kGamma);
        model_ready = true;
    }
};

Shared g;

TrainMatrix head(const TrainMatrix& m, size_t n) {
    n = std::min(n, m.size());
    TrainMatrix out;
    out.rows.assign(m.rows.begin(), m.rows.begin() + n);
    out.labels.assign(m.labels.begin(), m.labels.begin() + n);
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients vs central finite differences on >= 20
// random (schema, params) configurations per task.
// ---------------------------------------------------------------------------

bool criterion_gradients(std::string& detail) {
    std::mt19937_64 meta(20240816);
    double worst = 0.0;
    size_t configs = 0;
    for (LossKind loss : {LossKind::CrossEntropy, LossKind::MeanSquaredError}) {
        for (int i = 0; i < 20; ++i) {
            SynthConfig sc;
            sc.n_loans = 80 + meta() % 160;
            sc.seed = meta();
            auto records = gen_synthetic(sc);
            FeatureSchema schema = fit_schema(records);
            TrainMatrix matrix = loss == LossKind::CrossEntropy
                                     ? encode_classification(schema, records)
                                     : encode_positive_irr(schema, records);

            TrainConfig config;
            config.loss = loss;
            config.architecture = static_cast<Architecture>(i % 3);
            config.dropout_rate = 0.2;  // the checker must switch it off itself
            config.seed = meta();
            config.hidden_layers.clear();
            int depth = 1 + static_cast<int>(meta() % 3);
            for (int d = 0; d < depth; ++d)
                config.hidden_layers.push_back(3 + static_cast<int>(meta() % 8));

            ModelParams params = init_params(schema, config);
            TrainMatrix batch = head(matrix, 12);
            GradientCheckReport report =
                gradient_check(params, batch, config, 150, 1e-5, meta());
            worst = std::max(worst, report.max_rel_error);
            ++configs;
        }
    }
    detail = fmt("max rel err %.3g over %zu configs (threshold 1e-4)", worst, configs);
    return configs >= 40 && worst < 1e-4;
}

// ---------------------------------------------------------------------------
// Criterion 2: IRR solver vs a fine-grid NPV-scan oracle, closed-form
// one-period cases, and scale invariance.
// ---------------------------------------------------------------------------

bool criterion_irr(std::string& detail) {
    // Closed form: lend P on day 0, receive P*(1+r) exactly 365 days later.
    for (double r : {-0.5, -0.05, 0.03, 0.10, 0.35, 1.25}) {
        std::vector<CashFlowEvent> flows = {{Date(2021, 1, 1), -10000.0},
                                            {Date(2022, 1, 1), 10000.0 * (1.0 + r)}};
        RateSolution s = solve_irr(flows);
        if (s.status != RateStatus::Converged || std::fabs(s.rate - r) > 1e-9) {
            detail = fmt("closed-form rate %.4f came back %.12f", r, s.rate);
            return false;
        }
    }

    std::mt19937_64 meta(777);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(meta);
    };
    const double grid_step = 1e-4;
    double worst_gap = 0.0;
    double worst_scale = 0.0;
    double worst_target = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        // Loan-shaped schedule with a known root: monthly-ish inflow dates
        // and random weights, with the inflow scale chosen so that the NPV
        // at a drawn target rate is exactly zero. The root is then inside
        // the solver bracket by construction.
        double principal = uniform(1000.0, 25000.0);
        int n_inflows = 2 + static_cast<int>(meta() % 23);
        int month_gap = 1 + static_cast<int>(meta() % 3);
        double target_rate = uniform(-0.6, 3.0);

        Date start(2009 + static_cast<int>(meta() % 5), 1 + static_cast<int>(meta() % 12),
                   1 + static_cast<int>(meta() % 28));
        std::vector<Date> when;
        std::vector<double> weights;
        double discounted_weight = 0.0;
        for (int i = 0; i < n_inflows; ++i) {
            Date base = add_months(start, (i + 1) * month_gap);
            when.push_back(Date(base.year, base.month, 1 + static_cast<int>(meta() % 28)));
            weights.push_back(uniform(0.2, 1.0));
            double years = static_cast<double>(days_between(start, when.back())) / 365.0;
            discounted_weight += weights.back() * std::pow(1.0 + target_rate, -years);
        }
        std::vector<CashFlowEvent> flows = {{start, -principal}};
        for (int i = 0; i < n_inflows; ++i)
            flows.push_back({when[i], principal * weights[i] / discounted_weight});

        RateSolution s = solve_irr(flows);
        if (s.status != RateStatus::Converged) {
            detail = fmt("trial %d did not converge", trial);
            return false;
        }
        worst_target = std::max(worst_target, std::fabs(s.rate - target_rate));
        if (worst_target > 1e-6) {
            detail = fmt("trial %d: rate %.9f strays from the constructed root %.9f", trial,
                         s.rate, target_rate);
            return false;
        }

        // Loan-shaped flows (single outflow at the earliest date) make NPV
        // strictly decreasing in the rate, so the unique root lies in the
        // first grid cell where the sign flips.
        double lo = -0.95;
        bool located = false;
        double prev = npv(flows, lo);
        for (double r = lo + grid_step; r <= 3.5 + grid_step; r += grid_step) {
            double cur = npv(flows, r);
            if ((prev > 0.0) != (cur > 0.0)) {
                double cell_lo = r - grid_step;
                double gap = std::fabs(s.rate - cell_lo);
                worst_gap = std::max(worst_gap, gap);
                if (s.rate < cell_lo - 1e-9 || s.rate > r + 1e-9) {
                    detail = fmt("trial %d: rate %.6f outside grid cell [%.6f, %.6f]", trial,
                                 s.rate, cell_lo, r);
                    return false;
                }
                located = true;
                break;
            }
            prev = cur;
        }
        if (!located) {
            detail = fmt("trial %d: no sign change on the oracle grid", trial);
            return false;
        }

        std::vector<CashFlowEvent> scaled = flows;
        for (auto& f : scaled) f.amount *= 1000.0;
        RateSolution s2 = solve_irr(scaled);
        worst_scale = std::max(worst_scale, std::fabs(s2.rate - s.rate));
        if (worst_scale > 1e-9) {
            detail = fmt("trial %d: scaling moved the rate by %.3g", trial, worst_scale);
            return false;
        }
    }
    detail = fmt("100 schedules: within one 1e-4 grid step (worst gap %.2g), construction "
                 "drift %.2g, scale drift %.2g",
                 worst_gap, worst_target, worst_scale);
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 3: resampling invariants at n = 20,000.
// ---------------------------------------------------------------------------

std::string row_sig(const EncodedRow& row, double label) {
    std::string s;
    auto add_u32 = [&](uint32_t v) { s.append(reinterpret_cast<const char*>(&v), 4); };
    auto add_f64 = [&](double v) { s.append(reinterpret_cast<const char*>(&v), 8); };
    add_f64(label);
    add_u32(row.wide.dim);
    add_u32(static_cast<uint32_t>(row.wide.active.size()));
    for (uint32_t a : row.wide.active) add_u32(a);
    for (uint32_t e : row.deep.embedding_ids) add_u32(e);
    for (double v : row.deep.dense) add_f64(v);
    return s;
}

std::string discrete_sig(const EncodedRow& row) {
    std::string s;
    auto add_u32 = [&](uint32_t v) { s.append(reinterpret_cast<const char*>(&v), 4); };
    for (uint32_t a : row.wide.active) add_u32(a);
    s.push_back('|');
    for (uint32_t e : row.deep.embedding_ids) add_u32(e);
    return s;
}

std::map<std::string, long> sig_multiset(const TrainMatrix& m) {
    std::map<std::string, long> out;
    for (size_t i = 0; i < m.size(); ++i) ++out[row_sig(m.rows[i], m.labels[i])];
    return out;
}

std::pair<long, long> class_counts(const TrainMatrix& m) {
    long zeros = 0, ones = 0;
    for (double label : m.labels) (label == 1.0 ? ones : zeros)++;
    return {zeros, ones};
}

bool criterion_resampling(std::string& detail) {
    g.ensure_cohort();
    FeatureSchema schema = fit_schema(g.cohort);
    TrainMatrix input = encode_classification(schema, g.cohort);
    auto [in_zeros, in_ones] = class_counts(input);
    double minority_label = in_ones <= in_zeros ? 1.0 : 0.0;
    auto in_sigs = sig_multiset(input);

    ResamplePlan plan = smote_plan();

    plan.method = ResampleMethod::Undersample;
    TrainMatrix under = resample(input, plan);
    {
        auto [zeros, ones] = class_counts(under);
        if (zeros != ones) {
            detail = fmt("undersample classes %ld vs %ld", zeros, ones);
            return false;
        }
        auto out_sigs = sig_multiset(under);
        for (const auto& [sig, count] : out_sigs) {
            auto it = in_sigs.find(sig);
            if (it == in_sigs.end() || count > it->second) {
                detail = "undersample emitted a row that is not in the input";
                return false;
            }
        }
    }

    plan.method = ResampleMethod::Oversample;
    TrainMatrix over = resample(input, plan);
    {
        auto [zeros, ones] = class_counts(over);
        if (zeros != ones) {
            detail = fmt("oversample classes %ld vs %ld", zeros, ones);
            return false;
        }
        auto out_sigs = sig_multiset(over);
        for (const auto& [sig, count] : in_sigs) {
            auto it = out_sigs.find(sig);
            if (it == out_sigs.end() || it->second < count) {
                detail = "oversample dropped an input row";
                return false;
            }
        }
        for (const auto& [sig, count] : out_sigs) {
            auto it = in_sigs.find(sig);
            if (it == in_sigs.end()) {
                detail = "oversample emitted a row that is not an exact input copy";
                return false;
            }
            if (count > it->second) {
                double label;
                std::memcpy(&label, sig.data(), 8);
                if (label != minority_label) {
                    detail = "oversample duplicated a majority row";
                    return false;
                }
            }
        }
    }

    plan.method = ResampleMethod::Smote;
    TrainMatrix smoted = resample(input, plan);
    size_t synthetic_checked = 0;
    {
        auto [zeros, ones] = class_counts(smoted);
        if (zeros != ones) {
            detail = fmt("smote classes %ld vs %ld", zeros, ones);
            return false;
        }
        for (size_t i = 0; i < input.size(); ++i) {
            if (row_sig(smoted.rows[i], smoted.labels[i]) !=
                row_sig(input.rows[i], input.labels[i])) {
                detail = "smote did not keep the original rows as a prefix";
                return false;
            }
        }

        // Minority rows, their discrete signatures, and their 5-NN lists
        // (euclidean on the dense block), recomputed independently.
        std::vector<size_t> minority;
        for (size_t i = 0; i < input.size(); ++i)
            if (input.labels[i] == minority_label) minority.push_back(i);
        std::map<std::string, std::vector<size_t>> bases_by_sig;
        for (size_t mi = 0; mi < minority.size(); ++mi)
            bases_by_sig[discrete_sig(input.rows[minority[mi]])].push_back(mi);

        const size_t k = 5;
        std::vector<std::vector<size_t>> knn(minority.size());
        auto ensure_knn = [&](size_t mi) -> const std::vector<size_t>& {
            if (!knn[mi].empty()) return knn[mi];
            const auto& base = input.rows[minority[mi]].deep.dense;
            std::vector<std::pair<double, size_t>> dist;
            dist.reserve(minority.size() - 1);
            for (size_t mj = 0; mj < minority.size(); ++mj) {
                if (mj == mi) continue;
                const auto& other = input.rows[minority[mj]].deep.dense;
                double d2 = 0.0;
                for (size_t c = 0; c < base.size(); ++c) {
                    double d = base[c] - other[c];
                    d2 += d * d;
                }
                dist.emplace_back(d2, mj);
            }
            std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
            for (size_t t = 0; t < k; ++t) knn[mi].push_back(dist[t].second);
            return knn[mi];
        };

        auto matches_interpolation = [&](const std::vector<double>& s,
                                         const std::vector<double>& b,
                                         const std::vector<double>& z) {
            // One u shared by every coordinate, taken from the steepest one.
            size_t pivot = 0;
            double span = 0.0;
            for (size_t c = 0; c < b.size(); ++c) {
                double d = std::fabs(z[c] - b[c]);
                if (d > span) {
                    span = d;
                    pivot = c;
                }
            }
            double u = span == 0.0 ? 0.0 : (s[pivot] - b[pivot]) / (z[pivot] - b[pivot]);
            if (u < -1e-9 || u > 1.0 + 1e-9) return false;
            for (size_t c = 0; c < b.size(); ++c) {
                if (std::fabs(s[c] - (b[c] + u * (z[c] - b[c]))) > 1e-9) return false;
            }
            return true;
        };

        for (size_t i = input.size(); i < smoted.size(); ++i) {
            if (smoted.labels[i] != minority_label) {
                detail = "smote emitted a synthetic row with a majority label";
                return false;
            }
            const auto& synth = smoted.rows[i];
            auto candidates = bases_by_sig.find(discrete_sig(synth));
            bool explained = false;
            if (candidates != bases_by_sig.end()) {
                for (size_t mi : candidates->second) {
                    const auto& b = input.rows[minority[mi]].deep.dense;
                    for (size_t mj : ensure_knn(mi)) {
                        const auto& z = input.rows[minority[mj]].deep.dense;
                        if (matches_interpolation(synth.deep.dense, b, z)) {
                            explained = true;
                            break;
                        }
                    }
                    if (explained) break;
                }
            }
            if (!explained) {
                detail = fmt("smote row %zu is not b + u*(z-b) for any base b and "
                             "5-NN z",
                             i);
                return false;
            }
            ++synthetic_checked;
        }
    }

    detail = fmt("classes balanced for all 3 methods; %zu smote rows reconstructed "
                 "(u in [0,1], z among 5-NN)",
                 synthetic_checked);
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 4: loss-curve shape at full training scale.
// ---------------------------------------------------------------------------

double mean_range(const std::vector<double>& xs, size_t from, size_t to) {
    double sum = 0.0;
    for (size_t i = from; i < to; ++i) sum += xs[i];
    return sum / static_cast<double>(to - from);
}

bool criterion_convergence(std::string& detail) {
    g.ensure_model();
    const auto& ce = g.two_stage.stage1_loss_curve;
    const auto& mse = g.two_stage.stage2_loss_curve;
    if (ce.size() != static_cast<size_t>(kStage1Steps) ||
        mse.size() != static_cast<size_t>(kStage2Steps)) {
        detail = fmt("unexpected curve lengths %zu / %zu", ce.size(), mse.size());
        return false;
    }
    double ce_first = mean_range(ce, 0, 100);
    double ce_last = mean_range(ce, ce.size() - 100, ce.size());
    double mse_first = mean_range(mse, 0, 100);
    double mse_last = mean_range(mse, mse.size() - 100, mse.size());
    detail = fmt("cross-entropy %.4f -> %.4f (need < 0.5x), mse %.5f -> %.5f (need <)",
                 ce_first, ce_last, mse_first, mse_last);
    return ce_last < 0.5 * ce_first && mse_last < mse_first;
}

// ---------------------------------------------------------------------------
// Criterion 5: rebalancing and the joint architecture both help minority
// recall on the held-out split.
// ---------------------------------------------------------------------------

bool criterion_recall(std::string& detail) {
    g.ensure_model();
    const FeatureSchema& schema = g.two_stage.model.schema;
    TrainMatrix train_matrix = encode_classification(schema, g.split.train);

    double recall_smote_widedeep =
        eval_classification(g.two_stage.model.stage1, schema, g.split.test, kGamma).recall_n;

    TrainedModel none_widedeep =
        train(schema, train_matrix,
              stage_config(kStage1Steps, 0.08, LossKind::CrossEntropy, 4));
    double recall_none =
        eval_classification(none_widedeep.params, schema, g.split.test, kGamma).recall_n;

    TrainConfig wide_config = stage_config(kStage1Steps, 0.08, LossKind::CrossEntropy, 4);
    wide_config.architecture = Architecture::Wide;
    TrainedModel smote_wide = train(schema, resample(train_matrix, smote_plan()), wide_config);
    double recall_wide =
        eval_classification(smote_wide.params, schema, g.split.test, kGamma).recall_n;

    detail = fmt("recall_n: smote+widedeep %.3f vs none %.3f (need +0.05) and "
                 "wide-only %.3f (need >=)",
                 recall_smote_widedeep, recall_none, recall_wide);
    return recall_smote_widedeep >= recall_none + 0.05 &&
           recall_smote_widedeep >= recall_wide;
}

// ---------------------------------------------------------------------------
// Criterion 6: the gated two-stage portfolio beats both baselines on
// realized IRR of the top-30 selection.
// ---------------------------------------------------------------------------

bool criterion_portfolio(std::string& detail) {
    g.ensure_model();
    CartModel cart = train_cart(g.split.train, CartConfig{});

    TrainConfig logistic_config;
    logistic_config.steps = 1000;
    logistic_config.batch_size = 100;
    logistic_config.learning_rate = 0.08;
    logistic_config.seed = 6;
    const FeatureSchema& schema = g.two_stage.model.schema;
    TrainMatrix balanced =
        resample(encode_classification(schema, g.split.train), smote_plan());
    TrainedModel logistic = train_logistic(schema, balanced, logistic_config);

    CompareReport report =
        compare_approaches(g.two_stage.model, cart, logistic, g.split.test, 30);
    double credit = report.approaches[0].avg_actual_irr;
    double profit = report.approaches[1].avg_actual_irr;
    double two_stage = report.approaches[2].avg_actual_irr;
    detail = fmt("top-30 realized irr: two-stage %.4f vs profit %.4f and credit %.4f",
                 two_stage, profit, credit);
    return two_stage > profit && two_stage > credit;
}

// ---------------------------------------------------------------------------
// Criterion 7: determinism and round trips.
// ---------------------------------------------------------------------------

bool criterion_determinism(std::string& detail) {
    fs::path base = fs::temp_directory_path() / "p2pscore_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);

    // (a) Identical config + seed => byte-identical artifacts.
    fs::path config_path = base / "repro.conf";
    {
        std::ofstream conf(config_path);
        conf << "seed = 1\nsynth.n_loans = 1500\n"
                "stage1.steps = 80\nstage1.batch_size = 50\n"
                "stage1.learning_rate = 0.05\nstage1.hidden_layers = 16,8\n"
                "stage2.steps = 80\nstage2.batch_size = 50\n"
                "stage2.learning_rate = 0.02\nstage2.hidden_layers = 16,8\n";
    }
    fs::path run_dir = base / "run";
    const std::vector<std::string> artifacts = {
        "loans.csv",          "payments.csv",       "synth_report.json",
        "train_report.json",  "stage1_model.json",  "stage2_model.json",
        "stage1_loss.csv",    "stage2_loss.csv"};
    auto run_once = [&]() -> bool {
        std::ostringstream out, err;
        std::string conf = config_path.string();
        std::string dir = run_dir.string();
        std::vector<const char*> synth_args = {"p2pscore", "synth", "--config", conf.c_str(),
                                               "--out-dir", dir.c_str()};
        if (run_cli(static_cast<int>(synth_args.size()), synth_args.data(), out, err) != 0)
            return false;
        std::string loans = (run_dir / "loans.csv").string();
        std::string payments = (run_dir / "payments.csv").string();
        std::vector<const char*> train_args = {
            "p2pscore", "train",      "--config",  conf.c_str(),     "--loans", loans.c_str(),
            "--payments", payments.c_str(), "--out-dir", dir.c_str()};
        return run_cli(static_cast<int>(train_args.size()), train_args.data(), out, err) == 0;
    };
    if (!run_once()) {
        detail = "first pipeline run failed";
        return false;
    }
    std::map<std::string, std::string> first_bytes;
    for (const auto& name : artifacts) first_bytes[name] = slurp(run_dir / name);
    fs::remove_all(run_dir);
    if (!run_once()) {
        detail = "second pipeline run failed";
        return false;
    }
    for (const auto& name : artifacts) {
        if (slurp(run_dir / name) != first_bytes[name]) {
            detail = "rerun changed the bytes of " + name;
            return false;
        }
        if (first_bytes[name].empty()) {
            detail = name + " came out empty";
            return false;
        }
    }

    // (b) Save/load keeps predictions bit-exact on 1,000 held-out inputs.
    g.ensure_model();
    std::vector<EncodedRow> rows;
    for (size_t i = 0; i < 1000; ++i)
        rows.push_back(encode_row(g.two_stage.model.schema, g.split.test[i]));
    auto pd_before = predict_pd(g.two_stage.model.stage1, rows);
    auto irr_before = predict_irr(g.two_stage.model.stage2, rows);
    fs::path model_dir = base / "model";
    fs::create_directories(model_dir);
    save_model(g.two_stage.model.stage1, g.two_stage.model.schema,
               (model_dir / "stage1_model.json").string());
    save_model(g.two_stage.model.stage2, g.two_stage.model.schema,
               (model_dir / "stage2_model.json").string());
    TrainedModel s1 = load_model((model_dir / "stage1_model.json").string());
    TrainedModel s2 = load_model((model_dir / "stage2_model.json").string());
    auto pd_after = predict_pd(s1.params, rows);
    auto irr_after = predict_irr(s2.params, rows);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (std::bit_cast<uint64_t>(pd_before[i]) != std::bit_cast<uint64_t>(pd_after[i]) ||
            std::bit_cast<uint64_t>(irr_before[i]) != std::bit_cast<uint64_t>(irr_after[i])) {
            detail = fmt("save/load changed prediction bits at row %zu", i);
            return false;
        }
    }

    // (c) CSV write/reload preserves the synthetic records.
    fs::path loans_path = base / "roundtrip_loans.csv";
    fs::path payments_path = base / "roundtrip_payments.csv";
    write_loans_csv(loans_path.string(), g.cohort);
    write_payments_csv(payments_path.string(), g.cohort);
    LoadResult loaded = load_loans(loans_path.string());
    if (!loaded.rejects.empty() || loaded.records.size() != g.cohort.size()) {
        detail = fmt("reload kept %zu of %zu rows (%zu rejected)", loaded.records.size(),
                     g.cohort.size(), loaded.rejects.size());
        return false;
    }
    auto payments = load_payments(payments_path.string());
    attach_cashflows(loaded.records, payments);
    assign_irr(loaded.records);
    for (size_t i = 0; i < g.cohort.size(); ++i) {
        const LoanRecord& a = g.cohort[i];
        const LoanRecord& b = loaded.records[i];
        bool same = a.loan_id == b.loan_id && a.issue_date == b.issue_date &&
                    a.grade == b.grade && a.subgrade == b.subgrade && a.purpose == b.purpose &&
                    a.fico == b.fico && a.housing == b.housing &&
                    a.employment_length == b.employment_length &&
                    a.funded_amount == b.funded_amount && a.installment == b.installment &&
                    a.annual_income == b.annual_income && a.dti == b.dti &&
                    a.credit_history_length == b.credit_history_length &&
                    a.delinq_2yrs == b.delinq_2yrs && a.inquiries_6m == b.inquiries_6m &&
                    a.public_records == b.public_records &&
                    a.open_accounts == b.open_accounts &&
                    a.revol_util == b.revol_util && a.status == b.status &&
                    a.months_since_last_delinq == b.months_since_last_delinq &&
                    a.loan_to_income == b.loan_to_income &&
                    a.installment_to_income == b.installment_to_income;
        if (!same) {
            detail = "csv round trip changed loan " + a.loan_id;
            return false;
        }
        if (a.irr.has_value() != b.irr.has_value() ||
            (a.irr && std::fabs(*a.irr - *b.irr) > 1e-12)) {
            detail = "csv round trip moved the realized irr of loan " + a.loan_id;
            return false;
        }
    }

    fs::remove_all(base);
    detail = fmt("byte-identical artifacts (%zu files), bit-exact save/load on 1000 rows, "
                 "csv round trip on %zu loans",
                 artifacts.size(), g.cohort.size());
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 8: the full-data reproduction guide exists in the README.
// ---------------------------------------------------------------------------

bool criterion_docs(std::string& detail) {
    std::string readme = slurp(fs::path(REPO_ROOT) / "README.md");
    if (readme.empty()) {
        detail = "README.md missing or empty";
        return false;
    }
    const std::vector<std::string> required = {
        "Reproducing the full-scale study", "precision_p", "recall_n", "0.05", "0.02"};
    for (const auto& needle : required) {
        if (readme.find(needle) == std::string::npos) {
            detail = "README.md reproduction guide lacks '" + needle + "'";
            return false;
        }
    }
    detail = "README.md carries the full-data reproduction guide and tolerances";
    return true;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = no budget
    std::function<bool(std::string&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "gradient correctness", 60, criterion_gradients},
        {2, "irr oracle equivalence", 30, criterion_irr},
        {3, "resampling invariants", 30, criterion_resampling},
        {4, "training convergence", 300, criterion_convergence},
        {5, "imbalance and architecture direction", 600, criterion_recall},
        {6, "two-stage portfolio superiority", 600, criterion_portfolio},
        {7, "determinism and round trips", 0, criterion_determinism},
        {8, "reproduction guide", 0, criterion_docs},
    };

    bool all_ok = true;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool within = c.budget_seconds <= 0.0 || elapsed <= c.budget_seconds;
        if (ok && !within) detail += fmt(" [exceeded %.0fs budget]", c.budget_seconds);
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", ok && within ? "PASS" : "FAIL", c.id,
                    c.name, detail.c_str(), elapsed);
        std::fflush(stdout);
        all_ok = all_ok && ok && within;
    }
    std::printf("%s\n", all_ok ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all_ok ? 0 : 1;
}
