#include "p2pscore/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "p2pscore/errors.hpp"

namespace p2p {

TrainMatrix encode_classification(const FeatureSchema& schema,
                                  const std::vector<LoanRecord>& records) {
    TrainMatrix out;
    for (const auto& r : records) {
        if (!r.status) continue;
        out.rows.push_back(encode_row(schema, r));
        out.labels.push_back(*r.status == LoanStatus::Default ? 1.0 : 0.0);
    }
    if (out.rows.empty()) throw EmptyInputError("no records carry a status label");
    return out;
}

TrainMatrix encode_positive_irr(const FeatureSchema& schema,
                                const std::vector<LoanRecord>& records) {
    TrainMatrix out;
    for (const auto& r : records) {
        if (!r.irr || *r.irr <= 0.0) continue;
        out.rows.push_back(encode_row(schema, r));
        out.labels.push_back(*r.irr);
    }
    if (out.rows.empty()) throw EmptyInputError("no records have a positive realized IRR");
    return out;
}

TwoStageTraining train_two_stage(const std::vector<LoanRecord>& train_split,
                                 const ResamplePlan& plan, const TrainConfig& stage1_config,
                                 const TrainConfig& stage2_config, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw UsageError("gamma must be in [0, 1]");
    }
    FeatureSchema schema = fit_schema(train_split);

    TrainConfig c1 = stage1_config;
    c1.loss = LossKind::CrossEntropy;
    TrainConfig c2 = stage2_config;
    c2.loss = LossKind::MeanSquaredError;

    TrainMatrix balanced = resample(encode_classification(schema, train_split), plan);
    TrainedModel stage1 = train(schema, balanced, c1);

    TrainMatrix positives = encode_positive_irr(schema, train_split);
    TrainedModel stage2 = train(schema, positives, c2);

    TwoStageTraining out;
    out.stage1_loss_curve = std::move(stage1.loss_curve);
    out.stage2_loss_curve = std::move(stage2.loss_curve);
    out.stage1_train_rows = balanced.size();
    for (double y : balanced.labels) {
        if (y == 1.0) ++out.stage1_default_rows;
    }
    out.stage2_train_rows = positives.size();
    out.model.stage1 = std::move(stage1.params);
    out.model.stage2 = std::move(stage2.params);
    out.model.schema = std::move(schema);
    out.model.gamma = gamma;
    return out;
}

std::string to_string(Gate gate) {
    return gate == Gate::Passed ? "passed" : "filtered";
}

std::string to_string(Approach a) {
    switch (a) {
        case Approach::CreditScoring: return "credit_scoring";
        case Approach::ProfitScoring: return "profit_scoring";
        default: return "two_stage";
    }
}

std::vector<ScoredLoan> score_loans(const TwoStageModel& model,
                                    const std::vector<LoanRecord>& loans) {
    std::vector<ScoredLoan> out;
    out.reserve(loans.size());
    for (const auto& r : loans) {
        EncodedRow row = encode_row(model.schema, r);
        ScoredLoan s;
        s.loan_id = r.loan_id;
        s.grade = r.grade;
        s.actual_irr = r.irr;
        double pd = predict_pd(model.stage1, row);
        s.pd = pd;
        if (pd > model.gamma) {
            s.gate = Gate::Filtered;
        } else {
            s.gate = Gate::Passed;
            s.predicted_irr = predict_irr(model.stage2, row);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ScoredLoan> select_top_k(const std::vector<ScoredLoan>& scored, size_t k,
                                     Approach approach) {
    if (k < 1) throw UsageError("top-k selection needs k >= 1");

    std::vector<ScoredLoan> candidates;
    candidates.reserve(scored.size());
    if (approach == Approach::CreditScoring) {
        for (const auto& s : scored) {
            if (s.pd) candidates.push_back(s);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const ScoredLoan& a, const ScoredLoan& b) {
                      return *a.pd != *b.pd ? *a.pd < *b.pd : a.loan_id < b.loan_id;
                  });
    } else {
        // For two-stage output predicted_irr is present exactly on Passed
        // loans, so this filter realizes the gate.
        for (const auto& s : scored) {
            if (s.predicted_irr) candidates.push_back(s);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const ScoredLoan& a, const ScoredLoan& b) {
                      return *a.predicted_irr != *b.predicted_irr
                                 ? *a.predicted_irr > *b.predicted_irr
                                 : a.loan_id < b.loan_id;
                  });
    }
    if (candidates.size() > k) candidates.resize(k);
    return candidates;
}

ClassificationReport metrics_from_counts(size_t tp, size_t fn, size_t fp, size_t tn) {
    auto ratio = [](size_t num, size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    ClassificationReport r;
    r.tp = tp;
    r.fn = fn;
    r.fp = fp;
    r.tn = tn;
    r.precision_p = ratio(tp, tp + fp);
    r.recall_p = ratio(tp, tp + fn);
    r.precision_n = ratio(tn, tn + fn);
    r.recall_n = ratio(tn, tn + fp);
    return r;
}

ClassificationReport eval_classification(const ModelParams& stage1, const FeatureSchema& schema,
                                         const std::vector<LoanRecord>& test, double gamma) {
    size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (const auto& r : test) {
        if (!r.status) continue;
        double pd = predict_pd(stage1, encode_row(schema, r));
        bool predicted_positive = pd <= gamma;  // predicted non-default
        bool actual_positive = *r.status == LoanStatus::NonDefault;
        if (actual_positive) {
            ++(predicted_positive ? tp : fn);
        } else {
            ++(predicted_positive ? fp : tn);
        }
    }
    if (tp + fn + fp + tn == 0) throw EmptyInputError("no records carry a status label");
    ClassificationReport report = metrics_from_counts(tp, fn, fp, tn);
    report.gamma = gamma;
    return report;
}

double eval_regression(const ModelParams& stage2, const FeatureSchema& schema,
                       const std::vector<LoanRecord>& test) {
    double total = 0.0;
    size_t n = 0;
    for (const auto& r : test) {
        if (!r.irr || *r.irr <= 0.0) continue;
        double err = predict_irr(stage2, encode_row(schema, r)) - *r.irr;
        total += err * err;
        ++n;
    }
    if (n == 0) throw EmptyInputError("no records have a positive realized IRR");
    return total / static_cast<double>(n);
}

namespace {

ApproachResult finish_approach(Approach approach, std::vector<ScoredLoan> scored, size_t k) {
    ApproachResult out;
    out.approach = approach;
    out.selection = select_top_k(scored, k, approach);
    out.scored = std::move(scored);
    out.shortfall = out.selection.size() < k;
    if (!out.selection.empty()) {
        double total = 0.0;
        for (const auto& s : out.selection) total += *s.actual_irr;
        out.avg_actual_irr = total / static_cast<double>(out.selection.size());
    }
    return out;
}

}  // namespace

CompareReport compare_approaches(const TwoStageModel& two_stage, const CartModel& cart,
                                 const TrainedModel& logistic,
                                 const std::vector<LoanRecord>& test, size_t k) {
    if (k < 1) throw UsageError("top-k selection needs k >= 1");

    // The comparison averages realized IRR, so only outcome-labeled rows can
    // participate; the full labeled test split is the candidate pool for
    // every approach.
    std::vector<LoanRecord> labeled;
    labeled.reserve(test.size());
    for (const auto& r : test) {
        if (r.irr) labeled.push_back(r);
    }
    if (labeled.empty()) throw EmptyInputError("no test records carry a realized IRR");

    std::vector<ScoredLoan> credit;
    std::vector<ScoredLoan> profit;
    credit.reserve(labeled.size());
    profit.reserve(labeled.size());
    for (const auto& r : labeled) {
        ScoredLoan c;
        c.loan_id = r.loan_id;
        c.grade = r.grade;
        c.actual_irr = r.irr;
        c.pd = predict_pd(logistic.params, encode_row(logistic.schema, r));
        c.gate = Gate::Filtered;  // credit scoring has no IRR stage to pass into
        credit.push_back(std::move(c));

        ScoredLoan p;
        p.loan_id = r.loan_id;
        p.grade = r.grade;
        p.actual_irr = r.irr;
        p.predicted_irr = cart_predict(cart, r);
        p.gate = Gate::Passed;  // profit scoring ranks every loan
        profit.push_back(std::move(p));
    }

    CompareReport report;
    report.k = k;
    report.approaches.push_back(finish_approach(Approach::CreditScoring, std::move(credit), k));
    report.approaches.push_back(finish_approach(Approach::ProfitScoring, std::move(profit), k));
    report.approaches.push_back(
        finish_approach(Approach::TwoStage, score_loans(two_stage, labeled), k));
    return report;
}

}  // namespace p2p
