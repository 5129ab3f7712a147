#pragma once

#include <optional>
#include <string>
#include <vector>

#include "p2pscore/baselines.hpp"
#include "p2pscore/domain.hpp"
#include "p2pscore/features.hpp"
#include "p2pscore/resample.hpp"
#include "p2pscore/widedeep.hpp"

namespace p2p {

// ---------------------------------------------------------------------------
// Two-stage scoring: a default-probability gate followed by an IRR regressor.
// ---------------------------------------------------------------------------

struct TwoStageModel {
    ModelParams stage1;    // classification: probability of default
    ModelParams stage2;    // regression: predicted IRR
    FeatureSchema schema;  // shared; both stages fitted on the same train split
    double gamma = 0.5;    // PD gate threshold
};

// Training byproducts kept out of the (serializable) model itself.
struct TwoStageTraining {
    TwoStageModel model;
    std::vector<double> stage1_loss_curve;
    std::vector<double> stage2_loss_curve;
    size_t stage1_train_rows = 0;    // after resampling
    size_t stage1_default_rows = 0;  // label-1 rows after resampling
    size_t stage2_train_rows = 0;    // positive-IRR subset of the original train
};

// Encodes the records that carry a status label; label 1 = Default.
// Throws EmptyInputError when none qualify.
TrainMatrix encode_classification(const FeatureSchema& schema,
                                  const std::vector<LoanRecord>& records);

// Encodes the records with realized irr > 0; label = irr.
// Throws EmptyInputError when none qualify.
TrainMatrix encode_positive_irr(const FeatureSchema& schema,
                                const std::vector<LoanRecord>& records);

// Fits one schema on the labeled train split, trains stage 1 on the
// rebalanced classification matrix (per `plan`) and stage 2 on the original
// (un-resampled) positive-IRR subset — duplicating rows in a regression set
// would silently reweight it. The losses are forced to cross-entropy /
// mean squared error respectively; architectures and the rest of the configs
// are the caller's. Throws UsageError on gamma outside [0, 1].
TwoStageTraining train_two_stage(const std::vector<LoanRecord>& train_split,
                                 const ResamplePlan& plan, const TrainConfig& stage1_config,
                                 const TrainConfig& stage2_config, double gamma = 0.5);

enum class Gate { Passed, Filtered };
std::string to_string(Gate gate);

// One loan's scores. pd is absent only on rows built by approaches that
// never estimate it (profit scoring); predicted_irr is present exactly when
// the loan passed the gate.
struct ScoredLoan {
    std::string loan_id;
    std::optional<double> pd;
    std::optional<double> predicted_irr;
    Gate gate = Gate::Filtered;
    std::optional<double> actual_irr;  // copied from the record when labeled
    std::string grade;
};

// Scores every loan: pd from stage 1; loans with pd > gamma are Filtered
// (predicted defaults), the rest Pass and get a stage-2 predicted IRR.
// Equality with gamma passes (the gate is strict).
std::vector<ScoredLoan> score_loans(const TwoStageModel& model,
                                    const std::vector<LoanRecord>& loans);

// The three portfolio-selection rules compared in the evaluation.
enum class Approach {
    CreditScoring,  // rank ascending by pd (lowest predicted default risk)
    ProfitScoring,  // rank descending by predicted IRR, no gate
    TwoStage,       // rank descending by predicted IRR among Passed loans
};
std::string to_string(Approach a);

// Deterministic top-k selection. CreditScoring orders ascending by pd;
// the other approaches order descending by predicted_irr over loans that
// carry one (for TwoStage that is exactly the Passed set). Ties break by
// loan_id; returns min(k, candidates) rows. Throws UsageError on k < 1.
std::vector<ScoredLoan> select_top_k(const std::vector<ScoredLoan>& scored, size_t k,
                                     Approach approach);

// Confusion counts with Non-Default as the Positive class: a loan is
// predicted Positive when its pd passes the gate (pd <= gamma).
struct ClassificationReport {
    size_t tp = 0;  // actual Non-Default, predicted Non-Default
    size_t fn = 0;  // actual Non-Default, predicted Default
    size_t fp = 0;  // actual Default, predicted Non-Default
    size_t tn = 0;  // actual Default, predicted Default
    double precision_p = 0.0;
    double recall_p = 0.0;
    double precision_n = 0.0;
    double recall_n = 0.0;
    double gamma = 0.5;
};

// Fills the four ratio metrics from the counts (empty denominators yield 0).
ClassificationReport metrics_from_counts(size_t tp, size_t fn, size_t fp, size_t tn);

// Gates every labeled test record and tallies the confusion matrix.
// Throws EmptyInputError when no record has a status label.
ClassificationReport eval_classification(const ModelParams& stage1, const FeatureSchema& schema,
                                         const std::vector<LoanRecord>& test, double gamma);

// Mean squared error of the stage-2 regressor over test records with
// realized irr > 0. Throws EmptyInputError when none qualify.
double eval_regression(const ModelParams& stage2, const FeatureSchema& schema,
                       const std::vector<LoanRecord>& test);

struct ApproachResult {
    Approach approach = Approach::CreditScoring;
    std::vector<ScoredLoan> scored;     // full test split under this approach
    std::vector<ScoredLoan> selection;  // top-k slice
    double avg_actual_irr = 0.0;        // over the selection; 0 when empty
    bool shortfall = false;             // fewer than k candidates were available
};

struct CompareReport {
    size_t k = 0;
    std::vector<ApproachResult> approaches;  // credit, profit, two-stage
};

// Scores the full labeled test split under all three approaches (footnote
// rule: every test sample is a candidate), selects top-k per approach, and
// averages the realized IRR of each selection. A selection shorter than k
// sets the shortfall flag. Throws UsageError on k < 1, EmptyInputError when
// the test split has no labeled rows.
CompareReport compare_approaches(const TwoStageModel& two_stage, const CartModel& cart,
                                 const TrainedModel& logistic,
                                 const std::vector<LoanRecord>& test, size_t k);

}  // namespace p2p
