#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "p2pscore/domain.hpp"

namespace p2p {

// Maps LoanRecord field names to source CSV column names. Fields listed in
// required_fields() must be mapped; status and the derived ratio fields are
// optional (ratios are derived from income when their columns are absent).
struct ColumnMap {
    std::map<std::string, std::string> field_to_column;

    static ColumnMap identity();  // field name == column name
    static const std::vector<std::string>& required_fields();
    static const std::vector<std::string>& optional_fields();

    // Column name for a field (identity fallback for optional fields).
    const std::string& column_for(const std::string& field) const;
};

struct RejectRow {
    size_t row = 0;  // 1-based CSV row (header = row 1)
    std::string field;
    std::string violation;
};

struct LoadResult {
    std::vector<LoanRecord> records;
    std::vector<RejectRow> rejects;
};

// Reads a loans CSV. Rows with validation violations are collected into
// `rejects` (one entry per violation), not silently dropped and not fatal.
// Unreadable files are IoError, missing mapped columns SchemaError,
// malformed cells ParseError with the row number.
LoadResult load_loans(const std::string& path, const ColumnMap& map = ColumnMap::identity());

void write_rejects_csv(const std::string& path, const std::vector<RejectRow>& rejects);

// Reads a payments CSV with columns loan_id,date,amount; events are grouped
// per loan and sorted by date (ascending, stable).
std::map<std::string, std::vector<CashFlowEvent>> load_payments(const std::string& path);

struct AttachReport {
    size_t attached = 0;
    size_t without_payments = 0;
    size_t unknown_loan_ids = 0;  // distinct payment loan_ids matching no loan
};

// Gives each loan with payments cash_flows = (issue_date, -funded_amount)
// followed by its payment events; loans without payments keep cash_flows
// absent. Payments for unknown loans are counted and ignored.
AttachReport attach_cashflows(std::vector<LoanRecord>& loans,
                              const std::map<std::string, std::vector<CashFlowEvent>>& payments);

// Populates the derived income ratios on every record; zero-income records
// are removed and reported (row = position in the input, 1-based).
std::vector<RejectRow> derive_ratios_all(std::vector<LoanRecord>& loans);

// Keeps loans with min_year <= issue year <= max_year.
std::vector<LoanRecord> filter_cohort(std::vector<LoanRecord> loans, int min_year = 2008,
                                      int max_year = 2013);

// Uniform random partition; |train| = round(train_fraction * n).
// Throws EmptyInputError / UsageError.
DatasetSplit split_train_test(const std::vector<LoanRecord>& loans, double train_fraction,
                              uint64_t seed);

struct ContinuousSummary {
    size_t count = 0;
    double mean = 0, std_dev = 0, min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

struct SummaryReport {
    size_t count = 0;
    size_t labeled = 0;
    std::optional<double> default_rate;  // over labeled records
    size_t never_delinq = 0;
    std::map<std::string, ContinuousSummary> continuous;
    std::map<std::string, std::map<std::string, size_t>> categorical;
};

// Descriptive statistics. months_since_last_delinq is summarized over the
// records where it is present; the "never" count is reported separately.
// Throws EmptyInputError.
SummaryReport summarize(const std::vector<LoanRecord>& loans);

std::string summary_to_json(const SummaryReport& report);

struct SynthConfig {
    size_t n_loans = 20000;
    double default_rate_target = 0.15;
    uint64_t seed = 1;
    double note_rate_lo = 0.05;
    double note_rate_hi = 0.31;
    std::vector<int> term_months = {36, 60};
    double prepay_fraction = 0.10;  // chance a non-default loan pays off early
};

// Fully seeded synthetic cohort: features from fixed marginals, default
// status from a latent linear risk score with one planted grade-by-purpose
// interaction and a calibrated intercept, amortizing payment schedules
// (truncated for defaults, optionally prepaid otherwise), cash flows and
// realized irr populated via the rate solver.
std::vector<LoanRecord> gen_synthetic(const SynthConfig& config);

// Canonical loans/payments CSV writers (column names = field names; the
// payments file holds only received payments, not the funding outflow).
void write_loans_csv(const std::string& path, const std::vector<LoanRecord>& loans);
void write_payments_csv(const std::string& path, const std::vector<LoanRecord>& loans);

}  // namespace p2p
