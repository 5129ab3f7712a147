#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "p2pscore/dates.hpp"

namespace p2p {

enum class LoanStatus { Default, NonDefault };

std::string to_string(LoanStatus s);
LoanStatus loan_status_from_string(std::string_view text);  // throws ParseError

// One dated cash movement. Sign convention: money leaving the lender is
// negative (the funding outflow), money received is positive.
struct CashFlowEvent {
    Date date;
    double amount = 0.0;

    friend bool operator==(const CashFlowEvent& a, const CashFlowEvent& b) {
        return a.date == b.date && a.amount == b.amount;
    }
};

// One loan application plus, when known, its outcome. Categorical fields are
// kept as strings; their level sets are learned from training data, not
// hard-coded (FICO in particular is treated as categorical).
struct LoanRecord {
    std::string loan_id;
    Date issue_date;
    double funded_amount = 0.0;
    double installment = 0.0;  // monthly payment
    std::string grade;         // A..G
    std::string subgrade;      // A1..G5; first character equals grade
    std::string purpose;
    std::string fico;  // score bucket as text, e.g. "705"
    double annual_income = 0.0;
    std::string housing;  // own / rent / mortgage / other
    std::string employment_length;
    double credit_history_length = 0.0;  // years
    double delinq_2yrs = 0.0;
    double inquiries_6m = 0.0;
    double public_records = 0.0;
    double revol_util = 0.0;
    double open_accounts = 0.0;
    std::optional<long> months_since_last_delinq;  // nullopt = never delinquent
    std::optional<double> loan_to_income;          // derived, see derive_ratios
    std::optional<double> installment_to_income;   // derived
    double dti = 0.0;
    std::optional<LoanStatus> status;                   // absent for unscored listings
    std::optional<std::vector<CashFlowEvent>> cash_flows;
    std::optional<double> irr;  // annualized realized rate
};

struct DatasetSplit {
    std::vector<LoanRecord> train;
    std::vector<LoanRecord> test;
    uint64_t seed = 0;
};

// Populates loan_to_income = funded/income and installment_to_income =
// 12*installment/income; everything else copied unchanged. Idempotent.
// Throws ZeroIncomeError when annual_income == 0 (imputation is the
// caller's decision).
LoanRecord derive_ratios(LoanRecord record);

struct Violation {
    std::string field;
    std::string rule;

    friend bool operator==(const Violation& a, const Violation& b) {
        return a.field == b.field && a.rule == b.rule;
    }
};

// Checks every record-level invariant; returns one entry per broken rule
// (empty means well-formed). Violations are data, not exceptions.
std::vector<Violation> validate_record(const LoanRecord& record);

}  // namespace p2p
