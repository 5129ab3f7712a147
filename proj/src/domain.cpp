#include "p2pscore/domain.hpp"

#include <cmath>

#include "p2pscore/errors.hpp"

namespace p2p {

std::string to_string(LoanStatus s) {
    return s == LoanStatus::Default ? "Default" : "NonDefault";
}

LoanStatus loan_status_from_string(std::string_view text) {
    if (text == "Default") return LoanStatus::Default;
    if (text == "NonDefault") return LoanStatus::NonDefault;
    throw ParseError("unknown loan status '" + std::string(text) + "'");
}

LoanRecord derive_ratios(LoanRecord record) {
    if (record.annual_income == 0.0) {
        throw ZeroIncomeError("cannot derive income ratios for loan '" + record.loan_id +
                              "': annual_income is 0");
    }
    record.loan_to_income = record.funded_amount / record.annual_income;
    record.installment_to_income = 12.0 * record.installment / record.annual_income;
    return record;
}

namespace {

bool is_grade_letter(const std::string& g) {
    return g.size() == 1 && g[0] >= 'A' && g[0] <= 'G';
}

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

std::vector<Violation> validate_record(const LoanRecord& r) {
    std::vector<Violation> out;
    auto bad = [&out](const std::string& field, const std::string& rule) {
        out.push_back({field, rule});
    };

    if (r.loan_id.empty()) bad("loan_id", "must be non-empty");
    if (!(std::isfinite(r.funded_amount) && r.funded_amount > 0.0)) {
        bad("funded_amount", "must be > 0");
    }
    if (!(std::isfinite(r.installment) && r.installment > 0.0)) {
        bad("installment", "must be > 0");
    }
    if (!is_grade_letter(r.grade)) bad("grade", "must be a single letter A-G");
    if (r.subgrade.size() != 2 || !is_grade_letter(r.subgrade.substr(0, 1)) ||
        r.subgrade[1] < '1' || r.subgrade[1] > '5') {
        bad("subgrade", "must be letter A-G followed by digit 1-5");
    } else if (is_grade_letter(r.grade) && r.subgrade[0] != r.grade[0]) {
        bad("subgrade", "grade must be the first character of subgrade");
    }
    if (r.purpose.empty()) bad("purpose", "must be non-empty");

    bool fico_ok = !r.fico.empty();
    if (fico_ok) {
        for (char c : r.fico) fico_ok = fico_ok && c >= '0' && c <= '9';
    }
    long fico_value = 0;
    if (fico_ok) {
        fico_value = std::stol(r.fico);
        fico_ok = fico_value >= 660 && fico_value <= 850 && fico_value % 5 == 0;
    }
    if (!fico_ok) bad("fico", "must be a score in 660-850 divisible by 5");

    if (!nonneg_finite(r.annual_income)) bad("annual_income", "must be >= 0");
    if (r.housing != "own" && r.housing != "rent" && r.housing != "mortgage" &&
        r.housing != "other") {
        bad("housing", "must be one of own/rent/mortgage/other");
    }
    if (r.employment_length.empty()) bad("employment_length", "must be non-empty");
    if (!nonneg_finite(r.credit_history_length)) bad("credit_history_length", "must be >= 0");
    if (!nonneg_finite(r.delinq_2yrs)) bad("delinq_2yrs", "must be >= 0");
    if (!nonneg_finite(r.inquiries_6m)) bad("inquiries_6m", "must be >= 0");
    if (!nonneg_finite(r.public_records)) bad("public_records", "must be >= 0");
    if (!nonneg_finite(r.revol_util)) bad("revol_util", "must be >= 0");
    if (!nonneg_finite(r.open_accounts)) bad("open_accounts", "must be >= 0");
    if (r.months_since_last_delinq && *r.months_since_last_delinq < 0) {
        bad("months_since_last_delinq", "must be >= 0 when present");
    }
    if (!nonneg_finite(r.dti)) bad("dti", "must be >= 0");

    if (r.loan_to_income) {
        if (!nonneg_finite(*r.loan_to_income)) {
            bad("loan_to_income", "must be >= 0");
        } else if (r.annual_income > 0.0) {
            double expect = r.funded_amount / r.annual_income;
            if (std::fabs(*r.loan_to_income - expect) > 1e-9 * std::max(1.0, expect)) {
                bad("loan_to_income", "must equal funded_amount / annual_income");
            }
        }
    }
    if (r.installment_to_income) {
        if (!nonneg_finite(*r.installment_to_income)) {
            bad("installment_to_income", "must be >= 0");
        } else if (r.annual_income > 0.0) {
            double expect = 12.0 * r.installment / r.annual_income;
            if (std::fabs(*r.installment_to_income - expect) > 1e-9 * std::max(1.0, expect)) {
                bad("installment_to_income", "must equal 12 * installment / annual_income");
            }
        }
    }
    if (r.cash_flows) {
        for (const auto& flow : *r.cash_flows) {
            if (!std::isfinite(flow.amount)) {
                bad("cash_flows", "amounts must be finite");
                break;
            }
        }
    }
    if (r.irr && !std::isfinite(*r.irr)) bad("irr", "must be finite when present");
    return out;
}

}  // namespace p2p
