#pragma once

#include <vector>

#include "p2pscore/domain.hpp"

namespace p2p {

struct SolveConfig {
    // Relative to the largest flow magnitude. Tight enough that the implied
    // rate error stays below 1e-9 across the whole bracket: the npv slope is
    // roughly scale/(1+rate), so 1e-12 * scale keeps the rate within about
    // 1e-11 even at the high end.
    double npv_tolerance = 1e-12;
    int max_iter = 200;
    double rate_lo = -0.9999;
    double rate_hi = 10.0;
};

enum class RateStatus {
    Converged,  // bisection met the tolerance
    TotalLoss,  // recovery too small for any rate >= rate_lo: floored
};

struct RateSolution {
    double rate = 0.0;
    int iterations = 0;
    double residual_npv = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    RateStatus status = RateStatus::Converged;
};

// Net present value at an annual rate, actual/365 day count with annual
// compounding: sum of amount_i / (1+rate)^(days_i/365), days_i measured from
// the earliest flow date. Throws RateOutOfDomainError if rate <= -1.
double npv(const std::vector<CashFlowEvent>& flows, double rate);

// Bisection for the rate where npv is zero. Total losses are floored rather
// than thrown: when no flow is positive, or the recovery is so small that
// npv is still negative at rate_lo (true rate at or below the floor), the
// result carries rate_lo and RateStatus::TotalLoss. Throws NoSignChangeError
// when npv is positive at both bounds (rate above the bracket) or no flow is
// negative, NonConvergenceError if max_iter steps cannot meet the tolerance.
RateSolution solve_irr(const std::vector<CashFlowEvent>& flows, const SolveConfig& cfg = {});

struct IrrReport {
    size_t labeled = 0;      // irr assigned by the solver
    size_t total_loss = 0;   // of which: floored total losses
    size_t unlabeled = 0;    // skipped: no cash_flows attached
    size_t failed = 0;       // solver errors, recorded not thrown
    std::vector<std::string> failed_loan_ids;
};

// Populates record.irr from record.cash_flows for every loan that has flows.
// Per-loan solver failures are recorded in the report, never thrown.
IrrReport assign_irr(std::vector<LoanRecord>& loans, const SolveConfig& cfg = {});

}  // namespace p2p
