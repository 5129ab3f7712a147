#include "p2pscore/irr.hpp"

#include <algorithm>
#include <cmath>

#include "p2pscore/errors.hpp"

namespace p2p {

namespace {

long earliest_serial(const std::vector<CashFlowEvent>& flows) {
    long best = flows.front().date.serial();
    for (const auto& f : flows) best = std::min(best, f.date.serial());
    return best;
}

double flow_scale(const std::vector<CashFlowEvent>& flows) {
    double scale = 0.0;
    for (const auto& f : flows) scale = std::max(scale, std::fabs(f.amount));
    return std::max(scale, 1.0);
}

}  // namespace

double npv(const std::vector<CashFlowEvent>& flows, double rate) {
    if (flows.empty()) throw EmptyInputError("npv of empty cash-flow series");
    if (rate <= -1.0) {
        throw RateOutOfDomainError("npv rate must be > -1, got " + std::to_string(rate));
    }
    long t0 = earliest_serial(flows);
    double log_df = std::log1p(rate);
    double total = 0.0;
    for (const auto& f : flows) {
        double years = static_cast<double>(f.date.serial() - t0) / 365.0;
        total += f.amount * std::exp(-years * log_df);
    }
    return total;
}

RateSolution solve_irr(const std::vector<CashFlowEvent>& flows, const SolveConfig& cfg) {
    if (flows.empty()) throw EmptyInputError("solve_irr of empty cash-flow series");

    bool any_positive = false, any_negative = false;
    for (const auto& f : flows) {
        any_positive = any_positive || f.amount > 0.0;
        any_negative = any_negative || f.amount < 0.0;
    }
    if (!any_positive) {
        // Nothing ever came back: total loss, pinned at the domain floor.
        RateSolution out;
        out.rate = cfg.rate_lo;
        out.iterations = 0;
        out.residual_npv = npv(flows, cfg.rate_lo);
        out.bracket_lo = cfg.rate_lo;
        out.bracket_hi = cfg.rate_hi;
        out.status = RateStatus::TotalLoss;
        return out;
    }
    if (!any_negative) {
        throw NoSignChangeError("all cash flows are inflows; rate of return is unbounded");
    }

    double lo = cfg.rate_lo, hi = cfg.rate_hi;
    double f_lo = npv(flows, lo), f_hi = npv(flows, hi);
    double tol = cfg.npv_tolerance * flow_scale(flows);

    if (f_lo <= 0.0) {
        // npv is decreasing in the rate, so the root lies at or below the
        // floor: the loan recovered so little that its annualized rate is
        // effectively a total loss. Pin it at the floor.
        RateSolution out;
        out.rate = lo;
        out.iterations = 0;
        out.residual_npv = f_lo;
        out.bracket_lo = lo;
        out.bracket_hi = hi;
        out.status = RateStatus::TotalLoss;
        return out;
    }
    if (f_hi > 0.0) {
        throw NoSignChangeError("npv is positive at both rate bounds [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]; rate exceeds the bracket");
    }

    RateSolution out;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    double mid = lo, f_mid = f_lo;
    for (int i = 1; i <= cfg.max_iter; ++i) {
        mid = 0.5 * (lo + hi);
        f_mid = npv(flows, mid);
        out.iterations = i;
        if (std::fabs(f_mid) <= tol) {
            out.rate = mid;
            out.residual_npv = f_mid;
            out.status = RateStatus::Converged;
            return out;
        }
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    throw NonConvergenceError("bisection did not reach |npv| <= " + std::to_string(tol) +
                              " after " + std::to_string(cfg.max_iter) + " iterations");
}

IrrReport assign_irr(std::vector<LoanRecord>& loans, const SolveConfig& cfg) {
    IrrReport report;
    for (auto& loan : loans) {
        if (!loan.cash_flows) {
            ++report.unlabeled;
            continue;
        }
        try {
            RateSolution sol = solve_irr(*loan.cash_flows, cfg);
            loan.irr = sol.rate;
            ++report.labeled;
            if (sol.status == RateStatus::TotalLoss) ++report.total_loss;
        } catch (const DataError&) {
            ++report.failed;
            report.failed_loan_ids.push_back(loan.loan_id);
        }
    }
    return report;
}

}  // namespace p2p
