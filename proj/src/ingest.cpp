#include "p2pscore/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "p2pscore/csvio.hpp"
#include "p2pscore/errors.hpp"
#include "p2pscore/irr.hpp"
#include "p2pscore/rng.hpp"

namespace p2p {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Column mapping and CSV loading
// ---------------------------------------------------------------------------

const std::vector<std::string>& ColumnMap::required_fields() {
    static const std::vector<std::string> fields{
        "loan_id",        "issue_date",       "funded_amount",
        "installment",    "grade",            "subgrade",
        "purpose",        "fico",             "annual_income",
        "housing",        "employment_length", "credit_history_length",
        "delinq_2yrs",    "inquiries_6m",     "public_records",
        "revol_util",     "open_accounts",    "months_since_last_delinq",
        "dti"};
    return fields;
}

const std::vector<std::string>& ColumnMap::optional_fields() {
    static const std::vector<std::string> fields{"status", "loan_to_income",
                                                 "installment_to_income"};
    return fields;
}

ColumnMap ColumnMap::identity() {
    ColumnMap map;
    for (const auto& f : required_fields()) map.field_to_column[f] = f;
    for (const auto& f : optional_fields()) map.field_to_column[f] = f;
    return map;
}

const std::string& ColumnMap::column_for(const std::string& field) const {
    auto it = field_to_column.find(field);
    if (it != field_to_column.end()) return it->second;
    throw SchemaError("no column mapped for field '" + field + "'");
}

namespace {

// Resolved column indices for one loans table.
struct ColumnIndex {
    std::map<std::string, size_t> required;
    std::map<std::string, size_t> optional;  // only the ones present
};

ColumnIndex resolve_columns(const CsvTable& table, const ColumnMap& map) {
    ColumnIndex idx;
    for (const auto& field : ColumnMap::required_fields()) {
        idx.required[field] = table.column(map.column_for(field));  // SchemaError if absent
    }
    for (const auto& field : ColumnMap::optional_fields()) {
        auto mapped = map.field_to_column.find(field);
        if (mapped == map.field_to_column.end()) continue;
        for (size_t c = 0; c < table.header.size(); ++c) {
            if (table.header[c] == mapped->second) {
                idx.optional[field] = c;
                break;
            }
        }
    }
    return idx;
}

double cell_double(const std::vector<std::string>& row, size_t col, size_t row_number) {
    try {
        return parse_double(row[col]);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), row_number);
    }
}

}  // namespace

LoadResult load_loans(const std::string& path, const ColumnMap& map) {
    CsvTable table = read_csv(path);
    ColumnIndex idx = resolve_columns(table, map);

    LoadResult out;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const size_t row_number = r + 2;  // 1-based, after the header
        LoanRecord rec;
        rec.loan_id = row[idx.required["loan_id"]];
        try {
            rec.issue_date = parse_date(row[idx.required["issue_date"]]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row_number);
        }
        rec.funded_amount = cell_double(row, idx.required["funded_amount"], row_number);
        rec.installment = cell_double(row, idx.required["installment"], row_number);
        rec.grade = row[idx.required["grade"]];
        rec.subgrade = row[idx.required["subgrade"]];
        rec.purpose = row[idx.required["purpose"]];
        rec.fico = row[idx.required["fico"]];
        rec.annual_income = cell_double(row, idx.required["annual_income"], row_number);
        rec.housing = row[idx.required["housing"]];
        rec.employment_length = row[idx.required["employment_length"]];
        rec.credit_history_length =
            cell_double(row, idx.required["credit_history_length"], row_number);
        rec.delinq_2yrs = cell_double(row, idx.required["delinq_2yrs"], row_number);
        rec.inquiries_6m = cell_double(row, idx.required["inquiries_6m"], row_number);
        rec.public_records = cell_double(row, idx.required["public_records"], row_number);
        rec.revol_util = cell_double(row, idx.required["revol_util"], row_number);
        rec.open_accounts = cell_double(row, idx.required["open_accounts"], row_number);
        const std::string& msd = row[idx.required["months_since_last_delinq"]];
        if (!msd.empty()) {
            try {
                rec.months_since_last_delinq = parse_long(msd);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), row_number);
            }
        }
        rec.dti = cell_double(row, idx.required["dti"], row_number);

        if (auto it = idx.optional.find("status"); it != idx.optional.end()) {
            const std::string& s = row[it->second];
            if (!s.empty()) {
                try {
                    rec.status = loan_status_from_string(s);
                } catch (const ParseError& e) {
                    throw ParseError(e.what(), row_number);
                }
            }
        }
        if (auto it = idx.optional.find("loan_to_income"); it != idx.optional.end()) {
            if (!row[it->second].empty()) {
                rec.loan_to_income = cell_double(row, it->second, row_number);
            }
        }
        if (auto it = idx.optional.find("installment_to_income"); it != idx.optional.end()) {
            if (!row[it->second].empty()) {
                rec.installment_to_income = cell_double(row, it->second, row_number);
            }
        }

        auto violations = validate_record(rec);
        if (violations.empty()) {
            out.records.push_back(std::move(rec));
        } else {
            for (const auto& v : violations) {
                out.rejects.push_back({row_number, v.field, v.rule});
            }
        }
    }
    return out;
}

void write_rejects_csv(const std::string& path, const std::vector<RejectRow>& rejects) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(rejects.size());
    for (const auto& r : rejects) {
        rows.push_back({std::to_string(r.row), r.field, r.violation});
    }
    write_csv(path, {"row", "field", "violation"}, rows);
}

std::map<std::string, std::vector<CashFlowEvent>> load_payments(const std::string& path) {
    CsvTable table = read_csv(path);
    size_t id_col = table.column("loan_id");
    size_t date_col = table.column("date");
    size_t amount_col = table.column("amount");

    std::map<std::string, std::vector<CashFlowEvent>> out;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const size_t row_number = r + 2;
        try {
            out[row[id_col]].push_back({parse_date(row[date_col]), parse_double(row[amount_col])});
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row_number);
        }
    }
    for (auto& [id, events] : out) {
        std::stable_sort(events.begin(), events.end(),
                         [](const CashFlowEvent& a, const CashFlowEvent& b) {
                             return a.date.serial() < b.date.serial();
                         });
    }
    return out;
}

AttachReport attach_cashflows(std::vector<LoanRecord>& loans,
                              const std::map<std::string, std::vector<CashFlowEvent>>& payments) {
    AttachReport report;
    std::set<std::string> known;
    for (auto& loan : loans) {
        known.insert(loan.loan_id);
        auto it = payments.find(loan.loan_id);
        if (it == payments.end()) {
            ++report.without_payments;
            continue;
        }
        std::vector<CashFlowEvent> flows{{loan.issue_date, -loan.funded_amount}};
        flows.insert(flows.end(), it->second.begin(), it->second.end());
        loan.cash_flows = std::move(flows);
        ++report.attached;
    }
    for (const auto& [id, events] : payments) {
        if (!known.count(id)) ++report.unknown_loan_ids;
    }
    return report;
}

std::vector<RejectRow> derive_ratios_all(std::vector<LoanRecord>& loans) {
    std::vector<RejectRow> rejects;
    std::vector<LoanRecord> kept;
    kept.reserve(loans.size());
    for (size_t i = 0; i < loans.size(); ++i) {
        if (loans[i].annual_income == 0.0) {
            rejects.push_back({i + 1, "annual_income", "zero income: cannot derive ratios"});
            continue;
        }
        kept.push_back(derive_ratios(std::move(loans[i])));
    }
    loans = std::move(kept);
    return rejects;
}

std::vector<LoanRecord> filter_cohort(std::vector<LoanRecord> loans, int min_year, int max_year) {
    if (min_year > max_year) throw UsageError("cohort filter: min_year > max_year");
    std::vector<LoanRecord> out;
    out.reserve(loans.size());
    for (auto& loan : loans) {
        if (loan.issue_date.year >= min_year && loan.issue_date.year <= max_year) {
            out.push_back(std::move(loan));
        }
    }
    return out;
}

DatasetSplit split_train_test(const std::vector<LoanRecord>& loans, double train_fraction,
                              uint64_t seed) {
    if (loans.empty()) throw EmptyInputError("cannot split an empty dataset");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw UsageError("train_fraction must be in (0,1), got " + std::to_string(train_fraction));
    }
    std::vector<size_t> order(loans.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    size_t n_train = static_cast<size_t>(
        std::llround(train_fraction * static_cast<double>(loans.size())));
    DatasetSplit split;
    split.seed = seed;
    for (size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? split.train : split.test).push_back(loans[order[i]]);
    }
    return split;
}

// ---------------------------------------------------------------------------
// Descriptive statistics
// ---------------------------------------------------------------------------

namespace {

ContinuousSummary summarize_values(std::vector<double> v) {
    ContinuousSummary s;
    s.count = v.size();
    if (v.empty()) return s;
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / v.size();
    double sq = 0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(sq / v.size());
    auto quantile = [&v](double p) {
        double h = p * static_cast<double>(v.size() - 1);
        size_t lo = static_cast<size_t>(h);
        if (lo + 1 >= v.size()) return v.back();
        return v[lo] + (h - lo) * (v[lo + 1] - v[lo]);
    };
    s.min = v.front();
    s.q25 = quantile(0.25);
    s.median = quantile(0.5);
    s.q75 = quantile(0.75);
    s.max = v.back();
    return s;
}

}  // namespace

SummaryReport summarize(const std::vector<LoanRecord>& loans) {
    if (loans.empty()) throw EmptyInputError("cannot summarize an empty dataset");
    SummaryReport report;
    report.count = loans.size();

    auto add_continuous = [&](const std::string& name, auto getter) {
        std::vector<double> values;
        values.reserve(loans.size());
        for (const auto& l : loans) {
            auto v = getter(l);
            if (v) values.push_back(*v);
        }
        report.continuous[name] = summarize_values(std::move(values));
    };
    auto always = [](auto member) {
        return [member](const LoanRecord& l) -> std::optional<double> { return l.*member; };
    };

    add_continuous("funded_amount", always(&LoanRecord::funded_amount));
    add_continuous("installment", always(&LoanRecord::installment));
    add_continuous("annual_income", always(&LoanRecord::annual_income));
    add_continuous("credit_history_length", always(&LoanRecord::credit_history_length));
    add_continuous("delinq_2yrs", always(&LoanRecord::delinq_2yrs));
    add_continuous("inquiries_6m", always(&LoanRecord::inquiries_6m));
    add_continuous("public_records", always(&LoanRecord::public_records));
    add_continuous("revol_util", always(&LoanRecord::revol_util));
    add_continuous("open_accounts", always(&LoanRecord::open_accounts));
    add_continuous("dti", always(&LoanRecord::dti));
    add_continuous("months_since_last_delinq", [](const LoanRecord& l) -> std::optional<double> {
        if (!l.months_since_last_delinq) return std::nullopt;
        return static_cast<double>(*l.months_since_last_delinq);
    });
    add_continuous("loan_to_income",
                   [](const LoanRecord& l) -> std::optional<double> { return l.loan_to_income; });
    add_continuous("installment_to_income", [](const LoanRecord& l) -> std::optional<double> {
        return l.installment_to_income;
    });
    add_continuous("irr", [](const LoanRecord& l) -> std::optional<double> { return l.irr; });

    auto add_categorical = [&](const std::string& name, auto getter) {
        auto& counts = report.categorical[name];
        for (const auto& l : loans) ++counts[getter(l)];
    };
    add_categorical("grade", [](const LoanRecord& l) { return l.grade; });
    add_categorical("subgrade", [](const LoanRecord& l) { return l.subgrade; });
    add_categorical("purpose", [](const LoanRecord& l) { return l.purpose; });
    add_categorical("fico", [](const LoanRecord& l) { return l.fico; });
    add_categorical("housing", [](const LoanRecord& l) { return l.housing; });
    add_categorical("employment_length", [](const LoanRecord& l) { return l.employment_length; });

    size_t defaults = 0;
    for (const auto& l : loans) {
        if (!l.months_since_last_delinq) ++report.never_delinq;
        if (l.status) {
            ++report.labeled;
            if (*l.status == LoanStatus::Default) ++defaults;
        }
    }
    if (report.labeled > 0) {
        report.default_rate = static_cast<double>(defaults) / static_cast<double>(report.labeled);
    }
    return report;
}

std::string summary_to_json(const SummaryReport& report) {
    json doc;
    doc["count"] = report.count;
    doc["labeled"] = report.labeled;
    if (report.default_rate) {
        doc["default_rate"] = *report.default_rate;
    } else {
        doc["default_rate"] = nullptr;
    }
    doc["never_delinq"] = report.never_delinq;
    json cont = json::object();
    for (const auto& [name, s] : report.continuous) {
        cont[name] = {{"count", s.count}, {"mean", s.mean},     {"std", s.std_dev},
                      {"min", s.min},     {"q25", s.q25},       {"median", s.median},
                      {"q75", s.q75},     {"max", s.max}};
    }
    doc["continuous"] = cont;
    json cat = json::object();
    for (const auto& [name, counts] : report.categorical) {
        json levels = json::object();
        for (const auto& [level, count] : counts) levels[level] = count;
        cat[name] = levels;
    }
    doc["categorical"] = cat;
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic cohort generator
// ---------------------------------------------------------------------------

namespace {

// Marginal distributions and risk coefficients for the generator. The risk
// model is a linear score over standardized features plus one strong planted
// grade-by-purpose interaction; coefficients are sized so that resampling,
// architecture, and approach comparisons separate cleanly at n = 20k.
const std::vector<double> kGradeCum = {0.17, 0.43, 0.67, 0.83, 0.93, 0.98, 1.0};

const std::vector<std::string> kPurposes = {
    "car",           "credit_card", "debt_consolidation", "educational",
    "home_improvement", "house",    "major_purchase",     "medical",
    "moving",        "other",       "renewable_energy",   "small_business",
    "vacation",      "wedding"};
// Unnormalized weights; Rng::categorical divides by the final cumulative sum.
const std::vector<double> kPurposeCum = {0.03, 0.24, 0.68,  0.69,  0.75,  0.77,  0.81,
                                         0.84, 0.86, 0.94,  0.945, 0.985, 1.005, 1.02};

const std::vector<std::string> kHousing = {"mortgage", "other", "own", "rent"};
const std::vector<double> kHousingCum = {0.46, 0.50, 0.59, 1.0};

const std::vector<std::string> kEmployment = {
    "< 1 year", "1 year",  "2 years", "3 years", "4 years", "5 years",
    "6 years",  "7 years", "8 years", "9 years", "10+ years"};
const std::vector<double> kEmploymentCum = {0.08, 0.15, 0.24, 0.32, 0.38, 0.45,
                                            0.51, 0.56, 0.61, 0.65, 1.0};

// Grade base log-odds of default, A through G.
const double kGradeRisk[7] = {-8.3, -5.1, -2.4, 0.5, 3.0, 5.3, 7.2};

double planted_interaction(int grade_idx, const std::string& purpose) {
    if (purpose == "small_business") {
        if (grade_idx >= 4) return 4.5;  // E, F, G
        if (grade_idx >= 2) return 2.2;  // C, D
    }
    if (purpose == "credit_card" && grade_idx <= 1) return -2.0;  // A, B
    return 0.0;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double round_to(double v, double step) { return std::round(v / step) * step; }

// Remaining principal after m level payments on an amortizing loan.
double balance_after(double funded, double monthly_rate, double payment, int m) {
    double growth = std::pow(1.0 + monthly_rate, m);
    return funded * growth - payment * (growth - 1.0) / monthly_rate;
}

}  // namespace

std::vector<LoanRecord> gen_synthetic(const SynthConfig& config) {
    if (config.n_loans == 0) throw UsageError("n_loans must be positive");
    if (!(config.default_rate_target > 0.0 && config.default_rate_target < 1.0)) {
        throw UsageError("default_rate_target must be in (0,1)");
    }
    if (!(config.note_rate_lo < config.note_rate_hi)) {
        throw UsageError("note rate range must satisfy low < high");
    }
    if (config.term_months.empty()) throw UsageError("term_months must be non-empty");

    Rng rng(config.seed);
    const size_t n = config.n_loans;

    std::vector<LoanRecord> loans(n);
    std::vector<double> risk(n);
    std::vector<double> status_draw(n);
    std::vector<int> grade_idx(n);
    std::vector<int> terms(n);
    std::vector<double> note_rates(n);

    int digits = 1;
    for (size_t v = n; v >= 10; v /= 10) ++digits;

    for (size_t i = 0; i < n; ++i) {
        LoanRecord& r = loans[i];
        std::string id = std::to_string(i);
        r.loan_id = "L" + std::string(digits - id.size(), '0') + id;

        r.issue_date = Date(2008 + (int)rng.uniform_index(6), 1 + (int)rng.uniform_index(12),
                            1 + (int)rng.uniform_index(28));

        int g = (int)rng.categorical(kGradeCum);
        grade_idx[i] = g;
        int sub_minor = 1 + (int)rng.uniform_index(5);
        r.grade = std::string(1, static_cast<char>('A' + g));
        r.subgrade = r.grade + std::to_string(sub_minor);
        r.purpose = kPurposes[rng.categorical(kPurposeCum)];
        r.housing = kHousing[rng.categorical(kHousingCum)];
        r.employment_length = kEmployment[rng.categorical(kEmploymentCum)];

        double fico_center = 780.0 - 18.0 * g;
        double fico = round_to(fico_center + rng.normal(0.0, 18.0), 5.0);
        fico = std::clamp(fico, 660.0, 850.0);
        r.fico = std::to_string(static_cast<long>(fico));

        r.annual_income =
            std::clamp(std::exp(rng.normal(std::log(62000.0), 0.45)), 12000.0, 400000.0);

        int term = config.term_months[rng.uniform() < 0.72
                                          ? 0
                                          : std::min<size_t>(1, config.term_months.size() - 1)];
        terms[i] = term;

        r.funded_amount =
            std::clamp(round_to(r.annual_income * rng.uniform(0.08, 0.28), 25.0), 1000.0, 35000.0);

        double note = 0.045 + 0.032 * g + 0.006 * (sub_minor - 1) + rng.normal(0.0, 0.004);
        note = std::clamp(note, config.note_rate_lo, config.note_rate_hi);
        note_rates[i] = note;
        double rm = std::pow(1.0 + note, 1.0 / 12.0) - 1.0;
        r.installment = r.funded_amount * rm / (1.0 - std::pow(1.0 + rm, -term));

        r.credit_history_length = std::max(2.0, rng.normal(14.0, 7.0));
        r.delinq_2yrs = static_cast<double>(rng.poisson(0.35));
        r.inquiries_6m = static_cast<double>(rng.poisson(0.9));
        r.public_records = static_cast<double>(rng.poisson(0.12));
        r.open_accounts = 2.0 + static_cast<double>(rng.poisson(9.0));
        r.revol_util = std::clamp(rng.normal(0.55, 0.25), 0.0, 1.5);
        bool never_delinq = rng.uniform() < 0.55;
        if (!never_delinq) r.months_since_last_delinq = 1 + (long)rng.uniform_index(80);
        r.dti = std::clamp(rng.normal(0.18, 0.08), 0.0, 0.45);

        r = derive_ratios(std::move(r));

        // Latent default risk: fixed standardization constants keep this a
        // pure per-record function.
        risk[i] = kGradeRisk[g] + 1.30 * (sub_minor - 3) / 1.41 - 0.080 * (fico - fico_center) +
                  2.70 * (r.dti - 0.18) / 0.079 + 2.40 * (r.revol_util - 0.55) / 0.246 +
                  1.85 * (r.inquiries_6m - 0.9) / 0.948 + 1.70 * (r.delinq_2yrs - 0.35) / 0.589 +
                  1.10 * (r.public_records - 0.12) / 0.347 -
                  1.30 * (r.credit_history_length - 14.1) / 6.73 -
                  0.95 * (std::log(r.annual_income) - 11.03) / 0.45 +
                  2.10 * (*r.installment_to_income - 0.064) / 0.024 +
                  (never_delinq ? -0.70 : 0.30) + planted_interaction(g, r.purpose) +
                  rng.normal(0.0, 0.25);
        status_draw[i] = rng.uniform();
    }

    // Calibrate the intercept so the mean default probability hits the
    // target, then realize the statuses from the per-record uniform draws.
    double lo = -15.0, hi = 5.0;
    for (int iter = 0; iter < 80; ++iter) {
        double c = 0.5 * (lo + hi);
        double mean = 0.0;
        for (size_t i = 0; i < n; ++i) mean += sigmoid(c + risk[i]);
        mean /= static_cast<double>(n);
        if (mean < config.default_rate_target) {
            lo = c;
        } else {
            hi = c;
        }
    }
    const double intercept = 0.5 * (lo + hi);
    for (size_t i = 0; i < n; ++i) {
        loans[i].status = status_draw[i] < sigmoid(intercept + risk[i]) ? LoanStatus::Default
                                                                        : LoanStatus::NonDefault;
    }

    // Payment schedules. Non-defaults pay every installment (a configurable
    // fraction prepays early: level payments then a payoff of the remaining
    // balance); defaults pay at least one installment and stop no later than
    // two thirds of the term, so they lose money yet always leave a payment
    // trail — a loan with no payment rows would drop out of IRR labeling
    // after a CSV round trip.
    for (size_t i = 0; i < n; ++i) {
        LoanRecord& r = loans[i];
        int term = terms[i];
        double rm = std::pow(1.0 + note_rates[i], 1.0 / 12.0) - 1.0;
        std::vector<CashFlowEvent> flows{{r.issue_date, -r.funded_amount}};
        if (*r.status == LoanStatus::NonDefault) {
            bool prepays = rng.uniform() < config.prepay_fraction;
            int last = term;
            if (prepays && term > 6) last = 6 + (int)rng.uniform_index(term - 6);  // 6..term-1
            for (int m = 1; m < last; ++m) {
                flows.push_back({add_months(r.issue_date, m), r.installment});
            }
            double final_payment = r.installment;
            if (last < term) {
                final_payment += balance_after(r.funded_amount, rm, r.installment, last);
            }
            flows.push_back({add_months(r.issue_date, last), final_payment});
        } else {
            int cutoff =
                1 + (int)rng.uniform_index(std::max<size_t>(1, 2 * term / 3));  // 1..2T/3
            for (int m = 1; m <= cutoff; ++m) {
                flows.push_back({add_months(r.issue_date, m), r.installment});
            }
        }
        r.cash_flows = std::move(flows);
    }

    IrrReport report = assign_irr(loans);
    if (report.failed != 0) {
        throw Error("synthetic generator produced unsolvable cash flows, which should never "
                    "happen (failures: " +
                    std::to_string(report.failed) + ")");
    }
    return loans;
}

// ---------------------------------------------------------------------------
// Canonical CSV writers
// ---------------------------------------------------------------------------

void write_loans_csv(const std::string& path, const std::vector<LoanRecord>& loans) {
    std::vector<std::string> header;
    for (const auto& f : ColumnMap::required_fields()) header.push_back(f);
    for (const auto& f : ColumnMap::optional_fields()) header.push_back(f);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(loans.size());
    for (const auto& l : loans) {
        std::vector<std::string> row;
        row.push_back(l.loan_id);
        row.push_back(format_date(l.issue_date));
        row.push_back(format_double(l.funded_amount));
        row.push_back(format_double(l.installment));
        row.push_back(l.grade);
        row.push_back(l.subgrade);
        row.push_back(l.purpose);
        row.push_back(l.fico);
        row.push_back(format_double(l.annual_income));
        row.push_back(l.housing);
        row.push_back(l.employment_length);
        row.push_back(format_double(l.credit_history_length));
        row.push_back(format_double(l.delinq_2yrs));
        row.push_back(format_double(l.inquiries_6m));
        row.push_back(format_double(l.public_records));
        row.push_back(format_double(l.revol_util));
        row.push_back(format_double(l.open_accounts));
        row.push_back(l.months_since_last_delinq
                          ? std::to_string(*l.months_since_last_delinq)
                          : "");
        row.push_back(format_double(l.dti));
        row.push_back(l.status ? to_string(*l.status) : "");
        row.push_back(l.loan_to_income ? format_double(*l.loan_to_income) : "");
        row.push_back(l.installment_to_income ? format_double(*l.installment_to_income) : "");
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_payments_csv(const std::string& path, const std::vector<LoanRecord>& loans) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : loans) {
        if (!l.cash_flows) continue;
        for (const auto& f : *l.cash_flows) {
            if (f.amount <= 0.0) continue;  // the funding outflow is implicit
            rows.push_back({l.loan_id, format_date(f.date), format_double(f.amount)});
        }
    }
    write_csv(path, {"loan_id", "date", "amount"}, rows);
}

}  // namespace p2p
