#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "p2pscore/baselines.hpp"
#include "p2pscore/cli.hpp"
#include "p2pscore/dates.hpp"
#include "p2pscore/domain.hpp"
#include "p2pscore/errors.hpp"
#include "p2pscore/ingest.hpp"
#include "p2pscore/irr.hpp"
#include "p2pscore/pipeline.hpp"
#include "p2pscore/resample.hpp"
#include "p2pscore/version.hpp"
#include "p2pscore/widedeep.hpp"

namespace py = pybind11;
using json = nlohmann::ordered_json;
using namespace p2p;

namespace {

// Reports are assembled as JSON and handed to python as plain dicts/lists.
py::object to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json scored_row(const ScoredLoan& s) {
    json row;
    row["loan_id"] = s.loan_id;
    row["grade"] = s.grade;
    row["pd"] = s.pd ? json(*s.pd) : json(nullptr);
    row["gate"] = to_string(s.gate);
    row["predicted_irr"] = s.predicted_irr ? json(*s.predicted_irr) : json(nullptr);
    row["actual_irr"] = s.actual_irr ? json(*s.actual_irr) : json(nullptr);
    return row;
}

// Seed offsets match the command-line tool, so a python run with seed N and a
// CLI run with --seed N train on identical draws.
constexpr uint64_t kResampleSeedOffset = 2;
constexpr uint64_t kStage1SeedOffset = 3;
constexpr uint64_t kStage2SeedOffset = 4;
constexpr uint64_t kLogisticSeedOffset = 5;

struct TwoStagePy {
    TwoStageModel model;
    std::vector<double> stage1_loss;
    std::vector<double> stage2_loss;

    static TwoStagePy train(const std::vector<LoanRecord>& train_split,
                            const std::string& resample, int k_neighbors, double gamma,
                            int steps, int batch_size, double stage1_learning_rate,
                            double stage2_learning_rate, double dropout_rate,
                            const std::vector<int>& hidden_layers,
                            const std::string& architecture, uint64_t seed) {
        ResamplePlan plan;
        plan.method = resample_method_from_string(resample);
        plan.k_neighbors = k_neighbors;
        plan.seed = seed + kResampleSeedOffset;
        TrainConfig c1;
        c1.steps = steps;
        c1.batch_size = batch_size;
        c1.learning_rate = stage1_learning_rate;
        c1.dropout_rate = dropout_rate;
        c1.hidden_layers = hidden_layers;
        c1.architecture = architecture_from_string(architecture);
        c1.seed = seed + kStage1SeedOffset;
        TrainConfig c2 = c1;
        c2.learning_rate = stage2_learning_rate;
        c2.seed = seed + kStage2SeedOffset;
        TwoStageTraining t = train_two_stage(train_split, plan, c1, c2, gamma);
        return {std::move(t.model), std::move(t.stage1_loss_curve),
                std::move(t.stage2_loss_curve)};
    }

    py::object score(const std::vector<LoanRecord>& loans) const {
        json rows = json::array();
        for (const auto& s : score_loans(model, loans)) rows.push_back(scored_row(s));
        return to_py(rows);
    }

    py::object evaluate_classification(const std::vector<LoanRecord>& test,
                                       std::optional<double> gamma) const {
        ClassificationReport r = p2p::eval_classification(
            model.stage1, model.schema, test, gamma.value_or(model.gamma));
        json j;
        j["tp"] = r.tp;
        j["fn"] = r.fn;
        j["fp"] = r.fp;
        j["tn"] = r.tn;
        j["precision_p"] = r.precision_p;
        j["recall_p"] = r.recall_p;
        j["precision_n"] = r.precision_n;
        j["recall_n"] = r.recall_n;
        j["gamma"] = r.gamma;
        return to_py(j);
    }

    double evaluate_regression(const std::vector<LoanRecord>& test) const {
        return p2p::eval_regression(model.stage2, model.schema, test);
    }

    void save(const std::string& dir) const {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
        save_model(model.stage1, model.schema,
                   (std::filesystem::path(dir) / "stage1_model.json").string());
        save_model(model.stage2, model.schema,
                   (std::filesystem::path(dir) / "stage2_model.json").string());
    }

    // gamma is a scoring-time choice, not a trained quantity, so it is passed
    // at load time rather than read from the model files.
    static TwoStagePy load(const std::string& dir, double gamma) {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("gamma must lie in [0, 1]");
        TrainedModel s1 = load_model((std::filesystem::path(dir) / "stage1_model.json").string());
        TrainedModel s2 = load_model((std::filesystem::path(dir) / "stage2_model.json").string());
        if (s1.params.task != Task::Classification)
            throw SchemaError("stage1_model.json does not hold a classification model");
        if (s2.params.task != Task::Regression)
            throw SchemaError("stage2_model.json does not hold a regression model");
        TwoStagePy out;
        out.model.stage1 = std::move(s1.params);
        out.model.stage2 = std::move(s2.params);
        out.model.schema = std::move(s1.schema);
        out.model.gamma = gamma;
        return out;
    }
};

py::object compare_py(const TwoStagePy& two_stage, const std::vector<LoanRecord>& train_split,
                      const std::vector<LoanRecord>& test, size_t k,
                      const std::string& resample, int k_neighbors, int logistic_steps,
                      int logistic_batch_size, double logistic_learning_rate, int cart_max_depth,
                      int cart_min_leaf, uint64_t seed) {
    CartConfig cart_config;
    cart_config.max_depth = cart_max_depth;
    cart_config.min_leaf = cart_min_leaf;
    CartModel cart = train_cart(train_split, cart_config);

    ResamplePlan plan;
    plan.method = resample_method_from_string(resample);
    plan.k_neighbors = k_neighbors;
    plan.seed = seed + kResampleSeedOffset;
    TrainConfig lc;
    lc.steps = logistic_steps;
    lc.batch_size = logistic_batch_size;
    lc.learning_rate = logistic_learning_rate;
    lc.seed = seed + kLogisticSeedOffset;
    TrainMatrix balanced =
        p2p::resample(encode_classification(two_stage.model.schema, train_split), plan);
    TrainedModel logistic = train_logistic(two_stage.model.schema, balanced, lc);

    CompareReport report = compare_approaches(two_stage.model, cart, logistic, test, k);
    json j;
    j["k"] = report.k;
    j["approaches"] = json::array();
    for (const auto& a : report.approaches) {
        json aj;
        aj["approach"] = to_string(a.approach);
        aj["avg_actual_irr"] = a.avg_actual_irr;
        aj["shortfall"] = a.shortfall;
        aj["selection"] = json::array();
        for (const auto& s : a.selection) aj["selection"].push_back(scored_row(s));
        j["approaches"].push_back(aj);
    }
    return to_py(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-stage loan scoring: a default-probability gate followed by IRR regression.";
    m.attr("__version__") = kVersion;

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<TrainError>(m, "TrainError", PyExc_RuntimeError);

    py::class_<LoanRecord>(m, "LoanRecord")
        .def_readonly("loan_id", &LoanRecord::loan_id)
        .def_readonly("grade", &LoanRecord::grade)
        .def_readonly("subgrade", &LoanRecord::subgrade)
        .def_readonly("purpose", &LoanRecord::purpose)
        .def_readonly("fico", &LoanRecord::fico)
        .def_readonly("funded_amount", &LoanRecord::funded_amount)
        .def_readonly("annual_income", &LoanRecord::annual_income)
        .def_readonly("dti", &LoanRecord::dti)
        .def_readonly("irr", &LoanRecord::irr)
        .def_property_readonly("issue_date",
                               [](const LoanRecord& r) { return format_date(r.issue_date); })
        .def_property_readonly("status",
                               [](const LoanRecord& r) -> std::optional<std::string> {
                                   if (!r.status) return std::nullopt;
                                   return to_string(*r.status);
                               })
        .def("__repr__", [](const LoanRecord& r) {
            std::string s = "<LoanRecord " + r.loan_id + " grade=" + r.grade;
            if (r.status) s += " status=" + to_string(*r.status);
            return s + ">";
        });

    m.def(
        "gen_synthetic",
        [](size_t n_loans, double default_rate_target, uint64_t seed) {
            SynthConfig config;
            config.n_loans = n_loans;
            config.default_rate_target = default_rate_target;
            config.seed = seed;
            return gen_synthetic(config);
        },
        py::arg("n_loans") = 20000, py::arg("default_rate_target") = 0.15, py::arg("seed") = 1,
        "Seeded synthetic cohort with statuses, cash flows, and realized IRR.");

    m.def(
        "load_dataset",
        [](const std::string& loans, const std::string& payments, int min_year, int max_year) {
            LoadResult loaded = load_loans(loans);
            derive_ratios_all(loaded.records);
            loaded.records = filter_cohort(std::move(loaded.records), min_year, max_year);
            if (!payments.empty()) {
                auto events = load_payments(payments);
                attach_cashflows(loaded.records, events);
                assign_irr(loaded.records);
            }
            return loaded.records;
        },
        py::arg("loans"), py::arg("payments") = "", py::arg("min_year") = 2008,
        py::arg("max_year") = 2013,
        "Load a loans CSV (and optionally payments, to compute realized IRR); rows failing "
        "validation are dropped.");

    m.def("write_loans_csv", &write_loans_csv, py::arg("path"), py::arg("loans"));
    m.def("write_payments_csv", &write_payments_csv, py::arg("path"), py::arg("loans"));

    m.def(
        "split_train_test",
        [](const std::vector<LoanRecord>& loans, double train_fraction, uint64_t seed) {
            DatasetSplit split = split_train_test(loans, train_fraction, seed);
            return py::make_tuple(std::move(split.train), std::move(split.test));
        },
        py::arg("loans"), py::arg("train_fraction") = 0.8, py::arg("seed") = 0);

    m.def(
        "summarize",
        [](const std::vector<LoanRecord>& loans) {
            return to_py(json::parse(summary_to_json(summarize(loans))));
        },
        py::arg("loans"), "Descriptive statistics as a dict.");

    py::class_<TwoStagePy>(m, "TwoStageModel")
        .def_static("train", &TwoStagePy::train, py::arg("train_split"),
                    py::arg("resample") = "smote", py::arg("k_neighbors") = 5,
                    py::arg("gamma") = 0.5, py::arg("steps") = 1000,
                    py::arg("batch_size") = 100, py::arg("stage1_learning_rate") = 0.002,
                    py::arg("stage2_learning_rate") = 0.002, py::arg("dropout_rate") = 0.2,
                    py::arg("hidden_layers") = std::vector<int>{100, 50, 10},
                    py::arg("architecture") = "widedeep", py::arg("seed") = 0,
                    "Train the probability-of-default gate (on rebalanced data) and the IRR "
                    "regressor (on the positive-IRR subset).")
        .def("score", &TwoStagePy::score, py::arg("loans"),
             "Per-loan dicts: pd, gate, predicted_irr (present iff the gate passed).")
        .def("evaluate_classification", &TwoStagePy::evaluate_classification, py::arg("test"),
             py::arg("gamma") = py::none(),
             "Confusion counts and precision/recall with Non-Default as the positive class.")
        .def("evaluate_regression", &TwoStagePy::evaluate_regression, py::arg("test"),
             "Mean squared error of predicted IRR over positive-IRR test loans.")
        .def("save", &TwoStagePy::save, py::arg("dir"))
        .def_static("load", &TwoStagePy::load, py::arg("dir"), py::arg("gamma") = 0.5)
        .def_property(
            "gamma", [](const TwoStagePy& t) { return t.model.gamma; },
            [](TwoStagePy& t, double g) {
                if (!(g >= 0.0 && g <= 1.0)) throw UsageError("gamma must lie in [0, 1]");
                t.model.gamma = g;
            })
        .def_property_readonly("stage1_loss",
                               [](const TwoStagePy& t) { return t.stage1_loss; })
        .def_property_readonly("stage2_loss",
                               [](const TwoStagePy& t) { return t.stage2_loss; });

    m.def("compare_approaches", &compare_py, py::arg("model"), py::arg("train_split"),
          py::arg("test"), py::arg("k") = 30, py::arg("resample") = "smote",
          py::arg("k_neighbors") = 5, py::arg("logistic_steps") = 1000,
          py::arg("logistic_batch_size") = 100, py::arg("logistic_learning_rate") = 0.002,
          py::arg("cart_max_depth") = 6, py::arg("cart_min_leaf") = 20, py::arg("seed") = 0,
          "Rank credit-scoring, profit-scoring, and two-stage top-k portfolios by realized "
          "IRR.");

    m.def(
        "solve_irr",
        [](const std::vector<std::pair<std::string, double>>& flows) {
            std::vector<CashFlowEvent> events;
            events.reserve(flows.size());
            for (const auto& [date, amount] : flows)
                events.push_back({parse_date(date), amount});
            RateSolution s = solve_irr(events);
            json j;
            j["rate"] = s.rate;
            j["status"] = s.status == RateStatus::TotalLoss ? "total_loss" : "converged";
            j["iterations"] = s.iterations;
            return to_py(j);
        },
        py::arg("flows"),
        "Annualized internal rate of return of dated cash flows [(iso_date, amount), ...].");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv = {"p2pscore"};
            for (const auto& a : args) argv.push_back(a.c_str());
            return run_cli(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"),
        "Run a command-line invocation in-process; returns the exit code.");
}
