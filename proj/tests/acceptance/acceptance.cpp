// Acceptance runner: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails.
//
//   DYNAFIT_FULL_SCALE=1            also run the 2000-per-class chaos experiment
//   DYNAFIT_CHARTRAJ_MANIFEST=PATH   character-trajectory dataset (CSV manifest)

#include "../support/checks.hpp"

#include "dynafit/core.hpp"
#include "dynafit/data.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace dynafit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

enum class Status { Pass, Fail, Skip };

struct Line {
    Status status;
    std::string id;
    std::string text;
    std::vector<std::string> details;
};

std::vector<Line> g_lines;

void report(Status s, std::string id, std::string text, std::vector<std::string> details = {}) {
    const char* tag = s == Status::Pass ? "PASS" : s == Status::Fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << id << "  " << text << std::endl;
    for (const auto& d : details)
        std::cout << "      " << d << std::endl;
    g_lines.push_back({s, std::move(id), std::move(text), std::move(details)});
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

std::string summary(const checks::CheckResult& r) {
    std::ostringstream s;
    s << r.name << ": " << r.cases - r.failures << "/" << r.cases << " ok, worst " << fmt(r.worst);
    return s.str();
}

void criterion_oracle() {
    const auto t = Clock::now();
    const auto r = checks::oracle_equivalence(20261017, 250);
    const double secs = seconds_since(t);
    std::vector<std::string> details;
    if (!r.ok())
        details.push_back("first failure: " + r.first_failure);
    report(r.ok() && secs < 10.0 ? Status::Pass : Status::Fail, "C1",
           "oracle equivalence, 250 polynomial instances (" + std::to_string(r.cases) +
               " distances), worst relative error " + fmt(r.worst) + " (limit 1e-08), " +
               fmt(secs) + " s (limit 10 s)",
           details);
}

void criterion_logistic_identity() {
    const auto t = Clock::now();
    const auto r = checks::logistic_identity(17, 120);
    const double secs = seconds_since(t);
    std::vector<std::string> details{
        "|closed - truncated| minus the exact dropped tail sum_k (x_k y_k)^101 / (1 - x_k y_k): "
        "worst " + fmt(r.worst_secondary) + " relative to the kernel value"};
    if (!r.ok())
        details.push_back("first failure: " + r.first_failure);
    report(r.ok() && secs < 5.0 ? Status::Pass : Status::Fail, "C2",
           "logistic kernel identity, " + std::to_string(r.cases) + " pairs with entries in [0, 0.95]: " +
               std::to_string(r.cases - r.failures) + " within bounds, worst error/limit " +
               fmt(r.worst) + ", " + fmt(secs) + " s (limit 5 s)",
           details);
}

void criterion_zero_residual() {
    const auto r = checks::zero_training_residual(31, 200);
    std::vector<std::string> details;
    if (!r.ok())
        details.push_back("first failure: " + r.first_failure);
    report(r.ok() ? Status::Pass : Status::Fail, "C3",
           "zero training residual, " + std::to_string(r.cases) +
               " training sets (p <= 30, all kernel variants), worst max d / tr(K) " +
               fmt(r.worst) + " (limit 1e-06)",
           details);
}

struct ChaosResult {
    double accuracy = 0.0;
    double train_seconds = 0.0;
    double total_seconds = 0.0;
    Eigen::Index rank_regular = 0;
    Eigen::Index rank_chaotic = 0;
};

ChaosResult chaos_run(std::size_t train_per_class, std::size_t test_per_class) {
    const auto start = Clock::now();
    data::LogisticGenConfig cfg;
    cfg.length = 1000;
    cfg.seed = 1;
    const auto samples = data::gen_logistic_balanced(cfg, train_per_class + test_per_class);
    const std::size_t per = train_per_class + test_per_class;

    TrajectorySet train_regular, train_chaotic, test;
    std::vector<std::string> truth;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < per; ++i) {
            const auto& s = samples[c * per + i];
            if (i < train_per_class)
                (c == 0 ? train_regular : train_chaotic).push_back(s.trajectory);
            else {
                test.push_back(s.trajectory);
                truth.push_back(s.label);
            }
        }

    ChaosResult out;
    const auto t = Clock::now();
    DynafitClassifier clf;
    clf.add_class(data::kRegular, fit_class_model(LogisticMapKernel{}, std::move(train_regular)));
    clf.add_class(data::kChaotic, fit_class_model(LogisticMapKernel{}, std::move(train_chaotic)));
    out.train_seconds = seconds_since(t);
    out.rank_regular = clf.model(data::kRegular).rank();
    out.rank_chaotic = clf.model(data::kChaotic).rank();

    const auto preds = classify(clf, test);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        correct += preds[i].label == truth[i];
    out.accuracy = double(correct) / double(preds.size());
    out.total_seconds = seconds_since(start);
    return out;
}

void criterion_chaos() {
    const ChaosResult r = chaos_run(500, 500);
    std::vector<std::string> details{"ranks: regular " + std::to_string(r.rank_regular) +
                                     ", chaotic " + std::to_string(r.rank_chaotic) +
                                     "; end-to-end " + fmt(r.total_seconds) + " s"};
    if (std::getenv("DYNAFIT_FULL_SCALE")) {
        const ChaosResult big = chaos_run(2000, 500);
        details.push_back("full scale (2000/class train, 500/class test): accuracy " +
                          fmt(big.accuracy, 5) + " (band >= 0.985: " +
                          (big.accuracy >= 0.985 ? "met" : "not met") + "), training " +
                          fmt(big.train_seconds) + " s");
    } else {
        details.push_back("full-scale run not requested (set DYNAFIT_FULL_SCALE=1)");
    }
    const bool ok = r.accuracy >= 0.95 && r.train_seconds < 60.0;
    report(ok ? Status::Pass : Status::Fail, "C4",
           "chaos detection, 500+500 per class, N=1000, logistic kernel: accuracy " +
               fmt(r.accuracy, 5) + " (limit >= 0.95), training " + fmt(r.train_seconds) +
               " s (limit 60 s)",
           details);
}

double char_accuracy(const data::LabeledSet& full, Eigen::Index prefix, int trials) {
    data::LabeledSet set;
    set.labels = full.labels;
    for (const auto& t : full.trajectories)
        set.trajectories.push_back(data::truncate_prefix(t, prefix));
    double sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const auto split = data::split(set, 0.1, static_cast<std::uint64_t>(trial));
        DynafitClassifier clf;
        for (const auto& label : data::distinct_labels(split.train.labels))
            clf.add_class(label, fit_class_model(PolynomialKernel{2}, data::select(split.train, label)));
        const auto preds = classify(clf, split.test.trajectories);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < preds.size(); ++i)
            correct += preds[i].label == split.test.labels[i];
        sum += double(correct) / double(preds.size());
    }
    return sum / trials;
}

void criterion_characters() {
    const char* manifest = std::getenv("DYNAFIT_CHARTRAJ_MANIFEST");
    if (!manifest || !*manifest) {
        report(Status::Skip, "C5",
               "character trajectories: dataset not provided (set DYNAFIT_CHARTRAJ_MANIFEST)");
        return;
    }
    try {
        const data::LabeledSet full = data::load_dataset(manifest);
        std::vector<double> acc;
        std::string series;
        for (Eigen::Index prefix : {10, 20, 50, 100}) {
            acc.push_back(char_accuracy(full, prefix, 10));
            series += (series.empty() ? "" : ", ") + std::string("N'=") + std::to_string(prefix) +
                      ": " + fmt(acc.back(), 4);
        }
        bool increasing = true;
        for (std::size_t i = 1; i < acc.size(); ++i)
            increasing = increasing && acc[i] > acc[i - 1];
        const bool in_band = acc.back() >= 0.92 && acc.back() <= 0.96;
        report(in_band && increasing ? Status::Pass : Status::Fail, "C5",
               "character trajectories, poly d=2, 10% training, 10 trials: mean accuracy " +
                   fmt(acc.back(), 4) + " at N'=100 (band [0.92, 0.96]), strictly increasing: " +
                   (increasing ? "yes" : "no"),
               {series});
    } catch (const std::exception& e) {
        report(Status::Fail, "C5", std::string("character trajectories: ") + e.what());
    }
}

void criterion_properties() {
    constexpr int n = 120;
    const std::vector<checks::CheckResult> results{
        checks::gram_symmetric_psd(601, n),     checks::distance_nonnegativity(602, n),
        checks::permutation_equivariance(603, n), checks::monotone_rank(604, n),
        checks::save_load_bit_exact(605, n),    checks::deterministic_generation(606, n),
    };
    bool ok = true;
    std::vector<std::string> details;
    for (const auto& r : results) {
        ok = ok && r.ok() && r.cases >= 100;
        details.push_back(summary(r) + (r.ok() ? "" : "; first failure: " + r.first_failure));
    }
    report(ok ? Status::Pass : Status::Fail, "C6",
           "property suite, " + std::to_string(results.size()) + " properties x " +
               std::to_string(n) + " randomized cases",
           details);
}

}  // namespace

int main() {
    const auto start = Clock::now();
    const std::vector<void (*)()> criteria{criterion_oracle,   criterion_logistic_identity,
                                           criterion_zero_residual, criterion_chaos,
                                           criterion_characters, criterion_properties};
    for (auto* c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            report(Status::Fail, "C" + std::to_string(g_lines.size() + 1),
                   std::string("aborted: ") + e.what());
        }
    }
    int pass = 0, fail = 0, skip = 0;
    for (const auto& l : g_lines)
        (l.status == Status::Pass ? pass : l.status == Status::Fail ? fail : skip)++;
    std::cout << "acceptance: " << pass << " passed, " << fail << " failed, " << skip
              << " skipped in " << fmt(seconds_since(start)) << " s" << std::endl;
    return fail ? 1 : 0;
}
