#include "commands.hpp"

#include "dynafit/error.hpp"
#include "dynafit/model_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace dynafit::cli {
namespace {

using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(6) << v;
    return s.str();
}

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
};

// Sample standard deviation; zero for a single value.
Stats summarize(const std::vector<double>& v) {
    Stats s;
    if (v.empty())
        return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v)
            ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

data::LabeledSet load_labeled(const std::string& manifest, std::optional<Eigen::Index> prefix_len) {
    data::LabeledSet set = data::load_dataset(manifest);
    if (prefix_len) {
        for (auto& t : set.trajectories) {
            if (*prefix_len > t.length())
                throw UsageError("--prefix-len " + std::to_string(*prefix_len) +
                                 " exceeds the trajectory length " + std::to_string(t.length()));
            t = data::truncate_prefix(t, *prefix_len);
        }
    }
    return set;
}

void write_report(const std::string& path, const json& report) {
    if (path.empty())
        return;
    std::ofstream f(path);
    if (!f)
        throw Error("cannot write report " + path);
    f << report.dump(2) << '\n';
}

struct FittedClassifier {
    DynafitClassifier classifier;
    std::vector<double> mean_train_distance;
};

// One metric per label, in order of first appearance in the training set.
FittedClassifier fit_classifier(const data::LabeledSet& train, const KernelSpec& spec,
                                double eig_threshold, bool with_train_distances) {
    FittedClassifier out;
    for (const auto& label : data::distinct_labels(train.labels)) {
        try {
            ClassModel m = fit_class_model(spec, data::select(train, label), eig_threshold);
            if (with_train_distances) {
                const auto d = train_distances(m);
                out.mean_train_distance.push_back(std::accumulate(d.begin(), d.end(), 0.0) /
                                                  static_cast<double>(d.size()));
            }
            out.classifier.add_class(label, std::move(m));
        } catch (const Error& e) {
            throw Error("class '" + label + "': " + e.what());
        }
    }
    return out;
}

}  // namespace

std::optional<double> recommended_gaussian_width(Eigen::Index prefix_len) {
    static const std::map<Eigen::Index, double> table{{10, 2.9}, {20, 4.2}, {50, 7.5}, {100, 15.0}};
    const auto it = table.find(prefix_len);
    if (it == table.end())
        return std::nullopt;
    return it->second;
}

KernelSpec make_kernel(const KernelOptions& opts, std::optional<Eigen::Index> prefix_len) {
    KernelSpec spec;
    if (opts.name == "poly") {
        spec = PolynomialKernel{opts.degree};
    } else if (opts.name == "gauss") {
        std::optional<double> width = opts.sigma;
        if (!width && prefix_len)
            width = recommended_gaussian_width(*prefix_len);
        if (!width)
            throw UsageError("--kernel gauss needs --sigma (defaults exist only for "
                             "--prefix-len 10, 20, 50 or 100)");
        spec = GaussianKernel{*width};
    } else if (opts.name == "logistic") {
        spec = LogisticMapKernel{};
    } else {
        throw UsageError("unknown kernel '" + opts.name + "'; valid kernels: poly, gauss, logistic");
    }
    try {
        validate(spec);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

int cmd_gen(const GenOptions& opts, std::ostream& out) {
    if (opts.per_class < 1)
        throw UsageError("--per-class must be at least 1");
    if (opts.out.empty())
        throw UsageError("gen needs --out DIR");
    data::LogisticGenConfig cfg;
    cfg.r_range = {opts.r_min, opts.r_max};
    cfg.length = opts.length;
    cfg.burn_in = opts.burn_in;
    cfg.lyapunov_iters = opts.lyapunov_iters;
    cfg.lyapunov_margin = opts.margin;
    cfg.seed = opts.seed;
    try {
        data::validate(cfg);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }

    const auto samples = data::gen_logistic_balanced(cfg, opts.per_class);
    const fs::path dir(opts.out);
    fs::create_directories(dir);

    data::DatasetManifest manifest;
    manifest.n = 1;
    manifest.N = static_cast<Eigen::Index>(opts.length);
    manifest.meta = {
        {"generator", "logistic"},
        {"seed", std::to_string(opts.seed)},
        {"r_min", shortest(opts.r_min)},
        {"r_max", shortest(opts.r_max)},
        {"burn_in", std::to_string(opts.burn_in)},
        {"lyapunov_iters", std::to_string(opts.lyapunov_iters)},
        {"lyapunov_margin", shortest(opts.margin)},
        {"lyapunov_file", "lyapunov.csv"},
    };
    std::ofstream lyap(dir / "lyapunov.csv");
    if (!lyap)
        throw Error("cannot write " + (dir / "lyapunov.csv").string());
    lyap << "path,label,r,x0,lyapunov\n";

    std::map<std::string, std::vector<double>> exponents;
    std::map<std::string, std::size_t> counters;
    for (const auto& s : samples) {
        std::ostringstream name;
        name << s.label << '_' << std::setw(5) << std::setfill('0') << counters[s.label]++ << ".csv";
        data::write_trajectory_csv(dir / name.str(), s.trajectory);
        manifest.files.push_back({name.str(), s.label});
        lyap << name.str() << ',' << s.label << ',' << shortest(s.r) << ',' << shortest(s.x0) << ','
             << shortest(s.lyapunov) << '\n';
        exponents[s.label].push_back(s.lyapunov);
    }
    data::write_manifest(dir / "manifest.json", manifest);

    out << "wrote " << samples.size() << " trajectories (N=" << opts.length << ") to " << dir.string()
        << '\n';
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& [label, v] : exponents) {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        out << "  " << std::left << std::setw(8) << label << std::right << " count=" << v.size()
            << " lyapunov min=" << fixed(*mn, 4) << " mean=" << fixed(summarize(v).mean, 4)
            << " max=" << fixed(*mx, 4) << '\n';
        lo = first ? *mn : std::min(lo, *mn);
        hi = first ? *mx : std::max(hi, *mx);
        first = false;
    }
    constexpr int kBins = 10;
    const double width = (hi - lo) / kBins;
    out << "lyapunov histogram:\n";
    for (int b = 0; b < kBins; ++b) {
        const double a = lo + b * width;
        const double z = b + 1 == kBins ? hi : a + width;
        std::size_t count = 0;
        for (const auto& [label, v] : exponents)
            count += static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) {
                return x >= a && (x < z || (b + 1 == kBins && x <= z));
            }));
        out << "  [" << std::setw(8) << fixed(a, 4) << ", " << std::setw(8) << fixed(z, 4)
            << (b + 1 == kBins ? "]" : ")") << ' ' << count << '\n';
    }
    return kExitOk;
}

int cmd_train(const TrainOptions& opts, std::ostream& out) {
    if (opts.out.empty())
        throw UsageError("train needs --out MODEL");
    const KernelSpec spec = make_kernel(opts.kernel, opts.prefix_len);
    const data::LabeledSet set = load_labeled(opts.manifest, opts.prefix_len);

    if (opts.one_class) {
        data::LabeledSet normal;
        normal.trajectories = data::select(set, *opts.one_class);
        if (normal.trajectories.empty())
            throw UsageError("label '" + *opts.one_class + "' does not occur in the manifest");
        normal.labels.assign(normal.size(), *opts.one_class);
        const data::Split parts = data::split(normal, opts.train_fraction, opts.seed);
        ClassModel m = fit_class_model(spec, parts.train.trajectories, opts.eig_threshold);
        const auto d = train_distances(m);
        const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
        OneClassDetector det = fit_threshold(std::move(m), parts.test.trajectories, opts.quantile);
        save_model(fs::path(opts.out), det);
        out << "one-class model for '" << *opts.one_class << "' kernel=" << describe(spec) << '\n'
            << "  p=" << det.model.size() << " rank=" << det.model.rank()
            << " mean_train_distance=" << sci(mean)
            << " trace=" << sci(det.model.gram_trace()) << '\n'
            << "  calibration=" << parts.test.size() << " quantile=" << opts.quantile
            << " threshold=" << sci(det.threshold) << '\n'
            << "wrote " << opts.out << '\n';
        return kExitOk;
    }

    const FittedClassifier fitted = fit_classifier(set, spec, opts.eig_threshold, true);
    save_model(fs::path(opts.out), fitted.classifier);
    out << "classifier kernel=" << describe(spec) << " classes=" << fitted.classifier.size()
        << '\n';
    for (std::size_t i = 0; i < fitted.classifier.size(); ++i) {
        const auto& c = fitted.classifier.classes()[i];
        out << "  " << c.label << ": p=" << c.model.size() << " rank=" << c.model.rank()
            << " mean_train_distance=" << sci(fitted.mean_train_distance[i])
            << " trace=" << sci(c.model.gram_trace()) << '\n';
    }
    out << "wrote " << opts.out << '\n';
    return kExitOk;
}

namespace {

struct Tally {
    std::vector<std::string> classes;      // model order, the predicted columns
    std::vector<std::string> true_labels;  // classes followed by unknown test labels
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<std::vector<double>> distance_sums;
    std::vector<std::size_t> row_counts;

    explicit Tally(std::vector<std::string> cls) : classes(cls), true_labels(std::move(cls)) {
        for (std::size_t i = 0; i < true_labels.size(); ++i)
            add_row();
    }

    void add_row() {
        confusion.emplace_back(classes.size(), 0);
        distance_sums.emplace_back(classes.size(), 0.0);
        row_counts.push_back(0);
    }

    std::size_t row(const std::string& label) {
        const auto it = std::find(true_labels.begin(), true_labels.end(), label);
        if (it != true_labels.end())
            return static_cast<std::size_t>(it - true_labels.begin());
        true_labels.push_back(label);
        add_row();
        return true_labels.size() - 1;
    }

    // Returns whether the prediction is correct.
    bool add(const std::string& truth, const Prediction& p) {
        const std::size_t r = row(truth);
        ++confusion[r][p.class_index];
        ++row_counts[r];
        for (std::size_t j = 0; j < classes.size(); ++j)
            distance_sums[r][j] += p.distances[j];
        return p.label == truth;
    }

    std::vector<std::string> unknown() const {
        return {true_labels.begin() + static_cast<std::ptrdiff_t>(classes.size()), true_labels.end()};
    }
};

void print_matrix_header(std::ostream& out, const std::vector<std::string>& cols) {
    out << "  " << std::left << std::setw(14) << "true\\class" << std::right;
    for (const auto& c : cols)
        out << ' ' << std::setw(14) << c;
    out << '\n';
}

int eval_one_class(const EvalOptions& opts, const OneClassDetector& det, std::ostream& out) {
    if (!opts.normal_label)
        throw UsageError("evaluating a one-class model needs --normal-label");
    const data::LabeledSet set = load_labeled(opts.manifest, opts.prefix_len);
    const auto start = Clock::now();
    const auto detections = detect(det, set.trajectories);
    const double infer_ms = elapsed_ms(start);

    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const bool normal = set.labels[i] == *opts.normal_label;
        if (detections[i].anomalous)
            (normal ? fp : tp)++;
        else
            (normal ? tn : fn)++;
    }
    const auto ratio = [](std::size_t a, std::size_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    const double accuracy = ratio(tp + tn, set.size());
    const double tpr = ratio(tp, tp + fn);
    const double fpr = ratio(fp, fp + tn);

    out << "eval one-class: kernel=" << describe(det.model.kernel())
        << " normal=" << *opts.normal_label << " threshold=" << sci(det.threshold)
        << " test=" << set.size() << '\n'
        << "accuracy: " << fixed(accuracy) << '\n'
        << "true_positive_rate: " << fixed(tpr) << '\n'
        << "false_positive_rate: " << fixed(fpr) << '\n'
        << "counts: tp=" << tp << " fp=" << fp << " tn=" << tn << " fn=" << fn << '\n'
        << "infer_ms: " << fixed(infer_ms, 3) << '\n';

    json report;
    report["schema"] = kReportSchema;
    report["version"] = kReportVersion;
    report["command"] = "eval";
    report["mode"] = "one-class";
    report["kernel"] = describe(det.model.kernel());
    report["normal_label"] = *opts.normal_label;
    report["threshold"] = det.threshold;
    report["test_count"] = set.size();
    report["accuracy"] = accuracy;
    report["true_positive_rate"] = tpr;
    report["false_positive_rate"] = fpr;
    report["counts"] = {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}};
    report["timings"] = {{"infer_ms", infer_ms}};
    write_report(opts.out, report);
    return kExitOk;
}

}  // namespace

int cmd_eval(const EvalOptions& opts, std::ostream& out) {
    if (opts.trials < 1)
        throw UsageError("--trials must be at least 1");

    struct Trial {
        std::optional<std::uint64_t> seed;
        double accuracy = 0.0;
        double train_ms = 0.0;
        double infer_ms = 0.0;
        std::vector<Eigen::Index> ranks;
        std::size_t test_count = 0;
    };
    std::vector<Trial> trials;
    std::optional<Tally> tally;
    std::string kernel_name;

    if (opts.model) {
        ModelFile file = load_model(fs::path(*opts.model));
        if (const auto* det = std::get_if<OneClassDetector>(&file))
            return eval_one_class(opts, *det, out);
        const auto& classifier = std::get<DynafitClassifier>(file);
        kernel_name = describe(classifier.classes().front().model.kernel());
        const data::LabeledSet test = load_labeled(opts.manifest, opts.prefix_len);
        tally.emplace(classifier.labels());
        Trial t;
        const auto start = Clock::now();
        const auto preds = classify(classifier, test.trajectories);
        t.infer_ms = elapsed_ms(start);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test.size(); ++i)
            correct += tally->add(test.labels[i], preds[i]);
        t.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
        t.test_count = test.size();
        for (const auto& c : classifier.classes())
            t.ranks.push_back(c.model.rank());
        trials.push_back(std::move(t));
    } else {
        const KernelSpec spec = make_kernel(opts.kernel, opts.prefix_len);
        kernel_name = describe(spec);
        const data::LabeledSet set = load_labeled(opts.manifest, opts.prefix_len);
        for (int i = 0; i < opts.trials; ++i) {
            Trial t;
            t.seed = opts.seed + static_cast<std::uint64_t>(i);
            const data::Split parts = data::split(set, opts.train_fraction, *t.seed);
            auto start = Clock::now();
            const FittedClassifier fitted =
                fit_classifier(parts.train, spec, opts.eig_threshold, false);
            t.train_ms = elapsed_ms(start);
            if (!tally)
                tally.emplace(fitted.classifier.labels());
            start = Clock::now();
            const auto preds = classify(fitted.classifier, parts.test.trajectories);
            t.infer_ms = elapsed_ms(start);
            std::size_t correct = 0;
            for (std::size_t j = 0; j < parts.test.size(); ++j)
                correct += tally->add(parts.test.labels[j], preds[j]);
            t.accuracy = static_cast<double>(correct) / static_cast<double>(parts.test.size());
            t.test_count = parts.test.size();
            for (const auto& c : fitted.classifier.classes())
                t.ranks.push_back(c.model.rank());
            trials.push_back(std::move(t));
        }
    }

    std::vector<double> acc, train_ms, infer_ms;
    for (const auto& t : trials) {
        acc.push_back(t.accuracy);
        train_ms.push_back(t.train_ms);
        infer_ms.push_back(t.infer_ms);
    }
    const Stats acc_stats = summarize(acc);
    const Stats train_stats = summarize(train_ms);
    const Stats infer_stats = summarize(infer_ms);

    out << "eval " << (opts.model ? "model" : "resplit") << ": kernel=" << kernel_name
        << " classes=" << tally->classes.size() << " trials=" << trials.size();
    if (!opts.model)
        out << " seed=" << opts.seed << " train_fraction=" << opts.train_fraction;
    out << '\n';
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const Trial& t = trials[i];
        out << "trial " << i << ":";
        if (t.seed)
            out << " seed=" << *t.seed;
        out << " test=" << t.test_count << " accuracy=" << fixed(t.accuracy)
            << " train_ms=" << fixed(t.train_ms, 3) << " infer_ms=" << fixed(t.infer_ms, 3)
            << " ranks=";
        for (std::size_t j = 0; j < t.ranks.size(); ++j)
            out << (j ? "," : "") << t.ranks[j];
        out << '\n';
    }
    out << "accuracy: " << fixed(acc_stats.mean) << " +- " << fixed(acc_stats.sd) << '\n';
    out << "confusion (summed over trials):\n";
    print_matrix_header(out, tally->classes);
    for (std::size_t r = 0; r < tally->true_labels.size(); ++r) {
        out << "  " << std::left << std::setw(14) << tally->true_labels[r] << std::right;
        for (const auto c : tally->confusion[r])
            out << ' ' << std::setw(14) << c;
        out << '\n';
    }
    out << "mean distances:\n";
    print_matrix_header(out, tally->classes);
    std::vector<std::vector<double>> mean_distances(tally->true_labels.size());
    for (std::size_t r = 0; r < tally->true_labels.size(); ++r) {
        out << "  " << std::left << std::setw(14) << tally->true_labels[r] << std::right;
        for (std::size_t j = 0; j < tally->classes.size(); ++j) {
            const double m = tally->row_counts[r] == 0
                                 ? 0.0
                                 : tally->distance_sums[r][j] /
                                       static_cast<double>(tally->row_counts[r]);
            mean_distances[r].push_back(m);
            out << ' ' << std::setw(14) << sci(m);
        }
        out << '\n';
    }
    const auto unknown = tally->unknown();
    if (!unknown.empty()) {
        out << "labels absent from the model (counted as errors):";
        for (const auto& u : unknown)
            out << ' ' << u;
        out << '\n';
    }
    out << "timings: train_ms=" << fixed(train_stats.mean, 3) << " +- " << fixed(train_stats.sd, 3)
        << " infer_ms=" << fixed(infer_stats.mean, 3) << " +- " << fixed(infer_stats.sd, 3) << '\n';

    json report;
    report["schema"] = kReportSchema;
    report["version"] = kReportVersion;
    report["command"] = "eval";
    report["mode"] = opts.model ? "model" : "resplit";
    report["kernel"] = kernel_name;
    report["eig_threshold"] = opts.eig_threshold;
    if (opts.prefix_len)
        report["prefix_len"] = *opts.prefix_len;
    if (!opts.model) {
        report["seed"] = opts.seed;
        report["train_fraction"] = opts.train_fraction;
    }
    report["classes"] = tally->classes;
    report["true_labels"] = tally->true_labels;
    report["unknown_labels"] = unknown;
    report["trials"] = json::array();
    for (const auto& t : trials) {
        json jt;
        jt["seed"] = t.seed ? json(*t.seed) : json(nullptr);
        jt["test_count"] = t.test_count;
        jt["accuracy"] = t.accuracy;
        jt["train_ms"] = t.train_ms;
        jt["infer_ms"] = t.infer_ms;
        jt["ranks"] = t.ranks;
        report["trials"].push_back(jt);
    }
    report["accuracy_mean"] = acc_stats.mean;
    report["accuracy_sd"] = acc_stats.sd;
    report["confusion"] = tally->confusion;
    report["mean_distances"] = mean_distances;
    report["timings"] = {{"train_ms_mean", train_stats.mean},
                         {"train_ms_sd", train_stats.sd},
                         {"infer_ms_mean", infer_stats.mean},
                         {"infer_ms_sd", infer_stats.sd}};
    write_report(opts.out, report);
    return kExitOk;
}

int cmd_predict(const PredictOptions& opts, std::ostream& out) {
    const ModelFile file = load_model(fs::path(opts.model));
    const data::DatasetManifest manifest = data::read_manifest(opts.manifest);
    const data::LabeledSet set = load_labeled(opts.manifest, opts.prefix_len);

    json report;
    report["schema"] = kReportSchema;
    report["version"] = kReportVersion;
    report["command"] = "predict";
    report["predictions"] = json::array();

    if (const auto* det = std::get_if<OneClassDetector>(&file)) {
        const auto detections = detect(*det, set.trajectories);
        out << "path,status,distance\n";
        for (std::size_t i = 0; i < detections.size(); ++i) {
            const char* status = detections[i].anomalous ? "anomalous" : "normal";
            out << manifest.files[i].path << ',' << status << ',' << shortest(detections[i].distance)
                << '\n';
            report["predictions"].push_back({{"path", manifest.files[i].path},
                                             {"status", status},
                                             {"distance", detections[i].distance}});
        }
    } else {
        const auto& classifier = std::get<DynafitClassifier>(file);
        const auto preds = classify(classifier, set.trajectories);
        out << "path,predicted";
        for (const auto& l : classifier.labels())
            out << ",d_" << l;
        out << '\n';
        for (std::size_t i = 0; i < preds.size(); ++i) {
            out << manifest.files[i].path << ',' << preds[i].label;
            for (double d : preds[i].distances)
                out << ',' << shortest(d);
            out << '\n';
            json distances = json::object();
            for (std::size_t j = 0; j < classifier.size(); ++j)
                distances[classifier.classes()[j].label] = preds[i].distances[j];
            report["predictions"].push_back({{"path", manifest.files[i].path},
                                             {"predicted", preds[i].label},
                                             {"distances", distances}});
        }
    }
    write_report(opts.out, report);
    return kExitOk;
}

int cmd_bench(const BenchOptions& opts, std::ostream& out) {
    if (opts.sizes.empty())
        throw UsageError("--sizes needs at least one value");
    const KernelSpec spec = make_kernel(opts.kernel, static_cast<Eigen::Index>(opts.length));
    data::LogisticGenConfig cfg;
    cfg.length = opts.length;
    cfg.seed = opts.seed;
    data::LogisticGenConfig query_cfg = cfg;
    query_cfg.seed = opts.seed + 1;
    TrajectorySet queries;
    for (auto& s : data::gen_logistic(query_cfg, std::max<std::size_t>(opts.queries, 1)))
        queries.push_back(std::move(s.trajectory));

    json report;
    report["schema"] = kReportSchema;
    report["version"] = kReportVersion;
    report["command"] = "bench";
    report["kernel"] = describe(spec);
    report["rows"] = json::array();

    out << "bench kernel=" << describe(spec) << " N=" << opts.length
        << " queries=" << queries.size() << '\n';
    out << std::setw(8) << "p" << std::setw(8) << "rank" << std::setw(14) << "gram_ms"
        << std::setw(14) << "eig_ms" << std::setw(14) << "infer_ms" << '\n';
    for (const std::size_t p : opts.sizes) {
        if (p < 1)
            throw UsageError("--sizes values must be positive");
        TrajectorySet train;
        for (auto& s : data::gen_logistic(cfg, p))
            train.push_back(std::move(s.trajectory));
        auto start = Clock::now();
        const Eigen::MatrixXd K = gram(spec, train);
        const double gram_ms = elapsed_ms(start);
        start = Clock::now();
        const ClassModel m = fit_from_gram(spec, train, K, opts.eig_threshold);
        const double eig_ms = elapsed_ms(start);
        start = Clock::now();
        [[maybe_unused]] const auto d = test_distances(m, queries);
        const double infer_ms = elapsed_ms(start);
        out << std::setw(8) << p << std::setw(8) << m.rank() << std::setw(14) << fixed(gram_ms, 3)
            << std::setw(14) << fixed(eig_ms, 3) << std::setw(14) << fixed(infer_ms, 3) << '\n';
        report["rows"].push_back({{"p", p},
                                  {"N", opts.length},
                                  {"queries", queries.size()},
                                  {"rank", m.rank()},
                                  {"gram_ms", gram_ms},
                                  {"eig_ms", eig_ms},
                                  {"infer_ms", infer_ms}});
    }
    write_report(opts.out, report);
    return kExitOk;
}

}  // namespace dynafit::cli
