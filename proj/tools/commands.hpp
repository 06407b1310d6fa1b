#pragma once

#include "dynafit/core.hpp"
#include "dynafit/data.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynafit::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitRuntimeError = 1,
    kExitUsageError = 2,
};

/// Bad flag combination detected after parsing; maps to kExitUsageError.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kReportSchema = "dynafit-report";
inline constexpr int kReportVersion = 1;

struct KernelOptions {
    std::string name = "logistic";
    int degree = 2;
    std::optional<double> sigma;
};

/// Gaussian width recommended for a prefix length, if one is tabulated
/// (2.9, 4.2, 7.5, 15 for 10, 20, 50, 100 samples).
std::optional<double> recommended_gaussian_width(Eigen::Index prefix_len);

KernelSpec make_kernel(const KernelOptions& opts, std::optional<Eigen::Index> prefix_len);

struct GenOptions {
    std::size_t per_class = 0;
    std::size_t length = 1000;
    std::size_t burn_in = 1000;
    std::size_t lyapunov_iters = 10000;
    double margin = 0.01;
    double r_min = 3.5;
    double r_max = 4.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainOptions {
    std::string manifest;
    KernelOptions kernel;
    double eig_threshold = kDefaultEigenThreshold;
    std::optional<Eigen::Index> prefix_len;
    std::string out;
    std::optional<std::string> one_class;
    double quantile = kDefaultQuantile;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

struct EvalOptions {
    std::string manifest;
    std::optional<std::string> model;
    KernelOptions kernel;
    double eig_threshold = kDefaultEigenThreshold;
    std::optional<Eigen::Index> prefix_len;
    double train_fraction = 0.1;
    std::uint64_t seed = 0;
    int trials = 1;
    std::optional<std::string> normal_label;
    std::string out;
};

struct PredictOptions {
    std::string manifest;
    std::string model;
    std::optional<Eigen::Index> prefix_len;
    std::string out;
};

struct BenchOptions {
    std::vector<std::size_t> sizes{100, 200};
    std::size_t length = 100;
    std::size_t queries = 100;
    KernelOptions kernel;
    double eig_threshold = kDefaultEigenThreshold;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenOptions& opts, std::ostream& out);
int cmd_train(const TrainOptions& opts, std::ostream& out);
int cmd_eval(const EvalOptions& opts, std::ostream& out);
int cmd_predict(const PredictOptions& opts, std::ostream& out);
int cmd_bench(const BenchOptions& opts, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dynafit::cli
