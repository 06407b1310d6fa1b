#pragma once

#include "dynafit/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dynafit::data {

inline constexpr const char* kRegular = "regular";
inline constexpr const char* kChaotic = "chaotic";

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct LogisticGenConfig {
    Interval r_range{3.5, 4.0};
    std::size_t length = 1000;
    std::size_t burn_in = 1000;
    Interval x0_range{0.1, 0.9};
    std::size_t lyapunov_iters = 10000;
    double lyapunov_margin = 0.01;
    std::uint64_t seed = 0;
};

/// Throws InvalidArgument unless r_range within (0, 4], x0_range within (0, 1),
/// length >= 1 and lyapunov_iters >= 1.
void validate(const LogisticGenConfig& cfg);

struct LogisticSample {
    Trajectory trajectory;
    std::string label;
    double lyapunov = 0.0;
    double r = 0.0;
    double x0 = 0.0;
};

/// Iterates x <- r x (1 - x) `steps` times starting at x0 and returns the
/// visited states (x0 excluded).
std::vector<double> logistic_orbit(double r, double x0, std::size_t steps);

/// (1/M) sum ln|r (1 - 2 x_k)| over the M = `iters` states starting at `x`.
double logistic_lyapunov(double r, double x, std::size_t iters);

/// Seed for draw `attempt` of sample `index`; a pure function of its inputs,
/// so samples can be produced in any order.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt);

/// Single draw for one sample index; the label is empty when rejected
/// (|lambda| within the margin, a zero derivative, or a state outside the
/// logistic-kernel domain).
LogisticSample draw_logistic(const LogisticGenConfig& cfg, std::uint64_t index,
                             std::uint64_t attempt);

/// `count` labeled samples. Rejected draws are redrawn; throws DomainError when
/// rejections exceed 1000 * count.
std::vector<LogisticSample> gen_logistic(const LogisticGenConfig& cfg, std::size_t count);

/// `per_class` regular followed by `per_class` chaotic samples, taken from the
/// same index stream as gen_logistic (surplus of a full class is skipped).
std::vector<LogisticSample> gen_logistic_balanced(const LogisticGenConfig& cfg,
                                                  std::size_t per_class);

struct LabeledSet {
    TrajectorySet trajectories;
    std::vector<std::string> labels;

    std::size_t size() const { return trajectories.size(); }
};

struct ManifestEntry {
    std::string path;
    std::string label;
};

struct DatasetManifest {
    std::vector<ManifestEntry> files;
    Eigen::Index n = 0;
    Eigen::Index N = 0;
    std::map<std::string, std::string> meta;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Rows are time steps, columns are state components. A non-numeric first row
/// is treated as a header.
Trajectory read_trajectory_csv(const std::filesystem::path& path);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);

/// Loads every file of a manifest; relative paths resolve against the
/// manifest's directory. Throws DataError on missing files, parse failures,
/// shape mismatches or an empty dataset.
LabeledSet load_dataset(const std::filesystem::path& manifest_path);

/// First `length` time steps. Throws InvalidArgument for 0 or length > N.
Trajectory truncate_prefix(const Trajectory& t, Eigen::Index length);

struct Split {
    LabeledSet train;
    LabeledSet test;
};

/// Stratified random split: each label contributes max(1, floor(f * count))
/// samples to the training side. Throws InvalidArgument when a label would
/// leave the test side empty or f is outside (0, 1).
Split split(const LabeledSet& set, double train_fraction, std::uint64_t seed);

/// Distinct labels in order of first appearance.
std::vector<std::string> distinct_labels(const std::vector<std::string>& labels);

/// Trajectories carrying `label`, in input order.
TrajectorySet select(const LabeledSet& set, const std::string& label);

}  // namespace dynafit::data
