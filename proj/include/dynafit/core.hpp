#pragma once

#include "dynafit/kernels.hpp"
#include "dynafit/trajectory.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dynafit {

inline constexpr double kDefaultEigenThreshold = 1e-10;
inline constexpr double kDefaultQuantile = 0.99;

/// Relative cutoff actually applied to Gram eigenvalues for a training set of
/// size p. A requested threshold of 0 still drops eigenvalues that are
/// indistinguishable from round-off (below 64 * p * epsilon of the largest).
double effective_eigen_threshold(double eigen_threshold_rel, std::size_t p);

/// Learned metric for one dynamical class.
///
/// The training Gram matrix K is factored as V diag(sigma^2) V^T over the
/// retained spectrum and H = V diag(sigma^-2) V^T. The squared feature-space
/// residual of a trajectory Y off the span of the training lifts is
///
///     d(Y) = k(Y, Y) - k_Y^T H k_Y,   k_Y = (k(Y, X_1), ..., k(Y, X_p)).
///
/// The eigendecomposition and all residual sums run over the training set in
/// a canonical order (lexicographic on the flattened trajectories), so a
/// permuted training set yields bit-identical distances. V and H are exposed
/// in the caller's order.
///
/// Instances are immutable once built.
class ClassModel {
public:
    /// Assembles a model from stored parts (used by the loader). Validates the
    /// invariants on V, sigma and H and throws InvalidArgument when they fail.
    static ClassModel from_parts(KernelSpec kernel, TrajectorySet train_set, Eigen::MatrixXd V,
                                 Eigen::VectorXd sigma, Eigen::MatrixXd H,
                                 double eigen_threshold_rel);

    const KernelSpec& kernel() const { return kernel_; }
    const TrajectorySet& train_set() const { return train_set_; }
    const Eigen::MatrixXd& V() const { return V_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    const Eigen::MatrixXd& H() const { return H_; }
    Eigen::Index rank() const { return sigma_.size(); }
    std::size_t size() const { return train_set_.size(); }
    double eigen_threshold_rel() const { return eigen_threshold_rel_; }
    /// tr(K_train), the scale used by the clamp band and threshold floor.
    double gram_trace() const { return gram_trace_; }
    /// Eigenvalues of K_train dropped by the threshold, descending.
    const Eigen::VectorXd& discarded_eigenvalues() const { return discarded_; }

    /// V diag(1/sigma); distances are computed as k(Y,Y) - ||k_Y^T W||^2.
    const Eigen::MatrixXd& whitening() const { return W_; }

    /// Unclamped k(Y,Y) - k_Y^T H k_Y for each row of `cross` (queries x p,
    /// columns in train_set order) with `self_kernel` holding k(Y,Y).
    Eigen::VectorXd residuals(const Eigen::VectorXd& self_kernel, const Eigen::MatrixXd& cross) const;

private:
    friend ClassModel fit_from_gram(const KernelSpec&, TrajectorySet, const Eigen::MatrixXd&,
                                    double);

    ClassModel() = default;
    void finish();

    KernelSpec kernel_;
    TrajectorySet train_set_;
    Eigen::MatrixXd V_;
    Eigen::VectorXd sigma_;
    Eigen::MatrixXd H_;
    Eigen::MatrixXd W_;
    Eigen::VectorXd discarded_;
    /// order_[c] is the input index of the c-th trajectory in canonical order.
    std::vector<Eigen::Index> order_;
    Eigen::MatrixXd W_canonical_;
    double eigen_threshold_rel_ = kDefaultEigenThreshold;
    double gram_trace_ = 0.0;
};

/// Eigendecomposes the training Gram matrix and keeps eigenpairs above
/// effective_eigen_threshold(eigen_threshold_rel, p) * lambda_max.
///
/// Throws InvalidArgument for an empty set or a threshold outside [0, 1),
/// NumericError when the Gram matrix is indefinite beyond -1e-8 * lambda_max
/// or has no positive eigenvalue.
ClassModel fit_class_model(const KernelSpec& spec, TrajectorySet train_set,
                           double eigen_threshold_rel = kDefaultEigenThreshold);

/// Same as fit_class_model with the training Gram matrix supplied by the
/// caller; `K` must equal gram(spec, train_set).
ClassModel fit_from_gram(const KernelSpec& spec, TrajectorySet train_set, const Eigen::MatrixXd& K,
                         double eigen_threshold_rel = kDefaultEigenThreshold);

/// diag(K - K H K) over the training prototypes.
std::vector<double> train_distances(const ClassModel& m);

/// diag(K_test - K_cross H K_cross^T); only k(Y, Y) is evaluated from K_test.
std::vector<double> test_distances(const ClassModel& m, const TrajectorySet& test_set);

/// Same as test_distances but returns values before clamping to zero.
std::vector<double> raw_test_distances(const ClassModel& m, const TrajectorySet& test_set);

/// Snaps values in [-1e-9 * scale, 0) to zero; throws NumericError below that band.
double clamp_distance(double d, double scale);

struct LabeledModel {
    std::string label;
    ClassModel model;
};

/// Multi-class classifier: one metric per class, smallest distance wins.
class DynafitClassifier {
public:
    DynafitClassifier() = default;

    /// Throws InvalidArgument for an empty or duplicate label or a model whose
    /// kernel or trajectory shape differs from the classes already present.
    void add_class(std::string label, ClassModel model);

    const std::vector<LabeledModel>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    const ClassModel& model(const std::string& label) const;
    std::vector<std::string> labels() const;

private:
    std::vector<LabeledModel> classes_;
};

struct Prediction {
    std::string label;
    std::size_t class_index = 0;
    /// Distance to every class, in classifier order.
    std::vector<double> distances;
};

/// Per-trajectory argmin over class distances; ties go to the earliest class.
std::vector<Prediction> classify(const DynafitClassifier& c, const TrajectorySet& test_set);

/// One-class detector: anomalous iff distance > threshold.
struct OneClassDetector {
    ClassModel model;
    double threshold = 0.0;
};

/// Inclusive linear-interpolation quantile (the "linear" rule: h = (n-1) q).
double empirical_quantile(std::vector<double> values, double q);

/// Threshold = quantile of calibration distances, floored at 1e-12 * tr(K_train).
OneClassDetector fit_threshold(ClassModel m, const TrajectorySet& calibration,
                               double quantile = kDefaultQuantile);

struct Detection {
    bool anomalous = false;
    double distance = 0.0;
};

std::vector<Detection> detect(const OneClassDetector& det, const TrajectorySet& test_set);

}  // namespace dynafit
