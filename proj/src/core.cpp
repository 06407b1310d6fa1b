#include "dynafit/core.hpp"

#include "dynafit/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dynafit {
namespace {

constexpr double kNegativeEigenTolerance = 1e-8;
constexpr double kClampBand = 1e-9;
constexpr double kThresholdFloor = 1e-12;
constexpr double kOrthonormalityTolerance = 1e-10;
constexpr double kSymmetryTolerance = 1e-12;

// Mirror the upper triangle of W W^T so H is symmetric bit for bit.
Eigen::MatrixXd metric_from_whitening(const Eigen::MatrixXd& W) {
    Eigen::MatrixXd H = W * W.transpose();
    H.triangularView<Eigen::StrictlyLower>() = H.transpose();
    return H;
}

Eigen::MatrixXd whitening_from(const Eigen::MatrixXd& V, const Eigen::VectorXd& sigma) {
    return V * sigma.cwiseInverse().asDiagonal();
}

std::vector<Eigen::Index> canonical_order(const TrajectorySet& set) {
    std::vector<Eigen::Index> order(set.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const auto x = set[static_cast<std::size_t>(a)].flat();
        const auto y = set[static_cast<std::size_t>(b)].flat();
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    });
    return order;
}

double canonical_trace(const Eigen::VectorXd& diagonal, const std::vector<Eigen::Index>& order) {
    double t = 0.0;
    for (Eigen::Index i : order)
        t += diagonal(i);
    return t;
}

}  // namespace

// d_i = diag_i - ||(K_cross W)_i||^2 = diag_i - (K_cross H K_cross^T)_ii,
// summed over the training set in canonical order.
Eigen::VectorXd ClassModel::residuals(const Eigen::VectorXd& self_kernel,
                                      const Eigen::MatrixXd& cross) const {
    if (cross.cols() != static_cast<Eigen::Index>(train_set_.size()) ||
        cross.rows() != self_kernel.size())
        throw ShapeError("cross Gram matrix does not match the model");
    const Eigen::MatrixXd projected = cross(Eigen::all, order_) * W_canonical_;
    return self_kernel - projected.rowwise().squaredNorm();
}

double effective_eigen_threshold(double eigen_threshold_rel, std::size_t p) {
    const double noise = 64.0 * static_cast<double>(std::max<std::size_t>(p, 1)) *
                         std::numeric_limits<double>::epsilon();
    return std::max(eigen_threshold_rel, noise);
}

ClassModel fit_class_model(const KernelSpec& spec, TrajectorySet train_set,
                           double eigen_threshold_rel) {
    if (train_set.empty())
        throw InvalidArgument("training set is empty");
    const Eigen::MatrixXd K = gram(spec, train_set);
    return fit_from_gram(spec, std::move(train_set), K, eigen_threshold_rel);
}

ClassModel fit_from_gram(const KernelSpec& spec, TrajectorySet train_set, const Eigen::MatrixXd& K,
                         double eigen_threshold_rel) {
    if (train_set.empty())
        throw InvalidArgument("training set is empty");
    if (!(eigen_threshold_rel >= 0.0 && eigen_threshold_rel < 1.0))
        throw InvalidArgument("eigen threshold must lie in [0, 1)");
    const auto p_expected = static_cast<Eigen::Index>(train_set.size());
    if (K.rows() != p_expected || K.cols() != p_expected)
        throw ShapeError("Gram matrix size does not match the training set");

    const std::vector<Eigen::Index> order = canonical_order(train_set);
    const Eigen::MatrixXd K_canonical = K(order, order);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K_canonical);
    if (eig.info() != Eigen::Success)
        throw NumericError("symmetric eigensolver did not converge");

    // Eigen returns ascending order; walk it backwards.
    const Eigen::VectorXd& ascending = eig.eigenvalues();
    const Eigen::Index p = ascending.size();
    const double lambda_max = ascending(p - 1);
    if (!(lambda_max > 0.0))
        throw NumericError("training Gram matrix has no positive eigenvalue (degenerate kernel)");
    if (ascending(0) < -kNegativeEigenTolerance * lambda_max) {
        std::ostringstream msg;
        msg << "training Gram matrix is not positive semidefinite: eigenvalue " << ascending(0)
            << " against largest " << lambda_max;
        throw NumericError(msg.str());
    }

    const double cutoff =
        effective_eigen_threshold(eigen_threshold_rel, static_cast<std::size_t>(p)) * lambda_max;
    Eigen::Index k = 0;
    while (k < p && ascending(p - 1 - k) > cutoff)
        ++k;

    ClassModel m;
    m.kernel_ = spec;
    m.train_set_ = std::move(train_set);
    m.eigen_threshold_rel_ = eigen_threshold_rel;
    const Eigen::MatrixXd V_canonical = eig.eigenvectors().rightCols(k).rowwise().reverse();
    m.V_.resize(p, k);
    for (Eigen::Index c = 0; c < p; ++c)
        m.V_.row(order[static_cast<std::size_t>(c)]) = V_canonical.row(c);
    m.sigma_ = ascending.tail(k).reverse().cwiseSqrt();
    m.discarded_ = ascending.head(p - k).reverse();
    m.order_ = order;
    m.gram_trace_ = canonical_trace(K.diagonal(), order);
    m.W_ = whitening_from(m.V_, m.sigma_);
    m.W_canonical_ = m.W_(order, Eigen::all);
    m.H_ = metric_from_whitening(m.W_);
    return m;
}

ClassModel ClassModel::from_parts(KernelSpec kernel, TrajectorySet train_set, Eigen::MatrixXd V,
                                  Eigen::VectorXd sigma, Eigen::MatrixXd H,
                                  double eigen_threshold_rel) {
    validate(kernel);
    require_uniform_shape(train_set);
    const auto p = static_cast<Eigen::Index>(train_set.size());
    const Eigen::Index k = sigma.size();
    if (k < 1 || k > p)
        throw InvalidArgument("model rank must lie in [1, p]");
    if (V.rows() != p || V.cols() != k || H.rows() != p || H.cols() != p)
        throw InvalidArgument("model matrices do not match p and rank");
    if (!(eigen_threshold_rel >= 0.0 && eigen_threshold_rel < 1.0))
        throw InvalidArgument("eigen threshold must lie in [0, 1)");
    for (Eigen::Index i = 0; i < k; ++i) {
        if (!(sigma(i) > 0.0) || (i + 1 < k && sigma(i) < sigma(i + 1)))
            throw InvalidArgument("singular values must be positive and non-increasing");
    }
    const double ortho =
        (V.transpose() * V - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (ortho > kOrthonormalityTolerance)
        throw InvalidArgument("eigenvector columns are not orthonormal");
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance * std::max(1.0, H.cwiseAbs().maxCoeff()))
        throw InvalidArgument("metric matrix is not symmetric");

    ClassModel m;
    m.kernel_ = std::move(kernel);
    m.train_set_ = std::move(train_set);
    m.V_ = std::move(V);
    m.sigma_ = std::move(sigma);
    m.H_ = std::move(H);
    m.eigen_threshold_rel_ = eigen_threshold_rel;
    m.finish();
    return m;
}

void ClassModel::finish() {
    for (const auto& t : train_set_)
        check_domain(kernel_, t);
    order_ = canonical_order(train_set_);
    gram_trace_ = canonical_trace(gram_diagonal(kernel_, train_set_), order_);
    W_ = whitening_from(V_, sigma_);
    W_canonical_ = W_(order_, Eigen::all);
}

double clamp_distance(double d, double scale) {
    if (d >= 0.0)
        return d;
    if (d >= -kClampBand * scale)
        return 0.0;
    std::ostringstream msg;
    msg << "distance " << d << " is below the round-off band -" << kClampBand << " * " << scale;
    throw NumericError(msg.str());
}

std::vector<double> train_distances(const ClassModel& m) {
    const Eigen::MatrixXd K = gram(m.kernel(), m.train_set());
    const Eigen::VectorXd d = m.residuals(K.diagonal(), K);
    std::vector<double> out(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        out[static_cast<std::size_t>(i)] = clamp_distance(d(i), m.gram_trace());
    return out;
}

namespace {

struct TestResiduals {
    Eigen::VectorXd raw;
    Eigen::VectorXd self;
};

TestResiduals test_residuals(const ClassModel& m, const TrajectorySet& test_set) {
    const Eigen::MatrixXd cross = cross_gram(m.kernel(), test_set, m.train_set());
    Eigen::VectorXd self = gram_diagonal(m.kernel(), test_set);
    Eigen::VectorXd raw = m.residuals(self, cross);
    return {std::move(raw), std::move(self)};
}

}  // namespace

std::vector<double> raw_test_distances(const ClassModel& m, const TrajectorySet& test_set) {
    if (test_set.empty())
        return {};
    const TestResiduals r = test_residuals(m, test_set);
    return {r.raw.data(), r.raw.data() + r.raw.size()};
}

std::vector<double> test_distances(const ClassModel& m, const TrajectorySet& test_set) {
    if (test_set.empty())
        return {};
    const TestResiduals r = test_residuals(m, test_set);
    std::vector<double> d(static_cast<std::size_t>(r.raw.size()));
    for (Eigen::Index i = 0; i < r.raw.size(); ++i)
        d[static_cast<std::size_t>(i)] =
            clamp_distance(r.raw(i), std::max(m.gram_trace(), r.self(i)));
    return d;
}

void DynafitClassifier::add_class(std::string label, ClassModel model) {
    if (label.empty())
        throw InvalidArgument("class label must be non-empty");
    for (const auto& c : classes_) {
        if (c.label == label)
            throw InvalidArgument("duplicate class label '" + label + "'");
    }
    if (!classes_.empty()) {
        const ClassModel& first = classes_.front().model;
        if (first.kernel() != model.kernel())
            throw InvalidArgument("class '" + label + "' uses kernel " +
                                  describe(model.kernel()) + ", classifier uses " +
                                  describe(first.kernel()));
        const Trajectory& a = first.train_set().front();
        const Trajectory& b = model.train_set().front();
        if (a.state_dim() != b.state_dim() || a.length() != b.length())
            throw InvalidArgument("class '" + label + "' has a different trajectory shape");
    }
    classes_.push_back({std::move(label), std::move(model)});
}

const ClassModel& DynafitClassifier::model(const std::string& label) const {
    for (const auto& c : classes_) {
        if (c.label == label)
            return c.model;
    }
    throw InvalidArgument("no class labeled '" + label + "'");
}

std::vector<std::string> DynafitClassifier::labels() const {
    std::vector<std::string> out;
    out.reserve(classes_.size());
    for (const auto& c : classes_)
        out.push_back(c.label);
    return out;
}

std::vector<Prediction> classify(const DynafitClassifier& c, const TrajectorySet& test_set) {
    if (c.size() < 2)
        throw InvalidArgument("classification needs at least two classes");
    std::vector<std::vector<double>> per_class;
    per_class.reserve(c.size());
    for (const auto& cls : c.classes())
        per_class.push_back(test_distances(cls.model, test_set));

    std::vector<Prediction> out(test_set.size());
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        Prediction& pred = out[i];
        pred.distances.resize(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) {
            pred.distances[j] = per_class[j][i];
            if (pred.distances[j] < pred.distances[pred.class_index])
                pred.class_index = j;
        }
        pred.label = c.classes()[pred.class_index].label;
    }
    return out;
}

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw InvalidArgument("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidArgument("quantile must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

OneClassDetector fit_threshold(ClassModel m, const TrajectorySet& calibration, double quantile) {
    if (calibration.empty())
        throw InvalidArgument("calibration set is empty");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw InvalidArgument("quantile must lie in (0, 1]");
    const double tau = empirical_quantile(test_distances(m, calibration), quantile);
    const double floor = kThresholdFloor * m.gram_trace();
    return {std::move(m), std::max(tau, floor)};
}

std::vector<Detection> detect(const OneClassDetector& det, const TrajectorySet& test_set) {
    const std::vector<double> d = test_distances(det.model, test_set);
    std::vector<Detection> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        out[i] = {d[i] > det.threshold, d[i]};
    return out;
}

}  // namespace dynafit
