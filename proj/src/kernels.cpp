#include "dynafit/kernels.hpp"

#include "dynafit/error.hpp"
#include "dynafit/parallel.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

namespace dynafit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Kernel formulas without precondition checks. Each loop visits the samples in
// the same order whichever argument comes first and uses only commutative
// per-sample operations, so k(x, y) == k(y, x) bit for bit.
double evaluate(const KernelSpec& spec, const double* x, const double* y, Eigen::Index len) {
    return std::visit(
        overloaded{
            [&](const PolynomialKernel& k) {
                double dot = 0.0;
                for (Eigen::Index i = 0; i < len; ++i)
                    dot += x[i] * y[i];
                return std::pow(1.0 + dot, k.degree);
            },
            [&](const GaussianKernel& k) {
                double sq = 0.0;
                for (Eigen::Index i = 0; i < len; ++i) {
                    const double diff = x[i] - y[i];
                    sq += diff * diff;
                }
                return std::exp(-sq / (k.width * k.width));
            },
            [&](const LogisticMapKernel&) {
                double sum = 0.0;
                for (Eigen::Index i = 0; i < len; ++i) {
                    const double xy = x[i] * y[i];
                    sum += xy / (1.0 - xy);
                }
                return sum;
            },
            [&](const TruncatedLogisticKernel& k) {
                double sum = 0.0;
                for (Eigen::Index i = 0; i < len; ++i) {
                    const double xy = x[i] * y[i];
                    sum += xy * (1.0 - std::pow(xy, k.truncation)) / (1.0 - xy);
                }
                return sum;
            },
        },
        spec);
}

void check_compatible(const Trajectory& x, const Trajectory& y) {
    if (x.state_dim() != y.state_dim() || x.length() != y.length()) {
        std::ostringstream msg;
        msg << "kernel arguments have shapes " << x.state_dim() << "x" << x.length() << " and "
            << y.state_dim() << "x" << y.length();
        throw ShapeError(msg.str());
    }
}

void check_set(const KernelSpec& spec, const TrajectorySet& set) {
    require_uniform_shape(set);
    for (const auto& t : set)
        check_domain(spec, t);
}

template <class Derived>
void require_finite(const Eigen::DenseBase<Derived>& K, const KernelSpec& spec) {
    if (!K.allFinite())
        throw NumericError("kernel " + describe(spec) + " produced a non-finite value");
}

}  // namespace

void validate(const KernelSpec& spec) {
    std::visit(overloaded{
                   [](const PolynomialKernel& k) {
                       if (k.degree < 1)
                           throw InvalidArgument("polynomial degree must be >= 1");
                   },
                   [](const GaussianKernel& k) {
                       if (!(k.width > 0.0) || !std::isfinite(k.width))
                           throw InvalidArgument("gaussian width must be a positive finite number");
                   },
                   [](const LogisticMapKernel&) {},
                   [](const TruncatedLogisticKernel& k) {
                       if (k.truncation < 1)
                           throw InvalidArgument("logistic truncation must be >= 1");
                   },
               },
               spec);
}

bool is_logistic(const KernelSpec& spec) {
    return std::holds_alternative<LogisticMapKernel>(spec) ||
           std::holds_alternative<TruncatedLogisticKernel>(spec);
}

std::string describe(const KernelSpec& spec) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const PolynomialKernel& k) { out << "poly(d=" << k.degree << ")"; },
                   [&](const GaussianKernel& k) { out << "gauss(sigma=" << k.width << ")"; },
                   [&](const LogisticMapKernel&) { out << "logistic"; },
                   [&](const TruncatedLogisticKernel& k) {
                       out << "logistic(l=" << k.truncation << ")";
                   },
               },
               spec);
    return out.str();
}

void check_domain(const KernelSpec& spec, const Trajectory& t) {
    if (!is_logistic(spec))
        return;
    if (t.state_dim() != 1)
        throw ShapeError("logistic kernels take scalar trajectories, got state dimension " +
                         std::to_string(t.state_dim()));
    const auto& s = t.states();
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
        const double v = s(0, k);
        if (!(v >= 0.0 && v < kLogisticUpperBound)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "logistic kernel input " << v << " at step " << k << " is outside [0, 1)";
            throw DomainError(msg.str());
        }
    }
}

double eval_kernel(const KernelSpec& spec, const Trajectory& x, const Trajectory& y) {
    validate(spec);
    check_compatible(x, y);
    check_domain(spec, x);
    check_domain(spec, y);
    const double v = evaluate(spec, x.states().data(), y.states().data(), x.states().size());
    if (!std::isfinite(v))
        throw NumericError("kernel " + describe(spec) + " produced a non-finite value");
    return v;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const TrajectorySet& set) {
    validate(spec);
    check_set(spec, set);
    const auto p = static_cast<Eigen::Index>(set.size());
    const auto len = set.front().states().size();
    Eigen::MatrixXd K(p, p);
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (Eigen::Index i = 0; i < p; ++i) {
        const double* xi = set[static_cast<std::size_t>(i)].states().data();
        for (Eigen::Index j = i; j < p; ++j) {
            const double v = evaluate(spec, xi, set[static_cast<std::size_t>(j)].states().data(), len);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    require_finite(K, spec);
    return K;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const TrajectorySet& test,
                           const TrajectorySet& train) {
    validate(spec);
    check_set(spec, test);
    check_set(spec, train);
    check_compatible(test.front(), train.front());
    const auto q = static_cast<Eigen::Index>(test.size());
    const auto p = static_cast<Eigen::Index>(train.size());
    const auto len = train.front().states().size();
    Eigen::MatrixXd K(q, p);
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (Eigen::Index i = 0; i < q; ++i) {
        const double* xi = test[static_cast<std::size_t>(i)].states().data();
        for (Eigen::Index j = 0; j < p; ++j)
            K(i, j) = evaluate(spec, xi, train[static_cast<std::size_t>(j)].states().data(), len);
    }
    require_finite(K, spec);
    return K;
}

Eigen::VectorXd gram_diagonal(const KernelSpec& spec, const TrajectorySet& set) {
    validate(spec);
    check_set(spec, set);
    const auto len = set.front().states().size();
    Eigen::VectorXd d(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double* x = set[i].states().data();
        d(static_cast<Eigen::Index>(i)) = evaluate(spec, x, x, len);
    }
    require_finite(d, spec);
    return d;
}

}  // namespace dynafit
