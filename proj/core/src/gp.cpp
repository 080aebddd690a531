#include "pame/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "pame/errors.hpp"

namespace pame::gp {

namespace {

constexpr double kSqrt5 = 2.23606797749978969641;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void require_finite(std::span<const double> values, const char* what) {
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument(std::string(what) + " contains a non-finite value");
        }
    }
}

double matern_from_distance(double r, double lengthscale, double signal_variance) {
    const double s = kSqrt5 * r / lengthscale;
    return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> values) {
    return {values.data(), static_cast<Eigen::Index>(values.size())};
}

struct Factorization {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

// `covariance` already holds K + σ²I.
Factorization factorize(Eigen::MatrixXd covariance, double signal_variance,
                        const FitOptions& options) {
    const Eigen::Index n = covariance.rows();
    const double limit = options.max_jitter * signal_variance * (1.0 + 1e-12);
    double jitter = options.initial_jitter * signal_variance;
    double applied = 0.0;
    while (jitter <= limit) {
        covariance.diagonal().array() += jitter - applied;
        applied = jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(covariance);
        if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) {
            return {llt.matrixL(), jitter};
        }
        jitter *= 10.0;
    }
    throw NumericalError("Cholesky factorization of a " + std::to_string(n) + "x" +
                         std::to_string(n) + " covariance failed with jitter up to " +
                         std::to_string(applied));
}

Eigen::MatrixXd noisy_covariance(std::span<const double> inputs, const GpHyperparams& hyper) {
    Eigen::MatrixXd k = kernel_matrix(inputs, inputs, hyper);
    k.diagonal().array() += hyper.noise_variance;
    return k;
}

double lml_from_factor(const Factorization& f, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::VectorXd w = f.lower.triangularView<Eigen::Lower>().solve(y);
    const double log_det = 2.0 * f.lower.diagonal().array().log().sum();
    const double n = static_cast<double>(y.size());
    return -0.5 * w.squaredNorm() - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

} // namespace

void GpHyperparams::validate() const {
    if (!finite_positive(lengthscale)) throw InvalidArgument("lengthscale must be finite and > 0");
    if (!finite_positive(signal_variance)) {
        throw InvalidArgument("signal_variance must be finite and > 0");
    }
    if (!finite_positive(noise_variance)) {
        throw InvalidArgument("noise_variance must be finite and > 0");
    }
}

double matern_kernel(double x, double x2, const GpHyperparams& hyper) {
    if (!std::isfinite(x) || !std::isfinite(x2)) {
        throw InvalidArgument("matern_kernel: non-finite input");
    }
    hyper.validate();
    return matern_from_distance(std::abs(x - x2), hyper.lengthscale, hyper.signal_variance);
}

Eigen::MatrixXd kernel_matrix(std::span<const double> xs, std::span<const double> xs2,
                              const GpHyperparams& hyper) {
    if (xs.empty() || xs2.empty()) throw InvalidArgument("kernel_matrix: empty input list");
    require_finite(xs, "kernel_matrix inputs");
    require_finite(xs2, "kernel_matrix inputs");
    hyper.validate();
    const auto rows = static_cast<Eigen::Index>(xs.size());
    const auto cols = static_cast<Eigen::Index>(xs2.size());
    Eigen::MatrixXd k(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            k(i, j) = matern_from_distance(std::abs(xs[i] - xs2[j]), hyper.lengthscale,
                                           hyper.signal_variance);
        }
    }
    return k;
}

GpModel::GpModel(const GpHyperparams& hyper) : hyper_(hyper) { hyper_.validate(); }

GpModel fit(std::span<const double> inputs, std::span<const double> labels,
            const GpHyperparams& hyper, const FitOptions& options) {
    if (inputs.size() != labels.size()) {
        throw InvalidArgument("fit: " + std::to_string(inputs.size()) + " inputs but " +
                              std::to_string(labels.size()) + " labels");
    }
    GpModel model(hyper);
    if (inputs.empty()) return model;
    require_finite(inputs, "fit inputs");
    require_finite(labels, "fit labels");

    Factorization f = factorize(noisy_covariance(inputs, hyper), hyper.signal_variance, options);
    model.inputs_ = as_vector(inputs);
    model.labels_ = as_vector(labels);
    model.alpha_ = f.lower.triangularView<Eigen::Lower>().solve(model.labels_);
    f.lower.triangularView<Eigen::Lower>().transpose().solveInPlace(model.alpha_);
    model.factor_ = std::move(f.lower);
    model.jitter_ = f.jitter;
    return model;
}

PosteriorSummary posterior(const GpModel& model, std::span<const double> queries) {
    if (queries.empty()) throw InvalidArgument("posterior: no query points");
    require_finite(queries, "posterior queries");
    const auto m = queries.size();
    const GpHyperparams& hyper = model.hyper();

    PosteriorSummary out;
    if (model.empty()) {
        out.mean.assign(m, 0.0);
        out.variance.assign(m, hyper.signal_variance);
        return out;
    }
    if (model.factor().rows() != static_cast<Eigen::Index>(model.size()) ||
        model.alpha().size() != static_cast<Eigen::Index>(model.size())) {
        throw StateError("posterior: model factor is inconsistent with its training set");
    }

    const std::span<const double> inputs(model.train_inputs().data(), model.size());
    Eigen::MatrixXd cross = kernel_matrix(inputs, queries, hyper);   // n × m
    const Eigen::VectorXd mean = cross.transpose() * model.alpha();
    model.factor().triangularView<Eigen::Lower>().solveInPlace(cross);
    const Eigen::VectorXd reduction = cross.colwise().squaredNorm().transpose();

    out.mean.assign(mean.data(), mean.data() + mean.size());
    out.variance.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.variance[i] = std::max(0.0, hyper.signal_variance - reduction[static_cast<Eigen::Index>(i)]);
    }
    return out;
}

double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> labels,
                               const GpHyperparams& hyper, const FitOptions& options) {
    if (inputs.empty()) throw InvalidArgument("log_marginal_likelihood: empty dataset");
    if (inputs.size() != labels.size()) {
        throw InvalidArgument("log_marginal_likelihood: inputs/labels size mismatch");
    }
    require_finite(inputs, "log_marginal_likelihood inputs");
    require_finite(labels, "log_marginal_likelihood labels");
    const Factorization f =
        factorize(noisy_covariance(inputs, hyper), hyper.signal_variance, options);
    return lml_from_factor(f, as_vector(labels));
}

SearchResult search_hyperparameters(std::span<const double> inputs, std::span<const double> labels,
                                    const GpHyperparams& init, const SearchOptions& options) {
    if (inputs.empty()) throw InvalidArgument("optimize_hyperparameters: empty dataset");
    if (inputs.size() != labels.size()) {
        throw InvalidArgument("optimize_hyperparameters: inputs/labels size mismatch");
    }
    require_finite(inputs, "optimize_hyperparameters inputs");
    require_finite(labels, "optimize_hyperparameters labels");
    init.validate();

    const auto n = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXd distance(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) distance(i, j) = std::abs(inputs[i] - inputs[j]);
    }
    const auto y = as_vector(labels);

    using Theta = std::array<double, 3>;
    const HyperBounds& b = options.bounds;
    const Theta lo{std::log(b.lengthscale_min), std::log(b.signal_min), std::log(b.noise_min)};
    const Theta hi{std::log(b.lengthscale_max), std::log(b.signal_max), std::log(b.noise_max)};
    // exp(log(bound)) can land one ulp outside the box.
    const auto to_hyper = [&b](const Theta& t) {
        return GpHyperparams{std::clamp(std::exp(t[0]), b.lengthscale_min, b.lengthscale_max),
                             std::clamp(std::exp(t[1]), b.signal_min, b.signal_max),
                             std::clamp(std::exp(t[2]), b.noise_min, b.noise_max)};
    };
    const auto to_theta = [](const GpHyperparams& h) {
        return Theta{std::log(h.lengthscale), std::log(h.signal_variance),
                     std::log(h.noise_variance)};
    };

    int evaluations = 0;
    const auto evaluate = [&](const GpHyperparams& h) {
        ++evaluations;
        Eigen::MatrixXd cov(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                cov(i, j) = matern_from_distance(distance(i, j), h.lengthscale, h.signal_variance);
            }
        }
        cov.diagonal().array() += h.noise_variance;
        try {
            const double v = lml_from_factor(factorize(std::move(cov), h.signal_variance, options.fit), y);
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        } catch (const NumericalError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    // Budget is shared evenly between a local compass search from every start.
    std::vector<GpHyperparams> starts{init};
    for (const GpHyperparams& start : options.extra_starts) {
        start.validate();
        if (std::find(starts.begin(), starts.end(), start) == starts.end()) starts.push_back(start);
    }

    GpHyperparams best_hyper = init;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < starts.size() && evaluations < options.max_evaluations; ++s) {
        const int remaining = options.max_evaluations - evaluations;
        const int budget_end =
            evaluations + std::max(1, remaining / static_cast<int>(starts.size() - s));

        GpHyperparams local_hyper = starts[s];
        Theta local = to_theta(local_hyper);
        double local_value = evaluate(local_hyper);
        double step = std::isfinite(local_value) ? options.initial_step : 0.0;
        while (evaluations < budget_end && step >= options.min_step) {
            bool improved = false;
            for (std::size_t d = 0; d < 3 && evaluations < budget_end; ++d) {
                for (const double sign : {1.0, -1.0}) {
                    if (evaluations >= budget_end) break;
                    Theta candidate = local;
                    candidate[d] = std::clamp(candidate[d] + sign * step, lo[d], hi[d]);
                    if (candidate[d] == local[d]) continue;
                    const GpHyperparams h = to_hyper(candidate);
                    const double v = evaluate(h);
                    if (v > local_value) {
                        local_value = v;
                        local_hyper = h;
                        local = candidate;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        // Strict comparison keeps init on ties, which the monotone contract needs.
        if (local_value > best_value) {
            best_value = local_value;
            best_hyper = local_hyper;
        }
    }

    if (!std::isfinite(best_value)) {
        std::clog << "pame: warning: no finite marginal likelihood among starting points; "
                     "keeping initial hyperparameters\n";
        return {init, best_value, evaluations, true};
    }
    return {best_hyper, best_value, evaluations, false};
}

GpHyperparams optimize_hyperparameters(std::span<const double> inputs,
                                       std::span<const double> labels, const GpHyperparams& init,
                                       const SearchOptions& options) {
    return search_hyperparameters(inputs, labels, init, options).hyper;
}

} // namespace pame::gp
