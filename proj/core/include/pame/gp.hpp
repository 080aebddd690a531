#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pame::gp {

/// Matérn-5/2 kernel amplitude and lengthscale plus i.i.d. label noise.
struct GpHyperparams {
    double lengthscale = 500.0;      // meters
    double signal_variance = 0.25;   // σ_f²
    double noise_variance = 9e-4;    // σ²

    /// Throws InvalidArgument unless all three are finite and strictly positive.
    void validate() const;

    friend bool operator==(const GpHyperparams&, const GpHyperparams&) = default;
};

/// Diagonal stabilization schedule, expressed relative to σ_f².
struct FitOptions {
    double initial_jitter = 1e-10;
    double max_jitter = 1e-4;
};

struct PosteriorSummary {
    std::vector<double> mean;
    std::vector<double> variance;   // latent, noise excluded
};

/// σ_f²·(1 + √5 r/ℓ + 5r²/3ℓ²)·exp(−√5 r/ℓ), r = |x − x2|.
double matern_kernel(double x, double x2, const GpHyperparams& hyper);

Eigen::MatrixXd kernel_matrix(std::span<const double> xs, std::span<const double> xs2,
                              const GpHyperparams& hyper);

/// Zero-mean exact GP conditioned on a training set.
///
/// Immutable once built by fit(); cheap to share read-only between threads.
class GpModel {
public:
    /// Prior-only model.
    explicit GpModel(const GpHyperparams& hyper = {});

    [[nodiscard]] const GpHyperparams& hyper() const { return hyper_; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(inputs_.size()); }
    [[nodiscard]] bool empty() const { return size() == 0; }
    [[nodiscard]] const Eigen::VectorXd& train_inputs() const { return inputs_; }
    [[nodiscard]] const Eigen::VectorXd& train_labels() const { return labels_; }
    /// Lower Cholesky factor of K + (σ² + jitter)·I.
    [[nodiscard]] const Eigen::MatrixXd& factor() const { return factor_; }
    [[nodiscard]] const Eigen::VectorXd& alpha() const { return alpha_; }
    /// Absolute diagonal jitter that made the factorization succeed.
    [[nodiscard]] double jitter() const { return jitter_; }

private:
    friend GpModel fit(std::span<const double>, std::span<const double>, const GpHyperparams&,
                       const FitOptions&);

    GpHyperparams hyper_;
    Eigen::VectorXd inputs_;
    Eigen::VectorXd labels_;
    Eigen::MatrixXd factor_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

/// Throws NumericalError when the factorization fails at the largest jitter.
GpModel fit(std::span<const double> inputs, std::span<const double> labels,
            const GpHyperparams& hyper, const FitOptions& options = {});

PosteriorSummary posterior(const GpModel& model, std::span<const double> queries);

/// −½yᵀ(K+σ²I)⁻¹y − ½log|K+σ²I| − (n/2)log 2π, through the same factorization as fit().
double log_marginal_likelihood(std::span<const double> inputs, std::span<const double> labels,
                               const GpHyperparams& hyper, const FitOptions& options = {});

struct HyperBounds {
    double lengthscale_min = 1.0;
    double lengthscale_max = 10000.0;
    double signal_min = 1e-4;
    double signal_max = 10.0;
    double noise_min = 1e-6;
    double noise_max = 1.0;
};

struct SearchOptions {
    HyperBounds bounds;
    int max_evaluations = 50;
    double initial_step = 0.6931471805599453;   // log-space, a factor of 2
    double min_step = 1e-3;
    /// Additional starting points; the best of these and init seeds the search.
    std::vector<GpHyperparams> extra_starts;
    FitOptions fit;
};

struct SearchResult {
    GpHyperparams hyper;
    double log_likelihood = 0.0;
    int evaluations = 0;
    bool fell_back = false;   // no finite evaluation; hyper == init
};

/// Compass search over log(ℓ, σ_f², σ²) maximizing the marginal likelihood.
SearchResult search_hyperparameters(std::span<const double> inputs, std::span<const double> labels,
                                    const GpHyperparams& init, const SearchOptions& options = {});

/// Convenience wrapper returning only the hyperparameters.
GpHyperparams optimize_hyperparameters(std::span<const double> inputs,
                                       std::span<const double> labels, const GpHyperparams& init,
                                       const SearchOptions& options = {});

} // namespace pame::gp
