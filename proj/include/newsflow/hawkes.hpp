#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "newsflow/count_series.hpp"

namespace newsflow {

// Baseline rates and infectivity of a discrete-time multivariate Hawkes
// process. A(i, j) scales how past type-j counts raise the type-i rate.
struct HawkesParams {
    Eigen::VectorXd mu;
    Eigen::MatrixXd A;

    int types() const { return static_cast<int>(mu.size()); }
    // Throws unless shapes agree and every entry is finite and nonnegative.
    void validate() const;
};

// Exponential delay phi(t) = beta * exp(-beta * t).
class DelayKernel {
public:
    explicit DelayKernel(double beta = 0.5);

    double beta() const { return beta_; }
    double phi(double lag) const;
    // Total weight over positive integer lags: sum_{k>=1} phi(k) = beta / (e^beta - 1).
    double total_mass() const;

private:
    double beta_;
};

// Expected counts per day given the history: M x N, column n-1 is day n.
struct IntensitySeries {
    Eigen::MatrixXd lambda;
};

// Discounted history S(n) = sum_{t<n} y(t) phi(n - t), via
// S(1) = 0, S(n+1) = e^{-beta} (S(n) + beta y(n)).
Eigen::MatrixXd discounted_history(const DelayKernel& kernel, const Eigen::MatrixXd& counts);

// lambda(n) = mu + A S(n).
IntensitySeries intensity(const HawkesParams& params, const DelayKernel& kernel, const CountSeries& y);

struct LikelihoodGradient {
    double log_likelihood = 0.0;
    Eigen::VectorXd d_mu;
    Eigen::MatrixXd d_A;
};

// Poisson log-likelihood summed over independent series, types and days,
// with log Gamma(y + 1) in place of log y! so non-integer counts are accepted.
double log_likelihood(const HawkesParams& params, const DelayKernel& kernel, const std::vector<CountSeries>& series,
                      unsigned threads = 1);

// Log-likelihood together with its analytic gradient in mu and A.
LikelihoodGradient log_likelihood_gradient(const HawkesParams& params, const DelayKernel& kernel,
                                           const std::vector<CountSeries>& series, unsigned threads = 1);

struct FitOptions {
    int max_iterations = 5000;
    double tolerance = 1e-8;  // stop once |change in log-likelihood| falls below this
    double mu_floor = 1e-8;
    double initial_step = 1e-4;
    bool fit_excitation = true;  // false holds A at zero
    std::optional<HawkesParams> initial;
    unsigned threads = 1;
};

struct FitReport {
    int iterations = 0;
    double final_ll = 0.0;
    double grad_norm = 0.0;  // norm of the projected gradient at the returned point
    bool converged = false;
    std::vector<double> ll_trace;  // log-likelihood after each accepted step, starting point first
};

struct FitResult {
    HawkesParams params;
    FitReport report;
};

// Maximum-likelihood fit by projected gradient ascent with step halving.
// Starts from per-type sample means and A = 0.1 unless `initial` is given.
FitResult fit_mle(const std::vector<CountSeries>& series, const DelayKernel& kernel, const FitOptions& options = {});

double spectral_radius(const Eigen::MatrixXd& m);

// Long-run mean (I - cA)^{-1} mu with c the kernel's total mass.
Eigen::VectorXd stationary_mean(const HawkesParams& params, const DelayKernel& kernel);

// Draws y(n) ~ Poisson(lambda(n)) day by day. Requires spectral radius of cA below 1.
CountSeries simulate(const HawkesParams& params, const DelayKernel& kernel, int horizon, std::uint64_t seed);

// `count` independent series; series k is seeded from (seed, k).
std::vector<CountSeries> simulate_many(const HawkesParams& params, const DelayKernel& kernel, int horizon,
                                       std::size_t count, std::uint64_t seed);

// Header mu_append,mu_extend,mu_mutate, then the mu row, then one row per row of A.
void write_params_csv(std::ostream& out, const HawkesParams& params);
HawkesParams read_params_csv(std::istream& in);
HawkesParams read_params_csv(const std::string& path);

// key=value lines: iterations, final_ll, grad_norm, converged.
void write_fit_report(std::ostream& out, const FitReport& report);

}  // namespace newsflow
