#include "newsflow/hawkes.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "newsflow/csv.hpp"
#include "newsflow/diagnostics.hpp"
#include "newsflow/parallel.hpp"

namespace newsflow {

void HawkesParams::validate() const {
    if (mu.size() == 0) throw std::invalid_argument("Hawkes parameters need at least one event type");
    if (A.rows() != mu.size() || A.cols() != mu.size()) {
        throw std::invalid_argument("infectivity matrix must be " + std::to_string(mu.size()) + "x" +
                                    std::to_string(mu.size()));
    }
    if (!mu.allFinite() || !A.allFinite()) throw std::invalid_argument("Hawkes parameters must be finite");
    if ((mu.array() < 0).any() || (A.array() < 0).any()) {
        throw std::invalid_argument("Hawkes parameters must be nonnegative");
    }
}

DelayKernel::DelayKernel(double beta) : beta_(beta) {
    if (!(beta > 0) || !std::isfinite(beta)) throw std::invalid_argument("delay rate beta must be positive");
}

double DelayKernel::phi(double lag) const { return lag < 0 ? 0.0 : beta_ * std::exp(-beta_ * lag); }

double DelayKernel::total_mass() const { return beta_ / std::expm1(beta_); }

Eigen::MatrixXd discounted_history(const DelayKernel& kernel, const Eigen::MatrixXd& counts) {
    const Eigen::Index n_days = counts.cols();
    Eigen::MatrixXd history = Eigen::MatrixXd::Zero(counts.rows(), n_days);
    const double decay = std::exp(-kernel.beta());
    for (Eigen::Index n = 1; n < n_days; ++n) {
        history.col(n) = decay * (history.col(n - 1) + kernel.beta() * counts.col(n - 1));
    }
    return history;
}

namespace {

void check_series(const HawkesParams& params, const CountSeries& y) {
    if (y.types() != params.types()) {
        throw std::invalid_argument("series " + std::to_string(y.triple_id) + " has " + std::to_string(y.types()) +
                                    " event types, parameters have " + std::to_string(params.types()));
    }
    if (y.horizon() < 1) throw std::invalid_argument("series " + std::to_string(y.triple_id) + " is empty");
}

// Caches each series' discounted history, which depends only on the counts and beta.
class LikelihoodEvaluator {
public:
    LikelihoodEvaluator(const std::vector<CountSeries>& series, const DelayKernel& kernel, unsigned threads)
        : series_(series), threads_(threads), history_(series.size()), log_factorial_(series.size(), 0.0) {
        parallel_for(series_.size(), threads_, [&](std::size_t k) {
            if ((series_[k].counts.array() < 0).any() || !series_[k].counts.allFinite()) {
                throw std::invalid_argument("series " + std::to_string(series_[k].triple_id) +
                                            " has negative or non-finite counts");
            }
            history_[k] = discounted_history(kernel, series_[k].counts);
            log_factorial_[k] =
                series_[k].counts.unaryExpr([](double v) { return std::lgamma(v + 1.0); }).sum();
        });
        for (double v : log_factorial_) log_factorial_total_ += v;
    }

    // Returns NaN-free value or throws when some intensity is not positive.
    LikelihoodGradient evaluate(const HawkesParams& params, bool with_gradient) const {
        const int m = params.types();
        std::vector<double> values(series_.size(), 0.0);
        std::vector<Eigen::VectorXd> d_mu(with_gradient ? series_.size() : 0);
        std::vector<Eigen::MatrixXd> d_a(with_gradient ? series_.size() : 0);
        parallel_for(series_.size(), threads_, [&](std::size_t k) {
            const Eigen::MatrixXd& y = series_[k].counts;
            Eigen::MatrixXd lambda = params.A * history_[k];
            lambda.colwise() += params.mu;
            if ((lambda.array() <= 0).any()) {
                throw std::domain_error("non-positive intensity in series " + std::to_string(series_[k].triple_id));
            }
            values[k] = (y.array() * lambda.array().log()).sum() - lambda.sum();
            if (with_gradient) {
                Eigen::MatrixXd ratio = (y.array() / lambda.array() - 1.0).matrix();
                d_mu[k] = ratio.rowwise().sum();
                d_a[k] = ratio * history_[k].transpose();
            }
        });
        LikelihoodGradient out;
        out.d_mu = Eigen::VectorXd::Zero(m);
        out.d_A = Eigen::MatrixXd::Zero(m, m);
        double sum = 0.0;
        for (std::size_t k = 0; k < series_.size(); ++k) {
            sum += values[k];
            if (with_gradient) {
                out.d_mu += d_mu[k];
                out.d_A += d_a[k];
            }
        }
        out.log_likelihood = sum - log_factorial_total_;
        return out;
    }

private:
    const std::vector<CountSeries>& series_;
    unsigned threads_;
    std::vector<Eigen::MatrixXd> history_;
    std::vector<double> log_factorial_;
    double log_factorial_total_ = 0.0;
};

void check_all(const HawkesParams& params, const std::vector<CountSeries>& series) {
    params.validate();
    for (const auto& s : series) check_series(params, s);
}

}  // namespace

IntensitySeries intensity(const HawkesParams& params, const DelayKernel& kernel, const CountSeries& y) {
    params.validate();
    check_series(params, y);
    IntensitySeries out;
    out.lambda = params.A * discounted_history(kernel, y.counts);
    out.lambda.colwise() += params.mu;
    return out;
}

double log_likelihood(const HawkesParams& params, const DelayKernel& kernel, const std::vector<CountSeries>& series,
                      unsigned threads) {
    check_all(params, series);
    return LikelihoodEvaluator(series, kernel, threads).evaluate(params, false).log_likelihood;
}

LikelihoodGradient log_likelihood_gradient(const HawkesParams& params, const DelayKernel& kernel,
                                           const std::vector<CountSeries>& series, unsigned threads) {
    check_all(params, series);
    return LikelihoodEvaluator(series, kernel, threads).evaluate(params, true);
}

namespace {

struct Projection {
    double mu_floor;
    bool fit_excitation;

    HawkesParams apply(HawkesParams p) const {
        p.mu = p.mu.cwiseMax(mu_floor);
        if (fit_excitation) {
            p.A = p.A.cwiseMax(0.0);
        } else {
            p.A.setZero();
        }
        return p;
    }

    // Gradient with components that point out of the feasible set zeroed.
    double projected_norm(const HawkesParams& p, const LikelihoodGradient& g) const {
        double sq = 0.0;
        for (Eigen::Index i = 0; i < p.mu.size(); ++i) {
            if (p.mu(i) <= mu_floor && g.d_mu(i) < 0) continue;
            sq += g.d_mu(i) * g.d_mu(i);
        }
        if (fit_excitation) {
            for (Eigen::Index i = 0; i < p.A.size(); ++i) {
                if (p.A(i) <= 0 && g.d_A(i) < 0) continue;
                sq += g.d_A(i) * g.d_A(i);
            }
        }
        return std::sqrt(sq);
    }
};

// Trial step for the next iteration: |s.s / s.y| from the last move s and
// gradient change y, or double the accepted step when the pair shows no
// concave curvature.
double barzilai_borwein_step(const HawkesParams& from, const HawkesParams& to, const LikelihoodGradient& g_from,
                             const LikelihoodGradient& g_to, double accepted_step) {
    const double ss = (to.mu - from.mu).squaredNorm() + (to.A - from.A).squaredNorm();
    const double sy = (to.mu - from.mu).dot(g_to.d_mu - g_from.d_mu) +
                      ((to.A - from.A).array() * (g_to.d_A - g_from.d_A).array()).sum();
    if (ss > 0 && sy < 0 && std::isfinite(ss / -sy)) return ss / -sy;
    return 2.0 * accepted_step;
}

LikelihoodGradient safe_evaluate(const LikelihoodEvaluator& eval, const HawkesParams& p, bool with_gradient) {
    try {
        return eval.evaluate(p, with_gradient);
    } catch (const std::domain_error&) {
        LikelihoodGradient bad;
        bad.log_likelihood = -std::numeric_limits<double>::infinity();
        return bad;
    }
}

}  // namespace

FitResult fit_mle(const std::vector<CountSeries>& series, const DelayKernel& kernel, const FitOptions& options) {
    if (series.empty()) throw std::invalid_argument("fit_mle needs at least one series");
    const int m = series.front().types();
    if (m < 1) throw std::invalid_argument("series have no event types");
    long long total_days = 0;
    Eigen::VectorXd totals = Eigen::VectorXd::Zero(m);
    int longest = 0;
    for (const auto& s : series) {
        if (s.types() != m) throw std::invalid_argument("series disagree on the number of event types");
        total_days += s.horizon();
        totals += s.counts.rowwise().sum();
        longest = std::max(longest, s.horizon());
    }
    if (longest < 2) throw std::invalid_argument("fit_mle needs series of at least 2 days");
    if (options.max_iterations < 0 || !(options.tolerance > 0) || !(options.mu_floor > 0) ||
        !(options.initial_step > 0)) {
        throw std::invalid_argument("invalid optimizer settings");
    }

    const Projection projection{options.mu_floor, options.fit_excitation};
    HawkesParams current;
    if (options.initial) {
        current = *options.initial;
        current.validate();
        if (current.types() != m) throw std::invalid_argument("initial parameters have the wrong dimension");
    } else {
        current.mu = totals / static_cast<double>(total_days);
        current.A = Eigen::MatrixXd::Constant(m, m, 0.1);
    }
    current = projection.apply(current);
    for (const auto& s : series) check_series(current, s);

    LikelihoodEvaluator eval(series, kernel, options.threads);
    LikelihoodGradient grad = eval.evaluate(current, true);
    if (!std::isfinite(grad.log_likelihood)) throw std::runtime_error("log-likelihood is not finite at the start point");

    FitReport report;
    report.ll_trace.push_back(grad.log_likelihood);
    double step = options.initial_step;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        bool accepted = false;
        bool saw_finite = false;
        HawkesParams candidate;
        LikelihoodGradient next;
        while (true) {
            candidate.mu = current.mu + step * grad.d_mu;
            candidate.A = current.A + step * grad.d_A;
            candidate = projection.apply(std::move(candidate));
            if (candidate.mu == current.mu && candidate.A == current.A) break;  // step underflow
            next = safe_evaluate(eval, candidate, false);
            if (std::isfinite(next.log_likelihood)) {
                saw_finite = true;
                if (next.log_likelihood > grad.log_likelihood) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!saw_finite) {
                std::ostringstream msg;
                msg << "step size underflow with non-finite log-likelihood after " << report.iterations
                    << " iterations (ll=" << grad.log_likelihood << ", mu=" << current.mu.transpose() << ")";
                throw std::runtime_error(msg.str());
            }
            // No representable ascent step remains.
            report.converged = true;
            break;
        }
        const double previous = grad.log_likelihood;
        LikelihoodGradient next_grad = eval.evaluate(candidate, true);
        step = barzilai_borwein_step(current, candidate, grad, next_grad, step);
        current = std::move(candidate);
        grad = std::move(next_grad);
        report.iterations = iter + 1;
        report.ll_trace.push_back(grad.log_likelihood);
        if (std::abs(grad.log_likelihood - previous) < options.tolerance) {
            report.converged = true;
            break;
        }
    }

    report.final_ll = grad.log_likelihood;
    report.grad_norm = projection.projected_norm(current, grad);
    return {std::move(current), std::move(report)};
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd stationary_mean(const HawkesParams& params, const DelayKernel& kernel) {
    params.validate();
    const int m = params.types();
    if (!(spectral_radius(kernel.total_mass() * params.A) < 1.0)) {
        throw std::invalid_argument("stationary mean needs spectral radius of cA below 1");
    }
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) - kernel.total_mass() * params.A;
    return system.partialPivLu().solve(params.mu);
}

namespace {

CountSeries simulate_with(const HawkesParams& params, const DelayKernel& kernel, int horizon, std::mt19937_64& rng) {
    const int m = params.types();
    CountSeries out;
    out.counts = Eigen::MatrixXd::Zero(m, horizon);
    Eigen::VectorXd history = Eigen::VectorXd::Zero(m);
    const double decay = std::exp(-kernel.beta());
    for (int n = 0; n < horizon; ++n) {
        Eigen::VectorXd rate = params.mu + params.A * history;
        for (int k = 0; k < m; ++k) {
            if (rate(k) > 0) {
                std::poisson_distribution<long long> draw(rate(k));
                out.counts(k, n) = static_cast<double>(draw(rng));
            }
        }
        history = decay * (history + kernel.beta() * out.counts.col(n));
    }
    return out;
}

void check_stable(const HawkesParams& params, const DelayKernel& kernel, int horizon) {
    params.validate();
    if (horizon < 1) throw std::invalid_argument("simulation horizon must be >= 1");
    const double radius = spectral_radius(kernel.total_mass() * params.A);
    if (!(radius < 1.0)) {
        std::ostringstream msg;
        msg << "unstable parameters: spectral radius of cA is " << radius << " (must be < 1)";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

CountSeries simulate(const HawkesParams& params, const DelayKernel& kernel, int horizon, std::uint64_t seed) {
    check_stable(params, kernel, horizon);
    std::mt19937_64 rng(seed);
    return simulate_with(params, kernel, horizon, rng);
}

std::vector<CountSeries> simulate_many(const HawkesParams& params, const DelayKernel& kernel, int horizon,
                                       std::size_t count, std::uint64_t seed) {
    check_stable(params, kernel, horizon);
    std::vector<CountSeries> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        std::mt19937_64 rng(seq);
        out.push_back(simulate_with(params, kernel, horizon, rng));
        out.back().triple_id = k;
    }
    return out;
}

void write_params_csv(std::ostream& out, const HawkesParams& params) {
    params.validate();
    const int m = params.types();
    for (int i = 0; i < m; ++i) {
        if (i) out << ',';
        out << "mu_" << (m == kEventTypes ? std::string(kEventTypeNames[i]) : std::to_string(i + 1));
    }
    out << '\n';
    for (int i = 0; i < m; ++i) out << (i ? "," : "") << csv::format_double(params.mu(i));
    out << '\n';
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) out << (c ? "," : "") << csv::format_double(params.A(r, c));
        out << '\n';
    }
}

HawkesParams read_params_csv(std::istream& in) {
    csv::Table table = csv::read(in);
    const auto m = static_cast<int>(table.header.size());
    if (m < 1) throw ParseError("parameter file has an empty header");
    for (int i = 0; i < m; ++i) {
        if (table.header[i].rfind("mu_", 0) != 0) throw ParseError("parameter header must name mu_* columns", 1);
    }
    if (static_cast<int>(table.rows.size()) != m + 1) {
        throw ParseError("parameter file needs a mu row and " + std::to_string(m) + " rows of A");
    }
    HawkesParams p;
    p.mu.resize(m);
    p.A.resize(m, m);
    for (int i = 0; i < m; ++i) p.mu(i) = csv::parse_double(table.rows[0][i], table.line_numbers[0]);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) p.A(r, c) = csv::parse_double(table.rows[r + 1][c], table.line_numbers[r + 1]);
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return p;
}

HawkesParams read_params_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_params_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_fit_report(std::ostream& out, const FitReport& report) {
    out << "iterations=" << report.iterations << '\n'
        << "final_ll=" << csv::format_double(report.final_ll) << '\n'
        << "grad_norm=" << csv::format_double(report.grad_norm) << '\n'
        << "converged=" << (report.converged ? "true" : "false") << '\n';
}

}  // namespace newsflow
