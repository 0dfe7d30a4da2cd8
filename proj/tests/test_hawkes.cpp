#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "newsflow/diagnostics.hpp"
#include "newsflow/hawkes.hpp"
#include "oracles.hpp"

using namespace newsflow;

namespace {

CountSeries make_series(Eigen::MatrixXd counts, std::size_t id = 0) { return {id, std::move(counts)}; }

HawkesParams params3(Eigen::Vector3d mu, Eigen::Matrix3d a) { return {mu, a}; }

HawkesParams random_params(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> mu(0.1, 2.0), a(0.0, 0.3);
    HawkesParams p{Eigen::VectorXd(m), Eigen::MatrixXd(m, m)};
    for (int i = 0; i < m; ++i) p.mu(i) = mu(rng);
    for (int i = 0; i < m * m; ++i) p.A.data()[i] = a(rng);
    return p;
}

Eigen::MatrixXd random_counts(std::mt19937_64& rng, int m, int n) {
    std::poisson_distribution<int> pois(1.5);
    Eigen::MatrixXd y(m, n);
    for (int i = 0; i < m * n; ++i) y.data()[i] = pois(rng);
    return y;
}

// Log-likelihood computed from the direct double-sum intensity.
double direct_ll(const HawkesParams& p, double beta, const std::vector<CountSeries>& series) {
    double ll = 0.0;
    for (const auto& s : series) {
        Eigen::MatrixXd lambda = oracle::direct_intensity(p.mu, p.A, beta, s.counts);
        for (Eigen::Index i = 0; i < lambda.size(); ++i) ll += oracle::poisson_log_pmf(s.counts.data()[i], lambda.data()[i]);
    }
    return ll;
}

}  // namespace

TEST_CASE("parameter and kernel validation") {
    CHECK_THROWS_AS(DelayKernel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DelayKernel(-1.0), std::invalid_argument);
    DelayKernel k(0.5);
    CHECK(k.phi(2.0) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(k.total_mass() == doctest::Approx(0.5 / (std::exp(0.5) - 1.0)));

    HawkesParams bad = params3({1, 1, 1}, Eigen::Matrix3d::Zero());
    bad.A(0, 1) = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    HawkesParams wrong{Eigen::VectorXd::Ones(3), Eigen::MatrixXd::Zero(2, 2)};
    CHECK_THROWS_AS(wrong.validate(), std::invalid_argument);
}

TEST_CASE("intensity examples") {
    SUBCASE("no excitation gives the baseline") {
        std::mt19937_64 rng(1);
        HawkesParams p = params3({0.5, 0.3, 0.4}, Eigen::Matrix3d::Zero());
        IntensitySeries s = intensity(p, DelayKernel(0.5), make_series(random_counts(rng, 3, 20)));
        for (int n = 0; n < 20; ++n) CHECK(s.lambda.col(n).isApprox(p.mu));
    }
    SUBCASE("scalar hand evaluation") {
        HawkesParams p{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 0.5)};
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(1, 4);
        y(0, 0) = 2;
        IntensitySeries s = intensity(p, DelayKernel(0.5), make_series(y));
        CHECK(s.lambda(0, 0) == 1.0);
        CHECK(s.lambda(0, 1) == doctest::Approx(1.0 + 0.5 * 2 * 0.5 * std::exp(-0.5)));
        CHECK(s.lambda(0, 1) == doctest::Approx(1.30327).epsilon(1e-5));
        CHECK(s.lambda(0, 2) == doctest::Approx(1.0 + 0.5 * 2 * 0.5 * std::exp(-1.0)));
    }
    SUBCASE("dimension mismatch") {
        HawkesParams p = params3({1, 1, 1}, Eigen::Matrix3d::Zero());
        CHECK_THROWS_AS(intensity(p, DelayKernel(0.5), make_series(Eigen::MatrixXd::Zero(2, 5))),
                        std::invalid_argument);
    }
}

TEST_CASE("recursive intensity matches the direct double sum") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 10; ++k) {
        HawkesParams p = random_params(rng, 3);
        const double beta = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
        Eigen::MatrixXd y = random_counts(rng, 3, 10);
        Eigen::MatrixXd fast = intensity(p, DelayKernel(beta), make_series(y)).lambda;
        Eigen::MatrixXd slow = oracle::direct_intensity(p.mu, p.A, beta, y);
        CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
        for (int n = 0; n < 10; ++n) CHECK((fast.col(n) - p.mu).minCoeff() >= 0.0);
    }
}

TEST_CASE("log-likelihood examples") {
    const DelayKernel kernel(0.5);
    SUBCASE("zero counts with unit baseline") {
        HawkesParams p = params3({1, 1, 1}, Eigen::Matrix3d::Zero());
        CHECK(log_likelihood(p, kernel, {make_series(Eigen::MatrixXd::Zero(3, 2))}) == doctest::Approx(-6.0));
    }
    SUBCASE("scalar Poisson log-pmf") {
        HawkesParams p{Eigen::VectorXd::Constant(1, 2.0), Eigen::MatrixXd::Zero(1, 1)};
        double ll = log_likelihood(p, kernel, {make_series(Eigen::MatrixXd::Constant(1, 1, 3.0))});
        CHECK(ll == doctest::Approx(3 * std::log(2.0) - 2.0 - std::log(6.0)).epsilon(1e-12));
        CHECK(ll == doctest::Approx(-1.712318).epsilon(1e-6));
    }
    SUBCASE("independent series add") {
        std::mt19937_64 rng(4);
        HawkesParams p = random_params(rng, 3);
        CountSeries s = make_series(random_counts(rng, 3, 30));
        CHECK(log_likelihood(p, kernel, {s, s}) == doctest::Approx(2.0 * log_likelihood(p, kernel, {s})));
    }
    SUBCASE("order of series does not matter") {
        std::mt19937_64 rng(5);
        HawkesParams p = random_params(rng, 3);
        CountSeries a = make_series(random_counts(rng, 3, 30)), b = make_series(random_counts(rng, 3, 12), 1);
        CHECK(log_likelihood(p, kernel, {a, b}) == doctest::Approx(log_likelihood(p, kernel, {b, a})));
    }
    SUBCASE("matches the direct oracle") {
        std::mt19937_64 rng(6);
        HawkesParams p = random_params(rng, 3);
        std::vector<CountSeries> s = {make_series(random_counts(rng, 3, 25)), make_series(random_counts(rng, 3, 7))};
        CHECK(log_likelihood(p, kernel, s) == doctest::Approx(direct_ll(p, 0.5, s)).epsilon(1e-12));
    }
    SUBCASE("normalized counts use the log-gamma term") {
        HawkesParams p{Eigen::VectorXd::Constant(1, 1.5), Eigen::MatrixXd::Zero(1, 1)};
        double ll = log_likelihood(p, kernel, {make_series(Eigen::MatrixXd::Constant(1, 1, 0.5))});
        CHECK(ll == doctest::Approx(0.5 * std::log(1.5) - 1.5 - std::lgamma(1.5)));
    }
    SUBCASE("non-positive intensity is an error") {
        HawkesParams p = params3({0, 1, 1}, Eigen::Matrix3d::Zero());
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 2);
        y(0, 0) = 1;
        CHECK_THROWS_AS(log_likelihood(p, kernel, {make_series(y)}), std::domain_error);
    }
    SUBCASE("threads give identical sums") {
        std::mt19937_64 rng(8);
        HawkesParams p = random_params(rng, 3);
        std::vector<CountSeries> s;
        for (int k = 0; k < 9; ++k) s.push_back(make_series(random_counts(rng, 3, 40), k));
        CHECK(log_likelihood(p, kernel, s, 1) == log_likelihood(p, kernel, s, 4));
        LikelihoodGradient g1 = log_likelihood_gradient(p, kernel, s, 1);
        LikelihoodGradient g4 = log_likelihood_gradient(p, kernel, s, 4);
        CHECK(g1.d_A == g4.d_A);
        CHECK(g1.d_mu == g4.d_mu);
    }
}

TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937_64 rng(31);
    const DelayKernel kernel(0.5);
    for (int k = 0; k < 3; ++k) {
        HawkesParams p = random_params(rng, 3);
        std::vector<CountSeries> s = {make_series(random_counts(rng, 3, 40)), make_series(random_counts(rng, 3, 15))};
        LikelihoodGradient g = log_likelihood_gradient(p, kernel, s);
        CHECK(g.log_likelihood == doctest::Approx(log_likelihood(p, kernel, s)));

        Eigen::VectorXd x(12);
        x << p.mu, Eigen::Map<const Eigen::VectorXd>(p.A.data(), 9);
        auto f = [&](const Eigen::VectorXd& v) {
            HawkesParams q{v.head(3), Eigen::Map<const Eigen::MatrixXd>(v.data() + 3, 3, 3)};
            return direct_ll(q, 0.5, s);
        };
        for (int i = 0; i < 12; ++i) {
            double numeric = oracle::central_difference(f, x, i, 1e-6);
            double analytic = i < 3 ? g.d_mu(i) : g.d_A.data()[i - 3];
            CHECK(analytic == doctest::Approx(numeric).epsilon(1e-5));
        }
    }
}

TEST_CASE("fitting") {
    const DelayKernel kernel(0.5);
    SUBCASE("without excitation the baseline is the sample mean") {
        std::mt19937_64 rng(41);
        std::vector<CountSeries> s = {make_series(random_counts(rng, 3, 30)), make_series(random_counts(rng, 3, 20))};
        FitOptions opts;
        opts.fit_excitation = false;
        opts.initial = params3({2.0, 0.05, 1.0}, Eigen::Matrix3d::Zero());
        FitResult r = fit_mle(s, kernel, opts);
        Eigen::VectorXd mean = (s[0].counts.rowwise().sum() + s[1].counts.rowwise().sum()) / 50.0;
        CHECK((r.params.mu - mean).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(r.params.A.isZero());
        CHECK(r.report.converged);
    }
    SUBCASE("log-likelihood never decreases") {
        HawkesParams truth = params3({0.5, 0.3, 0.4}, 0.2 * Eigen::Matrix3d::Identity());
        std::vector<CountSeries> s = simulate_many(truth, kernel, 300, 5, 17);
        FitResult r = fit_mle(s, kernel);
        REQUIRE(r.report.ll_trace.size() >= 2);
        for (std::size_t i = 1; i < r.report.ll_trace.size(); ++i) {
            CHECK(r.report.ll_trace[i] >= r.report.ll_trace[i - 1]);
        }
        CHECK(r.report.final_ll == r.report.ll_trace.back());
        CHECK(r.params.mu.minCoeff() >= 1e-8);
        CHECK(r.params.A.minCoeff() >= 0.0);
    }
    SUBCASE("all-zero type sits on the floor") {
        Eigen::MatrixXd y = Eigen::MatrixXd::Ones(3, 20);
        y.row(2).setZero();
        FitResult r = fit_mle({make_series(y)}, kernel);
        CHECK(r.params.mu(2) <= 1e-6);
        CHECK(r.params.A.col(2).maxCoeff() >= 0.0);
    }
    SUBCASE("precondition errors") {
        CHECK_THROWS_AS(fit_mle({}, kernel), std::invalid_argument);
        CHECK_THROWS_AS(fit_mle({make_series(Eigen::MatrixXd::Ones(3, 1))}, kernel), std::invalid_argument);
        CHECK_THROWS_AS(
            fit_mle({make_series(Eigen::MatrixXd::Ones(3, 5)), make_series(Eigen::MatrixXd::Ones(2, 5))}, kernel),
            std::invalid_argument);
    }
    SUBCASE("fit report format") {
        FitReport rep;
        rep.iterations = 3;
        rep.final_ll = -1.5;
        rep.grad_norm = 0.25;
        rep.converged = true;
        std::ostringstream out;
        write_fit_report(out, rep);
        CHECK(out.str() == "iterations=3\nfinal_ll=-1.5\ngrad_norm=0.25\nconverged=true\n");
    }
}

TEST_CASE("simulation") {
    const DelayKernel kernel(0.5);
    SUBCASE("degenerate Poisson case") {
        HawkesParams p = params3({2, 2, 2}, Eigen::Matrix3d::Zero());
        CountSeries s = simulate(p, kernel, 100000, 5);
        for (int m = 0; m < 3; ++m) {
            double mean = s.counts.row(m).mean();
            CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(2.0 / 100000));
        }
        CHECK(s.counts.minCoeff() >= 0);
        CHECK((s.counts.array() == s.counts.array().round()).all());
    }
    SUBCASE("same seed, same series") {
        HawkesParams p = params3({0.5, 0.3, 0.4}, 0.2 * Eigen::Matrix3d::Identity());
        CHECK(simulate(p, kernel, 500, 7).counts == simulate(p, kernel, 500, 7).counts);
        CHECK(simulate(p, kernel, 500, 7).counts != simulate(p, kernel, 500, 8).counts);
        std::vector<CountSeries> many = simulate_many(p, kernel, 50, 4, 7);
        REQUIRE(many.size() == 4);
        CHECK(many[0].counts != many[1].counts);
        CHECK(simulate_many(p, kernel, 50, 4, 7)[3].counts == many[3].counts);
    }
    SUBCASE("stationary mean formula") {
        HawkesParams p = params3({0.5, 0.3, 0.4}, Eigen::Matrix3d::Zero());
        p.A << 0.2, 0.1, 0.0, 0.0, 0.3, 0.1, 0.05, 0.0, 0.2;
        const double c = 0.5 / (std::exp(0.5) - 1.0);
        // Fixed-point iteration of E = mu + c A E.
        Eigen::Vector3d e = p.mu;
        for (int i = 0; i < 500; ++i) e = p.mu + c * p.A * e;
        CHECK((stationary_mean(p, kernel) - e).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("unstable parameters are rejected") {
        HawkesParams p = params3({0.5, 0.3, 0.4}, 2.0 * Eigen::Matrix3d::Identity());
        CHECK(spectral_radius(kernel.total_mass() * p.A) > 1.0);
        CHECK_THROWS_AS(simulate(p, kernel, 10, 1), std::invalid_argument);
        CHECK_THROWS_AS(stationary_mean(p, kernel), std::invalid_argument);
    }
}

TEST_CASE("parameter csv") {
    HawkesParams p = params3({0.5, 0.3, 0.4}, 0.2 * Eigen::Matrix3d::Identity());
    p.A(0, 2) = 1.0 / 3.0;
    std::stringstream buf;
    write_params_csv(buf, p);
    CHECK(buf.str().rfind("mu_append,mu_extend,mu_mutate\n", 0) == 0);
    HawkesParams back = read_params_csv(buf);
    CHECK(back.mu == p.mu);
    CHECK(back.A == p.A);

    std::istringstream short_file("mu_append,mu_extend,mu_mutate\n1,1,1\n0,0,0\n");
    CHECK_THROWS_AS(read_params_csv(short_file), ParseError);
    std::istringstream negative("mu_append,mu_extend,mu_mutate\n1,-1,1\n0,0,0\n0,0,0\n0,0,0\n");
    CHECK_THROWS(read_params_csv(negative));
}
