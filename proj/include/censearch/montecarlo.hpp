#pragma once

#include "censearch/rng.hpp"
#include "censearch/scheme.hpp"
#include "censearch/weibull.hpp"

#include <vector>

namespace censearch {

/// One progressively censored Weibull sample.
struct CensoredSample {
    std::vector<double> times;  ///< X_{1:m:n} < ... < X_{m:m:n}, all > 0
    Scheme scheme;
};

/// Draws a sample by the exponential-spacings construction: independent
/// unit exponentials scaled by 1/gamma_i accumulate to -log-survival
/// values, and inverting the Weibull survival gives the ordered times.
/// O(m) per sample and exact in distribution.
CensoredSample simulate_sample(const Scheme& scheme, const WeibullParams& params, Rng& rng);

struct MleEstimate {
    double beta_hat;  ///< NaN unless converged
    double k_hat;     ///< NaN unless converged
    bool converged;
    int iterations;
};

/// Weibull maximum likelihood under progressive censoring: each unit
/// withdrawn at X_{i:m:n} contributes a survival factor, so the profile
/// equation in beta uses weights 1 + R_i. Solved by safeguarded Newton;
/// k follows in closed form.
///
/// converged=false (never an exception) when no root exists, e.g. m = 1,
/// or after 200 iterations. On success the profile residual is <= 1e-10.
MleEstimate fit_mle(const CensoredSample& sample);

/// One row of the asymptotic-variance validation table.
struct VarianceCheckRow {
    double s;
    double empirical;   ///< sample variance of ln X^hat_s over replications
    double asymptotic;  ///< delta-method value from the Fisher information
    double ratio;       ///< empirical / asymptotic
    long long replications;
    long long excluded;  ///< non-converged fits, excluded from the variance
};

/// Repeatedly simulates, fits, and evaluates the log-quantile plug-in
/// ln X^hat_s = -ln k^hat + g(s)/beta^hat on every grid point.
///
/// Replication r always uses rng.split(r), so the table is independent of
/// the worker count up to summation order within a worker's chunk.
/// Throws UnsupportedValue when replications < 1000 and NoConvergence
/// when more than 1% of fits fail.
std::vector<VarianceCheckRow> empirical_variance_check(const Scheme& scheme,
                                                       const WeibullParams& params,
                                                       const std::vector<double>& s_grid,
                                                       long long replications,
                                                       const Rng& rng, int workers = 1);

struct FinalTimeEstimate {
    double mean;       ///< empirical mean of X_{m:m:n}
    double std_error;  ///< of the mean
    long long replications;
};

/// Monte-Carlo estimate of E[X_{m:m:n}], the simulation-side counterpart
/// of expected_final_failure_time.
FinalTimeEstimate empirical_final_time(const Scheme& scheme, const WeibullParams& params,
                                       long long replications, const Rng& rng,
                                       int workers = 1);

}  // namespace censearch
