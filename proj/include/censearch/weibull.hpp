#pragma once

#include "censearch/scheme.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

namespace censearch {

/// Weibull lifetime model F(x) = 1 - exp(-(k x)^beta).
struct WeibullParams {
    double beta;  ///< shape, > 0 (sanity bound: >= 0.05)
    double k;     ///< scale, > 0

    static WeibullParams validate(double beta, double k);
};

/// Coefficients of the Kamps-Cramer mixture representation of the
/// progressively censored order-statistic densities.
///
///   gamma_r  = m - r + 1 + sum_{i>=r} R_i          (strictly decreasing)
///   sigma_{r-1} = prod_{i<=r} gamma_i
///   a_{i,r}  = prod_{j<=r, j!=i} 1 / (gamma_j - gamma_i)
struct KampsCramerCoeffs {
    int m = 0;
    std::vector<double> gamma;  ///< gamma_1..gamma_m
    std::vector<double> sigma;  ///< sigma_0..sigma_{m-1}
    std::vector<double> a;      ///< lower triangle, row r holds a_{1,r}..a_{r,r}

    /// a_{i,r} with 1-based indices, 1 <= i <= r <= m.
    double a_at(int i, int r) const {
        return a[static_cast<std::size_t>(r) * (r - 1) / 2 + (i - 1)];
    }
};

KampsCramerCoeffs kamps_cramer(const Scheme& scheme);

/// Symmetric 2x2 Fisher information about (beta, k); positive definite
/// for every valid scheme.
struct FisherInfo {
    double i11;
    double i12;
    double i22;

    double det() const { return i11 * i22 - i12 * i12; }
    double inv11() const { return i22 / det(); }
    double inv12() const { return -i12 / det(); }
    double inv22() const { return i11 / det(); }
};

/// Set when a computation had to leave plain double precision.
///
/// The alternating Kamps-Cramer sums are condition-tracked; above a
/// condition number of 1e12 the affected sum is recomputed in quad
/// precision and `extended` is flagged. Passing nullptr is fine.
struct PrecisionDiag {
    bool extended = false;
};

/// E[X_{m:m:n}] under the Weibull model, closed form.
double expected_final_failure_time(const Scheme& scheme, const WeibullParams& params,
                                   PrecisionDiag* diag = nullptr);

/// Fisher information with the inner integrals in closed form:
/// with c_j = 1 - ln gamma_j,
///   int_0^inf (1 + ln(z/gamma_j))   e^-z dz = c_j - euler_gamma
///   int_0^inf (1 + ln(z/gamma_j))^2 e^-z dz = (c_j - euler_gamma)^2 + pi^2/6
FisherInfo fisher_information(const Scheme& scheme, const WeibullParams& params,
                              PrecisionDiag* diag = nullptr);

/// Integrated asymptotic variance of the log-quantile estimates,
///   int_0^1 Var[ln X^hat_s] ds
/// evaluated with int_0^1 g = -euler_gamma and int_0^1 g^2 =
/// euler_gamma^2 + pi^2/6 for g(s) = ln(-ln(1-s)). Scale-invariant in k.
double variance_criterion(const Scheme& scheme, const WeibullParams& params,
                          PrecisionDiag* diag = nullptr);

/// Test-budget coefficients for the cost criterion.
struct CostCoefficients {
    double c_o = 0.0;  ///< fixed overhead cost
    double c_f = 0.0;  ///< cost per observed failure
    double c_t = 0.0;  ///< cost per unit of test duration

    static CostCoefficients validate(double c_o, double c_f, double c_t);
};

/// c_o + c_f * m + c_t * E[X_{m:m:n}].
double cost_criterion(const Scheme& scheme, const WeibullParams& params,
                      const CostCoefficients& costs, PrecisionDiag* diag = nullptr);

/// Monotone decreasing transform e^-psi mapping the criterion into (0, 1].
double criterion_transform(double psi);

/// Which criterion a search or oracle run minimizes.
struct CriterionSpec {
    enum class Kind { Variance, Cost };

    Kind kind = Kind::Variance;
    CostCoefficients costs{};

    static CriterionSpec variance() { return CriterionSpec{Kind::Variance, {}}; }
    static CriterionSpec cost(CostCoefficients c) { return CriterionSpec{Kind::Cost, c}; }
};

/// Memoizing psi evaluator for one (params, criterion) pair.
///
/// psi is pure and the accept/reject chain revisits schemes, so values are
/// cached per removal vector. The cache tolerates duplicate evaluation
/// under concurrency but never returns a torn value.
class CriterionEvaluator {
  public:
    CriterionEvaluator(WeibullParams params, CriterionSpec spec, bool memoize = true);

    double operator()(const Scheme& scheme) const;

    const WeibullParams& params() const { return params_; }
    const CriterionSpec& spec() const { return spec_; }
    /// True if any evaluation needed the extended-precision path.
    bool extended_precision_seen() const { return extended_.load(std::memory_order_relaxed); }

  private:
    struct RemovalsHash {
        std::size_t operator()(const std::vector<int>& r) const {
            std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
            for (int v : r) {
                h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
                h *= 1099511628211ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };

    double compute(const Scheme& scheme) const;

    WeibullParams params_;
    CriterionSpec spec_;
    bool memoize_;
    mutable std::atomic<bool> extended_{false};
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::vector<int>, double, RemovalsHash> cache_;
};

}  // namespace censearch
