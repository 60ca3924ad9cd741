#include "censearch/weibull.hpp"

#include "censearch/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <mutex>

namespace censearch {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

// Condition number sum|terms| / |sum terms| above which an alternating sum
// is recomputed in quad precision.
constexpr double kConditionLimit = 1e12;

template <class Real>
Real euler_gamma_const();
template <>
double euler_gamma_const<double>() {
    return 0.57721566490153286060651209008240243;
}
template <>
Quad euler_gamma_const<Quad>() {
    static const Quad value("0.577215664901532860606512090082402431042159335939923598805767");
    return value;
}

template <class Real>
Real pi_sq_over_6_const();
template <>
double pi_sq_over_6_const<double>() {
    return 1.64493406684822643647241516664602519;
}
template <>
Quad pi_sq_over_6_const<Quad>() {
    static const Quad value("1.644934066848226436472415166646025189218949901206798437735558");
    return value;
}

// Integer gamma_r = m - r + 1 + sum_{i>=r} R_i for r = 1..m.
std::vector<long long> gamma_ints(const Scheme& scheme) {
    const int m = scheme.m();
    std::vector<long long> gamma(static_cast<std::size_t>(m));
    long long tail = 0;
    for (int r = m; r >= 1; --r) {
        tail += scheme.removal(r - 1);
        gamma[static_cast<std::size_t>(r - 1)] = m - r + 1 + tail;
    }
    return gamma;
}

// gamma, sigma and the lower-triangular a_{i,r} in the requested precision.
// a is built incrementally: a_{i,r} = a_{i,r-1} / (gamma_r - gamma_i).
template <class Real>
struct Coeffs {
    std::vector<Real> gamma;  // gamma_1..gamma_m
    std::vector<Real> sigma;  // sigma_0..sigma_{m-1}
    std::vector<Real> a;      // packed rows, row r at offset r(r-1)/2

    Real a_at(int i, int r) const {
        return a[static_cast<std::size_t>(r) * (r - 1) / 2 + (i - 1)];
    }
};

template <class Real>
Coeffs<Real> build_coeffs(const std::vector<long long>& gamma) {
    const int m = static_cast<int>(gamma.size());
    Coeffs<Real> c;
    c.gamma.reserve(gamma.size());
    for (long long g : gamma) c.gamma.push_back(static_cast<Real>(g));

    c.sigma.resize(gamma.size());
    Real prod = 1;
    for (int r = 1; r <= m; ++r) {
        prod *= c.gamma[static_cast<std::size_t>(r - 1)];
        c.sigma[static_cast<std::size_t>(r - 1)] = prod;
    }

    c.a.resize(static_cast<std::size_t>(m) * (m + 1) / 2);
    c.a[0] = 1;  // a_{1,1}
    for (int r = 2; r <= m; ++r) {
        const std::size_t row = static_cast<std::size_t>(r) * (r - 1) / 2;
        const std::size_t prev = static_cast<std::size_t>(r - 1) * (r - 2) / 2;
        Real diag = 1;
        for (int i = 1; i < r; ++i) {
            const Real diff = c.gamma[static_cast<std::size_t>(r - 1)] -
                              c.gamma[static_cast<std::size_t>(i - 1)];
            c.a[row + static_cast<std::size_t>(i - 1)] = c.a[prev + static_cast<std::size_t>(i - 1)] / diff;
            diag *= c.gamma[static_cast<std::size_t>(i - 1)] -
                    c.gamma[static_cast<std::size_t>(r - 1)];
        }
        c.a[row + static_cast<std::size_t>(r - 1)] = Real(1) / diag;
    }
    return c;
}

template <class Real>
double to_double(const Real& x) {
    return static_cast<double>(x);
}

// sum_p sigma_{m-1} a_{p,m} / gamma_p^expo; also reports sum of magnitudes.
template <class Real>
std::pair<Real, Real> final_time_sum(const Coeffs<Real>& c, const Real& expo) {
    using std::abs;
    using std::pow;
    const int m = static_cast<int>(c.gamma.size());
    const Real sigma = c.sigma.back();
    Real sum = 0;
    Real sum_abs = 0;
    for (int p = 1; p <= m; ++p) {
        const Real term = sigma * c.a_at(p, m) / pow(c.gamma[static_cast<std::size_t>(p - 1)], expo);
        sum += term;
        sum_abs += abs(term);
    }
    return {sum, sum_abs};
}

template <class Real>
struct FisherSums {
    Real i11 = 0, i12 = 0, i22 = 0;
    Real abs11 = 0, abs12 = 0, abs22 = 0;
};

// The three double sums of the Fisher entries, without the beta/k prefactors.
template <class Real>
FisherSums<Real> fisher_sums(const Coeffs<Real>& c) {
    using std::abs;
    using std::log;
    const int m = static_cast<int>(c.gamma.size());
    const Real euler = euler_gamma_const<Real>();
    const Real pi6 = pi_sq_over_6_const<Real>();

    std::vector<Real> q1(static_cast<std::size_t>(m));  // c_j - euler
    std::vector<Real> q2(static_cast<std::size_t>(m));  // (c_j - euler)^2 + pi^2/6
    for (int j = 1; j <= m; ++j) {
        const Real cj = Real(1) - log(c.gamma[static_cast<std::size_t>(j - 1)]);
        q1[static_cast<std::size_t>(j - 1)] = cj - euler;
        q2[static_cast<std::size_t>(j - 1)] = (cj - euler) * (cj - euler) + pi6;
    }

    FisherSums<Real> s;
    for (int i = 1; i <= m; ++i) {
        const Real sigma = c.sigma[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= i; ++j) {
            const Real base = sigma * c.a_at(j, i) / c.gamma[static_cast<std::size_t>(j - 1)];
            const Real t11 = base * q2[static_cast<std::size_t>(j - 1)];
            const Real t12 = base * q1[static_cast<std::size_t>(j - 1)];
            s.i11 += t11;
            s.i12 += t12;
            s.i22 += base;
            s.abs11 += abs(t11);
            s.abs12 += abs(t12);
            s.abs22 += abs(base);
        }
    }
    return s;
}

bool ill_conditioned(double sum, double sum_abs) {
    if (!std::isfinite(sum) || !std::isfinite(sum_abs)) return true;
    if (sum == 0.0) return sum_abs != 0.0;
    return sum_abs / std::abs(sum) > kConditionLimit;
}

void mark_extended(PrecisionDiag* diag) {
    if (diag != nullptr) diag->extended = true;
}

}  // namespace

WeibullParams WeibullParams::validate(double beta, double k) {
    if (!(beta > 0.0) || !(k > 0.0)) {
        throw NonPositive("Weibull parameters must be positive, got beta=" + std::to_string(beta) +
                          " k=" + std::to_string(k));
    }
    if (beta < 0.05) {
        throw NonPositive("Weibull shape below sanity bound 0.05: " + std::to_string(beta));
    }
    return WeibullParams{beta, k};
}

CostCoefficients CostCoefficients::validate(double c_o, double c_f, double c_t) {
    if (c_o < 0.0 || c_f < 0.0 || c_t < 0.0) {
        throw Error("cost coefficients must be non-negative");
    }
    return CostCoefficients{c_o, c_f, c_t};
}

KampsCramerCoeffs kamps_cramer(const Scheme& scheme) {
    const auto gamma = gamma_ints(scheme);
    const auto c = build_coeffs<double>(gamma);
    KampsCramerCoeffs out;
    out.m = scheme.m();
    out.gamma = c.gamma;
    out.sigma = c.sigma;
    out.a = c.a;
    return out;
}

double expected_final_failure_time(const Scheme& scheme, const WeibullParams& params,
                                   PrecisionDiag* diag) {
    const auto gamma = gamma_ints(scheme);
    const double expo = 1.0 + 1.0 / params.beta;

    auto [sum, sum_abs] = final_time_sum(build_coeffs<double>(gamma), expo);
    if (ill_conditioned(sum, sum_abs)) {
        mark_extended(diag);
        sum = to_double(final_time_sum(build_coeffs<Quad>(gamma), Quad(expo)).first);
    }
    return std::exp(std::lgamma(expo)) * sum / params.k;
}

FisherInfo fisher_information(const Scheme& scheme, const WeibullParams& params,
                              PrecisionDiag* diag) {
    const auto gamma = gamma_ints(scheme);

    auto s = fisher_sums(build_coeffs<double>(gamma));
    if (ill_conditioned(s.i11, s.abs11) || ill_conditioned(s.i12, s.abs12) ||
        ill_conditioned(s.i22, s.abs22)) {
        mark_extended(diag);
        const auto q = fisher_sums(build_coeffs<Quad>(gamma));
        s.i11 = to_double(q.i11);
        s.i12 = to_double(q.i12);
        s.i22 = to_double(q.i22);
    }

    const double beta = params.beta;
    const double k = params.k;
    return FisherInfo{s.i11 / (beta * beta), s.i12 / k, s.i22 * (beta / k) * (beta / k)};
}

double variance_criterion(const Scheme& scheme, const WeibullParams& params, PrecisionDiag* diag) {
    PrecisionDiag local;
    FisherInfo info = fisher_information(scheme, params, &local);
    if (!(info.det() > 0.0) && !local.extended) {
        // Force the quad path once before declaring the matrix singular.
        local.extended = true;
        const auto q = fisher_sums(build_coeffs<Quad>(gamma_ints(scheme)));
        const double beta = params.beta;
        const double k = params.k;
        info = FisherInfo{to_double(q.i11) / (beta * beta), to_double(q.i12) / k,
                          to_double(q.i22) * (beta / k) * (beta / k)};
    }
    if (local.extended) mark_extended(diag);
    if (!(info.det() > 0.0)) {
        throw SingularInformation("Fisher information not positive definite for scheme " +
                                  to_csv_string(scheme));
    }

    const double euler = euler_gamma_const<double>();
    const double int_g = -euler;                            // int_0^1 g(s) ds
    const double int_g2 = euler * euler + pi_sq_over_6_const<double>();  // int_0^1 g(s)^2 ds

    const double beta2 = params.beta * params.beta;
    return info.inv11() / (beta2 * beta2) * int_g2 +
           2.0 * info.inv12() / (beta2 * params.k) * int_g + info.inv22() / (params.k * params.k);
}

double cost_criterion(const Scheme& scheme, const WeibullParams& params,
                      const CostCoefficients& costs, PrecisionDiag* diag) {
    return costs.c_o + costs.c_f * scheme.m() +
           costs.c_t * expected_final_failure_time(scheme, params, diag);
}

double criterion_transform(double psi) {
    return std::exp(-psi);
}

CriterionEvaluator::CriterionEvaluator(WeibullParams params, CriterionSpec spec, bool memoize)
    : params_(params), spec_(spec), memoize_(memoize) {}

double CriterionEvaluator::compute(const Scheme& scheme) const {
    PrecisionDiag diag;
    const double psi = spec_.kind == CriterionSpec::Kind::Variance
                           ? variance_criterion(scheme, params_, &diag)
                           : cost_criterion(scheme, params_, spec_.costs, &diag);
    if (diag.extended) extended_.store(true, std::memory_order_relaxed);
    return psi;
}

double CriterionEvaluator::operator()(const Scheme& scheme) const {
    if (!memoize_) return compute(scheme);
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(scheme.removals());
        if (it != cache_.end()) return it->second;
    }
    // Duplicate evaluation on a race is fine; psi is pure and deterministic.
    const double psi = compute(scheme);
    {
        std::unique_lock lock(mutex_);
        cache_.emplace(scheme.removals(), psi);
    }
    return psi;
}

}  // namespace censearch
