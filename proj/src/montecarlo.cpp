#include "censearch/montecarlo.hpp"

#include "censearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace censearch {

CensoredSample simulate_sample(const Scheme& scheme, const WeibullParams& params, Rng& rng) {
    WeibullParams::validate(params.beta, params.k);
    const int m = scheme.m();
    std::vector<double> gamma(static_cast<std::size_t>(m));
    {
        int tail = 0;
        for (int r = m; r >= 1; --r) {
            tail += scheme.removal(r - 1);
            gamma[static_cast<std::size_t>(r - 1)] = m - r + 1 + tail;
        }
    }
    std::vector<double> times(static_cast<std::size_t>(m));
    double cum = 0.0;  // -ln S(X_{r:m:n}), a.s. strictly increasing
    for (int r = 0; r < m; ++r) {
        cum += rng.exponential() / gamma[static_cast<std::size_t>(r)];
        times[static_cast<std::size_t>(r)] =
            std::pow(cum, 1.0 / params.beta) / params.k;
    }
    return CensoredSample{std::move(times), scheme};
}

namespace {

// Profile log-likelihood pieces, normalized by t_i = x_i / x_max so no
// power overflows and the equation is invariant under exact rescaling of
// the data (t is unchanged when every x is multiplied by a power of two).
struct ProfileEq {
    std::vector<double> log_t;  ///< ln t_i <= 0
    std::vector<double> w;      ///< 1 + R_i
    double sum_log_t = 0.0;
    double m = 0.0;

    explicit ProfileEq(const CensoredSample& sample) {
        const auto& x = sample.times;
        const double x_max = x.back();
        m = static_cast<double>(x.size());
        log_t.reserve(x.size());
        w.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double lt = std::log(x[i] / x_max);
            log_t.push_back(lt);
            sum_log_t += lt;
            w.push_back(1.0 + sample.scheme.removal(static_cast<int>(i)));
        }
    }

    // h(beta) = m/beta + sum ln t - m * (sum w t^b ln t) / (sum w t^b),
    // strictly decreasing whenever the t_i are not all equal.
    // Also reports h'(beta) for Newton.
    void eval(double beta, double& h, double& dh) const {
        double d = 0.0, num = 0.0, num2 = 0.0;
        for (std::size_t i = 0; i < log_t.size(); ++i) {
            const double tb = std::exp(beta * log_t[i]);
            const double wtb = w[i] * tb;
            d += wtb;
            num += wtb * log_t[i];
            num2 += wtb * log_t[i] * log_t[i];
        }
        const double g = num / d;
        h = m / beta + sum_log_t - m * g;
        dh = -m / (beta * beta) - m * (num2 / d - g * g);
    }

    double value(double beta) const {
        double h, dh;
        eval(beta, h, dh);
        return h;
    }

    // k^hat = (m / sum w t^b)^{1/b} / x_max; computed from t only, then
    // divided by x_max, so the scale-equivariance of the MLE is exact.
    double k_hat(double beta, double x_max) const {
        double d = 0.0;
        for (std::size_t i = 0; i < log_t.size(); ++i)
            d += w[i] * std::exp(beta * log_t[i]);
        return std::pow(m / d, 1.0 / beta) / x_max;
    }
};

constexpr int kMaxIterations = 200;
constexpr double kResidualTol = 1e-10;
constexpr double kBetaFloor = 1e-8;
constexpr double kBetaCeil = 1e8;

}  // namespace

MleEstimate fit_mle(const CensoredSample& sample) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (sample.times.empty()) throw BadDimensions("empty sample");
    if (sample.times.size() != static_cast<std::size_t>(sample.scheme.m()))
        throw BadDimensions("sample length does not match scheme");
    for (std::size_t i = 0; i < sample.times.size(); ++i) {
        if (!(sample.times[i] > 0.0)) throw NonPositive("failure times must be > 0");
        if (i > 0 && !(sample.times[i] > sample.times[i - 1]))
            throw UnsupportedValue("failure times must be strictly increasing");
    }

    const ProfileEq eq(sample);
    int used = 0;

    // All t equal (only possible when m = 1): h = m/beta > 0 everywhere,
    // beta unidentifiable.
    if (sample.times.size() == 1) return {nan, nan, false, used};

    // Bracket the root: h decreases from +inf (beta -> 0) to a negative
    // limit, so expand until the sign flips.
    double lo = 1.0, hi = 1.0;
    while (eq.value(lo) <= 0.0) {
        lo *= 0.5;
        if (++used > kMaxIterations || lo < kBetaFloor) return {nan, nan, false, used};
    }
    while (eq.value(hi) >= 0.0) {
        hi *= 2.0;
        if (++used > kMaxIterations || hi > kBetaCeil) return {nan, nan, false, used};
    }

    double beta = 0.5 * (lo + hi);
    double h, dh;
    while (used < kMaxIterations) {
        ++used;
        eq.eval(beta, h, dh);
        if (std::abs(h) <= kResidualTol) {
            return {beta, eq.k_hat(beta, sample.times.back()), true, used};
        }
        if (h > 0.0) lo = beta; else hi = beta;
        double next = beta - h / dh;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // bisect fallback
        beta = next;
    }
    return {nan, nan, false, used};
}

namespace {

// Streaming mean/variance accumulator; merge() preserves determinism when
// per-chunk accumulators are combined in chunk order.
struct Welford {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.count == 0) return;
        if (count == 0) { *this = o; return; }
        const double d = o.mean - mean;
        const long long n = count + o.count;
        mean += d * static_cast<double>(o.count) / static_cast<double>(n);
        m2 += o.m2 + d * d * static_cast<double>(count) *
                         static_cast<double>(o.count) / static_cast<double>(n);
        count = n;
    }

    double variance() const {  // sample variance
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
};

// Runs `body(rep, chunk_index)` for rep in [0, replications) across
// workers; chunks are contiguous so chunk-ordered reductions are stable.
template <class Body>
void parallel_replications(long long replications, int workers, int chunks, Body body) {
    if (workers <= 1 || chunks <= 1) {
        for (long long r = 0; r < replications; ++r) body(r, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    for (int c = 0; c < chunks; ++c) {
        const long long begin = replications * c / chunks;
        const long long end = replications * (c + 1) / chunks;
        pool.emplace_back([&body, begin, end, c] {
            for (long long r = begin; r < end; ++r) body(r, c);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<VarianceCheckRow> empirical_variance_check(const Scheme& scheme,
                                                       const WeibullParams& params,
                                                       const std::vector<double>& s_grid,
                                                       long long replications,
                                                       const Rng& rng, int workers) {
    if (replications < 1000)
        throw UnsupportedValue("variance check needs at least 1000 replications");
    if (s_grid.empty()) throw UnsupportedValue("empty quantile grid");
    for (double s : s_grid)
        if (!(s > 0.0) || !(s < 1.0))
            throw UnsupportedValue("quantile levels must lie in (0, 1)");
    if (workers < 1) throw UnsupportedValue("worker count must be >= 1");

    const int chunks = static_cast<int>(
        std::min<long long>(workers, std::max<long long>(replications, 1)));
    struct ChunkAcc {
        std::vector<Welford> per_s;
        long long excluded = 0;
    };
    std::vector<ChunkAcc> acc(static_cast<std::size_t>(chunks),
                              ChunkAcc{std::vector<Welford>(s_grid.size()), 0});

    parallel_replications(replications, workers, chunks, [&](long long rep, int c) {
        Rng child = rng.split(static_cast<std::uint64_t>(rep));
        const CensoredSample sample = simulate_sample(scheme, params, child);
        const MleEstimate est = fit_mle(sample);
        auto& chunk = acc[static_cast<std::size_t>(c)];
        if (!est.converged) {
            ++chunk.excluded;
            return;
        }
        const double neg_log_k = -std::log(est.k_hat);
        for (std::size_t j = 0; j < s_grid.size(); ++j) {
            const double g = std::log(-std::log1p(-s_grid[j]));
            chunk.per_s[j].add(neg_log_k + g / est.beta_hat);
        }
    });

    std::vector<Welford> totals(s_grid.size());
    long long excluded = 0;
    for (const auto& chunk : acc) {
        for (std::size_t j = 0; j < totals.size(); ++j) totals[j].merge(chunk.per_s[j]);
        excluded += chunk.excluded;
    }
    if (100 * excluded > replications)
        throw NoConvergence(std::to_string(excluded) + " of " +
                            std::to_string(replications) +
                            " fits failed (limit 1%); aggregate is untrustworthy");

    const FisherInfo info = fisher_information(scheme, params);
    const double beta = params.beta, k = params.k;
    std::vector<VarianceCheckRow> rows;
    rows.reserve(s_grid.size());
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
        const double g = std::log(-std::log1p(-s_grid[j]));
        const double asymptotic = info.inv11() * g * g / (beta * beta * beta * beta) +
                                  2.0 * info.inv12() * g / (beta * beta * k) +
                                  info.inv22() / (k * k);
        const double empirical = totals[j].variance();
        rows.push_back({s_grid[j], empirical, asymptotic, empirical / asymptotic,
                        replications, excluded});
    }
    return rows;
}

FinalTimeEstimate empirical_final_time(const Scheme& scheme, const WeibullParams& params,
                                       long long replications, const Rng& rng,
                                       int workers) {
    if (replications < 2) throw UnsupportedValue("need at least 2 replications");
    if (workers < 1) throw UnsupportedValue("worker count must be >= 1");

    const int chunks = static_cast<int>(std::min<long long>(workers, replications));
    std::vector<Welford> acc(static_cast<std::size_t>(chunks));
    parallel_replications(replications, workers, chunks, [&](long long rep, int c) {
        Rng child = rng.split(static_cast<std::uint64_t>(rep));
        const CensoredSample sample = simulate_sample(scheme, params, child);
        acc[static_cast<std::size_t>(c)].add(sample.times.back());
    });

    Welford total;
    for (const auto& chunk : acc) total.merge(chunk);
    const double se =
        std::sqrt(total.variance() / static_cast<double>(total.count));
    return FinalTimeEstimate{total.mean, se, replications};
}

}  // namespace censearch
