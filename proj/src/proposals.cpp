#include "censearch/proposals.hpp"

#include "censearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace censearch {

std::string to_string(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::Multinomial: return "multinomial";
        case ProposalKind::UniformSequential: return "uniform";
        case ProposalKind::MultivariateHypergeometric: return "mvhg";
    }
    throw UnsupportedValue("unknown proposal kind");
}

std::optional<ProposalKind> proposal_from_string(const std::string& name) {
    if (name == "multinomial") return ProposalKind::Multinomial;
    if (name == "uniform") return ProposalKind::UniformSequential;
    if (name == "mvhg") return ProposalKind::MultivariateHypergeometric;
    return std::nullopt;
}

UpdateSelection draw_update_selection(int m, int m1, Rng& rng) {
    if (m1 < 1 || m1 > m) throw UnsupportedValue("update size must be in {1..m}");
    // Partial Fisher-Yates over {0..m-1}; the first m1 slots are the sample.
    std::vector<int> pool(static_cast<std::size_t>(m));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m1; ++i) {
        const int j = rng.uniform_range(i, m - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    UpdateSelection sel;
    sel.positions.assign(pool.begin(), pool.begin() + m1);
    std::sort(sel.positions.begin(), sel.positions.end());
    return sel;
}

namespace {

// Drops `trials` balls one at a time into cells chosen by cumulative
// probability. O(trials * cells), exact for the small m used here.
std::vector<int> multinomial_draw(int trials, const std::vector<double>& p, Rng& rng) {
    std::vector<int> counts(p.size(), 0);
    if (p.empty()) return counts;
    for (int t = 0; t < trials; ++t) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t cell = p.size() - 1;  // absorbs any rounding shortfall
        for (std::size_t j = 0; j + 1 < p.size(); ++j) {
            acc += p[j];
            if (u < acc) {
                cell = j;
                break;
            }
        }
        ++counts[cell];
    }
    return counts;
}

double log_factorial(int v) { return std::lgamma(static_cast<double>(v) + 1.0); }

}  // namespace

std::pair<Scheme, MultinomialState> multinomial_init(int n, int m, Rng& rng) {
    MultinomialState state;
    state.p.resize(static_cast<std::size_t>(m));
    double total = 0.0;
    for (double& v : state.p) {
        // (0,1] keeps every cell probability strictly positive.
        v = 1.0 - rng.uniform01();
        total += v;
    }
    for (double& v : state.p) v /= total;
    auto counts = multinomial_draw(n - m, state.p, rng);
    return {Scheme::validate(n, m, std::move(counts)), std::move(state)};
}

Scheme multinomial_update(const Scheme& old_scheme, const MultinomialState& state, int m1,
                          Rng& rng) {
    const int m = old_scheme.m();
    if (state.p.size() != static_cast<std::size_t>(m))
        throw BadDimensions("multinomial state does not match scheme length");
    const auto sel = draw_update_selection(m, m1, rng);

    int sub_total = 0;
    double p_sel = 0.0;
    for (int pos : sel.positions) {
        sub_total += old_scheme.removal(pos);
        p_sel += state.p[static_cast<std::size_t>(pos)];
    }

    std::vector<double> q(sel.positions.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = state.p[static_cast<std::size_t>(sel.positions[i])] / p_sel;

    auto removals = old_scheme.removals();
    const auto sub = multinomial_draw(sub_total, q, rng);
    for (std::size_t i = 0; i < sub.size(); ++i)
        removals[static_cast<std::size_t>(sel.positions[i])] = sub[i];
    return Scheme::validate(old_scheme.n(), m, std::move(removals));
}

double multinomial_log_density(const Scheme& scheme, const MultinomialState& state) {
    if (state.p.size() != static_cast<std::size_t>(scheme.m()))
        throw BadDimensions("multinomial state does not match scheme length");
    double ld = log_factorial(scheme.n() - scheme.m());
    for (int i = 0; i < scheme.m(); ++i) {
        const int r = scheme.removal(i);
        ld -= log_factorial(r);
        if (r > 0) ld += r * std::log(state.p[static_cast<std::size_t>(i)]);
    }
    return ld;
}

UniformDraw uniform_sequential_sample(int n, int m, std::optional<int> cap, Rng& rng) {
    const int budget = n - m;
    std::vector<int> removals(static_cast<std::size_t>(m), 0);
    double ld = 0.0;
    int remaining = budget;
    for (int j = 0; j + 1 < m; ++j) {
        int bound = remaining;
        if (j == 0 && cap.has_value()) bound = std::min(bound, *cap);
        const int r = rng.uniform_range(0, bound);
        removals[static_cast<std::size_t>(j)] = r;
        ld -= std::log(static_cast<double>(bound) + 1.0);
        remaining -= r;
    }
    removals[static_cast<std::size_t>(m - 1)] = remaining;  // forced, no density factor
    return {Scheme::validate(n, m, std::move(removals)), ld};
}

namespace {

// MVHG sampled as an urn process: each ball lands in a cell with
// probability proportional to that cell's remaining capacity.
std::vector<int> mvhg_draw(const std::vector<long long>& caps, long long total, int balls,
                           Rng& rng) {
    std::vector<long long> left = caps;
    std::vector<int> counts(caps.size(), 0);
    long long total_left = total;
    for (int t = 0; t < balls; ++t) {
        const std::uint64_t pick =
            rng.uniform_below(static_cast<std::uint64_t>(total_left) - 1);
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < left.size(); ++j) {
            acc += static_cast<std::uint64_t>(left[j]);
            if (pick < acc) {
                ++counts[j];
                --left[j];
                break;
            }
        }
        --total_left;
    }
    return counts;
}

double log_binomial(long long n, long long k) {
    return log_factorial(static_cast<int>(n)) - log_factorial(static_cast<int>(k)) -
           log_factorial(static_cast<int>(n - k));
}

}  // namespace

Scheme mvhg_init(int n, int m, Rng& rng) {
    const long long cell = n - m;
    if (cell == 0) return Scheme::validate(n, m, std::vector<int>(static_cast<std::size_t>(m), 0));
    std::vector<long long> caps(static_cast<std::size_t>(m), cell);
    auto counts = mvhg_draw(caps, cell * m, n - m, rng);
    return Scheme::validate(n, m, std::move(counts));
}

Scheme mvhg_update(const Scheme& old_scheme, int m1, Rng& rng) {
    const int m = old_scheme.m();
    const auto sel = draw_update_selection(m, m1, rng);
    long long sub_total = 0;
    for (int pos : sel.positions) sub_total += old_scheme.removal(pos);

    auto removals = old_scheme.removals();
    if (sub_total > 0) {
        std::vector<long long> caps(sel.positions.size(), sub_total);
        const auto sub =
            mvhg_draw(caps, sub_total * static_cast<long long>(sel.positions.size()),
                      static_cast<int>(sub_total), rng);
        for (std::size_t i = 0; i < sub.size(); ++i)
            removals[static_cast<std::size_t>(sel.positions[i])] = sub[i];
    }
    return Scheme::validate(old_scheme.n(), m, std::move(removals));
}

double mvhg_log_density(const Scheme& scheme, const std::vector<long long>& cell_caps,
                        long long total_m, int total_r) {
    if (cell_caps.size() != static_cast<std::size_t>(scheme.m()))
        throw BadDimensions("cell capacities do not match scheme length");
    double ld = -log_binomial(total_m, total_r);
    for (int i = 0; i < scheme.m(); ++i) {
        const long long cap = cell_caps[static_cast<std::size_t>(i)];
        const int r = scheme.removal(i);
        if (r > cap) throw UnsupportedValue("removal exceeds cell capacity");
        ld += log_binomial(cap, r);
    }
    return ld;
}

namespace {

class MultinomialChain final : public ProposalChain {
  public:
    MultinomialChain(int n, int m) : n_(n), m_(m) {}

    Draw init(Rng& rng) override {
        auto [scheme, state] = multinomial_init(n_, m_, rng);
        state_ = std::move(state);
        return {scheme, multinomial_log_density(scheme, state_)};
    }

    Draw update(const Scheme& current, int m1, Rng& rng) override {
        Scheme next = multinomial_update(current, state_, m1, rng);
        const double ld = multinomial_log_density(next, state_);
        return {std::move(next), ld};
    }

  private:
    int n_;
    int m_;
    MultinomialState state_;
};

class UniformChain final : public ProposalChain {
  public:
    UniformChain(int n, int m) : n_(n), m_(m) {}

    Draw init(Rng& rng) override {
        auto [scheme, ld] = uniform_sequential_sample(n_, m_, std::nullopt, rng);
        return {std::move(scheme), ld};
    }

    Draw update(const Scheme& current, int /*m1*/, Rng& rng) override {
        // Anchor the fresh pass on one coordinate of the current scheme so
        // consecutive states stay correlated.
        const int pos = rng.uniform_range(0, m_ - 1);
        const int cap = n_ - m_ - current.removal(pos);
        auto [scheme, ld] = uniform_sequential_sample(n_, m_, cap, rng);
        return {std::move(scheme), ld};
    }

  private:
    int n_;
    int m_;
};

class MvhgChain final : public ProposalChain {
  public:
    MvhgChain(int n, int m)
        : n_(n), m_(m), caps_(static_cast<std::size_t>(m), n - m),
          total_m_(static_cast<long long>(m) * (n - m)) {}

    Draw init(Rng& rng) override {
        Scheme scheme = mvhg_init(n_, m_, rng);
        const double ld = density(scheme);
        return {std::move(scheme), ld};
    }

    Draw update(const Scheme& current, int m1, Rng& rng) override {
        Scheme next = mvhg_update(current, m1, rng);
        const double ld = density(next);
        return {std::move(next), ld};
    }

  private:
    double density(const Scheme& scheme) const {
        if (n_ == m_) return 0.0;  // single point mass
        return mvhg_log_density(scheme, caps_, total_m_, n_ - m_);
    }

    int n_;
    int m_;
    std::vector<long long> caps_;
    long long total_m_;
};

}  // namespace

std::unique_ptr<ProposalChain> make_proposal_chain(ProposalKind kind, int n, int m) {
    Scheme::validate(n, m, [&] {
        std::vector<int> r(static_cast<std::size_t>(m), 0);
        if (m > 0) r.back() = n - m;
        return r;
    }());
    switch (kind) {
        case ProposalKind::Multinomial: return std::make_unique<MultinomialChain>(n, m);
        case ProposalKind::UniformSequential: return std::make_unique<UniformChain>(n, m);
        case ProposalKind::MultivariateHypergeometric:
            return std::make_unique<MvhgChain>(n, m);
    }
    throw UnsupportedValue("unknown proposal kind");
}

}  // namespace censearch
