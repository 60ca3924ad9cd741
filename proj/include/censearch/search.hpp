#pragma once

#include "censearch/proposals.hpp"
#include "censearch/scheme.hpp"
#include "censearch/weibull.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace censearch {

/// Size of a partial update: either a fixed count in [1, m] or a fresh
/// uniform draw from {1..m} at every step.
struct M1Policy {
    std::optional<int> fixed;  ///< nullopt = uniform-random

    static M1Policy uniform_random() { return {std::nullopt}; }
    static M1Policy fixed_value(int v) { return {v}; }
};

struct SearchConfig {
    int n = 0;
    int m = 0;
    WeibullParams params{1.0, 1.0};
    CriterionSpec criterion{};
    ProposalKind proposal = ProposalKind::Multinomial;
    long long iterations = 1;  ///< proposal steps (n_it); the initial draw is extra
    std::uint64_t seed = 0;
    M1Policy m1{};
    bool trace = false;

    void validate() const;
};

struct TraceEntry {
    long long iteration;  ///< 0 is the initial draw, 1..n_it the proposals
    Scheme scheme;
    double psi;
    bool accepted;  ///< initial entry carries false
};

struct SearchReport {
    Scheme best_scheme;
    double best_psi;
    long long n_it;  ///< proposals attempted
    long long n_ac;  ///< proposals accepted
    std::uint64_t seed;
    bool extended_precision;  ///< some evaluation left plain double
    std::vector<TraceEntry> trace;  ///< empty unless configured
};

/// min{1, exp[(psi_old - psi_new) + (ld_old - ld_new)]}, the accept/reject
/// ratio for the target f = e^-psi under an independence-style proposal.
///
/// ld_new may be -inf; a zero-density candidate saturates the ratio to 1
/// (the bundled proposals never generate one, so the case is moot in a
/// live chain). ld_old = -inf means the chain sits in a state its own
/// proposal cannot produce, which is a bug upstream: InvalidDensity.
double acceptance_probability(double psi_old, double psi_new, double log_dens_old,
                              double log_dens_new);

/// psi_reference / psi_candidate; both must be > 0 (throws NonPositive).
double relative_efficiency(double psi_reference, double psi_candidate);

/// One accept/reject chain. Deterministic given config.seed; best-so-far
/// tracks every evaluated candidate, accepted or not, earliest-seen on ties.
SearchReport run_search(const SearchConfig& config);

/// Variant sharing a caller-owned evaluator (memoization across chains).
SearchReport run_search(const SearchConfig& config, const CriterionEvaluator& evaluator);

struct MultiSearchReport {
    std::vector<SearchReport> chains;  ///< chain c ran with seed split(c)
    int best_chain;                    ///< min psi, ties by lex scheme then index

    const SearchReport& best() const {
        return chains[static_cast<std::size_t>(best_chain)];
    }
};

/// Runs `chains` independent chains on split RNG streams, at most `workers`
/// at a time. The result is identical for any workers >= 1.
MultiSearchReport run_search_chains(const SearchConfig& config, int chains, int workers);

}  // namespace censearch
