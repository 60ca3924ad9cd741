#include "censearch/search.hpp"

#include "censearch/errors.hpp"
#include "censearch/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

namespace censearch {

void SearchConfig::validate() const {
    WeibullParams::validate(params.beta, params.k);
    if (iterations < 1) throw UnsupportedValue("iterations must be >= 1");
    if (m1.fixed && (*m1.fixed < 1 || *m1.fixed > m))
        throw UnsupportedValue("fixed m1 must be in [1, m]");
    // Proves (n, m) admits a scheme at all.
    std::vector<int> r(static_cast<std::size_t>(std::max(m, 0)), 0);
    if (!r.empty()) r.back() = n - m;
    Scheme::validate(n, m, std::move(r));
}

double acceptance_probability(double psi_old, double psi_new, double log_dens_old,
                              double log_dens_new) {
    if (std::isinf(log_dens_old) && log_dens_old < 0)
        throw InvalidDensity("current state has zero proposal density");
    const double log_alpha = (psi_old - psi_new) + (log_dens_old - log_dens_new);
    if (log_alpha >= 0.0) return 1.0;
    return std::exp(log_alpha);
}

double relative_efficiency(double psi_reference, double psi_candidate) {
    if (!(psi_reference > 0.0) || !(psi_candidate > 0.0))
        throw NonPositive("relative efficiency needs positive criterion values");
    return psi_reference / psi_candidate;
}

SearchReport run_search(const SearchConfig& config) {
    const CriterionEvaluator evaluator(config.params, config.criterion);
    return run_search(config, evaluator);
}

SearchReport run_search(const SearchConfig& config, const CriterionEvaluator& evaluator) {
    config.validate();
    Rng rng(config.seed);
    auto chain = make_proposal_chain(config.proposal, config.n, config.m);

    ProposalChain::Draw current = chain->init(rng);
    double psi_current = evaluator(current.scheme);

    Scheme best_scheme = current.scheme;
    double best_psi = psi_current;

    SearchReport report{best_scheme, best_psi, config.iterations, 0,
                        config.seed,  false,    {}};
    if (config.trace) {
        report.trace.reserve(static_cast<std::size_t>(config.iterations) + 1);
        report.trace.push_back({0, current.scheme, psi_current, false});
    }

    for (long long it = 1; it <= config.iterations; ++it) {
        const int m1 =
            config.m1.fixed ? *config.m1.fixed : rng.uniform_range(1, config.m);
        ProposalChain::Draw candidate = chain->update(current.scheme, m1, rng);
        const double psi_new = evaluator(candidate.scheme);

        const double alpha = acceptance_probability(psi_current, psi_new,
                                                    current.log_density,
                                                    candidate.log_density);
        const bool accepted = rng.uniform01() < alpha;

        if (psi_new < best_psi) {
            best_psi = psi_new;
            best_scheme = candidate.scheme;
        }
        if (config.trace)
            report.trace.push_back({it, candidate.scheme, psi_new, accepted});
        if (accepted) {
            current = std::move(candidate);
            psi_current = psi_new;
            ++report.n_ac;
        }
    }

    report.best_scheme = std::move(best_scheme);
    report.best_psi = best_psi;
    report.extended_precision = evaluator.extended_precision_seen();
    return report;
}

MultiSearchReport run_search_chains(const SearchConfig& config, int chains, int workers) {
    if (chains < 1) throw UnsupportedValue("chain count must be >= 1");
    if (workers < 1) throw UnsupportedValue("worker count must be >= 1");
    config.validate();

    const CriterionEvaluator evaluator(config.params, config.criterion);
    const Rng base(config.seed);

    std::vector<std::optional<SearchReport>> slots(static_cast<std::size_t>(chains));
    const auto run_one = [&](int c) {
        SearchConfig chain_config = config;
        chain_config.seed = base.split(static_cast<std::uint64_t>(c)).seed();
        slots[static_cast<std::size_t>(c)] = run_search(chain_config, evaluator);
    };

    if (workers == 1 || chains == 1) {
        for (int c = 0; c < chains; ++c) run_one(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int count = std::min(workers, chains);
        pool.reserve(static_cast<std::size_t>(count));
        for (int w = 0; w < count; ++w)
            pool.emplace_back([&] {
                for (int c = next.fetch_add(1); c < chains; c = next.fetch_add(1))
                    run_one(c);
            });
        for (auto& t : pool) t.join();
    }

    MultiSearchReport multi;
    multi.chains.reserve(static_cast<std::size_t>(chains));
    for (auto& slot : slots) multi.chains.push_back(std::move(*slot));

    // Reduce by (psi, lex scheme, chain index) so the winner does not
    // depend on scheduling.
    multi.best_chain = 0;
    for (int c = 1; c < chains; ++c) {
        const auto& best = multi.chains[static_cast<std::size_t>(multi.best_chain)];
        const auto& cand = multi.chains[static_cast<std::size_t>(c)];
        if (cand.best_psi < best.best_psi ||
            (cand.best_psi == best.best_psi &&
             lex_less(cand.best_scheme, best.best_scheme)))
            multi.best_chain = c;
    }
    return multi;
}

}  // namespace censearch
