#include "censearch/oracle.hpp"

#include "censearch/errors.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace censearch {

namespace {

struct ChunkBest {
    std::optional<Scheme> scheme;
    double psi = 0.0;
};

// Scans [begin_rank, end_rank) of the lexicographic stream. No memoization:
// every scheme is visited exactly once.
ChunkBest scan_chunk(int n, int m, const BigInt& begin_rank, std::uint64_t count,
                     const CriterionEvaluator& evaluator) {
    ChunkBest best;
    SchemeEnumerator stream(n, m, begin_rank);
    for (std::uint64_t i = 0; i < count; ++i) {
        auto scheme = stream.next();
        const double psi = evaluator(*scheme);
        if (!best.scheme || psi < best.psi ||
            (psi == best.psi && lex_less(*scheme, *best.scheme))) {
            best.scheme = std::move(*scheme);
            best.psi = psi;
        }
    }
    return best;
}

}  // namespace

OracleResult exhaustive_search(int n, int m, const WeibullParams& params,
                               const CriterionSpec& criterion, std::uint64_t budget,
                               int workers) {
    if (workers < 1) throw UnsupportedValue("worker count must be >= 1");
    {
        std::vector<int> r(static_cast<std::size_t>(std::max(m, 0)), 0);
        if (!r.empty()) r.back() = n - m;
        Scheme::validate(n, m, std::move(r));
    }
    const BigInt total = cardinality(n, m);
    if (total > BigInt(budget))
        throw BudgetExceeded("CS(" + std::to_string(n) + "," + std::to_string(m) +
                             ") has " + total.str() + " schemes, budget " +
                             std::to_string(budget));
    const std::uint64_t count = total.convert_to<std::uint64_t>();

    const CriterionEvaluator evaluator(params, criterion, /*memoize=*/false);

    const int chunks = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), count));
    std::vector<ChunkBest> partial(static_cast<std::size_t>(chunks));

    const auto run_chunk = [&](int c) {
        const std::uint64_t begin = count * static_cast<std::uint64_t>(c) /
                                    static_cast<std::uint64_t>(chunks);
        const std::uint64_t end = count * static_cast<std::uint64_t>(c + 1) /
                                  static_cast<std::uint64_t>(chunks);
        partial[static_cast<std::size_t>(c)] =
            scan_chunk(n, m, BigInt(begin), end - begin, evaluator);
    };

    if (chunks == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(chunks));
        for (int c = 0; c < chunks; ++c) pool.emplace_back(run_chunk, c);
        for (auto& t : pool) t.join();
    }

    // Ordered reduce keeps the lex tie-break exact: earlier chunks hold
    // lexicographically smaller schemes.
    std::optional<Scheme> best;
    double best_psi = 0.0;
    for (const auto& p : partial) {
        if (!p.scheme) continue;
        if (!best || p.psi < best_psi) {
            best = *p.scheme;
            best_psi = p.psi;
        }
    }

    return OracleResult{std::move(*best), best_psi, count,
                        evaluator.extended_precision_seen()};
}

}  // namespace censearch
