#pragma once

#include "censearch/scheme.hpp"
#include "censearch/weibull.hpp"

#include <cstdint>

namespace censearch {

struct OracleResult {
    Scheme best_scheme;
    double best_psi;
    std::uint64_t evaluated;  ///< always cardinality(n, m)
    bool extended_precision;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

/// Evaluates psi on every scheme in CS(n, m) and returns the global
/// minimizer; ties broken by lexicographically smallest scheme.
///
/// Throws BudgetExceeded when cardinality(n, m) > budget. Workers > 1
/// split the lexicographic stream into contiguous chunks; the result is
/// identical to the serial one.
OracleResult exhaustive_search(int n, int m, const WeibullParams& params,
                               const CriterionSpec& criterion,
                               std::uint64_t budget = kDefaultOracleBudget,
                               int workers = 1);

}  // namespace censearch
