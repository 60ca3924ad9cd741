#include "censearch/errors.hpp"
#include "censearch/rng.hpp"
#include "censearch/scheme.hpp"
#include "censearch/search.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

using namespace censearch;

namespace {

SearchConfig base_config(int n, int m) {
    SearchConfig config;
    config.n = n;
    config.m = m;
    config.params = WeibullParams::validate(0.5, 1.0);
    config.criterion = CriterionSpec::variance();
    config.proposal = ProposalKind::Multinomial;
    config.iterations = 1000;
    config.seed = 42;
    return config;
}

bool reports_equal(const SearchReport& a, const SearchReport& b) {
    return a.best_scheme == b.best_scheme && a.best_psi == b.best_psi &&
           a.n_it == b.n_it && a.n_ac == b.n_ac && a.seed == b.seed;
}

}  // namespace

TEST_SUITE_BEGIN("search");

TEST_CASE("acceptance probability") {
    CHECK(acceptance_probability(1.0, 0.5, -1.0, -1.0) == 1.0);
    CHECK(acceptance_probability(1.0, 1.0, -2.5, -2.5) == 1.0);
    // uphill move by log 2 at equal proposal density
    CHECK(acceptance_probability(1.0, 1.0 + std::log(2.0), -1.0, -1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // density correction alone: moving toward a twice-likelier candidate
    CHECK(acceptance_probability(1.0, 1.0, std::log(0.25), std::log(0.5)) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // a zero-density candidate saturates the proposal ratio
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(acceptance_probability(1.0, 0.2, -1.0, -inf) == 1.0);
    CHECK_THROWS_AS(acceptance_probability(1.0, 0.2, -inf, -1.0), InvalidDensity);
}

TEST_CASE("relative efficiency") {
    CHECK(relative_efficiency(2.0, 2.0) == 1.0);
    CHECK(relative_efficiency(1.0, 2.0) == 0.5);
    CHECK_THROWS_AS(relative_efficiency(0.0, 1.0), NonPositive);
    CHECK_THROWS_AS(relative_efficiency(1.0, -2.0), NonPositive);
}

TEST_CASE("config validation") {
    auto config = base_config(10, 5);
    config.iterations = 0;
    CHECK_THROWS_AS(config.validate(), UnsupportedValue);

    config = base_config(10, 5);
    config.m1 = M1Policy::fixed_value(0);
    CHECK_THROWS_AS(config.validate(), UnsupportedValue);
    config.m1 = M1Policy::fixed_value(6);
    CHECK_THROWS_AS(config.validate(), UnsupportedValue);
    config.m1 = M1Policy::fixed_value(5);
    CHECK_NOTHROW(config.validate());

    config = base_config(10, 5);
    config.params.beta = -1.0;
    CHECK_THROWS_AS(config.validate(), NonPositive);

    config = base_config(4, 5);
    CHECK_THROWS_AS(config.validate(), BadDimensions);
    config = base_config(4, 0);
    CHECK_THROWS_AS(config.validate(), BadDimensions);
}

TEST_CASE("a single iteration is fully accounted for") {
    auto config = base_config(10, 5);
    config.iterations = 1;
    config.trace = true;
    const SearchReport report = run_search(config);
    CHECK(report.n_it == 1);
    CHECK((report.n_ac == 0 || report.n_ac == 1));
    REQUIRE(report.trace.size() == 2);
    CHECK(report.trace[0].iteration == 0);
    CHECK_FALSE(report.trace[0].accepted);
    CHECK(report.trace[1].iteration == 1);
    CHECK(report.best_psi == std::min(report.trace[0].psi, report.trace[1].psi));
    CHECK(report.seed == 42);
    CHECK_FALSE(report.extended_precision);
}

TEST_CASE("reruns are bit identical") {
    for (auto kind : {ProposalKind::Multinomial, ProposalKind::UniformSequential,
                      ProposalKind::MultivariateHypergeometric}) {
        CAPTURE(to_string(kind));
        auto config = base_config(12, 4);
        config.proposal = kind;
        config.iterations = 3000;
        const SearchReport a = run_search(config);
        const SearchReport b = run_search(config);
        CHECK(reports_equal(a, b));
    }
}

TEST_CASE("a shared evaluator does not change the result") {
    const auto config = base_config(10, 5);
    const CriterionEvaluator evaluator(config.params, config.criterion);
    const SearchReport alone = run_search(config);
    const SearchReport shared = run_search(config, evaluator);
    CHECK(reports_equal(alone, shared));
}

TEST_CASE("trace is a complete account of the run") {
    auto config = base_config(10, 5);
    config.iterations = 2000;
    config.trace = true;
    const SearchReport report = run_search(config);
    const CriterionEvaluator evaluator(config.params, config.criterion);

    REQUIRE(report.trace.size() == 2001);
    long long accepted = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        const TraceEntry& entry = report.trace[i];
        CHECK(entry.iteration == static_cast<long long>(i));
        if (entry.accepted) ++accepted;
        best = std::min(best, entry.psi);
        if (i % 400 == 0) CHECK(entry.psi == evaluator(entry.scheme));
    }
    CHECK(accepted == report.n_ac);
    CHECK(best == report.best_psi);
    CHECK(evaluator(report.best_scheme) == report.best_psi);

    // untraced runs are otherwise identical
    config.trace = false;
    const SearchReport quiet = run_search(config);
    CHECK(reports_equal(quiet, report));
    CHECK(quiet.trace.empty());
}

TEST_CASE("the chain visits every state of a small design space") {
    for (auto kind : {ProposalKind::Multinomial, ProposalKind::UniformSequential,
                      ProposalKind::MultivariateHypergeometric}) {
        CAPTURE(to_string(kind));
        auto config = base_config(6, 3);
        config.proposal = kind;
        config.iterations = 100000;
        config.seed = 1;
        config.trace = true;
        const SearchReport report = run_search(config);

        std::set<std::vector<int>> visited;
        visited.insert(report.trace[0].scheme.removals());
        for (const TraceEntry& entry : report.trace)
            if (entry.accepted) visited.insert(entry.scheme.removals());
        CHECK(visited.size() == 10);  // |CS(6,3)| = C(5,2)
        CHECK(report.n_ac > 0);
        CHECK(report.n_ac < report.n_it);
    }
}

TEST_CASE("search never beats the exhaustive minimum") {
    const WeibullParams params = WeibullParams::validate(0.5, 1.0);
    double exact = std::numeric_limits<double>::infinity();
    SchemeEnumerator en(10, 5);
    while (auto s = en.next())
        exact = std::min(exact, variance_criterion(*s, params));

    for (std::uint64_t seed : {7u, 19u, 42u}) {
        auto config = base_config(10, 5);
        config.seed = seed;
        config.iterations = 10000;
        const SearchReport report = run_search(config);
        CHECK(report.best_psi >= exact - 1e-12);
        CHECK(relative_efficiency(exact, report.best_psi) <= 1.0 + 1e-12);
    }
}

TEST_CASE("chain fan-out is deterministic and worker count is irrelevant") {
    auto config = base_config(12, 4);
    config.iterations = 2000;
    const MultiSearchReport serial = run_search_chains(config, 5, 1);
    const MultiSearchReport pooled = run_search_chains(config, 5, 3);

    REQUIRE(serial.chains.size() == 5);
    REQUIRE(pooled.chains.size() == 5);
    const Rng base(config.seed);
    for (int c = 0; c < 5; ++c) {
        CHECK(reports_equal(serial.chains[static_cast<std::size_t>(c)],
                            pooled.chains[static_cast<std::size_t>(c)]));
        CHECK(serial.chains[static_cast<std::size_t>(c)].seed ==
              base.split(static_cast<std::uint64_t>(c)).seed());
    }
    CHECK(serial.best_chain == pooled.best_chain);
    for (const SearchReport& chain : serial.chains)
        CHECK(serial.best().best_psi <= chain.best_psi);

    CHECK_THROWS_AS(run_search_chains(config, 0, 1), UnsupportedValue);
    CHECK_THROWS_AS(run_search_chains(config, 2, 0), UnsupportedValue);
}

TEST_CASE("fixed m1 policy is honored") {
    auto config = base_config(10, 5);
    config.m1 = M1Policy::fixed_value(1);
    config.iterations = 500;
    config.trace = true;
    const SearchReport report = run_search(config);
    // a multinomial one-position update preserves the sub-total, so the
    // chain can never move and every candidate equals the initial state
    for (const TraceEntry& entry : report.trace)
        CHECK(entry.scheme == report.trace[0].scheme);
}

TEST_SUITE_END();
