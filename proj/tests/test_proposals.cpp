#include "censearch/errors.hpp"
#include "censearch/proposals.hpp"
#include "censearch/rng.hpp"
#include "censearch/scheme.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

using namespace censearch;

namespace {

doctest::Approx approx_rel(double want, double rel) {
    return doctest::Approx(want).epsilon(rel);
}

// Recomputes the left-to-right generation density of a uniform sequential
// draw from the finished scheme.
double uniform_path_log_density(const Scheme& scheme, std::optional<int> cap) {
    const int budget = scheme.n() - scheme.m();
    double ld = 0.0;
    int remaining = budget;
    for (int j = 0; j + 1 < scheme.m(); ++j) {
        int bound = remaining;
        if (j == 0 && cap.has_value()) bound = std::min(bound, *cap);
        ld -= std::log(static_cast<double>(bound) + 1.0);
        remaining -= scheme.removal(j);
    }
    return ld;
}

int count_diffs(const Scheme& a, const Scheme& b) {
    int diffs = 0;
    for (int i = 0; i < a.m(); ++i)
        if (a.removal(i) != b.removal(i)) ++diffs;
    return diffs;
}

}  // namespace

TEST_SUITE_BEGIN("proposals");

TEST_CASE("proposal names round trip") {
    for (auto kind : {ProposalKind::Multinomial, ProposalKind::UniformSequential,
                      ProposalKind::MultivariateHypergeometric})
        CHECK(proposal_from_string(to_string(kind)) == kind);
    CHECK(to_string(ProposalKind::Multinomial) == "multinomial");
    CHECK(to_string(ProposalKind::UniformSequential) == "uniform");
    CHECK(to_string(ProposalKind::MultivariateHypergeometric) == "mvhg");
    CHECK_FALSE(proposal_from_string("binomial").has_value());
    CHECK_FALSE(proposal_from_string("").has_value());
}

TEST_CASE("update selection is a uniform sample without replacement") {
    Rng rng(101);
    std::vector<int> hits(6, 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        const int m1 = rng.uniform_range(1, 6);
        const auto sel = draw_update_selection(6, m1, rng);
        CHECK(sel.positions.size() == static_cast<std::size_t>(m1));
        CHECK(std::is_sorted(sel.positions.begin(), sel.positions.end()));
        CHECK(std::adjacent_find(sel.positions.begin(), sel.positions.end()) ==
              sel.positions.end());
        for (int pos : sel.positions) {
            CHECK(pos >= 0);
            CHECK(pos < 6);
            ++hits[static_cast<std::size_t>(pos)];
        }
    }
    // every position is hit with the same frequency; E[hits] = trials * E[m1]/6
    const double expect = trials * (3.5 / 6.0);
    for (int h : hits) CHECK(std::fabs(h - expect) < 5.0 * std::sqrt(expect));

    CHECK_THROWS_AS(draw_update_selection(6, 0, rng), UnsupportedValue);
    CHECK_THROWS_AS(draw_update_selection(6, 7, rng), UnsupportedValue);
}

TEST_CASE("multinomial init golden draw") {
    Rng rng(7);
    const auto [scheme, state] = multinomial_init(10, 5, rng);
    CHECK(scheme.removals() == std::vector<int>{0, 1, 2, 0, 2});
    REQUIRE(state.p.size() == 5);
    CHECK(state.p[0] == approx_rel(0.06944963842753718, 1e-15));
    CHECK(state.p[1] == approx_rel(0.14119666909973172, 1e-15));
    CHECK(state.p[2] == approx_rel(0.36640288227278706, 1e-15));
    CHECK(state.p[3] == approx_rel(0.07418816874831495, 1e-15));
    CHECK(state.p[4] == approx_rel(0.34876264145162905, 1e-15));
}

TEST_CASE("multinomial cell probabilities are positive and normalized") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Rng rng(seed);
        const auto [scheme, state] = multinomial_init(12, 4, rng);
        CHECK(scheme.n() == 12);
        double total = 0.0;
        for (double v : state.p) {
            CHECK(v > 0.0);
            total += v;
        }
        CHECK(total == approx_rel(1.0, 1e-14));
    }
}

TEST_CASE("multinomial with a single cell is degenerate") {
    Rng rng(3);
    const auto [scheme, state] = multinomial_init(6, 1, rng);
    CHECK(scheme.removals() == std::vector<int>{5});
    CHECK(state.p == std::vector<double>{1.0});
    CHECK(multinomial_log_density(scheme, state) == 0.0);
}

TEST_CASE("full multinomial redraw has the multinomial marginal mean") {
    const MultinomialState state{std::vector<double>(5, 0.2)};
    const Scheme start = Scheme::validate(15, 5, {10, 0, 0, 0, 0});
    Rng rng(55);
    const int trials = 100000;
    double sum_r1 = 0.0;
    for (int t = 0; t < trials; ++t)
        sum_r1 += multinomial_update(start, state, 5, rng).removal(0);
    // R_1 ~ Binomial(10, 0.2): mean 2, variance 1.6
    const double se = std::sqrt(1.6 / trials);
    CHECK(std::fabs(sum_r1 / trials - 2.0) < 3.0 * se);
}

TEST_CASE("partial updates resample at most m1 positions and keep the total") {
    Rng rng(77);
    Scheme current = Scheme::validate(14, 6, {0, 0, 0, 0, 0, 8});
    MultinomialState state;
    {
        Rng init_rng(9);
        auto [s, st] = multinomial_init(14, 6, init_rng);
        state = std::move(st);
    }
    for (int t = 0; t < 10000; ++t) {
        const int m1 = rng.uniform_range(1, 6);
        const Scheme next = multinomial_update(current, state, m1, rng);
        CHECK(next.n() == 14);
        CHECK(count_diffs(current, next) <= m1);
        current = next;
    }
}

TEST_CASE("a single-position multinomial update is the identity") {
    Rng rng(5);
    auto [scheme, state] = multinomial_init(12, 5, rng);
    for (int t = 0; t < 100; ++t)
        CHECK(multinomial_update(scheme, state, 1, rng) == scheme);
}

TEST_CASE("multinomial log density") {
    const MultinomialState p{{0.5, 0.125, 0.125, 0.125, 0.125}};
    const Scheme s = Scheme::validate(7, 5, {2, 0, 0, 0, 0});
    CHECK(multinomial_log_density(s, p) == approx_rel(std::log(0.25), 1e-14));

    const MultinomialState wrong{{0.5, 0.5}};
    CHECK_THROWS_AS(multinomial_log_density(s, wrong), BadDimensions);
}

TEST_CASE("multinomial density sums to one over CS(6,3)") {
    Rng rng(21);
    const auto [ignored, state] = multinomial_init(6, 3, rng);
    double total = 0.0;
    SchemeEnumerator en(6, 3);
    while (auto s = en.next()) total += std::exp(multinomial_log_density(*s, state));
    CHECK(total == approx_rel(1.0, 1e-10));
}

TEST_CASE("uniform sequential sample") {
    Rng rng(31);
    SUBCASE("single cell is forced with log density zero") {
        const auto draw = uniform_sequential_sample(9, 1, std::nullopt, rng);
        CHECK(draw.scheme.removals() == std::vector<int>{8});
        CHECK(draw.log_density == 0.0);
    }
    SUBCASE("cap restricts the first coordinate") {
        for (int t = 0; t < 2000; ++t) {
            const auto draw = uniform_sequential_sample(12, 4, 2, rng);
            CHECK(draw.scheme.removal(0) <= 2);
        }
        for (int t = 0; t < 50; ++t)
            CHECK(uniform_sequential_sample(12, 4, 0, rng).scheme.removal(0) == 0);
    }
    SUBCASE("reported density matches the generation path") {
        for (int t = 0; t < 2000; ++t) {
            const std::optional<int> cap =
                t % 2 == 0 ? std::optional<int>(t % 7) : std::nullopt;
            const auto draw = uniform_sequential_sample(13, 5, cap, rng);
            CHECK(draw.log_density ==
                  approx_rel(uniform_path_log_density(draw.scheme, cap), 1e-14));
        }
    }
    SUBCASE("path densities sum to one over CS(6,3)") {
        double total = 0.0;
        SchemeEnumerator en(6, 3);
        while (auto s = en.next())
            total += std::exp(uniform_path_log_density(*s, std::nullopt));
        CHECK(total == approx_rel(1.0, 1e-12));
    }
}

TEST_CASE("mvhg init respects cell capacities and the marginal mean") {
    Rng rng(41);
    const int trials = 100000;
    double sum_r1 = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Scheme s = mvhg_init(15, 5, rng);
        for (int i = 0; i < 5; ++i) CHECK(s.removal(i) <= 10);
        sum_r1 += s.removal(0);
    }
    // MVHG marginal: mean R M_i / M = 2, variance 10 * 0.2 * 0.8 * 40/49
    const double var = 10.0 * 0.2 * 0.8 * 40.0 / 49.0;
    const double se = std::sqrt(var / trials);
    CHECK(std::fabs(sum_r1 / trials - 2.0) < 3.0 * se);
}

TEST_CASE("mvhg with a single cell is degenerate") {
    Rng rng(43);
    CHECK(mvhg_init(9, 1, rng).removals() == std::vector<int>{8});
}

TEST_CASE("a single-position mvhg update is the identity") {
    Rng rng(47);
    const Scheme s = Scheme::validate(12, 5, {3, 0, 2, 1, 1});
    for (int t = 0; t < 100; ++t) CHECK(mvhg_update(s, 1, rng) == s);
}

TEST_CASE("mvhg updates only the selected positions") {
    Rng rng(53);
    Scheme current = Scheme::validate(16, 6, {10, 0, 0, 0, 0, 0});
    for (int t = 0; t < 10000; ++t) {
        const int m1 = rng.uniform_range(1, 6);
        const Scheme next = mvhg_update(current, m1, rng);
        CHECK(count_diffs(current, next) <= m1);
        current = next;
    }
}

TEST_CASE("mvhg log density") {
    const Scheme s = Scheme::validate(6, 3, {3, 0, 0});
    const std::vector<long long> caps{3, 3, 3};
    CHECK(mvhg_log_density(s, caps, 9, 3) == approx_rel(std::log(1.0 / 84.0), 1e-13));

    double total = 0.0;
    SchemeEnumerator en(6, 3);
    while (auto sch = en.next()) total += std::exp(mvhg_log_density(*sch, caps, 9, 3));
    CHECK(total == approx_rel(1.0, 1e-10));

    CHECK_THROWS_AS(mvhg_log_density(s, {2, 3, 3}, 8, 3), UnsupportedValue);
    CHECK_THROWS_AS(mvhg_log_density(s, {3, 3}, 6, 3), BadDimensions);
}

TEST_CASE("proposal chains are deterministic in the seed") {
    for (auto kind : {ProposalKind::Multinomial, ProposalKind::UniformSequential,
                      ProposalKind::MultivariateHypergeometric}) {
        CAPTURE(to_string(kind));
        auto a = make_proposal_chain(kind, 12, 4);
        auto b = make_proposal_chain(kind, 12, 4);
        Rng ra(99), rb(99);
        auto da = a->init(ra);
        auto db = b->init(rb);
        CHECK(da.scheme == db.scheme);
        CHECK(da.log_density == db.log_density);
        for (int t = 0; t < 200; ++t) {
            auto ua = a->update(da.scheme, 2, ra);
            auto ub = b->update(db.scheme, 2, rb);
            CHECK(ua.scheme == ub.scheme);
            CHECK(ua.log_density == ub.log_density);
            CHECK(std::isfinite(ua.log_density));
            CHECK(ua.log_density <= 0.0);
            da = std::move(ua);
            db = std::move(ub);
        }
    }
}

TEST_CASE("chain densities match the free functions") {
    Rng rng(61);
    auto chain = make_proposal_chain(ProposalKind::MultivariateHypergeometric, 11, 4);
    auto draw = chain->init(rng);
    const std::vector<long long> caps(4, 7);
    CHECK(draw.log_density == mvhg_log_density(draw.scheme, caps, 28, 7));
    for (int t = 0; t < 100; ++t) {
        draw = chain->update(draw.scheme, 3, rng);
        CHECK(draw.log_density == mvhg_log_density(draw.scheme, caps, 28, 7));
    }

    auto uniform = make_proposal_chain(ProposalKind::UniformSequential, 11, 4);
    const auto first = uniform->init(rng);
    CHECK(first.log_density ==
          approx_rel(uniform_path_log_density(first.scheme, std::nullopt), 1e-14));
}

TEST_CASE("complete sampling is a single point mass for every chain") {
    for (auto kind : {ProposalKind::Multinomial, ProposalKind::UniformSequential,
                      ProposalKind::MultivariateHypergeometric}) {
        CAPTURE(to_string(kind));
        auto chain = make_proposal_chain(kind, 5, 5);
        Rng rng(71);
        const auto draw = chain->init(rng);
        CHECK(draw.scheme.removals() == std::vector<int>(5, 0));
        CHECK(draw.log_density == 0.0);
        const auto next = chain->update(draw.scheme, 2, rng);
        CHECK(next.scheme == draw.scheme);
        CHECK(next.log_density == 0.0);
    }
}

TEST_CASE("chain construction validates the design size") {
    CHECK_THROWS_AS(make_proposal_chain(ProposalKind::Multinomial, 4, 0), BadDimensions);
    CHECK_THROWS_AS(make_proposal_chain(ProposalKind::Multinomial, 4, 5), BadDimensions);
}

TEST_SUITE_END();
