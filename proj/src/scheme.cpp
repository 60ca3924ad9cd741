#include "censearch/scheme.hpp"

#include "censearch/errors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace censearch {

Scheme Scheme::validate(int n, int m, std::vector<int> removals) {
    if (m < 1 || n < m) {
        throw BadDimensions("scheme requires n >= m >= 1, got n=" + std::to_string(n) +
                            " m=" + std::to_string(m));
    }
    if (removals.size() != static_cast<std::size_t>(m)) {
        throw BadDimensions("removal vector has length " + std::to_string(removals.size()) +
                            ", expected m=" + std::to_string(m));
    }
    long long sum = 0;
    for (int r : removals) {
        if (r < 0) throw NegativeRemoval("removal count " + std::to_string(r) + " is negative");
        sum += r;
    }
    if (sum != static_cast<long long>(n) - m) {
        throw SumMismatch("removals sum to " + std::to_string(sum) + ", expected n-m=" +
                          std::to_string(n - m));
    }
    return Scheme(n, m, std::move(removals));
}

bool lex_less(const Scheme& a, const Scheme& b) {
    return std::lexicographical_compare(a.removals().begin(), a.removals().end(),
                                        b.removals().begin(), b.removals().end());
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;  // exact: first i factors of C(n, i) are divisible by i!
    }
    return result;
}

BigInt cardinality(int n, int m) {
    if (m < 1 || n < m) {
        throw BadDimensions("cardinality requires n >= m >= 1, got n=" + std::to_string(n) +
                            " m=" + std::to_string(m));
    }
    return binomial(n - 1, m - 1);
}

SchemeEnumerator::SchemeEnumerator(int n, int m) : n_(n), m_(m), done_(false) {
    cardinality(n, m);  // dimension check
    current_.assign(static_cast<std::size_t>(m), 0);
    current_.back() = n - m;
}

SchemeEnumerator::SchemeEnumerator(int n, int m, const BigInt& rank) : n_(n), m_(m), done_(false) {
    const BigInt total = cardinality(n, m);
    if (rank >= total) {
        done_ = true;
        return;
    }
    // Unrank: coordinate by coordinate, R_j = v leaves compositions of the
    // remaining budget into the remaining cells, counted by a binomial.
    current_.assign(static_cast<std::size_t>(m), 0);
    BigInt rest = rank;
    int budget = n - m;
    for (int j = 0; j < m - 1; ++j) {
        int cells_after = m - j - 1;
        for (int v = 0; v <= budget; ++v) {
            BigInt block = binomial(budget - v + cells_after - 1, cells_after - 1);
            if (rest < block) {
                current_[static_cast<std::size_t>(j)] = v;
                budget -= v;
                break;
            }
            rest -= block;
        }
    }
    current_.back() = budget;
}

std::optional<Scheme> SchemeEnumerator::next() {
    if (done_) return std::nullopt;
    Scheme out = Scheme::validate(n_, m_, current_);

    // Advance to the lexicographic successor: find the last positive entry,
    // move one unit to its left neighbour, and push the rest to the tail.
    int p = m_ - 1;
    while (p >= 0 && current_[static_cast<std::size_t>(p)] == 0) --p;
    if (p <= 0) {
        done_ = true;  // all mass at the front: (n-m, 0, ..., 0) is last
        return out;
    }
    const int moved = current_[static_cast<std::size_t>(p)];
    current_[static_cast<std::size_t>(p)] = 0;
    current_[static_cast<std::size_t>(p - 1)] += 1;
    current_.back() = moved - 1;
    return out;
}

std::string to_csv_string(const Scheme& scheme) {
    std::string out;
    for (std::size_t i = 0; i < scheme.removals().size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(scheme.removals()[i]);
    }
    return out;
}

std::string to_run_length_string(const Scheme& scheme) {
    const auto& r = scheme.removals();
    std::string out;
    std::size_t i = 0;
    while (i < r.size()) {
        std::size_t j = i;
        while (j < r.size() && r[j] == r[i]) ++j;
        if (!out.empty()) out += ", ";
        out += std::to_string(r[i]);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

Scheme parse_scheme(int n, int m, const std::string& csv) {
    std::vector<int> removals;
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(token, &pos);
        } catch (const std::exception&) {
            throw BadDimensions("cannot parse removal '" + token + "'");
        }
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
        if (pos != token.size()) throw BadDimensions("cannot parse removal '" + token + "'");
        removals.push_back(value);
    }
    return Scheme::validate(n, m, std::move(removals));
}

}  // namespace censearch
