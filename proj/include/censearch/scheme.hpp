#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace censearch {

using BigInt = boost::multiprecision::cpp_int;

/// A progressive Type-II censoring scheme: n units on test, m observed
/// failures, and removal counts (R_1, ..., R_m) with sum R_i = n - m.
///
/// Immutable value type; construct through `validate`.
class Scheme {
  public:
    /// Checks all invariants and returns the scheme.
    ///
    /// Throws BadDimensions when m < 1, n < m, or removals.size() != m;
    /// NegativeRemoval when some R_i < 0; SumMismatch when the removals
    /// do not sum to n - m.
    static Scheme validate(int n, int m, std::vector<int> removals);

    int n() const { return n_; }
    int m() const { return m_; }
    const std::vector<int>& removals() const { return removals_; }
    int removal(int i) const { return removals_[static_cast<std::size_t>(i)]; }

    friend bool operator==(const Scheme& a, const Scheme& b) {
        return a.n_ == b.n_ && a.removals_ == b.removals_;
    }

  private:
    Scheme(int n, int m, std::vector<int> removals)
        : n_(n), m_(m), removals_(std::move(removals)) {}

    int n_;
    int m_;
    std::vector<int> removals_;
};

/// Lexicographic order on (R_1, ..., R_m).
bool lex_less(const Scheme& a, const Scheme& b);

/// |CS(n, m)| = binomial(n-1, m-1), exact.
BigInt cardinality(int n, int m);

/// Exact binomial coefficient, used by cardinality and enumeration chunking.
BigInt binomial(int n, int k);

/// Streams every scheme of CS(n, m) exactly once in lexicographic order
/// on (R_1, ..., R_m): first (0, ..., 0, n-m), last (n-m, 0, ..., 0).
///
/// An enumerator can be opened at an arbitrary rank, so the stream splits
/// into disjoint lexicographic chunks for parallel exhaustive search.
class SchemeEnumerator {
  public:
    SchemeEnumerator(int n, int m);
    /// Opens the stream positioned at the scheme of the given lexicographic
    /// rank (0-based). rank == cardinality(n, m) yields an exhausted stream.
    SchemeEnumerator(int n, int m, const BigInt& rank);

    /// Next scheme, or nullopt when the stream is exhausted.
    std::optional<Scheme> next();

  private:
    int n_;
    int m_;
    bool done_;
    std::vector<int> current_;
};

/// "0,4,1,0,0" -- machine format for CSV/JSON fields.
std::string to_csv_string(const Scheme& scheme);

/// Run-length display, e.g. (0,0,0,0,0,20,0,0,0,0) -> "0^5, 20, 0^4".
std::string to_run_length_string(const Scheme& scheme);

/// Parses the comma-separated removal list and validates it against (n, m).
Scheme parse_scheme(int n, int m, const std::string& csv);

}  // namespace censearch
