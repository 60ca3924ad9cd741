#pragma once

#include "censearch/rng.hpp"
#include "censearch/scheme.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace censearch {

/// The three candidate-generating distributions.
enum class ProposalKind {
    Multinomial,
    UniformSequential,
    MultivariateHypergeometric,
};

std::string to_string(ProposalKind kind);
std::optional<ProposalKind> proposal_from_string(const std::string& name);

/// Fixed cell probabilities of a multinomial chain, drawn once per chain.
struct MultinomialState {
    std::vector<double> p;  ///< strictly positive, sums to 1
};

/// The resampled coordinates of a partial update.
struct UpdateSelection {
    std::vector<int> positions;  ///< distinct 0-based indices, size m1
};

/// m1 distinct positions drawn uniformly without replacement from {0..m-1}.
UpdateSelection draw_update_selection(int m, int m1, Rng& rng);

// --- multinomial proposal ------------------------------------------------

/// Normalizes m uniform draws into cell probabilities and samples the
/// initial scheme from Multinomial(n-m; p).
std::pair<Scheme, MultinomialState> multinomial_init(int n, int m, Rng& rng);

/// Redraws m1 randomly selected positions from a multinomial over the
/// renormalized cell probabilities, preserving the selected sub-total.
Scheme multinomial_update(const Scheme& old_scheme, const MultinomialState& state, int m1,
                          Rng& rng);

/// log of (n-m)! / prod R_i! * prod p_i^{R_i}.
double multinomial_log_density(const Scheme& scheme, const MultinomialState& state);

// --- sequential uniform proposal -----------------------------------------

struct UniformDraw {
    Scheme scheme;
    double log_density;  ///< log-probability of the generation path
};

/// Fills positions left to right: R_1 uniform on {0..cap or n-m}, each
/// later position uniform on the remaining budget, and R_m forced to the
/// leftover. The density is the product of 1/(bound+1) over the m-1 free
/// draws; the forced last coordinate contributes no factor.
UniformDraw uniform_sequential_sample(int n, int m, std::optional<int> cap, Rng& rng);

// --- multivariate hypergeometric proposal ---------------------------------

/// Samples from MVHG(M = m(n-m); M_j = n-m; R = n-m).
Scheme mvhg_init(int n, int m, Rng& rng);

/// Resamples m1 randomly selected positions from an MVHG whose per-cell
/// capacity equals the selected sub-total; unselected positions unchanged.
Scheme mvhg_update(const Scheme& old_scheme, int m1, Rng& rng);

/// log of prod C(M_i, R_i) / C(M, R). Throws UnsupportedValue when some
/// R_i exceeds its cell capacity (the candidate has zero density).
double mvhg_log_density(const Scheme& scheme, const std::vector<long long>& cell_caps,
                        long long total_m, int total_r);

// --- chain adapter ---------------------------------------------------------

/// One proposal mechanism bound to a chain: initial draw plus partial
/// updates, each returning the log density the acceptance ratio needs.
///
/// Multinomial and MVHG report full-scheme densities (fixed p / the global
/// MVHG parameters); the sequential uniform proposal reports its path
/// density. Instances are per-chain and single-threaded.
class ProposalChain {
  public:
    struct Draw {
        Scheme scheme;
        double log_density;
    };

    virtual ~ProposalChain() = default;
    virtual Draw init(Rng& rng) = 0;
    virtual Draw update(const Scheme& current, int m1, Rng& rng) = 0;
};

std::unique_ptr<ProposalChain> make_proposal_chain(ProposalKind kind, int n, int m);

}  // namespace censearch
