#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "telegraph_kit/extremes.hpp"
#include "telegraph_kit/mixed_law.hpp"
#include "telegraph_kit/params.hpp"
#include "telegraph_kit/random.hpp"
#include "telegraph_kit/telegraph.hpp"

namespace telegraph_kit::montecarlo {

/// Worker count from TELEGRAPH_KIT_THREADS, else the hardware concurrency (at least 1).
unsigned default_workers();

struct RunOptions {
    std::uint64_t seed = 1;
    /// 0 selects default_workers().
    unsigned workers = 0;
    /// Paths per chunk. Chunks are the unit of work and of merging, so results
    /// depend on the chunk size but never on the worker count.
    std::uint64_t chunk = 16384;
};

/// Calls body(index, rng, acc) for every path index, each with its own
/// PhiloxStream(seed, index). Per-chunk accumulators are merged in chunk order.
template <class Acc, class Body>
Acc for_each_path(std::uint64_t count, const RunOptions& options, const Acc& empty, Body body) {
    const std::uint64_t chunk = std::max<std::uint64_t>(options.chunk, 1);
    const std::uint64_t chunks = (count + chunk - 1) / chunk;
    std::vector<std::optional<Acc>> partial(chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            Acc acc = empty;
            const std::uint64_t end = std::min(count, (c + 1) * chunk);
            for (std::uint64_t i = c * chunk; i < end; ++i) {
                PhiloxStream rng(options.seed, i);
                body(i, rng, acc);
            }
            partial[c].emplace(std::move(acc));
        }
    };
    const unsigned requested = options.workers == 0 ? default_workers() : options.workers;
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(requested, std::max<std::uint64_t>(chunks, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    Acc total = empty;
    for (auto& p : partial) {
        total.merge(*p);
    }
    return total;
}

/// Bin counts over fixed edges plus exact-location atoms.
class Histogram {
public:
    Histogram() = default;
    Histogram(std::vector<double> edges, std::vector<double> atoms = {});
    static Histogram uniform(double lo, double hi, std::size_t bins, std::vector<double> atoms = {});

    /// Values within 1e-9 (relative to the scale of the edges) of an atom go to the atom.
    void add(double value);
    void merge(const Histogram& other);

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    const std::vector<std::uint64_t>& atom_counts() const { return atom_counts_; }
    std::uint64_t below() const { return below_; }
    std::uint64_t above() const { return above_; }
    std::uint64_t total() const;

private:
    std::vector<double> edges_;
    std::vector<double> atoms_;
    double atom_tolerance_ = 0.0;
    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> atom_counts_;
    std::uint64_t below_ = 0;
    std::uint64_t above_ = 0;
};

struct EmpiricalSummary {
    std::uint64_t sample_count = 0;  ///< accepted samples
    std::uint64_t attempted = 0;     ///< simulated paths
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> bin_counts;
    std::vector<double> bin_masses;       ///< fraction of accepted samples per bin
    std::vector<double> standard_errors;  ///< binomial standard error of each bin mass
    std::map<double, double> atom_masses;
    std::uint64_t below = 0;
    std::uint64_t above = 0;
    /// Accepted values in ascending order, when requested.
    std::vector<double> samples;

    double acceptance() const { return attempted == 0 ? 0.0 : double(sample_count) / double(attempted); }
};

EmpiricalSummary summarize(const Histogram& histogram, std::uint64_t attempted, std::vector<double> samples = {});

/// Initial velocity: fixed, a fair coin, or the stationary law
/// P{V(0) = a1} = lambda2 / (lambda1 + lambda2).
enum class Start { upper, lower, mixture, stationary };

/// Initial velocity for one path, drawn from the path's own stream.
Velocity draw_start(Start start, PhiloxStream& rng, const RatePair& rates = {});

/// Collects T(t) for count unconditioned paths.
EmpiricalSummary run_batch(const ProcessParams& params, Start start, double t, std::uint64_t count,
                           const Histogram& bins, const RunOptions& options, bool keep_samples = false);

using PathPredicate = std::function<bool(const telegraph::PathSample&)>;
using PathValue = std::function<double(const telegraph::PathSample&)>;

/// Histogram of value(path) over the paths satisfying predicate. A pilot run
/// of up to 10^5 paths estimates the acceptance rate; below min_acceptance the
/// call throws AcceptanceError. The full run is checked the same way.
EmpiricalSummary conditional_histogram(const ProcessParams& params, Start start, double t, std::uint64_t count,
                                       const PathPredicate& predicate, const PathValue& value, const Histogram& bins,
                                       const RunOptions& options, double min_acceptance = 1e-6,
                                       bool keep_samples = false);

/// Switch times given N(t) = n for a motion whose first rate is rates.lambda1:
/// sorted uniforms for equal rates, reweighted by rejection otherwise. Throws
/// AcceptanceError when P{N(t) = n} is below min_acceptance; pass 0 to skip
/// that check inside a sampling loop after calling require_count_reachable.
void sample_switches_given_count(const RatePair& rates, double t, int n, PhiloxStream& rng, std::vector<double>& out,
                                 double min_acceptance = 1e-6);

/// Throws AcceptanceError when rejection sampling of N(t) = n would accept
/// fewer than min_acceptance of the draws.
void require_count_reachable(const RatePair& rates, double t, int n, double min_acceptance = 1e-6);

/// Level-crossing outcome of one path for the levels -alpha and beta.
struct LevelEvent {
    bool below = false;     ///< m(t) < -alpha
    bool above = false;     ///< M(t) > beta
    bool max_first = false; ///< F_beta < F_{-alpha}
    bool matches(extremes::Order order) const;
};
LevelEvent level_event(const telegraph::PathSample& path, double alpha, double beta);

/// Paths started at +c with exactly q.n switches (sorted uniforms for equal
/// rates, rejection otherwise); histogram of T(t) over paths realizing the
/// event of q.order. Masses and standard errors are relative to all count
/// conditioned paths, so bin_masses / width estimates the joint density.
EmpiricalSummary extremes_histogram(const extremes::Query& q, std::uint64_t count, const Histogram& bins,
                                    const RunOptions& options);

/// sup |F_n - F| over sorted samples, comparing both one-sided limits at every
/// jump of the empirical CDF. cdf must be right-continuous.
double ks_distance(const std::vector<double>& sorted_samples, const std::function<double(double)>& cdf);
double ks_distance(const EmpiricalSummary& summary, const std::function<double(double)>& cdf);

/// Distribution function of a mixed law tabulated on a uniform grid with
/// cell masses from Gauss-Kronrod and linear interpolation in between.
class TabulatedCdf {
public:
    TabulatedCdf(const MixedLaw& law, std::size_t cells = 20000);
    double operator()(double y) const;

private:
    double lower_;
    double upper_;
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<Atom> atoms_;
};

/// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace telegraph_kit::montecarlo
