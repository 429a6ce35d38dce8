#pragma once

#include <cstddef>
#include <vector>

#include "telegraph_kit/params.hpp"
#include "telegraph_kit/random.hpp"

namespace telegraph_kit::counting {

/// Arrival times of the switching process observed on (0, horizon].
struct SwitchRecord {
    double horizon = 0.0;
    std::vector<double> arrival_times;

    std::size_t count() const { return arrival_times.size(); }
    /// Throws std::invalid_argument unless times are strictly increasing in (0, horizon).
    void validate() const;
};

enum class Parity { even, odd };

inline Parity parity_of(long long n) { return n % 2 == 0 ? Parity::even : Parity::odd; }

/// P{N(t) = n} for alternating rates, the first waiting time having rate lambda1.
double pmf(const RatePair& rates, double t, int n);
double log_pmf(const RatePair& rates, double t, int n);

/// pmf(0..N) where N is the first index past the bulk with five consecutive
/// values below 1e-14.
std::vector<double> pmf_table(const RatePair& rates, double t);

/// Density of (T_l, T_m) given N(t) = n, for 1 <= l < m <= n. Zero off the simplex.
double arrival_pair_density(const RatePair& rates, double t, int n, int l, int m, double t_l, double t_m);

/// Density of T_1 given N(t) = n (n >= 1).
double first_arrival_density(const RatePair& rates, double t, int n, double t1);

/// Alternating sum S(t) = T_1 - T_2 + T_3 - ... over all recorded arrivals.
double alternating_sum(const SwitchRecord& record);

/// Density of S_n(t) given N(t) = n. Supported on (-t, 0) for even n and
/// (0, t) for odd n; zero elsewhere.
double alt_sum_density(const RatePair& rates, double t, int n, double s);

/// E[S_n(t)^m | N(t) = n]. Requires m > -k (n = 2k) or m > -k-1 (n = 2k+1);
/// the even branch additionally requires integer m since S_n(t) < 0 there.
double alt_sum_moment(const RatePair& rates, double t, int n, double m);

struct RateEstimate {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    /// Set for a single switch: the lambda2 formula degenerates to 0.
    bool degenerate = false;
    Parity branch = Parity::even;
    double alternating_sum = 0.0;
};

/// Closed-form maximum likelihood estimates from one observed record.
RateEstimate mle_rates(const SwitchRecord& record);

/// Log-likelihood of the record under the given rates (first period at lambda1),
/// built from the exposure time spent at each rate.
double log_likelihood(const SwitchRecord& record, const RatePair& rates);

/// Alternating exponential waiting times starting with rate lambda1; only
/// arrivals inside (0, t] are kept.
SwitchRecord simulate_switches(const RatePair& rates, double t, PhiloxStream& rng);
void simulate_switches_into(const RatePair& rates, double t, PhiloxStream& rng, std::vector<double>& out);

}  // namespace telegraph_kit::counting
