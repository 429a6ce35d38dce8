#include "telegraph_kit/counting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/special_functions.hpp"

namespace telegraph_kit::counting {
namespace {

using special::log_mittag_leffler;

double log_ml(double gamma, double delta, double x) {
    return log_mittag_leffler({1.0, delta, gamma}, x);
}

void check_time(double t) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("time horizon must be positive");
    }
}

// log of x^p with the convention 0^0 = 1.
double log_power(double x, int p) { return p == 0 ? 0.0 : p * std::log(x); }

}  // namespace

void SwitchRecord::validate() const {
    double previous = 0.0;
    for (double time : arrival_times) {
        if (!(time > previous) || !(time < horizon)) {
            throw std::invalid_argument("arrival times must be strictly increasing inside (0, t)");
        }
        previous = time;
    }
}

double log_pmf(const RatePair& rates, double t, int n) {
    rates.validate();
    check_time(t);
    if (n < 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double diff = t * (rates.lambda1 - rates.lambda2);
    const int k = n / 2;
    const double base = k * std::log(rates.lambda1 * t) + k * std::log(rates.lambda2 * t) - rates.lambda1 * t;
    if (n % 2 == 0) {
        return base + log_ml(k, 2.0 * k + 1.0, diff);
    }
    return base + std::log(rates.lambda1 * t) + log_ml(k + 1.0, 2.0 * k + 2.0, diff);
}

double pmf(const RatePair& rates, double t, int n) {
    if (n < 0) {
        return 0.0;
    }
    return std::exp(log_pmf(rates, t, n));
}

std::vector<double> pmf_table(const RatePair& rates, double t) {
    std::vector<double> table;
    const double bulk = std::max(rates.lambda1, rates.lambda2) * t;
    int small_run = 0;
    for (int n = 0; n < 100'000; ++n) {
        const double p = pmf(rates, t, n);
        table.push_back(p);
        small_run = p < 1e-14 ? small_run + 1 : 0;
        if (small_run >= 5 && n > bulk) {
            return table;
        }
    }
    throw EvaluationError("pmf tail did not decay", 0.0, table.size());
}

double arrival_pair_density(const RatePair& rates, double t, int n, int l, int m, double t_l, double t_m) {
    rates.validate();
    check_time(t);
    if (l < 1 || m <= l || n < m) {
        throw std::invalid_argument("arrival_pair_density requires 1 <= l < m <= n");
    }
    if (!(t_l > 0.0 && t_l < t_m && t_m < t)) {
        return 0.0;
    }
    const double d = rates.lambda1 - rates.lambda2;
    const int fl = l / 2;
    const int fm = m / 2;
    const int fn = (n + 1) / 2;
    double log_density = log_power(t_l, l - 1) + log_power(t_m - t_l, m - l - 1) +
                         log_power(t - t_m, n - m) - n * std::log(t);
    log_density += log_ml(fl, l, t_l * d);
    log_density += log_ml(fm - fl, m - l, (t_m - t_l) * d);
    log_density += log_ml(fn - fm, n + 1 - m, (t - t_m) * d);
    log_density -= log_ml(fn, n + 1, t * d);
    return std::exp(log_density);
}

double first_arrival_density(const RatePair& rates, double t, int n, double t1) {
    if (n < 1) {
        throw std::invalid_argument("first_arrival_density requires n >= 1");
    }
    if (!(t1 > 0.0 && t1 < t)) {
        return 0.0;
    }
    const double log_density = std::log(rates.lambda1) - rates.lambda1 * t1 +
                               log_pmf(rates.swapped(), t - t1, n - 1) - log_pmf(rates, t, n);
    return std::exp(log_density);
}

double alternating_sum(const SwitchRecord& record) {
    double s = 0.0;
    double sign = 1.0;
    for (double time : record.arrival_times) {
        s += sign * time;
        sign = -sign;
    }
    return s;
}

double alt_sum_density(const RatePair& rates, double t, int n, double s) {
    rates.validate();
    check_time(t);
    if (n < 1) {
        throw std::invalid_argument("alt_sum_density requires n >= 1");
    }
    const double d = rates.lambda1 - rates.lambda2;
    if (n % 2 == 0) {
        const int k = n / 2;
        if (!(s > -t && s < 0.0)) {
            return 0.0;
        }
        const double log_density = -d * s + log_power(-s, k - 1) + k * std::log(t + s) -
                                   log_ml(k, 2.0 * k + 1.0, t * d) - std::lgamma(k + 1.0) -
                                   std::lgamma(static_cast<double>(k)) - 2.0 * k * std::log(t);
        return std::exp(log_density);
    }
    const int k = (n - 1) / 2;
    if (!(s > 0.0 && s < t)) {
        return 0.0;
    }
    const double log_density = d * (t - s) + log_power(s, k) + log_power(t - s, k) -
                               log_ml(k + 1.0, 2.0 * k + 2.0, t * d) - 2.0 * std::lgamma(k + 1.0) -
                               (2.0 * k + 1.0) * std::log(t);
    return std::exp(log_density);
}

double alt_sum_moment(const RatePair& rates, double t, int n, double m) {
    rates.validate();
    check_time(t);
    if (n < 1) {
        throw std::invalid_argument("alt_sum_moment requires n >= 1");
    }
    const double d = t * (rates.lambda1 - rates.lambda2);
    if (n % 2 == 0) {
        const int k = n / 2;
        if (!(m > -k)) {
            throw std::domain_error("alt_sum_moment: even case requires m > -n/2");
        }
        if (m != std::floor(m)) {
            throw std::domain_error("alt_sum_moment: even case requires integer m (S is negative)");
        }
        const double sign = std::fmod(std::abs(m), 2.0) == 1.0 ? -1.0 : 1.0;
        const double log_abs = m * std::log(t) + std::lgamma(k + m) - std::lgamma(static_cast<double>(k)) +
                               log_ml(k + m, 2.0 * k + 1.0 + m, d) - log_ml(k, 2.0 * k + 1.0, d);
        return sign * std::exp(log_abs);
    }
    const int k = (n - 1) / 2;
    if (!(m > -k - 1.0)) {
        throw std::domain_error("alt_sum_moment: odd case requires m > -(n+1)/2");
    }
    const double log_value = m * std::log(t) + std::lgamma(k + m + 1.0) - std::lgamma(k + 1.0) +
                             log_ml(k + 1.0, 2.0 * k + 2.0 + m, d) - log_ml(k + 1.0, 2.0 * k + 2.0, d);
    return std::exp(log_value);
}

RateEstimate mle_rates(const SwitchRecord& record) {
    record.validate();
    const auto n = static_cast<double>(record.count());
    const double t = record.horizon;
    if (record.count() == 0) {
        throw EstimationError("no events: rates cannot be estimated from an empty record");
    }
    RateEstimate estimate;
    const double s = alternating_sum(record);
    estimate.alternating_sum = s;
    if (record.count() % 2 == 0) {
        estimate.branch = Parity::even;
        estimate.lambda1 = (n / 2.0) / (t + s);
        estimate.lambda2 = (n / 2.0) / (-s);
    } else {
        estimate.branch = Parity::odd;
        estimate.lambda1 = (n + 1.0) / (2.0 * s);
        estimate.lambda2 = (n - 1.0) / (2.0 * (t - s));
        estimate.degenerate = record.count() == 1;
    }
    return estimate;
}

double log_likelihood(const SwitchRecord& record, const RatePair& rates) {
    double exposure[2] = {0.0, 0.0};
    double completed[2] = {0.0, 0.0};
    double previous = 0.0;
    int phase = 0;
    for (double time : record.arrival_times) {
        exposure[phase] += time - previous;
        completed[phase] += 1.0;
        previous = time;
        phase ^= 1;
    }
    exposure[phase] += record.horizon - previous;
    return completed[0] * std::log(rates.lambda1) - rates.lambda1 * exposure[0] +
           completed[1] * std::log(rates.lambda2) - rates.lambda2 * exposure[1];
}

void simulate_switches_into(const RatePair& rates, double t, PhiloxStream& rng, std::vector<double>& out) {
    out.clear();
    double now = 0.0;
    bool first = true;
    while (true) {
        now += rng.exponential(first ? rates.lambda1 : rates.lambda2);
        if (now > t) {
            return;
        }
        out.push_back(now);
        first = !first;
    }
}

SwitchRecord simulate_switches(const RatePair& rates, double t, PhiloxStream& rng) {
    rates.validate();
    check_time(t);
    SwitchRecord record;
    record.horizon = t;
    simulate_switches_into(rates, t, rng, record.arrival_times);
    return record;
}

}  // namespace telegraph_kit::counting
