#include "telegraph_kit/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/errors.hpp"

namespace telegraph_kit::montecarlo {

unsigned default_workers() {
    if (const char* env = std::getenv("TELEGRAPH_KIT_THREADS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value > 0) {
            return static_cast<unsigned>(value);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Histogram::Histogram(std::vector<double> edges, std::vector<double> atoms)
    : edges_(std::move(edges)), atoms_(std::move(atoms)) {
    if (edges_.size() < 2 || !std::is_sorted(edges_.begin(), edges_.end()) ||
        std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("histogram edges must be strictly increasing with at least two entries");
    }
    const double scale = std::max(std::abs(edges_.front()), std::abs(edges_.back()));
    atom_tolerance_ = 1e-9 * std::max(scale, 1.0);
    counts_.assign(edges_.size() - 1, 0);
    atom_counts_.assign(atoms_.size(), 0);
}

Histogram Histogram::uniform(double lo, double hi, std::size_t bins, std::vector<double> atoms) {
    if (!(hi > lo) || bins == 0) {
        throw std::invalid_argument("uniform histogram needs lo < hi and at least one bin");
    }
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    return Histogram(std::move(edges), std::move(atoms));
}

void Histogram::add(double value) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (std::abs(value - atoms_[i]) <= atom_tolerance_) {
            ++atom_counts_[i];
            return;
        }
    }
    if (value < edges_.front()) {
        ++below_;
        return;
    }
    if (value >= edges_.back()) {
        ++above_;
        return;
    }
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
    ++counts_[static_cast<std::size_t>(it - edges_.begin()) - 1];
}

void Histogram::merge(const Histogram& other) {
    if (other.counts_.size() != counts_.size() || other.atom_counts_.size() != atom_counts_.size()) {
        throw std::invalid_argument("cannot merge histograms with different layouts");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
    for (std::size_t i = 0; i < atom_counts_.size(); ++i) {
        atom_counts_[i] += other.atom_counts_[i];
    }
    below_ += other.below_;
    above_ += other.above_;
}

std::uint64_t Histogram::total() const {
    std::uint64_t sum = below_ + above_;
    for (auto c : counts_) sum += c;
    for (auto c : atom_counts_) sum += c;
    return sum;
}

EmpiricalSummary summarize(const Histogram& histogram, std::uint64_t attempted, std::vector<double> samples) {
    EmpiricalSummary out;
    out.sample_count = histogram.total();
    out.attempted = attempted;
    out.bin_edges = histogram.edges();
    out.bin_counts = histogram.counts();
    out.below = histogram.below();
    out.above = histogram.above();
    const double n = static_cast<double>(out.sample_count);
    for (std::uint64_t c : out.bin_counts) {
        const double p = n > 0 ? double(c) / n : 0.0;
        out.bin_masses.push_back(p);
        out.standard_errors.push_back(n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0);
    }
    for (std::size_t i = 0; i < histogram.atoms().size(); ++i) {
        out.atom_masses[histogram.atoms()[i]] = n > 0 ? double(histogram.atom_counts()[i]) / n : 0.0;
    }
    std::sort(samples.begin(), samples.end());
    out.samples = std::move(samples);
    return out;
}

Velocity draw_start(Start start, PhiloxStream& rng, const RatePair& rates) {
    switch (start) {
        case Start::upper:
            return Velocity::upper;
        case Start::lower:
            return Velocity::lower;
        case Start::stationary:
            return rng.uniform() * (rates.lambda1 + rates.lambda2) < rates.lambda2 ? Velocity::upper : Velocity::lower;
        case Start::mixture:
            break;
    }
    return rng.bernoulli_half() ? Velocity::upper : Velocity::lower;
}

namespace {

struct Collector {
    Histogram histogram;
    std::vector<double> samples;
    std::uint64_t attempted = 0;
    bool keep = false;

    void merge(const Collector& other) {
        histogram.merge(other.histogram);
        samples.insert(samples.end(), other.samples.begin(), other.samples.end());
        attempted += other.attempted;
    }
};

}  // namespace

EmpiricalSummary run_batch(const ProcessParams& params, Start start, double t, std::uint64_t count,
                           const Histogram& bins, const RunOptions& options, bool keep_samples) {
    return conditional_histogram(
        params, start, t, count, [](const telegraph::PathSample&) { return true; },
        [](const telegraph::PathSample& path) { return path.final_position(); }, bins, options, 0.0, keep_samples);
}

EmpiricalSummary conditional_histogram(const ProcessParams& params, Start start, double t, std::uint64_t count,
                                       const PathPredicate& predicate, const PathValue& value, const Histogram& bins,
                                       const RunOptions& options, double min_acceptance, bool keep_samples) {
    params.validate();
    if (!(t > 0.0) || count == 0) {
        throw std::invalid_argument("simulation needs t > 0 and at least one path");
    }
    Collector empty{Histogram(bins.edges(), bins.atoms()), {}, 0, keep_samples};
    auto body = [&](std::uint64_t, PhiloxStream& rng, Collector& acc) {
        thread_local telegraph::PathSample path;
        const Velocity v0 = draw_start(start, rng, params.rates);
        telegraph::simulate_path_into(path, params, v0, t, rng);
        ++acc.attempted;
        if (!predicate(path)) {
            return;
        }
        const double v = value(path);
        acc.histogram.add(v);
        if (acc.keep) {
            acc.samples.push_back(v);
        }
    };
    auto check = [&](const Collector& c) {
        const double rate = c.attempted == 0 ? 0.0 : double(c.histogram.total()) / double(c.attempted);
        if (min_acceptance > 0.0 && rate < min_acceptance) {
            throw AcceptanceError("conditioning event accepted " + std::to_string(rate) +
                                      " of paths; widen the conditioning window or change parameters",
                                  rate);
        }
    };
    if (min_acceptance > 0.0) {
        RunOptions pilot = options;
        pilot.seed = options.seed ^ 0x9E3779B97F4A7C15ull;
        check(for_each_path(std::min<std::uint64_t>(count, 100'000), pilot, empty, body));
    }
    const Collector total = for_each_path(count, options, empty, body);
    check(total);
    return summarize(total.histogram, total.attempted, total.samples);
}

void require_count_reachable(const RatePair& rates, double t, int n, double min_acceptance) {
    if (rates.equal() || !(min_acceptance > 0.0)) {
        return;
    }
    const double p = counting::pmf(rates, t, n);
    if (p < min_acceptance) {
        throw AcceptanceError("P{N(t) = " + std::to_string(n) + "} = " + std::to_string(p) +
                                  " is below the rejection floor",
                              p);
    }
}

void sample_switches_given_count(const RatePair& rates, double t, int n, PhiloxStream& rng, std::vector<double>& out,
                                 double min_acceptance) {
    out.resize(static_cast<std::size_t>(n));
    if (rates.equal()) {
        for (double& v : out) {
            v = t * rng.uniform();
        }
        std::sort(out.begin(), out.end());
        return;
    }
    require_count_reachable(rates, t, n, min_acceptance);
    // Given N(t) = n the switch times are uniform on the simplex, reweighted by
    // exp(-(lambda1 - lambda2) U) with U the time spent at the first velocity.
    const double delta = rates.lambda1 - rates.lambda2;
    if (std::abs(delta) * t > 4.0) {
        do {
            counting::simulate_switches_into(rates, t, rng, out);
        } while (out.size() != static_cast<std::size_t>(n));
        return;
    }
    for (;;) {
        for (double& v : out) {
            v = t * rng.uniform();
        }
        std::sort(out.begin(), out.end());
        double first = 0.0;
        double previous = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double next = i < n ? out[static_cast<std::size_t>(i)] : t;
            if (i % 2 == 0) {
                first += next - previous;
            }
            previous = next;
        }
        const double excess = delta > 0.0 ? delta * first : -delta * (t - first);
        if (rng.uniform() < std::exp(-excess)) {
            return;
        }
    }
}

bool LevelEvent::matches(extremes::Order order) const {
    if (!(below && above)) {
        return false;
    }
    switch (order) {
        case extremes::Order::max_first:
            return max_first;
        case extremes::Order::min_first:
            return !max_first;
        case extremes::Order::either:
            break;
    }
    return true;
}

LevelEvent level_event(const telegraph::PathSample& path, double alpha, double beta) {
    LevelEvent e;
    const double up = path.first_passage_above(beta);
    const double down = path.first_passage_below(-alpha);
    e.above = std::isfinite(up);
    e.below = std::isfinite(down);
    e.max_first = up < down;
    return e;
}

EmpiricalSummary extremes_histogram(const extremes::Query& q, std::uint64_t count, const Histogram& bins,
                                    const RunOptions& options) {
    q.validate();
    const ProcessParams params = q.process();
    require_count_reachable(q.rates, q.t, q.n);
    Collector empty{Histogram(bins.edges(), bins.atoms()), {}, 0, false};
    const Collector total = for_each_path(count, options, empty, [&](std::uint64_t, PhiloxStream& rng, Collector& acc) {
        thread_local telegraph::PathSample path;
        path.assign(params, Velocity::upper, q.t);
        sample_switches_given_count(q.rates, q.t, q.n, rng, path.mutable_arrivals(), 0.0);
        path.rebuild();
        ++acc.attempted;
        if (level_event(path, q.alpha, q.beta).matches(q.order)) {
            acc.histogram.add(path.final_position());
        }
    });
    EmpiricalSummary out = summarize(total.histogram, total.attempted);
    const double n = static_cast<double>(count);
    for (std::size_t i = 0; i < out.bin_counts.size(); ++i) {
        const double p = double(out.bin_counts[i]) / n;
        out.bin_masses[i] = p;
        out.standard_errors[i] = std::sqrt(p * (1.0 - p) / n);
    }
    for (auto& [location, mass] : out.atom_masses) {
        mass *= double(out.sample_count) / n;
    }
    out.sample_count = count;
    return out;
}

double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) {
        throw std::invalid_argument("ks_distance needs at least one sample");
    }
    const double n = static_cast<double>(sorted.size());
    double worst = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        const double x = sorted[i];
        const double before = double(i) / n;
        const double after = double(j) / n;
        const double left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
        const double right = cdf(x);
        worst = std::max({worst, std::abs(after - right), std::abs(before - left)});
        i = j;
    }
    return worst;
}

double ks_distance(const EmpiricalSummary& summary, const std::function<double(double)>& cdf) {
    if (summary.samples.empty()) {
        throw std::invalid_argument("summary holds no raw samples; run with keep_samples");
    }
    return ks_distance(summary.samples, cdf);
}

TabulatedCdf::TabulatedCdf(const MixedLaw& law, std::size_t cells)
    : lower_(law.lower()), upper_(law.upper()), atoms_(law.atoms()) {
    grid_.resize(cells + 1);
    values_.resize(cells + 1);
    double running = 0.0;
    for (std::size_t i = 0; i <= cells; ++i) {
        grid_[i] = lower_ + (upper_ - lower_) * static_cast<double>(i) / static_cast<double>(cells);
        if (i > 0) {
            running += law.interval_mass(grid_[i - 1], grid_[i], {1e-13, 1e-12, 64}).value;
        }
        values_[i] = running;
    }
}

double TabulatedCdf::operator()(double y) const {
    double value = 0.0;
    if (y >= upper_) {
        value = values_.back();
    } else if (y > lower_) {
        const double pos = (y - lower_) / (upper_ - lower_) * static_cast<double>(grid_.size() - 1);
        const std::size_t i = std::min(static_cast<std::size_t>(pos), grid_.size() - 2);
        const double frac = pos - static_cast<double>(i);
        value = values_[i] + frac * (values_[i + 1] - values_[i]);
    }
    for (const Atom& atom : atoms_) {
        if (atom.location <= y) {
            value += atom.mass;
        }
    }
    return value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace telegraph_kit::montecarlo
