#include "telegraph_kit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "telegraph_kit/conditional.hpp"
#include "telegraph_kit/counting.hpp"
#include "telegraph_kit/csv.hpp"
#include "telegraph_kit/errors.hpp"
#include "telegraph_kit/extremes.hpp"
#include "telegraph_kit/montecarlo.hpp"
#include "telegraph_kit/telegraph.hpp"

namespace telegraph_kit::cli {
namespace {

using json = nlohmann::ordered_json;
using csv::Cell;

struct Settings {
    std::string command;
    std::string law;
    double l1 = 1.0;
    double l2 = 1.0;
    double a1 = 1.0;
    double a2 = -1.0;
    std::optional<double> c;
    double t = 1.0;
    double s = 0.5;
    double x = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    int n = 2;
    std::optional<long long> k;
    std::string v0;
    std::string parity;
    std::string order = "either";
    std::string grid;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string out;
    double tol = 1e-10;
    int nmax = 20;
    int bins = 20;
    std::optional<double> window;
    std::string arrivals;
    std::string in;
    std::string manifest;

    RatePair rates() const { return {l1, l2}; }

    ProcessParams params() const {
        ProcessParams p = c ? ProcessParams{*c, -*c, rates()} : ProcessParams{a1, a2, rates()};
        p.validate();
        return p;
    }

    quadrature::Options quad() const { return {tol, 0.0, 5000}; }
};

std::optional<Velocity> parse_velocity(const std::string& text) {
    if (text.empty() || text == "mixture") {
        return std::nullopt;
    }
    if (text == "upper" || text == "a1" || text == "+") {
        return Velocity::upper;
    }
    if (text == "lower" || text == "a2" || text == "-") {
        return Velocity::lower;
    }
    throw std::invalid_argument("--v0 must be upper, lower or mixture, got '" + text + "'");
}

extremes::Order parse_order(const std::string& text) {
    if (text == "max_first") {
        return extremes::Order::max_first;
    }
    if (text == "min_first") {
        return extremes::Order::min_first;
    }
    if (text == "either") {
        return extremes::Order::either;
    }
    throw std::invalid_argument("--order must be max_first, min_first or either");
}

struct Grid {
    double lo;
    double hi;
    int steps;

    std::vector<double> points() const {
        std::vector<double> out;
        for (int i = 0; i <= steps; ++i) {
            out.push_back(steps == 0 ? lo : lo + (hi - lo) * i / steps);
        }
        return out;
    }
};

/// "lo:hi:steps" gives steps + 1 equally spaced points.
Grid parse_grid(const std::string& text, Grid fallback) {
    if (text.empty()) {
        return fallback;
    }
    std::istringstream in(text);
    std::string lo, hi, steps;
    if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, steps)) {
        throw std::invalid_argument("--grid expects lo:hi:steps, got '" + text + "'");
    }
    Grid g{};
    try {
        std::size_t used = 0;
        g.lo = std::stod(lo, &used);
        g.hi = std::stod(hi, &used);
        g.steps = std::stoi(steps, &used);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("--grid expects lo:hi:steps, got '" + text + "'");
    }
    if (g.steps < 0 || !(g.hi >= g.lo) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) {
        throw std::invalid_argument("--grid needs lo <= hi and steps >= 0");
    }
    return g;
}

// ----------------------------------------------------------------------------
// Laws
// ----------------------------------------------------------------------------

bool is_mixed_law(const std::string& law) {
    return law == "altsum" || law == "pos_given_nv" || law == "pos_free" || law == "pos_given_prev";
}

bool is_extremes_law(const std::string& law) { return law == "extremes_joint" || law == "reflection"; }

Velocity required_velocity(const Settings& s) {
    return parse_velocity(s.v0).value_or(Velocity::upper);
}

conditional::Context context_of(const Settings& s) { return {s.s, s.t, s.x}; }

MixedLaw mixed_law(const Settings& s) {
    if (s.law == "altsum") {
        const RatePair rates = s.rates();
        const double t = s.t;
        const int n = s.n;
        if (n < 1) {
            throw std::invalid_argument("altsum needs --n >= 1");
        }
        const double lo = n % 2 == 0 ? -t : 0.0;
        return MixedLaw({}, lo, lo + t, [rates, t, n](double v) { return counting::alt_sum_density(rates, t, n, v); });
    }
    const ProcessParams p = s.params();
    if (s.law == "pos_given_nv") {
        const Velocity v0 = required_velocity(s);
        const double t = s.t;
        const int n = s.n;
        if (n < 0 || !(t > 0.0)) {
            throw std::invalid_argument("pos_given_nv needs --n >= 0 and --t > 0");
        }
        if (n == 0) {
            return MixedLaw({{p.speed(v0) * t, 1.0}}, p.a2 * t, p.a1 * t, [](double) { return 0.0; });
        }
        return MixedLaw({}, p.a2 * t, p.a1 * t,
                        [p, t, n, v0](double y) { return telegraph::density_given_n_v(p, t, n, v0, y); });
    }
    if (s.law == "pos_free") {
        const auto v0 = parse_velocity(s.v0);
        return v0 ? telegraph::law_given_v(p, s.t, *v0) : telegraph::law(p, s.t);
    }
    if (s.law == "pos_given_prev") {
        const conditional::Context ctx = context_of(s);
        if (s.k) {
            return conditional::law_given_pos_count_vel(p, ctx, *s.k, required_velocity(s));
        }
        if (s.parity == "even") {
            return conditional::law_given_pos_parity(p, ctx, counting::Parity::even);
        }
        if (s.parity == "odd") {
            return conditional::law_given_pos_parity(p, ctx, counting::Parity::odd);
        }
        if (!s.parity.empty()) {
            throw std::invalid_argument("--parity must be even or odd");
        }
        return conditional::law_given_pos(p, ctx);
    }
    throw std::invalid_argument("unknown law '" + s.law + "'");
}

extremes::Query query_at(const Settings& s, double x) {
    extremes::Query q;
    q.c = s.c.value_or(1.0);
    q.t = s.t;
    q.n = s.n;
    q.alpha = s.alpha;
    q.beta = s.beta;
    q.x = x;
    q.order = s.law == "reflection" ? extremes::Order::max_first : parse_order(s.order);
    q.rates = s.rates();
    q.validate();
    return q;
}

bool in_event_support(const extremes::Query& q) {
    const extremes::SupportClass sc = extremes::classify_support(q);
    switch (q.order) {
        case extremes::Order::max_first:
            return sc.in_SM;
        case extremes::Order::min_first:
            return sc.in_Sm;
        case extremes::Order::either:
            break;
    }
    return sc.in_SM || sc.in_Sm;
}

bool reflection_applies(const extremes::Query& q) {
    return extremes::in_reflection_regime(q) && extremes::classify_support(q).in_SM;
}

void require_reflection_scope(const Settings& s) {
    if (!s.rates().equal()) {
        throw ScopeError("the reflection closed form needs lambda1 == lambda2");
    }
}

double extremes_value(const Settings& s, const extremes::Query& q) {
    if (s.law == "reflection") {
        return reflection_applies(q) ? extremes::reflection_closed_form(q) : 0.0;
    }
    return extremes::density(q);
}

// The laws are stated for the non-trivial range x in [-alpha, beta].
Grid extremes_default_grid(const Settings& s) {
    double lo = -s.alpha;
    double hi = s.beta;
    if (s.law == "reflection") {
        const double ct = s.c.value_or(1.0) * s.t;
        lo = std::max(lo, ct - 4.0 * s.alpha - 2.0 * s.beta);
        hi = std::min(hi, ct - 2.0 * s.alpha - 2.0 * s.beta);
        if (!(hi > lo)) {
            throw std::invalid_argument("no x in [-alpha, beta] lies in the reflection regime; pass --grid");
        }
    }
    return {lo, hi, 100};
}

// ----------------------------------------------------------------------------
// density
// ----------------------------------------------------------------------------

csv::Document density_document(const Settings& s) {
    csv::Table values{{"law", "point", "value", "in_support"}, {}};
    csv::Table atoms{{"law", "atom_location", "atom_mass"}, {}};
    auto add = [&](double point, double value, bool inside) {
        values.rows.push_back({s.law, point, value, inside ? 1.0 : 0.0});
    };

    if (s.law == "pmf") {
        const RatePair rates = s.rates();
        rates.validate();
        if (s.nmax < 0) {
            throw std::invalid_argument("--nmax must be >= 0");
        }
        for (int n = 0; n <= s.nmax; ++n) {
            add(n, counting::pmf(rates, s.t, n), true);
        }
        return {values};
    }
    if (is_mixed_law(s.law)) {
        const MixedLaw law = mixed_law(s);
        for (double y : parse_grid(s.grid, {law.lower(), law.upper(), 100}).points()) {
            add(y, law.density(y), y > law.lower() && y < law.upper());
        }
        for (const Atom& atom : law.atoms()) {
            atoms.rows.push_back({s.law, atom.location, atom.mass});
        }
        return {values, atoms};
    }
    if (is_extremes_law(s.law)) {
        if (s.law == "reflection") {
            require_reflection_scope(s);
        }
        for (double x : parse_grid(s.grid, extremes_default_grid(s)).points()) {
            const extremes::Query q = query_at(s, x);
            const bool inside = s.law == "reflection" ? reflection_applies(q) : in_event_support(q);
            add(x, extremes_value(s, q), inside);
        }
        return {values};
    }
    throw std::invalid_argument("unknown law '" + s.law + "'");
}

// ----------------------------------------------------------------------------
// simulate
// ----------------------------------------------------------------------------

struct RowBlock {
    std::vector<std::vector<Cell>> rows;
    void merge(const RowBlock& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

montecarlo::RunOptions run_options(const Settings& s) { return {s.seed, 0, 16384}; }

montecarlo::Start start_of(const std::optional<Velocity>& v0) {
    if (!v0) {
        return montecarlo::Start::mixture;
    }
    return *v0 == Velocity::upper ? montecarlo::Start::upper : montecarlo::Start::lower;
}

std::string join_times(const std::vector<double>& times) {
    std::string out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += csv::format_number(times[i]);
    }
    return out;
}

csv::Document simulate_document(const Settings& s) {
    const ProcessParams p = s.params();
    const montecarlo::Start start = start_of(parse_velocity(s.v0));
    if (!(s.t > 0.0) || s.samples == 0) {
        throw std::invalid_argument("simulate needs --t > 0 and --samples >= 1");
    }
    const double t = s.t;
    const RowBlock block = montecarlo::for_each_path(
        s.samples, run_options(s), RowBlock{}, [&](std::uint64_t i, PhiloxStream& rng, RowBlock& acc) {
            const Velocity v0 = montecarlo::draw_start(start, rng, p.rates);
            const telegraph::PathSample path = telegraph::simulate_path(p, v0, t, rng);
            const auto& record = path.switches();
            acc.rows.push_back({double(i), std::string(v0 == Velocity::upper ? "upper" : "lower"), t,
                                double(record.count()), path.final_position(), path.min_up_to(t),
                                path.max_up_to(t), counting::alternating_sum(record),
                                join_times(record.arrival_times)});
        });
    csv::Table table{{"path", "v0", "horizon", "switches", "final_position", "minimum", "maximum", "alternating_sum",
                      "arrival_times"},
                     block.rows};
    return {table};
}

// ----------------------------------------------------------------------------
// estimate
// ----------------------------------------------------------------------------

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, text.find(',') != std::string::npos ? ',' : ' ')) {
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used != item.size()) {
            throw std::invalid_argument("cannot read arrival time '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

json estimate_json(const counting::SwitchRecord& record, Velocity v0) {
    const counting::RateEstimate est = counting::mle_rates(record);
    const bool swap = v0 == Velocity::lower;
    json j;
    j["lambda1_hat"] = swap ? est.lambda2 : est.lambda1;
    j["lambda2_hat"] = swap ? est.lambda1 : est.lambda2;
    j["branch"] = est.branch == counting::Parity::even ? "even" : "odd";
    j["degenerate"] = est.degenerate;
    j["alternating_sum"] = est.alternating_sum;
    j["switches"] = record.count();
    j["horizon"] = record.horizon;
    j["v0"] = v0 == Velocity::upper ? "upper" : "lower";
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::size_t column(const csv::Table& table, const std::string& name) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
        throw std::invalid_argument("input table has no '" + name + "' column");
    }
    return static_cast<std::size_t>(it - table.header.begin());
}

std::string cell_text(const Cell& cell) {
    return std::holds_alternative<double>(cell) ? csv::format_number(std::get<double>(cell))
                                                : std::get<std::string>(cell);
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string estimate_text(const Settings& s) {
    if (s.in.empty()) {
        counting::SwitchRecord record{s.t, parse_list(s.arrivals)};
        record.validate();
        return estimate_json(record, required_velocity(s)).dump(2) + "\n";
    }
    const csv::Document doc = csv::parse(read_file(s.in));
    if (doc.empty()) {
        throw std::invalid_argument("input file holds no table");
    }
    const csv::Table& table = doc.front();
    const std::size_t v0_col = column(table, "v0");
    const std::size_t horizon_col = column(table, "horizon");
    const std::size_t times_col = column(table, "arrival_times");
    json records = json::array();
    std::vector<double> l1, l2;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::invalid_argument("ragged row in input table");
        }
        const Velocity v0 = parse_velocity(cell_text(row[v0_col])).value_or(Velocity::upper);
        counting::SwitchRecord record{std::stod(cell_text(row[horizon_col])), parse_list(cell_text(row[times_col]))};
        try {
            json j = estimate_json(record, v0);
            l1.push_back(j["lambda1_hat"].get<double>());
            if (!j["degenerate"].get<bool>()) {
                l2.push_back(j["lambda2_hat"].get<double>());
            }
            records.push_back(std::move(j));
        } catch (const EstimationError& e) {
            records.push_back(json{{"error", e.what()}, {"switches", record.count()}});
        }
    }
    json out;
    out["records"] = std::move(records);
    out["median_lambda1_hat"] = median(l1);
    out["median_lambda2_hat"] = median(l2);
    return out.dump(2) + "\n";
}

// ----------------------------------------------------------------------------
// compare
// ----------------------------------------------------------------------------

struct Comparison {
    csv::Table bins{{"law", "kind", "lo", "hi", "analytic", "empirical", "se", "z"}, {}};
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    double max_abs_z = 0.0;
    std::optional<double> ks;

    void add(const std::string& law, const std::string& kind, double lo, double hi, double analytic,
             double empirical, double n) {
        const double se = n > 0.0 ? std::sqrt(std::max(analytic * (1.0 - analytic), 0.0) / n) : 0.0;
        double z = 0.0;
        if (se > 0.0) {
            z = (empirical - analytic) / se;
        } else if (empirical != analytic) {
            z = std::numeric_limits<double>::infinity();
        }
        max_abs_z = std::max(max_abs_z, std::abs(z));
        bins.rows.push_back({law, kind, lo, hi, analytic, empirical, se, z});
    }

    bool failed() const { return max_abs_z > 5.0; }

    csv::Document document() const {
        csv::Table summary{{"statistic", "value"}, {}};
        summary.rows.push_back({std::string("samples"), double(attempted)});
        summary.rows.push_back({std::string("accepted"), double(accepted)});
        summary.rows.push_back({std::string("max_abs_z"), max_abs_z});
        summary.rows.push_back({std::string("ks"), ks ? Cell(*ks) : Cell(std::string("na"))});
        summary.rows.push_back({std::string("verdict"), std::string(failed() ? "fail" : "pass")});
        return {bins, summary};
    }
};

double checked(const quadrature::Result& r, const char* what) {
    if (!r.converged) {
        throw EvaluationError(std::string("quadrature did not converge for ") + what, r.value, r.intervals);
    }
    return r.value;
}

void compare_mixed(const Settings& s, const MixedLaw& law, const montecarlo::EmpiricalSummary& sum, Comparison& cmp) {
    const double n = double(sum.sample_count);
    for (std::size_t i = 0; i < sum.bin_masses.size(); ++i) {
        const double lo = sum.bin_edges[i], hi = sum.bin_edges[i + 1];
        cmp.add(s.law, "bin", lo, hi, checked(law.interval_mass(lo, hi, s.quad()), "a bin mass"), sum.bin_masses[i],
                n);
    }
    for (const Atom& atom : law.atoms()) {
        const auto it = sum.atom_masses.find(atom.location);
        cmp.add(s.law, "atom", atom.location, atom.location, atom.mass,
                it == sum.atom_masses.end() ? 0.0 : it->second, n);
    }
    cmp.attempted = sum.attempted;
    cmp.accepted = sum.sample_count;
    if (!sum.samples.empty()) {
        const montecarlo::TabulatedCdf cdf(law);
        cmp.ks = montecarlo::ks_distance(sum, [&](double y) { return cdf(y); });
    }
}

std::vector<double> atom_locations(const MixedLaw& law) {
    std::vector<double> out;
    for (const Atom& atom : law.atoms()) {
        out.push_back(atom.location);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Collected {
    montecarlo::Histogram histogram;
    std::vector<double> samples;
    std::uint64_t attempted = 0;
    void merge(const Collected& other) {
        histogram.merge(other.histogram);
        samples.insert(samples.end(), other.samples.begin(), other.samples.end());
        attempted += other.attempted;
    }
};

int checked_bins(const Settings& s) {
    if (s.bins < 1) {
        throw std::invalid_argument("--bins must be >= 1");
    }
    return s.bins;
}

montecarlo::Histogram bins_for(const Settings& s, const MixedLaw& law) {
    const Grid g = parse_grid(s.grid, {law.lower(), law.upper(), checked_bins(s)});
    if (g.steps < 1 || !(g.hi > g.lo)) {
        throw std::invalid_argument("compare needs a grid with at least one bin");
    }
    return montecarlo::Histogram::uniform(g.lo, g.hi, static_cast<std::size_t>(g.steps), atom_locations(law));
}

// Paths with exactly n switches: the alternating sum or the final position.
montecarlo::EmpiricalSummary conditioned_on_count(const Settings& s, const montecarlo::Histogram& bins) {
    const double t = s.t;
    const int n = s.n;
    const bool altsum = s.law == "altsum";
    const ProcessParams p = altsum ? ProcessParams{1.0, -1.0, s.rates()} : s.params();
    const Velocity v0 = altsum ? Velocity::upper : required_velocity(s);
    const RatePair rates = p.rates_from(v0);
    montecarlo::require_count_reachable(rates, t, n);
    const Collected total = montecarlo::for_each_path(
        s.samples, run_options(s), Collected{bins, {}, 0},
        [&](std::uint64_t, PhiloxStream& rng, Collected& acc) {
            thread_local std::vector<double> times;
            montecarlo::sample_switches_given_count(rates, t, n, rng, times, 0.0);
            counting::SwitchRecord record{t, times};
            const double value = altsum ? counting::alternating_sum(record)
                                        : telegraph::PathSample(p, v0, std::move(record)).final_position();
            acc.histogram.add(value);
            acc.samples.push_back(value);
            ++acc.attempted;
        });
    return montecarlo::summarize(total.histogram, total.attempted, total.samples);
}

Comparison compare_pmf(const Settings& s) {
    const RatePair rates = s.rates();
    rates.validate();
    if (s.nmax < 0) {
        throw std::invalid_argument("--nmax must be >= 0");
    }
    std::vector<double> edges;
    for (int n = 0; n <= s.nmax + 1; ++n) {
        edges.push_back(n - 0.5);
    }
    const double t = s.t;
    const Collected total = montecarlo::for_each_path(
        s.samples, run_options(s), Collected{montecarlo::Histogram(edges), {}, 0},
        [&](std::uint64_t, PhiloxStream& rng, Collected& acc) {
            thread_local std::vector<double> times;
            counting::simulate_switches_into(rates, t, rng, times);
            acc.histogram.add(double(times.size()));
            ++acc.attempted;
        });
    Comparison cmp;
    const double n = double(total.attempted);
    double analytic_cdf = 0.0, empirical_cdf = 0.0, ks = 0.0;
    for (int k = 0; k <= s.nmax; ++k) {
        const double p = counting::pmf(rates, t, k);
        const double e = double(total.histogram.counts()[std::size_t(k)]) / n;
        cmp.add(s.law, "count", k, k, p, e, n);
        analytic_cdf += p;
        empirical_cdf += e;
        ks = std::max(ks, std::abs(analytic_cdf - empirical_cdf));
    }
    cmp.add(s.law, "tail", s.nmax + 1, std::numeric_limits<double>::infinity(), std::max(0.0, 1.0 - analytic_cdf),
            double(total.histogram.above()) / n, n);
    cmp.attempted = total.attempted;
    cmp.accepted = total.attempted;
    cmp.ks = ks;
    return cmp;
}

Comparison compare_position_given_previous(const Settings& s, const MixedLaw& law, const montecarlo::Histogram& bins) {
    const ProcessParams p = s.params();
    const double sv = s.s, x = s.x;
    const double h = s.window.value_or(0.002 * p.spread() * sv);
    const std::optional<long long> k = s.k;
    const std::string parity = s.parity;
    // A known count fixes V(0); otherwise V(0) follows the stationary law.
    const montecarlo::Start start = k ? start_of(required_velocity(s)) : montecarlo::Start::stationary;
    const auto sum = montecarlo::conditional_histogram(
        p, start, s.t, s.samples,
        [=](const telegraph::PathSample& path) {
            if (!(std::abs(path.position(sv) - x) < h)) {
                return false;
            }
            const std::size_t count = path.switches_up_to(sv);
            if (k) {
                return count == std::size_t(*k);
            }
            if (!parity.empty()) {
                return (count % 2 == 0) == (parity == "even");
            }
            return true;
        },
        [=](const telegraph::PathSample& path) {
            const std::size_t before = path.switches_up_to(sv);
            if (path.switch_count() == before) {
                // No switch after s: land exactly on the atom.
                return x + p.speed(after_switches(path.initial_velocity(), before)) * (path.horizon() - sv);
            }
            return path.final_position() - path.position(sv) + x;
        },
        bins,
        run_options(s), 1e-6, true);
    Comparison cmp;
    compare_mixed(s, law, sum, cmp);
    return cmp;
}

Comparison compare_extremes(const Settings& s) {
    if (s.law == "reflection") {
        require_reflection_scope(s);
    }
    const Grid g = parse_grid(s.grid, [&] {
        Grid d = extremes_default_grid(s);
        d.steps = checked_bins(s);
        return d;
    }());
    if (g.steps < 1 || !(g.hi > g.lo)) {
        throw std::invalid_argument("compare needs a grid with at least one bin");
    }
    const extremes::Query base = query_at(s, 0.0);
    const auto bins = montecarlo::Histogram::uniform(g.lo, g.hi, static_cast<std::size_t>(g.steps));
    const auto sum = montecarlo::extremes_histogram(base, s.samples, bins, run_options(s));
    Comparison cmp;
    const double n = double(s.samples);
    const quadrature::Options opts{std::max(s.tol, 1e-9), 1e-7, 2000};
    for (std::size_t i = 0; i < sum.bin_masses.size(); ++i) {
        const double lo = sum.bin_edges[i], hi = sum.bin_edges[i + 1];
        if (s.law == "reflection") {
            for (double edge : {lo, hi}) {
                const extremes::Query q = query_at(s, edge);
                if (!extremes::in_reflection_regime(q)) {
                    throw std::invalid_argument("bin edge " + csv::format_number(edge) +
                                                " lies outside the reflection regime");
                }
            }
        }
        const double analytic = checked(
            quadrature::integrate([&](double x) { return extremes_value(s, query_at(s, x)); }, lo, hi, opts),
            "an extremes bin");
        cmp.add(s.law, "bin", lo, hi, analytic, sum.bin_masses[i], n);
    }
    cmp.attempted = sum.attempted;
    cmp.accepted = sum.sample_count;
    return cmp;
}

Comparison comparison(const Settings& s) {
    if (s.samples == 0) {
        throw std::invalid_argument("--samples must be >= 1");
    }
    if (s.law == "pmf") {
        return compare_pmf(s);
    }
    if (is_extremes_law(s.law)) {
        return compare_extremes(s);
    }
    if (!is_mixed_law(s.law)) {
        throw std::invalid_argument("unknown law '" + s.law + "'");
    }
    const MixedLaw law = mixed_law(s);
    const montecarlo::Histogram bins = bins_for(s, law);
    if (s.law == "pos_given_prev") {
        return compare_position_given_previous(s, law, bins);
    }
    Comparison cmp;
    if (s.law == "pos_free") {
        const ProcessParams p = s.params();
        const auto sum = montecarlo::run_batch(p, start_of(parse_velocity(s.v0)), s.t, s.samples, bins,
                                               run_options(s), true);
        compare_mixed(s, law, sum, cmp);
        return cmp;
    }
    compare_mixed(s, law, conditioned_on_count(s, bins), cmp);
    return cmp;
}

// ----------------------------------------------------------------------------
// Output and manifests
// ----------------------------------------------------------------------------

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream out;
    out << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json manifest_of(const Settings& s, const std::vector<std::string>& args) {
    json params;
    params["law"] = s.law;
    params["l1"] = s.l1;
    params["l2"] = s.l2;
    params["a1"] = s.a1;
    params["a2"] = s.a2;
    params["c"] = optional_json(s.c);
    params["t"] = s.t;
    params["s"] = s.s;
    params["x"] = s.x;
    params["alpha"] = s.alpha;
    params["beta"] = s.beta;
    params["n"] = s.n;
    params["k"] = s.k ? json(*s.k) : json(nullptr);
    params["v0"] = s.v0;
    params["parity"] = s.parity;
    params["order"] = s.order;
    params["grid"] = s.grid;
    params["samples"] = s.samples;
    params["nmax"] = s.nmax;
    params["bins"] = s.bins;
    params["window"] = optional_json(s.window);
    params["arrivals"] = s.arrivals;
    params["in"] = s.in;
    json m;
    m["command"] = s.command;
    m["arguments"] = args;
    m["parameters"] = std::move(params);
    m["seed"] = s.seed;
    m["tolerance"] = s.tol;
    m["version"] = TELEGRAPH_KIT_VERSION;
    m["timestamp"] = timestamp();
    return m;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
}

void emit(const Settings& s, const std::vector<std::string>& args, const std::string& text, std::ostream& out) {
    if (s.out.empty()) {
        out << text;
        return;
    }
    write_file(s.out, text);
    write_file(s.out + ".manifest.json", manifest_of(s, args).dump(2) + "\n");
}

void add_model_options(CLI::App* app, Settings& s) {
    app->add_option("--l1", s.l1, "switching rate at the upper velocity");
    app->add_option("--l2", s.l2, "switching rate at the lower velocity");
    app->add_option("--a1", s.a1, "upper velocity");
    app->add_option("--a2", s.a2, "lower velocity");
    app->add_option("--c", s.c, "symmetric speed; sets a1 = c, a2 = -c");
    app->add_option("--t", s.t, "time horizon");
    app->add_option("--v0", s.v0, "initial velocity: upper, lower or mixture");
    app->add_option("--seed", s.seed, "random seed");
    app->add_option("--samples", s.samples, "number of simulated paths");
    app->add_option("--out", s.out, "output file (a manifest is written next to it)");
}

void add_law_options(CLI::App* app, Settings& s) {
    app->add_option("--law", s.law, "pmf, altsum, pos_given_nv, pos_free, pos_given_prev, extremes_joint, reflection")
        ->required();
    app->add_option("--s", s.s, "earlier observation time");
    app->add_option("--x", s.x, "observed position at time s, or position for extremes laws");
    app->add_option("--alpha", s.alpha, "lower level is -alpha");
    app->add_option("--beta", s.beta, "upper level is beta");
    app->add_option("--n", s.n, "number of switches");
    app->add_option("--k", s.k, "number of switches up to time s");
    app->add_option("--parity", s.parity, "parity of the switch count up to time s: even or odd");
    app->add_option("--order", s.order, "max_first, min_first or either");
    app->add_option("--grid", s.grid, "lo:hi:steps");
    app->add_option("--tol", s.tol, "absolute quadrature tolerance");
    app->add_option("--nmax", s.nmax, "largest count for the pmf");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int replay(const Settings& s, std::ostream& out, std::ostream& err) {
    const json m = json::parse(read_file(s.manifest));
    std::vector<std::string> args = m.at("arguments").get<std::vector<std::string>>();
    if (!s.out.empty()) {
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--out") {
                ++i;
            } else if (args[i].rfind("--out=", 0) != 0) {
                kept.push_back(args[i]);
            }
        }
        kept.push_back("--out");
        kept.push_back(s.out);
        args = std::move(kept);
    }
    if (!args.empty() && args.front() == "replay") {
        throw std::invalid_argument("a manifest cannot replay another manifest");
    }
    return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Exact laws and simulation of the telegraph process", "telegraph_kit"};
    app.require_subcommand(1);

    CLI::App* density = app.add_subcommand("density", "evaluate a law on a grid");
    add_model_options(density, s);
    add_law_options(density, s);

    CLI::App* simulate = app.add_subcommand("simulate", "simulate paths and write one row per path");
    add_model_options(simulate, s);

    CLI::App* estimate = app.add_subcommand("estimate", "maximum likelihood switching rates");
    estimate->add_option("--arrivals", s.arrivals, "comma separated switch times");
    estimate->add_option("--t", s.t, "observation horizon");
    estimate->add_option("--v0", s.v0, "initial velocity of the record");
    estimate->add_option("--in", s.in, "CSV written by simulate; one estimate per path");
    estimate->add_option("--out", s.out, "output file");

    CLI::App* compare = app.add_subcommand("compare", "compare a law with simulation bin by bin");
    add_model_options(compare, s);
    add_law_options(compare, s);
    compare->add_option("--bins", s.bins, "number of bins when no grid is given");
    compare->add_option("--window", s.window, "half-width of the window around T(s) = x");

    CLI::App* replay_cmd = app.add_subcommand("replay", "re-run the command stored in a manifest");
    replay_cmd->add_option("--manifest", s.manifest, "manifest file")->required();
    replay_cmd->add_option("--out", s.out, "write to this file instead of the recorded one");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? success : invalid_input;
    }

    s.command = app.get_subcommands().front()->get_name();
    if (s.command == "replay") {
        return replay(s, out, err);
    }
    if (s.command == "density") {
        emit(s, args, csv::to_string(density_document(s)), out);
        return success;
    }
    if (s.command == "simulate") {
        emit(s, args, csv::to_string(simulate_document(s)), out);
        return success;
    }
    if (s.command == "estimate") {
        if (s.in.empty() == s.arrivals.empty()) {
            throw std::invalid_argument("estimate needs exactly one of --arrivals and --in");
        }
        emit(s, args, estimate_text(s), out);
        return success;
    }
    const Comparison cmp = comparison(s);
    emit(s, args, csv::to_string(cmp.document()), out);
    if (cmp.failed()) {
        err << "compare: max |z| = " << cmp.max_abs_z << " exceeds 5\n";
        return statistical_failure;
    }
    return success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const EvaluationError& e) {
        err << "error: " << e.what() << " (partial sum " << e.partial_sum() << " after " << e.terms() << " terms)\n";
        return non_convergence;
    } catch (const ScopeError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const AcceptanceError& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    } catch (const json::exception& e) {
        err << "error: bad manifest: " << e.what() << "\n";
        return invalid_input;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return invalid_input;
    }
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace telegraph_kit::cli
