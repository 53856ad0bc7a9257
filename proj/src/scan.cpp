#include "succmax/scan.hpp"

#include "succmax/arith.hpp"
#include "succmax/classnum.hpp"
#include "succmax/genus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <exception>
#include <ostream>
#include <thread>

namespace succmax {

namespace {

constexpr std::uint64_t chunk_size = std::uint64_t{1} << 20;

bool is_raw(MetricKind m)
{
    return m == MetricKind::raw_H || m == MetricKind::raw_h;
}

bool uses_h(MetricKind m)
{
    return m == MetricKind::nongenus || m == MetricKind::raw_h;
}

std::vector<Epsilon> effective_eps(ScanConfig const & config)
{
    if (is_raw(config.metric))
        return {Epsilon()};
    return config.eps_list;
}

std::string render_mean(std::uint64_t exact, Real mean, std::uint64_t nK)
{
    return nK == 1 ? std::to_string(exact) : format_real(mean);
}

struct Shard
{
    std::uint64_t lo, hi;
};

std::vector<Shard> split(std::uint64_t lo, std::uint64_t hi, unsigned shards)
{
    std::vector<Shard> out;
    std::uint64_t const span = hi - lo + 1;
    std::uint64_t const n = std::min<std::uint64_t>(shards, span);
    std::uint64_t start = lo;
    for (std::uint64_t s = 0; s < n; ++s) {
        std::uint64_t const len = span / n + (s < span % n ? 1 : 0);
        out.push_back({start, start + len - 1});
        start += len;
    }
    return out;
}

} // namespace

MetricKind parse_metric_kind(std::string const & s)
{
    if (s == "nongenus")
        return MetricKind::nongenus;
    if (s == "full")
        return MetricKind::full;
    if (s == "raw_H" || s == "raw-H")
        return MetricKind::raw_H;
    if (s == "raw_h" || s == "raw-h")
        return MetricKind::raw_h;
    throw ConfigError("unknown metric '" + s + "'");
}

Family parse_family(std::string const & s)
{
    if (s == "quad_imaginary" || s == "imaginary")
        return Family::quad_imaginary;
    if (s == "quad_real" || s == "real")
        return Family::quad_real;
    if (s == "cubic")
        return Family::cubic;
    throw ConfigError("unknown family '" + s + "'");
}

Mode parse_mode(std::string const & s)
{
    if (s == "maxima")
        return Mode::maxima;
    if (s == "minima")
        return Mode::minima;
    throw ConfigError("unknown mode '" + s + "'");
}

Scope parse_scope(std::string const & s)
{
    if (s == "exact_conductor" || s == "exact")
        return Scope::exact_conductor;
    if (s == "divisors")
        return Scope::divisors;
    throw ConfigError("unknown scope '" + s + "'");
}

OutputFormat parse_output_format(std::string const & s)
{
    if (s == "text")
        return OutputFormat::text;
    if (s == "csv")
        return OutputFormat::csv;
    if (s == "json-lines" || s == "jsonl")
        return OutputFormat::json_lines;
    throw ConfigError("unknown format '" + s + "'");
}

void ScanConfig::validate() const
{
    if (lo == 0 || lo > hi)
        throw ConfigError("range must satisfy 1 <= min <= max");
    if (hi > (std::uint64_t{1} << 62))
        throw ConfigError("range exceeds 2^62");
    if (shards == 0)
        throw ConfigError("shard count must be positive");
    if (is_raw(metric)) {
        for (auto const & e : eps_list)
            if (!e.is_zero())
                throw ConfigError("raw metrics take no eps (they are H or h themselves)");
    } else if (eps_list.empty()) {
        throw ConfigError("at least one --eps is required");
    }
    if (per_field_max && family != Family::cubic)
        throw ConfigError("per-field-max applies to the cubic family only");
    if (per_field_max && scope != Scope::exact_conductor)
        throw ConfigError("per-field-max requires the exact_conductor scope");
    if (family == Family::cubic && hi >= (std::uint64_t{1} << 31))
        throw ConfigError("cubic conductors must stay below 2^31");
}

FieldRecord quadratic_record(QuadDiscriminant const & d, std::uint64_t H)
{
    FieldRecord r;
    r.family = d.signature == Signature::imaginary ? Family::quad_imaginary : Family::quad_real;
    r.key = d.abs;
    r.d_k = d.value;
    r.N = d.n_ramified;
    r.H = H;
    r.h = nongenus_part(H, genus_number_cyclic(2, d.n_ramified));
    r.H_mean = static_cast<Real>(r.H);
    r.h_mean = static_cast<Real>(r.h);
    return r;
}

void for_each_quadratic_chunk(Signature signature, std::uint64_t lo, std::uint64_t hi,
                              std::function<void(std::vector<FieldRecord> const &)> const & sink)
{
    std::vector<FieldRecord> records;
    for (std::uint64_t start = lo; start <= hi;) {
        std::uint64_t const stop = std::min(hi, start + chunk_size - 1);
        auto const discs = sieve_fundamental_discriminants(signature, start, stop);
        records.clear();
        if (!discs.empty()) {
            if (signature == Signature::imaginary) {
                ImaginaryClassNumberTable const table(discs.front().abs, discs.back().abs);
                for (auto const & d : discs)
                    records.push_back(quadratic_record(d, table(d.abs)));
            } else {
                for (auto const & d : discs)
                    records.push_back(quadratic_record(d, narrow_class_number_real(d)));
            }
            sink(records);
        }
        if (stop == hi)
            break;
        start = stop + 1;
    }
}

std::vector<FieldRecord> quadratic_records(Signature signature, std::uint64_t lo, std::uint64_t hi)
{
    std::vector<FieldRecord> out;
    for_each_quadratic_chunk(signature, lo, hi, [&](auto const & chunk) {
        out.insert(out.end(), chunk.begin(), chunk.end());
    });
    return out;
}

ScanRecord make_scan_record(FieldRecord const & field, MetricKind metric, Epsilon eps)
{
    if (field.family == Family::cubic)
        throw std::invalid_argument("make_scan_record: cubic records come from cubic_scan_records");
    std::uint64_t const num = uses_h(metric) ? field.h : field.H;
    MetricValue v = is_raw(metric) ? c_eps(num, 1, Epsilon()) : c_eps(num, field.key, eps);
    return {field, std::move(v), 0};
}

std::vector<ScanRecord> cubic_scan_records(std::uint64_t f, Scope scope, Epsilon eps, MetricKind metric,
                                           bool per_field_max, CubicClassNumbers const & class_numbers)
{
    CubicMetric const kind = uses_h(metric) ? CubicMetric::nongenus : CubicMetric::full;
    FamilyAggregate const agg = aggregate_family(f, scope, is_raw(metric) ? Epsilon() : eps, kind, class_numbers);
    if (per_field_max)
        return per_field_scan_records(agg);
    return {family_scan_record(agg)};
}

std::vector<ScanResult> run_scan(ScanConfig const & config, CubicClassNumbers const * class_numbers)
{
    config.validate();
    if (config.family == Family::cubic && !class_numbers)
        throw ConfigError("cubic scans need a class number source");
    std::vector<Epsilon> const eps = effective_eps(config);
    std::vector<Shard> const shards = split(config.lo, config.hi, config.shards);

    auto initial = [&](Epsilon e) -> std::optional<MetricValue> {
        if (config.compat_minima_init_one)
            return metric_one(e);
        return std::nullopt;
    };

    // shard_events[s][e]
    std::vector<std::vector<ShardEvents>> shard_events(shards.size());
    auto work = [&](std::size_t s) {
        Shard const sh = shards[s];
        std::vector<MaximaScanner> scanners;
        for (auto const & e : eps)
            scanners.emplace_back(config.mode, config.buckets, initial(e));
        if (config.family == Family::cubic) {
            for (std::uint64_t f = sh.lo; f <= sh.hi; ++f) {
                if (!is_cyclic_conductor(3, f))
                    continue;
                for (std::size_t e = 0; e < eps.size(); ++e)
                    for (auto & r : cubic_scan_records(f, config.scope, eps[e], config.metric,
                                                       config.per_field_max, *class_numbers))
                        scanners[e].push(std::move(r));
            }
        } else {
            Signature const sig = config.family == Family::quad_imaginary ? Signature::imaginary : Signature::real;
            for_each_quadratic_chunk(sig, sh.lo, sh.hi, [&](std::vector<FieldRecord> const & chunk) {
                for (std::size_t e = 0; e < eps.size(); ++e)
                    for (auto const & r : chunk)
                        scanners[e].push(make_scan_record(r, config.metric, eps[e]));
            });
        }
        for (auto & sc : scanners)
            shard_events[s].push_back({sh.lo, sh.hi, sc.consumed(), sc.take_events()});
    };

    if (shards.size() == 1) {
        work(0);
    } else {
        std::vector<std::exception_ptr> errors(shards.size());
        std::vector<std::thread> threads;
        for (std::size_t s = 0; s < shards.size(); ++s)
            threads.emplace_back([&, s] {
                try {
                    work(s);
                } catch (...) {
                    errors[s] = std::current_exception();
                }
            });
        for (auto & t : threads)
            t.join();
        for (auto const & err : errors)
            if (err)
                std::rethrow_exception(err);
    }

    std::vector<ScanResult> out;
    for (std::size_t e = 0; e < eps.size(); ++e) {
        std::vector<ShardEvents> per_eps;
        ScanResult r;
        r.eps = eps[e];
        for (auto & se : shard_events) {
            r.consumed += se[e].consumed;
            per_eps.push_back(std::move(se[e]));
        }
        r.events = merge_shards(per_eps, config.mode, config.buckets, initial(eps[e]));
        r.final_buckets = r.events.empty() ? std::vector<std::uint64_t>(config.buckets.size(), 0)
                                           : r.events.back().counters.buckets;
        out.push_back(std::move(r));
    }
    return out;
}

std::string event_line(MaximaEvent const & event)
{
    FieldRecord const & f = event.record.field;
    std::string const C = format_real(event.record.value.approx);
    if (f.family == Family::cubic) {
        std::string line = "f=" + std::to_string(f.key) + " H=" + render_mean(f.H, f.H_mean, f.nK) +
                           " h=" + render_mean(f.h, f.h_mean, f.nK) + " N=" + std::to_string(f.N) +
                           " nK=" + std::to_string(f.nK) + " C=" + C;
        if (!f.polynomial.empty())
            line += " P=" + f.polynomial;
        return line;
    }
    return "D_K=" + std::to_string(f.d_k) + " H=" + std::to_string(f.H) + " h=" + std::to_string(f.h) +
           " N=" + std::to_string(f.N) + " C=" + C;
}

std::string counter_line(Counters const & counters, BucketSpec const & buckets)
{
    std::string line = "ND=" + std::to_string(counters.nd);
    for (std::size_t i = 0; i < buckets.size(); ++i)
        line += " " + buckets.label(i) + "=" + std::to_string(counters.buckets.at(i));
    return line;
}

void render(std::ostream & out, ScanConfig const & config, std::vector<ScanResult> const & results)
{
    auto const & buckets = config.buckets;
    if (config.format == OutputFormat::csv) {
        out << "eps,D_K,f,H,h,N,nK,C,ND";
        for (std::size_t i = 0; i < buckets.size(); ++i)
            out << ',' << buckets.label(i);
        out << '\n';
    }
    for (auto const & r : results) {
        if (config.format == OutputFormat::text)
            out << "eps=" << r.eps.str() << '\n';
        for (auto const & ev : r.events) {
            FieldRecord const & f = ev.record.field;
            std::string const C = format_real(ev.record.value.approx);
            std::string const H = render_mean(f.H, f.H_mean, f.nK);
            std::string const h = render_mean(f.h, f.h_mean, f.nK);
            switch (config.format) {
            case OutputFormat::text:
                out << event_line(ev) << '\n' << counter_line(ev.counters, buckets) << '\n';
                break;
            case OutputFormat::csv:
                out << r.eps.str() << ',' << (f.family == Family::cubic ? std::string() : std::to_string(f.d_k))
                    << ',' << f.key << ',' << H << ',' << h << ',' << f.N << ',' << f.nK << ',' << C << ','
                    << ev.counters.nd;
                for (auto c : ev.counters.buckets)
                    out << ',' << c;
                out << '\n';
                break;
            case OutputFormat::json_lines: {
                nlohmann::ordered_json j;
                j["eps"] = r.eps.str();
                if (f.family != Family::cubic)
                    j["D_K"] = f.d_k;
                j["f"] = f.key;
                j["H"] = H;
                j["h"] = h;
                j["N"] = f.N;
                j["nK"] = f.nK;
                j["C"] = C;
                if (!f.polynomial.empty())
                    j["P"] = f.polynomial;
                j["ND"] = ev.counters.nd;
                for (std::size_t i = 0; i < buckets.size(); ++i)
                    j[buckets.label(i)] = ev.counters.buckets[i];
                out << j.dump() << '\n';
                break;
            }
            }
        }
        Counters const final_counters{r.consumed, r.final_buckets};
        if (config.format == OutputFormat::text) {
            out << "final " << counter_line(final_counters, buckets) << '\n';
        } else if (config.format == OutputFormat::json_lines) {
            nlohmann::ordered_json j;
            j["eps"] = r.eps.str();
            j["final"] = true;
            j["ND"] = r.consumed;
            for (std::size_t i = 0; i < buckets.size(); ++i)
                j[buckets.label(i)] = r.final_buckets[i];
            out << j.dump() << '\n';
        }
    }
}

std::vector<GenusFamilyRow> run_genus_family(std::vector<std::uint64_t> const & primes,
                                             std::optional<Epsilon> eps,
                                             std::optional<std::chrono::milliseconds> budget)
{
    auto const start = std::chrono::steady_clock::now();
    std::vector<GenusFamilyRow> rows;
    std::uint64_t m = 1;
    bool out_of_time = false;
    for (std::size_t k = 0; k < primes.size(); ++k) {
        std::uint64_t const q = primes[k];
        if (!is_prime(q))
            throw ConfigError(std::to_string(q) + " is not prime");
        if (m > (std::uint64_t{1} << 60) / q)
            throw ConfigError("prime product exceeds 2^60");
        m *= q;
        GenusFamilyRow row;
        row.primes.assign(primes.begin(), primes.begin() + static_cast<std::ptrdiff_t>(k + 1));
        std::int64_t const neg = -static_cast<std::int64_t>(m);
        std::int64_t const value = ((neg % 4) + 4) % 4 == 1 ? neg : 4 * neg;
        auto const disc = make_quad_discriminant(value);
        if (!disc)
            throw ConfigError("-" + std::to_string(m) + " has no fundamental discriminant (repeated prime?)");
        row.disc = *disc;
        if (budget && std::chrono::steady_clock::now() - start > *budget)
            out_of_time = true;
        if (out_of_time) {
            row.skipped = true;
            rows.push_back(std::move(row));
            continue;
        }
        row.H = class_number_imaginary(row.disc);
        row.h = nongenus_part(row.H, genus_number_cyclic(2, row.disc.n_ramified));
        if (eps)
            row.C = c_eps(row.h, row.disc.abs, *eps);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::uint64_t count_events(std::vector<FieldRecord> const & records, MetricKind metric, Epsilon eps, Mode mode)
{
    std::optional<MetricValue> running;
    std::uint64_t events = 0;
    for (auto const & r : records) {
        ScanRecord const s = make_scan_record(r, metric, eps);
        if (running && !beats(s.value, *running, mode))
            continue;
        running = s.value;
        ++events;
    }
    return events;
}

ThresholdResult run_threshold_search(std::vector<FieldRecord> const & records, MetricKind metric, Epsilon step,
                                     Mode mode)
{
    if (step.is_zero())
        throw ConfigError("grid step must be positive");
    if (is_raw(metric))
        throw ConfigError("threshold search needs an eps-dependent metric");
    std::uint64_t const k_max = (2 * step.den() - 1) / step.num(); // k * step < 2
    auto grid = [&](std::uint64_t k) { return Epsilon(k * step.num(), step.den()); };
    auto events_at = [&](std::uint64_t k) { return count_events(records, metric, grid(k), mode); };

    ThresholdResult res;
    std::uint64_t const e0 = events_at(0);
    if (e0 < 2) {
        res.eps = Epsilon();
        res.events = e0;
        if (k_max >= 1) {
            res.next = grid(1);
            res.next_events = events_at(1);
        }
        return res;
    }
    res.found = true;
    std::uint64_t lo = 0, hi = k_max;
    std::uint64_t lo_events = e0, hi_events = events_at(k_max);
    if (hi_events >= 2) {
        res.eps = grid(k_max);
        res.events = hi_events;
        return res;
    }
    while (hi - lo > 1) {
        std::uint64_t const mid = lo + (hi - lo) / 2;
        std::uint64_t const ev = events_at(mid);
        if (ev >= 2) {
            lo = mid;
            lo_events = ev;
        } else {
            hi = mid;
            hi_events = ev;
        }
    }
    res.eps = grid(lo);
    res.events = lo_events;
    res.next = grid(hi);
    res.next_events = hi_events;
    return res;
}

} // namespace succmax
