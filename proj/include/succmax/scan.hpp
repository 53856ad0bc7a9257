#pragma once

// Scan orchestration shared by the CLI and the acceptance suite: record
// materialization, sharded maxima scans, rendering, genus families and the
// epsilon threshold search.

#include "succmax/cubic.hpp"
#include "succmax/discriminants.hpp"
#include "succmax/maxima.hpp"
#include "succmax/metric.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace succmax {

class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class BudgetExceeded : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* raw_H and raw_h are full and nongenus with eps pinned to 0. */
enum class MetricKind { nongenus, full, raw_H, raw_h };
enum class OutputFormat { text, csv, json_lines };

MetricKind parse_metric_kind(std::string const & s);
Family parse_family(std::string const & s);
Mode parse_mode(std::string const & s);
Scope parse_scope(std::string const & s);
OutputFormat parse_output_format(std::string const & s);

struct ScanConfig
{
    Family family = Family::quad_imaginary;
    std::vector<Epsilon> eps_list;
    std::uint64_t lo = 1;
    std::uint64_t hi = 1000;
    MetricKind metric = MetricKind::nongenus;
    Mode mode = Mode::maxima;
    Scope scope = Scope::exact_conductor;
    bool per_field_max = false;
    BucketSpec buckets;
    OutputFormat format = OutputFormat::text;
    unsigned shards = 1;
    bool compat_minima_init_one = false;

    /* Throws ConfigError. */
    void validate() const;
};

/* Base records for every fundamental discriminant of a signature in [lo, hi]. */
std::vector<FieldRecord> quadratic_records(Signature signature, std::uint64_t lo, std::uint64_t hi);

/* Same records delivered in ascending chunks. */
void for_each_quadratic_chunk(Signature signature, std::uint64_t lo, std::uint64_t hi,
                              std::function<void(std::vector<FieldRecord> const &)> const & sink);

FieldRecord quadratic_record(QuadDiscriminant const & d, std::uint64_t H);

ScanRecord make_scan_record(FieldRecord const & field, MetricKind metric, Epsilon eps);

std::vector<ScanRecord> cubic_scan_records(std::uint64_t f, Scope scope, Epsilon eps, MetricKind metric,
                                           bool per_field_max, CubicClassNumbers const & class_numbers);

struct ScanResult
{
    Epsilon eps;
    std::vector<MaximaEvent> events;
    std::uint64_t consumed = 0;
    std::vector<std::uint64_t> final_buckets;
};

/* One result per eps. class_numbers is required for the cubic family. */
std::vector<ScanResult> run_scan(ScanConfig const & config, CubicClassNumbers const * class_numbers = nullptr);

void render(std::ostream & out, ScanConfig const & config, std::vector<ScanResult> const & results);
std::string event_line(MaximaEvent const & event);
std::string counter_line(Counters const & counters, BucketSpec const & buckets);

struct GenusFamilyRow
{
    std::vector<std::uint64_t> primes;
    QuadDiscriminant disc;
    std::uint64_t H = 0;
    std::uint64_t h = 0;
    std::optional<MetricValue> C;
    bool skipped = false; // budget exhausted before this row
};

/*
 * Rows for K = Q(sqrt(-q1...qk)), k = 1..n. A row whose computation would
 * start after the budget has elapsed is marked skipped, as are all later rows.
 */
std::vector<GenusFamilyRow> run_genus_family(std::vector<std::uint64_t> const & primes,
                                             std::optional<Epsilon> eps = std::nullopt,
                                             std::optional<std::chrono::milliseconds> budget = std::nullopt);

struct ThresholdResult
{
    bool found = false;   // some grid point gives >= 2 events
    Epsilon eps;          // largest such grid point, or 0 when none
    std::uint64_t events = 0;
    std::optional<Epsilon> next; // following grid point
    std::uint64_t next_events = 0;
};

std::uint64_t count_events(std::vector<FieldRecord> const & records, MetricKind metric, Epsilon eps, Mode mode);

/* Bisection over the grid k * step, k >= 0, below 2. */
ThresholdResult run_threshold_search(std::vector<FieldRecord> const & records, MetricKind metric,
                                     Epsilon step, Mode mode = Mode::maxima);

} // namespace succmax
