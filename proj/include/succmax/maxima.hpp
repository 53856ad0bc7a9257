#pragma once

// Successive maxima (or minima) over an ascending stream of field records,
// with N-distribution counters and sharded evaluation.

#include "succmax/metric.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace succmax {

enum class Family { quad_imaginary, quad_real, cubic };

char const * to_string(Family f);

struct FieldRecord
{
    Family family = Family::quad_imaginary;
    std::uint64_t key = 0;  // |D_K| or conductor f
    std::int64_t d_k = 0;   // signed D_K (quadratic only)
    unsigned N = 0;
    std::uint64_t H = 1;
    std::uint64_t h = 1;
    std::uint64_t nK = 1;
    Real H_mean = 1; // family means, equal to H and h when nK == 1
    Real h_mean = 1;
    std::string polynomial; // single cubic field only
};

struct ScanRecord
{
    FieldRecord field;
    MetricValue value;
    std::uint32_t member = 0; // position inside a family for per-field streams

    std::uint64_t key() const { return field.key; }
};

enum class Mode { maxima, minima };

/*
 * Buckets over N, written as a comma list of single values, closed ranges
 * "a..b" (expanded to singles) and one trailing open bucket "k+".
 * "1,2,3+" gives N1, N2, N3 (N >= 3); "1..5,6+" gives N1 .. N6.
 */
class BucketSpec
{
  public:
    BucketSpec();
    /* Throws std::invalid_argument on malformed or overlapping specs. */
    static BucketSpec parse(std::string_view text);

    std::size_t size() const { return lower_.size(); }
    std::string label(std::size_t i) const;
    /* Bucket index for N, or nullopt when N lies outside every bucket. */
    std::optional<std::size_t> index_of(unsigned n) const;
    std::string str() const;

  private:
    std::vector<unsigned> lower_;
    bool open_tail_ = false;
};

struct Counters
{
    std::uint64_t nd = 0;                // records consumed up to this event
    std::vector<std::uint64_t> buckets;  // events so far per bucket

    bool operator==(Counters const &) const = default;
};

struct MaximaEvent
{
    ScanRecord record;
    Counters counters;
};

/*
 * Streaming engine. The first record always becomes the running record
 * unless an initial value is supplied (minima preset starting at 1).
 */
class MaximaScanner
{
  public:
    MaximaScanner(Mode mode, BucketSpec buckets, std::optional<MetricValue> initial = std::nullopt);

    /* Throws std::invalid_argument when keys do not ascend. */
    MaximaEvent const * push(ScanRecord record);

    std::vector<MaximaEvent> const & events() const { return events_; }
    std::vector<MaximaEvent> take_events() { return std::move(events_); }
    std::uint64_t consumed() const { return consumed_; }
    Counters const & counters() const { return counters_; }
    std::optional<MetricValue> const & running() const { return running_; }

  private:
    Mode mode_;
    BucketSpec buckets_;
    std::optional<MetricValue> running_;
    std::optional<std::pair<std::uint64_t, std::uint32_t>> last_key_;
    std::uint64_t consumed_ = 0;
    Counters counters_;
    std::vector<MaximaEvent> events_;
};

/* True iff candidate beats the running record strictly in the given mode. */
bool beats(MetricValue const & candidate, MetricValue const & running, Mode mode);

std::vector<MaximaEvent> scan(std::span<ScanRecord const> records, Mode mode, BucketSpec const & buckets,
                              std::optional<MetricValue> initial = std::nullopt);

struct ShardEvents
{
    std::uint64_t lo = 0; // key range covered by the shard
    std::uint64_t hi = 0;
    std::uint64_t consumed = 0;
    std::vector<MaximaEvent> events;
};

/*
 * Global events from per-shard scans run with fresh running records.
 * Throws std::invalid_argument when shard ranges overlap or are out of order.
 */
std::vector<MaximaEvent> merge_shards(std::span<ShardEvents const> shards, Mode mode,
                                      BucketSpec const & buckets,
                                      std::optional<MetricValue> initial = std::nullopt);

} // namespace succmax
