#include "succmax/maxima.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace succmax {

namespace {

unsigned parse_unsigned(std::string_view s, std::string_view whole)
{
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad bucket spec '" + std::string(whole) + "'");
    return v;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    return s;
}

} // namespace

char const * to_string(Family f)
{
    switch (f) {
    case Family::quad_imaginary: return "quad_imaginary";
    case Family::quad_real: return "quad_real";
    case Family::cubic: return "cubic";
    }
    return "?";
}

BucketSpec::BucketSpec() : lower_{1, 2, 3}, open_tail_(true) {}

BucketSpec BucketSpec::parse(std::string_view text)
{
    BucketSpec spec;
    spec.lower_.clear();
    spec.open_tail_ = false;
    std::string_view rest = text;
    while (true) {
        auto comma = rest.find(',');
        std::string_view item = trim(rest.substr(0, comma));
        if (spec.open_tail_)
            throw std::invalid_argument("open bucket must come last in '" + std::string(text) + "'");
        unsigned from, to;
        if (!item.empty() && item.back() == '+') {
            from = to = parse_unsigned(item.substr(0, item.size() - 1), text);
            spec.open_tail_ = true;
        } else if (auto dots = item.find(".."); dots != std::string_view::npos) {
            from = parse_unsigned(item.substr(0, dots), text);
            to = parse_unsigned(item.substr(dots + 2), text);
        } else {
            from = to = parse_unsigned(item, text);
        }
        if (from > to || (!spec.lower_.empty() && from <= spec.lower_.back()))
            throw std::invalid_argument("buckets must ascend without overlap in '" + std::string(text) + "'");
        for (unsigned n = from; n <= to; ++n)
            spec.lower_.push_back(n);
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    return spec;
}

std::string BucketSpec::label(std::size_t i) const
{
    return "N" + std::to_string(lower_.at(i));
}

std::optional<std::size_t> BucketSpec::index_of(unsigned n) const
{
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (lower_[i] == n || (open_tail_ && i + 1 == lower_.size() && n >= lower_[i]))
            return i;
    }
    return std::nullopt;
}

std::string BucketSpec::str() const
{
    std::string out;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(lower_[i]);
    }
    if (open_tail_)
        out += '+';
    return out;
}

bool beats(MetricValue const & candidate, MetricValue const & running, Mode mode)
{
    auto const order = compare(candidate, running);
    return mode == Mode::maxima ? order > 0 : order < 0;
}

MaximaScanner::MaximaScanner(Mode mode, BucketSpec buckets, std::optional<MetricValue> initial)
    : mode_(mode), buckets_(std::move(buckets)), running_(std::move(initial))
{
    counters_.buckets.assign(buckets_.size(), 0);
}

MaximaEvent const * MaximaScanner::push(ScanRecord record)
{
    std::pair<std::uint64_t, std::uint32_t> const key{record.key(), record.member};
    if (last_key_ && key <= *last_key_)
        throw std::invalid_argument("scan keys must ascend (" + std::to_string(key.first) +
                                    " after " + std::to_string(last_key_->first) + ")");
    last_key_ = key;
    ++consumed_;
    counters_.nd = consumed_;
    if (running_ && !beats(record.value, *running_, mode_))
        return nullptr;
    running_ = record.value;
    if (auto bucket = buckets_.index_of(record.field.N))
        ++counters_.buckets[*bucket];
    events_.push_back({std::move(record), counters_});
    return &events_.back();
}

std::vector<MaximaEvent> scan(std::span<ScanRecord const> records, Mode mode, BucketSpec const & buckets,
                              std::optional<MetricValue> initial)
{
    MaximaScanner scanner(mode, buckets, std::move(initial));
    for (auto const & r : records)
        scanner.push(r);
    return scanner.take_events();
}

std::vector<MaximaEvent> merge_shards(std::span<ShardEvents const> shards, Mode mode,
                                      BucketSpec const & buckets, std::optional<MetricValue> initial)
{
    for (std::size_t i = 0; i < shards.size(); ++i) {
        if (shards[i].lo > shards[i].hi || (i && shards[i].lo <= shards[i - 1].hi))
            throw std::invalid_argument("shard ranges must be disjoint and ascending");
    }
    std::optional<MetricValue> running = std::move(initial);
    std::vector<std::uint64_t> counts(buckets.size(), 0);
    std::uint64_t offset = 0;
    std::vector<MaximaEvent> out;
    for (auto const & shard : shards) {
        for (auto const & ev : shard.events) {
            if (running && !beats(ev.record.value, *running, mode))
                continue;
            running = ev.record.value;
            if (auto bucket = buckets.index_of(ev.record.field.N))
                ++counts[*bucket];
            out.push_back({ev.record, {offset + ev.counters.nd, counts}});
        }
        offset += shard.consumed;
    }
    return out;
}

} // namespace succmax
