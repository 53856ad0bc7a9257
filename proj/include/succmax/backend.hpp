#pragma once

// Line-protocol bridge to an external computer-algebra process, fronted by an
// append-only result cache.
//
//   request  Q <id> CLASSNO_CUBIC <c2> <c1> <c0>
//            Q <id> CLASSNO_QUAD <D>
//            Q <id> SUBCYCLO <f> <p>
//   reply    A <id> OK <value>  |  A <id> ERR <message>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace succmax {

enum class RequestKind { classno_cubic, classno_quad, subcyclo };

char const * to_string(RequestKind k);

struct BackendRequest
{
    RequestKind kind = RequestKind::classno_quad;
    std::vector<std::int64_t> args;

    static BackendRequest classno_cubic(std::int64_t c2, std::int64_t c1, std::int64_t c0);
    static BackendRequest classno_quad(std::int64_t d);
    static BackendRequest subcyclo(std::uint64_t f, std::uint64_t p);

    /* Canonical cache key, e.g. "CLASSNO_CUBIC 1 -54 -169". */
    std::string key() const;
};

class BackendError : public std::runtime_error
{
  public:
    BackendError(std::string key, std::string const & what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
    {
    }
    std::string const & key() const { return key_; }

  private:
    std::string key_;
};

struct CacheEntry
{
    std::string key;
    std::string result;
    std::int64_t timestamp = 0;
};

/* Parses "<key>,<result>,<timestamp>"; the result may itself contain commas. */
std::optional<CacheEntry> parse_cache_line(std::string const & line);
std::string format_cache_line(CacheEntry const & e);

/*
 * Append-only text cache; the last entry for a key wins. An empty path keeps
 * the cache in memory only.
 */
class ResultCache
{
  public:
    explicit ResultCache(std::filesystem::path path = {});

    std::optional<std::string> get(std::string const & key) const;
    void put(std::string const & key, std::string const & result);
    std::size_t size() const;
    std::filesystem::path const & path() const { return path_; }

    /* Rewrites the file with one line per key; returns the lines dropped. */
    std::size_t compact();

  private:
    void load();

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::string, CacheEntry> entries_;
    std::size_t lines_ = 0;
    std::ofstream out_;
};

struct BackendConfig
{
    std::string command;     // run through /bin/sh -c
    std::filesystem::path cache_path;
    std::optional<std::chrono::milliseconds> timeout; // 60 s when unset

    std::chrono::milliseconds effective_timeout() const { return timeout.value_or(std::chrono::seconds(60)); }

    /* Fills unset fields from SUCCMAX_BACKEND_CMD, SUCCMAX_CACHE, SUCCMAX_BACKEND_TIMEOUT (seconds). */
    BackendConfig with_environment() const;
};

/* One persistent child process; one request in flight at a time. */
class BackendProcess
{
  public:
    explicit BackendProcess(std::string command);
    ~BackendProcess();
    BackendProcess(BackendProcess const &) = delete;
    BackendProcess & operator=(BackendProcess const &) = delete;

    /* Writes one line and reads one line back. Throws BackendError on timeout or exit. */
    std::string exchange(std::string const & line, std::chrono::milliseconds timeout,
                         std::string const & key);

    bool running() const { return pid_ > 0; }

  private:
    void start();
    void stop();
    std::string exit_description();

    std::string command_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
};

class Backend
{
  public:
    explicit Backend(BackendConfig config);
    ~Backend();

    /* Cache first; on a miss one round trip to the process. */
    std::string query(BackendRequest const & request);
    std::uint64_t query_class_number(BackendRequest const & request);

    bool has_process_command() const { return !config_.command.empty(); }
    std::uint64_t cache_hits() const { return cache_hits_; }
    std::uint64_t process_queries() const { return process_queries_; }
    ResultCache & cache() { return cache_; }

  private:
    BackendConfig config_;
    ResultCache cache_;
    std::unique_ptr<BackendProcess> process_;
    std::mutex mutex_;
    std::uint64_t next_id_ = 1;
    std::uint64_t cache_hits_ = 0;
    std::uint64_t process_queries_ = 0;
};

} // namespace succmax
