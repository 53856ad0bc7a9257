#include "succmax/backend.hpp"
#include "succmax/cubic.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace succmax;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("succmax_backend_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int & counter()
    {
        static int n = 0;
        return n;
    }
};

std::string fake(std::string const & mode, fs::path const & log = {})
{
    std::string cmd = std::string(SUCCMAX_FAKE_BACKEND) + " " + mode;
    if (!log.empty())
        cmd += " " + log.string();
    return cmd;
}

std::size_t line_count(fs::path const & p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

} // namespace

TEST_CASE("request keys")
{
    CHECK(BackendRequest::classno_cubic(1, -54, -169).key() == "CLASSNO_CUBIC 1 -54 -169");
    CHECK(BackendRequest::classno_quad(-23).key() == "CLASSNO_QUAD -23");
    CHECK(BackendRequest::subcyclo(7, 3).key() == "SUBCYCLO 7 3");
}

TEST_CASE("cache lines")
{
    CacheEntry const e{"SUBCYCLO 63 3", "[x^3 - 21*x - 35, x^3 - 21*x + 28]", 1700000000};
    auto const line = format_cache_line(e);
    auto const back = parse_cache_line(line);
    REQUIRE(back);
    CHECK(back->key == e.key);
    CHECK(back->result == e.result);
    CHECK(back->timestamp == e.timestamp);
    CHECK_FALSE(parse_cache_line("no commas"));
    CHECK_FALSE(parse_cache_line("key,result,notanumber"));
}

TEST_CASE("cache persists, last entry wins, compaction")
{
    TempDir dir;
    auto const path = dir.path / "cache.txt";
    {
        ResultCache c(path);
        c.put("CLASSNO_QUAD -23", "3");
        c.put("CLASSNO_QUAD -47", "4");
        c.put("CLASSNO_QUAD -47", "5");
        c.put("SUBCYCLO 7 3", "[x^3 + x^2 - 2*x - 1]");
    }
    CHECK(line_count(path) == 4);
    ResultCache c(path);
    CHECK(c.size() == 3);
    CHECK(c.get("CLASSNO_QUAD -47") == "5");
    CHECK(c.get("SUBCYCLO 7 3") == "[x^3 + x^2 - 2*x - 1]");
    CHECK_FALSE(c.get("CLASSNO_QUAD -71"));
    CHECK(c.compact() == 1);
    CHECK(line_count(path) == 3);
    ResultCache again(path);
    CHECK(again.get("CLASSNO_QUAD -47") == "5");
    CHECK(again.size() == 3);
}

TEST_CASE("queries go to the process once and are then cached")
{
    TempDir dir;
    auto const log = dir.path / "requests.log";
    BackendConfig cfg;
    cfg.command = fake("ok", log);
    cfg.cache_path = dir.path / "cache.txt";
    {
        Backend b(cfg);
        CHECK(b.query(BackendRequest::classno_quad(-23)) == "3");
        CHECK(b.query_class_number(BackendRequest::classno_cubic(1, -54, -169)) == 4);
        CHECK(b.query(BackendRequest::classno_quad(-23)) == "3");
        CHECK(b.process_queries() == 2);
        CHECK(b.cache_hits() == 1);
        CHECK(b.query(BackendRequest::subcyclo(9, 3)) == "[x^3 + x^2 - 2*x - 1, x^3 - 3*x + 1]");
    }
    CHECK(line_count(log) == 3);
    // A fresh client answers from the cache file alone.
    BackendConfig offline;
    offline.cache_path = cfg.cache_path;
    Backend b(offline);
    CHECK(b.query(BackendRequest::classno_quad(-23)) == "3");
    CHECK(b.query(BackendRequest::subcyclo(9, 3)) == "[x^3 + x^2 - 2*x - 1, x^3 - 3*x + 1]");
    CHECK(b.process_queries() == 0);
    CHECK_THROWS_AS(b.query(BackendRequest::classno_quad(-31)), BackendError);
}

TEST_CASE("failures carry the request key")
{
    for (auto mode : {"err", "malformed", "wrong-id", "garbage", "exit", "timeout"}) {
        CAPTURE(mode);
        BackendConfig cfg;
        cfg.command = fake(mode);
        cfg.timeout = std::chrono::milliseconds(1500);
        Backend b(cfg);
        try {
            b.query(BackendRequest::classno_cubic(1, -54, -169));
            FAIL("expected BackendError");
        } catch (BackendError const & e) {
            CHECK(e.key() == "CLASSNO_CUBIC 1 -54 -169");
            CHECK(std::string(e.what()).find("CLASSNO_CUBIC 1 -54 -169") != std::string::npos);
        }
        CHECK(b.cache().size() == 0);
    }
}

TEST_CASE("missing command is reported")
{
    BackendConfig cfg;
    cfg.command = "/nonexistent/succmax-backend";
    Backend b(cfg);
    CHECK_THROWS_AS(b.query(BackendRequest::classno_quad(-23)), BackendError);
}

TEST_CASE("environment fills unset fields only")
{
    ::setenv("SUCCMAX_BACKEND_CMD", "env-cmd", 1);
    ::setenv("SUCCMAX_CACHE", "/tmp/env-cache", 1);
    ::setenv("SUCCMAX_BACKEND_TIMEOUT", "7", 1);
    BackendConfig blank;
    auto const e = blank.with_environment();
    CHECK(e.command == "env-cmd");
    CHECK(e.cache_path == "/tmp/env-cache");
    CHECK(e.effective_timeout() == std::chrono::seconds(7));

    BackendConfig set;
    set.command = "flag-cmd";
    set.cache_path = "/tmp/flag-cache";
    set.timeout = std::chrono::seconds(3);
    auto const f = set.with_environment();
    CHECK(f.command == "flag-cmd");
    CHECK(f.cache_path == "/tmp/flag-cache");
    CHECK(f.effective_timeout() == std::chrono::seconds(3));

    ::setenv("SUCCMAX_BACKEND_TIMEOUT", "soon", 1);
    CHECK_THROWS(blank.with_environment());
    ::unsetenv("SUCCMAX_BACKEND_CMD");
    ::unsetenv("SUCCMAX_CACHE");
    ::unsetenv("SUCCMAX_BACKEND_TIMEOUT");
    CHECK(BackendConfig{}.with_environment().effective_timeout() == std::chrono::seconds(60));
}

TEST_CASE("cubic class numbers fall back to the backend")
{
    BackendConfig cfg;
    cfg.command = fake("ok");
    Backend b(cfg);
    CubicFixtures fx;
    fx.add(7, {1, -2, -1}, 1);
    CubicClassNumbers const source(&fx, &b);
    CHECK(source(enumerate_cubic_fields(7)[0]) == 1);
    CHECK(b.process_queries() == 0);
    CHECK(source(enumerate_cubic_fields(313)[0]) == 7);
    CHECK(b.process_queries() == 1);
}
