#include "succmax/backend.hpp"

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace succmax {

namespace {

std::int64_t now_seconds()
{
    using namespace std::chrono;
    return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

bool parse_i64(std::string_view s, std::int64_t & out)
{
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

void write_all(int fd, std::string const & data, std::string const & key)
{
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw BackendError(key, std::string("write to backend failed: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

} // namespace

char const * to_string(RequestKind k)
{
    switch (k) {
    case RequestKind::classno_cubic: return "CLASSNO_CUBIC";
    case RequestKind::classno_quad: return "CLASSNO_QUAD";
    case RequestKind::subcyclo: return "SUBCYCLO";
    }
    return "?";
}

BackendRequest BackendRequest::classno_cubic(std::int64_t c2, std::int64_t c1, std::int64_t c0)
{
    return {RequestKind::classno_cubic, {c2, c1, c0}};
}

BackendRequest BackendRequest::classno_quad(std::int64_t d)
{
    return {RequestKind::classno_quad, {d}};
}

BackendRequest BackendRequest::subcyclo(std::uint64_t f, std::uint64_t p)
{
    return {RequestKind::subcyclo, {static_cast<std::int64_t>(f), static_cast<std::int64_t>(p)}};
}

std::string BackendRequest::key() const
{
    std::string out = to_string(kind);
    for (auto v : args)
        out += ' ' + std::to_string(v);
    return out;
}

std::optional<CacheEntry> parse_cache_line(std::string const & line)
{
    auto first = line.find(',');
    auto last = line.rfind(',');
    if (first == std::string::npos || first == last)
        return std::nullopt;
    CacheEntry e;
    e.key = line.substr(0, first);
    e.result = line.substr(first + 1, last - first - 1);
    if (e.key.empty() || !parse_i64(std::string_view(line).substr(last + 1), e.timestamp))
        return std::nullopt;
    return e;
}

std::string format_cache_line(CacheEntry const & e)
{
    return e.key + ',' + e.result + ',' + std::to_string(e.timestamp);
}

ResultCache::ResultCache(std::filesystem::path path) : path_(std::move(path))
{
    if (path_.empty())
        return;
    load();
    out_.open(path_, std::ios::app);
    if (!out_)
        throw BackendError("", "cannot open cache file " + path_.string());
}

void ResultCache::load()
{
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        ++lines_;
        if (auto e = parse_cache_line(line))
            entries_[e->key] = std::move(*e);
    }
}

std::optional<std::string> ResultCache::get(std::string const & key) const
{
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    return it->second.result;
}

void ResultCache::put(std::string const & key, std::string const & result)
{
    if (key.find(',') != std::string::npos || result.find('\n') != std::string::npos)
        throw std::invalid_argument("cache key must not contain ',' and result must be one line");
    std::lock_guard lock(mutex_);
    CacheEntry e{key, result, now_seconds()};
    if (out_.is_open()) {
        out_ << format_cache_line(e) << '\n';
        out_.flush();
        ++lines_;
    }
    entries_[key] = std::move(e);
}

std::size_t ResultCache::size() const
{
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::size_t ResultCache::compact()
{
    std::lock_guard lock(mutex_);
    if (path_.empty())
        return 0;
    auto tmp = path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        for (auto const & [key, e] : entries_)
            out << format_cache_line(e) << '\n';
        if (!out)
            throw BackendError("", "cannot write " + tmp.string());
    }
    out_.close();
    std::filesystem::rename(tmp, path_);
    out_.open(path_, std::ios::app);
    std::size_t const dropped = lines_ - entries_.size();
    lines_ = entries_.size();
    return dropped;
}

BackendConfig BackendConfig::with_environment() const
{
    BackendConfig out = *this;
    if (char const * cmd = std::getenv("SUCCMAX_BACKEND_CMD"); cmd && out.command.empty())
        out.command = cmd;
    if (char const * cache = std::getenv("SUCCMAX_CACHE"); cache && out.cache_path.empty())
        out.cache_path = cache;
    if (char const * t = std::getenv("SUCCMAX_BACKEND_TIMEOUT"); t && !out.timeout) {
        std::int64_t secs = 0;
        if (!parse_i64(t, secs) || secs <= 0)
            throw std::invalid_argument(std::string("bad SUCCMAX_BACKEND_TIMEOUT '") + t + "'");
        out.timeout = std::chrono::seconds(secs);
    }
    return out;
}

BackendProcess::BackendProcess(std::string command) : command_(std::move(command))
{
    std::signal(SIGPIPE, SIG_IGN);
}

BackendProcess::~BackendProcess()
{
    stop();
}

void BackendProcess::start()
{
    int in_pipe[2], out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0)
        throw BackendError("", "pipe failed");
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw BackendError("", "pipe failed");
    }
    pid_t pid = ::fork();
    if (pid < 0)
        throw BackendError("", "fork failed");
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pending_.clear();
}

void BackendProcess::stop()
{
    if (to_child_ >= 0)
        ::close(to_child_);
    if (from_child_ >= 0)
        ::close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == 0) {
            ::kill(-pid_, SIGTERM);
            ::waitpid(pid_, &status, 0);
        }
    }
    pid_ = -1;
}

std::string BackendProcess::exit_description()
{
    int status = 0;
    std::string what = "backend closed its output";
    if (pid_ > 0 && ::waitpid(pid_, &status, 0) == pid_) {
        if (WIFEXITED(status))
            what = "backend exited with status " + std::to_string(WEXITSTATUS(status));
        else if (WIFSIGNALED(status))
            what = "backend killed by signal " + std::to_string(WTERMSIG(status));
    }
    pid_ = -1;
    stop();
    return what;
}

std::string BackendProcess::exchange(std::string const & line, std::chrono::milliseconds timeout,
                                     std::string const & key)
{
    if (pid_ <= 0)
        start();
    try {
        write_all(to_child_, line + '\n', key);
    } catch (BackendError const &) {
        throw BackendError(key, exit_description());
    }

    auto const deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        if (auto nl = pending_.find('\n'); nl != std::string::npos) {
            std::string reply = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            if (!reply.empty() && reply.back() == '\r')
                reply.pop_back();
            return reply;
        }
        auto const left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            stop();
            throw BackendError(key, "backend timed out after " + std::to_string(timeout.count()) + " ms");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR)
            continue;
        if (rc <= 0)
            continue;
        char buf[4096];
        ssize_t n = ::read(from_child_, buf, sizeof buf);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            throw BackendError(key, exit_description());
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

Backend::Backend(BackendConfig config) : config_(std::move(config)), cache_(config_.cache_path) {}

Backend::~Backend() = default;

std::string Backend::query(BackendRequest const & request)
{
    std::string const key = request.key();
    std::lock_guard lock(mutex_);
    if (auto hit = cache_.get(key)) {
        ++cache_hits_;
        return *hit;
    }
    if (config_.command.empty())
        throw BackendError(key, "not cached and no backend command configured");
    if (!process_)
        process_ = std::make_unique<BackendProcess>(config_.command);

    std::uint64_t const id = next_id_++;
    ++process_queries_;
    std::string const reply = process_->exchange("Q " + std::to_string(id) + ' ' + key, config_.effective_timeout(), key);

    std::istringstream in(reply);
    std::string tag, id_text, status;
    in >> tag >> id_text >> status;
    std::string value;
    std::getline(in >> std::ws, value);
    if (tag != "A" || id_text != std::to_string(id) || (status != "OK" && status != "ERR"))
        throw BackendError(key, "malformed reply '" + reply + "'");
    if (status == "ERR")
        throw BackendError(key, "backend error: " + value);
    if (value.empty())
        throw BackendError(key, "malformed reply '" + reply + "'");
    if (request.kind != RequestKind::subcyclo) {
        std::int64_t v = 0;
        if (!parse_i64(value, v) || v <= 0)
            throw BackendError(key, "malformed class number '" + value + "'");
    }
    cache_.put(key, value);
    return value;
}

std::uint64_t Backend::query_class_number(BackendRequest const & request)
{
    std::string const value = query(request);
    std::int64_t v = 0;
    if (!parse_i64(value, v) || v <= 0)
        throw BackendError(request.key(), "cached class number '" + value + "' is not a positive integer");
    return static_cast<std::uint64_t>(v);
}

} // namespace succmax
