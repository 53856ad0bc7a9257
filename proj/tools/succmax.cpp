#include "succmax/arith.hpp"
#include "succmax/backend.hpp"
#include "succmax/classnum.hpp"
#include "succmax/cubic.hpp"
#include "succmax/scan.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

using namespace succmax;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, backend_error = 3, budget_error = 4 };

struct BackendFlags
{
    std::string command;
    std::string cache;
    std::optional<unsigned> timeout_s;

    void add(CLI::App * app)
    {
        app->add_option("--backend-cmd", command, "Backend command line (run through /bin/sh -c)");
        app->add_option("--cache", cache, "Append-only result cache file");
        app->add_option("--backend-timeout", timeout_s, "Backend reply timeout in seconds (default 60)");
    }

    BackendConfig config() const
    {
        BackendConfig c;
        c.command = command;
        c.cache_path = cache;
        if (timeout_s)
            c.timeout = std::chrono::seconds(*timeout_s);
        return c.with_environment();
    }
};

std::vector<Epsilon> parse_eps_list(std::vector<std::string> const & texts)
{
    std::vector<Epsilon> out;
    for (auto const & t : texts) {
        try {
            out.push_back(Epsilon::parse(t));
        } catch (std::invalid_argument const & e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_list(std::string const & text)
{
    std::vector<std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoull(item, &pos));
            if (pos != item.size())
                throw std::invalid_argument(item);
        } catch (std::exception const &) {
            throw ConfigError("bad integer list '" + text + "'");
        }
    }
    return out;
}

CubicFixtures load_fixtures(std::string const & path)
{
    std::string const chosen = path.empty() ? SUCCMAX_DEFAULT_FIXTURES : path;
    if (path.empty() && !std::filesystem::exists(chosen))
        return {};
    try {
        return CubicFixtures::load(chosen);
    } catch (std::invalid_argument const & e) {
        throw ConfigError(e.what());
    }
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Successive maxima of class-number metrics of quadratic and cyclic cubic fields"};
    app.require_subcommand(1);

    // scan
    auto * scan_cmd = app.add_subcommand("scan", "Successive maxima or minima over a range of fields");
    std::string family = "quad_imaginary", metric = "nongenus", mode = "maxima", scope = "exact_conductor";
    std::string buckets = "1,2,3+", format = "text", fixtures_path;
    std::vector<std::string> eps_texts;
    std::uint64_t lo = 1, hi = 1000;
    unsigned shards = 1;
    bool compat_one = false, per_field_max = false;
    BackendFlags scan_backend;
    scan_cmd->add_option("--family", family, "quad_imaginary | quad_real | cubic")->capture_default_str();
    scan_cmd->add_option("--eps", eps_texts, "Exponent, p/q or exact decimal; repeatable");
    scan_cmd->add_option("--min", lo, "Smallest |D| or conductor")->capture_default_str();
    scan_cmd->add_option("--max", hi, "Largest |D| or conductor")->capture_default_str();
    scan_cmd->add_option("--metric", metric, "nongenus | full | raw_H | raw_h")->capture_default_str();
    scan_cmd->add_option("--mode", mode, "maxima | minima")->capture_default_str();
    scan_cmd->add_option("--scope", scope, "exact_conductor | divisors (cubic)")->capture_default_str();
    scan_cmd->add_option("--buckets", buckets, "N buckets, e.g. 1,2,3+ or 1..5,6+")->capture_default_str();
    scan_cmd->add_option("--format", format, "text | csv | json-lines")->capture_default_str();
    scan_cmd->add_option("--shards", shards, "Disjoint key shards scanned in parallel")->capture_default_str();
    scan_cmd->add_option("--fixtures", fixtures_path, "Cubic class number fixture table");
    scan_cmd->add_flag("--compat-minima-init-one", compat_one, "Start the running record at 1");
    scan_cmd->add_flag("--per-field-max", per_field_max, "Cubic: one record per field instead of family means");
    scan_backend.add(scan_cmd);

    // genus-family
    auto * genus_cmd = app.add_subcommand("genus-family", "Class numbers of Q(sqrt(-q1...qk)) over prime prefixes");
    std::string primes_text;
    std::uint64_t start_prime = 2;
    unsigned prime_count = 0;
    std::string genus_eps;
    std::optional<double> budget_s;
    genus_cmd->add_option("--primes", primes_text, "Comma separated primes");
    genus_cmd->add_option("--start", start_prime, "First prime when --count is used");
    genus_cmd->add_option("--count", prime_count, "Number of consecutive primes from --start");
    genus_cmd->add_option("--eps", genus_eps, "Also print C at this eps");
    genus_cmd->add_option("--budget", budget_s, "Time budget in seconds");

    // threshold
    auto * thr_cmd = app.add_subcommand("threshold", "Largest grid eps giving at least two records");
    std::string thr_family = "quad_imaginary", thr_metric = "nongenus", thr_mode = "maxima", grid = "1/10";
    std::uint64_t thr_lo = 1, thr_hi = 1000000;
    thr_cmd->add_option("--family", thr_family, "quad_imaginary | quad_real")->capture_default_str();
    thr_cmd->add_option("--min", thr_lo)->capture_default_str();
    thr_cmd->add_option("--max", thr_hi)->capture_default_str();
    thr_cmd->add_option("--metric", thr_metric)->capture_default_str();
    thr_cmd->add_option("--mode", thr_mode)->capture_default_str();
    thr_cmd->add_option("--grid", grid, "Grid step p/q")->capture_default_str();

    // classno
    auto * cls_cmd = app.add_subcommand("classno", "Class number of a quadratic field");
    std::int64_t disc_value = 0;
    bool cls_backend = false;
    BackendFlags cls_flags;
    cls_cmd->add_option("disc", disc_value, "Fundamental discriminant D_K")->required();
    cls_cmd->add_flag("--backend", cls_backend, "Cross-check through the backend");
    cls_flags.add(cls_cmd);

    // cubic-fields
    auto * cubic_cmd = app.add_subcommand("cubic-fields", "Cyclic cubic fields by conductor");
    std::uint64_t cubic_lo = 7, cubic_hi = 100;
    bool with_h = false, as_fixture = false;
    std::string cubic_fixtures;
    BackendFlags cubic_flags;
    cubic_cmd->add_option("--min", cubic_lo)->capture_default_str();
    cubic_cmd->add_option("--max", cubic_hi)->capture_default_str();
    cubic_cmd->add_flag("--class-numbers", with_h, "Look up H (fixtures, then backend)");
    cubic_cmd->add_flag("--fixture-format", as_fixture, "Emit CUBIC,<f>,<c2>,<c1>,<c0>,<H> lines");
    cubic_cmd->add_option("--fixtures", cubic_fixtures, "Fixture table");
    cubic_flags.add(cubic_cmd);

    // query
    auto * query_cmd = app.add_subcommand("query", "Raw backend request");
    std::vector<std::string> query_args;
    BackendFlags query_flags;
    query_cmd->add_option("request", query_args, "CLASSNO_CUBIC c2 c1 c0 | CLASSNO_QUAD D | SUBCYCLO f p")->required();
    query_flags.add(query_cmd);

    // cache-compact
    auto * compact_cmd = app.add_subcommand("cache-compact", "Rewrite the cache with one line per key");
    std::string compact_path;
    compact_cmd->add_option("--cache", compact_path, "Cache file")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        int const rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (scan_cmd->parsed()) {
            ScanConfig config;
            config.family = parse_family(family);
            config.eps_list = parse_eps_list(eps_texts);
            config.lo = lo;
            config.hi = hi;
            config.metric = parse_metric_kind(metric);
            config.mode = parse_mode(mode);
            config.scope = parse_scope(scope);
            config.per_field_max = per_field_max;
            try {
                config.buckets = BucketSpec::parse(buckets);
            } catch (std::invalid_argument const & e) {
                throw ConfigError(e.what());
            }
            config.format = parse_output_format(format);
            config.shards = shards;
            config.compat_minima_init_one = compat_one;
            config.validate();

            std::unique_ptr<Backend> backend;
            CubicFixtures fixtures;
            std::optional<CubicClassNumbers> class_numbers;
            if (config.family == Family::cubic) {
                fixtures = load_fixtures(fixtures_path);
                BackendConfig const bc = scan_backend.config();
                if (!bc.command.empty() || !bc.cache_path.empty())
                    backend = std::make_unique<Backend>(bc);
                class_numbers.emplace(&fixtures, backend.get());
            }
            auto const results = run_scan(config, class_numbers ? &*class_numbers : nullptr);
            render(std::cout, config, results);
        } else if (genus_cmd->parsed()) {
            std::vector<std::uint64_t> primes;
            if (!primes_text.empty()) {
                primes = parse_list(primes_text);
            } else {
                if (prime_count == 0)
                    throw ConfigError("give --primes or --count");
                for (std::uint64_t q = start_prime; primes.size() < prime_count; ++q)
                    if (is_prime(q))
                        primes.push_back(q);
            }
            std::optional<Epsilon> eps;
            if (!genus_eps.empty())
                eps = parse_eps_list({genus_eps}).front();
            std::optional<std::chrono::milliseconds> budget;
            if (budget_s)
                budget = std::chrono::milliseconds(static_cast<std::int64_t>(*budget_s * 1000));
            auto const rows = run_genus_family(primes, eps, budget);
            bool skipped = false;
            for (auto const & row : rows) {
                std::cout << "D_K=" << row.disc.value << " primes=";
                for (std::size_t i = 0; i < row.primes.size(); ++i)
                    std::cout << (i ? "," : "") << row.primes[i];
                if (row.skipped) {
                    std::cout << " skipped=budget\n";
                    std::cerr << "budget exceeded before D_K=" << row.disc.value << '\n';
                    skipped = true;
                    continue;
                }
                std::cout << " H=" << row.H << " h=" << row.h << " N=" << row.disc.n_ramified;
                if (row.C)
                    std::cout << " C=" << format_real(row.C->approx);
                std::cout << '\n';
            }
            if (skipped)
                return budget_error;
        } else if (thr_cmd->parsed()) {
            Family const fam = parse_family(thr_family);
            if (fam == Family::cubic)
                throw ConfigError("threshold search supports quadratic families");
            if (thr_lo == 0 || thr_lo > thr_hi)
                throw ConfigError("range must satisfy 1 <= min <= max");
            Epsilon step;
            try {
                step = Epsilon::parse(grid);
            } catch (std::invalid_argument const & e) {
                throw ConfigError(e.what());
            }
            auto const records = quadratic_records(
                fam == Family::quad_imaginary ? Signature::imaginary : Signature::real, thr_lo, thr_hi);
            auto const res = run_threshold_search(records, parse_metric_kind(thr_metric), step, parse_mode(thr_mode));
            std::cout << (res.found ? "threshold" : "none") << " eps=" << res.eps.str() << " events=" << res.events;
            if (res.next)
                std::cout << " next_eps=" << res.next->str() << " next_events=" << res.next_events;
            std::cout << '\n';
        } else if (cls_cmd->parsed()) {
            auto const d = make_quad_discriminant(disc_value);
            if (!d)
                throw ConfigError(std::to_string(disc_value) + " is not a fundamental discriminant");
            std::uint64_t const H = class_number(*d);
            std::cout << "D_K=" << d->value << " H=" << H << " N=" << d->n_ramified << '\n';
            if (cls_backend) {
                Backend backend(cls_flags.config());
                std::uint64_t const B = backend.query_class_number(BackendRequest::classno_quad(d->value));
                std::cout << "backend H=" << B << (B == H ? " agree" : " DISAGREE") << '\n';
                if (B != H)
                    return failure;
            }
        } else if (cubic_cmd->parsed()) {
            if (cubic_lo == 0 || cubic_lo > cubic_hi)
                throw ConfigError("range must satisfy 1 <= min <= max");
            CubicFixtures fixtures;
            std::unique_ptr<Backend> backend;
            if (with_h || as_fixture) {
                fixtures = load_fixtures(cubic_fixtures);
                BackendConfig const bc = cubic_flags.config();
                if (!bc.command.empty() || !bc.cache_path.empty())
                    backend = std::make_unique<Backend>(bc);
            }
            CubicClassNumbers const class_numbers(&fixtures, backend.get());
            for (std::uint64_t f = cubic_lo; f <= cubic_hi; ++f) {
                if (!is_cyclic_conductor(3, f))
                    continue;
                for (auto const & k : enumerate_cubic_fields(f)) {
                    if (as_fixture) {
                        std::cout << "CUBIC," << f << ',' << k.coeffs[0] << ',' << k.coeffs[1] << ',' << k.coeffs[2]
                                  << ',' << class_numbers(k) << '\n';
                        continue;
                    }
                    std::cout << "f=" << f << " a=" << k.a << " b=" << k.b << " P=" << k.polynomial();
                    if (with_h)
                        std::cout << " H=" << class_numbers(k);
                    std::cout << '\n';
                }
            }
        } else if (query_cmd->parsed()) {
            BackendRequest req;
            std::string const kind = query_args.front();
            std::vector<std::int64_t> args;
            for (std::size_t i = 1; i < query_args.size(); ++i) {
                try {
                    args.push_back(std::stoll(query_args[i]));
                } catch (std::exception const &) {
                    throw ConfigError("bad request argument '" + query_args[i] + "'");
                }
            }
            if (kind == "CLASSNO_CUBIC" && args.size() == 3)
                req = BackendRequest::classno_cubic(args[0], args[1], args[2]);
            else if (kind == "CLASSNO_QUAD" && args.size() == 1)
                req = BackendRequest::classno_quad(args[0]);
            else if (kind == "SUBCYCLO" && args.size() == 2 && args[0] > 0 && args[1] > 0)
                req = BackendRequest::subcyclo(static_cast<std::uint64_t>(args[0]), static_cast<std::uint64_t>(args[1]));
            else
                throw ConfigError("unknown request shape");
            Backend backend(query_flags.config());
            std::cout << backend.query(req) << '\n';
        } else if (compact_cmd->parsed()) {
            ResultCache cache(compact_path);
            std::size_t const dropped = cache.compact();
            std::cout << "entries=" << cache.size() << " dropped=" << dropped << '\n';
        }
    } catch (ConfigError const & e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (BackendError const & e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return backend_error;
    } catch (BudgetExceeded const & e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return budget_error;
    } catch (std::exception const & e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
