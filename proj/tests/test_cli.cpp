#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

namespace {

struct Run
{
    int status = -1;
    std::string out;
};

Run cli(std::string const & args)
{
    std::string const cmd = std::string(SUCCMAX_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE * p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p))
        r.out.append(buf.data(), n);
    int const st = ::pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string fake(std::string const & mode)
{
    return std::string("'") + SUCCMAX_FAKE_BACKEND + " " + mode + "'";
}

} // namespace

TEST_CASE("imaginary scan text output")
{
    auto const r = cli("scan --family quad_imaginary --eps 0.05 --min 1 --max 200");
    CHECK(r.status == 0);
    CHECK(r.out.find("D_K=-191 H=13 h=13 N=1 C=11.40033250135200530\n") != std::string::npos);
    CHECK(r.out.rfind("eps=0.05\n", 0) == 0);
}

TEST_CASE("real raw_H scan")
{
    auto const r = cli("scan --family quad_real --metric raw_H --min 2 --max 1000 --format csv");
    CHECK(r.status == 0);
    std::vector<std::string> keys;
    std::size_t pos = r.out.find('\n') + 1;
    while (pos < r.out.size()) {
        std::size_t const end = r.out.find('\n', pos);
        std::string const line = r.out.substr(pos, end - pos);
        std::size_t const a = line.find(',') + 1;
        keys.push_back(line.substr(a, line.find(',', a) - a));
        pos = end + 1;
    }
    CHECK(keys == std::vector<std::string>{"5", "12", "60", "316", "505", "817", "940"});
}

TEST_CASE("byte-stable across shards")
{
    std::string const base = "scan --family quad_imaginary --eps 1/50 --eps 0.05 --max 100000 --buckets 1..5,6+";
    auto const a = cli(base + " --shards 1");
    auto const b = cli(base + " --shards 4");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("config errors exit with 2")
{
    CHECK(cli("scan --family quad_imaginary --eps 2 --max 10").status == 2);
    CHECK(cli("scan --family quad_imaginary --eps 0.05 --min 10 --max 5").status == 2);
    CHECK(cli("scan --family octic --eps 0.05").status == 2);
    CHECK(cli("scan --family quad_real --metric raw_H --eps 0.05 --max 10").status == 2);
    CHECK(cli("scan --family quad_imaginary --eps 0.05 --per-field-max").status == 2);
    CHECK(cli("scan --family quad_imaginary --eps 0.05 --buckets 3,1").status == 2);
    CHECK(cli("no-such-command").status == 2);
}

TEST_CASE("backend errors exit with 3")
{
    std::string const empty = (std::filesystem::temp_directory_path() / "succmax_no_fixtures.txt").string();
    { std::FILE * f = std::fopen(empty.c_str(), "w"); std::fclose(f); }
    CHECK(cli("scan --family cubic --eps 1/100 --max 200 --fixtures " + empty).status == 3);
    CHECK(cli("scan --family cubic --eps 1/100 --max 200 --fixtures " + empty + " --backend-cmd " + fake("err"))
              .status == 3);
    CHECK(cli("scan --family cubic --eps 1/100 --max 200 --fixtures " + empty + " --backend-timeout 1 --backend-cmd " +
              fake("timeout"))
              .status == 3);
    auto const ok =
        cli("scan --family cubic --eps 1/100 --max 8 --fixtures " + empty + " --backend-cmd " + fake("ok"));
    CHECK(ok.status == 0);
    CHECK(ok.out.find("f=7 H=1 h=1 N=1 nK=1 C=0.9807290047229150047 P=x^3+x^2-2*x-1") != std::string::npos);
    std::filesystem::remove(empty);
}

TEST_CASE("genus family and budget")
{
    auto const r = cli("genus-family --primes 2,3,5,7,11 --eps 0.05");
    CHECK(r.status == 0);
    CHECK(r.out.find("H=32") != std::string::npos);
    CHECK(cli("genus-family --start 3 --count 3 --budget 0").status == 4);
}

TEST_CASE("threshold, classno, cubic-fields, query")
{
    auto const t = cli("threshold --family quad_imaginary --min 3 --max 3");
    CHECK(t.status == 0);
    CHECK(t.out.rfind("none eps=0 ", 0) == 0);
    auto const c = cli("classno -23");
    CHECK(c.status == 0);
    CHECK(c.out == "D_K=-23 H=3 N=1\n");
    CHECK(cli("classno -12").status == 2);
    auto const f = cli("cubic-fields --min 163 --max 163");
    CHECK(f.status == 0);
    CHECK(f.out.find("x^3+x^2-54*x-169") != std::string::npos);
    auto const q = cli("query CLASSNO_QUAD -47 --backend-cmd " + fake("ok"));
    CHECK(q.status == 0);
    CHECK(q.out == "5\n");
}
