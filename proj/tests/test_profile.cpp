#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hcopt/error.hpp"
#include "hcopt/profile.hpp"

using namespace hcopt;

namespace {

std::string slurp(const std::string& name)
{
    std::ifstream in(std::string(HCOPT_FIXTURE_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorKind parse_error(const std::string& text, int* line = nullptr)
{
    try {
        parse_samples_file(text);
    } catch (const Error& e) {
        if (line && e.span())
            *line = e.span()->line_start;
        return e.kind();
    }
    FAIL("expected a parse error");
    return ErrorKind::InvalidArgument;
}

const HotspotRow& row(const HotspotTable& t, const std::string& scope)
{
    auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const HotspotRow& r) { return r.scope == scope; });
    REQUIRE(it != t.rows.end());
    return *it;
}

double pct(const HotspotTable& t, const HotspotRow& r, std::size_t e) { return event_percent(r.cells[e].samples, t.totals[e]); }

const std::string kHeader = "#meta\tduration_s=20\tinterval_s=0.001\tprocessors=1\n"
                            "#event\tCLK\tsav=2000000\trole=clock\n"
                            "#event\tINST\tsav=2000000\trole=instruction\n";

} // namespace

TEST_CASE("expected samples")
{
    CHECK(expected_samples({20, 0.001, 1}) == 20000);
    CHECK(expected_samples({1, 1, 1}) == 1);
    CHECK(expected_samples({10, 0.002, 4}) == 20000);
    CHECK_THROWS_AS(expected_samples({0, 1, 1}), Error);
}

TEST_CASE("event percent and count")
{
    CHECK(event_percent(31, 39) == doctest::Approx(79.49));
    CHECK(event_percent(27, 32) == doctest::Approx(84.38));
    CHECK(event_percent(0, 7) == 0.0);
    CHECK(event_percent(1, 8) == doctest::Approx(12.5));
    CHECK(event_percent(1, 200) == doctest::Approx(0.5));
    CHECK(event_percent(1, 1) == 100.0);
    try {
        event_percent(0, 0);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroTotal);
    }
    CHECK(event_count(31, 2000000) == 62000000);
    CHECK(event_count(4, 2000000) == 8000000);
    CHECK(event_count(0, 123456) == 0);
}

TEST_CASE("cpi")
{
    CHECK(cpi(139200000, 67200000).value == doctest::Approx(2.071).epsilon(1e-9));
    CHECK(cpi(26400000, 14400000).value == doctest::Approx(1.833).epsilon(1e-9));
    Cpi one = cpi(5000, 5000);
    CHECK(one.value == 1.0);
    CHECK_FALSE(one.suspect);
    CHECK(cpi(139200000, 67200000).suspect);
    CHECK_FALSE(cpi(139200000, 67200000).high);
    CHECK(cpi(60, 10).high);
    try {
        cpi(10, 0);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroInstructions);
    }
}

TEST_CASE("samples file errors")
{
    int line = 0;
    CHECK(parse_error("CLK\tf\ta.c:1\t3\n") == ErrorKind::MissingMeta);
    CHECK(parse_error("") == ErrorKind::MissingMeta);
    CHECK(parse_error("// only a comment\n") == ErrorKind::MissingMeta);
    CHECK(parse_error(kHeader + "NOPE\tf\ta.c:1\t3\n", &line) == ErrorKind::UnknownEvent);
    CHECK(line == 4);
    CHECK(parse_error(kHeader + "\nCLK\tf\ta.c:1\n", &line) == ErrorKind::MalformedLine);
    CHECK(line == 5);
    CHECK(parse_error(kHeader + "CLK\tf\ta.c\t3\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "CLK\tf\ta.c:0\t3\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "CLK\tf\ta.c:1\t-3\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "#pragma\tx\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "#event\tCLK\tsav=1\trole=clock\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "#event\tX\tsav=0\trole=other\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "#event\tX\tsav=1\trole=cycles\n") == ErrorKind::MalformedLine);
    CHECK(parse_error(kHeader + "CLK\tf\ta.c:1\t3\n#event\tX\tsav=1\trole=other\n") == ErrorKind::MalformedLine);
    CHECK(parse_error("#meta\tduration_s=0\tinterval_s=0.001\tprocessors=1\n") == ErrorKind::MalformedLine);
    CHECK(parse_error("#meta\tinterval_s=0.001\tduration_s=20\tprocessors=1\n") == ErrorKind::MalformedLine);
}

TEST_CASE("meta and events only")
{
    SamplingRun r = parse_samples_file(kHeader);
    CHECK(r.records.empty());
    CHECK(r.events.size() == 2);
    CHECK(r.meta.n_processors == 1);
    SamplingRun e = parse_samples_file(slurp("empty-run.samples"));
    CHECK(e.records.empty());
    HotspotTable t = hotspot_table(e, GroupBy::Function);
    CHECK(t.rows.empty());
    std::string text = render_hotspot_table(t, true);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
}

TEST_CASE("heap module report rows")
{
    HotspotTable t = hotspot_table(parse_samples_file(slurp("table1.samples")), GroupBy::Function);
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows[0].scope == "adjust");
    CHECK(t.totals == std::vector<std::uint64_t>{39, 32});
    struct Want {
        const char* scope;
        std::uint64_t samples;
        double percent;
        std::uint64_t events;
    };
    for (Want w : {Want{"adjust", 31, 79.49, 62000000}, Want{"hsort", 4, 10.26, 8000000},
                   Want{"swap", 2, 5.13, 4000000}, Want{"gen_array", 1, 2.56, 2000000}}) {
        CAPTURE(w.scope);
        const auto& r = row(t, w.scope);
        CHECK(r.cells[0].samples == w.samples);
        CHECK(std::abs(pct(t, r, 0) - w.percent) < 0.01 + 1e-9);
        CHECK(r.cells[0].events == w.events);
    }
    const auto& adj = row(t, "adjust");
    CHECK(adj.cells[1].samples == 27);
    CHECK(pct(t, adj, 1) == doctest::Approx(84.38));
    CHECK(adj.cells[1].events == 54000000);
    REQUIRE(adj.cpi);
    CHECK(*adj.cpi == doctest::Approx(1.148));
    CHECK_FALSE(row(t, "hsort").cpi);

    std::string text = render_hotspot_table(t, true);
    std::istringstream lines(text);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "scope\tCPU_CLK samples\tCPU_CLK %\tCPU_CLK events\tINST_RETIRED samples\tINST_RETIRED %\t"
                    "INST_RETIRED events\tCPI\tprocess %");
    CHECK(first == "adjust\t31\t79.49\t62000000\t27\t84.38\t54000000\t1.148\t79.49");
}

TEST_CASE("second iteration rows")
{
    HotspotTable t = hotspot_table(parse_samples_file(slurp("table2.samples")), GroupBy::Function);
    const auto& adj = t.rows.at(0);
    CHECK(adj.scope == "adjust");
    CHECK(adj.cells[0].samples == 35);
    CHECK(pct(t, adj, 0) == doctest::Approx(83.33));
    CHECK(adj.cells[0].events == 70000000);
    CHECK(adj.cells[1].samples == 33);
    CHECK(pct(t, adj, 1) == doctest::Approx(91.67));
    CHECK(adj.cells[1].events == 66000000);
}

TEST_CASE("system wide shares via an other row")
{
    SamplingRun run = parse_samples_file(slurp("table3.samples"));
    HotspotTable t = hotspot_table(run, GroupBy::Function);
    const auto& hs = row(t, "HeapSort");
    CHECK(pct(t, hs, 0) == doctest::Approx(4.26));
    CHECK(hs.cells[0].events == 139200000);
    CHECK(hs.cells[1].events == 67200000);
    CHECK(*hs.cpi == doctest::Approx(2.071));
    CHECK(*row(t, "Heap_Optimized3").cpi == doctest::Approx(1.833));
    CHECK(pct(t, row(t, "Heap_Optimized3"), 0) == doctest::Approx(0.81));
}

TEST_CASE("grouping by location and top")
{
    SamplingRun run = parse_samples_file(slurp("table1.samples"));
    HotspotTable t = hotspot_table(run, GroupBy::Location, 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].scope == "heap.c:54");
    CHECK(t.rows[1].scope == "heap.c:40");
    CHECK(t.totals[0] == 39);
}

TEST_CASE("single record is 100 percent")
{
    HotspotTable t = hotspot_table(parse_samples_file(kHeader + "CLK\tf\ta.c:3\t7\n"), GroupBy::Function);
    REQUIRE(t.rows.size() == 1);
    CHECK(pct(t, t.rows[0], 0) == 100.0);
    CHECK(*t.rows[0].process_share == 100.0);
    CHECK_FALSE(t.rows[0].cpi);
}

TEST_CASE("duplicate scopes aggregate")
{
    HotspotTable t = hotspot_table(
        parse_samples_file(kHeader + "CLK\tf\ta.c:3\t7\nCLK\tf\ta.c:9\t3\nCLK\tg\ta.c:20\t10\n"), GroupBy::Function);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].scope == "f");
    CHECK(t.rows[0].cells[0].samples == 10);
    CHECK(t.rows[1].scope == "g");
}

namespace {

SamplingRun random_run(std::mt19937& rng)
{
    SamplingRun r;
    r.meta = {double(rng() % 100 + 1), 0.001 * double(rng() % 10 + 1), int(rng() % 8 + 1)};
    r.events = {{"CLK", rng() % 5000000 + 1, EventRole::Clock},
                {"INST", rng() % 5000000 + 1, EventRole::Instruction},
                {"MISS", rng() % 1000 + 1, EventRole::Other}};
    int n = int(rng() % 40) + 1;
    for (int i = 0; i < n; ++i) {
        SampleRecord s;
        s.event = r.events[rng() % 3].name;
        s.function = "fn" + std::to_string(rng() % 12);
        s.location = "m.c:" + std::to_string(rng() % 50 + 1);
        s.samples = rng() % 1000;
        r.records.push_back(s);
    }
    return r;
}

} // namespace

TEST_CASE("percent columns sum to 100")
{
    std::mt19937 rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        SamplingRun r = random_run(rng);
        HotspotTable t = hotspot_table(r, iter % 2 ? GroupBy::Function : GroupBy::Location);
        for (std::size_t e = 0; e < t.events.size(); ++e) {
            if (t.totals[e] == 0)
                continue;
            double sum = 0;
            for (const auto& row : t.rows) {
                sum += row.cells[e].percent;
                CHECK(row.cells[e].events == row.cells[e].samples * t.events[e].sample_after_value);
            }
            CHECK(std::abs(sum - 100.0) <= 0.01);
        }
    }
}

TEST_CASE("record order does not matter")
{
    std::mt19937 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        SamplingRun r = random_run(rng);
        SamplingRun shuffled = r;
        std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
        for (GroupBy g : {GroupBy::Function, GroupBy::Location})
            CHECK(render_hotspot_table(hotspot_table(r, g), true) == render_hotspot_table(hotspot_table(shuffled, g), true));
    }
}

TEST_CASE("render then parse round trip")
{
    std::mt19937 rng(3);
    for (int iter = 0; iter < 300; ++iter) {
        SamplingRun r = random_run(rng);
        CHECK(parse_samples_file(render_samples_file(r)) == r);
    }
    for (const char* f : {"table1.samples", "table2.samples", "table3.samples", "empty-run.samples"}) {
        SamplingRun r = parse_samples_file(slurp(f));
        CHECK(parse_samples_file(render_samples_file(r)) == r);
    }
}

TEST_CASE("sample after value is constant per table")
{
    CHECK(infer_sample_after_value({{58, 139200000}, {56, 134400000}, {55, 132000000}, {11, 26400000},
                                    {28, 67200000}, {27, 64800000}, {29, 69600000}, {6, 14400000}}) == 2400000u);
    CHECK(infer_sample_after_value({{31, 62000000}, {4, 8000000}, {2, 4000000}, {1, 2000000}, {27, 54000000}}) ==
          2000000u);
    CHECK(infer_sample_after_value({{35, 70000000}, {33, 66000000}, {2, 4000000}}) == 2000000u);
    CHECK_FALSE(infer_sample_after_value({{2, 4000000}, {3, 7000000}}));
}
