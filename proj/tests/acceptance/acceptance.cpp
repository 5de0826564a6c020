// One PASS/FAIL line per acceptance criterion; exit status is non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "hcopt/analysis.hpp"
#include "hcopt/bench.hpp"
#include "hcopt/interp.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/printer.hpp"
#include "hcopt/profile.hpp"
#include "hcopt/rewrite.hpp"
#include "support/random_ast.hpp"
#include "support/ref_eval.hpp"

using namespace hcopt;

namespace {

std::string fixture(const std::string& name) { return std::string(HCOPT_FIXTURE_DIR) + "/" + name; }

const Predefined desk{{"SMALL", "1"}, {"DEBUG", "1"}};

// 2000! has 5736 decimal digits; leading digits from an arbitrary precision integer library.
constexpr std::size_t kFact2000Digits = 5736;
constexpr const char* kFact2000Lead = "3316275092450633241175393380576324038281";

struct Check {
    bool ok = true;
    std::string note;
    void expect(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            note += (note.empty() ? "" : "; ") + what;
        }
    }
};

std::string cli_out(const std::vector<std::string>& args, int* code = nullptr)
{
    std::ostringstream out, err;
    int c = cli::run_cli(args, out, err);
    if (code)
        *code = c;
    return out.str();
}

using Row = std::vector<std::string>;

std::map<std::string, Row> tsv_rows(const std::string& text)
{
    std::map<std::string, Row> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        Row r;
        std::istringstream cells(line);
        for (std::string c; std::getline(cells, c, '\t');)
            r.push_back(c);
        if (!r.empty())
            rows[r[0]] = r;
    }
    return rows;
}

bool near(const std::string& cell, double want, double tol)
{
    try {
        return std::fabs(std::stod(cell) - want) <= tol;
    } catch (const std::exception&) {
        return false;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// cells: scope, clk samples, clk %, clk events, inst samples, inst %, inst events, ...
void expect_row(Check& c, const std::map<std::string, Row>& rows, const std::string& scope, int offset,
                const std::string& samples, double pct, const std::string& events, double tol)
{
    auto it = rows.find(scope);
    if (it == rows.end() || it->second.size() < static_cast<std::size_t>(offset + 3)) {
        c.expect(false, scope + " missing");
        return;
    }
    const Row& r = it->second;
    c.expect(r[static_cast<std::size_t>(offset)] == samples, scope + " samples " + r[static_cast<std::size_t>(offset)]);
    c.expect(near(r[static_cast<std::size_t>(offset + 1)], pct, tol), scope + " percent " + r[static_cast<std::size_t>(offset + 1)]);
    c.expect(r[static_cast<std::size_t>(offset + 2)] == events, scope + " events " + r[static_cast<std::size_t>(offset + 2)]);
}

Check criterion1()
{
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    auto rows = tsv_rows(cli_out({"report", fixture("table1.samples"), "--by", "function", "--format", "tsv"}));
    expect_row(c, rows, "adjust", 1, "31", 79.49, "62000000", 0.01);
    expect_row(c, rows, "hsort", 1, "4", 10.26, "8000000", 0.01);
    expect_row(c, rows, "swap", 1, "2", 5.13, "4000000", 0.01);
    expect_row(c, rows, "gen_array", 1, "1", 2.56, "2000000", 0.01);
    expect_row(c, rows, "adjust", 4, "27", 84.38, "54000000", 0.01);
    double t = seconds_since(t0);
    c.expect(t < 1.0, "took " + std::to_string(t) + " s");
    return c;
}

Check criterion2()
{
    Check c;
    auto rows = tsv_rows(cli_out({"report", fixture("table2.samples"), "--by", "function", "--format", "tsv"}));
    expect_row(c, rows, "adjust", 1, "35", 83.33, "70000000", 0.05);
    expect_row(c, rows, "adjust", 4, "33", 91.67, "66000000", 0.05);
    return c;
}

Check criterion3()
{
    Check c;
    c.expect(expected_samples({20, 0.001, 1}) == 20000, "got " + std::to_string(expected_samples({20, 0.001, 1})));
    return c;
}

Check criterion4()
{
    Check c;
    Cpi v = cpi(139200000, 67200000);
    c.expect(std::fabs(v.value - 2.071) <= 0.001, "got " + std::to_string(v.value));
    return c;
}

Check criterion5()
{
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    int benches = 0;
    for (const char* name : {"heap.c", "fact.c"}) {
        TranslationUnit tu = load_file(fixture(name), desk);
        for (RuleId r : rewritable_rules()) {
            RewriteResult res = auto_plan(tu, {r}, false);
            if (res.report.applied.empty())
                continue;
            ++benches;
            BenchOutcome b = bench_outcome(tu, res.tu);
            c.expect(b.equivalent, std::string(name) + " " + std::string(to_string(r)) + " diverges");
        }
    }
    c.expect(benches >= 6, "only " + std::to_string(benches) + " rule applications");
    double t = seconds_since(t0);
    c.expect(t < 30.0, "took " + std::to_string(t) + " s");
    if (c.ok)
        c.note = std::to_string(benches) + " fixture/rule pairs equivalent";
    return c;
}

Check criterion6()
{
    Check c;
    std::set<RuleId> safe(rewritable_rules().begin(), rewritable_rules().end());
    for (const char* name : {"heap.c", "fact.c"}) {
        TranslationUnit tu = load_file(fixture(name), desk);
        BenchOutcome b = bench_outcome(tu, auto_plan(tu, safe, false).tu);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s %.2f%%", name, b.reduction_percent);
        c.expect(b.equivalent, std::string(name) + " diverges");
        c.expect(b.reduction_percent > 0, std::string(buf) + " not positive");
        c.note += (c.note.empty() ? "" : ", ") + std::string(buf);
    }
    return c;
}

Check criterion7()
{
    Check c;
    std::string text = cli_out({"run", fixture("heap.c"), "--define", "N=1000", "--cost", "--format", "tsv"});
    auto at = text.find("scope\tcost\tshare\n");
    if (at == std::string::npos) {
        c.expect(false, "no cost table");
        return c;
    }
    std::istringstream in(text.substr(at));
    std::string line, top, order;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (top.empty())
            top = line;
        order += (order.empty() ? "" : " > ") + line.substr(0, line.find('\t'));
    }
    c.expect(top.rfind("adjust\t", 0) == 0, "top row is " + top);
    c.note = order;
    return c;
}

Check criterion8()
{
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    hcopt::testing::RandomAst gen(8);
    int bad_units = 0;
    for (int i = 0; i < 1000; ++i) {
        TranslationUnit tu = gen.unit(6);
        try {
            if (!structurally_equal(parse_source(pretty_print(tu)), tu))
                ++bad_units;
        } catch (const Error&) {
            ++bad_units;
        }
    }
    c.expect(bad_units == 0, std::to_string(bad_units) + " units fail the round trip");

    std::mt19937 rng(8);
    std::string src = "int main() {\n", expected;
    for (int k = 0; k < 1000; ++k) {
        std::string e = hcopt::testing::random_expression(rng, 4);
        hcopt::testing::RefEval ref{e};
        expected += std::to_string(ref.level(0)) + "\n";
        src += "printf(\"%d\\n\", " + e + ");\n";
    }
    src += "return 0; }";
    c.expect(run(parse_source(src)).stdout_bytes == expected, "expressions disagree with the reference evaluator");
    double t = seconds_since(t0);
    c.expect(t < 10.0, "took " + std::to_string(t) + " s");
    return c;
}

Check criterion9()
{
    Check c;
    int agree = 0;
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            std::string src = "int main() { int a; int b; a = " + std::to_string(a) + "; b = " + std::to_string(b) +
                              "; printf(\"%d %d %d %d\", a && b, a & b, a || b, a | b); return 0; }";
            int x[4] = {-1, -1, -1, -1};
            std::sscanf(run(parse_source(src)).stdout_bytes.c_str(), "%d %d %d %d", &x[0], &x[1], &x[2], &x[3]);
            agree += (x[0] == x[1]) + (x[2] == x[3]);
        }
    c.expect(agree == 8, std::to_string(agree) + " of 8 value checks agree");

    for (const char* cond : {"x && f(y)", "f(x) || y", "x && (y = 2)", "x++ || y"}) {
        auto tu = parse_source(std::string("int f(int v) { return v; } int main() { int x; int y; x = 1; y = 0; if (") +
                               cond + ") x = 2; return x; }");
        auto found = detect(tu, {RuleId::BITWISE_CONV});
        c.expect(!found.empty(), std::string("no finding for ") + cond);
        for (const auto& f : found)
            c.expect(f.safety != Safety::Safe, std::string("SAFE for ") + cond);
    }

    for (const char* callee : {"void h() { g = g + 1; }", "void k() { g = 0; } void h() { k(); }"}) {
        auto tu = parse_source(std::string("int g; ") + callee +
                               " int main() { int i; for (i = 0; i < 3; i++) { g = g + i; h(); } return g; }");
        for (const auto& f : detect(tu, {RuleId::GLOBAL_REG_ALIAS}))
            c.expect(f.function != "main" || f.safety != Safety::Safe, std::string("SAFE alias with ") + callee);
    }
    return c;
}

Check criterion10()
{
    Check c;
    c.expect(cli_out({"run", fixture("fact.c"), "--define", "SMALL", "--define", "DEBUG"}) == "3628800\n",
             "fact(10) output differs");
    int code = -1;
    std::string big = cli_out({"run", fixture("fact.c"), "--define", "DEBUG"}, &code);
    std::string digits;
    for (char ch : big)
        if (ch != '\n')
            digits += ch;
    c.expect(code == 0, "fact(2000) exit " + std::to_string(code));
    c.expect(digits.size() == kFact2000Digits, "fact(2000) has " + std::to_string(digits.size()) + " digits");
    c.expect(digits.rfind(kFact2000Lead, 0) == 0, "fact(2000) leading digits differ");
    return c;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"per-module clock and instruction report", criterion1},
        {"second iteration report", criterion2},
        {"expected sample count", criterion3},
        {"cycles per instruction", criterion4},
        {"semantic preservation per rule", criterion5},
        {"cost reduction of the full safe plan", criterion6},
        {"hotspot rank under the cost model", criterion7},
        {"print and parse round trip", criterion8},
        {"brute force safety gates", criterion9},
        {"factorial correctness", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.note = e.what();
        }
        failed += !c.ok;
        std::cout << (c.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first;
        if (!c.note.empty())
            std::cout << " (" << c.note << ")";
        std::cout << "\n";
    }
    return failed == 0 ? 0 : 1;
}
