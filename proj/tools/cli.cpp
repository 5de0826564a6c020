#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "hcopt/bench.hpp"
#include "hcopt/interp.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/printer.hpp"
#include "hcopt/profile.hpp"
#include "hcopt/rewrite.hpp"

namespace hcopt::cli {

namespace {

struct Misuse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Predefined defines_from(const std::vector<std::string>& defs)
{
    Predefined out;
    for (const auto& d : defs) {
        auto eq = d.find('=');
        if (eq == 0)
            throw Misuse("bad --define '" + d + "'");
        if (eq == std::string::npos)
            out[d] = "1";
        else
            out[d.substr(0, eq)] = d.substr(eq + 1);
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Misuse("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
}

std::set<RuleId> rules_from(const std::string& spec, bool rewriting)
{
    if (spec.empty() || spec == "all")
        return rewriting ? std::set<RuleId>(rewritable_rules().begin(), rewritable_rules().end())
                         : std::set<RuleId>(all_rules().begin(), all_rules().end());
    if (spec == "all-safe")
        return {rewritable_rules().begin(), rewritable_rules().end()};
    std::set<RuleId> out;
    std::stringstream ss(spec);
    std::string name;
    while (std::getline(ss, name, ',')) {
        auto r = rule_from_string(name);
        if (!r)
            throw Misuse("unknown rule '" + name + "'");
        if (rewriting && is_advisory(*r))
            throw Misuse(name + " is advisory and cannot be rewritten");
        out.insert(*r);
    }
    return out;
}

CostModel cost_model_from(const std::string& path)
{
    return path.empty() ? CostModel::defaults() : CostModel::from_json(read_file(path));
}

std::vector<std::int64_t> seeds_from(const std::string& spec)
{
    std::vector<std::int64_t> out;
    std::stringstream ss(spec);
    std::string s;
    while (std::getline(ss, s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(s, &used));
            if (used != s.size())
                throw std::invalid_argument(s);
        } catch (const std::logic_error&) {
            throw Misuse("bad seed '" + s + "'");
        }
    }
    if (out.empty())
        throw Misuse("empty seed list");
    return out;
}

bool is_input_error(ErrorKind k)
{
    return is_frontend_error(k) || k == ErrorKind::MalformedLine || k == ErrorKind::UnknownEvent ||
           k == ErrorKind::MissingMeta;
}

struct Options {
    std::vector<std::string> defines;
    std::string format = "text";
    bool tsv() const { return format == "tsv"; }

    // analyze
    std::string file;
    std::string rules;
    std::string hotspots;
    std::optional<std::size_t> top;

    // rewrite
    bool unsafe = false;
    std::string output;
    std::string report;

    // run
    std::string entry = "main";
    std::int64_t seed = 1;
    std::optional<std::int64_t> time_value;
    bool cost = false;
    std::string by = "function";
    std::string cost_model;
    std::vector<std::string> program_args;

    // bench
    std::string optimized;
    std::string seeds = "1,42,20071";
    bool by_rule = false;
};

GroupBy group_by_from(const std::string& by) { return by == "location" ? GroupBy::Location : GroupBy::Function; }

int cmd_analyze(const Options& o, std::ostream& out)
{
    TranslationUnit tu = load_file(o.file, defines_from(o.defines));
    std::vector<Finding> findings = detect(tu, rules_from(o.rules, false));
    if (o.hotspots.empty()) {
        out << render_findings(findings, o.tsv());
        return kOk;
    }
    HotspotTable table = hotspot_table(parse_samples_file(read_file(o.hotspots), o.hotspots), GroupBy::Function, o.top);
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        rank.emplace(table.rows[i].scope, i);
    auto rank_of = [&](const Finding& f) {
        auto it = rank.find(f.function);
        return it == rank.end() ? rank.size() : it->second;
    };
    std::stable_sort(findings.begin(), findings.end(),
                     [&](const Finding& a, const Finding& b) { return rank_of(a) < rank_of(b); });
    for (auto& f : findings)
        if (!rank.count(f.function))
            f.rationale = "[cold] " + f.rationale;
    out << render_findings(findings, o.tsv());
    return kOk;
}

int cmd_rewrite(const Options& o, std::ostream& out)
{
    std::set<RuleId> rules = rules_from(o.rules.empty() ? "all-safe" : o.rules, true);
    TranslationUnit tu = load_file(o.file, defines_from(o.defines));
    RewriteResult res = auto_plan(tu, rules, o.unsafe);
    std::string source = pretty_print(res.tu);
    std::string report = render_change_report(res.report, tu, res.tu);
    if (!o.output.empty())
        write_file(o.output, source);
    else
        out << source;
    if (!o.report.empty())
        write_file(o.report, report);
    else if (!o.output.empty())
        out << report;
    return kOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err)
{
    TranslationUnit tu = load_file(o.file, defines_from(o.defines));
    RunConfig rc;
    rc.seed = o.seed;
    rc.time_value = o.time_value;
    rc.argv = o.program_args;
    rc.cost_model = cost_model_from(o.cost_model);
    ExecResult r = run(tu, o.entry, rc);
    out << r.stdout_bytes;
    if (r.exit_code != 0)
        err << "program exited with " << r.exit_code << "\n";
    if (o.cost) {
        if (!r.stdout_bytes.empty() && r.stdout_bytes.back() != '\n')
            out << "\n";
        out << render_cost_rows(cost_attribution(r, group_by_from(o.by)), o.tsv());
    }
    return kOk;
}

int cmd_report(const Options& o, std::ostream& out)
{
    SamplingRun run = parse_samples_file(read_file(o.file), o.file);
    out << render_hotspot_table(hotspot_table(run, group_by_from(o.by), o.top), o.tsv());
    return kOk;
}

int cmd_bench(const Options& o, std::ostream& out)
{
    Predefined defs = defines_from(o.defines);
    BenchConfig config;
    config.entry = o.entry;
    config.seeds = seeds_from(o.seeds);
    config.cost_model = cost_model_from(o.cost_model);
    config.argv = o.program_args;
    TranslationUnit before = load_file(o.file, defs);
    TranslationUnit after = load_file(o.optimized, defs);
    BenchOutcome b = bench_outcome(before, after, config);
    if (o.by_rule)
        b.per_rule_breakdown = rule_breakdown(before, {rewritable_rules().begin(), rewritable_rules().end()}, config);
    out << render_bench(b, o.tsv());
    return b.equivalent ? kOk : kDivergence;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Source-level hotspot optimizer for a C subset", "hcopt"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"text", "tsv"};
    const std::vector<std::string> groupings{"function", "location"};

    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "Table format")->check(CLI::IsMember(formats));
    };
    auto source = [&](CLI::App* sub) {
        sub->add_option("file", o.file, "C source file")->required();
        sub->add_option("-D,--define", o.defines, "Predefine NAME or NAME=VALUE");
    };

    auto* analyze = app.add_subcommand("analyze", "List optimization findings");
    source(analyze);
    common(analyze);
    analyze->add_option("--rules", o.rules, "Comma separated rule ids, all or all-safe");
    analyze->add_option("--hotspots", o.hotspots, "Samples file used to rank functions");
    analyze->add_option("--top", o.top, "Functions treated as hot");

    auto* rewrite = app.add_subcommand("rewrite", "Apply rewrites and print the new source");
    source(rewrite);
    rewrite->add_option("--rules", o.rules, "Comma separated rule ids or all-safe");
    rewrite->add_flag("--unsafe", o.unsafe, "Also apply UNSAFE_NEEDS_OVERRIDE findings");
    rewrite->add_option("-o,--output", o.output, "Output file");
    rewrite->add_option("--report", o.report, "Change report file");

    auto* runc = app.add_subcommand("run", "Interpret a program");
    source(runc);
    common(runc);
    runc->add_option("--entry", o.entry, "Entry function");
    runc->add_option("--seed", o.seed, "Seed for srand and time");
    runc->add_option("--time-value", o.time_value, "Value returned by time()");
    runc->add_flag("--cost", o.cost, "Print the cost table");
    runc->add_option("--by", o.by, "Cost grouping")->check(CLI::IsMember(groupings));
    runc->add_option("--cost-model", o.cost_model, "Cost model JSON file");
    runc->add_option("args", o.program_args, "Program arguments");

    auto* report = app.add_subcommand("report", "Hotspot table from a samples file");
    report->add_option("file", o.file, "Samples file")->required();
    common(report);
    report->add_option("--by", o.by, "Grouping")->check(CLI::IsMember(groupings));
    report->add_option("--top", o.top, "Rows to keep");

    auto* bench = app.add_subcommand("bench", "Compare two programs under the cost model");
    bench->add_option("original", o.file, "Original source")->required();
    bench->add_option("optimized", o.optimized, "Optimized source")->required();
    bench->add_option("-D,--define", o.defines, "Predefine NAME or NAME=VALUE");
    common(bench);
    bench->add_option("--entry", o.entry, "Entry function");
    bench->add_option("--seeds", o.seeds, "Comma separated seeds");
    bench->add_option("--cost-model", o.cost_model, "Cost model JSON file");
    bench->add_flag("--by-rule", o.by_rule, "Cost saved by each SAFE rule on the original");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kMisuse;
    }

    try {
        if (*analyze)
            return cmd_analyze(o, out);
        if (*rewrite)
            return cmd_rewrite(o, out);
        if (*runc)
            return cmd_run(o, out, err);
        if (*report)
            return cmd_report(o, out);
        return cmd_bench(o, out);
    } catch (const Misuse& e) {
        err << "hcopt: " << e.what() << "\n";
        return kMisuse;
    } catch (const Error& e) {
        err << "hcopt: " << e.what() << "\n";
        return is_input_error(e.kind()) ? kParseError : kFailure;
    } catch (const std::exception& e) {
        err << "hcopt: " << e.what() << "\n";
        return kFailure;
    }
}

} // namespace hcopt::cli
