#include "hcopt/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "hcopt/error.hpp"

namespace hcopt {

namespace {

// Exact half-up rounding of num/den to `places` decimals.
double rounded_ratio(std::uint64_t num, std::uint64_t den, int places, std::uint64_t scale_factor)
{
    std::uint64_t scale = scale_factor;
    for (int i = 0; i < places; ++i)
        scale *= 10;
    const unsigned __int128 n = static_cast<unsigned __int128>(num) * scale * 2 + den;
    const auto units = static_cast<std::uint64_t>(n / (static_cast<unsigned __int128>(den) * 2));
    double div = 1;
    for (int i = 0; i < places; ++i)
        div *= 10;
    return static_cast<double>(units) / div;
}

std::string fixed(double v, int places)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

std::string shortest(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
        if (tab == std::string_view::npos)
            return out;
        start = tab + 1;
    }
}

class LineParser {
public:
    LineParser(const std::string& file, int line) : file_(file), line_(line) {}

    [[noreturn]] void fail(const std::string& why) const
    {
        throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_) + ": " + why,
                    SourceSpan{file_, line_, 1, line_, 1});
    }

    std::string_view keyed(std::string_view field, std::string_view key) const
    {
        if (field.substr(0, key.size()) != key || field.size() <= key.size() || field[key.size()] != '=')
            fail("expected " + std::string(key) + "=<value>");
        return field.substr(key.size() + 1);
    }

    std::uint64_t unsigned_value(std::string_view s, const char* what) const
    {
        std::uint64_t v = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
            fail(std::string("invalid ") + what + " '" + std::string(s) + "'");
        return v;
    }

    double positive_double(std::string_view s, const char* what) const
    {
        double v = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !(v > 0) || !std::isfinite(v))
            fail(std::string(what) + " must be a positive number, got '" + std::string(s) + "'");
        return v;
    }

private:
    const std::string& file_;
    int line_;
};

} // namespace

std::string_view to_string(EventRole r)
{
    switch (r) {
    case EventRole::Clock: return "clock";
    case EventRole::Instruction: return "instruction";
    case EventRole::Other: return "other";
    }
    return "other";
}

std::uint64_t expected_samples(const SamplingMeta& meta)
{
    if (!(meta.duration_s > 0) || !(meta.interval_s > 0) || meta.n_processors < 1)
        throw Error(ErrorKind::InvalidArgument, "sampling meta needs duration > 0, interval > 0, processors >= 1");
    return static_cast<std::uint64_t>(std::llround(meta.duration_s * meta.n_processors / meta.interval_s));
}

double event_percent(std::uint64_t samples, std::uint64_t total)
{
    if (total == 0)
        throw Error(ErrorKind::ZeroTotal, "event has no samples in total");
    if (samples > total)
        throw Error(ErrorKind::InvalidArgument, "samples exceed the event total");
    return rounded_ratio(samples, total, 2, 100);
}

std::uint64_t event_count(std::uint64_t samples, std::uint64_t sample_after_value)
{
    return samples * sample_after_value;
}

Cpi cpi(std::uint64_t clock_events, std::uint64_t instruction_events)
{
    if (instruction_events == 0)
        throw Error(ErrorKind::ZeroInstructions, "no retired instructions to divide by");
    Cpi c;
    c.value = rounded_ratio(clock_events, instruction_events, 3, 1);
    c.suspect = clock_events > instruction_events;
    c.high = clock_events > 5 * instruction_events;
    return c;
}

std::optional<std::uint64_t> infer_sample_after_value(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& samples_events)
{
    std::optional<std::uint64_t> sav;
    for (auto [samples, events] : samples_events) {
        if (samples == 0 || events % samples != 0)
            return std::nullopt;
        std::uint64_t r = events / samples;
        if (sav && *sav != r)
            return std::nullopt;
        sav = r;
    }
    return sav;
}

SamplingRun parse_samples_file(std::string_view text, const std::string& file)
{
    SamplingRun run;
    bool have_meta = false;
    bool in_records = false;
    std::set<std::string> declared;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.substr(0, 2) == "//")
            continue;
        LineParser lp(file, line_no);
        auto f = split_tabs(line);
        if (!have_meta) {
            if (f[0] != "#meta")
                throw Error(ErrorKind::MissingMeta, "line " + std::to_string(line_no) + ": expected the #meta line",
                            SourceSpan{file, line_no, 1, line_no, 1});
            if (f.size() != 4)
                lp.fail("#meta needs duration_s, interval_s and processors");
            run.meta.duration_s = lp.positive_double(lp.keyed(f[1], "duration_s"), "duration_s");
            run.meta.interval_s = lp.positive_double(lp.keyed(f[2], "interval_s"), "interval_s");
            std::uint64_t procs = lp.unsigned_value(lp.keyed(f[3], "processors"), "processors");
            if (procs < 1 || procs > 1u << 20)
                lp.fail("processors must be at least 1");
            run.meta.n_processors = static_cast<int>(procs);
            have_meta = true;
            continue;
        }
        if (f[0] == "#event") {
            if (in_records)
                lp.fail("#event after the first record");
            if (f.size() != 4 || f[1].empty())
                lp.fail("#event needs a name, sav and role");
            EventSpec e;
            e.name = std::string(f[1]);
            e.sample_after_value = lp.unsigned_value(lp.keyed(f[2], "sav"), "sav");
            if (e.sample_after_value < 1)
                lp.fail("sav must be at least 1");
            std::string_view role = lp.keyed(f[3], "role");
            if (role == "clock")
                e.role = EventRole::Clock;
            else if (role == "instruction")
                e.role = EventRole::Instruction;
            else if (role == "other")
                e.role = EventRole::Other;
            else
                lp.fail("role must be clock, instruction or other");
            if (!declared.insert(e.name).second)
                lp.fail("event '" + e.name + "' declared twice");
            run.events.push_back(std::move(e));
            continue;
        }
        if (!f[0].empty() && f[0][0] == '#')
            lp.fail("unknown directive '" + std::string(f[0]) + "'");
        if (f.size() != 4)
            lp.fail("a record has 4 tab-separated fields");
        in_records = true;
        SampleRecord r;
        r.event = std::string(f[0]);
        if (!declared.count(r.event))
            throw Error(ErrorKind::UnknownEvent,
                        "line " + std::to_string(line_no) + ": event '" + r.event + "' is not declared",
                        SourceSpan{file, line_no, 1, line_no, 1});
        r.function = std::string(f[1]);
        if (r.function.empty())
            lp.fail("empty function name");
        r.location = std::string(f[2]);
        std::size_t colon = r.location.rfind(':');
        if (colon == std::string::npos || colon == 0 ||
            lp.unsigned_value(std::string_view(r.location).substr(colon + 1), "line number") < 1)
            lp.fail("location must be file:line");
        r.samples = lp.unsigned_value(f[3], "sample count");
        run.records.push_back(std::move(r));
    }
    if (!have_meta)
        throw Error(ErrorKind::MissingMeta, "no #meta line", SourceSpan{file, 1, 1, 1, 1});
    return run;
}

std::string render_samples_file(const SamplingRun& run)
{
    std::string out = "#meta\tduration_s=" + shortest(run.meta.duration_s) +
                      "\tinterval_s=" + shortest(run.meta.interval_s) +
                      "\tprocessors=" + std::to_string(run.meta.n_processors) + "\n";
    for (const auto& e : run.events)
        out += "#event\t" + e.name + "\tsav=" + std::to_string(e.sample_after_value) + "\trole=" +
               std::string(to_string(e.role)) + "\n";
    for (const auto& r : run.records)
        out += r.event + "\t" + r.function + "\t" + r.location + "\t" + std::to_string(r.samples) + "\n";
    return out;
}

HotspotTable hotspot_table(const SamplingRun& run, GroupBy group_by, std::optional<std::size_t> top)
{
    HotspotTable t;
    t.events = run.events;
    t.totals.assign(run.events.size(), 0);
    std::map<std::string, std::size_t> event_index;
    for (std::size_t i = 0; i < run.events.size(); ++i)
        event_index[run.events[i].name] = i;

    std::map<std::string, std::vector<std::uint64_t>> per_scope;
    for (const auto& r : run.records) {
        auto it = event_index.find(r.event);
        if (it == event_index.end())
            throw Error(ErrorKind::UnknownEvent, "event '" + r.event + "' is not declared");
        const std::string& scope = group_by == GroupBy::Function ? r.function : r.location;
        auto& counts = per_scope[scope];
        counts.resize(run.events.size(), 0);
        counts[it->second] += r.samples;
        t.totals[it->second] += r.samples;
    }

    std::optional<std::size_t> clock, instr;
    for (std::size_t i = 0; i < run.events.size(); ++i) {
        if (!clock && run.events[i].role == EventRole::Clock)
            clock = i;
        if (!instr && run.events[i].role == EventRole::Instruction)
            instr = i;
    }
    t.has_cpi = clock && instr;
    t.has_process_share = clock.has_value();
    if (clock)
        t.clock_total = t.totals[*clock];

    for (const auto& [scope, counts] : per_scope) {
        HotspotRow row;
        row.scope = scope;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            EventCell c;
            c.samples = counts[i];
            c.events = event_count(counts[i], run.events[i].sample_after_value);
            c.percent = t.totals[i] ? 100.0 * static_cast<double>(counts[i]) / static_cast<double>(t.totals[i]) : 0.0;
            row.cells.push_back(c);
        }
        if (t.has_cpi && row.cells[*instr].events > 0)
            row.cpi = cpi(row.cells[*clock].events, row.cells[*instr].events).value;
        if (clock && t.clock_total > 0)
            row.process_share = 100.0 * static_cast<double>(counts[*clock]) / static_cast<double>(t.clock_total);
        t.rows.push_back(std::move(row));
    }
    const std::size_t key = clock.value_or(0);
    std::stable_sort(t.rows.begin(), t.rows.end(), [&](const HotspotRow& a, const HotspotRow& b) {
        if (!a.cells.empty() && a.cells[key].samples != b.cells[key].samples)
            return a.cells[key].samples > b.cells[key].samples;
        return a.scope < b.scope;
    });
    if (top && t.rows.size() > *top)
        t.rows.resize(*top);
    return t;
}

std::string render_hotspot_table(const HotspotTable& table, bool tsv)
{
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{"scope"};
    for (const auto& e : table.events) {
        header.push_back(e.name + " samples");
        header.push_back(e.name + " %");
        header.push_back(e.name + " events");
    }
    if (table.has_cpi)
        header.push_back("CPI");
    if (table.has_process_share)
        header.push_back("process %");
    grid.push_back(header);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells{row.scope};
        for (std::size_t i = 0; i < row.cells.size(); ++i) {
            const auto& c = row.cells[i];
            cells.push_back(std::to_string(c.samples));
            cells.push_back(table.totals[i] ? fixed(event_percent(c.samples, table.totals[i]), 2) : "0.00");
            cells.push_back(std::to_string(c.events));
        }
        if (table.has_cpi)
            cells.push_back(row.cpi ? fixed(*row.cpi, 3) : "-");
        if (table.has_process_share) {
            const std::size_t ci = [&] {
                for (std::size_t i = 0; i < table.events.size(); ++i)
                    if (table.events[i].role == EventRole::Clock)
                        return i;
                return std::size_t{0};
            }();
            cells.push_back(table.clock_total ? fixed(event_percent(row.cells[ci].samples, table.clock_total), 2)
                                              : "-");
        }
        grid.push_back(std::move(cells));
    }
    std::string out;
    if (tsv) {
        for (const auto& r : grid) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out += (i ? "\t" : "") + r[i];
            out += "\n";
        }
        return out;
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : grid)
        for (std::size_t i = 0; i < r.size(); ++i)
            width[i] = std::max(width[i], r[i].size());
    for (const auto& r : grid) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i == 0)
                line += r[i] + std::string(width[i] - r[i].size(), ' ');
            else
                line += "  " + std::string(width[i] - r[i].size(), ' ') + r[i];
        }
        out += line + "\n";
    }
    return out;
}

} // namespace hcopt
