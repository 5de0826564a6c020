#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/group_by.hpp"

namespace hcopt {

struct SamplingMeta {
    double duration_s = 0;
    double interval_s = 0;
    int n_processors = 1;

    bool operator==(const SamplingMeta&) const = default;
};

enum class EventRole { Clock, Instruction, Other };

std::string_view to_string(EventRole r);

struct EventSpec {
    std::string name;
    std::uint64_t sample_after_value = 1;
    EventRole role = EventRole::Other;

    bool operator==(const EventSpec&) const = default;
};

struct SampleRecord {
    std::string event;
    std::string function;
    std::string location; // file:line
    std::uint64_t samples = 0;

    bool operator==(const SampleRecord&) const = default;
};

struct SamplingRun {
    SamplingMeta meta;
    std::vector<EventSpec> events;
    std::vector<SampleRecord> records;

    bool operator==(const SamplingRun&) const = default;
};

/// duration x processors / interval, rounded to the nearest integer.
std::uint64_t expected_samples(const SamplingMeta& meta);

/// samples / total x 100, rounded half-up to 2 decimals.
double event_percent(std::uint64_t samples, std::uint64_t total);

std::uint64_t event_count(std::uint64_t samples, std::uint64_t sample_after_value);

struct Cpi {
    double value = 0; // rounded to 3 decimals
    bool suspect = false; // above 1
    bool high = false;    // above 5
};

Cpi cpi(std::uint64_t clock_events, std::uint64_t instruction_events);

/// The single events/samples ratio shared by every pair, if there is one.
std::optional<std::uint64_t> infer_sample_after_value(
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& samples_events);

SamplingRun parse_samples_file(std::string_view text, const std::string& file = "<samples>");
std::string render_samples_file(const SamplingRun& run);

struct EventCell {
    std::uint64_t samples = 0;
    double percent = 0; // unrounded
    std::uint64_t events = 0;
};

struct HotspotRow {
    std::string scope;
    std::vector<EventCell> cells; // one per declared event, in declaration order
    std::optional<double> cpi;    // rounded to 3 decimals
    std::optional<double> process_share; // unrounded percent of clock samples
};

struct HotspotTable {
    std::vector<EventSpec> events;
    std::vector<std::uint64_t> totals; // per event, over the full run
    std::uint64_t clock_total = 0;
    bool has_cpi = false;
    bool has_process_share = false;
    std::vector<HotspotRow> rows;
};

HotspotTable hotspot_table(const SamplingRun& run, GroupBy group_by, std::optional<std::size_t> top = std::nullopt);

/// Columns: scope, per event (samples, %, events), CPI, process %.
std::string render_hotspot_table(const HotspotTable& table, bool tsv);

} // namespace hcopt
