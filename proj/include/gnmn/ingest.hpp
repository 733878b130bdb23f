#ifndef GNMN_INGEST_HPP
#define GNMN_INGEST_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnmn {

// ---------------------------------------------------------------------------
// Errors. Every loader failure derives from IngestError; `line()` is the
// 1-based line of the offending row, or 0 when the file itself is at fault.
// ---------------------------------------------------------------------------

class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class MissingFileError : public IngestError {
public:
    explicit MissingFileError(const std::filesystem::path& path)
        : IngestError("cannot open " + path.string(), 0)
    {
    }
};

class BadHeaderError : public IngestError {
public:
    BadHeaderError(const std::string& expected, const std::string& found)
        : IngestError("bad header: expected '" + expected + "', found '" + found + "'", 1)
    {
    }
};

class NonNumericCellError : public IngestError {
public:
    using IngestError::IngestError;
};

class InvariantViolationError : public IngestError {
public:
    using IngestError::IngestError;
};

// ---------------------------------------------------------------------------
// Population and sampling
// ---------------------------------------------------------------------------

struct PopulationRecord {
    std::string region;
    std::int64_t total = 0;
    std::int64_t migrated = 0;
    std::int64_t sampled_total = 0;
    std::int64_t sampled_migrated = 0;

    friend bool operator==(const PopulationRecord&, const PopulationRecord&) = default;
};

/// Inputs of the finite-population sample-size formula.
/// Defaults: 99% confidence, p = 3%, e = 0.5%, giving n = 7724 for any
/// population in the hundreds of millions.
struct SampleSpec {
    double z = 2.576;
    double p = 0.03;
    double e = 0.005;

    void validate() const;
};

/// n = [z^2 p (1-p) / e^2] / [1 + z^2 p (1-p) / (e^2 N)], rounded half away
/// from zero and clamped to [1, N].
std::int64_t sample_size(std::int64_t population, const SampleSpec& spec);

/// round(sampled_total * migrated / total)
std::int64_t allocate_migrated_sample(const PopulationRecord& record);

/// Fills sampled_total and sampled_migrated for every record.
void apply_sampling(std::vector<PopulationRecord>& records, const SampleSpec& spec);

std::vector<PopulationRecord> load_population_csv(const std::filesystem::path& path);
std::vector<PopulationRecord> parse_population_csv(std::istream& in);
void write_population_csv(std::ostream& out, const std::vector<PopulationRecord>& records);

void write_sample_report_json(std::ostream& out, const std::vector<PopulationRecord>& records,
                              const SampleSpec& spec);

// ---------------------------------------------------------------------------
// Case series
// ---------------------------------------------------------------------------

struct CaseEntry {
    std::chrono::year_month_day date;
    double confirmed = 0.0;
    double recovered = 0.0;
};

struct CaseSeries {
    std::string region;
    std::vector<CaseEntry> entries; // strictly increasing dates, one row per day
};

std::chrono::year_month_day parse_iso_date(const std::string& text);
std::string format_iso_date(std::chrono::year_month_day date);

/// The region name defaults to the file stem.
CaseSeries load_cases_csv(const std::filesystem::path& path);
CaseSeries parse_cases_csv(std::istream& in, std::string region);

struct RtPoint {
    std::size_t day = 0; // index into the series
    std::chrono::year_month_day date;
    double value = 0.0;
};

/// Ratio of confirmed cases in (d, d+window] to those in (d-window, d]. Days
/// where either window is incomplete or the denominator is zero are omitted.
std::vector<RtPoint> empirical_rt(const CaseSeries& series, std::size_t window);

} // namespace gnmn

#endif // GNMN_INGEST_HPP
