#include "gnmn/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gnmn {

namespace {

constexpr const char* kPopulationHeader = "region,total_population,migrated_population";
constexpr const char* kCasesHeader = "date,confirmed,recovered";

void strip_cr(std::string& line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

std::string read_header(std::istream& in)
{
    std::string header;
    if (!std::getline(in, header))
        return {};
    strip_cr(header);
    // tolerate a UTF-8 byte order mark
    if (header.rfind("\xEF\xBB\xBF", 0) == 0)
        header.erase(0, 3);
    return header;
}

std::int64_t parse_count(const std::string& cell, std::size_t line, const char* column)
{
    std::int64_t v = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc{} || ptr != last)
        throw NonNumericCellError("line " + std::to_string(line) + ": column " + column +
                                      " is not an integer: '" + cell + "'",
                                  line);
    return v;
}

double parse_real(const std::string& cell, std::size_t line, const char* column)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw NonNumericCellError("line " + std::to_string(line) + ": column " + column +
                                      " is not a number: '" + cell + "'",
                                  line);
    return v;
}

std::int64_t round_half_away(double x)
{
    return static_cast<std::int64_t>(std::llround(x));
}

} // namespace

void SampleSpec::validate() const
{
    if (!(z > 0.0))
        throw std::invalid_argument("sample spec: z must be > 0");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("sample spec: p must lie in (0, 1)");
    if (!(e > 0.0 && e < 1.0))
        throw std::invalid_argument("sample spec: e must lie in (0, 1)");
}

std::int64_t sample_size(std::int64_t population, const SampleSpec& spec)
{
    spec.validate();
    if (population < 1)
        throw std::invalid_argument("sample_size: population must be >= 1");
    const double n0 = spec.z * spec.z * spec.p * (1.0 - spec.p) / (spec.e * spec.e);
    const double n = n0 / (1.0 + n0 / static_cast<double>(population));
    return std::clamp<std::int64_t>(round_half_away(n), 1, population);
}

std::int64_t allocate_migrated_sample(const PopulationRecord& record)
{
    if (record.total <= 0 || record.migrated <= 0)
        return 0;
    const double share = static_cast<double>(record.migrated) / static_cast<double>(record.total);
    return round_half_away(static_cast<double>(record.sampled_total) * share);
}

void apply_sampling(std::vector<PopulationRecord>& records, const SampleSpec& spec)
{
    for (auto& rec : records) {
        rec.sampled_total = rec.total >= 1 ? sample_size(rec.total, spec) : 0;
        rec.sampled_migrated = allocate_migrated_sample(rec);
    }
}

std::vector<PopulationRecord> parse_population_csv(std::istream& in)
{
    if (in.peek() == std::char_traits<char>::eof())
        return {};
    const std::string header = read_header(in);
    if (header != kPopulationHeader)
        throw BadHeaderError(kPopulationHeader, header);

    std::vector<PopulationRecord> records;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty())
            continue;
        const auto cells = split_commas(line);
        if (cells.size() != 3)
            throw NonNumericCellError("line " + std::to_string(lineno) + ": expected 3 columns, got " +
                                          std::to_string(cells.size()),
                                      lineno);
        PopulationRecord rec;
        rec.region = cells[0];
        rec.total = parse_count(cells[1], lineno, "total_population");
        rec.migrated = parse_count(cells[2], lineno, "migrated_population");
        if (rec.total < 0 || rec.migrated < 0)
            throw InvariantViolationError("line " + std::to_string(lineno) + " (" + rec.region +
                                              "): negative population",
                                          lineno);
        if (rec.migrated > rec.total)
            throw InvariantViolationError("line " + std::to_string(lineno) + " (" + rec.region +
                                              "): migrated population exceeds total",
                                          lineno);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PopulationRecord> load_population_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MissingFileError(path);
    return parse_population_csv(in);
}

void write_population_csv(std::ostream& out, const std::vector<PopulationRecord>& records)
{
    out << kPopulationHeader << '\n';
    for (const auto& rec : records)
        out << rec.region << ',' << rec.total << ',' << rec.migrated << '\n';
}

void write_sample_report_json(std::ostream& out, const std::vector<PopulationRecord>& records,
                              const SampleSpec& spec)
{
    auto arr = nlohmann::json::array();
    for (const auto& rec : records) {
        arr.push_back({{"region", rec.region},
                       {"total", rec.total},
                       {"sampled_total", rec.sampled_total},
                       {"migrated", rec.migrated},
                       {"sampled_migrated", rec.sampled_migrated},
                       {"spec", {{"z", spec.z}, {"p", spec.p}, {"e", spec.e}}}});
    }
    out << arr.dump(2) << '\n';
}

std::chrono::year_month_day parse_iso_date(const std::string& text)
{
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
    const char* s = text.data();
    const bool parsed = shape && std::from_chars(s, s + 4, y).ptr == s + 4 &&
                        std::from_chars(s + 5, s + 7, m).ptr == s + 7 &&
                        std::from_chars(s + 8, s + 10, d).ptr == s + 10;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!parsed || !ymd.ok())
        throw std::invalid_argument("not an ISO-8601 date: '" + text + "'");
    return ymd;
}

std::string format_iso_date(std::chrono::year_month_day date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

CaseSeries parse_cases_csv(std::istream& in, std::string region)
{
    const std::string header = read_header(in);
    if (header != kCasesHeader)
        throw BadHeaderError(kCasesHeader, header);

    CaseSeries series;
    series.region = std::move(region);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty())
            continue;
        const auto cells = split_commas(line);
        if (cells.size() != 3)
            throw NonNumericCellError("line " + std::to_string(lineno) + ": expected 3 columns, got " +
                                          std::to_string(cells.size()),
                                      lineno);
        CaseEntry entry;
        try {
            entry.date = parse_iso_date(cells[0]);
        } catch (const std::invalid_argument& ex) {
            throw NonNumericCellError("line " + std::to_string(lineno) + ": " + ex.what(), lineno);
        }
        entry.confirmed = parse_real(cells[1], lineno, "confirmed");
        entry.recovered = parse_real(cells[2], lineno, "recovered");
        if (entry.confirmed < 0.0 || entry.recovered < 0.0)
            throw InvariantViolationError("line " + std::to_string(lineno) + ": negative count",
                                          lineno);
        if (!series.entries.empty() &&
            std::chrono::sys_days{entry.date} <= std::chrono::sys_days{series.entries.back().date})
            throw InvariantViolationError("line " + std::to_string(lineno) + ": date " + cells[0] +
                                              " does not follow the previous row",
                                          lineno);
        series.entries.push_back(entry);
    }
    return series;
}

CaseSeries load_cases_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MissingFileError(path);
    return parse_cases_csv(in, path.stem().string());
}

std::vector<RtPoint> empirical_rt(const CaseSeries& series, std::size_t window)
{
    if (window < 1)
        throw std::invalid_argument("empirical_rt: window must be >= 1");
    const auto& e = series.entries;
    if (e.size() < 2 * window)
        throw std::invalid_argument("empirical_rt: series shorter than two windows");

    std::vector<RtPoint> out;
    for (std::size_t d = window - 1; d + window < e.size(); ++d) {
        double before = 0.0;
        double after = 0.0;
        for (std::size_t k = d + 1 - window; k <= d; ++k)
            before += e[k].confirmed;
        for (std::size_t k = d + 1; k <= d + window; ++k)
            after += e[k].confirmed;
        if (before > 0.0)
            out.push_back({d, e[d].date, after / before});
    }
    return out;
}

} // namespace gnmn
