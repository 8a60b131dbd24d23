#include "lendfair/market_data.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "lendfair/csv.hpp"

namespace lendfair {

namespace {

[[noreturn]] void fail(std::filesystem::path const& file, std::size_t line, std::string const& what)
{
    throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string const& text, std::filesystem::path const& file, std::size_t line,
                    std::string const& column)
{
    double value = 0.0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value))
        fail(file, line, "column " + column + ": '" + text + "' is not a finite number");
    return value;
}

bool is_month_label(std::string const& s)
{
    if (s.size() != 7 || s[4] != '-')
        return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6})
    {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    }
    int const month = (s[5] - '0') * 10 + (s[6] - '0');
    return month >= 1 && month <= 12;
}

}  // namespace

std::vector<MonthlyRecord> load_monthly_csv(std::filesystem::path const& file)
{
    std::ifstream in{file};
    if (!in)
        throw std::runtime_error("cannot open monthly data file " + file.string());

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos)
        {
            header = split_csv_line(line);
            break;
        }
    }
    if (header.empty())
        fail(file, line_no, "missing header row");

    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        if (!col.emplace(header[i], i).second)
            fail(file, line_no, "duplicate column '" + header[i] + "'");
    }
    for (char const* required : {"month", "risk_free", "volatility"})
    {
        if (!col.contains(required))
            fail(file, line_no, std::string{"missing required column '"} + required + "'");
    }
    auto const observed_col = col.contains("observed_rate")
                                  ? std::optional<std::size_t>{col.at("observed_rate")}
                                  : std::nullopt;

    std::vector<MonthlyRecord> records;
    std::set<std::string> seen;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        auto const fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail(file, line_no, "expected " + std::to_string(header.size()) + " fields, found "
                                    + std::to_string(fields.size()));
        MonthlyRecord rec;
        rec.month = fields[col.at("month")];
        if (!is_month_label(rec.month))
            fail(file, line_no, "month '" + rec.month + "' is not of the form YYYY-MM");
        if (!seen.insert(rec.month).second)
            fail(file, line_no, "duplicate month '" + rec.month + "'");
        rec.risk_free = parse_number(fields[col.at("risk_free")], file, line_no, "risk_free");
        rec.volatility = parse_number(fields[col.at("volatility")], file, line_no, "volatility");
        if (!(rec.volatility > 0.0))
            fail(file, line_no, "volatility must be positive");
        if (observed_col && !fields[*observed_col].empty())
            rec.observed_rate =
                parse_number(fields[*observed_col], file, line_no, "observed_rate");
        records.push_back(std::move(rec));
    }
    return records;
}

ComparisonReport compare_rates(std::vector<MonthlyRecord> const& records, RateSolver const& solver,
                               double s0)
{
    if (records.size() < 3)
        throw std::invalid_argument("comparison needs at least 3 months");

    ComparisonReport report;
    for (auto const& rec : records)
    {
        MarketParams const market{s0, rec.risk_free, rec.volatility};
        MonthResult m{rec, {}};
        try
        {
            m.solution = solver(market);
        }
        catch (std::invalid_argument const& e)
        {
            m.solution = RateSolution{false, 0.0, e.what()};
        }
        report.months.push_back(std::move(m));
    }

    std::vector<double> model, rf, vol;
    std::vector<double> paired_model, paired_observed, paired_rf, paired_vol;
    for (auto const& m : report.months)
    {
        if (!m.solution.found)
            continue;
        model.push_back(m.solution.alpha);
        rf.push_back(m.record.risk_free);
        vol.push_back(m.record.volatility);
        if (m.record.observed_rate)
        {
            paired_model.push_back(m.solution.alpha);
            paired_observed.push_back(*m.record.observed_rate);
            paired_rf.push_back(m.record.risk_free);
            paired_vol.push_back(m.record.volatility);
        }
    }
    report.n_used = model.size();
    report.n_paired = paired_model.size();

    auto add_fit = [&](std::string series, std::string regressor, std::vector<double> const& x,
                       std::vector<double> const& y) {
        // a constant regressor carries no information; skip rather than fail the batch
        if (x.size() < 2)
            return;
        try
        {
            report.regressions.push_back({std::move(series), std::move(regressor), linreg(x, y)});
        }
        catch (std::invalid_argument const&)
        {
        }
    };
    add_fit("model_rate", "risk_free", rf, model);
    add_fit("model_rate", "volatility", vol, model);
    add_fit("observed_rate", "risk_free", paired_rf, paired_observed);
    add_fit("observed_rate", "volatility", paired_vol, paired_observed);

    if (report.n_paired >= 3)
    {
        try
        {
            double const r = pearson(paired_model, paired_observed);
            report.pearson_r = r;
            report.p_value = p_value_two_sided(r, static_cast<int>(report.n_paired));
        }
        catch (std::invalid_argument const&)
        {
        }
    }
    return report;
}

ComparisonReport compare_rates(std::vector<MonthlyRecord> const& records, double c, double c0,
                               double beta, BorrowerBehavior const& behavior,
                               SimConfig const& config, FairRateOptions const& options, double s0)
{
    RateSolver solver = [&](MarketParams const& market) {
        auto const res = solve_fair_rate(market, c, c0, beta, behavior, config, options);
        return RateSolution{res.found, res.alpha, res.diagnostic};
    };
    return compare_rates(records, solver, s0);
}

void write_rates_csv(std::filesystem::path const& file, ComparisonReport const& report)
{
    std::ofstream out{file};
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << "month,risk_free,volatility,observed_rate,model_rate,status\n";
    for (auto const& m : report.months)
    {
        out << m.record.month << ',' << format_sig10(m.record.risk_free) << ','
            << format_sig10(m.record.volatility) << ',';
        if (m.record.observed_rate)
            out << format_sig10(*m.record.observed_rate);
        out << ',';
        if (m.solution.found)
            out << format_sig10(m.solution.alpha);
        out << ',' << (m.solution.found ? "ok" : "no_solution") << '\n';
    }
}

void write_stats_csv(std::filesystem::path const& file, ComparisonReport const& report)
{
    std::ofstream out{file};
    if (!out)
        throw std::runtime_error("cannot open " + file.string() + " for writing");
    out << "metric,value\n";
    out << "n_months," << report.months.size() << '\n';
    out << "n_used," << report.n_used << '\n';
    out << "n_paired," << report.n_paired << '\n';
    if (report.pearson_r)
        out << "pearson_r," << format_sig10(*report.pearson_r) << '\n';
    if (report.p_value)
        out << "p_value," << format_sig10(*report.p_value) << '\n';
    for (auto const& f : report.regressions)
    {
        std::string const stem = f.series + "_vs_" + f.regressor;
        out << stem << "_slope," << format_sig10(f.fit.slope) << '\n';
        out << stem << "_intercept," << format_sig10(f.fit.intercept) << '\n';
        out << stem << "_r_squared," << format_sig10(f.fit.r_squared) << '\n';
    }
}

}  // namespace lendfair
