#ifndef REACHEST_IO_HPP
#define REACHEST_IO_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "defect/profile.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "geom/point.hpp"

namespace reachest {

/// Plain decimal (never exponent) with 17 significant digits, so it round-trips.
inline std::string format_decimal(double v)
{
    if (!std::isfinite(v))
        throw InputError("cannot format a non-finite value");
    if (v == 0.0)
        return "0.0";
    const int e = static_cast<int>(std::floor(std::log10(std::abs(v))));
    const int precision = std::max(1, 16 - e);
    std::array<char, 512> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
    if (res.ec != std::errc())
        throw InputError("value too large to format");
    std::string s(buf.data(), res.ptr);
    // drop trailing zeros but keep one decimal
    const auto dot = s.find('.');
    if (dot != std::string::npos)
    {
        auto last = s.find_last_not_of('0');
        if (last == dot)
            ++last;
        s.erase(last + 1);
    }
    return s;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view field, std::size_t line)
{
    field = trim(field);
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw InputError("line " + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
    if (!std::isfinite(v))
        throw InputError("line " + std::to_string(line) + ": non-finite value");
    return v;
}

inline std::vector<double> parse_row(std::string_view row, std::size_t line)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (true)
    {
        const auto comma = row.find(',', start);
        out.push_back(parse_number(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start), line));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

} // namespace detail

/**
 * Reads a cloud: one point per line, comma-separated coordinates. Lines
 * starting with '#' and blank lines are skipped. Errors name the line.
 */
inline PointCloud read_cloud_csv(std::istream& in)
{
    std::vector<double> flat;
    std::size_t dim = 0;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        const auto row = detail::trim(line);
        if (row.empty() || row.front() == '#')
            continue;
        const auto values = detail::parse_row(row, number);
        if (dim == 0)
            dim = values.size();
        else if (values.size() != dim)
            throw InputError("line " + std::to_string(number) + ": expected " + std::to_string(dim) +
                             " columns, found " + std::to_string(values.size()));
        flat.insert(flat.end(), values.begin(), values.end());
    }
    if (dim == 0)
        throw InputError("cloud file has no data rows");
    return PointCloud(std::move(flat), dim);
}

/// Writes a cloud, with each metadata entry on its own '#' line first.
inline void write_cloud_csv(std::ostream& out, const PointCloud& cloud, const std::vector<std::string>& metadata = {})
{
    for (const auto& m : metadata)
        out << "# " << m << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i)
    {
        const auto p = cloud[i];
        for (std::size_t k = 0; k < p.size(); ++k)
            out << (k ? "," : "") << format_decimal(p[k]);
        out << '\n';
    }
}

/// Writes a profile as CSV with header `t,h`.
inline void write_profile_csv(std::ostream& out, const DefectProfile& profile)
{
    out << "t,h\n";
    for (std::size_t i = 0; i < profile.size(); ++i)
        out << format_decimal(profile.scales()[i]) << ',' << format_decimal(profile.values()[i]) << '\n';
}

/// Reads a `t,h` profile CSV back (order defaults to 2).
inline DefectProfile read_profile_csv(std::istream& in, int order = 2)
{
    std::vector<double> t, h;
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line))
    {
        ++number;
        const auto row = detail::trim(line);
        if (row.empty() || row.front() == '#')
            continue;
        if (!header)
        {
            if (row != "t,h")
                throw InputError("line " + std::to_string(number) + ": expected header 't,h'");
            header = true;
            continue;
        }
        const auto values = detail::parse_row(row, number);
        if (values.size() != 2)
            throw InputError("line " + std::to_string(number) + ": expected 2 columns");
        t.push_back(values[0]);
        h.push_back(values[1]);
    }
    if (t.empty())
        throw InputError("profile file has no data rows");
    return DefectProfile(std::move(t), std::move(h), order);
}

/// Flat JSON object with the estimate's fields.
inline nlohmann::json to_json(const ReachEstimate& e)
{
    return nlohmann::json{{"r_hat", e.r_hat},
                          {"r_local", e.r_local},
                          {"r_wfs", e.r_wfs},
                          {"epsilon_used", e.epsilon_used},
                          {"delta_used", e.delta_used},
                          {"branch", to_string(e.branch)},
                          {"n_points", e.n_points},
                          {"dim", e.dim},
                          {"order", e.order}};
}

} // namespace reachest

#endif
