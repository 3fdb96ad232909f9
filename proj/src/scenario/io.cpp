#include "heatplan/scenario/io.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace heatplan::scenario {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t line, const std::string& column) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc() || r.ptr != last)
        throw std::runtime_error("line " + std::to_string(line) + ": column " + column + " is not a number: '" + s + "'");
    return v;
}

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

}  // namespace

SeasonData read_season_csv(std::istream& in) {
    static const std::array<std::string, 5> kColumns{"timestamp", "electric_load_mw", "heat_load_mw", "wind_mw", "pv_mw"};
    SeasonData season;
    std::string line;
    std::size_t line_no = 0;
    std::array<int, 5> where{-1, -1, -1, -1, -1};
    bool header = false;
    SeasonDay* current = nullptr;
    int expected_hour = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (t.find("synthetic") != std::string::npos) season.synthetic = true;
            continue;
        }
        const auto cells = split(t);
        if (!header) {
            for (std::size_t c = 0; c < cells.size(); ++c)
                for (std::size_t k = 0; k < kColumns.size(); ++k)
                    if (cells[c] == kColumns[k]) where[k] = static_cast<int>(c);
            for (std::size_t k = 0; k < kColumns.size(); ++k)
                if (where[k] < 0) bad_line(line_no, "missing column " + kColumns[k]);
            header = true;
            continue;
        }
        for (int w : where)
            if (static_cast<std::size_t>(w) >= cells.size()) bad_line(line_no, "too few columns");
        const auto& stamp = cells[static_cast<std::size_t>(where[0])];
        if (stamp.size() < 13 || (stamp[10] != ' ' && stamp[10] != 'T') || stamp[4] != '-' || stamp[7] != '-')
            bad_line(line_no, "timestamp must look like YYYY-MM-DD HH:MM, got '" + stamp + "'");
        const std::string date = stamp.substr(0, 10);
        int hour = -1;
        const auto hr = std::from_chars(stamp.data() + 11, stamp.data() + 13, hour);
        if (hr.ec != std::errc() || hour < 0 || hour > 23) bad_line(line_no, "bad hour in '" + stamp + "'");

        if (current == nullptr || current->date != date) {
            if (current != nullptr && expected_hour != 24)
                bad_line(line_no, "day " + current->date + " has " + std::to_string(expected_hour) + " hours");
            season.days.emplace_back();
            current = &season.days.back();
            current->date = date;
            current->month = date.substr(0, 7);
            expected_hour = 0;
        }
        if (hour != expected_hour)
            bad_line(line_no, "expected hour " + std::to_string(expected_hour) + " of " + date + ", got " +
                                  std::to_string(hour));
        ++expected_hour;
        const std::array<Series, 4> order{Series::electric, Series::heat, Series::wind, Series::pv};
        for (std::size_t k = 0; k < 4; ++k) {
            const double v = parse_number(cells[static_cast<std::size_t>(where[k + 1])], line_no, kColumns[k + 1]);
            if (v < 0.0) bad_line(line_no, kColumns[k + 1] + " is negative");
            current->series(order[k]).push_back(v);
        }
    }
    if (!header) throw std::runtime_error("season file has no header");
    if (current != nullptr && expected_hour != 24)
        throw std::runtime_error("last day " + current->date + " has " + std::to_string(expected_hour) + " hours");
    season.validate();
    return season;
}

SeasonData read_season_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open season file " + path);
    return read_season_csv(in);
}

void write_season_csv(std::ostream& out, const SeasonData& season) {
    if (season.synthetic) out << "# synthetic season data\n";
    out << "timestamp,electric_load_mw,heat_load_mw,wind_mw,pv_mw\n";
    out << std::setprecision(17);
    for (const auto& d : season.days) {
        for (std::size_t h = 0; h < d.electric_load.size(); ++h) {
            out << d.date << ' ' << std::setw(2) << std::setfill('0') << h << ":00" << std::setfill(' ') << ','
                << d.electric_load[h] << ',' << d.heat_load[h] << ',' << d.wind_max[h] << ',' << d.pv_max[h] << '\n';
        }
    }
}

std::string bundle_to_json(const std::vector<TypicalScenario>& scenarios, bool synthetic) {
    json doc;
    doc["format"] = "heatplan-typical-days";
    doc["version"] = 1;
    doc["synthetic"] = synthetic;
    json arr = json::array();
    for (const auto& sc : scenarios) {
        json j;
        j["month"] = sc.month;
        j["weight"] = sc.day.weight;
        j["medoid_index"] = sc.medoid_index;
        j["selected_index"] = sc.selected_index;
        if (!sc.warning.empty()) j["warning"] = sc.warning;
        json series = json::object();
        for (Series s : kAllSeries) {
            const auto& adj = sc.series[static_cast<std::size_t>(s)];
            const std::vector<double>* values = nullptr;
            switch (s) {
                case Series::electric: values = &sc.day.electric_load; break;
                case Series::heat: values = &sc.day.heat_load; break;
                case Series::wind: values = &sc.day.wind_max; break;
                case Series::pv: values = &sc.day.pv_max; break;
            }
            json e;
            e["values"] = *values;
            e["source_index"] = adj.source_index;
            e["a"] = adj.a;
            e["b"] = adj.b;
            e["adjusted"] = adj.adjusted;
            e["target_mean"] = adj.target.mean;
            e["target_var"] = adj.target.var;
            if (!adj.warning.empty()) e["warning"] = adj.warning;
            series[series_name(s)] = e;
        }
        j["series"] = series;
        arr.push_back(j);
    }
    doc["days"] = arr;
    return doc.dump(2);
}

std::vector<TypicalScenario> bundle_from_json(const std::string& text, bool* synthetic) {
    const json doc = json::parse(text);
    if (doc.value("format", std::string{}) != "heatplan-typical-days")
        throw std::runtime_error("not a typical-day bundle (format field missing or wrong)");
    if (synthetic) *synthetic = doc.value("synthetic", false);
    std::vector<TypicalScenario> out;
    for (const auto& j : doc.at("days")) {
        TypicalScenario sc;
        sc.month = j.at("month").get<std::string>();
        sc.day.weight = j.at("weight").get<double>();
        sc.medoid_index = j.value("medoid_index", std::size_t{0});
        sc.selected_index = j.value("selected_index", sc.medoid_index);
        sc.warning = j.value("warning", std::string{});
        for (Series s : kAllSeries) {
            const auto& e = j.at("series").at(series_name(s));
            auto values = e.at("values").get<std::vector<double>>();
            auto& adj = sc.series[static_cast<std::size_t>(s)];
            adj.source_index = e.value("source_index", sc.medoid_index);
            adj.a = e.value("a", 1.0);
            adj.b = e.value("b", 0.0);
            adj.adjusted = e.value("adjusted", false);
            adj.target = {e.value("target_mean", 0.0), e.value("target_var", 0.0)};
            adj.warning = e.value("warning", std::string{});
            switch (s) {
                case Series::electric: sc.day.electric_load = std::move(values); break;
                case Series::heat: sc.day.heat_load = std::move(values); break;
                case Series::wind: sc.day.wind_max = std::move(values); break;
                case Series::pv: sc.day.pv_max = std::move(values); break;
            }
        }
        sc.day.validate();
        out.push_back(std::move(sc));
    }
    if (out.empty()) throw std::runtime_error("bundle contains no typical days");
    return out;
}

}  // namespace heatplan::scenario
