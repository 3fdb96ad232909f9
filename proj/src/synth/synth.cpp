#include "heatplan/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace heatplan::synth {

namespace {

struct Date {
    int y, m, d;
};

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_days(int y, int m) {
    static constexpr int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && leap(y) ? 29 : len[m - 1];
}

Date parse_date(const std::string& s) {
    Date d{};
    char tail = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &d.y, &d.m, &d.d, &tail) != 3 || d.m < 1 || d.m > 12 || d.d < 1 ||
        d.d > month_days(d.y, d.m))
        throw std::invalid_argument("bad start date '" + s + "', expected YYYY-MM-DD");
    return d;
}

void advance(Date& d) {
    if (++d.d > month_days(d.y, d.m)) {
        d.d = 1;
        if (++d.m > 12) d.m = 1, ++d.y;
    }
}

// 0 = Monday, Zeller-style.
int weekday(const Date& dt) {
    int y = dt.y, m = dt.m;
    if (m < 3) m += 12, --y;
    const int k = y % 100, j = y / 100;
    const int h = (dt.d + 13 * (m + 1) / 5 + k + k / 4 + j / 4 + 5 * j) % 7;  // 0 = Saturday
    return (h + 5) % 7;
}

std::string format_date(const Date& d, bool with_day) {
    char buf[32];
    if (with_day)
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.y, d.m, d.d);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02d", d.y, d.m);
    return buf;
}

double bump(double h, double centre, double width) {
    const double z = (h - centre) / width;
    return std::exp(-0.5 * z * z);
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

void SynthSpec::validate() const {
    if (days < 28) throw std::invalid_argument("synthetic season needs at least 28 days");
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
    };
    positive(peak_electric_mw, "peak electric load");
    positive(peak_heat_mw, "peak heat load");
    auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be non-negative");
    };
    non_negative(wind_capacity_mw, "wind capacity");
    non_negative(pv_capacity_mw, "PV capacity");
    for (double v : {load_noise, heat_noise, temperature_noise, wind_volatility, cloud_noise, seasonal_swing,
                     diurnal_swing, morning_peak, evening_peak, heat_at_zero_c, heat_per_degree})
        non_negative(v, "shape and noise parameters");
    positive(base_level, "base level");
    positive(weekend_factor, "weekend factor");
    if (wind_mean < 0.0 || wind_mean > 1.0) throw std::invalid_argument("wind mean must be a fraction of capacity");
    if (!(sunrise_hour >= 0.0 && sunrise_hour < sunset_hour && sunset_hour <= 24.0))
        throw std::invalid_argument("sunrise must precede sunset within the day");
    (void)parse_date(start_date);
}

std::vector<double> season_temperature(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed * 4 + 1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(spec.days) * 24);
    double anomaly = 0.0;
    for (int d = 0; d < spec.days; ++d) {
        // AR(1) day-to-day weather anomaly with stationary std temperature_noise.
        anomaly = 0.7 * anomaly + std::sqrt(1.0 - 0.49) * spec.temperature_noise * g(rng);
        const double season = spec.mean_temperature - spec.seasonal_swing * std::sin(kPi * (d + 0.5) / spec.days);
        for (int h = 0; h < 24; ++h)
            out.push_back(season + anomaly - spec.diurnal_swing * std::cos(2.0 * kPi * (h - 15) / 24.0));
    }
    return out;
}

scenario::SeasonData generate_season(const SynthSpec& spec) {
    spec.validate();
    const auto temp = season_temperature(spec);
    std::mt19937_64 rng(spec.seed * 4 + 2);
    std::normal_distribution<double> g(0.0, 1.0);

    scenario::SeasonData season;
    season.synthetic = true;
    Date date = parse_date(spec.start_date);
    double wind = spec.wind_mean;
    for (int d = 0; d < spec.days; ++d, advance(date)) {
        scenario::SeasonDay day;
        day.date = format_date(date, true);
        day.month = format_date(date, false);
        const bool weekend = weekday(date) >= 5;
        const double cloud = std::clamp(1.0 - spec.cloud_noise * std::abs(g(rng)), 0.1, 1.0);
        for (int h = 0; h < 24; ++h) {
            const double hour = h + 0.5;
            double e = spec.base_level + spec.morning_peak * bump(hour, 8.5, 1.8) + spec.evening_peak * bump(hour, 18.5, 2.2);
            if (weekend) e *= spec.weekend_factor;
            e *= 1.0 + spec.load_noise * g(rng);
            day.electric_load.push_back(std::clamp(e * spec.peak_electric_mw, 0.0, spec.peak_electric_mw));

            const double t = temp[static_cast<std::size_t>(d) * 24 + static_cast<std::size_t>(h)];
            double q = spec.heat_at_zero_c + spec.heat_per_degree * (-t);
            q *= 1.0 + spec.heat_noise * g(rng);
            day.heat_load.push_back(std::clamp(q * spec.peak_heat_mw, 0.0, spec.peak_heat_mw));

            // Mean-reverting wind factor, kept inside [0, 1].
            wind = std::clamp(wind + 0.15 * (spec.wind_mean - wind) + spec.wind_volatility * g(rng), 0.0, 1.0);
            day.wind_max.push_back(wind * spec.wind_capacity_mw);

            double pv = 0.0;
            if (hour > spec.sunrise_hour && hour < spec.sunset_hour)
                pv = std::sin(kPi * (hour - spec.sunrise_hour) / (spec.sunset_hour - spec.sunrise_hour)) * cloud;
            day.pv_max.push_back(std::clamp(pv * spec.pv_capacity_mw, 0.0, spec.pv_capacity_mw));
        }
        season.days.push_back(std::move(day));
    }
    season.validate();
    return season;
}

Scale parse_scale(const std::string& s) {
    if (s == "small") return Scale::small;
    if (s == "large") return Scale::large;
    throw std::invalid_argument("system scale must be 'small' or 'large', got '" + s + "'");
}

std::string to_string(Scale s) { return s == Scale::small ? "small" : "large"; }

namespace {

dispatch::ChpGenerator chp_one() {
    dispatch::ChpGenerator c;
    c.name = "chp1";
    c.cost = {1.03, 32.74, 14.62, 0.58, 22.56, 0.15};
    c.c_vcd = 0.045;
    c.c_m = 0.75;
    c.c_cab = 0.15;
    c.p_min = 10.0;
    c.p_max = 60.0;
    c.h_min = 0.0;
    c.h_max = 50.0;
    c.ramp = 25.0;
    return c;
}

dispatch::ChpGenerator chp_two() {
    dispatch::ChpGenerator c;
    c.name = "chp2";
    c.cost = {1.09, 38.80, 18.82, 0.61, 24.10, 0.16};
    c.c_vcd = 0.03;
    c.c_m = 0.72;
    c.c_cab = 0.2;
    c.p_min = 10.0;
    c.p_max = 60.0;
    c.h_min = 0.0;
    c.h_max = 45.0;
    c.ramp = 25.0;
    return c;
}

dispatch::ThermalGenerator thermal_one() {
    dispatch::ThermalGenerator g;
    g.name = "g1";
    g.cost = {2.44, 35.64, 11.54};
    g.p_min = 5.0;
    g.p_max = 70.0;
    g.ramp = 30.0;
    return g;
}

}  // namespace

SynthSpec season_spec(Scale scale, std::uint64_t seed) {
    SynthSpec s;
    s.seed = seed;
    if (scale == Scale::large) {
        // Roughly 28x the small case: 85 units instead of 3.
        s.peak_electric_mw = 3600.0;
        s.peak_heat_mw = 2200.0;
        s.wind_capacity_mw = 1700.0;
        s.pv_capacity_mw = 560.0;
    }
    return s;
}

dispatch::SystemConfig generate_system(Scale scale, std::uint64_t seed) {
    dispatch::SystemConfig cfg;
    cfg.network = {0.02, 1, 0.0, 30.0};
    if (scale == Scale::small) {
        cfg.chp = {chp_one(), chp_two()};
        cfg.thermal = {thermal_one()};
        const auto s = season_spec(scale);
        cfg.wind_capacity = s.wind_capacity_mw;
        cfg.pv_capacity = s.pv_capacity_mw;
        cfg.limits = {{40.0}, {10.0}, {200.0}, {100.0}};
        cfg.validate();
        return cfg;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    auto jitter = [&](double v) { return v * (1.0 + u(rng)); };
    for (int i = 0; i < 53; ++i) {
        auto c = (i % 2 == 0) ? chp_one() : chp_two();
        c.name = "chp" + std::to_string(i + 1);
        for (double& k : c.cost) k = jitter(k);
        c.c_vcd = jitter(c.c_vcd);
        c.c_m = jitter(c.c_m);
        c.c_cab = jitter(c.c_cab);
        cfg.chp.push_back(c);
    }
    for (int i = 0; i < 32; ++i) {
        auto g = thermal_one();
        g.name = "g" + std::to_string(i + 1);
        for (double& k : g.cost) k = jitter(k);
        cfg.thermal.push_back(g);
    }
    const auto s = season_spec(scale);
    cfg.wind_capacity = s.wind_capacity_mw;
    cfg.pv_capacity = s.pv_capacity_mw;
    cfg.network = {0.02, 1, 0.0, 800.0};
    cfg.limits = {{400.0, 400.0, 400.0}, {100.0, 100.0, 100.0}, {2000.0, 2000.0, 2000.0}, {1000.0, 1000.0, 1000.0}};
    cfg.validate();
    return cfg;
}

}  // namespace heatplan::synth
