#include "heatplan/scenario/season.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace heatplan::scenario {

const char* series_name(Series s) {
    switch (s) {
        case Series::electric: return "electric_load";
        case Series::heat: return "heat_load";
        case Series::wind: return "wind_max";
        case Series::pv: return "pv_max";
    }
    return "?";
}

const std::vector<double>& SeasonDay::series(Series s) const {
    switch (s) {
        case Series::electric: return electric_load;
        case Series::heat: return heat_load;
        case Series::wind: return wind_max;
        case Series::pv: return pv_max;
    }
    throw std::logic_error("unknown series");
}

std::vector<double>& SeasonDay::series(Series s) {
    return const_cast<std::vector<double>&>(static_cast<const SeasonDay&>(*this).series(s));
}

void SeasonData::validate() const {
    if (days.empty()) throw std::invalid_argument("season has no days");
    for (std::size_t d = 0; d < days.size(); ++d) {
        for (Series s : kAllSeries) {
            const auto& v = days[d].series(s);
            if (v.size() != kHoursPerDay)
                throw std::invalid_argument("day " + days[d].date + ": " + series_name(s) + " has " +
                                            std::to_string(v.size()) + " samples, expected 24");
            for (double x : v)
                if (!std::isfinite(x) || x < 0.0)
                    throw std::invalid_argument("day " + days[d].date + ": " + series_name(s) +
                                                " has a negative or non-finite value");
        }
        if (days[d].month.empty()) throw std::invalid_argument("day " + std::to_string(d) + " has no month tag");
    }
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> SeasonData::months() const {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
    for (std::size_t d = 0; d < days.size(); ++d) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& m) { return m.first == days[d].month; });
        if (it == out.end()) {
            out.emplace_back(days[d].month, std::vector<std::size_t>{});
            it = std::prev(out.end());
        }
        it->second.push_back(d);
    }
    return out;
}

std::vector<dispatch::TypicalDay> SeasonData::as_days() const {
    std::vector<dispatch::TypicalDay> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back({d.electric_load, d.heat_load, d.wind_max, d.pv_max, 1.0});
    return out;
}

Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size());
    return m;
}

DayFeatures compute_features(const SeasonDay& day) {
    std::vector<double> net(day.electric_load.size());
    for (std::size_t t = 0; t < net.size(); ++t) net[t] = day.electric_load[t] - day.wind_max[t] - day.pv_max[t];
    const auto h = moments(day.heat_load);
    const auto n = moments(net);
    return {h.mean, h.var, n.mean, n.var};
}

std::vector<std::size_t> medoid_ranking(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("select_medoid needs at least one day");
    const std::size_t n = rows.size();
    const std::size_t k = rows.front().size();
    std::vector<std::vector<double>> z(n, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = rows[i][j];
        const auto m = moments(col);
        const double sd = std::sqrt(m.var);
        for (std::size_t i = 0; i < n; ++i) z[i][j] = sd > 0.0 ? (col[i] - m.mean) / sd : 0.0;
    }
    std::vector<double> sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t o = 0; o < n; ++o) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < k; ++j) d2 += (z[i][j] - z[o][j]) * (z[i][j] - z[o][j]);
            sums[i] += std::sqrt(d2);
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });
    return order;
}

std::size_t select_medoid(const std::vector<std::vector<double>>& rows) { return medoid_ranking(rows).front(); }

std::size_t select_medoid(const std::vector<DayFeatures>& features) {
    std::vector<std::vector<double>> rows;
    rows.reserve(features.size());
    for (const auto& f : features) rows.push_back({f.mean_heat, f.var_heat, f.mean_net, f.var_net});
    return select_medoid(rows);
}

namespace {

struct Lift {
    double lo{0.0};
    double range{1.0};
};

std::vector<double> transform(const std::vector<double>& curve, const Lift& lift, double a) {
    std::vector<double> out(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double u = 1.0 + (curve[i] - lift.lo) / lift.range;
        out[i] = lift.lo + (std::pow(u, a) - 1.0) * lift.range;
    }
    return out;
}

}  // namespace

Adjustment adjust_curve(const std::vector<double>& curve, double target_mean, double target_var) {
    if (curve.empty()) throw std::invalid_argument("adjust_curve needs a non-empty curve");
    if (!(target_var >= 0.0)) throw std::invalid_argument("target variance must be non-negative");
    const auto [lo_it, hi_it] = std::minmax_element(curve.begin(), curve.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    Adjustment out;
    if (range <= 0.0) {
        if (target_var > 1e-12 * std::max(1.0, target_mean * target_mean))
            throw std::domain_error("constant curve cannot reach a positive target variance");
        out.curve.assign(curve.size(), target_mean);
        out.b = target_mean - lo;
        return out;
    }
    const Lift lift{lo, range};
    auto var_at = [&](double a) { return moments(transform(curve, lift, a)).var; };

    // Variance of u^a on [1, 2] grows with a.
    double a_lo = 0.1, a_hi = 10.0;
    const double v_lo = var_at(a_lo), v_hi = var_at(a_hi);
    if (target_var < v_lo || target_var > v_hi) {
        std::ostringstream msg;
        msg << "no exponent in [0.1, 10] matches variance " << target_var << " (bracket variances " << v_lo << " at 0.1, "
            << v_hi << " at 10)";
        throw std::domain_error(msg.str());
    }
    const double current = moments(curve).var;
    if (std::abs(current - target_var) <= 1e-12 * std::max(1.0, target_var)) {
        a_lo = a_hi = 1.0;
    }
    while (a_hi - a_lo > 1e-10) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (var_at(mid) < target_var)
            a_lo = mid;
        else
            a_hi = mid;
    }
    out.a = 0.5 * (a_lo + a_hi);
    out.curve = transform(curve, lift, out.a);
    out.b = target_mean - moments(out.curve).mean;
    for (double& x : out.curve) x += out.b;
    return out;
}

namespace {

std::vector<double> pooled(const SeasonData& season, const std::vector<std::size_t>& idx, Series s) {
    std::vector<double> all;
    all.reserve(idx.size() * kHoursPerDay);
    for (std::size_t d : idx) {
        const auto& v = season.days[d].series(s);
        all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

}  // namespace

namespace {

struct Attempt {
    bool ok{false};
    Adjustment result;
    std::string warning;
};

// Loads must stay non-negative; RES profiles may dip below zero and are
// clipped by dispatch.
Attempt try_adjust(const std::vector<double>& source, const Moments& target, Series s) {
    Attempt at;
    try {
        at.result = adjust_curve(source, target.mean, target.var);
    } catch (const std::domain_error& e) {
        at.warning = e.what();
        return at;
    }
    const bool load = s == Series::electric || s == Series::heat;
    if (load && std::any_of(at.result.curve.begin(), at.result.curve.end(), [](double x) { return x < 0.0; })) {
        at.warning = "adjusted curve turns negative (b = " + std::to_string(at.result.b) + ")";
        return at;
    }
    at.ok = true;
    return at;
}

void set_series(dispatch::TypicalDay& day, Series s, std::vector<double> v) {
    switch (s) {
        case Series::electric: day.electric_load = std::move(v); break;
        case Series::heat: day.heat_load = std::move(v); break;
        case Series::wind: day.wind_max = std::move(v); break;
        case Series::pv: day.pv_max = std::move(v); break;
    }
}

}  // namespace

std::vector<TypicalScenario> generate_typical_scenarios(const SeasonData& season, const ScenarioOptions& options) {
    season.validate();
    std::vector<TypicalScenario> out;
    for (const auto& [month, idx] : season.months()) {
        TypicalScenario sc;
        sc.month = month;
        sc.day.weight = static_cast<double>(idx.size());
        std::array<Moments, 4> targets;
        for (Series s : kAllSeries) targets[static_cast<std::size_t>(s)] = moments(pooled(season, idx, s));

        std::vector<std::vector<double>> joint_rows;
        for (std::size_t d : idx) {
            const auto f = compute_features(season.days[d]);
            joint_rows.push_back({f.mean_heat, f.var_heat, f.mean_net, f.var_net});
        }
        const auto joint_rank = medoid_ranking(joint_rows);
        sc.medoid_index = joint_rank.front();
        sc.selected_index = sc.medoid_index;

        // Ranked candidate days per series; joint mode shares one ranking and
        // moves all four series together.
        std::array<std::vector<std::size_t>, 4> ranking;
        for (Series s : kAllSeries) {
            auto& r = ranking[static_cast<std::size_t>(s)];
            if (options.mode == SelectionMode::independent) {
                std::vector<std::vector<double>> rows;
                for (std::size_t d : idx) {
                    const auto m = moments(season.days[d].series(s));
                    rows.push_back({m.mean, m.var});
                }
                r = medoid_ranking(rows);
            } else {
                r = joint_rank;
            }
        }
        for (Series s : kAllSeries) {
            auto& adj = sc.series[static_cast<std::size_t>(s)];
            adj.source_index = ranking[static_cast<std::size_t>(s)].front();
            adj.target = targets[static_cast<std::size_t>(s)];
            set_series(sc.day, s, season.days[idx[adj.source_index]].series(s));
        }
        if (!options.adjust) {
            out.push_back(std::move(sc));
            continue;
        }

        auto accept = [&](Series s, std::size_t candidate, Attempt& at) {
            auto& adj = sc.series[static_cast<std::size_t>(s)];
            adj.source_index = candidate;
            adj.a = at.result.a;
            adj.b = at.result.b;
            adj.adjusted = true;
            set_series(sc.day, s, std::move(at.result.curve));
        };

        if (options.mode == SelectionMode::joint) {
            std::string first_failure;
            bool done = false;
            for (std::size_t rank = 0; rank < joint_rank.size() && !done; ++rank) {
                const std::size_t cand = joint_rank[rank];
                std::array<Attempt, 4> attempts;
                bool all = true;
                for (Series s : kAllSeries) {
                    auto& at = attempts[static_cast<std::size_t>(s)];
                    at = try_adjust(season.days[idx[cand]].series(s), targets[static_cast<std::size_t>(s)], s);
                    if (!at.ok) {
                        all = false;
                        if (rank == 0 && first_failure.empty()) first_failure = std::string(series_name(s)) + ": " + at.warning;
                        break;
                    }
                }
                if (!all) continue;
                for (Series s : kAllSeries) accept(s, cand, attempts[static_cast<std::size_t>(s)]);
                sc.selected_index = cand;
                if (rank > 0)
                    sc.warning = "medoid not adjustable (" + first_failure + "); used day ranked " + std::to_string(rank);
                done = true;
            }
            if (!done) {
                // No day adjusts cleanly: keep the medoid, adjusting what can be.
                sc.warning = "no day of the month adjusts cleanly (" + first_failure + ")";
                for (Series s : kAllSeries) {
                    auto at = try_adjust(season.days[idx[sc.medoid_index]].series(s), targets[static_cast<std::size_t>(s)], s);
                    if (at.ok)
                        accept(s, sc.medoid_index, at);
                    else
                        sc.series[static_cast<std::size_t>(s)].warning = at.warning + "; unadjusted day kept";
                }
            }
        } else {
            for (Series s : kAllSeries) {
                const auto& r = ranking[static_cast<std::size_t>(s)];
                bool done = false;
                std::string first_failure;
                for (std::size_t rank = 0; rank < r.size() && !done; ++rank) {
                    auto at = try_adjust(season.days[idx[r[rank]]].series(s), targets[static_cast<std::size_t>(s)], s);
                    if (!at.ok) {
                        if (rank == 0) first_failure = at.warning;
                        continue;
                    }
                    accept(s, r[rank], at);
                    if (rank > 0) sc.series[static_cast<std::size_t>(s)].warning = "medoid not adjustable (" + first_failure + ")";
                    done = true;
                }
                if (!done) sc.series[static_cast<std::size_t>(s)].warning = first_failure + "; unadjusted day kept";
            }
        }
        out.push_back(std::move(sc));
    }
    return out;
}

std::vector<dispatch::TypicalDay> typical_days(const std::vector<TypicalScenario>& scenarios) {
    std::vector<dispatch::TypicalDay> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(s.day);
    return out;
}

}  // namespace heatplan::scenario
