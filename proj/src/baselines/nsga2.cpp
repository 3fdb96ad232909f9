#include "heatplan/baselines/nsga2.hpp"

#include "heatplan/moo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace heatplan::baselines {

using moo::Point2;

void Nsga2Config::validate() const {
    if (population < 4 || population % 2 != 0) throw std::invalid_argument("NSGA-II population must be even and at least 4");
    if (generations < 1) throw std::invalid_argument("NSGA-II needs at least one generation");
    if (crossover_prob < 0.0 || crossover_prob > 1.0) throw std::invalid_argument("crossover probability must be in [0, 1]");
    if (mutation_prob < 0.0 || mutation_prob > 1.0) throw std::invalid_argument("mutation probability must be in [0, 1]");
    if (!(crossover_eta >= 0.0) || !(mutation_eta >= 0.0)) throw std::invalid_argument("distribution indices must be non-negative");
}

std::vector<Point2> Nsga2Result::observed_points() const {
    std::vector<Point2> out;
    for (const auto& o : evaluations) out.push_back(o.y);
    return out;
}

std::vector<Point2> RandomSearchResult::observed_points() const {
    std::vector<Point2> out;
    for (const auto& o : evaluations) out.push_back(o.y);
    return out;
}

std::vector<int> nondominated_ranks(const std::vector<Point2>& pts) {
    const std::size_t n = pts.size();
    std::vector<int> rank(n, 0), count(n, 0);
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (moo::dominates(pts[i], pts[j]))
                dominated[i].push_back(j);
            else if (moo::dominates(pts[j], pts[i]))
                ++count[i];
        }
        if (count[i] == 0) current.push_back(i);
    }
    int r = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            rank[i] = r;
            for (std::size_t j : dominated[i])
                if (--count[j] == 0) next.push_back(j);
        }
        current = std::move(next);
        ++r;
    }
    return rank;
}

std::vector<double> crowding_distance(const std::vector<Point2>& front) {
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
        return d;
    }
    std::vector<std::size_t> idx(n);
    for (int k = 0; k < 2; ++k) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
        const double span = front[idx.back()][k] - front[idx.front()][k];
        d[idx.front()] = d[idx.back()] = std::numeric_limits<double>::infinity();
        if (span <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) d[idx[i]] += (front[idx[i + 1]][k] - front[idx[i - 1]][k]) / span;
    }
    return d;
}

namespace {

// Rank and crowding for a pool, then truncation to `keep` members.
std::vector<Individual> select(std::vector<Individual> pool, std::size_t keep) {
    std::vector<Point2> pts;
    for (const auto& ind : pool) pts.push_back(ind.y);
    const auto ranks = nondominated_ranks(pts);
    const int max_rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
    for (int r = 0; r <= max_rank; ++r) {
        std::vector<std::size_t> members;
        std::vector<Point2> fp;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (ranks[i] == r) members.push_back(i), fp.push_back(pool[i].y);
        const auto cd = crowding_distance(fp);
        for (std::size_t m = 0; m < members.size(); ++m) {
            pool[members[m]].rank = r;
            pool[members[m]].crowding = cd[m];
        }
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.crowding > b.crowding;
    });
    if (pool.size() > keep) pool.resize(keep);
    return pool;
}

bool better(const Individual& a, const Individual& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.crowding > b.crowding;
}

// Bounded simulated binary crossover on one coordinate.
void sbx(double& c1, double& c2, double lo, double hi, double eta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (std::abs(c1 - c2) < 1e-14) return;
    const double y1 = std::min(c1, c2), y2 = std::max(c1, c2);
    const double r = u(rng);
    auto child = [&](double beta_edge) {
        const double alpha = 2.0 - std::pow(beta_edge, -(eta + 1.0));
        const double betaq = r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                                              : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
        return betaq;
    };
    const double b1 = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    const double b2 = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    double n1 = 0.5 * ((y1 + y2) - child(b1) * (y2 - y1));
    double n2 = 0.5 * ((y1 + y2) + child(b2) * (y2 - y1));
    n1 = std::clamp(n1, lo, hi);
    n2 = std::clamp(n2, lo, hi);
    if (u(rng) < 0.5) std::swap(n1, n2);
    c1 = n1;
    c2 = n2;
}

void polynomial_mutation(double& x, double lo, double hi, double eta, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double span = hi - lo;
    const double d1 = (x - lo) / span, d2 = (hi - x) / span;
    const double r = u(rng);
    const double pw = 1.0 / (eta + 1.0);
    double dq;
    if (r < 0.5) {
        const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
        dq = std::pow(v, pw) - 1.0;
    } else {
        const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
        dq = 1.0 - std::pow(v, pw);
    }
    x = std::clamp(x + dq * span, lo, hi);
}

}  // namespace

Nsga2Result nsga2_run(const moo::Evaluator& evaluate, const gp::InputScaler& bounds, const Nsga2Config& cfg) {
    cfg.validate();
    const auto d = static_cast<Eigen::Index>(bounds.dims());
    const auto n = static_cast<std::size_t>(cfg.population);
    const double pm = cfg.mutation_prob > 0.0 ? cfg.mutation_prob : 1.0 / static_cast<double>(d);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    Nsga2Result res;
    auto evaluate_batch = [&](std::vector<Individual>& batch, int generation) {
        for (auto& ind : batch) {
            ind.evaluation = res.evaluations.size();
            res.evaluations.push_back(moo::evaluate_observation(evaluate, ind.x, generation));
        }
        moo::assign_penalties(res.evaluations);
        if (std::all_of(res.evaluations.begin(), res.evaluations.end(), [](const auto& o) { return o.failed; }))
            throw std::runtime_error("every NSGA-II evaluation failed: " + res.evaluations.front().error);
        for (auto& ind : batch) ind.y = res.evaluations[ind.evaluation].y;
    };

    std::vector<Individual> pop(n);
    for (auto& ind : pop) {
        ind.x.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) ind.x(i) = bounds.lower(i) + u(rng) * (bounds.upper(i) - bounds.lower(i));
    }
    evaluate_batch(pop, 0);
    pop = select(std::move(pop), n);
    auto record_front = [&]() {
        std::vector<Point2> pts;
        for (const auto& ind : pop) pts.push_back(ind.y);
        res.generation_fronts.push_back(moo::pareto_points(pts));
    };
    record_front();

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    auto tournament = [&]() -> const Individual& {
        const auto& a = pop[pick(rng)];
        const auto& b = pop[pick(rng)];
        return better(b, a) ? b : a;
    };
    for (int g = 1; g < cfg.generations; ++g) {
        std::vector<Individual> offspring;
        while (offspring.size() < n) {
            Individual c1 = tournament(), c2 = tournament();
            if (u(rng) < cfg.crossover_prob) {
                for (Eigen::Index i = 0; i < d; ++i)
                    if (u(rng) < 0.5) sbx(c1.x(i), c2.x(i), bounds.lower(i), bounds.upper(i), cfg.crossover_eta, rng);
            }
            for (auto* c : {&c1, &c2})
                for (Eigen::Index i = 0; i < d; ++i)
                    if (u(rng) < pm) polynomial_mutation(c->x(i), bounds.lower(i), bounds.upper(i), cfg.mutation_eta, rng);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        }
        evaluate_batch(offspring, g);
        std::vector<Individual> pool = pop;
        pool.insert(pool.end(), offspring.begin(), offspring.end());
        pop = select(std::move(pool), n);
        record_front();
    }
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (pop[i].rank == 0) res.front.push_back(i);
    res.population = std::move(pop);
    return res;
}

RandomSearchResult random_search(const moo::Evaluator& evaluate, const gp::InputScaler& bounds, int budget,
                                 std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("random search budget must be at least 1");
    const auto d = static_cast<int>(bounds.dims());
    const gp::Matrix pts = bounds.from_unit(moo::scrambled_halton(budget, d, seed));
    RandomSearchResult res;
    for (int i = 0; i < budget; ++i) res.evaluations.push_back(moo::evaluate_observation(evaluate, pts.row(i).transpose(), 0));
    moo::assign_penalties(res.evaluations);
    std::vector<Point2> ys;
    for (const auto& o : res.evaluations) ys.push_back(o.y);
    res.front = moo::pareto_filter(ys);
    return res;
}

}  // namespace heatplan::baselines
