#include "nbf/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <stdexcept>
#include <thread>

#include "nbf/intervals.hpp"
#include "nbf/ranks.hpp"

namespace nbf {

namespace {

constexpr double kSolverTolerance = 1e-8;

// Category index (1..J) of a latent value: half-open intervals, top closed.
int likert_category(const LikertSpec& spec, double y) {
    const auto it = std::upper_bound(spec.cutoffs.begin(), spec.cutoffs.end(), y);
    auto idx = static_cast<long>(it - spec.cutoffs.begin()) - 1;
    idx = std::clamp<long>(idx, 0, spec.categories - 1);
    return static_cast<int>(idx) + 1;
}

std::pair<double, double> likert_params(const LikertSpec& spec, int group) {
    if (group != 1 && group != 2) {
        throw std::invalid_argument("likert: group must be 1 or 2");
    }
    return group == 1 ? std::pair{spec.alpha1, spec.beta1} : std::pair{spec.alpha2, spec.beta2};
}

// Monotone-increasing scalar solve; brackets and the final fit are both
// checked at runtime so an unattainable target fails loudly.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double target, const char* what) {
    if (!(target > 0.0 && target < 1.0)) {
        throw std::domain_error(std::string(what) + ": target effect must lie in (0,1)");
    }
    if (target < f(lo) - kSolverTolerance || target > f(hi) + kSolverTolerance) {
        throw std::domain_error(std::string(what) + ": target effect outside the attainable range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket exhausted in floating point
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double x = 0.5 * (lo + hi);
    if (std::fabs(f(x) - target) > kSolverTolerance) {
        throw std::domain_error(std::string(what) + ": no parameter reaches the target effect");
    }
    return x;
}

GroupModel model_from(const Distribution& dist) {
    GroupModel m;
    m.is_likert = false;
    m.dist = dist;
    m.name = dist.name();
    return m;
}

GroupModel model_from_likert(const LikertSpec& spec, int group) {
    validate(spec);
    GroupModel m;
    m.is_likert = true;
    m.likert = spec;
    m.likert_group = group;
    const auto [a, b] = likert_params(spec, group);
    m.name = "likert" + std::to_string(spec.categories) + "(" + Distribution::beta(a, b).name() +
             ")";
    return m;
}

std::uint64_t study_index(Study study) {
    switch (study) {
        case Study::Type1:
            return 1;
        case Study::Power:
            return 2;
        case Study::Coverage:
            return 3;
    }
    return 0;
}

// Replication streams hang off a per-cell seed; the target effect is kept out
// of the chain so power/coverage curves share replication noise across the
// effect grid.
std::uint64_t cell_seed_for(const SimConfig& config, int n1, int n2) {
    std::uint64_t s = derive_seed(config.master_seed, study_index(config.study));
    s = derive_seed(s, static_cast<std::uint64_t>(config.setting_id));
    s = derive_seed(s, static_cast<std::uint64_t>(n1));
    return derive_seed(s, static_cast<std::uint64_t>(n2));
}

std::vector<Method> selected_methods(const SimConfig& config) {
    std::vector<Method> methods;
    if (config.run_bm) methods.push_back(Method::BM);
    if (config.run_perm) methods.push_back(Method::Perm);
    if (config.run_c2) methods.push_back(Method::C2);
    return methods;
}

void validate_common(const SimConfig& config) {
    if (config.n_iter < 1) {
        throw std::invalid_argument("simulation: n_iter must be at least 1");
    }
    if (config.run_perm && config.n_p < 1) {
        throw std::invalid_argument("simulation: n_p must be at least 1");
    }
    if (config.alphas.empty()) {
        throw std::invalid_argument("simulation: at least one alpha level is required");
    }
    for (double a : config.alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("simulation: alpha must lie in (0,1)");
        }
    }
    if (config.threads < 1) {
        throw std::invalid_argument("simulation: threads must be at least 1");
    }
}

void validate_sizes(const std::vector<std::pair<int, int>>& sizes) {
    for (const auto& [n1, n2] : sizes) {
        if (n1 < 2 || n2 < 2) {
            throw std::invalid_argument("simulation: group sizes must be at least 2");
        }
    }
}

struct CellTally {
    std::vector<long> hits;        // [method][alpha]: rejections or coverings
    std::vector<long> degenerate;  // [method]: replications on a fallback path
};

// One Monte Carlo cell. Without `true_theta` the tally counts rejections;
// with it, each method's compatible interval is built and coverage counted.
CellTally run_cell(const GroupModel& m1, const GroupModel& m2, int n1, int n2,
                   const std::vector<Method>& methods, const SimConfig& config,
                   std::uint64_t cell_seed, std::optional<double> true_theta) {
    const std::size_t n_m = methods.size();
    const std::size_t n_a = config.alphas.size();
    const int threads =
        static_cast<int>(std::min<long>(std::max(1, config.threads), config.n_iter));
    std::vector<CellTally> parts(
        static_cast<std::size_t>(threads),
        CellTally{std::vector<long>(n_m * n_a, 0), std::vector<long>(n_m, 0)});
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

    auto worker = [&](int t, long lo, long hi) {
        try {
            CellTally& tally = parts[static_cast<std::size_t>(t)];
            std::vector<double> x1, x2;
            for (long rep = lo; rep < hi; ++rep) {
                const std::uint64_t rep_seed =
                    derive_seed(cell_seed, static_cast<std::uint64_t>(rep) + 1);
                RngStream g1(rep_seed, 1);
                RngStream g2(rep_seed, 2);
                m1.draw(n1, g1, x1);
                m2.draw(n2, g2, x2);
                const SortedPool pool = pool_and_sort(x1, x2);
                const EffectEstimate est =
                    estimate_from_aggregates(aggregate_sorted(pool.values, pool.labels));

                PermutationDistribution pd;
                bool have_pd = false;
                for (std::size_t mi = 0; mi < n_m; ++mi) {
                    const Method method = methods[mi];
                    if (method == Method::Perm && !have_pd) {
                        pd = permutation_distribution(pool, config.n_p, derive_seed(rep_seed, 3));
                        have_pd = true;
                    }
                    bool used_fallback = false;
                    for (std::size_t ai = 0; ai < n_a; ++ai) {
                        const double alpha = config.alphas[ai];
                        bool hit = false;
                        Fallback fb = Fallback::None;
                        if (!true_theta) {
                            if (method == Method::BM) {
                                const TestResult r = brunner_munzel_from(est, alpha);
                                hit = r.reject;
                                fb = r.fallback;
                            } else if (method == Method::Perm) {
                                hit = pd.base.p_value < alpha;
                                fb = pd.base.fallback;
                            } else {
                                const TestResult r = c2_from(est, alpha);
                                hit = r.reject;
                                fb = r.fallback;
                            }
                        } else {
                            TestResult r;
                            if (method == Method::BM) {
                                r = brunner_munzel_from(est, alpha);
                            } else if (method == Method::Perm) {
                                r = pd.at(alpha);
                            } else {
                                r = c2_from(est, alpha);
                            }
                            fb = r.fallback;
                            const ConfidenceInterval ci = compatible_interval(r, est);
                            hit = ci.lower <= *true_theta && *true_theta <= ci.upper;
                        }
                        if (hit) ++tally.hits[mi * n_a + ai];
                        if (fb != Fallback::None) used_fallback = true;
                    }
                    if (used_fallback) ++tally.degenerate[mi];
                }
            }
        } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
    };

    if (threads == 1) {
        worker(0, 0, config.n_iter);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        const long chunk = (config.n_iter + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long lo = static_cast<long>(t) * chunk;
            const long hi = std::min<long>(config.n_iter, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    CellTally total{std::vector<long>(n_m * n_a, 0), std::vector<long>(n_m, 0)};
    for (const auto& part : parts) {
        for (std::size_t i = 0; i < total.hits.size(); ++i) total.hits[i] += part.hits[i];
        for (std::size_t i = 0; i < n_m; ++i) total.degenerate[i] += part.degenerate[i];
    }
    return total;
}

void append_cells(SimReport& report, const SimConfig& config, const GroupModel& m1,
                  const GroupModel& m2, int n1, int n2, std::uint64_t cell_seed,
                  const std::vector<Method>& methods, const CellTally& tally,
                  std::optional<double> target_theta, bool coverage) {
    const std::size_t n_a = config.alphas.size();
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        for (std::size_t ai = 0; ai < n_a; ++ai) {
            SimCell cell;
            cell.study = config.study;
            cell.setting_id = config.setting_id;
            cell.dist1 = m1.name;
            cell.dist2 = m2.name;
            cell.n1 = n1;
            cell.n2 = n2;
            cell.alpha = config.alphas[ai];
            cell.method = methods[mi];
            const double rate = static_cast<double>(tally.hits[mi * n_a + ai]) /
                                static_cast<double>(config.n_iter);
            cell.rate = rate;
            cell.se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(config.n_iter));
            cell.n_iter = config.n_iter;
            cell.n_degenerate = tally.degenerate[mi];
            cell.seed = cell_seed;
            cell.target_theta = target_theta;
            if (coverage) {
                cell.bradley_violation =
                    rate < 1.0 - 1.5 * cell.alpha || rate > 1.0 - 0.5 * cell.alpha;
            }
            report.cells.push_back(std::move(cell));
        }
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> effect_grid(const SimConfig& config, bool coverage) {
    std::vector<double> thetas = config.target_thetas;
    if (thetas.empty()) {
        thetas = coverage ? std::vector<double>{0.5, 0.55, 0.6, 0.65, 0.7,
                                                0.75, 0.8, 0.85, 0.9, 0.95}
                          : std::vector<double>{0.45, 0.5, 0.55, 0.6, 0.65,
                                                0.7, 0.75, 0.8, 0.85, 0.9};
    }
    const double hi = coverage ? 0.95 : 0.9;
    for (double t : thetas) {
        if (!(t >= 0.45 && t <= hi)) {
            throw std::domain_error(coverage
                                        ? "coverage target effects must lie in [0.45, 0.95]"
                                        : "power target effects must lie in [0.45, 0.9]");
        }
    }
    return thetas;
}

SimReport run_effect_study(const SimConfig& config, bool coverage) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_common(config);
    if (config.setting_id < 1 || config.setting_id > 4) {
        throw std::invalid_argument("power/coverage setting_id must be in 1..4");
    }
    const std::vector<double> thetas = effect_grid(config, coverage);
    const auto sizes = config.sizes.empty() ? default_power_grid() : config.sizes;
    validate_sizes(sizes);
    const auto methods = selected_methods(config);

    SimReport report;
    if (!methods.empty()) {
        for (double theta : thetas) {
            const auto models = power_models(config.setting_id, theta);
            for (const auto& [n1, n2] : sizes) {
                const std::uint64_t cell_seed = cell_seed_for(config, n1, n2);
                const CellTally tally =
                    run_cell(models.first, models.second, n1, n2, methods, config, cell_seed,
                             coverage ? std::optional<double>(theta) : std::nullopt);
                append_cells(report, config, models.first, models.second, n1, n2, cell_seed,
                             methods, tally, theta, coverage);
            }
        }
    }
    report.elapsed_seconds = seconds_since(t0);
    return report;
}

}  // namespace

LikertSpec LikertSpec::equal_width(int J, double a1, double b1, double a2, double b2) {
    LikertSpec spec;
    spec.categories = J;
    spec.cutoffs.resize(static_cast<std::size_t>(J) + 1);
    for (int j = 0; j <= J; ++j) {
        spec.cutoffs[static_cast<std::size_t>(j)] = static_cast<double>(j) / J;
    }
    spec.alpha1 = a1;
    spec.beta1 = b1;
    spec.alpha2 = a2;
    spec.beta2 = b2;
    return spec;
}

void validate(const LikertSpec& spec) {
    if (spec.categories < 1) {
        throw std::invalid_argument("likert: at least one category is required");
    }
    if (spec.cutoffs.size() != static_cast<std::size_t>(spec.categories) + 1) {
        throw std::invalid_argument("likert: expected categories+1 cutoffs");
    }
    if (spec.cutoffs.front() != 0.0 || spec.cutoffs.back() != 1.0) {
        throw std::invalid_argument("likert: cutoffs must start at 0 and end at 1");
    }
    for (std::size_t j = 1; j < spec.cutoffs.size(); ++j) {
        if (!(spec.cutoffs[j - 1] < spec.cutoffs[j])) {
            throw std::invalid_argument("likert: cutoffs must be strictly increasing");
        }
    }
    if (!(spec.alpha1 > 0.0 && spec.beta1 > 0.0 && spec.alpha2 > 0.0 && spec.beta2 > 0.0)) {
        throw std::invalid_argument("likert: Beta parameters must be positive");
    }
}

std::vector<double> likert_category_probs(const LikertSpec& spec, int group) {
    validate(spec);
    const auto [a, b] = likert_params(spec, group);
    std::vector<double> probs(static_cast<std::size_t>(spec.categories));
    double prev = 0.0;
    for (int j = 0; j < spec.categories; ++j) {
        const double cur =
            (j == spec.categories - 1)
                ? 1.0
                : beta_cdf(spec.cutoffs[static_cast<std::size_t>(j) + 1], a, b);
        probs[static_cast<std::size_t>(j)] = std::max(0.0, cur - prev);
        prev = cur;
    }
    return probs;
}

std::vector<double> likert_draw(const LikertSpec& spec, int group, int n, RngStream& g) {
    validate(spec);
    if (n < 1) {
        throw std::invalid_argument("likert_draw: n must be at least 1");
    }
    const auto [a, b] = likert_params(spec, group);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) {
        v = static_cast<double>(likert_category(spec, draw_beta(g, a, b)));
    }
    return out;
}

Sample likert_sample(const LikertSpec& spec, int group, int n, RngStream& g) {
    return Sample{likert_draw(spec, group, n, g), group == 1 ? "group1" : "group2"};
}

double likert_theta(const LikertSpec& spec) {
    const auto p1 = likert_category_probs(spec, 1);
    const auto p2 = likert_category_probs(spec, 2);
    double theta = 0.0;
    double cum1 = 0.0;  // P(X1 in a strictly lower category)
    for (int j = 0; j < spec.categories; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        theta += p2[idx] * (cum1 + 0.5 * p1[idx]);
        cum1 += p1[idx];
    }
    return theta;
}

double solve_normal_shift(double var1, double var2, double target_theta) {
    if (!(var1 > 0.0) || !(var2 > 0.0)) {
        throw std::invalid_argument("solve_normal_shift: variances must be positive");
    }
    const double s = std::sqrt(var1 + var2);
    return bisect_increasing([s](double mu) { return normal_cdf(mu / s); }, -12.0 * s, 12.0 * s,
                             target_theta, "solve_normal_shift");
}

double solve_likert_shape(double target_theta) {
    LikertSpec spec = LikertSpec::equal_width(5, 1.0, 1.0, 1.0, 1.0);
    return bisect_increasing(
        [&spec](double a) {
            spec.alpha2 = a;
            return likert_theta(spec);
        },
        0.01, 100.0, target_theta, "solve_likert_shape");
}

double solve_exponential_rate(double target_theta) {
    return bisect_increasing([](double lambda) { return lambda / (lambda + 1.0); }, 1e-8, 1e8,
                             target_theta, "solve_exponential_rate");
}

void GroupModel::draw(int n, RngStream& g, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(n));
    if (is_likert) {
        const auto [a, b] = likert_params(likert, likert_group);
        for (auto& v : out) {
            v = static_cast<double>(likert_category(likert, draw_beta(g, a, b)));
        }
    } else {
        for (auto& v : out) {
            v = dist.draw(g);
        }
    }
}

std::pair<GroupModel, GroupModel> type1_models(int setting_id) {
    switch (setting_id) {
        case 1:
            return {model_from(Distribution::normal(0.0, 1.0)),
                    model_from(Distribution::normal(0.0, 1.0))};
        case 2:
            return {model_from(Distribution::normal(0.0, 1.0)),
                    model_from(Distribution::normal(0.0, 9.0))};
        case 3:
            return {model_from(Distribution::beta(1.0, 1.0)),
                    model_from(Distribution::beta(1.0, 1.0))};
        case 4:
            return {model_from(Distribution::beta(1.0, 1.0)),
                    model_from(Distribution::beta(5.0, 5.0))};
        case 5:
            return {model_from(Distribution::beta(2.0, 5.0)),
                    model_from(Distribution::beta(2.0, 5.0))};
        case 6:
            return {model_from(Distribution::beta(5.0, 5.0)),
                    model_from(Distribution::beta(1.0, 1.0))};
        case 7: {
            const LikertSpec spec = LikertSpec::equal_width(5, 1.0, 1.0, 1.0, 1.0);
            return {model_from_likert(spec, 1), model_from_likert(spec, 2)};
        }
        case 8: {
            const LikertSpec spec = LikertSpec::equal_width(5, 1.0, 1.0, 5.0, 5.0);
            return {model_from_likert(spec, 1), model_from_likert(spec, 2)};
        }
        case 9: {
            const LikertSpec spec = LikertSpec::equal_width(5, 2.0, 5.0, 2.0, 5.0);
            return {model_from_likert(spec, 1), model_from_likert(spec, 2)};
        }
        case 10: {
            const LikertSpec spec = LikertSpec::equal_width(5, 5.0, 5.0, 2.0, 2.0);
            return {model_from_likert(spec, 1), model_from_likert(spec, 2)};
        }
        case 11:
            return {model_from(Distribution::poisson(1.0)),
                    model_from(Distribution::poisson(1.0))};
        case 12:
            return {model_from(Distribution::exponential(1.0)),
                    model_from(Distribution::exponential(1.0))};
        case 13:
            return {model_from(Distribution::laplace(0.0, 1.0)),
                    model_from(Distribution::laplace(0.0, 1.0))};
        case 14:
            return {model_from(Distribution::laplace(0.0, 1.0)),
                    model_from(Distribution::laplace(0.0, 3.0))};
        default:
            throw std::invalid_argument("type1 setting_id must be in 1..14");
    }
}

std::pair<GroupModel, GroupModel> power_models(int setting_id, double target_theta) {
    switch (setting_id) {
        case 1: {
            const double mu = solve_normal_shift(1.0, 1.0, target_theta);
            return {model_from(Distribution::normal(0.0, 1.0)),
                    model_from(Distribution::normal(mu, 1.0))};
        }
        case 2: {
            const double mu = solve_normal_shift(9.0, 1.0, target_theta);
            return {model_from(Distribution::normal(0.0, 9.0)),
                    model_from(Distribution::normal(mu, 1.0))};
        }
        case 3: {
            const double a = solve_likert_shape(target_theta);
            const LikertSpec spec = LikertSpec::equal_width(5, 1.0, 1.0, a, 1.0);
            return {model_from_likert(spec, 1), model_from_likert(spec, 2)};
        }
        case 4: {
            const double lambda = solve_exponential_rate(target_theta);
            return {model_from(Distribution::exponential(lambda)),
                    model_from(Distribution::exponential(1.0))};
        }
        default:
            throw std::invalid_argument("power/coverage setting_id must be in 1..4");
    }
}

std::vector<std::pair<int, int>> default_type1_grid() {
    return {{15, 15}, {30, 30}, {45, 45}, {60, 60}, {75, 75},
            {15, 30}, {20, 40}, {30, 60}, {40, 80}, {50, 100},
            {30, 15}, {40, 20}, {60, 30}, {80, 40}, {100, 50}};
}

std::vector<std::pair<int, int>> default_power_grid() {
    return {{15, 15}, {15, 30}, {30, 15}};
}

SimReport run_type1(const SimConfig& config_in) {
    SimConfig config = config_in;
    config.study = Study::Type1;
    const auto t0 = std::chrono::steady_clock::now();
    validate_common(config);
    if (config.setting_id < 1 || config.setting_id > 14) {
        throw std::invalid_argument("type1 setting_id must be in 1..14");
    }
    const auto models = type1_models(config.setting_id);
    const auto sizes = config.sizes.empty() ? default_type1_grid() : config.sizes;
    validate_sizes(sizes);
    const auto methods = selected_methods(config);

    SimReport report;
    if (!methods.empty()) {
        for (const auto& [n1, n2] : sizes) {
            const std::uint64_t cell_seed = cell_seed_for(config, n1, n2);
            const CellTally tally = run_cell(models.first, models.second, n1, n2, methods, config,
                                             cell_seed, std::nullopt);
            append_cells(report, config, models.first, models.second, n1, n2, cell_seed, methods,
                         tally, std::nullopt, false);
        }
    }
    report.elapsed_seconds = seconds_since(t0);
    return report;
}

SimReport run_power(const SimConfig& config_in) {
    SimConfig config = config_in;
    config.study = Study::Power;
    return run_effect_study(config, false);
}

SimReport run_coverage(const SimConfig& config_in) {
    SimConfig config = config_in;
    config.study = Study::Coverage;
    return run_effect_study(config, true);
}

SimReport run_study(const SimConfig& config) {
    switch (config.study) {
        case Study::Type1:
            return run_type1(config);
        case Study::Power:
            return run_power(config);
        case Study::Coverage:
            return run_coverage(config);
    }
    throw std::invalid_argument("unknown study");
}

std::string study_name(Study study) {
    switch (study) {
        case Study::Type1:
            return "type1";
        case Study::Power:
            return "power";
        case Study::Coverage:
            return "coverage";
    }
    return "unknown";
}

}  // namespace nbf
