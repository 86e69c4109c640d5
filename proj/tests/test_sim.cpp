#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nbf/distributions.hpp"
#include "nbf/rng.hpp"
#include "nbf/sim.hpp"

using doctest::Approx;
using namespace nbf;

// ---------------------------------------------------------------------------
// Ordinal model
// ---------------------------------------------------------------------------

TEST_CASE("LikertSpec: equal-width cutoffs and validation") {
    const auto spec = LikertSpec::equal_width(5, 1.0, 1.0, 2.0, 3.0);
    REQUIRE(spec.cutoffs.size() == 6);
    CHECK(spec.cutoffs.front() == 0.0);
    CHECK(spec.cutoffs.back() == 1.0);
    CHECK(spec.cutoffs[1] == Approx(0.2).epsilon(1e-15));
    CHECK_NOTHROW(validate(spec));

    LikertSpec bad = spec;
    bad.cutoffs[2] = bad.cutoffs[1];
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = spec;
    bad.cutoffs.back() = 0.9;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = spec;
    bad.alpha2 = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = spec;
    bad.cutoffs.pop_back();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("likert_category_probs: uniform latent variable spreads evenly") {
    const auto spec = LikertSpec::equal_width(5, 1.0, 1.0, 5.0, 5.0);
    const auto p1 = likert_category_probs(spec, 1);
    REQUIRE(p1.size() == 5);
    for (double p : p1) CHECK(p == Approx(0.2).epsilon(1e-12));

    const auto p2 = likert_category_probs(spec, 2);
    double total = 0.0;
    for (double p : p2) {
        CHECK(p >= 0.0);
        total += p;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));
    // A symmetric hump concentrates in the middle category.
    CHECK(p2[2] == *std::max_element(p2.begin(), p2.end()));
    CHECK_THROWS_AS(likert_category_probs(spec, 3), std::invalid_argument);
}

TEST_CASE("likert_draw: values live on the category grid with the right rates") {
    const auto spec = LikertSpec::equal_width(5, 1.0, 1.0, 5.0, 5.0);
    RngStream g(2718);
    const int n = 100000;
    const auto draws = likert_draw(spec, 1, n, g);
    REQUIRE(draws.size() == static_cast<std::size_t>(n));
    std::array<int, 5> counts{};
    for (double v : draws) {
        REQUIRE(v >= 1.0);
        REQUIRE(v <= 5.0);
        REQUIRE(v == std::floor(v));
        ++counts[static_cast<int>(v) - 1];
    }
    for (int c : counts) {
        CHECK(std::fabs(static_cast<double>(c) / n - 0.2) < 0.006);
    }
    // Hump-shaped group: the middle category dominates.
    std::array<int, 5> counts2{};
    for (double v : likert_draw(spec, 2, n, g)) ++counts2[static_cast<int>(v) - 1];
    CHECK(counts2[2] == *std::max_element(counts2.begin(), counts2.end()));

    RngStream g1(55), g2(55);
    CHECK(likert_draw(spec, 1, 50, g1) == likert_draw(spec, 1, 50, g2));
    CHECK(likert_sample(spec, 1, 5, g1).label == "group1");
    CHECK(likert_sample(spec, 2, 5, g1).label == "group2");
    CHECK_THROWS_AS(likert_draw(spec, 1, 0, g1), std::invalid_argument);
}

TEST_CASE("likert_theta: closed form matches direct summation and known values") {
    // Identical groups and the one-category edge case are exactly 1/2.
    CHECK(likert_theta(LikertSpec::equal_width(5, 2.0, 5.0, 2.0, 5.0)) ==
          Approx(0.5).epsilon(1e-14));
    CHECK(likert_theta(LikertSpec::equal_width(1, 2.0, 3.0, 4.0, 5.0)) == 0.5);
    // Uniform against Beta(3,1) on five equal categories: exact value 0.74.
    CHECK(likert_theta(LikertSpec::equal_width(5, 1.0, 1.0, 3.0, 1.0)) ==
          Approx(0.74).epsilon(1e-12));

    // Category-pair double sum as an independent oracle.
    const auto spec = LikertSpec::equal_width(5, 2.0, 3.0, 4.0, 2.0);
    const auto p1 = likert_category_probs(spec, 1);
    const auto p2 = likert_category_probs(spec, 2);
    double oracle = 0.0;
    for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 5; ++k) {
            if (j < k) oracle += p1[j] * p2[k];
            else if (j == k) oracle += 0.5 * p1[j] * p2[k];
        }
    }
    CHECK(likert_theta(spec) == Approx(oracle).epsilon(1e-13));

    // Monte Carlo cross-check on the same asymmetric spec.
    RngStream g(31415);
    const int n = 400000;
    const auto x1 = likert_draw(spec, 1, n, g);
    const auto x2 = likert_draw(spec, 2, n, g);
    double hits = 0.0;
    for (int i = 0; i < n; ++i) {
        if (x1[i] < x2[i]) hits += 1.0;
        else if (x1[i] == x2[i]) hits += 0.5;
    }
    CHECK(hits / n == Approx(likert_theta(spec)).scale(1.0).epsilon(0.0035));
}

// ---------------------------------------------------------------------------
// Target-effect solvers
// ---------------------------------------------------------------------------

TEST_CASE("solve_normal_shift: known shifts and round trips") {
    CHECK(solve_normal_shift(1.0, 1.0, 0.5) == Approx(0.0).scale(1.0).epsilon(1e-7));
    CHECK(solve_normal_shift(1.0, 1.0, 0.76) == Approx(0.9988626635073269).epsilon(1e-6));
    for (double target : {0.45, 0.6, 0.76, 0.9}) {
        const double mu = solve_normal_shift(9.0, 1.0, target);
        CHECK(normal_cdf(mu / std::sqrt(10.0)) == Approx(target).scale(1.0).epsilon(2e-8));
    }
    CHECK_THROWS_AS(solve_normal_shift(0.0, 1.0, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(solve_normal_shift(1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("solve_exponential_rate: matches the closed form") {
    CHECK(solve_exponential_rate(0.9) == Approx(9.0).epsilon(1e-5));
    CHECK(solve_exponential_rate(0.5) == Approx(1.0).epsilon(1e-5));
    for (double target : {0.45, 0.6, 0.8, 0.9}) {
        const double lambda = solve_exponential_rate(target);
        CHECK(lambda / (lambda + 1.0) == Approx(target).scale(1.0).epsilon(2e-8));
        CHECK(lambda == Approx(target / (1.0 - target)).epsilon(1e-5));
    }
    CHECK_THROWS_AS(solve_exponential_rate(1.0), std::domain_error);
}

TEST_CASE("solve_likert_shape: round trips, monotone, and bounded range") {
    LikertSpec spec = LikertSpec::equal_width(5, 1.0, 1.0, 1.0, 1.0);
    double prev = 0.0;
    for (double target : {0.45, 0.5, 0.6, 0.74, 0.8, 0.9}) {
        const double a = solve_likert_shape(target);
        CHECK(a > prev);
        prev = a;
        spec.alpha2 = a;
        CHECK(likert_theta(spec) == Approx(target).scale(1.0).epsilon(2e-8));
    }
    // Exact reference at 0.74: the solved shape must be 3.
    CHECK(solve_likert_shape(0.74) == Approx(3.0).epsilon(1e-5));
    // Five equal categories cannot push the effect to 0.95.
    CHECK_THROWS_AS(solve_likert_shape(0.95), std::domain_error);
}

// ---------------------------------------------------------------------------
// Setting catalogues
// ---------------------------------------------------------------------------

TEST_CASE("type1_models: named pairs and null effects") {
    auto m = type1_models(1);
    CHECK(m.first.name == "normal(0,1)");
    CHECK(m.second.name == "normal(0,1)");
    m = type1_models(2);
    CHECK(m.second.name == "normal(0,9)");
    m = type1_models(7);
    CHECK(m.first.name == "likert5(beta(1,1))");
    CHECK(m.first.is_likert);
    m = type1_models(14);
    CHECK(m.first.name == "laplace(0,1)");
    CHECK(m.second.name == "laplace(0,3)");
    // The ordinal null settings all sit exactly at one half.
    for (int id : {7, 8, 9, 10}) {
        const auto lm = type1_models(id);
        CHECK(likert_theta(lm.first.likert) == Approx(0.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(type1_models(0), std::invalid_argument);
    CHECK_THROWS_AS(type1_models(15), std::invalid_argument);
}

TEST_CASE("power_models: the free parameter hits the requested effect") {
    auto m = power_models(1, 0.76);
    CHECK(m.first.dist.a == 0.0);
    CHECK(m.second.dist.a == Approx(0.9988626635073269).epsilon(1e-6));
    CHECK(m.second.dist.b == 1.0);

    m = power_models(2, 0.6);
    CHECK(m.first.dist.b == 9.0);
    CHECK(normal_cdf(m.second.dist.a / std::sqrt(10.0)) ==
          Approx(0.6).scale(1.0).epsilon(2e-8));

    m = power_models(3, 0.74);
    CHECK(m.first.is_likert);
    CHECK(likert_theta(m.first.likert) == Approx(0.74).scale(1.0).epsilon(2e-8));

    m = power_models(4, 0.9);
    CHECK(m.first.dist.a == Approx(9.0).epsilon(1e-5));
    CHECK(m.second.name == "exponential(1)");
    CHECK_THROWS_AS(power_models(5, 0.6), std::invalid_argument);
}

TEST_CASE("default grids: the documented size lists") {
    const auto t1 = default_type1_grid();
    REQUIRE(t1.size() == 15);
    CHECK(t1.front() == std::pair{15, 15});
    CHECK(std::count(t1.begin(), t1.end(), std::pair{50, 100}) == 1);
    CHECK(std::count(t1.begin(), t1.end(), std::pair{100, 50}) == 1);
    const auto pw = default_power_grid();
    const std::vector<std::pair<int, int>> expected{{15, 15}, {15, 30}, {30, 15}};
    CHECK(pw == expected);
}

// ---------------------------------------------------------------------------
// Study runners
// ---------------------------------------------------------------------------

namespace {

SimConfig smoke_config() {
    SimConfig config;
    config.setting_id = 1;
    config.sizes = {{15, 15}};
    config.alphas = {0.05, 0.01};
    config.n_iter = 300;
    config.n_p = 150;
    config.master_seed = 42;
    return config;
}

bool same_cells(const std::vector<SimCell>& a, const std::vector<SimCell>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].rate != b[i].rate || a[i].se != b[i].se || a[i].seed != b[i].seed ||
            a[i].n_degenerate != b[i].n_degenerate || a[i].method != b[i].method ||
            a[i].alpha != b[i].alpha || a[i].n1 != b[i].n1 || a[i].n2 != b[i].n2 ||
            a[i].target_theta != b[i].target_theta ||
            a[i].bradley_violation != b[i].bradley_violation) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("run_type1: cell layout, field contents, and seed chain") {
    const auto config = smoke_config();
    const auto report = run_type1(config);
    REQUIRE(report.cells.size() == 6);  // 3 methods x 2 levels

    const std::uint64_t expected_seed = derive_seed(
        derive_seed(derive_seed(derive_seed(config.master_seed, 1), 1), 15), 15);
    const std::vector<Method> order{Method::BM,   Method::BM,   Method::Perm,
                                    Method::Perm, Method::C2,   Method::C2};
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        const auto& cell = report.cells[i];
        CHECK(cell.study == Study::Type1);
        CHECK(cell.setting_id == 1);
        CHECK(cell.dist1 == "normal(0,1)");
        CHECK(cell.dist2 == "normal(0,1)");
        CHECK(cell.n1 == 15);
        CHECK(cell.n2 == 15);
        CHECK(cell.method == order[i]);
        CHECK(cell.alpha == ((i % 2 == 0) ? 0.05 : 0.01));
        CHECK(cell.n_iter == 300);
        CHECK(cell.rate >= 0.0);
        CHECK(cell.rate <= 1.0);
        CHECK(cell.se == std::sqrt(cell.rate * (1.0 - cell.rate) / 300.0));
        CHECK(cell.seed == expected_seed);
        CHECK_FALSE(cell.target_theta.has_value());
        CHECK_FALSE(cell.bradley_violation.has_value());
        CHECK(cell.n_degenerate >= 0);
    }
    // Identical-distribution null at a modest replication count: the
    // rejection rate should be loosely near the level.
    CHECK(report.cells[0].rate < 0.15);
    CHECK(report.cells[4].rate < 0.15);
}

TEST_CASE("run_type1: bit-identical across reruns and thread counts") {
    const auto config = smoke_config();
    const auto a = run_type1(config);
    const auto b = run_type1(config);
    CHECK(same_cells(a.cells, b.cells));

    SimConfig threaded = config;
    threaded.threads = 4;
    const auto c = run_type1(threaded);
    CHECK(same_cells(a.cells, c.cells));

    // A different master seed moves the rates.
    SimConfig reseeded = config;
    reseeded.master_seed = 43;
    const auto d = run_type1(reseeded);
    CHECK(d.cells[0].seed != a.cells[0].seed);
}

TEST_CASE("run_type1: method selection controls the cell set") {
    SimConfig config = smoke_config();
    config.run_perm = false;
    config.run_c2 = false;
    const auto bm_only = run_type1(config);
    REQUIRE(bm_only.cells.size() == 2);
    CHECK(bm_only.cells[0].method == Method::BM);

    config.run_bm = false;
    const auto none = run_type1(config);
    CHECK(none.cells.empty());
}

TEST_CASE("run_type1: configuration validation") {
    SimConfig config = smoke_config();
    config.setting_id = 15;
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
    config = smoke_config();
    config.n_iter = 0;
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
    config = smoke_config();
    config.alphas = {};
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
    config = smoke_config();
    config.alphas = {1.0};
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
    config = smoke_config();
    config.sizes = {{1, 5}};
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
    config = smoke_config();
    config.threads = 0;
    CHECK_THROWS_AS(run_type1(config), std::invalid_argument);
}

TEST_CASE("run_power: null effect stays near the level, strong effect dominates") {
    SimConfig config;
    config.setting_id = 4;
    config.sizes = {{15, 15}};
    config.alphas = {0.05};
    config.n_iter = 400;
    config.n_p = 100;
    config.target_thetas = {0.5};
    const auto null_report = run_power(config);
    REQUIRE(null_report.cells.size() == 3);
    for (const auto& cell : null_report.cells) {
        CHECK(cell.study == Study::Power);
        REQUIRE(cell.target_theta.has_value());
        CHECK(cell.target_theta.value() == 0.5);
        CHECK_FALSE(cell.bradley_violation.has_value());
        CHECK(cell.rate <= 0.12);
    }

    config.target_thetas = {0.6};
    const auto weak = run_power(config);
    config.target_thetas = {0.9};
    const auto strong = run_power(config);
    for (std::size_t i = 0; i < strong.cells.size(); ++i) {
        CHECK(strong.cells[i].rate > weak.cells[i].rate);
        CHECK(strong.cells[i].rate > 0.5);
    }

    config.target_thetas = {0.95};  // outside the power range
    CHECK_THROWS_AS(run_power(config), std::domain_error);
    config.target_thetas = {0.3};
    CHECK_THROWS_AS(run_power(config), std::domain_error);
}

TEST_CASE("run_power: default effect grid spans ten targets per size") {
    SimConfig config;
    config.setting_id = 1;
    config.alphas = {0.05};
    config.n_iter = 50;
    config.run_perm = false;
    config.run_c2 = false;
    const auto report = run_power(config);
    // 10 default targets x 3 default sizes x 1 method x 1 level.
    CHECK(report.cells.size() == 30);
}

TEST_CASE("run_coverage: rates, bradley flag, and validation") {
    SimConfig config;
    config.setting_id = 1;
    config.sizes = {{15, 15}};
    config.alphas = {0.05};
    config.n_iter = 500;
    config.n_p = 200;
    config.target_thetas = {0.6};
    const auto report = run_coverage(config);
    REQUIRE(report.cells.size() == 3);
    for (const auto& cell : report.cells) {
        CHECK(cell.study == Study::Coverage);
        CHECK(cell.rate > 0.9);
        CHECK(cell.rate <= 0.99);
        REQUIRE(cell.target_theta.has_value());
        CHECK(cell.target_theta.value() == 0.6);
        REQUIRE(cell.bradley_violation.has_value());
        const bool expected =
            cell.rate < 1.0 - 1.5 * cell.alpha || cell.rate > 1.0 - 0.5 * cell.alpha;
        CHECK(cell.bradley_violation.value() == expected);
    }

    config.target_thetas = {0.96};  // outside the coverage range
    CHECK_THROWS_AS(run_coverage(config), std::domain_error);
}

TEST_CASE("run_study: dispatches on the study field") {
    SimConfig config = smoke_config();
    config.n_iter = 100;
    config.study = Study::Type1;
    CHECK(same_cells(run_study(config).cells, run_type1(config).cells));

    config.study = Study::Coverage;
    config.target_thetas = {0.6};
    CHECK(same_cells(run_study(config).cells, run_coverage(config).cells));
    CHECK(study_name(Study::Type1) == "type1");
    CHECK(study_name(Study::Power) == "power");
    CHECK(study_name(Study::Coverage) == "coverage");
}
