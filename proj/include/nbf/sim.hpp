#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nbf/analysis.hpp"
#include "nbf/distributions.hpp"
#include "nbf/inference.hpp"
#include "nbf/rng.hpp"

namespace nbf {

enum class Study { Type1, Power, Coverage };

// ---------------------------------------------------------------------------
// Ordinal ("Likert") data: a latent Beta variable cut into J ordered
// categories at fixed cutoffs. Category index (1..J) is the observed value.
// ---------------------------------------------------------------------------
struct LikertSpec {
    int categories = 5;
    std::vector<double> cutoffs;  // size categories+1, 0 = c_0 < ... < c_J = 1
    double alpha1 = 1.0, beta1 = 1.0;  // latent Beta for group 1
    double alpha2 = 1.0, beta2 = 1.0;  // latent Beta for group 2

    static LikertSpec equal_width(int J, double a1, double b1, double a2, double b2);
};

void validate(const LikertSpec& spec);

// Exact per-category probabilities for one group (sums to 1).
std::vector<double> likert_category_probs(const LikertSpec& spec, int group);

std::vector<double> likert_draw(const LikertSpec& spec, int group, int n, RngStream& g);
Sample likert_sample(const LikertSpec& spec, int group, int n, RngStream& g);

// Closed-form Mann-Whitney effect between the two discretized groups:
// sum over categories of strict wins plus half the tie mass.
double likert_theta(const LikertSpec& spec);

// ---------------------------------------------------------------------------
// Target-effect solvers: free distribution parameter matching a requested
// effect, by bisection on a monotone map (bounds checked at runtime).
// ---------------------------------------------------------------------------
double solve_normal_shift(double var1, double var2, double target_theta);
double solve_likert_shape(double target_theta);      // group 1 uniform, group 2 Beta(a,1), J=5
double solve_exponential_rate(double target_theta);  // Exp(rate) vs Exp(1)

// ---------------------------------------------------------------------------
// Study configuration and report
// ---------------------------------------------------------------------------
struct SimConfig {
    Study study = Study::Type1;
    int setting_id = 1;
    std::vector<std::pair<int, int>> sizes;  // empty -> study's default grid
    std::vector<double> alphas = {0.05};
    long n_iter = 20000;   // paper-scale runs use 100000
    long n_p = 2000;       // paper-scale runs use 10000
    bool run_bm = true;
    bool run_perm = true;
    bool run_c2 = true;
    std::uint64_t master_seed = kDefaultSeed;
    std::vector<double> target_thetas;  // power/coverage only
    int threads = 1;
};

struct SimCell {
    Study study = Study::Type1;
    int setting_id = 1;
    std::string dist1, dist2;
    int n1 = 0, n2 = 0;
    double alpha = 0.05;
    Method method = Method::BM;
    double rate = 0.0;  // rejection rate (type1/power) or coverage rate
    double se = 0.0;    // sqrt(rate*(1-rate)/n_iter)
    long n_iter = 0;
    long n_degenerate = 0;  // replications that used any fallback path
    std::uint64_t seed = 0;
    std::optional<double> target_theta;
    std::optional<bool> bradley_violation;  // coverage only
};

struct SimReport {
    std::vector<SimCell> cells;
    // Wall time; intentionally outside the determinism contract (the cell
    // data is bit-identical for a fixed config regardless of thread count).
    double elapsed_seconds = 0.0;
};

// One group's generator, resolved from a setting row.
struct GroupModel {
    bool is_likert = false;
    Distribution dist = Distribution::exponential(1.0);
    LikertSpec likert;
    int likert_group = 1;
    std::string name;

    void draw(int n, RngStream& g, std::vector<double>& out) const;
};

std::pair<GroupModel, GroupModel> type1_models(int setting_id);
std::pair<GroupModel, GroupModel> power_models(int setting_id, double target_theta);

std::vector<std::pair<int, int>> default_type1_grid();
std::vector<std::pair<int, int>> default_power_grid();

SimReport run_type1(const SimConfig& config);
SimReport run_power(const SimConfig& config);
SimReport run_coverage(const SimConfig& config);
SimReport run_study(const SimConfig& config);

std::string study_name(Study study);

}  // namespace nbf
