#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nbf/analysis.hpp"
#include "nbf/csv.hpp"
#include "nbf/sim.hpp"

namespace {

std::string strf(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct AnalyzeArgs {
    std::string input;
    double alpha = 0.05;
    std::string method = "all";
    std::optional<double> theta0;
    long permutations = 2000;
    std::uint64_t seed = nbf::kDefaultSeed;
    bool swap_groups = false;
    std::string format = "text";
    std::string out;
};

struct SimulateArgs {
    std::string study;
    std::vector<int> settings;
    std::vector<int> n1s, n2s;
    std::vector<double> alphas;
    long iters = 20000;
    long permutations = 2000;
    std::string method = "all";
    std::vector<double> thetas;
    std::uint64_t seed = nbf::kDefaultSeed;
    int threads = 1;
    std::string out;
};

std::string ci_text(const nbf::ConfidenceInterval& ci) {
    std::string s = strf("[%.4f, %.4f]", ci.lower, ci.upper);
    if (ci.lower < 0.0 || ci.upper > 1.0) s += " (exceeds [0,1])";
    return s;
}

void print_text(std::ostream& os, const nbf::DatasetAnalysis& d) {
    const auto& est = d.estimate;
    os << "dataset: " << d.label1 << " (n1=" << est.n1 << ") vs " << d.label2
       << " (n2=" << est.n2 << ")\n";
    os << strf("theta_hat = %.6f   tau_hat = %.6f\n", est.theta_hat, est.tau_hat);
    os << strf("var_delong = %.6f   N_var_unbiased = %.6f\n", est.var_delong,
               static_cast<double>(est.N()) * est.var_unbiased);
    os << '\n';
    os << strf("%-12s %-12s %-10s %-12s %-8s %s\n", "method", "statistic", "df", "p-value",
               "decision", "confidence interval");
    for (const auto& m : d.methods) {
        const std::string df = m.test.df ? strf("%.6g", *m.test.df) : std::string("--");
        std::string row = strf("%-12s %-12.6g %-10s %-12.6g %-8s %s",
                               nbf::method_name(m.test.method).c_str(), m.test.statistic,
                               df.c_str(), m.test.p_value, m.test.reject ? "reject" : "retain",
                               ci_text(m.ci).c_str());
        if (m.test.fallback != nbf::Fallback::None) {
            row += " [fallback: " + nbf::fallback_name(m.test.fallback) + "]";
        }
        os << row << '\n';
    }
}

void print_csv(std::ostream& os, const nbf::DatasetAnalysis& d) {
    os << "label1,label2,n1,n2,theta_hat,tau_hat,var_delong,n_var_unbiased,alpha,method,"
          "statistic,df,p_value,reject,ci_kind,ci_lower,ci_upper,fallback\n";
    const auto& est = d.estimate;
    for (const auto& m : d.methods) {
        os << nbf::csv_escape(d.label1) << ',' << nbf::csv_escape(d.label2) << ',' << est.n1
           << ',' << est.n2 << ',' << nbf::format_double_exact(est.theta_hat) << ','
           << nbf::format_double_exact(est.tau_hat) << ','
           << nbf::format_double_exact(est.var_delong) << ','
           << nbf::format_double_exact(static_cast<double>(est.N()) * est.var_unbiased) << ','
           << nbf::format_double_exact(m.test.alpha) << ',' << nbf::method_name(m.test.method)
           << ',' << nbf::format_double_exact(m.test.statistic) << ',';
        if (m.test.df) os << nbf::format_double_exact(*m.test.df);
        os << ',' << nbf::format_double_exact(m.test.p_value) << ','
           << (m.test.reject ? 1 : 0) << ',' << nbf::interval_kind_name(m.ci.kind) << ','
           << nbf::format_double_exact(m.ci.lower) << ',' << nbf::format_double_exact(m.ci.upper)
           << ',' << nbf::fallback_name(m.test.fallback) << '\n';
    }
}

void print_jsonl(std::ostream& os, const nbf::DatasetAnalysis& d) {
    const auto& est = d.estimate;
    for (const auto& m : d.methods) {
        nlohmann::json j{{"label1", d.label1},
                         {"label2", d.label2},
                         {"n1", est.n1},
                         {"n2", est.n2},
                         {"theta_hat", est.theta_hat},
                         {"tau_hat", est.tau_hat},
                         {"var_delong", est.var_delong},
                         {"n_var_unbiased", static_cast<double>(est.N()) * est.var_unbiased},
                         {"alpha", m.test.alpha},
                         {"method", nbf::method_name(m.test.method)},
                         {"statistic", m.test.statistic},
                         {"p_value", m.test.p_value},
                         {"reject", m.test.reject},
                         {"ci_kind", nbf::interval_kind_name(m.ci.kind)},
                         {"ci_lower", m.ci.lower},
                         {"ci_upper", m.ci.upper},
                         {"fallback", nbf::fallback_name(m.test.fallback)}};
        if (m.test.df) j["df"] = *m.test.df;
        if (m.test.method == nbf::Method::Perm) {
            j["n_permutations"] = m.test.n_permutations;
            j["seed"] = m.test.seed;
        }
        os << j.dump() << '\n';
    }
}

int run_analyze(const AnalyzeArgs& args) {
    const nbf::ParsedGroups groups = nbf::read_group_value_csv(args.input, args.swap_groups);
    if (groups.sample1.values.size() < 2 || groups.sample2.values.size() < 2) {
        throw std::runtime_error("each group needs at least 2 observations");
    }

    nbf::AnalysisOptions options;
    options.alpha = args.alpha;
    options.run_bm = args.method == "all" || args.method == "bm";
    options.run_perm = args.method == "all" || args.method == "perm";
    options.run_c2 = args.method == "all" || args.method == "c2";
    if (args.theta0 && !options.run_c2) {
        throw std::runtime_error("--theta0 requires --method c2 or all");
    }
    options.theta0 = args.theta0;
    options.n_permutations = args.permutations;
    options.seed = args.seed;

    const nbf::DatasetAnalysis analysis =
        nbf::analyze_dataset(groups.sample1, groups.sample2, options);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw std::runtime_error("cannot open output file: " + args.out);
        os = &file;
    }
    if (args.format == "text") {
        print_text(*os, analysis);
    } else if (args.format == "csv") {
        print_csv(*os, analysis);
    } else {
        print_jsonl(*os, analysis);
    }
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    if (args.n1s.size() != args.n2s.size()) {
        throw std::runtime_error("--n1 and --n2 must be given the same number of times");
    }

    nbf::SimConfig config;
    if (args.study == "type1") {
        config.study = nbf::Study::Type1;
    } else if (args.study == "power") {
        config.study = nbf::Study::Power;
    } else {
        config.study = nbf::Study::Coverage;
    }
    for (std::size_t i = 0; i < args.n1s.size(); ++i) {
        config.sizes.emplace_back(args.n1s[i], args.n2s[i]);
    }
    if (!args.alphas.empty()) config.alphas = args.alphas;
    config.n_iter = args.iters;
    config.n_p = args.permutations;
    config.run_bm = args.method == "all" || args.method == "bm";
    config.run_perm = args.method == "all" || args.method == "perm";
    config.run_c2 = args.method == "all" || args.method == "c2";
    config.master_seed = args.seed;
    config.target_thetas = args.thetas;
    config.threads = args.threads;

    const std::vector<int> settings = args.settings.empty() ? std::vector<int>{1} : args.settings;
    nbf::SimReport combined;
    for (int setting : settings) {
        config.setting_id = setting;
        nbf::SimReport report = nbf::run_study(config);
        combined.cells.insert(combined.cells.end(), report.cells.begin(), report.cells.end());
        combined.elapsed_seconds += report.elapsed_seconds;
    }

    if (args.out.empty()) {
        nbf::write_sim_csv(combined, std::cout);
    } else {
        nbf::write_sim_csv_file(combined, args.out);
        std::cout << "wrote " << combined.cells.size() << " rows to " << args.out << " ("
                  << strf("%.1f", combined.elapsed_seconds) << " s)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample rank analysis: Mann-Whitney effect estimates, tests, compatible "
                 "confidence intervals, and simulation studies"};
    app.require_subcommand(1);

    AnalyzeArgs a;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Analyze a two-group dataset from a group,value CSV");
    analyze->add_option("-i,--input", a.input, "Input CSV with header 'group,value'")
        ->required();
    analyze->add_option("--alpha", a.alpha, "Two-sided significance level")
        ->capture_default_str();
    analyze->add_option("--method", a.method, "Method selection")
        ->capture_default_str()
        ->check(CLI::IsMember({"bm", "perm", "c2", "all"}));
    analyze->add_option("--theta0", a.theta0,
                        "Also test against this null effect (requires the c2 method)");
    analyze->add_option("--permutations", a.permutations, "Permutation replicates")
        ->capture_default_str();
    analyze->add_option("--seed", a.seed, "Permutation seed")->capture_default_str();
    analyze->add_flag("--swap-groups", a.swap_groups,
                      "Swap sample 1 and sample 2 (flips the effect orientation)");
    analyze->add_option("--format", a.format, "Output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "csv", "jsonl"}));
    analyze->add_option("--out", a.out, "Output file (default: stdout)");

    SimulateArgs s;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run a simulation study and emit one CSV row per cell");
    simulate->add_option("--study", s.study, "Study kind")
        ->required()
        ->check(CLI::IsMember({"type1", "power", "coverage"}));
    simulate->add_option("--setting", s.settings,
                         "Setting id(s); type1: 1-14, power/coverage: 1-4 (default: 1)");
    simulate->add_option("--n1", s.n1s, "Group-1 sizes (paired with --n2; default grid if absent)");
    simulate->add_option("--n2", s.n2s, "Group-2 sizes (paired with --n1)");
    simulate->add_option("--alpha", s.alphas, "Nominal level(s) (default: 0.05)");
    simulate->add_option("--iters", s.iters, "Monte Carlo replications")
        ->capture_default_str();
    simulate->add_option("--permutations", s.permutations, "Permutations per replication")
        ->capture_default_str();
    simulate->add_option("--method", s.method, "Method selection")
        ->capture_default_str()
        ->check(CLI::IsMember({"bm", "perm", "c2", "all"}));
    simulate->add_option("--theta", s.thetas,
                         "Target effect(s) for power/coverage (default grid if absent)");
    simulate->add_option("--seed", s.seed, "Master seed")->capture_default_str();
    simulate->add_option("--threads", s.threads, "Worker threads")->capture_default_str();
    simulate->add_option("--out", s.out, "Output CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(analyze)) return run_analyze(a);
        return run_simulate(s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
