// Command-line driver: synthetic data generation, change-point testing on CSV
// datasets, Monte Carlo experiment runs and critical-value calibration.
//
// Exit codes: 0 = success / H0 retained, 1 = change detected (test), 2 = usage
// or data error.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "elcp/elcp.hpp"

namespace {

using nlohmann::json;

constexpr int kExitRetain = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

elcp::ErrorSpec make_error_spec(const std::string& law, double sigma2, double rate) {
    if (law == "gauss" || law == "gaussian" || law == "normal")
        return elcp::ErrorSpec::gaussian(sigma2);
    if (law == "exp" || law == "exponential")
        return elcp::ErrorSpec::centered_exponential(rate);
    throw elcp::ConfigError("error law must be 'gauss' or 'exp', got '" + law + "'");
}

Eigen::VectorXd read_vector_file(const std::string& path, int expected_size) {
    std::ifstream in(path);
    if (!in) throw elcp::DataFormatError("cannot open coefficient file: " + path);
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw elcp::DataFormatError("non-numeric entry in " + path);
    if (static_cast<int>(values.size()) != expected_size)
        throw elcp::DataFormatError(path + ": expected " + std::to_string(expected_size) +
                                    " coefficients, got " + std::to_string(values.size()));
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::optional<double> parse_critical_flag(const std::string& s) {
    if (s == "normal") return std::nullopt;
    if (s.rfind("fixed:", 0) == 0) {
        const double v = std::stod(s.substr(6));
        if (!(v > 0.0)) throw elcp::ConfigError("fixed critical value must be positive");
        return v;
    }
    throw elcp::ConfigError("--critical takes 'normal' or 'fixed:VALUE', got '" + s + "'");
}

int resolve_threads(const std::optional<int>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("ELCP_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // library default: hardware concurrency
}

json assumption_json(const elcp::AssumptionReport& r) {
    return json{{"q", r.q},
                {"a5_first", r.a5_first},
                {"a5_second", r.a5_second},
                {"a6_first", r.a6_first},
                {"a6_second", r.a6_second},
                {"p_cubed_over_n", r.p_cubed_over_n},
                {"warnings", r.warnings}};
}

int cmd_gen(int n, int p, int k, const std::string& law, double sigma2, double rate,
            const std::string& beta0_file, const std::string& beta2_file,
            bool one_minus_beta0, std::uint64_t seed, const std::string& out) {
    const elcp::Design design =
        elcp::generate_design(n, p, k, elcp::derive_stream_seed(seed, elcp::kDesignStream));
    const Eigen::VectorXd beta0 =
        beta0_file.empty() ? elcp::sequence_beta(p) : read_vector_file(beta0_file, p);
    Eigen::VectorXd beta2 = beta0;
    if (one_minus_beta0)
        beta2 = Eigen::VectorXd::Ones(p) - beta0;
    else if (!beta2_file.empty())
        beta2 = read_vector_file(beta2_file, p);

    const elcp::ErrorSpec err = make_error_spec(law, sigma2, rate);
    const Eigen::VectorXd y = elcp::generate_response(
        design, elcp::CoefficientPair(beta0, beta2), err, elcp::derive_stream_seed(seed, 0));
    elcp::write_dataset(out, y, design.X);
    std::cout << "wrote " << n << " observations (p = " << p << ", k = " << k << ") to " << out
              << "\n";
    return kExitRetain;
}

int cmd_test(const std::string& data_path, int k, double alpha, const std::string& beta0_file,
             const std::string& critical, bool as_json) {
    const elcp::Dataset data = elcp::read_dataset(data_path);
    if (k < 1 || k >= data.X.rows())
        throw elcp::ConfigError("--k must satisfy 1 <= k < number of rows (" +
                                std::to_string(data.X.rows()) + ")");
    const elcp::Design design(data.X, k);

    elcp::TestConfig cfg;
    cfg.alpha = alpha;
    cfg.fixed_critical = parse_critical_flag(critical);
    if (!beta0_file.empty()) cfg.beta0 = read_vector_file(beta0_file, design.p());

    const elcp::TestResult r = elcp::test_changepoint(design, data.y, cfg);

    if (as_json) {
        json j{{"critical_value", r.critical_value},
               {"reject", r.reject},
               {"p_value", r.p_value},
               {"beta_estimated", r.beta_estimated},
               {"sigma2_used", r.sigma2_used},
               {"fourth_moment_used", r.fourth_moment_used},
               {"degenerate", r.degenerate},
               {"assumptions", assumption_json(r.assumption_report)}};
        j["z_value"] = std::isfinite(r.z_value) ? json(r.z_value) : json(nullptr);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "Z = " << r.z_value << "\n"
                  << "critical value = " << r.critical_value << "\n"
                  << "p-value = " << r.p_value << "\n"
                  << "decision: " << (r.reject ? "change detected after k" : "no change") << "\n";
        if (r.degenerate) std::cout << "note: zero residual variance, degenerate statistic\n";
        for (const auto& w : r.assumption_report.warnings)
            std::cout << "warning: " << w << "\n";
    }
    return r.reject ? kExitReject : kExitRetain;
}

std::string law_name(elcp::ErrorLaw law) {
    return law == elcp::ErrorLaw::kGaussian ? "gaussian" : "exponential";
}

int cmd_simulate(const std::string& config_path, const std::optional<int>& threads_flag) {
    std::ifstream in(config_path);
    if (!in) throw elcp::ConfigError("cannot open config file: " + config_path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw elcp::ConfigError(std::string("config parse error: ") + e.what());
    }
    const elcp::SimulateConfig cfg = elcp::parse_simulate_config(j);
    const int workers = resolve_threads(threads_flag);

    std::ofstream out(cfg.output);
    if (!out) throw elcp::ConfigError("cannot open output file: " + cfg.output);
    out << "n,k,p,error,CR,power,c_hat,seed,runtime\n";

    for (const auto& entry : cfg.experiments) {
        elcp::ExperimentSpec spec = entry.spec;
        std::string c_hat_str;
        if (entry.calibrate) {
            elcp::ExperimentSpec cal = spec;
            cal.k = entry.calibrate_k.value_or(spec.k);
            cal.alternative = elcp::Alternative::none();
            const double c_hat =
                elcp::empirical_critical_value(cal, entry.calibration_M, workers);
            spec.fixed_critical = c_hat;
            c_hat_str = elcp::format_double(c_hat);
        }

        const bool power_run = spec.alternative.kind != elcp::Alternative::Kind::kNone;
        const elcp::ExperimentOutcome outcome =
            power_run ? elcp::run_power(spec, workers) : elcp::run_coverage(spec, workers);

        out << spec.n << ',' << spec.k << ',' << spec.p << ',' << law_name(spec.error_law)
            << ',' << (power_run ? "" : elcp::format_double(outcome.coverage_rate)) << ','
            << (power_run ? elcp::format_double(*outcome.power) : "") << ',' << c_hat_str << ','
            << spec.master_seed << ',';
        char runtime[32];
        std::snprintf(runtime, sizeof(runtime), "%.3f", outcome.runtime_seconds);
        out << runtime << '\n';

        std::cout << "n=" << spec.n << " k=" << spec.k << " p=" << spec.p << " "
                  << law_name(spec.error_law) << " M=" << spec.replications << ": ";
        if (power_run)
            std::cout << "power = " << *outcome.power;
        else
            std::cout << "CR = " << outcome.coverage_rate;
        if (!c_hat_str.empty()) std::cout << ", c_hat = " << c_hat_str;
        if (outcome.failures > 0) std::cout << " (" << outcome.failures << " failed replicates)";
        std::cout << "\n";
    }
    if (!out) throw elcp::ConfigError("write failed: " + cfg.output);
    std::cout << "wrote " << cfg.output << "\n";
    return kExitRetain;
}

int cmd_calibrate(int n, int k, int p, const std::string& law, int M, double alpha,
                  std::uint64_t seed, const std::optional<int>& threads_flag, bool as_json) {
    elcp::ExperimentSpec spec;
    spec.n = n;
    spec.k = k;
    spec.p = p;
    spec.error_law = make_error_spec(law, 1.0, 1.0).law();
    spec.replications = M;
    spec.master_seed = seed;
    spec.alpha = alpha;
    const double c_hat = elcp::empirical_critical_value(spec, M, resolve_threads(threads_flag));
    if (as_json) {
        std::cout << json{{"c_hat", c_hat}, {"n", n}, {"k", k}, {"p", p},
                          {"error", law_name(spec.error_law)}, {"M", M}, {"alpha", alpha},
                          {"seed", seed}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "c_hat = " << c_hat << "\n";
    }
    return kExitRetain;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Empirical-likelihood change-point test for high-dimensional regression"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset CSV");
    int g_n = 0, g_p = 0, g_k = 0;
    std::string g_error = "gauss", g_beta0, g_beta2, g_out;
    double g_sigma2 = 1.0, g_rate = 1.0;
    bool g_one_minus = false;
    std::uint64_t g_seed = 0;
    gen->add_option("--n", g_n, "observations")->required();
    gen->add_option("--p", g_p, "covariates (including intercept)")->required();
    gen->add_option("--k", g_k, "change-point index (last of phase one)")->required();
    gen->add_option("--error", g_error, "error law: gauss | exp");
    gen->add_option("--sigma2", g_sigma2, "gaussian variance");
    gen->add_option("--rate", g_rate, "exponential rate");
    gen->add_option("--beta0", g_beta0, "file with p phase-one coefficients (default 1..p)");
    gen->add_option("--beta2", g_beta2, "file with p phase-two coefficients (default beta0)");
    gen->add_flag("--one-minus-beta0", g_one_minus, "set beta2 = 1 - beta0");
    gen->add_option("--seed", g_seed, "master seed")->required();
    gen->add_option("--out", g_out, "output CSV path")->required();

    // test
    auto* test = app.add_subcommand("test", "Test a CSV dataset for a change at k");
    std::string t_data, t_beta0, t_critical = "normal";
    int t_k = 0;
    double t_alpha = 0.05;
    bool t_json = false;
    test->add_option("data", t_data, "dataset CSV (y,x1,...,xp)")->required();
    test->add_option("--k", t_k, "candidate change-point")->required();
    test->add_option("--alpha", t_alpha, "test size");
    test->add_option("--beta0", t_beta0, "file with known phase-one coefficients");
    test->add_option("--critical", t_critical, "normal | fixed:VALUE");
    test->add_flag("--json", t_json, "machine-readable report");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run experiments from a JSON config");
    std::string s_config;
    std::optional<int> s_threads;
    sim->add_option("config", s_config, "experiment config JSON")->required();
    sim->add_option("--threads", s_threads, "worker count (default: hardware)");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Empirical critical value under H0");
    int c_n = 0, c_k = 0, c_p = 0, c_M = 10000;
    std::string c_error = "gauss";
    double c_alpha = 0.05;
    std::uint64_t c_seed = 0;
    std::optional<int> c_threads;
    bool c_json = false;
    cal->add_option("--n", c_n, "observations")->required();
    cal->add_option("--k", c_k, "change-point")->required();
    cal->add_option("--p", c_p, "covariates")->required();
    cal->add_option("--error", c_error, "error law: gauss | exp");
    cal->add_option("--M", c_M, "replications");
    cal->add_option("--alpha", c_alpha, "test size");
    cal->add_option("--seed", c_seed, "master seed")->required();
    cal->add_option("--threads", c_threads, "worker count");
    cal->add_flag("--json", c_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (gen->parsed())
            return cmd_gen(g_n, g_p, g_k, g_error, g_sigma2, g_rate, g_beta0, g_beta2,
                           g_one_minus, g_seed, g_out);
        if (test->parsed())
            return cmd_test(t_data, t_k, t_alpha, t_beta0, t_critical, t_json);
        if (sim->parsed()) return cmd_simulate(s_config, s_threads);
        if (cal->parsed())
            return cmd_calibrate(c_n, c_k, c_p, c_error, c_M, c_alpha, c_seed, c_threads,
                                 c_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
