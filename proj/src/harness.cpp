#include "proxreg/harness.hpp"

#include "proxreg/errors.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#ifndef PROXREG_VERSION
#define PROXREG_VERSION "0.0.0"
#endif

namespace proxreg {

namespace {

const Json* find(const Json& j, const char* key)
{
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

double positive_real(const Json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(path, "must be positive and finite");
    }
    return v;
}

std::uint64_t non_negative_integer(const Json& j, const std::string& path)
{
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json make_report(const ExperimentConfig& config, Json results, Json assertions, const CommandOptions& options)
{
    Json report;
    report["config"] = to_json(config);
    report["results"] = std::move(results);
    report["assertions"] = std::move(assertions);
    report["version"] = std::string(version());
    report["timestamp"] = options.timestamp ? *options.timestamp : utc_now();
    return report;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void write_report(const CommandOptions& options, const Json& report)
{
    std::filesystem::create_directories(options.out_dir);
    write_text(options.out_dir / "report.json", report.dump(2) + "\n");
}

// Maps exceptions onto exit codes: invalid inputs are configuration errors,
// anything raised while computing is a failure.
CommandResult guarded(const std::function<CommandResult()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        return {kExitConfigError, nullptr, std::string("configuration error: ") + e.what()};
    } catch (const AssumptionError& e) {
        return {kExitConfigError, nullptr, std::string("configuration error: ") + e.what()};
    } catch (const DomainError& e) {
        return {kExitConfigError, nullptr, std::string("configuration error: ") + e.what()};
    } catch (const DimensionError& e) {
        return {kExitConfigError, nullptr, std::string("configuration error: ") + e.what()};
    } catch (const std::exception& e) {
        return {kExitFail, nullptr, std::string("error: ") + e.what()};
    }
}

Json trace_results(Algorithm algorithm, const Trace& trace)
{
    return {{"algorithm", std::string(to_string(algorithm))},
            {"status", trace.status == RunStatus::converged ? "converged" : "budget_exhausted"},
            {"iterations", trace.iterations()},
            {"final_dist", trace.final_dist()},
            {"trace", to_json(trace)}};
}

Json optional_real(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

} // namespace

std::string_view version() { return PROXREG_VERSION; }

std::string_view to_string(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::proximal: return "proximal";
    case Algorithm::randomized: return "randomized";
    case Algorithm::barycentric: return "barycentric";
    }
    return "unknown";
}

ExperimentConfig config_from_json(const Json& j)
{
    reject_unknown(j, "", {"problem", "algorithm", "schedule", "max_iters", "residual_tol", "seed", "estimation",
                           "verification"});
    ExperimentConfig config;

    const Json* problem = find(j, "problem");
    if (!problem) {
        throw ConfigError("problem", "missing required field");
    }
    reject_unknown(*problem, "problem", {"operators", "x0", "center"});
    const Json* ops = find(*problem, "operators");
    if (!ops) {
        throw ConfigError("problem.operators", "missing required field");
    }
    if (!ops->is_array() || ops->empty()) {
        throw ConfigError("problem.operators", "expected a nonempty array");
    }
    for (std::size_t i = 0; i < ops->size(); ++i) {
        config.operators.push_back(operator_from_json((*ops)[i], "problem.operators[" + std::to_string(i) + "]"));
    }
    const auto dim = config.operators.front().dim();
    for (std::size_t i = 1; i < config.operators.size(); ++i) {
        if (config.operators[i].dim() != dim) {
            throw ConfigError("problem.operators[" + std::to_string(i) + "]",
                              "has dimension " + std::to_string(config.operators[i].dim()) +
                                  " but problem.operators[0] has dimension " + std::to_string(dim));
        }
    }
    const Json* x0 = find(*problem, "x0");
    if (!x0) {
        throw ConfigError("problem.x0", "missing required field");
    }
    config.x0 = vector_from_json(*x0, "problem.x0");
    if (config.x0.size() != dim) {
        throw ConfigError("problem.x0", "has dimension " + std::to_string(config.x0.size()) +
                                            " but problem.operators[0] has dimension " + std::to_string(dim));
    }
    if (const Json* center = find(*problem, "center")) {
        config.center = vector_from_json(*center, "problem.center");
        if (config.center->size() != dim) {
            throw ConfigError("problem.center", "has dimension " + std::to_string(config.center->size()) +
                                                    " but problem.operators[0] has dimension " + std::to_string(dim));
        }
    }

    const Json* algorithm = find(j, "algorithm");
    if (!algorithm) {
        throw ConfigError("algorithm", "missing required field");
    }
    if (!algorithm->is_string()) {
        throw ConfigError("algorithm", "expected one of proximal, randomized, barycentric");
    }
    const auto name = algorithm->get<std::string>();
    if (name == "proximal") {
        config.algorithm = Algorithm::proximal;
    } else if (name == "randomized") {
        config.algorithm = Algorithm::randomized;
    } else if (name == "barycentric") {
        config.algorithm = Algorithm::barycentric;
    } else {
        throw ConfigError("algorithm", "unknown algorithm '" + name + "'");
    }

    if (const Json* schedule = find(j, "schedule")) {
        config.run.schedule = schedule_from_json(*schedule, "schedule");
    }
    if (const Json* iters = find(j, "max_iters")) {
        const auto v = non_negative_integer(*iters, "max_iters");
        if (v < 1 || v > 100000000) {
            throw ConfigError("max_iters", "must be between 1 and 1e8");
        }
        config.run.max_iters = static_cast<int>(v);
    }
    if (const Json* tol = find(j, "residual_tol")) {
        config.run.residual_tol = positive_real(*tol, "residual_tol");
    }
    if (const Json* seed = find(j, "seed")) {
        config.run.seed = non_negative_integer(*seed, "seed");
    }

    if (const Json* est = find(j, "estimation")) {
        reject_unknown(*est, "estimation", {"radius", "n_samples"});
        EstimationSettings settings;
        const Json* radius = find(*est, "radius");
        if (!radius) {
            throw ConfigError("estimation.radius", "missing required field");
        }
        settings.radius = positive_real(*radius, "estimation.radius");
        if (const Json* n = find(*est, "n_samples")) {
            settings.n_samples = non_negative_integer(*n, "estimation.n_samples");
            if (settings.n_samples < 1) {
                throw ConfigError("estimation.n_samples", "must be at least 1");
            }
        }
        config.estimation = settings;
    }

    if (const Json* ver = find(j, "verification")) {
        reject_unknown(*ver, "verification", {"gamma_bar", "kappa_bar", "n_trials"});
        VerificationSettings settings;
        const Json* gamma = find(*ver, "gamma_bar");
        if (!gamma) {
            throw ConfigError("verification.gamma_bar", "missing required field");
        }
        settings.gamma_bar = positive_real(*gamma, "verification.gamma_bar");
        if (const Json* kappa = find(*ver, "kappa_bar")) {
            settings.kappa_bar = positive_real(*kappa, "verification.kappa_bar");
        }
        if (const Json* n = find(*ver, "n_trials")) {
            settings.n_trials = non_negative_integer(*n, "verification.n_trials");
            if (settings.n_trials < 100) {
                throw ConfigError("verification.n_trials", "must be at least 100");
            }
        }
        config.verification = settings;
    }
    return config;
}

ExperimentConfig parse_config(std::string_view text)
{
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

Json to_json(const ExperimentConfig& config)
{
    Json ops = Json::array();
    for (const auto& op : config.operators) {
        ops.push_back(to_json(op));
    }
    Json problem{{"operators", std::move(ops)}, {"x0", to_json(config.x0)}};
    if (config.center) {
        problem["center"] = to_json(*config.center);
    }
    Json j;
    j["problem"] = std::move(problem);
    j["algorithm"] = std::string(to_string(config.algorithm));
    j["schedule"] = to_json(config.run.schedule);
    j["max_iters"] = config.run.max_iters;
    j["residual_tol"] = config.run.residual_tol;
    j["seed"] = config.run.seed;
    if (config.estimation) {
        j["estimation"] = {{"radius", config.estimation->radius}, {"n_samples", config.estimation->n_samples}};
    }
    if (config.verification) {
        Json v{{"gamma_bar", config.verification->gamma_bar}};
        if (config.verification->kappa_bar) {
            v["kappa_bar"] = *config.verification->kappa_bar;
        }
        v["n_trials"] = config.verification->n_trials;
        j["verification"] = std::move(v);
    }
    return j;
}

CommandResult cmd_run(const ExperimentConfig& config, const CommandOptions& options)
{
    return guarded([&]() -> CommandResult {
        Trace trace;
        switch (config.algorithm) {
        case Algorithm::proximal:
            if (config.operators.size() != 1) {
                throw ConfigError("algorithm", "proximal requires exactly one operator");
            }
            trace = run_proximal_point(config.operators.front(), config.x0, config.run);
            break;
        case Algorithm::randomized:
            trace = run_randomized_proximal(config.operators, config.x0, config.run);
            break;
        case Algorithm::barycentric:
            trace = run_barycentric_proximal(config.operators, config.x0, config.run);
            break;
        }
        CommandResult result;
        result.report = make_report(config, trace_results(config.algorithm, trace), Json::array(), options);
        std::ostringstream csv;
        write_trace_csv(csv, trace);
        std::filesystem::create_directories(options.out_dir);
        write_text(options.out_dir / "trace.csv", csv.str());
        write_report(options, result.report);
        return result;
    });
}

CommandResult cmd_estimate(const ExperimentConfig& config, const CommandOptions& options)
{
    return guarded([&]() -> CommandResult {
        if (!config.estimation) {
            throw ConfigError("estimation", "missing required block for estimate");
        }
        const auto& est = *config.estimation;
        const CommonZeroOracle oracle(config.operators);
        const Vector center = config.center ? *config.center : oracle.project(config.x0);

        Json per_operator = Json::array();
        for (std::size_t i = 0; i < config.operators.size(); ++i) {
            const auto& op = config.operators[i];
            if (zero_distance(op, center) > 1e-8) {
                throw ConfigError("problem.center", "is not a zero of problem.operators[" + std::to_string(i) + "]");
            }
            const auto estimate = estimate_subregularity_modulus(op, center, est.radius, est.n_samples,
                                                                 config.run.seed, options.exec);
            std::optional<double> oracle_value;
            std::optional<double> gap;
            if (op.affine_form()) {
                oracle_value = spectral_modulus(op);
                if (*oracle_value > 0.0) {
                    gap = (*oracle_value - estimate.modulus) / *oracle_value;
                }
            }
            per_operator.push_back({{"index", i},
                                    {"type", std::string(op.kind())},
                                    {"estimate", to_json(estimate)},
                                    {"spectral_modulus", optional_real(oracle_value)},
                                    {"relative_gap", optional_real(gap)}});
        }
        if (max_set_distance(oracle.zero_sets(), center) > 1e-8) {
            throw ConfigError("problem.center", "is not a common zero of the operators");
        }
        const auto kappa = estimate_kappa(oracle.zero_sets(), center, est.radius, est.n_samples, config.run.seed,
                                          DykstraConfig{}, options.exec);
        Json results{{"center", to_json(center)}, {"operators", std::move(per_operator)}, {"kappa", to_json(kappa)}};
        CommandResult result;
        result.report = make_report(config, std::move(results), Json::array(), options);
        write_report(options, result.report);
        return result;
    });
}

CommandResult cmd_verify(const ExperimentConfig& config, const CommandOptions& options)
{
    return guarded([&]() -> CommandResult {
        if (!config.verification) {
            throw ConfigError("verification", "missing required block for verify");
        }
        const auto& ver = *config.verification;
        Json assertions = Json::array();
        Json results;
        bool passed = true;

        if (config.algorithm == Algorithm::proximal) {
            if (config.operators.size() != 1) {
                throw ConfigError("algorithm", "proximal verification requires exactly one operator");
            }
            const auto check = verify_rate_single(config.operators.front(), config.x0, config.run, ver.gamma_bar);
            for (const auto& row : check.rows) {
                assertions.push_back({{"name", "rate_single"},
                                      {"k", row.k},
                                      {"observed", row.observed},
                                      {"bound", row.bound},
                                      {"margin", row.margin},
                                      {"passed", row.passed}});
            }
            passed = check.passed();
            results = {{"bound", check.bound},
                       {"checked_iterations", check.rows.size()},
                       {"first_violation", check.first_violation ? Json(*check.first_violation) : Json()},
                       {"final_dist", check.trace.final_dist()}};
        } else {
            if (!ver.kappa_bar) {
                throw ConfigError("verification.kappa_bar", "required for multi-operator verification");
            }
            require_rate_assumption(config.run.schedule.lambda0(), ver.gamma_bar);
            if (config.algorithm == Algorithm::randomized) {
                const auto check = verify_rate_multi(config.operators, config.x0, config.run, *ver.kappa_bar,
                                                     ver.gamma_bar, ver.n_trials, options.exec);
                assertions.push_back({{"name", "monotone_distance"},
                                      {"violations", check.monotonicity_violations},
                                      {"passed", check.monotonicity_violations == 0}});
                for (const auto& s : check.steps) {
                    assertions.push_back({{"name", "expected_contraction"},
                                          {"k", s.k},
                                          {"contributing", s.contributing},
                                          {"bound", s.bound},
                                          {"conditional_mean", s.conditional_mean},
                                          {"conditional_stderr", s.conditional_stderr},
                                          {"conditional_margin", s.bound + 3.0 * s.conditional_stderr - s.conditional_mean},
                                          {"sampled_mean", s.sampled_mean},
                                          {"sampled_stderr", s.sampled_stderr},
                                          {"sampled_checked", s.sampled_checked},
                                          {"passed", s.conditional_passed && s.sampled_passed}});
                }
                passed = check.passed();
                results = {{"rate", to_json(check.rate)},
                           {"n_trials", check.n_trials},
                           {"trials_reaching_1e-6", check.trials_reaching_1e6},
                           {"first_failed_step", check.first_failed_step ? Json(*check.first_failed_step) : Json()}};
            } else {
                const auto cmp = compare_barycentric(config.operators, config.x0, config.run, *ver.kappa_bar,
                                                     ver.gamma_bar, ver.n_trials, options.exec);
                for (const auto& row : cmp.rows) {
                    assertions.push_back({{"name", "jensen_one_step"},
                                          {"k", row.k},
                                          {"barycentric_dist_sq", row.barycentric_dist_sq},
                                          {"branch_mean_dist_sq", row.branch_mean_dist_sq},
                                          {"margin", row.branch_mean_dist_sq - row.barycentric_dist_sq},
                                          {"passed", row.jensen_passed}});
                    assertions.push_back({{"name", "barycentric_rate"},
                                          {"k", row.k},
                                          {"observed", row.bary_ratio_sq},
                                          {"bound", cmp.rate.rate},
                                          {"margin", cmp.rate.rate - row.bary_ratio_sq},
                                          {"passed", row.rate_passed}});
                }
                passed = cmp.passed();
                Json mean = Json::array();
                for (const double v : cmp.randomized_mean_dist_sq) {
                    mean.push_back(v);
                }
                results = {{"rate", to_json(cmp.rate)},
                           {"barycentric_final_dist", cmp.barycentric.final_dist()},
                           {"randomized_mean_dist_sq", std::move(mean)},
                           {"first_violation", cmp.first_violation ? Json(*cmp.first_violation) : Json()}};
            }
        }
        results["passed"] = passed;
        CommandResult result;
        result.exit_code = passed ? kExitPass : kExitFail;
        if (!passed) {
            result.message = "verification failed";
        }
        result.report = make_report(config, std::move(results), std::move(assertions), options);
        write_report(options, result.report);
        return result;
    });
}

} // namespace proxreg
