#pragma once

// JSON encodings shared by configs and reports, and the CSV trace format.
//
//   set:      {"type":"box","lower":[..],"upper":[..]}
//             {"type":"halfspace"|"hyperplane","a":[..],"b":0}
//             {"type":"ball","center":[..],"radius":1}
//             {"type":"affine","A":[[..],..],"b":[..]}
//             {"type":"singleton","point":[..]}
//             {"type":"full_space","dim":2}
//   operator: {"type":"linear","A":[[..],..]}
//             {"type":"normal_cone","set":{..}}
//             {"type":"subdiff_quadratic","Q":[[..],..],"c":[..]}
//             {"type":"subdiff_l1","w":1,"dim":2}
//             {"type":"shifted","base":{..},"b":[..]}
//   schedule: {"type":"constant","lambda":1} | {"type":"geometric","lambda0":1,"factor":2}

#include "proxreg/algorithms.hpp"
#include "proxreg/operators.hpp"
#include "proxreg/regularity.hpp"
#include "proxreg/sets.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace proxreg {

using Json = nlohmann::ordered_json;

/// Schema violation; what() starts with the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path)
    {
    }

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

Json to_json(const Vector& v);
Json to_json(const Matrix& M);
Json to_json(const ConvexSet& set);
Json to_json(const MonotoneOperator& op);
Json to_json(const LambdaSchedule& schedule);
Json to_json(const RegularityEstimate& estimate);
Json to_json(const RateReport& report);
Json to_json(const Trace& trace);

// Decoders take the JSON path of `j` for error messages.
Vector vector_from_json(const Json& j, const std::string& path);
Matrix matrix_from_json(const Json& j, const std::string& path);
ConvexSet set_from_json(const Json& j, const std::string& path);
MonotoneOperator operator_from_json(const Json& j, const std::string& path);
LambdaSchedule schedule_from_json(const Json& j, const std::string& path);

/// Header `k,lambda,dist,ratio_sq,residual,chosen_index`; undefined fields are
/// empty; reals use 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);

/// printf("%.17g"), which round-trips every double.
std::string format_real(double value);

} // namespace proxreg
