#include "proxreg/serialization.hpp"

#include "proxreg/errors.hpp"

#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <string_view>

namespace proxreg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_object(const Json& j, const std::string& path, std::initializer_list<std::string_view> allowed)
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
            throw ConfigError(path + "." + key, "unknown field");
        }
    }
}

const Json& field(const Json& j, const std::string& path, const char* key)
{
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(path + "." + key, "missing required field");
    }
    return *it;
}

double real_from_json(const Json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    return j.get<double>();
}

std::string type_of(const Json& j, const std::string& path)
{
    const Json& t = field(j, path, "type");
    if (!t.is_string()) {
        throw ConfigError(path + ".type", "expected a string");
    }
    return t.get<std::string>();
}

// Re-raises construction failures of domain objects under the JSON path.
template <class F>
auto at_path(const std::string& path, F&& make) -> decltype(make())
{
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

} // namespace

std::string format_real(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

Json to_json(const Matrix& M)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        out.push_back(to_json(Vector(M.row(r).transpose())));
    }
    return out;
}

Json to_json(const ConvexSet& set)
{
    return std::visit(Overloaded{
                          [](const Box& s) { return Json{{"type", "box"}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}}; },
                          [](const Halfspace& s) { return Json{{"type", "halfspace"}, {"a", to_json(s.a)}, {"b", s.b}}; },
                          [](const Hyperplane& s) { return Json{{"type", "hyperplane"}, {"a", to_json(s.a)}, {"b", s.b}}; },
                          [](const Ball& s) { return Json{{"type", "ball"}, {"center", to_json(s.center)}, {"radius", s.radius}}; },
                          [](const AffineSubspace& s) { return Json{{"type", "affine"}, {"A", to_json(s.A)}, {"b", to_json(s.b)}}; },
                          [](const Singleton& s) { return Json{{"type", "singleton"}, {"point", to_json(s.point)}}; },
                          [](const FullSpace& s) { return Json{{"type", "full_space"}, {"dim", s.dim}}; },
                      },
                      set.shape());
}

Json to_json(const MonotoneOperator& op)
{
    return std::visit(Overloaded{
                          [](const LinearOp& o) { return Json{{"type", "linear"}, {"A", to_json(o.A)}}; },
                          [](const NormalConeOp& o) { return Json{{"type", "normal_cone"}, {"set", to_json(o.set)}}; },
                          [](const SubdiffQuadratic& o) {
                              return Json{{"type", "subdiff_quadratic"}, {"Q", to_json(o.Q)}, {"c", to_json(o.c)}};
                          },
                          [](const SubdiffL1& o) { return Json{{"type", "subdiff_l1"}, {"w", o.weight}, {"dim", o.dim}}; },
                          [](const Shifted& o) { return Json{{"type", "shifted"}, {"base", to_json(*o.base)}, {"b", to_json(o.b)}}; },
                      },
                      op.kind_data());
}

Json to_json(const LambdaSchedule& schedule)
{
    if (schedule.kind() == LambdaSchedule::Kind::constant) {
        return {{"type", "constant"}, {"lambda", schedule.lambda0()}};
    }
    return {{"type", "geometric"}, {"lambda0", schedule.lambda0()}, {"factor", schedule.factor()}};
}

Json to_json(const RegularityEstimate& e)
{
    return {{"modulus", e.modulus},
            {"center", to_json(e.center)},
            {"radius", e.radius},
            {"samples_used", e.samples_used},
            {"samples_skipped", e.samples_skipped}};
}

Json to_json(const RateReport& r)
{
    return {{"rate", r.rate},
            {"assumption_ok", r.assumption_ok},
            {"inputs", {{"m", r.m}, {"kappa_bar", r.kappa_bar}, {"gamma_bar", r.gamma_bar}, {"lambda", r.lambda}}}};
}

Json to_json(const Trace& trace)
{
    Json records = Json::array();
    for (const auto& rec : trace.records) {
        Json row{{"k", rec.k}, {"lambda", rec.lambda}, {"x", to_json(rec.x)}, {"dist", rec.dist}};
        row["ratio_sq"] = rec.ratio_sq ? Json(*rec.ratio_sq) : Json();
        row["residual"] = rec.residual ? Json(*rec.residual) : Json();
        row["chosen_index"] = rec.chosen_index ? Json(*rec.chosen_index) : Json();
        records.push_back(std::move(row));
    }
    return {{"status", trace.status == RunStatus::converged ? "converged" : "budget_exhausted"},
            {"records", std::move(records)}};
}

Vector vector_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) {
        throw ConfigError(path, "expected a nonempty array of numbers");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = real_from_json(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

Matrix matrix_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) {
        throw ConfigError(path, "expected a nonempty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix M;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row_path = path + "[" + std::to_string(r) + "]";
        const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], row_path);
        if (r == 0) {
            M.resize(rows, row.size());
        } else if (row.size() != M.cols()) {
            throw ConfigError(row_path, "row has " + std::to_string(row.size()) + " entries, expected " +
                                            std::to_string(M.cols()));
        }
        M.row(r) = row.transpose();
    }
    return M;
}

ConvexSet set_from_json(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    const auto type = type_of(j, path);
    if (type == "box") {
        require_object(j, path, {"type", "lower", "upper"});
        auto lower = vector_from_json(field(j, path, "lower"), path + ".lower");
        auto upper = vector_from_json(field(j, path, "upper"), path + ".upper");
        return at_path(path, [&] { return ConvexSet(Box{lower, upper}); });
    }
    if (type == "halfspace" || type == "hyperplane") {
        require_object(j, path, {"type", "a", "b"});
        auto a = vector_from_json(field(j, path, "a"), path + ".a");
        const double b = real_from_json(field(j, path, "b"), path + ".b");
        return at_path(path, [&] {
            return type == "halfspace" ? ConvexSet(Halfspace{a, b}) : ConvexSet(Hyperplane{a, b});
        });
    }
    if (type == "ball") {
        require_object(j, path, {"type", "center", "radius"});
        auto center = vector_from_json(field(j, path, "center"), path + ".center");
        const double radius = real_from_json(field(j, path, "radius"), path + ".radius");
        return at_path(path, [&] { return ConvexSet(Ball{center, radius}); });
    }
    if (type == "affine") {
        require_object(j, path, {"type", "A", "b"});
        auto A = matrix_from_json(field(j, path, "A"), path + ".A");
        auto b = vector_from_json(field(j, path, "b"), path + ".b");
        return at_path(path, [&] { return ConvexSet(AffineSubspace{A, b}); });
    }
    if (type == "singleton") {
        require_object(j, path, {"type", "point"});
        auto p = vector_from_json(field(j, path, "point"), path + ".point");
        return at_path(path, [&] { return ConvexSet(Singleton{p}); });
    }
    if (type == "full_space") {
        require_object(j, path, {"type", "dim"});
        const Json& d = field(j, path, "dim");
        if (!d.is_number_integer()) {
            throw ConfigError(path + ".dim", "expected an integer");
        }
        return at_path(path, [&] { return ConvexSet(FullSpace{d.get<Eigen::Index>()}); });
    }
    throw ConfigError(path + ".type", "unknown set type '" + type + "'");
}

MonotoneOperator operator_from_json(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    const auto type = type_of(j, path);
    if (type == "linear") {
        require_object(j, path, {"type", "A"});
        auto A = matrix_from_json(field(j, path, "A"), path + ".A");
        return at_path(path + ".A", [&] { return MonotoneOperator(LinearOp{A}); });
    }
    if (type == "normal_cone") {
        require_object(j, path, {"type", "set"});
        return MonotoneOperator(NormalConeOp{set_from_json(field(j, path, "set"), path + ".set")});
    }
    if (type == "subdiff_quadratic") {
        require_object(j, path, {"type", "Q", "c"});
        auto Q = matrix_from_json(field(j, path, "Q"), path + ".Q");
        auto c = vector_from_json(field(j, path, "c"), path + ".c");
        return at_path(path, [&] { return MonotoneOperator(SubdiffQuadratic{Q, c}); });
    }
    if (type == "subdiff_l1") {
        require_object(j, path, {"type", "w", "dim"});
        const double w = real_from_json(field(j, path, "w"), path + ".w");
        const Json& d = field(j, path, "dim");
        if (!d.is_number_integer()) {
            throw ConfigError(path + ".dim", "expected an integer");
        }
        return at_path(path, [&] { return MonotoneOperator(SubdiffL1{w, d.get<Eigen::Index>()}); });
    }
    if (type == "shifted") {
        require_object(j, path, {"type", "base", "b"});
        auto base = std::make_shared<const MonotoneOperator>(operator_from_json(field(j, path, "base"), path + ".base"));
        auto b = vector_from_json(field(j, path, "b"), path + ".b");
        return at_path(path, [&] { return MonotoneOperator(Shifted{base, b}); });
    }
    throw ConfigError(path + ".type", "unknown operator type '" + type + "'");
}

LambdaSchedule schedule_from_json(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    const auto type = type_of(j, path);
    if (type == "constant") {
        require_object(j, path, {"type", "lambda"});
        const double lambda = real_from_json(field(j, path, "lambda"), path + ".lambda");
        return at_path(path + ".lambda", [&] { return LambdaSchedule::constant(lambda); });
    }
    if (type == "geometric") {
        require_object(j, path, {"type", "lambda0", "factor"});
        const double lambda0 = real_from_json(field(j, path, "lambda0"), path + ".lambda0");
        const double factor = real_from_json(field(j, path, "factor"), path + ".factor");
        return at_path(path, [&] { return LambdaSchedule::geometric(lambda0, factor); });
    }
    throw ConfigError(path + ".type", "unknown schedule type '" + type + "'");
}

void write_trace_csv(std::ostream& out, const Trace& trace)
{
    out << "k,lambda,dist,ratio_sq,residual,chosen_index\n";
    for (const auto& rec : trace.records) {
        out << rec.k << ',' << format_real(rec.lambda) << ',' << format_real(rec.dist) << ',';
        if (rec.ratio_sq) {
            out << format_real(*rec.ratio_sq);
        }
        out << ',';
        if (rec.residual) {
            out << format_real(*rec.residual);
        }
        out << ',';
        if (rec.chosen_index) {
            out << *rec.chosen_index;
        }
        out << '\n';
    }
}

} // namespace proxreg
