#include "proxreg/errors.hpp"
#include "proxreg/serialization.hpp"

#include "support/problems.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace proxreg;
using proxreg::testing::bundled_operators;
using proxreg::testing::bundled_sets;
using proxreg::testing::linear;
using proxreg::testing::vec;

TEST(Serialization, SetsRoundTrip)
{
    for (const auto& [name, s] : bundled_sets()) {
        const Json j = to_json(s);
        EXPECT_EQ(j.at("type"), name);
        EXPECT_EQ(to_json(set_from_json(j, "set")), j) << name;
    }
}

TEST(Serialization, OperatorsRoundTrip)
{
    for (const auto& [name, op] : bundled_operators()) {
        const Json j = to_json(op);
        EXPECT_EQ(to_json(operator_from_json(j, "op")), j) << name;
    }
}

TEST(Serialization, SchedulesRoundTrip)
{
    for (const auto& s : {LambdaSchedule::constant(0.5), LambdaSchedule::geometric(1.0, 2.0)}) {
        const Json j = to_json(s);
        EXPECT_EQ(to_json(schedule_from_json(j, "schedule")), j);
    }
}

TEST(Serialization, ErrorsCarryPaths)
{
    try {
        (void)operator_from_json(Json::parse(R"({"type":"linear","A":[[-1,0],[0,0]]})"), "problem.operators[0]");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "problem.operators[0].A");
        EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
    }
    try {
        (void)set_from_json(Json::parse(R"({"type":"ball","center":[0],"radius":1,"extra":2})"), "s");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "s.extra");
    }
    EXPECT_THROW((void)set_from_json(Json::parse(R"({"type":"torus"})"), "s"), ConfigError);
    EXPECT_THROW((void)vector_from_json(Json::parse(R"([1,"x"])"), "v"), ConfigError);
    EXPECT_THROW((void)matrix_from_json(Json::parse(R"([[1,2],[3]])"), "M"), ConfigError);
}

TEST(Serialization, TraceCsvFormat)
{
    Trace trace;
    IterationRecord a;
    a.k = 0;
    a.lambda = 1.0;
    a.x = vec({1.0});
    a.dist = 1.0;
    a.ratio_sq = 0.25;
    a.residual = 0.5;
    a.chosen_index = 1;
    IterationRecord b;
    b.k = 1;
    b.lambda = 1.0;
    b.x = vec({0.5});
    b.dist = 0.5;
    trace.records = {a, b};
    std::ostringstream out;
    write_trace_csv(out, trace);
    EXPECT_EQ(out.str(), "k,lambda,dist,ratio_sq,residual,chosen_index\n0,1,1,0.25,0.5,1\n1,1,0.5,,,\n");
}

TEST(Serialization, RealsRoundTripExactly)
{
    const double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(Serialization, TraceJsonUsesNullForUndefinedFields)
{
    Trace trace;
    IterationRecord r;
    r.x = vec({0.0});
    trace.records = {r};
    trace.status = RunStatus::converged;
    const Json j = to_json(trace);
    EXPECT_EQ(j.at("status"), "converged");
    EXPECT_TRUE(j.at("records").at(0).at("ratio_sq").is_null());
}
