#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "perisys/config.hpp"
#include "perisys/report.hpp"

using namespace perisys;

namespace {

bool mentions(const LoadResult& r, const std::string& needle)
{
    return std::any_of(r.errors.begin(), r.errors.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

json minimal()
{
    return json::parse(R"({
        "problem": {"p": 1.5, "q": 1.5, "m": 2, "n": 2, "T": 1, "a": 5, "b": 5,
                    "K1": 1, "K2": 0.1, "K3": 0.1, "K4": 1},
        "numerics": {"N": 20, "S": 100}
    })");
}

} // namespace

TEST(Config, EveryPresetLoads)
{
    const auto names = preset_names();
    EXPECT_GE(names.size(), 9u);
    EXPECT_NE(std::find(names.begin(), names.end(), "coercive-cooperative"), names.end());
    for (const auto& n : names) {
        const LoadResult r = load_preset(n);
        EXPECT_TRUE(r.ok()) << n << ": " << (r.errors.empty() ? "" : r.errors.front());
        if (r.ok())
            EXPECT_NO_THROW(make_spec(*r.config)) << n;
    }
}

TEST(Config, CooperativePresetValues)
{
    const LoadResult r = load_preset("coercive-cooperative");
    ASSERT_TRUE(r.ok());
    const auto spec = make_spec(*r.config);
    EXPECT_EQ(spec->p, 1.5);
    EXPECT_EQ(spec->m, 2.0);
    EXPECT_EQ(spec->grid->nx(), 200u);
    EXPECT_EQ(r.config->numerics.S, 2000u);
    EXPECT_DOUBLE_EQ(r.config->numerics.dt * static_cast<double>(r.config->numerics.S), spec->T);
    EXPECT_EQ(spec->sup_a(), 5.0);
    EXPECT_EQ(spec->epsilon, 1e-2);
}

TEST(Config, ExponentOutOfRange)
{
    json j = minimal();
    j["problem"]["p"] = 2.5;
    const LoadResult r = parse_config(j);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(mentions(r, "/problem/p")) << r.errors.front();
    EXPECT_TRUE(mentions(r, "(1,2)"));
}

TEST(Config, StepInconsistentWithPeriod)
{
    json j = minimal();
    j["numerics"]["dt"] = 0.02;
    const LoadResult r = parse_config(j);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(mentions(r, "/numerics/dt"));
    j["numerics"]["dt"] = 0.01;
    EXPECT_TRUE(parse_config(j).ok());
}

TEST(Config, UnknownKeysRejected)
{
    json j = minimal();
    j["problem"]["kappa"] = 1;
    EXPECT_TRUE(mentions(parse_config(j), "/problem/kappa"));
    json k = minimal();
    k["extra"] = true;
    EXPECT_TRUE(mentions(parse_config(k), "/extra"));
}

TEST(Config, PresetOverride)
{
    json j = json::parse(R"({"preset": "coercive-cooperative", "numerics": {"N": 50, "S": 500}})");
    const LoadResult r = parse_config(j);
    ASSERT_TRUE(r.ok()) << r.errors.front();
    EXPECT_EQ(r.config->numerics.N, 50u);
    EXPECT_EQ(r.config->problem.p, 1.5);
    EXPECT_TRUE(mentions(parse_config(json{{"preset", "no-such"}}), "/preset"));
}

TEST(Config, MissingFile)
{
    const LoadResult r = load_config("/nonexistent/config.json");
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.errors.empty());
}

TEST(Report, DeterministicNumbers)
{
    json j = json::object();
    j["third"] = 1.0 / 3.0;
    j["big"] = 1e300;
    j["inf"] = std::numeric_limits<double>::infinity();
    j["n"] = 7;
    j["list"] = {0.1, 0.2};
    const std::string a = to_json_text(j), b = to_json_text(j);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("0.33333333333333331"), std::string::npos) << a;
    EXPECT_NE(a.find("\"inf\""), std::string::npos);
    EXPECT_EQ(a.back(), '\n');
    // ordered keys and a round trip at full precision
    EXPECT_LT(a.find("third"), a.find("big"));
    const json back = json::parse(a);
    EXPECT_EQ(back["third"].get<double>(), 1.0 / 3.0);
    EXPECT_EQ(back["list"][1].get<double>(), 0.2);
}
