#include <doctest.h>

#include "gwlife/errors.hpp"
#include "gwlife/model_io.hpp"
#include "gwlife/report_json.hpp"

using namespace gwlife;
using doctest::Approx;

TEST_CASE("parses every kind") {
    const ModelSpec a = parse_model_spec(std::string_view(
        R"({"offspring": {"kind": "pmf", "p": [0.25, 0.5, 0.25]}, "lifetime": {"kind": "geometric", "mean": 1}})"));
    CHECK(std::holds_alternative<offspring::Pmf>(a.offspring));
    const ModelSpec b = parse_model_spec(std::string_view(
        R"({"offspring": {"kind": "point", "j": 2}, "lifetime": {"kind": "pmf", "h": [0, 1]}})"));
    CHECK(std::get<offspring::Point>(b.offspring).j == 2);
    const ModelSpec c = parse_model_spec(std::string_view(
        R"({"offspring": {"kind": "poisson", "mean": 0.3}, "lifetime": {"kind": "power_tilt", "a": 0.5, "b": 3}})"));
    CHECK(std::get<lifetime::PowerTilt>(c.lifetime).b == 3.0);
}

TEST_CASE("critical offspring mean resolves to 1 / l") {
    const ModelSpec spec = parse_model_spec(std::string_view(
        R"({"offspring": {"kind": "geometric", "mean": "critical"}, "lifetime": {"kind": "geometric", "mean": 2}})"));
    const Model model = build_model(spec);
    CHECK(model.offspring.mean() == Approx(0.5));
    CHECK(to_json(spec)["offspring"]["mean"] == "critical");
}

TEST_CASE("rejects malformed specs") {
    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_model_spec(std::string_view(text)), ModelError); };
    bad(R"({"offspring": {"kind": "binomial", "n": 2}, "lifetime": {"kind": "geometric", "mean": 1}})");
    bad(R"({"offspring": {"kind": "point", "j": 2}, "lifetime": {"kind": "weibull"}})");
    bad(R"({"offspring": {"kind": "point", "j": 2.5}, "lifetime": {"kind": "geometric", "mean": 1}})");
    bad(R"({"offspring": {"kind": "point", "j": 2}})");
    bad(R"({"offspring": {"kind": "poisson"}, "lifetime": {"kind": "geometric", "mean": 1}})");
    bad(R"({"offspring": {"kind": "point", "j": 2}, "lifetime": {"kind": "geometric", "mean": 1}, "extra": 1})");
    bad("not json");
    CHECK_THROWS_AS(load_model_spec("/nonexistent/spec.json"), ModelError);
}

TEST_CASE("spec round trip") {
    const std::string text =
        R"({"offspring":{"kind":"pmf","p":[0.2,0.8]},"lifetime":{"kind":"power_tilt","a":1.0,"b":4.0}})";
    const ModelSpec spec = parse_model_spec(std::string_view(text));
    const ModelSpec again = parse_model_spec(std::string_view(to_json(spec).dump()));
    CHECK(to_json(again) == to_json(spec));
}

TEST_CASE("extended reals serialize as finite objects or inf") {
    CHECK(to_json(ExtendedReal::infinity()) == "inf");
    CHECK(to_json(ExtendedReal::finite(0.25))["finite"] == 0.25);
}
