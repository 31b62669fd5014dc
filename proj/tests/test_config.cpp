#include "ucrlb/config.hpp"

#include <doctest.h>

using namespace ucrlb;

TEST_CASE("key-value config parses dotted keys, comments and lists") {
    const auto config = KeyValueConfig::parse(
        "# experiment\n"
        "env.name = riverswim   # trailing comment\n"
        "\n"
        "env.params.n=6\n"
        "run.algorithms = ucrl2b, ucrl2-hoeffding\n"
        "run.delta = 0.05\n");
    CHECK(config.get_string("env.name") == "riverswim");
    CHECK(config.get_uint("env.params.n") == 6);
    CHECK(config.get_double("run.delta") == doctest::Approx(0.05));
    CHECK(config.get_list("run.algorithms") == std::vector<std::string>{"ucrl2b", "ucrl2-hoeffding"});
    CHECK(config.line_of("env.params.n") == 4);
    CHECK(config.with_prefix("env.params.") == std::map<std::string, std::string>{{"n", "6"}});
    CHECK(config.get_double("missing", 2.5) == 2.5);
}

TEST_CASE("config errors carry field and line") {
    try {
        KeyValueConfig::parse("a = 1\nb = 2\na = 3\n");
        FAIL("expected duplicate-key error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "a");
        CHECK(e.line() == 3);
    }

    try {
        KeyValueConfig::parse("just words\n");
        FAIL("expected syntax error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 1);
    }

    const auto config = KeyValueConfig::parse("x = abc\ny = -3\n");
    try {
        config.get_double("x");
        FAIL("expected number error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "x");
        CHECK(e.line() == 1);
    }
    CHECK_THROWS_AS(config.get_uint("y"), ConfigError);
    CHECK_THROWS_AS(config.get_string("z"), ConfigError);
}
