#include "doctest.h"

#include "smsctl/cli_config.hpp"
#include "smsctl/error.hpp"

#include <sstream>

using namespace smsctl;

TEST_CASE("cli config resolves paths against its directory")
{
    std::istringstream in("# x\ntaxonomy = fixtures/t.tsv\nontology = /abs/o.tsv\ntheta = 1.5\nh = 4\n"
                          "weight_s = 0.75\nseed = 9\n");
    const auto cfg = parse_cli_config(in, "/etc/smsctl");
    CHECK(cfg.taxonomy == "/etc/smsctl/fixtures/t.tsv");
    CHECK(cfg.ontology == "/abs/o.tsv");
    CHECK(cfg.engine.theta == 1.5);
    CHECK(cfg.engine.h == 4);
    CHECK(cfg.engine.weights.synonym == 0.75);
    CHECK(cfg.engine.weights.original == 1.0);
    CHECK(cfg.seed == 9);
    CHECK(cfg.stopwords.empty());
}

TEST_CASE("cli config defaults the ontology next to the config")
{
    std::istringstream in("");
    CHECK(parse_cli_config(in, "/data").ontology == "/data/ontology.tsv");
}

TEST_CASE("cli config errors")
{
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parse_cli_config(in, ".");
    };
    CHECK_THROWS_AS(parse("colour = red\n"), ParseError);
    CHECK_THROWS_AS(parse("theta\n"), ParseError);
    CHECK_THROWS_AS(parse("theta = high\n"), ParseError);
    CHECK_THROWS_AS(parse("h = -1\n"), ParseError);
    CHECK_THROWS_AS(parse("theta = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_cli_config("/nonexistent/smsctl.conf"), ConfigError);
    CliConfig empty;
    CHECK_THROWS_AS(load_lexicon(empty), ConfigError);
    empty.taxonomy = "/nonexistent/t.tsv";
    CHECK_THROWS_AS(load_lexicon(empty), ConfigError);
}
