#include <doctest.h>

#include "ccmsel/errors.hpp"
#include "ccmsel/prior_config.hpp"

using namespace ccmsel;

TEST_SUITE("prior_config") {
  TEST_CASE("sections and lists") {
    const auto c = parse_prior_config(R"(# priors
[m2]
alpha = 2
beta = 3.5
prior_model_prob = 0.5
[m3]
mu = 0.1
sigma = 0.02
[m5]
mean = [-4, 0.01, 0.02]
cov = 1,0,0, 0,2,0, 0,0,3
)");
    CHECK(c.spec(ModelId::M2).beta_prior.beta == 3.5);
    CHECK(c.spec(ModelId::M2).prior_model_prob == 0.5);
    CHECK(c.explicit_model_prob.count(ModelId::M2) == 1);
    CHECK(c.spec(ModelId::M3).lambda_prior.sigma == 0.02);
    CHECK(c.spec(ModelId::M5).mvn_prior.mean[2] == 0.02);
    CHECK(c.spec(ModelId::M5).mvn_prior.cov(2, 2) == 3.0);
    CHECK(c.spec(ModelId::M4).block_priors[1].alpha == 1.0);
  }

  TEST_CASE("round trip") {
    PriorConfig c;
    ModelSpec s;
    s.id = ModelId::M3;
    s.lambda_prior = {0.1 + 0.2, 1.0 / 3.0};
    c.specs[ModelId::M3] = s;
    const auto back = parse_prior_config(format_prior_config(c));
    CHECK(back.spec(ModelId::M3).lambda_prior.mu == s.lambda_prior.mu);
    CHECK(back.spec(ModelId::M3).lambda_prior.sigma == s.lambda_prior.sigma);
  }

  TEST_CASE("errors carry line numbers") {
    try {
      parse_prior_config("[m2]\nalpha = 1\ngamma = 2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_prior_config("alpha = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_prior_config("[m2]\nalpha = -1\n"), DomainError);
    CHECK_THROWS_AS(parse_prior_config("[m5]\ncov = 1,0,0, 0,-1,0, 0,0,1\n"), DomainError);
  }
}
