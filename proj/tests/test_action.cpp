#include "doctest.h"
#include "quotver/action.hpp"
#include "quotver/parse.hpp"

using namespace qv;

namespace {

Action make_action(const RingPtr& r, const std::vector<std::string>& tau) {
    std::vector<Frac> imgs;
    for (const auto& t : tau) imgs.push_back(parse_frac(r, t));
    return Action(r, imgs);
}

RingPtr gaussian_ambient() {
    RingContext ctx;
    ctx.p = 2;
    ctx.mode = Mode::MixedChar;
    ctx.relation = {Coef(1), Coef(0), Coef(1)};
    ctx.symbol = "i";
    return Ring::make(ctx, {"x", "y", "i"}, Poly::var(2));
}

}  // namespace

TEST_CASE("sigma and I on the Gaussian ambient chart") {
    auto r = gaussian_ambient();
    auto a = make_action(r, {"1/x", "1/y", "-i"});
    CHECK(a.sigma(parse_frac(r, "x*y")).equals(parse_frac(r, "1/(x*y)")));
    CHECK(a.I(parse_frac(r, "x")).equals(parse_frac(r, "(1-x^2)/x")));
    CHECK(a.I(parse_frac(r, "i")).equals(parse_frac(r, "-2*i")));
    CHECK(a.I(parse_frac(r, "x+1/x")).is_zero());
    CHECK(a.check_order());
    CHECK(a.check_relation());
    CHECK(a.trace(parse_frac(r, "i")).is_zero());
    // i*i = -1 is a unit: i is invertible in this ring
    CHECK(parse_frac(r, "i^2").equals(parse_frac(r, "-1")));
}

TEST_CASE("shift to the fixed point gives the Eisenstein presentation") {
    auto r = gaussian_ambient();
    auto a = make_action(r, {"1/x", "1/y", "-i"});
    auto b = a.shift_origin({1, 1, -1}, {"x0", "x1", "e2"});
    const auto& s = *b.ring();
    CHECK(s.ctx().is_eisenstein());
    CHECK(s.relation_poly() == parse_poly("e2^2-2*e2+2", s.names()));
    CHECK(b.tau()[0].equals(parse_frac(b.ring(), "-x0/(1+x0)")));
    CHECK(b.tau()[2].equals(parse_frac(b.ring(), "2-e2")));
    CHECK(b.check_order());
    CHECK(b.fixes_point({0, 0, 0}));
    auto w = cm_witness(b, parse_frac(b.ring(), "e2-1"), {0, 0, 0});
    CHECK(w.ok);
}

TEST_CASE("check_order negatives and char 3 example") {
    auto r3 = Ring::make(RingContext::positive(3), {"y0", "y1"});
    CHECK(make_action(r3, {"y0", "y0+y1"}).check_order());
    auto r = Ring::make(RingContext::positive(3), {"x"});
    // x -> x + 1 has order 3, not 2
    Action a(r, {parse_frac(r, "x+1")}, 2);
    std::string why;
    CHECK_FALSE(a.check_order(&why));
    CHECK(why.find("moves x") != std::string::npos);
    CHECK(Action(r, {parse_frac(r, "x+1")}).check_order());
}
