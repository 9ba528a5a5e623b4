#include "doctest.h"
#include "quotver/blowup.hpp"
#include "quotver/parse.hpp"

using namespace qv;

namespace {

Chart z2_root() {
    auto ctx = RingContext::eisenstein(2, {Coef(-2)});
    auto r = Ring::make(ctx, {"x0", "x1", "e2"}, Poly::var(2));
    std::vector<Frac> tau{parse_frac(r, "-x0/(1+x0)"), parse_frac(r, "-x1/(1+x1)"), parse_frac(r, "2-e2")};
    return make_root_chart("Y0", Action(r, tau));
}

}  // namespace

TEST_CASE("point blow-up of the 2-adic example") {
    Chart y0 = z2_root();
    PullbackTable pb;
    Chart u0 = blowup_chart(y0, {0, 1, 2}, 0, {"x0", "y1", "y2"}, "U0", "E0", &pb);
    const auto& r = u0.ring();
    CHECK(r->uniformizer() == parse_poly("x0*y2", r->names()));
    const auto& a = u0.action;
    CHECK(a.tau()[1].equals(parse_frac(r, "y1*(1+x0)/(1+x0*y1)")));
    CHECK(a.tau()[2].equals(parse_frac(r, "-y2*(1-x0*y2)*(1+x0)")));
    CHECK(a.I_coord(0).equals(parse_frac(r, "x0^2*(-1-x0*y2^2+x0^2*y2^3)/(1+x0)")));
    // printed without the unit denominator 1+x0*y1
    CHECK(a.I_coord(1).equals(parse_frac(r, "x0*y1*(1-y1)/(1+x0*y1)")));
    CHECK(a.I_coord(2).equals(parse_frac(r, "x0*y2*(-1-y2+x0*y2+x0*y2^2)")));
    CHECK(a.check_order());
    CHECK(a.check_relation());
    CHECK(u0.divisors.at("E0").equals(Frac::var(r, 0)));

    Chart u2 = blowup_chart(y0, {0, 1, 2}, 2, {"y0", "y1", "e2"}, "U2", "E0");
    const auto& r2 = u2.ring();
    CHECK(u2.action.tau()[0].equals(parse_frac(r2, "y0*(1-e2)/(1+y0*e2)")));
    CHECK(u2.action.tau()[2].equals(parse_frac(r2, "2-e2")));

    ExpansionClaim c{"ix0", parse_frac(r, "x0"), {2, 0, 0}, parse_frac(r, "1"), std::nullopt, {{1, 0, 0}}};
    CHECK(check_expansion_claim(a, c).ok);
    ExpansionClaim c1{"iy1", parse_frac(r, "y1"), {1, 1, 0}, parse_frac(r, "1+y1"), std::nullopt, {{1, 0, 0}}};
    CHECK(check_expansion_claim(a, c1).ok);
    ExpansionClaim bad = c1;
    bad.principal = parse_frac(r, "1+y1+1");
    CHECK_FALSE(check_expansion_claim(a, bad).ok);
    ExpansionClaim exact{"ix0e", parse_frac(r, "x0"), {2, 0, 0}, parse_frac(r, "(-1-x0*y2^2+x0^2*y2^3)/(1+x0)"),
                         std::nullopt, {}};
    CHECK(check_expansion_claim(a, exact).ok);

    ChartLookup lk{{"Y0", &y0}, {"U0", &u0}, {"U2", &u2}};
    // [1,0,1] is (0,0,1) in U0 and (1,0,0) in U2
    CHECK(verify_transition(lk, u0, {0, 0, 1}, u2, {1, 0, 0}).ok);
    CHECK_FALSE(verify_transition(lk, u0, {0, 1, 1}, u2, {1, 0, 0}).ok);
    CHECK(verify_transition(lk, u0, {0, 1, 1}, u0, {0, 1, 1}).ok);
}
