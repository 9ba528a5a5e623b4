#include "doctest.h"
#include "quotver/blowup.hpp"
#include "quotver/parse.hpp"
#include "quotver/singularity.hpp"

using namespace qv;

TEST_CASE("reid_tai examples") {
    CHECK(reid_tai(SingularityType(2, {1, 1, 1})).verdict == ReidTai::Terminal);
    CHECK(reid_tai(SingularityType(3, {1, 1, 1})).verdict == ReidTai::Canonical);
    auto r = reid_tai(SingularityType(3, {1, 1, 2}));
    CHECK(r.verdict == ReidTai::Terminal);
    CHECK(r.sums == std::vector<long long>{4, 5});
    CHECK(reid_tai(SingularityType(5, {2, 3, 4})).verdict == ReidTai::Terminal);
    CHECK_THROWS_WITH_AS(reid_tai(SingularityType(4, {1, 2, 0})), doctest::Contains("gcd(4,2,0)=2"), std::invalid_argument);
}

TEST_CASE("reid_tai_pair examples") {
    CHECK(reid_tai_pair(SingularityType(5, {0, 1, 2}), {0, -3, -2}).ok);
    CHECK_FALSE(reid_tai_pair(SingularityType(2, {1, 1, 1}), {mpq_class(1, 2), mpq_class(3, 5), 0}).ok);
    CHECK(reid_tai_pair(SingularityType(3, {1, 1, 1}), {-1, 0, 0}).ok);
}

TEST_CASE("canonical types") {
    CHECK(SingularityType(3, {-1, 1, -1}).equivalent(SingularityType(3, {1, 1, 2})));
    CHECK(SingularityType(5, {-2, 2, -2}).canonical().b == std::vector<long long>{1, 1, 4});
    CHECK_FALSE(SingularityType(3, {1, 1, 1}).equivalent(SingularityType(3, {1, 1, 2})));
}

TEST_CASE("check_mup on the 2-adic blow-up") {
    auto ctx = RingContext::eisenstein(2, {Coef(-2)});
    auto r = Ring::make(ctx, {"x0", "x1", "e2"}, Poly::var(2));
    std::vector<Frac> tau{parse_frac(r, "-x0/(1+x0)"), parse_frac(r, "-x1/(1+x1)"), parse_frac(r, "2-e2")};
    Chart y0 = make_root_chart("Y0", Action(r, tau));
    Chart u0 = blowup_chart(y0, {0, 1, 2}, 0, {"x0", "y1", "y2"}, "U0", "E0");
    for (auto pt : std::vector<std::vector<long long>>{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 1, 1}}) {
        Chart c = shifted_chart(u0, pt, {"x0", "z1", "z2"}, "P");
        auto x0 = Frac::var(c.ring(), 0);
        auto m = check_mup(c.action, x0, x0);
        INFO(m.reason);
        REQUIRE(m.outcome == MupOutcome::Toric);
        CHECK(m.type.equivalent(SingularityType(2, {1, 1, 1})));
        CHECK(m.p_condition);
    }
    auto rr = ramification(u0.action, 0, "E0");
    CHECK(rr.artin == 1);
    CHECK(rr.valuation_I_t == 2);
    CHECK(rr.kind == RamKind::Fierce);
    CHECK(rr.different == 1);
    // a point off the bad locus is not fixed with these witnesses
    Chart c = shifted_chart(u0, {0, 1, 0}, {"x0", "z1", "z2"}, "P");
    CHECK(c.action.fixes_point({0, 0, 0}));
}

TEST_CASE("check_mup regular branch and wild ramification") {
    auto r = Ring::make(RingContext::positive(2), {"x", "y"});
    Action a(r, {parse_frac(r, "x/(1+x)"), parse_frac(r, "y*(1+x^2)")});
    CHECK(a.check_order());
    auto m = check_mup(a, parse_frac(r, "x^2"), parse_frac(r, "y"));
    CHECK(m.outcome == MupOutcome::Regular);

    auto r1 = Ring::make(RingContext::positive(2), {"x"});
    Action b(r1, {parse_frac(r1, "x/(1+x)")});
    auto rr = ramification(b, 0, "E");
    CHECK(rr.artin == 2);
    CHECK(rr.kind == RamKind::Wild);
    CHECK(rr.different == 2);
    CHECK(rr.index == 2);

    auto r2 = Ring::make(RingContext::positive(2), {"x", "y"});
    Action sw(r2, {parse_frac(r2, "y"), parse_frac(r2, "x")});
    CHECK(ramification(sw, 0, "E").kind == RamKind::Unramified);
}

TEST_CASE("divisor weights in characteristic 3") {
    auto r = Ring::make(RingContext::positive(3), {"x", "y", "z"});
    // linear action with I(v) = x*(weight*v + ...)
    Action a(r, {parse_frac(r, "x/(1+x)"), parse_frac(r, "y*(1+x)"), parse_frac(r, "z*(1+2*x)")});
    REQUIRE(a.check_order());
    auto m = check_mup(a, parse_frac(r, "x"), parse_frac(r, "x"));
    REQUIRE(m.outcome == MupOutcome::Toric);
    CHECK(m.eigen_raw == std::vector<long long>{2, 1, 2});
    CHECK(divisor_weight(a, m, 1).raw == 1);
    CHECK(divisor_weight(a, m, 2).raw == 2);
    Action inv(r, {parse_frac(r, "x/(1+x)"), parse_frac(r, "y"), parse_frac(r, "z")});
    auto m2 = check_mup(inv, parse_frac(r, "x"), parse_frac(r, "x"));
    REQUIRE(m2.outcome == MupOutcome::Toric);
    CHECK(divisor_weight(inv, m2, 1).raw == 0);
}
