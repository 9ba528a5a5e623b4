#include "doctest.h"
#include "quotver/badlocus.hpp"
#include "quotver/blowup.hpp"
#include "quotver/ledger.hpp"
#include "quotver/parse.hpp"

using namespace qv;

namespace {

BadComponent pt(const std::string& label, std::vector<long long> c) {
    BadComponent b;
    b.label = label;
    for (auto x : c) b.coords.push_back(x);
    return b;
}

}  // namespace

TEST_CASE("finite fields from the Conway table are primitive") {
    for (long long p : {2, 3, 5, 7})
        for (int k = 1; k <= 4; ++k) {
            GaloisField F(p, k);
            CHECK(F.from_table());
            CHECK(F.size() > 1);
            // x^(q-1) = 1 for every nonzero element
            for (std::int64_t a = 1; a < std::min<std::int64_t>(F.size(), 50); ++a) {
                std::int64_t acc = 1;
                for (std::int64_t i = 0; i < F.size() - 1; ++i) acc = F.mul(acc, a);
                CHECK(acc == 1);
            }
        }
}

TEST_CASE("bad locus of the 2-adic blow-up") {
    auto ctx = RingContext::eisenstein(2, {Coef(-2)});
    auto r = Ring::make(ctx, {"x0", "x1", "e2"}, Poly::var(2));
    std::vector<Frac> tau{parse_frac(r, "-x0/(1+x0)"), parse_frac(r, "-x1/(1+x1)"), parse_frac(r, "2-e2")};
    Chart y0 = make_root_chart("Y0", Action(r, tau));
    Chart u0 = blowup_chart(y0, {0, 1, 2}, 0, {"x0", "y1", "y2"}, "U0", "E0");
    BadLocusClaim c{"u0", {1, 0, 0}, {pt("a", {0, 0, 0}), pt("b", {0, 1, 0}), pt("c", {0, 0, 1}), pt("d", {0, 1, 1})}};
    auto rep = certify_bad_locus(u0.action, c, 4);
    CHECK(rep.containment);
    CHECK(rep.complete);
    CHECK(rep.exact);
    CHECK(rep.found_fp.size() == 4);

    BadLocusClaim missing{"u0", {1, 0, 0}, {pt("a", {0, 0, 0}), pt("b", {0, 1, 0}), pt("c", {0, 0, 1})}};
    auto rep2 = certify_bad_locus(u0.action, missing, 2);
    CHECK_FALSE(rep2.complete);
    BadLocusClaim wrong{"u0", {1, 0, 0}, {pt("z", {0, 1, 1}), pt("w", {1, 1, 1})}};
    CHECK_FALSE(certify_bad_locus(u0.action, wrong, 2).containment);

    Chart u2 = blowup_chart(y0, {0, 1, 2}, 2, {"y0", "y1", "e2"}, "U2", "E0");
    BadLocusClaim c2{"u2", {0, 0, 1}, {pt("a", {0, 0, 0}), pt("b", {1, 0, 0}), pt("c", {0, 1, 0}), pt("d", {1, 1, 0})}};
    auto rep3 = certify_bad_locus(u2.action, c2, 4);
    CHECK(rep3.ok());
    CHECK(rep3.exact);
}

TEST_CASE("ledger solves the discrepancy chain") {
    Ledger l(5);
    std::vector<std::string> syms{"E0", "E1", "E2", "E3", "E4", "E5", "E6"};
    // centers: point, then pullbacks chosen to reproduce the char-5 chain
    l.record_blowup("E0", 3, {});
    l.record_blowup("E1", 2, {{"E0", 1}});
    l.record_blowup("E2", 2, {{"E0", 1}, {"E1", 1}});
    CHECK(l.canonical().str() == "2E0 + 3E1 + 6E2");
    Ledger z(2);
    z.record_blowup("E0", 3, {});
    RamificationReport rr;
    rr.divisor = "E0";
    rr.artin = 1;
    rr.kind = RamKind::Fierce;
    rr.different = 1;
    z.record_ramification({rr});
    auto a = z.solve();
    REQUIRE(a.size() == 1);
    CHECK(a[0].second == 1);
    CHECK(z.consistent());
    Ledger u(2);
    u.record_blowup("E0", 3, {});
    CHECK_THROWS_WITH_AS(u.solve(), doctest::Contains("E0"), std::invalid_argument);
}
