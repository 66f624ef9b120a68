#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "parvar/error.hpp"
#include "parvar/groebner/groebner.hpp"
#include "parvar/model/model.hpp"
#include "support/fixtures.hpp"
#include "support/printers.hpp"
#include "support/random_algebra.hpp"

using namespace parvar;
using namespace parvar::testing;

namespace {

// x3 > x2 > x1, read as x > y > z
struct Xyz {
    RingPtr ring = small_ring(3);
    Poly X = parvar::testing::x(ring, 2);
    Poly Y = parvar::testing::x(ring, 1);
    Poly Z = parvar::testing::x(ring, 0);
    Poly k(long v) const { return c(ring, ParamRat(v)); }
};

std::vector<Poly> reduced(const std::vector<Poly>& gens, bool criteria = true)
{
    GbOptions opts;
    opts.use_criteria = criteria;
    return reduced_groebner_basis({gens, gens.front().ring()}, opts).basis;
}

std::vector<Poly> random_ideal(std::mt19937_64& rng, const RingPtr& ring)
{
    std::uniform_int_distribution<int> count(1, 3);
    std::vector<Poly> gens;
    int n = count(rng);
    while (static_cast<int>(gens.size()) < n) {
        Poly p = random_poly(rng, ring, 3, 1, false);
        // total degree <= 2
        Poly q(ring);
        for (const auto& [m, cf] : p.terms()) {
            int d = 0;
            for (auto e : m) {
                d += e;
            }
            if (d <= 2) {
                q.add_term(m, cf);
            }
        }
        if (!q.is_zero()) {
            gens.push_back(q);
        }
    }
    return gens;
}

} // namespace

TEST(SPolynomial, OfItselfIsZero)
{
    Xyz r;
    Poly f = r.X * r.Y - r.Z;
    EXPECT_TRUE(s_polynomial(f, f).is_zero());
}

TEST(SPolynomial, LinearPair)
{
    Xyz r;
    EXPECT_EQ(s_polynomial(r.X - r.Y, r.X - r.Z), r.Z - r.Y);
}

TEST(SPolynomial, MonomialIdealReducesToZero)
{
    Xyz r;
    std::vector<Poly> g{r.X * r.X, r.X * r.Y};
    EXPECT_TRUE(normal_form(s_polynomial(g[0], g[1]), g).is_zero());
}

TEST(Buchberger, SinglePolynomialIsItsOwnBasis)
{
    Xyz r;
    Poly f = r.k(3) * r.X * r.Y + r.Z;
    auto gb = reduced({f});
    ASSERT_EQ(gb.size(), 1u);
    EXPECT_EQ(gb[0], f.monic());
}

TEST(ReduceBasis, DropsScaledDuplicate)
{
    Xyz r;
    auto gb = reduce_basis({r.X - r.Y, r.k(2) * r.X - r.k(2) * r.Y}, r.ring);
    ASSERT_EQ(gb.basis.size(), 1u);
    EXPECT_EQ(gb.basis[0], r.X - r.Y);
}

TEST(ReduceBasis, Idempotent)
{
    std::mt19937_64 rng(7);
    auto ring = small_ring(3);
    for (int t = 0; t < 20; ++t) {
        auto gb = reduced(random_ideal(rng, ring));
        EXPECT_EQ(reduce_basis(gb, ring).basis, gb);
    }
}

TEST(Buchberger, UnitIdeal)
{
    Xyz r;
    auto gb = reduced({r.X, r.X + r.k(1)});
    ASSERT_EQ(gb.size(), 1u);
    EXPECT_EQ(gb[0], r.k(1));
}

TEST(Buchberger, ResourceCapRaises)
{
    Xyz r;
    GbOptions opts;
    opts.max_pairs = 1;
    std::vector<Poly> gens{r.X * r.X - r.Y, r.X * r.Y - r.Z, r.Y * r.Y - r.X * r.Z + r.k(1)};
    try {
        buchberger({gens, r.ring}, opts);
        FAIL() << "expected ResourceExhausted";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ResourceExhausted);
    }
}

TEST(Buchberger, CriteriaDoNotChangeResult)
{
    std::mt19937_64 rng(19);
    auto ring = small_ring(3);
    for (int t = 0; t < 40; ++t) {
        auto gens = random_ideal(rng, ring);
        EXPECT_EQ(reduced(gens, true), reduced(gens, false));
    }
}

TEST(Buchberger, GeneratorsAndSPolynomialsReduceToZero)
{
    std::mt19937_64 rng(23);
    auto ring = small_ring(3);
    for (int t = 0; t < 40; ++t) {
        auto gens = random_ideal(rng, ring);
        auto gb = reduced(gens);
        for (const auto& g : gens) {
            EXPECT_TRUE(normal_form(g, gb).is_zero());
        }
        EXPECT_TRUE(is_groebner_basis(gb));
    }
}

TEST(Buchberger, PermutationInvariant)
{
    std::mt19937_64 rng(29);
    auto ring = small_ring(3);
    for (int t = 0; t < 30; ++t) {
        auto gens = random_ideal(rng, ring);
        auto base = reduced(gens);
        std::shuffle(gens.begin(), gens.end(), rng);
        EXPECT_EQ(reduced(gens), base);
    }
}

TEST(Buchberger, ParameterCoefficients)
{
    std::mt19937_64 rng(31);
    auto ring = small_ring(2);
    for (int t = 0; t < 15; ++t) {
        std::vector<Poly> gens{random_poly(rng, ring, 3, 1, true), random_poly(rng, ring, 3, 1, true)};
        if (gens[0].is_zero() || gens[1].is_zero()) {
            continue;
        }
        auto gb = reduced(gens);
        EXPECT_TRUE(is_groebner_basis(gb));
        for (const auto& g : gens) {
            EXPECT_TRUE(normal_form(g, gb).is_zero());
        }
    }
}

class ViralBasis : public ::testing::Test {
protected:
    void SetUp() override
    {
        model = load_model(model_path("viral.model"));
        sys = prolong(model, 2);
        gb = reduced_groebner_basis({sys.gens, sys.ring});
    }

    // viral params are a4, a5, a6, a7 in that order
    static ParamRat a(int k) { return ParamRat::parameter(static_cast<std::size_t>(k - 4)); }

    Poly ioeq() const
    {
        const auto& R = sys.ring;
        return y(R, 2) + c(R, a(4) + a(7)) * y(R, 1) + c(R, a(4) * a(5) * a(7)) * y(R);
    }

    ModelSpec model;
    ProlongedSystem sys;
    ReducedGB gb;
};

TEST_F(ViralBasis, MatchesSevenElementBasis)
{
    const auto& R = sys.ring;
    ParamRat D = a(5) * a(6) - a(6);
    std::vector<Poly> expected{
        x(R, 1, 2) + c(R, a(4) + a(7)) * y(R, 1) + c(R, a(4) * a(5) * a(7)) * y(R),
        x(R, 0, 2) + c(R, (a(4) * a(4) - a(4) * a(5) * a(7) + a(4) * a(7)) / D) * y(R, 1)
            + c(R, a(4) * a(4) * a(5) * a(7) / D) * y(R),
        x(R, 1, 1) - y(R, 1),
        x(R, 0, 1) - c(R, a(4) / D) * y(R, 1) - c(R, a(4) * a(5) * a(7) / D) * y(R),
        x(R, 1) - y(R),
        x(R, 0) + c(R, ParamRat(1) / D) * y(R, 1) + c(R, a(7) / D) * y(R),
        ioeq(),
    };
    EXPECT_EQ(gb.basis, expected);
}

TEST_F(ViralBasis, EliminationOfStates)
{
    const auto& R = sys.ring;
    std::vector<DiffVar> keep{{VarKind::Output, 0, 2}, {VarKind::Output, 0, 1}, {VarKind::Output, 0, 0}};
    auto j = elimination_subset(gb, keep);
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0], ioeq());
    (void)R;
}

TEST_F(ViralBasis, EliminationKeepAllAndNone)
{
    EXPECT_EQ(elimination_subset(gb, sys.ring->vars()), gb.basis);
    EXPECT_TRUE(elimination_subset(gb, {}).empty());
}

TEST_F(ViralBasis, EliminationRejectsNonSuffix)
{
    std::vector<DiffVar> keep{{VarKind::State, 1, 2}};
    try {
        elimination_subset(gb, keep);
        FAIL() << "expected InvalidBlock";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidBlock);
    }
}

TEST(Elimination, SubsetIsBasisOfEliminationIdeal)
{
    std::mt19937_64 rng(37);
    auto ring = small_ring(3);
    for (int t = 0; t < 30; ++t) {
        auto gens = random_ideal(rng, ring);
        auto gb = reduced_groebner_basis({gens, ring});
        for (std::size_t drop = 0; drop <= ring->size(); ++drop) {
            std::vector<DiffVar> keep(ring->vars().begin() + static_cast<long>(drop), ring->vars().end());
            auto sub = elimination_subset(gb, keep);
            if (!sub.empty()) {
                EXPECT_TRUE(is_groebner_basis(sub));
            }
            for (const auto& p : sub) {
                for (std::size_t v = 0; v < drop; ++v) {
                    EXPECT_FALSE(p.uses_variable(v));
                }
                EXPECT_TRUE(normal_form(p, gb.basis).is_zero());
            }
            // products of ideal elements that land in the subring lie in <sub>
            for (const auto& p : gb.basis) {
                if (p.only_uses_from(drop)) {
                    EXPECT_TRUE(normal_form(p, sub).is_zero());
                }
            }
        }
    }
}
