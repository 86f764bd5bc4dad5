#include <gtest/gtest.h>

#include <complex>
#include <random>
#include <vector>

#include "ftlab/builders.hpp"
#include "ftlab/pauli.hpp"
#include "ftlab/tableau.hpp"

using namespace ftlab;

namespace {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;

Mat eye(std::size_t d) {
    Mat m(d, std::vector<cd>(d));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
    return m;
}

Mat mul(const Mat& a, const Mat& b) {
    std::size_t d = a.size();
    Mat m(d, std::vector<cd>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t j = 0; j < d; ++j) m[i][j] += a[i][k] * b[k][j];
    return m;
}

Mat dagger(const Mat& a) {
    std::size_t d = a.size();
    Mat m(d, std::vector<cd>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m[i][j] = std::conj(a[j][i]);
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    std::size_t da = a.size(), db = b.size();
    Mat m(da * db, std::vector<cd>(da * db));
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j)
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l) m[i * db + k][j * db + l] = a[i][j] * b[k][l];
    return m;
}

void expect_equal(const Mat& a, const Mat& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) ASSERT_LT(std::abs(a[i][j] - b[i][j]), 1e-12);
}

const Mat kX{{0, 1}, {1, 0}};
const Mat kZ{{1, 0}, {0, -1}};

// Qubit 0 is the most significant tensor factor.
Mat dense(const PauliOperator& p) {
    Mat m{{1}};
    for (std::size_t q = 0; q < p.size(); ++q) {
        Mat f = eye(2);
        if (p.x(q)) f = mul(f, kX);
        if (p.z(q)) f = mul(f, kZ);
        m = kron(m, f);
    }
    cd ph = std::pow(cd(0, 1), p.phase());
    for (auto& row : m)
        for (auto& v : row) v *= ph;
    return m;
}

Mat single(std::size_t n, std::size_t q, const Mat& g) {
    Mat m{{1}};
    for (std::size_t i = 0; i < n; ++i) m = kron(m, i == q ? g : eye(2));
    return m;
}

Mat cnot(std::size_t n, std::size_t c, std::size_t t) {
    std::size_t d = std::size_t{1} << n;
    Mat m(d, std::vector<cd>(d));
    for (std::size_t s = 0; s < d; ++s) {
        std::size_t cb = s >> (n - 1 - c) & 1u;
        std::size_t out = cb ? s ^ (std::size_t{1} << (n - 1 - t)) : s;
        m[out][s] = 1;
    }
    return m;
}

PauliOperator random_pauli(std::mt19937& rng, std::size_t n) {
    PauliOperator p(n);
    for (std::size_t q = 0; q < n; ++q) p.set(q, rng() & 1u, rng() & 1u);
    p.set_phase(static_cast<int>(rng() % 4));
    return p;
}

}  // namespace

TEST(Pauli, ParseAndPrint) {
    auto p = PauliOperator::parse("-iXYZI");
    EXPECT_EQ(p.size(), 4u);
    EXPECT_EQ(p.weight(), 3u);
    EXPECT_EQ(PauliOperator::parse(p.to_string()), p);
    EXPECT_TRUE(PauliOperator::parse("III").is_identity());
}

TEST(Pauli, DenseProductsMatch) {
    std::mt19937 rng(5);
    for (std::size_t n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 200; ++trial) {
            auto a = random_pauli(rng, n), b = random_pauli(rng, n);
            expect_equal(dense(a * b), mul(dense(a), dense(b)));
            bool comm = a.commutes(b);
            Mat ab = mul(dense(a), dense(b)), ba = mul(dense(b), dense(a));
            bool dense_comm = true;
            for (std::size_t i = 0; i < ab.size(); ++i)
                for (std::size_t j = 0; j < ab.size(); ++j) dense_comm &= std::abs(ab[i][j] - ba[i][j]) < 1e-12;
            EXPECT_EQ(comm, dense_comm);
        }
}

TEST(Pauli, GroupLaws) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        auto a = random_pauli(rng, 5), b = random_pauli(rng, 5), c = random_pauli(rng, 5);
        EXPECT_EQ((a * b) * c, a * (b * c));
        auto sq = a * a;
        EXPECT_TRUE(sq.is_identity());
        EXPECT_TRUE(sq.phase() == 0 || sq.phase() == 2);
    }
}

TEST(Pauli, ConjugationMatchesDenseMatrices) {
    const Mat h{{M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}};
    const Mat s{{1, 0}, {0, cd(0, 1)}};
    std::mt19937 rng(3);
    const std::size_t n = 3;
    for (int trial = 0; trial < 300; ++trial) {
        auto p = random_pauli(rng, n);
        auto q = p;
        std::size_t a = rng() % n, b = (a + 1 + rng() % (n - 1)) % n;
        Mat u;
        switch (trial % 5) {
            case 0: q.apply_h(a); u = single(n, a, h); break;
            case 1: q.apply_s(a); u = single(n, a, s); break;
            case 2: q.apply_sdg(a); u = single(n, a, dagger(s)); break;
            case 3: q.apply_cnot(a, b); u = cnot(n, a, b); break;
            default: q.apply_swap(a, b); u = mul(mul(cnot(n, a, b), cnot(n, b, a)), cnot(n, a, b)); break;
        }
        expect_equal(dense(q), mul(mul(u, dense(p)), dagger(u)));
    }
}

TEST(Pauli, CnotCopiesXForwardAndZBackward) {
    auto p = PauliOperator::parse("XI");
    p.apply_cnot(0, 1);
    EXPECT_EQ(p, PauliOperator::parse("XX"));
    auto z = PauliOperator::parse("IZ");
    z.apply_cnot(0, 1);
    EXPECT_EQ(z, PauliOperator::parse("ZZ"));
}

TEST(Tableau, EmptyCircuitLeavesInput) {
    StabilizerTableau t(3);
    t.h(1);
    Circuit c(3, 1, CircuitLevel::Logical);
    EXPECT_EQ(simulate_stabilizer(c, t).state, t);
}

TEST(Tableau, HadamardTwiceIsIdentity) {
    StabilizerTableau t(2);
    t.cnot(0, 1);
    auto u = t;
    u.h(0);
    u.h(0);
    EXPECT_EQ(u, t);
}

TEST(Tableau, BellStateExpectations) {
    StabilizerTableau t(2);
    t.h(0);
    t.cnot(0, 1);
    EXPECT_EQ(t.expectation(PauliOperator::parse("XX")), 1);
    EXPECT_EQ(t.expectation(PauliOperator::parse("ZZ")), 1);
    EXPECT_EQ(t.expectation(PauliOperator::parse("-YY")), 1);
    EXPECT_EQ(t.expectation(PauliOperator::parse("ZI")), 0);
    auto m = t.measure_z(0, true);
    EXPECT_TRUE(m.random);
    EXPECT_TRUE(m.outcome);
    EXPECT_FALSE(t.measure_z(1).random);
    EXPECT_TRUE(t.measure_z(1).outcome);
}

TEST(Tableau, EncodeProducesLogicalZero) {
    Circuit enc = build_encode();
    auto r = simulate_stabilizer(enc, StabilizerTableau(static_cast<std::size_t>(enc.num_sites())));
    std::vector<std::size_t> q;
    for (int k = 0; k < 7; ++k) q.push_back(static_cast<std::size_t>(enc.index(enc.outputs.at(0).sites[static_cast<std::size_t>(k)])));
    for (char kind : {'X', 'Z'})
        for (const auto& sup : kCodeSupports) {
            PauliOperator g(static_cast<std::size_t>(enc.num_sites()));
            for (int k : sup) g = g * PauliOperator::single(g.size(), q[static_cast<std::size_t>(k)], kind);
            EXPECT_EQ(r.state.expectation(g), 1) << kind;
        }
    PauliOperator zl(static_cast<std::size_t>(enc.num_sites()));
    for (auto i : q) zl = zl * PauliOperator::single(zl.size(), i, 'Z');
    EXPECT_EQ(r.state.expectation(zl), 1);
}

TEST(Tableau, RejectsNonClifford) {
    Circuit c(1, 1, CircuitLevel::Logical);
    c.layers.push_back(Layer{{make_op1(GateKind::T, {0, 0})}});
    EXPECT_THROW(simulate_stabilizer(c, StabilizerTableau(1)), UnsupportedOperation);
}
