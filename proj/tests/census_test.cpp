#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "ftlab/census.hpp"
#include "ftlab/circuit.hpp"

using namespace ftlab;

TEST(Census, TableValues) {
    auto c = paper_census();
    auto m = c.l1(Gadget::TGate).counts[idx(LocationKind::Memory)];
    ASSERT_TRUE(m);
    EXPECT_EQ(m->base, 3032);
    EXPECT_EQ(m->slope, 133);
    EXPECT_EQ(c.ln(Gadget::TGate).counts[idx(LocationKind::TGate)]->base, 28);
    EXPECT_EQ(c.ln(Gadget::Memory).depth, (AffineCount{38, 0}));
}

TEST(Census, CountAt) {
    auto c = paper_census();
    EXPECT_EQ(count_at(c.l1(Gadget::TGate), LocationKind::Memory, 10), 4362);
    EXPECT_EQ(count_at(c.l1(Gadget::Memory), LocationKind::Memory, 0), 654);
    EXPECT_EQ(count_at(c.l1(Gadget::Memory), LocationKind::TGate, 5), 0);
}

TEST(Census, NoTGateAtPhysicalLevel) {
    auto c = paper_census();
    for (auto g : kGadgets) EXPECT_FALSE(c.l1(g).has(LocationKind::TGate));
}

TEST(Census, CountAtIsAffine) {
    auto c = paper_census();
    for (auto g : kGadgets)
        for (auto k : kLocationKinds)
            for (double a : {0.0, 1.5, 10.0})
                for (double b : {0.25, 7.0, 990.0}) {
                    double slope = c.l1(g).has(k) ? c.l1(g).counts[idx(k)]->slope : 0.0;
                    EXPECT_NEAR(count_at(c.l1(g), k, a + b) - count_at(c.l1(g), k, a), b * slope, 1e-9);
                }
}

TEST(Census, DepthRatiosAtEveryReadoutTime) {
    auto c = paper_census();
    for (double tr : {0.0, 1.0, 10.0, 1000.0})
        for (const auto* level : {&c.level1, &c.leveln}) {
            double m = (*level)[idx(Gadget::Memory)].depth.at(tr);
            EXPECT_DOUBLE_EQ((*level)[idx(Gadget::TGate)].depth.at(tr), 5 * m);
            EXPECT_DOUBLE_EQ((*level)[idx(Gadget::Readout)].depth.at(tr), 2 * m);
            EXPECT_DOUBLE_EQ((*level)[idx(Gadget::Swap)].depth.at(tr), m);
        }
}

TEST(Census, LogicalLevelHasNoSlopes) {
    auto c = paper_census();
    for (auto g : kGadgets) {
        EXPECT_EQ(c.ln(g).depth.slope, 0);
        for (auto k : kLocationKinds)
            if (c.ln(g).has(k)) EXPECT_EQ(c.ln(g).counts[idx(k)]->slope, 0);
    }
}

TEST(Census, BuiltInTableValidates) { EXPECT_TRUE(validate(paper_census()).empty()); }

TEST(Census, PerturbedTDepthIsOneViolation) {
    auto c = paper_census();
    c.level1[idx(Gadget::TGate)].depth = {200, 10};
    auto v = validate(c);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].gadget, Gadget::TGate);
    EXPECT_EQ(v[0].level, "level1");
    EXPECT_NE(v[0].expected.find("205"), std::string::npos) << describe(v[0]);
}

TEST(Census, ReadoutNotMultipleOf14IsOneViolation) {
    auto c = paper_census();
    c.leveln[idx(Gadget::Memory)].counts[idx(LocationKind::Readout)] = AffineCount{27, 0};
    auto v = validate(c);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].gadget, Gadget::Memory);
}

TEST(Census, RoundTrip) {
    std::stringstream s;
    save_census(paper_census(), s);
    auto back = load_census(s);
    EXPECT_EQ(back, paper_census());
    // Byte-stable after one pass.
    EXPECT_EQ(census_to_json(back), census_to_json(paper_census()));
}

TEST(Census, RejectsNegativeCount) {
    auto doc = nlohmann::json::parse(census_to_json(paper_census()));
    doc["level1"]["memory"]["swap"]["base"] = -1;
    std::istringstream in(doc.dump());
    try {
        load_census(in);
        FAIL() << "accepted a negative count";
    } catch (const CensusError& e) {
        EXPECT_NE(std::string(e.what()).find("negative count"), std::string::npos) << e.what();
    }
}

TEST(Census, RejectsMissingGadget) {
    auto doc = nlohmann::json::parse(census_to_json(paper_census()));
    doc["leveln"].erase("tgate");
    std::istringstream in(doc.dump());
    try {
        load_census(in);
        FAIL() << "accepted a census without the T row";
    } catch (const CensusError& e) {
        EXPECT_NE(std::string(e.what()).find("missing gadget"), std::string::npos) << e.what();
    }
}

TEST(Census, RejectsMalformedDocument) {
    std::istringstream in("{ not json");
    EXPECT_THROW(load_census(in), CensusError);
    std::istringstream extra(R"({"level1": {}, "leveln": {}, "level2": {}})");
    EXPECT_THROW(load_census(extra), CensusError);
}

TEST(Census, EmptyCircuitExtractsToZero) {
    Circuit c(4, 1, CircuitLevel::Logical);
    auto e = extract_census(c, CensusLevel::Logical);
    for (auto k : kLocationKinds) EXPECT_EQ(count_at(e, k, 10), 0);
    EXPECT_EQ(e.depth.at(10), 0);
}
