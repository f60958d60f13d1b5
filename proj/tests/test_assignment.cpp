#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace hetnet;
using hetnet::support::worked_example;

TEST(TotalRate, ThreeUsersOnFourRbs)
{
    const auto ex = worked_example();
    Assignment a;
    for (int j = 0; j < 3; ++j) a.set(BsId(0), UserId(j), 4);
    EXPECT_NEAR(total_rate(a, ex.channel), 9.6, 1e-12);
}

TEST(TotalRate, EmptyAndSingle)
{
    const auto ex = worked_example();
    EXPECT_EQ(total_rate(Assignment{}, ex.channel), 0.0);
    Assignment a;
    a.set(BsId(1), UserId(3), 3);
    EXPECT_EQ(total_rate(a, ex.channel), 3.0);
}

TEST(TotalRate, UnknownIdIsStructural)
{
    const auto ex = worked_example();
    Assignment a;
    a.set(BsId(5), UserId(0), 1);
    EXPECT_THROW(total_rate(a, ex.channel), StructuralError);
    Assignment b;
    b.set(BsId(0), UserId(9), 1);
    EXPECT_THROW(user_rates(b, ex.channel), StructuralError);
}

TEST(TotalRate, AdditiveOverDisjointAssignments)
{
    const auto s = generate_scenario(4, 40);
    const auto ch = compute_channel(s);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> bs(0, 15), rb(1, 9);
    for (int trial = 0; trial < 200; ++trial) {
        Assignment a, b, both;
        for (std::size_t j = 0; j < s.user_count(); ++j) {
            const BsId i(bs(rng));
            const auto n = static_cast<std::uint64_t>(rb(rng));
            (j % 2 == 0 ? a : b).set(i, UserId(j), n);
            both.set(i, UserId(j), n);
        }
        EXPECT_NEAR(total_rate(both, ch), total_rate(a, ch) + total_rate(b, ch), 1e-9);
    }
}

TEST(Assignment, ZeroRemovesPair)
{
    Assignment a;
    a.set(BsId(1), UserId(2), 5);
    EXPECT_EQ(a.rbs(BsId(1), UserId(2)), 5u);
    a.set(BsId(1), UserId(2), 0);
    EXPECT_TRUE(a.empty());
    EXPECT_EQ(a.rbs(BsId(1), UserId(2)), 0u);
}

TEST(Validate, CapacityViolationTwelveOverEight)
{
    const auto ex = worked_example();
    Assignment a;
    for (int j = 0; j < 3; ++j) a.set(BsId(0), UserId(j), 4);
    const auto r = validate(a, ex.scenario, ex.channel);
    ASSERT_EQ(r.capacity.size(), 1u);
    EXPECT_EQ(r.capacity[0], (CapacityViolation{BsId(0), 12, 8}));
    EXPECT_TRUE(r.uniqueness.empty());
    EXPECT_TRUE(r.range.empty());
}

TEST(Validate, UniquenessViolation)
{
    const auto ex = worked_example();
    Assignment a;
    a.set(BsId(0), UserId(0), 4);
    a.set(BsId(1), UserId(0), 3);
    const auto r = validate(a, ex.scenario, ex.channel);
    ASSERT_EQ(r.uniqueness.size(), 1u);
    EXPECT_EQ(r.uniqueness[0], UserId(0));
    EXPECT_TRUE(r.capacity.empty());
}

TEST(Validate, EmptyAssignmentOnlyQos)
{
    const auto ex = worked_example();
    const auto r = validate(Assignment{}, ex.scenario, ex.channel);
    EXPECT_EQ(r.qos.size(), 4u);
    EXPECT_TRUE(r.structurally_feasible());
    EXPECT_FALSE(r.ok());
}

TEST(Validate, RangeViolation)
{
    const auto ex = worked_example();
    Assignment a;
    a.set(BsId(0), UserId(0), 9);
    const auto r = validate(a, ex.scenario, ex.channel);
    ASSERT_EQ(r.range.size(), 1u);
    EXPECT_EQ(r.capacity.size(), 1u);
}

TEST(Validate, FullyFeasibleAssignmentIsClean)
{
    const auto ex = worked_example();
    Assignment a;
    a.set(BsId(0), UserId(0), 4);
    a.set(BsId(0), UserId(2), 4);
    a.set(BsId(1), UserId(1), 3);
    a.set(BsId(1), UserId(3), 3);
    EXPECT_TRUE(validate(a, ex.scenario, ex.channel).ok());
}

TEST(NonServed, Examples)
{
    const auto ex = worked_example();
    EXPECT_EQ(non_served_users(Assignment{}, ex.scenario).size(), 4u);

    Assignment a;
    a.set(BsId(0), UserId(0), 4);
    a.set(BsId(0), UserId(2), 4);
    a.set(BsId(1), UserId(1), 3);
    a.set(BsId(1), UserId(3), 3);
    EXPECT_TRUE(non_served_users(a, ex.scenario).empty());

    Assignment b;
    b.set(BsId(0), UserId(0), 4);
    b.set(BsId(0), UserId(2), 4);
    b.set(BsId(1), UserId(3), 3);
    EXPECT_EQ(non_served_users(b, ex.scenario), std::vector<UserId>{UserId(1)});
}

TEST(AssignmentCsv, HeaderAndRows)
{
    const auto ex = worked_example();
    Assignment a;
    a.set(BsId(1), UserId(3), 3);
    a.set(BsId(0), UserId(0), 4);
    std::ostringstream os;
    write_assignment_csv(os, a, ex.channel);
    EXPECT_EQ(os.str(), "bs_id,user_id,n_rbs,rate_bps\n0,0,4,3.2\n1,3,3,3\n");
}
