#include "klab/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace klab;

TEST(TaskRng, KeyedStreamsAreReproducibleAndDisjoint) {
    TaskRng a1(42, 7), a2(42, 7), b(42, 8), c(43, 7);
    std::vector<uint64_t> s1, s2;
    for (int i = 0; i < 32; ++i) {
        s1.push_back(a1.next());
        s2.push_back(a2.next());
    }
    EXPECT_EQ(s1, s2);
    bool differs_task = false, differs_seed = false;
    for (int i = 0; i < 32; ++i) {
        differs_task |= b.next() != s1[i];
        differs_seed |= c.next() != s1[i];
    }
    EXPECT_TRUE(differs_task);
    EXPECT_TRUE(differs_seed);
}

TEST(TaskRng, BelowIsInRangeAndCoversValues) {
    TaskRng r(1, 0);
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        uint64_t v = r.below(10);
        EXPECT_LT(v, 10u);
        seen.insert(v);
    }
    EXPECT_EQ(seen.size(), 10u);
    EXPECT_THROW(r.below(0), std::domain_error);
}

TEST(ParallelMap, OrderPreservedAndWorkerIndependent) {
    auto square = [](size_t i) { return i * i; };
    auto r1 = parallel_map<size_t>(500, 1, square);
    auto r8 = parallel_map<size_t>(500, 8, square);
    EXPECT_EQ(r1, r8);
    for (size_t i = 0; i < 500; ++i) EXPECT_EQ(r1[i], i * i);
}

TEST(ParallelMap, PropagatesExceptions) {
    auto boom = [](size_t i) -> int {
        if (i == 37) throw std::runtime_error("boom");
        return 0;
    };
    EXPECT_THROW(parallel_map<int>(100, 4, boom), std::runtime_error);
}

TEST(Fnv, StableKnownHash) {
    EXPECT_EQ(fnv1a(""), 14695981039346656037ull);
    EXPECT_EQ(fnv1a("a"), 12638187200555641996ull);
    EXPECT_NE(fnv1a("X_grid=1"), fnv1a("X_grid=2"));
}

TEST(FormatDouble, CanonicalAndRoundTrippy) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1e-9), "1e-09");
    EXPECT_EQ(format_double(101), "101");
    EXPECT_EQ(hex_u64(255), "00000000000000ff");
}

TEST(ResultStore, HeaderOnceAppendOnly) {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "klab_store_test.csv";
    fs::remove(p);
    {
        ResultStore s(p.string(), {"x", "y"}, "test-v1");
        s.write_row({"1", "2"});
        EXPECT_THROW(s.write_row({"1"}), std::invalid_argument);
    }
    {
        ResultStore s(p.string(), {"x", "y"}, "test-v1");
        s.write_row({"3", "4"});
    }
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "# schema=test-v1\nx,y\n1,2\n3,4\n");
    fs::remove(p);
}

TEST(Workers, EnvironmentOverride) {
    EXPECT_EQ(effective_workers(5), 5u);
    setenv("KLAB_WORKERS", "3", 1);
    EXPECT_EQ(effective_workers(0), 3u);
    unsetenv("KLAB_WORKERS");
    EXPECT_GE(effective_workers(0), 1u);
}
