#include <atomic>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/parallel.h"

namespace melsb {
namespace {

class ParallelForTest : public ::testing::TestWithParam<int> {
 protected:
  void TearDown() override { SetNumThreads(1); }
};

TEST_P(ParallelForTest, VisitsEveryIndexOnce) {
  SetNumThreads(GetParam());
  EXPECT_EQ(NumThreads(), GetParam());
  for (size_t n : {0u, 1u, 7u, 1000u}) {
    std::vector<std::atomic<int>> hits(n);
    ParallelFor(n, [&](size_t b, size_t e) {
      EXPECT_LE(b, e);
      for (size_t i = b; i < e; ++i) hits[i]++;
    });
    for (size_t i = 0; i < n; ++i) EXPECT_EQ(hits[i].load(), 1);
  }
}

TEST_P(ParallelForTest, ResultIndependentOfThreadCount) {
  SetNumThreads(GetParam());
  std::vector<double> out(513);
  ParallelFor(out.size(), [&](size_t b, size_t e) {
    for (size_t i = b; i < e; ++i) out[i] = 0.1 * static_cast<double>(i * i);
  });
  for (size_t i = 0; i < out.size(); ++i)
    EXPECT_EQ(out[i], 0.1 * static_cast<double>(i * i));
}

INSTANTIATE_TEST_SUITE_P(Threads, ParallelForTest, ::testing::Values(1, 2, 3, 8));

}  // namespace
}  // namespace melsb
