#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "melsb/tensor_io.h"
#include "melsb/types.h"
#include "melsb/weight_bundle.h"
#include "test_util.h"

namespace melsb {
namespace {

using testing_util::Gaussian;
using testing_util::ScratchDir;

TEST(TensorIoTest, RoundTripIsExact) {
  const auto dir = ScratchDir("tensor_rt");
  const Tensor t({2, 3, 4}, Gaussian(24, 1));
  WriteTensorFile(t, dir / "t.tns");
  const Tensor r = ReadTensorFile(dir / "t.tns");
  EXPECT_EQ(r.shape, t.shape);
  EXPECT_EQ(r.values, t.values);
}

TEST(TensorIoTest, RejectsBadShapeAndCorruptFiles) {
  EXPECT_THROW(Tensor({2, 2}, {1.0}), InvalidArgument);
  const auto dir = ScratchDir("tensor_bad");
  WriteTensorFile(Tensor({3}, {1.0, 2.0, 3.0}), dir / "t.tns");
  std::string bytes;
  {
    std::ifstream in(dir / "t.tns", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::ofstream(dir / "v.tns", std::ios::binary) << bad_version;
  EXPECT_THROW(ReadTensorFile(dir / "v.tns"), DataError);
  std::ofstream(dir / "s.tns", std::ios::binary) << bytes.substr(0, bytes.size() - 4);
  EXPECT_THROW(ReadTensorFile(dir / "s.tns"), DataError);
  EXPECT_THROW(ReadTensorFile(dir / "missing.tns"), DataError);
}

TEST(WeightBundleTest, SaveLoadRoundTrip) {
  const auto dir = ScratchDir("bundle_rt");
  WeightBundle b;
  b.Set("a.w", Tensor({2, 2}, {1.0, -2.0, 3.5, 0.25}));
  b.Set("b", Tensor({5}, Gaussian(5, 2)));
  b.Save(dir / "w.bin");
  const WeightBundle r = WeightBundle::Load(dir / "w.bin");
  EXPECT_EQ(r.Names(), b.Names());
  for (const auto& n : b.Names()) {
    EXPECT_EQ(r.Get(n).shape, b.Get(n).shape);
    EXPECT_EQ(r.Get(n).values, b.Get(n).values);
  }
  EXPECT_THROW(r.Get("a.w", {4}), InvalidArgument);
  EXPECT_THROW(r.Get("missing"), InvalidArgument);
}

TEST(WeightBundleTest, BadMagicIsDataError) {
  const auto dir = ScratchDir("bundle_bad");
  std::ofstream(dir / "w.bin", std::ios::binary) << "NOTABUNDLE0000000";
  EXPECT_THROW(WeightBundle::Load(dir / "w.bin"), DataError);

  WeightBundle b;
  b.Set("x", Tensor({1}, {1.0}));
  b.Save(dir / "ok.bin");
  std::string bytes;
  {
    std::ifstream in(dir / "ok.bin", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  const size_t pos = bytes.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + 10] = '7';
  std::ofstream(dir / "v.bin", std::ios::binary) << bytes;
  EXPECT_THROW(WeightBundle::Load(dir / "v.bin"), DataError);
}

}  // namespace
}  // namespace melsb
