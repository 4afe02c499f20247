#ifndef MELSB_WEIGHT_BUNDLE_H_
#define MELSB_WEIGHT_BUNDLE_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "melsb/tensor_io.h"

namespace melsb {

// Named real tensors shared by the network stubs and the subband filters.
//
// File layout:
//   "MELSBWB1"       magic (8 bytes)
//   u64              header length in bytes
//   header           JSON: {"version": 1, "dtype": "f64",
//                           "tensors": [{"name", "shape", "offset"}, ...]}
//   payload          float64 little endian; offsets are byte offsets into
//                    the payload
class WeightBundle {
 public:
  static constexpr int kVersion = 1;

  void Set(const std::string& name, Tensor tensor);
  bool Contains(const std::string& name) const;
  const Tensor& Get(const std::string& name) const;
  // Throws InvalidArgument if the stored shape differs.
  const Tensor& Get(const std::string& name,
                    const std::vector<int64_t>& expected_shape) const;
  std::vector<std::string> Names() const;
  size_t size() const { return tensors_.size(); }

  // Inserts every tensor of other, replacing duplicates.
  void Merge(const WeightBundle& other);

  void Save(const std::filesystem::path& path) const;
  static WeightBundle Load(const std::filesystem::path& path);

 private:
  std::map<std::string, Tensor> tensors_;
};

}  // namespace melsb

#endif  // MELSB_WEIGHT_BUNDLE_H_
