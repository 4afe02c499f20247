#ifndef MELSB_TENSOR_IO_H_
#define MELSB_TENSOR_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace melsb {

// Dense row-major real tensor.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<int64_t> shape_in, std::vector<double> values_in);
  static Tensor Zeros(std::vector<int64_t> shape_in);

  static int64_t NumElements(const std::vector<int64_t>& shape);
};

// Flat binary tensor file:
//   "MELSBTNS"  magic (8 bytes)
//   u32 version (1), u32 dtype (1 = float64), u32 ndim, u32 reserved
//   u64 dims[ndim]
//   float64 values, little endian, row-major
void WriteTensorFile(const Tensor& tensor, const std::filesystem::path& path);
Tensor ReadTensorFile(const std::filesystem::path& path);

}  // namespace melsb

#endif  // MELSB_TENSOR_IO_H_
