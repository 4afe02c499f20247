#include "melsb/tensor_io.h"

#include <cstring>
#include <fstream>
#include <iterator>

#include "melsb/types.h"

namespace melsb {
namespace {

constexpr char kMagic[8] = {'M', 'E', 'L', 'S', 'B', 'T', 'N', 'S'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kDtypeFloat64 = 1;

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T Take(const std::vector<char>& bytes, size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw DataError("truncated tensor file");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

Tensor::Tensor(std::vector<int64_t> shape_in, std::vector<double> values_in)
    : shape(std::move(shape_in)), values(std::move(values_in)) {
  if (NumElements(shape) != static_cast<int64_t>(values.size()))
    throw InvalidArgument("tensor shape does not match value count");
}

Tensor Tensor::Zeros(std::vector<int64_t> shape_in) {
  const int64_t n = NumElements(shape_in);
  return Tensor(std::move(shape_in), std::vector<double>(n, 0.0));
}

int64_t Tensor::NumElements(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw InvalidArgument("negative tensor dimension");
    n *= d;
  }
  return n;
}

void WriteTensorFile(const Tensor& tensor, const std::filesystem::path& path) {
  std::string out(kMagic, sizeof(kMagic));
  Put<uint32_t>(out, kVersion);
  Put<uint32_t>(out, kDtypeFloat64);
  Put<uint32_t>(out, static_cast<uint32_t>(tensor.shape.size()));
  Put<uint32_t>(out, 0);
  for (int64_t d : tensor.shape) Put<uint64_t>(out, static_cast<uint64_t>(d));
  for (double v : tensor.values) Put<double>(out, v);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write tensor file: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

Tensor ReadTensorFile(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open tensor file: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a tensor file: " + path.string());
  size_t pos = sizeof(kMagic);
  const auto version = Take<uint32_t>(bytes, pos);
  const auto dtype = Take<uint32_t>(bytes, pos);
  const auto ndim = Take<uint32_t>(bytes, pos);
  Take<uint32_t>(bytes, pos);
  if (version != kVersion) throw DataError("unsupported tensor file version");
  if (dtype != kDtypeFloat64) throw DataError("unsupported tensor dtype");
  std::vector<int64_t> shape;
  for (uint32_t i = 0; i < ndim; ++i)
    shape.push_back(static_cast<int64_t>(Take<uint64_t>(bytes, pos)));
  const int64_t n = Tensor::NumElements(shape);
  if (bytes.size() - pos != static_cast<size_t>(n) * sizeof(double))
    throw DataError("tensor payload size mismatch: " + path.string());
  std::vector<double> values(n);
  std::memcpy(values.data(), bytes.data() + pos, n * sizeof(double));
  return Tensor(std::move(shape), std::move(values));
}

}  // namespace melsb
