#include "melsb/weight_bundle.h"

#include <cstring>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "melsb/types.h"

namespace melsb {
namespace {

constexpr char kMagic[8] = {'M', 'E', 'L', 'S', 'B', 'W', 'B', '1'};

std::string ShapeString(const std::vector<int64_t>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i)
    s += (i ? ", " : "") + std::to_string(shape[i]);
  return s + "]";
}

}  // namespace

void WeightBundle::Set(const std::string& name, Tensor tensor) {
  tensors_[name] = std::move(tensor);
}

bool WeightBundle::Contains(const std::string& name) const {
  return tensors_.count(name) > 0;
}

const Tensor& WeightBundle::Get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end())
    throw InvalidArgument("weight bundle has no tensor '" + name + "'");
  return it->second;
}

const Tensor& WeightBundle::Get(
    const std::string& name, const std::vector<int64_t>& expected_shape) const {
  const Tensor& t = Get(name);
  if (t.shape != expected_shape)
    throw InvalidArgument("tensor '" + name + "' has shape " +
                          ShapeString(t.shape) + ", expected " +
                          ShapeString(expected_shape));
  return t;
}

std::vector<std::string> WeightBundle::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : tensors_) names.push_back(name);
  return names;
}

void WeightBundle::Merge(const WeightBundle& other) {
  for (const auto& [name, t] : other.tensors_) tensors_[name] = t;
}

void WeightBundle::Save(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["version"] = kVersion;
  header["dtype"] = "f64";
  header["tensors"] = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : tensors_) {
    header["tensors"].push_back(
        {{"name", name}, {"shape", t.shape}, {"offset", offset}});
    offset += t.values.size() * sizeof(double);
  }
  const std::string text = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  const uint64_t len = text.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out += text;
  for (const auto& [name, t] : tensors_)
    out.append(reinterpret_cast<const char*>(t.values.data()),
               t.values.size() * sizeof(double));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write weight bundle: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

WeightBundle WeightBundle::Load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open weight bundle: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw DataError("not a weight bundle: " + path.string());
  uint64_t len;
  std::memcpy(&len, bytes.data() + 8, sizeof(len));
  if (16 + len > bytes.size()) throw DataError("truncated bundle header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16,
                                   bytes.begin() + 16 + static_cast<long>(len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed bundle header: ") + e.what());
  }
  if (!header.contains("version"))
    throw DataError("weight bundle header lacks a version field");
  if (header["version"].get<int>() != kVersion)
    throw DataError("unsupported weight bundle version");
  if (header.value("dtype", "f64") != "f64")
    throw DataError("unsupported weight bundle dtype");

  const size_t payload = 16 + len;
  const size_t payload_size = bytes.size() - payload;
  WeightBundle bundle;
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<std::vector<int64_t>>();
    const auto offset = entry.at("offset").get<uint64_t>();
    const int64_t n = Tensor::NumElements(shape);
    if (offset + n * sizeof(double) > payload_size)
      throw DataError("tensor '" + name + "' exceeds bundle payload");
    std::vector<double> values(n);
    std::memcpy(values.data(), bytes.data() + payload + offset,
                n * sizeof(double));
    bundle.Set(name, Tensor(shape, std::move(values)));
  }
  return bundle;
}

}  // namespace melsb
