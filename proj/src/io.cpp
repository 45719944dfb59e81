#include "mri/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mri/errors.hpp"

namespace mri {

namespace {

const std::vector<std::string> kAxisNames = {"coil", "echo", "ky", "kx", "basis"};

bool valid_axis(const std::string& name) {
  for (const auto& a : kAxisNames)
    if (a == name) return true;
  return false;
}

void put_f32_le(std::string& out, float v) {
  const auto u = std::bit_cast<std::uint32_t>(v);
  out.push_back(static_cast<char>(u & 0xFF));
  out.push_back(static_cast<char>((u >> 8) & 0xFF));
  out.push_back(static_cast<char>((u >> 16) & 0xFF));
  out.push_back(static_cast<char>((u >> 24) & 0xFF));
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(u);
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + tmp);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw FormatError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw FormatError("rename failed: " + tmp + " -> " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json header_json(const std::string& dtype, const std::vector<std::string>& dims,
                           const std::vector<int>& shape, const nlohmann::json& meta,
                           const nlohmann::json& seed_provenance) {
  if (dims.size() != shape.size())
    throw FormatError("write_array: dims count " + std::to_string(dims.size()) +
                      " does not match shape rank " + std::to_string(shape.size()));
  for (const auto& d : dims)
    if (!valid_axis(d)) throw FormatError("write_array: unknown axis name '" + d + "'");
  nlohmann::json h;
  h["version"] = 1;
  h["dtype"] = dtype;
  h["order"] = "row-major";
  h["endianness"] = "little";
  h["dims"] = dims;
  h["shape"] = shape;
  if (!meta.is_null()) h["meta"] = meta;
  if (!seed_provenance.is_null()) h["seed_provenance"] = seed_provenance;
  return h;
}

void write_pair(const std::string& base, const nlohmann::json& header,
                const std::string& payload) {
  write_file_atomic(base + ".json", header.dump(2) + "\n");
  write_file_atomic(base + ".bin", payload);
}

std::size_t element_size(const std::string& dtype) {
  if (dtype == "complex64") return 8;
  if (dtype == "float32") return 4;
  if (dtype == "uint8") return 1;
  throw FormatError("unknown dtype '" + dtype + "'");
}

std::string read_payload_checked(const std::string& base, const ArrayHeader& h) {
  std::size_t count = 1;
  for (int s : h.shape) count *= static_cast<std::size_t>(s);
  const std::size_t expected = count * element_size(h.dtype);
  std::string payload = read_file(base + ".bin");
  if (payload.size() != expected)
    throw FormatError("payload length mismatch in " + base + ".bin: expected " +
                      std::to_string(expected) + " bytes (" + std::to_string(count) +
                      " x " + h.dtype + "), found " + std::to_string(payload.size()));
  return payload;
}

}  // namespace

std::string array_base_path(const std::string& path) {
  const auto strip = [&](const std::string& suffix) -> std::optional<std::string> {
    if (path.size() > suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0)
      return path.substr(0, path.size() - suffix.size());
    return std::nullopt;
  };
  if (auto b = strip(".json")) return *b;
  if (auto b = strip(".bin")) return *b;
  return path;
}

void write_array(const std::string& path, const CxArray& a,
                 const std::vector<std::string>& dims, const nlohmann::json& meta,
                 const nlohmann::json& seed_provenance) {
  const std::string base = array_base_path(path);
  nlohmann::json h = header_json("complex64", dims, a.shape(), meta, seed_provenance);
  std::string payload;
  payload.reserve(a.size() * 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    put_f32_le(payload, static_cast<float>(a[i].real()));
    put_f32_le(payload, static_cast<float>(a[i].imag()));
  }
  write_pair(base, h, payload);
}

void write_array(const std::string& path, const RealArray& a,
                 const std::vector<std::string>& dims, const nlohmann::json& meta,
                 const nlohmann::json& seed_provenance) {
  const std::string base = array_base_path(path);
  nlohmann::json h = header_json("float32", dims, a.shape(), meta, seed_provenance);
  std::string payload;
  payload.reserve(a.size() * 4);
  for (std::size_t i = 0; i < a.size(); ++i)
    put_f32_le(payload, static_cast<float>(a[i]));
  write_pair(base, h, payload);
}

void write_array(const std::string& path, const ByteArray& a,
                 const std::vector<std::string>& dims, const nlohmann::json& meta,
                 const nlohmann::json& seed_provenance) {
  const std::string base = array_base_path(path);
  nlohmann::json h = header_json("uint8", dims, a.shape(), meta, seed_provenance);
  std::string payload(a.size(), '\0');
  for (std::size_t i = 0; i < a.size(); ++i) payload[i] = static_cast<char>(a[i]);
  write_pair(base, h, payload);
}

ArrayHeader read_array_header(const std::string& path) {
  const std::string base = array_base_path(path);
  nlohmann::json j = read_json(base + ".json");
  ArrayHeader h;
  try {
    h.version = j.at("version").get<int>();
    h.dtype = j.at("dtype").get<std::string>();
    const auto order = j.at("order").get<std::string>();
    const auto endian = j.value("endianness", std::string("little"));
    h.dims = j.at("dims").get<std::vector<std::string>>();
    h.shape = j.at("shape").get<std::vector<int>>();
    if (j.contains("meta")) h.meta = j["meta"];
    if (j.contains("seed_provenance")) h.seed_provenance = j["seed_provenance"];
    if (h.version != 1)
      throw FormatError("unsupported version " + std::to_string(h.version) + " in " +
                        base + ".json");
    if (order != "row-major")
      throw FormatError("unsupported order '" + order + "' in " + base + ".json");
    if (endian != "little")
      throw FormatError("unsupported endianness '" + endian + "' in " + base + ".json");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad array header " + base + ".json: " + e.what());
  }
  element_size(h.dtype);  // rejects unknown dtypes
  if (h.dims.size() != h.shape.size())
    throw FormatError("dims/shape rank mismatch in " + base + ".json");
  for (const auto& d : h.dims)
    if (!valid_axis(d))
      throw FormatError("unknown axis name '" + d + "' in " + base + ".json");
  for (int s : h.shape)
    if (s < 1) throw FormatError("non-positive shape entry in " + base + ".json");
  return h;
}

CxArray read_complex(const std::string& path, ArrayHeader* header) {
  const std::string base = array_base_path(path);
  ArrayHeader h = read_array_header(base);
  if (h.dtype != "complex64")
    throw FormatError("expected dtype complex64 in " + base + ".json, found " + h.dtype);
  const std::string payload = read_payload_checked(base, h);
  CxArray a(h.shape);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = cx{static_cast<double>(get_f32_le(p + 8 * i)),
              static_cast<double>(get_f32_le(p + 8 * i + 4))};
  if (header) *header = std::move(h);
  return a;
}

RealArray read_real(const std::string& path, ArrayHeader* header) {
  const std::string base = array_base_path(path);
  ArrayHeader h = read_array_header(base);
  if (h.dtype != "float32")
    throw FormatError("expected dtype float32 in " + base + ".json, found " + h.dtype);
  const std::string payload = read_payload_checked(base, h);
  RealArray a(h.shape);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = static_cast<double>(get_f32_le(p + 4 * i));
  if (header) *header = std::move(h);
  return a;
}

ByteArray read_bytes(const std::string& path, ArrayHeader* header) {
  const std::string base = array_base_path(path);
  ArrayHeader h = read_array_header(base);
  if (h.dtype != "uint8")
    throw FormatError("expected dtype uint8 in " + base + ".json, found " + h.dtype);
  const std::string payload = read_payload_checked(base, h);
  ByteArray a(h.shape);
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = static_cast<unsigned char>(payload[i]);
  if (header) *header = std::move(h);
  return a;
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError("invalid JSON in " + path);
  return j;
}

}  // namespace mri
