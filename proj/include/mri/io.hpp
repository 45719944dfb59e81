#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mri/array.hpp"

namespace mri {

/// Array container on disk: `<base>.json` header + `<base>.bin` payload.
/// The header carries {version:1, dtype, order:"row-major",
/// endianness:"little", dims, shape} plus optional "meta" and
/// "seed_provenance" objects; the payload is little-endian with complex64
/// stored as interleaved (real, imag) float32 pairs.
struct ArrayHeader {
  int version = 1;
  std::string dtype;               // "complex64" | "float32" | "uint8"
  std::vector<std::string> dims;   // names from {coil, echo, ky, kx, basis}
  std::vector<int> shape;
  nlohmann::json meta;             // optional free-form annotations
  nlohmann::json seed_provenance;  // optional seed bookkeeping
};

/// Strips a trailing ".json" or ".bin" so callers may pass either file.
std::string array_base_path(const std::string& path);

void write_array(const std::string& path, const CxArray& a,
                 const std::vector<std::string>& dims,
                 const nlohmann::json& meta = nlohmann::json(),
                 const nlohmann::json& seed_provenance = nlohmann::json());
void write_array(const std::string& path, const RealArray& a,
                 const std::vector<std::string>& dims,
                 const nlohmann::json& meta = nlohmann::json(),
                 const nlohmann::json& seed_provenance = nlohmann::json());
void write_array(const std::string& path, const ByteArray& a,
                 const std::vector<std::string>& dims,
                 const nlohmann::json& meta = nlohmann::json(),
                 const nlohmann::json& seed_provenance = nlohmann::json());

/// Parses and validates the header only.
ArrayHeader read_array_header(const std::string& path);

/// Readers validate the header, dtype, and exact payload byte length.
CxArray read_complex(const std::string& path, ArrayHeader* header = nullptr);
RealArray read_real(const std::string& path, ArrayHeader* header = nullptr);
ByteArray read_bytes(const std::string& path, ArrayHeader* header = nullptr);

/// Writes any JSON document atomically (temp file + rename), with a stable
/// 2-space indentation so reruns are byte-identical.
void write_json_atomic(const std::string& path, const nlohmann::json& j);

/// Reads a JSON document; parse failures become format errors.
nlohmann::json read_json(const std::string& path);

}  // namespace mri
