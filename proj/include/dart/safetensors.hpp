#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dart/common.hpp"

namespace dart::safetensors {

// Container layout: an 8-byte little-endian header length N, N bytes of JSON
// mapping tensor name -> {dtype, shape, data_offsets} (plus an optional
// "__metadata__" string map), then the raw little-endian payload. Offsets are
// relative to the start of the payload region and must tile it exactly.

enum class Dtype { F32, F16, BF16 };

size_t dtype_bytes(Dtype d);
const char* dtype_name(Dtype d);
Dtype dtype_from_name(const std::string& name);  // throws IoError on unsupported

struct TensorMeta {
    std::string name;
    Dtype dtype = Dtype::F32;
    std::vector<uint64_t> shape;
    uint64_t begin = 0;  // byte offsets into the payload region
    uint64_t end = 0;

    uint64_t num_elements() const;
    uint64_t byte_size() const { return end - begin; }
};

struct CheckpointManifest {
    std::vector<TensorMeta> tensors;  // header order
    std::map<std::string, std::string> metadata;
    uint64_t total_bytes = 0;   // payload region size
    uint64_t header_bytes = 0;  // JSON header size (without the length prefix)

    const TensorMeta* find(const std::string& name) const;
};

// Parses and validates the header only; tensor payloads stay on disk.
CheckpointManifest read_manifest(const std::filesystem::path& path);

struct Tensor {
    std::string name;
    Dtype dtype = Dtype::F32;
    std::vector<uint64_t> shape;
    std::vector<uint8_t> data;  // raw storage bytes, little endian

    uint64_t num_elements() const;
    float element_as_f32(size_t i) const;
    void set_element_from_f32(size_t i, float v);

    static Tensor from_f32(std::string name, std::vector<uint64_t> shape,
                           const std::vector<float>& values, Dtype storage = Dtype::F32);
};

// A whole checkpoint in memory. Fine for tests and small models; the fusion
// pipeline streams tensor-by-tensor instead of materializing one of these.
struct TensorSet {
    std::vector<Tensor> tensors;  // write order
    std::map<std::string, std::string> metadata;

    const Tensor* find(const std::string& name) const;
    CheckpointManifest manifest() const;
};

TensorSet read_tensor_set(const std::filesystem::path& path);
void write_tensor_set(const std::filesystem::path& path, const TensorSet& set);

// Streaming access for large files: reads a single tensor's payload.
std::vector<uint8_t> read_tensor_payload(const std::filesystem::path& path,
                                         const CheckpointManifest& manifest,
                                         const TensorMeta& meta);

// Serialized header (with length prefix) for a checkpoint about to be written
// with the given tensors in order. Deterministic for identical inputs.
std::string build_header(const std::vector<TensorMeta>& tensors,
                         const std::map<std::string, std::string>& metadata);

}  // namespace dart::safetensors
