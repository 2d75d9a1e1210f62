#include "dart/safetensors.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "dart/half_floats.hpp"
#include "json.hpp"

namespace dart::safetensors {

namespace {

using ordered_json = nlohmann::ordered_json;

// Keep the header JSON small but readable in a hex dump.
constexpr uint64_t kMaxHeaderBytes = 256ull * 1024 * 1024;

uint64_t shape_elements(const std::vector<uint64_t>& shape) {
    uint64_t n = 1;
    for (uint64_t d : shape) n *= d;
    return n;
}

}  // namespace

size_t dtype_bytes(Dtype d) {
    switch (d) {
        case Dtype::F32: return 4;
        case Dtype::F16:
        case Dtype::BF16: return 2;
    }
    return 0;
}

const char* dtype_name(Dtype d) {
    switch (d) {
        case Dtype::F32: return "F32";
        case Dtype::F16: return "F16";
        case Dtype::BF16: return "BF16";
    }
    return "?";
}

Dtype dtype_from_name(const std::string& name) {
    if (name == "F32") return Dtype::F32;
    if (name == "F16") return Dtype::F16;
    if (name == "BF16") return Dtype::BF16;
    throw IoError("unsupported dtype '" + name + "'");
}

uint64_t TensorMeta::num_elements() const { return shape_elements(shape); }

const TensorMeta* CheckpointManifest::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

CheckpointManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    uint64_t file_size = static_cast<uint64_t>(in.tellg());
    in.seekg(0);

    if (file_size < 8) throw IoError(path.string() + ": file too small for a header length");
    uint8_t len_bytes[8];
    in.read(reinterpret_cast<char*>(len_bytes), 8);
    uint64_t header_len = 0;
    for (int i = 7; i >= 0; --i) header_len = (header_len << 8) | len_bytes[i];
    if (header_len > kMaxHeaderBytes || header_len > file_size - 8) {
        throw IoError(path.string() + ": malformed header length " + std::to_string(header_len));
    }

    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw IoError(path.string() + ": truncated header");

    ordered_json j;
    try {
        j = ordered_json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": header is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw IoError(path.string() + ": header is not a JSON object");

    CheckpointManifest m;
    m.header_bytes = header_len;
    m.total_bytes = file_size - 8 - header_len;

    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "__metadata__") {
            for (auto mit = it.value().begin(); mit != it.value().end(); ++mit) {
                if (!mit.value().is_string()) {
                    throw IoError(path.string() + ": __metadata__ values must be strings");
                }
                m.metadata[mit.key()] = mit.value().get<std::string>();
            }
            continue;
        }
        const auto& v = it.value();
        TensorMeta t;
        t.name = it.key();
        try {
            t.dtype = dtype_from_name(v.at("dtype").get<std::string>());
            t.shape = v.at("shape").get<std::vector<uint64_t>>();
            auto offs = v.at("data_offsets").get<std::vector<uint64_t>>();
            if (offs.size() != 2) throw IoError("data_offsets needs 2 entries");
            t.begin = offs[0];
            t.end = offs[1];
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path.string() + ": tensor '" + t.name + "': " + e.what());
        }
        if (t.end < t.begin) {
            throw IoError(path.string() + ": tensor '" + t.name + "' has inverted byte range");
        }
        if (t.byte_size() != t.num_elements() * dtype_bytes(t.dtype)) {
            throw IoError(path.string() + ": tensor '" + t.name +
                          "' byte range does not match shape x dtype width");
        }
        if (t.end > m.total_bytes) {
            throw IoError(path.string() + ": tensor '" + t.name + "' range exceeds file size");
        }
        m.tensors.push_back(std::move(t));
    }

    // Ranges must tile the payload region: no overlap, no gaps.
    std::vector<const TensorMeta*> by_offset;
    by_offset.reserve(m.tensors.size());
    for (const auto& t : m.tensors) by_offset.push_back(&t);
    std::sort(by_offset.begin(), by_offset.end(),
              [](const TensorMeta* a, const TensorMeta* b) {
                  return a->begin != b->begin ? a->begin < b->begin : a->end < b->end;
              });
    uint64_t cursor = 0;
    for (const TensorMeta* t : by_offset) {
        if (t->begin < cursor) {
            throw IoError(path.string() + ": tensor '" + t->name +
                          "' overlaps a previous byte range");
        }
        if (t->begin > cursor) {
            throw IoError(path.string() + ": gap in tensor data region before '" + t->name + "'");
        }
        cursor = t->end;
    }
    if (cursor != m.total_bytes) {
        throw IoError(path.string() + ": tensor ranges do not cover the data region");
    }
    return m;
}

uint64_t Tensor::num_elements() const { return shape_elements(shape); }

float Tensor::element_as_f32(size_t i) const {
    switch (dtype) {
        case Dtype::F32: {
            uint32_t bits;
            std::memcpy(&bits, data.data() + i * 4, 4);
            return std::bit_cast<float>(bits);
        }
        case Dtype::F16: {
            uint16_t h;
            std::memcpy(&h, data.data() + i * 2, 2);
            return f16_to_f32(h);
        }
        case Dtype::BF16: {
            uint16_t h;
            std::memcpy(&h, data.data() + i * 2, 2);
            return bf16_to_f32(h);
        }
    }
    return 0.0f;
}

void Tensor::set_element_from_f32(size_t i, float v) {
    switch (dtype) {
        case Dtype::F32: {
            uint32_t bits = std::bit_cast<uint32_t>(v);
            std::memcpy(data.data() + i * 4, &bits, 4);
            break;
        }
        case Dtype::F16: {
            uint16_t h = f32_to_f16(v);
            std::memcpy(data.data() + i * 2, &h, 2);
            break;
        }
        case Dtype::BF16: {
            uint16_t h = f32_to_bf16(v);
            std::memcpy(data.data() + i * 2, &h, 2);
            break;
        }
    }
}

Tensor Tensor::from_f32(std::string name, std::vector<uint64_t> shape,
                        const std::vector<float>& values, Dtype storage) {
    Tensor t;
    t.name = std::move(name);
    t.dtype = storage;
    t.shape = std::move(shape);
    if (shape_elements(t.shape) != values.size()) {
        throw Error("tensor '" + t.name + "': shape does not match value count");
    }
    t.data.resize(values.size() * dtype_bytes(storage));
    for (size_t i = 0; i < values.size(); ++i) t.set_element_from_f32(i, values[i]);
    return t;
}

const Tensor* TensorSet::find(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

CheckpointManifest TensorSet::manifest() const {
    CheckpointManifest m;
    m.metadata = metadata;
    uint64_t cursor = 0;
    for (const auto& t : tensors) {
        TensorMeta meta;
        meta.name = t.name;
        meta.dtype = t.dtype;
        meta.shape = t.shape;
        meta.begin = cursor;
        meta.end = cursor + t.data.size();
        cursor = meta.end;
        m.tensors.push_back(std::move(meta));
    }
    m.total_bytes = cursor;
    return m;
}

std::string build_header(const std::vector<TensorMeta>& tensors,
                         const std::map<std::string, std::string>& metadata) {
    ordered_json j = ordered_json::object();
    if (!metadata.empty()) {
        ordered_json meta = ordered_json::object();
        for (const auto& [k, v] : metadata) meta[k] = v;
        j["__metadata__"] = std::move(meta);
    }
    for (const auto& t : tensors) {
        ordered_json entry = ordered_json::object();
        entry["dtype"] = dtype_name(t.dtype);
        entry["shape"] = t.shape;
        entry["data_offsets"] = {t.begin, t.end};
        j[t.name] = std::move(entry);
    }
    std::string body = j.dump();
    // Pad with spaces to an 8-byte boundary so payloads land aligned, as the
    // reference writers do.
    while (body.size() % 8 != 0) body.push_back(' ');

    std::string out(8, '\0');
    uint64_t n = body.size();
    for (int i = 0; i < 8; ++i) out[i] = char((n >> (8 * i)) & 0xFF);
    out += body;
    return out;
}

TensorSet read_tensor_set(const std::filesystem::path& path) {
    CheckpointManifest m = read_manifest(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    uint64_t payload_base = 8 + m.header_bytes;

    TensorSet set;
    set.metadata = m.metadata;
    for (const auto& meta : m.tensors) {
        Tensor t;
        t.name = meta.name;
        t.dtype = meta.dtype;
        t.shape = meta.shape;
        t.data.resize(meta.byte_size());
        in.seekg(static_cast<std::streamoff>(payload_base + meta.begin));
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size()));
        if (!in) throw IoError(path.string() + ": truncated payload for '" + t.name + "'");
        set.tensors.push_back(std::move(t));
    }
    return set;
}

void write_tensor_set(const std::filesystem::path& path, const TensorSet& set) {
    CheckpointManifest m = set.manifest();
    std::string header = build_header(m.tensors, m.metadata);

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        for (const auto& t : set.tensors) {
            out.write(reinterpret_cast<const char*>(t.data.data()),
                      static_cast<std::streamsize>(t.data.size()));
        }
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<uint8_t> read_tensor_payload(const std::filesystem::path& path,
                                         const CheckpointManifest& manifest,
                                         const TensorMeta& meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<uint8_t> data(meta.byte_size());
    in.seekg(static_cast<std::streamoff>(8 + manifest.header_bytes + meta.begin));
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!in) throw IoError(path.string() + ": truncated payload for '" + meta.name + "'");
    return data;
}

}  // namespace dart::safetensors
