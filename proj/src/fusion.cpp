#include "dart/fusion.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "dart/half_floats.hpp"
#include "dart/sha256.hpp"

namespace dart::fusion {

namespace st = safetensors;

std::string CompatReport::summary() const {
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue.tensor + ": " + issue.detail;
    }
    return out;
}

CompatReport validate_compat(const CheckpointManifest& a, const CheckpointManifest& b) {
    CompatReport report;
    for (const auto& ta : a.tensors) {
        const st::TensorMeta* tb = b.find(ta.name);
        if (!tb) {
            report.issues.push_back({CompatIssue::Kind::MISSING_IN_B, ta.name,
                                     "present in base but missing in distilled"});
            continue;
        }
        if (ta.shape != tb->shape) {
            report.issues.push_back({CompatIssue::Kind::SHAPE_MISMATCH, ta.name,
                                     "shape differs between checkpoints"});
        }
        if (ta.dtype != tb->dtype) {
            report.issues.push_back({CompatIssue::Kind::DTYPE_MISMATCH, ta.name,
                                     std::string("dtype ") + st::dtype_name(ta.dtype) + " vs " +
                                         st::dtype_name(tb->dtype)});
        }
    }
    for (const auto& tb : b.tensors) {
        if (!a.find(tb.name)) {
            report.issues.push_back({CompatIssue::Kind::MISSING_IN_A, tb.name,
                                     "present in distilled but missing in base"});
        }
    }
    return report;
}

void FusionSpec::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must be in [0,1], got " + std::to_string(alpha));
    }
    if (alpha_grid) {
        double prev = -1.0;
        for (double a : *alpha_grid) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw ConfigError("alpha grid entry out of [0,1]: " + std::to_string(a));
            }
            if (a <= prev) throw ConfigError("alpha grid must be sorted strictly increasing");
            prev = a;
        }
    }
}

float lerp_f32(float base, float distilled, double alpha) {
    return static_cast<float>((1.0 - alpha) * static_cast<double>(base) +
                              alpha * static_cast<double>(distilled));
}

namespace {

void check_finite(float v, const std::string& tensor, size_t index, const char* side) {
    if (!std::isfinite(v)) {
        throw Error("non-finite element in " + std::string(side) + " tensor '" + tensor +
                    "' at index " + std::to_string(index));
    }
}

// Interpolates one raw tensor payload. base/distilled hold storage bytes of
// the same dtype and length; the result is written over `out`.
void lerp_payload(const std::string& name, st::Dtype dtype, const uint8_t* base,
                  const uint8_t* distilled, uint8_t* out, size_t n_elements, double alpha,
                  bool allow_nonfinite) {
    switch (dtype) {
        case st::Dtype::F32: {
            for (size_t i = 0; i < n_elements; ++i) {
                float b, d;
                std::memcpy(&b, base + i * 4, 4);
                std::memcpy(&d, distilled + i * 4, 4);
                if (!allow_nonfinite) {
                    check_finite(b, name, i, "base");
                    check_finite(d, name, i, "distilled");
                }
                float r = lerp_f32(b, d, alpha);
                std::memcpy(out + i * 4, &r, 4);
            }
            break;
        }
        case st::Dtype::F16: {
            for (size_t i = 0; i < n_elements; ++i) {
                uint16_t hb, hd;
                std::memcpy(&hb, base + i * 2, 2);
                std::memcpy(&hd, distilled + i * 2, 2);
                float b = f16_to_f32(hb), d = f16_to_f32(hd);
                if (!allow_nonfinite) {
                    check_finite(b, name, i, "base");
                    check_finite(d, name, i, "distilled");
                }
                uint16_t r = f32_to_f16(lerp_f32(b, d, alpha));
                std::memcpy(out + i * 2, &r, 2);
            }
            break;
        }
        case st::Dtype::BF16: {
            for (size_t i = 0; i < n_elements; ++i) {
                uint16_t hb, hd;
                std::memcpy(&hb, base + i * 2, 2);
                std::memcpy(&hd, distilled + i * 2, 2);
                float b = bf16_to_f32(hb), d = bf16_to_f32(hd);
                if (!allow_nonfinite) {
                    check_finite(b, name, i, "base");
                    check_finite(d, name, i, "distilled");
                }
                uint16_t r = f32_to_bf16(lerp_f32(b, d, alpha));
                std::memcpy(out + i * 2, &r, 2);
            }
            break;
        }
    }
}

void require_compatible(const CheckpointManifest& base, const CheckpointManifest& distilled) {
    CompatReport report = validate_compat(base, distilled);
    if (!report.fusable()) {
        throw Error("checkpoints are not fusable: " + report.summary());
    }
}

std::map<std::string, std::string> provenance_metadata(double alpha,
                                                       const std::string& base_sha,
                                                       const std::string& distilled_sha) {
    return {
        {"dart.alpha", format_alpha(alpha)},
        {"dart.base_sha256", base_sha},
        {"dart.distilled_sha256", distilled_sha},
    };
}

}  // namespace

TensorSet interpolate(const TensorSet& base, const TensorSet& distilled, double alpha,
                      bool allow_nonfinite) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error("alpha must be in [0,1], got " + std::to_string(alpha));
    }
    require_compatible(base.manifest(), distilled.manifest());

    TensorSet out;
    out.metadata = base.metadata;
    for (const auto& tb : base.tensors) {
        const st::Tensor* td = distilled.find(tb.name);
        st::Tensor fused;
        fused.name = tb.name;
        fused.dtype = tb.dtype;
        fused.shape = tb.shape;
        fused.data.resize(tb.data.size());
        lerp_payload(tb.name, tb.dtype, tb.data.data(), td->data.data(), fused.data.data(),
                     tb.num_elements(), alpha, allow_nonfinite);
        out.tensors.push_back(std::move(fused));
    }
    return out;
}

namespace {

struct StreamTarget {
    double alpha;
    std::filesystem::path final_path;
    std::filesystem::path tmp_path;
    std::ofstream stream;
};

// Shared implementation for single fuse and sweep: base tensors are walked in
// manifest order, each pair of payloads is read once and fused for every
// target alpha.
std::vector<std::filesystem::path> fuse_streaming(const FusionSpec& spec,
                                                  const std::vector<double>& alphas,
                                                  bool sweep_naming) {
    CheckpointManifest base = st::read_manifest(spec.base_path);
    CheckpointManifest distilled = st::read_manifest(spec.distilled_path);
    require_compatible(base, distilled);

    std::string base_sha = sha256_file_hex(spec.base_path);
    std::string distilled_sha = sha256_file_hex(spec.distilled_path);

    // Output manifests mirror base names/shapes/dtypes with repacked offsets.
    std::vector<st::TensorMeta> out_metas;
    uint64_t cursor = 0;
    for (const auto& t : base.tensors) {
        st::TensorMeta m = t;
        m.begin = cursor;
        m.end = cursor + t.byte_size();
        cursor = m.end;
        out_metas.push_back(std::move(m));
    }

    std::vector<StreamTarget> targets;
    for (double alpha : alphas) {
        StreamTarget target;
        target.alpha = alpha;
        target.final_path = sweep_naming
                                ? sweep_output_name(spec.output_path, alpha)
                                : spec.output_path;
        target.tmp_path = target.final_path;
        target.tmp_path += ".tmp";
        if (sweep_naming) std::filesystem::create_directories(spec.output_path);
        else if (target.final_path.has_parent_path()) {
            std::filesystem::create_directories(target.final_path.parent_path());
        }
        target.stream.open(target.tmp_path, std::ios::binary | std::ios::trunc);
        if (!target.stream) {
            throw IoError("cannot open " + target.tmp_path.string() + " for writing");
        }
        std::string header =
            st::build_header(out_metas, provenance_metadata(alpha, base_sha, distilled_sha));
        target.stream.write(header.data(), static_cast<std::streamsize>(header.size()));
        targets.push_back(std::move(target));
    }

    std::vector<uint8_t> fused;
    for (const auto& meta : base.tensors) {
        const st::TensorMeta* dmeta = distilled.find(meta.name);
        std::vector<uint8_t> b = st::read_tensor_payload(spec.base_path, base, meta);
        std::vector<uint8_t> d = st::read_tensor_payload(spec.distilled_path, distilled, *dmeta);
        fused.resize(b.size());
        for (auto& target : targets) {
            lerp_payload(meta.name, meta.dtype, b.data(), d.data(), fused.data(),
                         meta.num_elements(), target.alpha, spec.allow_nonfinite);
            target.stream.write(reinterpret_cast<const char*>(fused.data()),
                                static_cast<std::streamsize>(fused.size()));
            if (!target.stream) {
                throw IoError("write failed (disk full?): " + target.tmp_path.string());
            }
        }
    }

    std::vector<std::filesystem::path> outputs;
    for (auto& target : targets) {
        target.stream.flush();
        if (!target.stream) {
            throw IoError("write failed (disk full?): " + target.tmp_path.string());
        }
        target.stream.close();
        std::filesystem::rename(target.tmp_path, target.final_path);
        outputs.push_back(target.final_path);
    }
    return outputs;
}

}  // namespace

void fuse_files(const FusionSpec& spec) {
    spec.validate();
    fuse_streaming(spec, {spec.alpha}, /*sweep_naming=*/false);
}

std::vector<std::filesystem::path> sweep(const FusionSpec& spec) {
    spec.validate();
    if (!spec.alpha_grid || spec.alpha_grid->empty()) {
        std::fprintf(stderr, "warning: empty alpha grid, nothing to fuse\n");
        return {};
    }
    return fuse_streaming(spec, *spec.alpha_grid, /*sweep_naming=*/true);
}

std::filesystem::path sweep_output_name(const std::filesystem::path& dir, double alpha) {
    return dir / ("model_alpha_" + format_alpha(alpha) + ".safetensors");
}

}  // namespace dart::fusion
