#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dart/safetensors.hpp"

namespace dart::fusion {

using safetensors::CheckpointManifest;
using safetensors::TensorSet;

struct CompatIssue {
    enum class Kind { MISSING_IN_A, MISSING_IN_B, SHAPE_MISMATCH, DTYPE_MISMATCH };
    Kind kind;
    std::string tensor;
    std::string detail;
};

struct CompatReport {
    std::vector<CompatIssue> issues;
    bool fusable() const { return issues.empty(); }
    std::string summary() const;
};

// Mismatches are report content, not failures: an empty report means the two
// checkpoints can be fused.
CompatReport validate_compat(const CheckpointManifest& a, const CheckpointManifest& b);

struct FusionSpec {
    double alpha = 0.0;
    std::filesystem::path base_path;
    std::filesystem::path distilled_path;
    std::filesystem::path output_path;  // single fuse: file; sweep: output directory
    enum class Precision { WIDEN_TO_F32 } compute_precision = Precision::WIDEN_TO_F32;
    std::optional<std::vector<double>> alpha_grid;
    // NaN/inf elements abort by default; silent propagation would poison every
    // fused model downstream.
    bool allow_nonfinite = false;

    void validate() const;  // throws ConfigError
};

// out[i] = round_to_storage((1-alpha) * base[i] + alpha * distilled[i]).
// Inputs are widened per element; the combination is accumulated wide and
// rounded once to F32 before storage rounding, so the F32 result is within
// 1 ULP of the exact value even under cancellation. Output mirrors base's
// names, shapes and dtypes.
TensorSet interpolate(const TensorSet& base, const TensorSet& distilled, double alpha,
                      bool allow_nonfinite = false);

// Element-level kernel shared by the in-memory and streaming paths.
float lerp_f32(float base, float distilled, double alpha);

// Streams base/distilled tensor-by-tensor into the fused output file; peak
// memory is bounded by the largest single tensor times three. Records
// dart.alpha / dart.base_sha256 / dart.distilled_sha256 in the output header.
void fuse_files(const FusionSpec& spec);

// One fused checkpoint per grid alpha, named model_alpha_<a>.safetensors with
// fixed 3-decimal formatting. Inputs are read once per tensor. Empty grid is
// a warned no-op.
std::vector<std::filesystem::path> sweep(const FusionSpec& spec);

std::filesystem::path sweep_output_name(const std::filesystem::path& dir, double alpha);

}  // namespace dart::fusion
