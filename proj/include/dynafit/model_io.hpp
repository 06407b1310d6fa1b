#pragma once

#include "dynafit/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

namespace dynafit {

// Model container layout (all integers and floats little-endian):
//
//   line 1      JSON header terminated by '\n':
//               {"format_name":"dynafit-model","version":1,"kind":...,
//                "payload_bytes":B,"checksum":"fnv1a64"}
//   B bytes     binary payload
//                 kernel   : str tag, i64 integer parameter, f64 real parameter
//                 one-class: f64 threshold
//                 u64 class count, then per class:
//                   str label, u64 p, u64 n, u64 N, u64 k, f64 eigen_threshold_rel,
//                   f64[p*n*N] training trajectories (each n x N, row-major),
//                   f64[p*k] V (row-major), f64[k] sigma, f64[p*p] H (row-major)
//   8 bytes     u64 FNV-1a checksum of the payload
//
// str = u32 byte length followed by UTF-8 bytes.

inline constexpr const char* kModelFormatName = "dynafit-model";
inline constexpr int kModelFormatVersion = 1;

using ModelFile = std::variant<DynafitClassifier, OneClassDetector>;

void save_model(std::ostream& out, const ModelFile& model);
void save_model(const std::filesystem::path& path, const ModelFile& model);

/// Throws VersionError, ChecksumError or FormatError (truncated or malformed).
ModelFile load_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace dynafit
