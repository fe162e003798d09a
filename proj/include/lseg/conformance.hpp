#pragma once

// Runs the published test-vector files under vectors/ against the
// primitive adapters.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace lseg {

struct ConformanceResult {
    std::string suite;
    size_t passed = 0;
    size_t total = 0;
    std::vector<std::string> failures;

    bool ok() const { return total > 0 && passed == total; }
};

/// SUPERCOP sign.input lines: sk||pk : pk : msg : sig||msg :
ConformanceResult check_ed25519_file(const std::filesystem::path& path);

/// COUNT / INPUT_SCALAR / INPUT_U / OUTPUT_U records.
ConformanceResult check_x25519_file(const std::filesystem::path& path);

/// COUNT / ITERATIONS / OUTPUT_K records.
ConformanceResult check_x25519_iterated_file(const std::filesystem::path& path);

/// COUNT / IKM / salt / info / L / PRK / OKM records.
ConformanceResult check_hkdf_file(const std::filesystem::path& path);

/// LWC format: Count / Key / Nonce / PT / AD / CT (ciphertext || tag).
ConformanceResult check_ascon_file(const std::filesystem::path& path);

/// Every known file present in `dir`. A missing file is reported as a
/// failed suite with total = 0.
std::vector<ConformanceResult> run_conformance(const std::filesystem::path& dir);

} // namespace lseg
