#pragma once

// Every numeric default used by the CLI and the acceptance suite.

#include <array>
#include <string_view>

namespace conflict::defaults {

// Extraction
inline constexpr double kWindowHalf = 2.0;       // extract / dim-check window [-2, 2]^n
inline constexpr int kExtractResolution = 128;   // cells per axis
inline constexpr int kWorkers = 1;

// Tangent cone verification
inline constexpr std::array kTangentEps{0.4, 0.2, 0.1, 0.05};
inline constexpr int kTangentResolution = 96;
inline constexpr double kTangentAcceptTol = 0.05;  // chordal, at the smallest eps
inline constexpr double kTangentJitter = 0.2;
inline constexpr double kTangentWindowFactor = 1.25;
inline constexpr int kTerritorySamples = 500;
inline constexpr int kCapSamples = 1000;
inline constexpr double kCapFraction = 0.05;
inline constexpr double kTerritoryAgreement = 0.99;

// Normal embedding
inline constexpr std::array kEmbeddingScales{0.4, 0.2, 0.1};  // theta; probe radius 2 sin(theta/2)
inline constexpr double kEmbeddingWindowHalf = 0.6;
inline constexpr int kEmbeddingResolution = 128;
inline constexpr int kEmbeddingPairs = 64;
inline constexpr double kEmbeddingGrowth = 1.5;

// Branch tangents / no-cusp
inline constexpr std::array kNoCuspEps{0.1, 0.05, 0.025};
inline constexpr int kNoCuspResolution = 96;
inline constexpr double kNoCuspMinAngleDeg = 2.0;
inline constexpr double kBranchLinkageDeg = 10.0;

// Link topology
inline constexpr double kLinkEps = 0.2;
inline constexpr int kLinkResolution = 96;
inline constexpr double kLinkWindowFactor = 1.25;

// Randomized probes
inline constexpr unsigned long long kSeed = 1;

struct Entry {
  std::string_view name;
  std::string_view value;
  std::string_view meaning;
};

// Human-readable copy of the table above, printed by `conflict defaults`.
inline constexpr std::array kTable{
    Entry{"window", "[-2,2]^n", "extract and dim-check window"},
    Entry{"res", "128", "extract grid cells per axis"},
    Entry{"workers", "1", "grid kernel threads (output does not depend on it)"},
    Entry{"tangent.eps", "0.4,0.2,0.1,0.05", "slice radii for verify-tangent"},
    Entry{"tangent.res", "96", "local grid cells per axis for verify-tangent"},
    Entry{"tangent.tol", "0.05", "chordal Hausdorff bound at the smallest eps"},
    Entry{"tangent.jitter", "0.2", "allowed relative increase between successive eps"},
    Entry{"tangent.window", "1.25", "local window half-width in units of the largest eps"},
    Entry{"territory.samples", "500", "directions compared against spherical territories"},
    Entry{"territory.caps", "1000", "directions per achieving site for interior caps"},
    Entry{"embedding.scales", "0.4,0.2,0.1", "probe angles theta"},
    Entry{"embedding.window", "0.6", "local window half-width"},
    Entry{"embedding.res", "128", "local grid cells per axis"},
    Entry{"embedding.pairs", "64", "probe pairs per scale"},
    Entry{"embedding.growth", "1.5", "ratio growth per halving that counts as diverging"},
    Entry{"nocusp.eps", "0.1,0.05,0.025", "slice radii for branch tangents"},
    Entry{"nocusp.res", "96", "local grid cells per axis"},
    Entry{"nocusp.tol", "2", "minimum angle between branches in degrees"},
    Entry{"nocusp.linkage", "10", "angular clustering linkage in degrees"},
    Entry{"link.eps", "0.2", "link sphere radius"},
    Entry{"link.res", "96", "local grid cells per axis"},
    Entry{"seed", "1", "seed for randomized probes"},
};

}  // namespace conflict::defaults
