#pragma once

#include <climits>
#include <string>
#include <vector>

#include "mcwd/geometry.hpp"
#include "mcwd/report.hpp"

namespace mcwd {

enum class OrbitClass { FatouEscape, ECandidate, YLike, Z1Like, Z2Like, Truncated };

struct Classification {
  OrbitClass kind = OrbitClass::Truncated;
  long value = 0;       // escape annulus, backwards count, or Z1 entry step
  std::string reason;   // truncation reason
  std::string str() const;
};

constexpr long kNoIndex = LONG_MIN;

struct OrbitRecord {
  std::vector<LogPolar> points;
  std::vector<Region> regions;
  std::vector<long> orbit_seq;        // k(z,n); kNoIndex where undefined
  std::vector<long> backwards_events;  // n with k(z,n) < k(z,n-1) + 1
  Classification classification;
  long angle_bits_used = 0;
  json to_json() const;
};

struct OrbitOptions {
  double margin = 0x1p-40;  // log2 units; see the ledger on phi-budget margins
  long angle_budget = -1;   // bits; default P_ang - 64
};

// Iterates up to nmax steps (nmax + 1 points) and classifies the finite window.
OrbitRecord iterate_orbit(const ModelMap& m, const LogPolar& z, int nmax,
                          const OrbitOptions& opt = OrbitOptions());

// Derives orbit_seq, backwards events and the classification from regions.
void finish_record(const ModelMap& m, OrbitRecord& r, bool escaped, const std::string& trunc);

bool orbit_monotone(const OrbitRecord& r);

enum class BranchKind { VkRoot, PetalInverse, OriginBranch };

struct InverseBranchSpec {
  BranchKind kind = BranchKind::VkRoot;
  long k = 1;
  BigInt index = 0;  // root branch in [0, n_k), petal j in [1, n_k], or origin branch in [0, 2^N)
  std::string str() const;
};

// Inverse branch whose image contains z.
InverseBranchSpec branch_of(const ModelMap& m, const LogPolar& z);

// tol in log2 magnitude and turns; throws convergence_error when eval(result) misses target
LogPolar inverse_step(const ModelMap& m, const LogPolar& target, const InverseBranchSpec& b,
                      double tol = 0x1p-64);

struct ItineraryStep {
  Region region;   // V(k), P(k,j) or D
  BigInt branch = 0;  // root branch for V, origin branch for D; petals use region.j
};

struct BackwardResult {
  LogPolar z;
  bool verified = false;
  long mismatch_step = -1;
  std::vector<Region> realized;
  unsigned bits_used = 0;
};

// Working precision that lets forward re-iteration resolve every petal visit.
// Throws resource_error beyond 2^17 bits.
unsigned required_bits(const ModelMap& m, const std::vector<ItineraryStep>& it, const LogPolar& anchor);

// Pulls anchor back through the itinerary: f^i(z) lies in it[i].region and
// f^L(z) = anchor. Verifies by forward re-iteration.
BackwardResult backward_construct(const ModelMap& m, const std::vector<ItineraryStep>& it,
                                  const LogPolar& anchor);

CertificateReport verify_inclusions(const ModelMap& m, long k, int samples);
CertificateReport check_singular_values(const ModelMap& m);

}  // namespace mcwd
