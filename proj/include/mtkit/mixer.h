#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mtkit {

// Token-budget split policy for one language.
//   MonoOnly      — monolingual text only.
//   FixedRatio    — mono_parts : parallel_parts of the budget, no
//                   cross-substitution when one side runs short.
//   ParallelOnly  — sentence pairs only.
//   Pfms          — parallel-first monolingual-second: exhaust pair data,
//                   fill the remainder with monolingual text.
struct MixStrategy {
  enum class Kind { MonoOnly, FixedRatio, ParallelOnly, Pfms };

  Kind kind = Kind::Pfms;
  int64_t mono_parts = 0;
  int64_t parallel_parts = 0;

  static MixStrategy mono_only() { return {Kind::MonoOnly, 0, 0}; }
  static MixStrategy parallel_only() { return {Kind::ParallelOnly, 0, 0}; }
  static MixStrategy pfms() { return {Kind::Pfms, 0, 0}; }
  static MixStrategy fixed_ratio(int64_t mono, int64_t parallel);

  // Grammar: "mono" | "parallel" | "pfms" | "ratio:M:P".
  static MixStrategy parse(const std::string& spec);
  std::string str() const;

  bool operator==(const MixStrategy&) const = default;
};

constexpr const char* kPileEnglishCentric = "english_centric";
constexpr const char* kPileChineseCentric = "chinese_centric";

// What exists on disk for one language: monolingual tokens plus parallel
// tokens per pile. English has no english_centric pile and Chinese no
// chinese_centric pile, by construction.
struct Availability {
  std::string lang;
  int64_t mono_tokens = 0;
  std::map<std::string, int64_t> parallel_tokens;
};

// Per-language outcome: how many tokens to draw from each source. Always
// satisfies alloc_mono + sum(alloc_parallel) + shortfall == budget.
struct AllocationPlan {
  std::string lang;
  int64_t budget = 0;
  int64_t alloc_mono = 0;
  std::map<std::string, int64_t> alloc_parallel;
  int64_t shortfall = 0;

  int64_t parallel_total() const;
  int64_t allocated_total() const { return alloc_mono + parallel_total(); }
};

// Max-min fair split of `budget` over capped piles: every pile receives
// min(capacity, fair share) with leftovers redistributed until the budget or
// all piles are exhausted. Integer; ties in the final remainder go to piles
// in capacity order (then id order), so results are deterministic and the
// allocations of non-exhausted piles differ by at most one token.
std::map<std::string, int64_t> water_fill(
    const std::map<std::string, int64_t>& capacities, int64_t budget);

AllocationPlan plan_allocation(const Availability& avail, int64_t budget,
                               const MixStrategy& strategy);

std::vector<AllocationPlan> plan_all(const std::vector<Availability>& avails,
                                     int64_t budget,
                                     const MixStrategy& strategy);

// Availability manifest and plan files (JSON).
std::vector<Availability> load_availability(const std::string& path);
void save_availability(const std::string& path,
                       const std::vector<Availability>& avails);
std::vector<AllocationPlan> load_plans(const std::string& path);
void save_plans(const std::string& path,
                const std::vector<AllocationPlan>& plans);

}  // namespace mtkit
