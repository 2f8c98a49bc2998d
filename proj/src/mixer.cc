#include "mtkit/mixer.h"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace mtkit {

using nlohmann::json;

MixStrategy MixStrategy::fixed_ratio(int64_t mono, int64_t parallel) {
  if (mono <= 0 || parallel <= 0)
    throw std::invalid_argument("ratio parts must be positive");
  return {Kind::FixedRatio, mono, parallel};
}

MixStrategy MixStrategy::parse(const std::string& spec) {
  if (spec == "mono") return mono_only();
  if (spec == "parallel") return parallel_only();
  if (spec == "pfms") return pfms();
  if (spec.rfind("ratio:", 0) == 0) {
    auto rest = spec.substr(6);
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      try {
        int64_t m = std::stoll(rest.substr(0, colon));
        int64_t p = std::stoll(rest.substr(colon + 1));
        return fixed_ratio(m, p);
      } catch (const std::logic_error&) {
        // fall through to the error below
      }
    }
  }
  throw std::invalid_argument(
      "bad strategy (want mono | parallel | pfms | ratio:M:P): " + spec);
}

std::string MixStrategy::str() const {
  switch (kind) {
    case Kind::MonoOnly:
      return "mono";
    case Kind::ParallelOnly:
      return "parallel";
    case Kind::Pfms:
      return "pfms";
    case Kind::FixedRatio:
      return "ratio:" + std::to_string(mono_parts) + ":" +
             std::to_string(parallel_parts);
  }
  return "?";
}

int64_t AllocationPlan::parallel_total() const {
  int64_t total = 0;
  for (const auto& [pile, tokens] : alloc_parallel) total += tokens;
  return total;
}

std::map<std::string, int64_t> water_fill(
    const std::map<std::string, int64_t>& capacities, int64_t budget) {
  std::map<std::string, int64_t> alloc;
  for (const auto& [pile, cap] : capacities) alloc[pile] = 0;
  if (budget <= 0 || capacities.empty()) return alloc;

  // Process piles in ascending capacity. Each sets the running fair share
  // from what remains; a pile smaller than its share is drained entirely and
  // its slack flows to the larger piles behind it.
  std::vector<std::pair<int64_t, std::string>> order;
  order.reserve(capacities.size());
  for (const auto& [pile, cap] : capacities)
    order.emplace_back(std::max<int64_t>(cap, 0), pile);
  std::sort(order.begin(), order.end());

  int64_t remaining = budget;
  int64_t piles_left = static_cast<int64_t>(order.size());
  for (const auto& [cap, pile] : order) {
    int64_t share = remaining / piles_left;
    int64_t take = std::min(cap, share);
    alloc[pile] = take;
    remaining -= take;
    --piles_left;
  }
  // Integer floor can leave a residue even with spare capacity; hand it out
  // one token at a time in the same deterministic order.
  for (size_t i = order.size(); remaining > 0;) {
    i = i == 0 ? order.size() - 1 : i - 1;
    auto& [cap, pile] = order[i];
    if (alloc[pile] < cap) {
      ++alloc[pile];
      --remaining;
    }
    bool any_slack = false;
    for (const auto& [c, p] : order) any_slack |= alloc[p] < c;
    if (!any_slack) break;
  }
  return alloc;
}

AllocationPlan plan_allocation(const Availability& avail, int64_t budget,
                               const MixStrategy& strategy) {
  if (budget <= 0) throw std::invalid_argument("budget must be positive");

  int64_t parallel_target = 0;
  switch (strategy.kind) {
    case MixStrategy::Kind::MonoOnly:
      parallel_target = 0;
      break;
    case MixStrategy::Kind::ParallelOnly:
    case MixStrategy::Kind::Pfms:
      parallel_target = budget;
      break;
    case MixStrategy::Kind::FixedRatio: {
      const auto total_parts =
          static_cast<__int128>(strategy.mono_parts) + strategy.parallel_parts;
      parallel_target = static_cast<int64_t>(
          static_cast<__int128>(budget) * strategy.parallel_parts / total_parts);
      break;
    }
  }

  AllocationPlan plan;
  plan.lang = avail.lang;
  plan.budget = budget;
  plan.alloc_parallel = water_fill(avail.parallel_tokens, parallel_target);

  const int64_t parallel_got = plan.parallel_total();
  int64_t mono_target;
  if (strategy.kind == MixStrategy::Kind::Pfms) {
    // Parallel first, monolingual fills whatever budget is left.
    mono_target = budget - parallel_got;
  } else if (strategy.kind == MixStrategy::Kind::ParallelOnly) {
    mono_target = 0;
  } else {
    // MonoOnly / FixedRatio: the mono side gets exactly its share of the
    // budget; a short parallel side is not backfilled with mono or vice
    // versa.
    mono_target = budget - parallel_target;
  }
  plan.alloc_mono = std::min(std::max<int64_t>(avail.mono_tokens, 0), mono_target);
  plan.shortfall = budget - plan.alloc_mono - parallel_got;
  return plan;
}

std::vector<AllocationPlan> plan_all(const std::vector<Availability>& avails,
                                     int64_t budget,
                                     const MixStrategy& strategy) {
  std::vector<AllocationPlan> plans;
  plans.reserve(avails.size());
  for (const auto& a : avails) plans.push_back(plan_allocation(a, budget, strategy));
  return plans;
}

namespace {

json availability_to_json(const Availability& a) {
  json piles = json::object();
  for (const auto& [pile, tokens] : a.parallel_tokens) piles[pile] = tokens;
  return {{"lang", a.lang}, {"mono_tokens", a.mono_tokens}, {"parallel_tokens", piles}};
}

json plan_to_json(const AllocationPlan& p) {
  json piles = json::object();
  for (const auto& [pile, tokens] : p.alloc_parallel) piles[pile] = tokens;
  return {{"lang", p.lang},
          {"budget", p.budget},
          {"alloc_mono", p.alloc_mono},
          {"alloc_parallel", piles},
          {"shortfall", p.shortfall}};
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
  json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const json& j, const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(std::string("cannot write ") + what + ": " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::vector<Availability> load_availability(const std::string& path) {
  json j = load_json_file(path, "availability manifest");
  std::vector<Availability> out;
  for (const auto& item : j) {
    Availability a;
    a.lang = item.at("lang").get<std::string>();
    a.mono_tokens = item.at("mono_tokens").get<int64_t>();
    for (const auto& [pile, tokens] : item.at("parallel_tokens").items())
      a.parallel_tokens[pile] = tokens.get<int64_t>();
    out.push_back(std::move(a));
  }
  return out;
}

void save_availability(const std::string& path,
                       const std::vector<Availability>& avails) {
  json j = json::array();
  for (const auto& a : avails) j.push_back(availability_to_json(a));
  save_json_file(path, j, "availability manifest");
}

std::vector<AllocationPlan> load_plans(const std::string& path) {
  json j = load_json_file(path, "plan file");
  std::vector<AllocationPlan> out;
  for (const auto& item : j) {
    AllocationPlan p;
    p.lang = item.at("lang").get<std::string>();
    p.budget = item.at("budget").get<int64_t>();
    p.alloc_mono = item.at("alloc_mono").get<int64_t>();
    for (const auto& [pile, tokens] : item.at("alloc_parallel").items())
      p.alloc_parallel[pile] = tokens.get<int64_t>();
    p.shortfall = item.at("shortfall").get<int64_t>();
    out.push_back(std::move(p));
  }
  return out;
}

void save_plans(const std::string& path,
                const std::vector<AllocationPlan>& plans) {
  json j = json::array();
  for (const auto& p : plans) j.push_back(plan_to_json(p));
  save_json_file(path, j, "plan file");
}

}  // namespace mtkit
