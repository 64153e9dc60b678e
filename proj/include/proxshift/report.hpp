#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "proxshift/analysis.hpp"
#include "proxshift/partition.hpp"
#include "proxshift/points.hpp"
#include "proxshift/tower.hpp"

namespace proxshift {

using Json = nlohmann::ordered_json;

/// Integer-valued fields are emitted as JSON numbers; rationals as "p/q"
/// strings so they survive a round trip exactly.
Json to_json(const Rational& r);
Json big_to_json(const BigRational& r);

Json to_json(const Partition& part);
Json to_json(const PartitionReport& report);
Json to_json(const TowerLevel& level);
/// Every level field plus the index sets; J_k is elided above `cap`.
Json to_json(const Tower& tower, Index cap = 2000);
Json to_json(const Window& w);
Json to_json(const MembershipReport& r);
Json to_json(const DecodeResult& r);
Json to_json(const CommonStarBlock& c);
Json to_json(const SeparationBlocks& s);
Json to_json(const MPrime& m);
Json to_json(const OrbitWindowReport& r);
Json to_json(const EntropyBound& e);
/// Hits and runs are truncated to `list_cap` entries each; the totals are
/// always present.
Json to_json(const PairReport& r, std::size_t list_cap = 200);

/// level,block_start,star_count,separation_count,bound,pass
std::string blocks_csv(const std::vector<BlockRow>& rows);

/// A check as it appears in reports: the claimed bound next to what was
/// measured.
struct Check {
  std::string name;
  std::string bound;
  std::string measured;
  bool pass = false;
  std::string note;
};

Json to_json(const Check& c);

}  // namespace proxshift
