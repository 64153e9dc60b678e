#include "proxshift/report.hpp"

#include <sstream>

namespace proxshift {

Json to_json(const Rational& r) { return r.str(); }

Json big_to_json(const BigRational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

Json to_json(const Partition& part) {
  return Json{{"n", part.n}, {"eps", to_json(part.eps)}, {"A", part.a}, {"B", part.b}};
}

Json to_json(const PartitionReport& r) {
  Json j;
  j["well_formed"] = r.well_formed;
  if (!r.issue.empty()) j["issue"] = r.issue;
  j["prop_i"] = {{"pass", r.prop_i}, {"size_a", r.size_a}, {"n_eps", to_json(r.n_eps)}};
  j["prop_ii"] = {{"pass", r.prop_ii}, {"failures", r.prop_ii_failures}};
  j["prop_iii"] = {{"pass", r.prop_iii}, {"bound", r.prop_iii_bound}, {"counts", r.prop_iii_counts}};
  j["structural"] = r.structural;
  j["strict"] = r.strict;
  return j;
}

Json to_json(const TowerLevel& level) {
  Json j;
  j["k"] = level.k();
  j["n"] = level.n();
  j["p"] = level.p();
  j["b"] = level.b();
  j["b_prime"] = level.b_prime();
  j["A"] = level.part().a;
  j["B"] = level.part().b;
  j["C"] = level.c();
  const CodingTable table = level_coding(level);
  Json f = Json::array();
  for (const auto& [i, v] : table.f) f.push_back({i, level.tau(i), v});
  j["tau_f"] = f;
  j["structural"] = level.structural();
  j["strict"] = level.strict();
  return j;
}

Json to_json(const Tower& tower, Index cap) {
  Json j;
  j["mode"] = tower.mode() == TowerMode::strict ? "strict" : "toy";
  j["schedule"] = tower.schedule().describe();
  j["depth"] = tower.depth();
  Json levels = Json::array();
  for (int k = 0; k <= tower.depth(); ++k) {
    Json lv = to_json(tower.level(k));
    lv["eps"] = to_json(tower.level(k).part().eps);
    lv["negative_seed_exponent"] = tower.negative_seed_exponent(k);
    const IndexSets sets = index_sets(tower, k, cap);
    lv["I"] = {sets.i_lo, 0};
    lv["J_count"] = sets.count;
    if (sets.elided) {
      lv["J"] = "elided";
    } else {
      lv["J"] = sets.j;
    }
    levels.push_back(lv);
  }
  j["levels"] = levels;
  j["entropy_ratio"] = big_to_json(BigRational(tower.b_prime(tower.depth()), tower.p(tower.depth())));
  j["schedule_product"] = big_to_json(tower.schedule().product_lower_bound(tower.depth()));
  j["all_strict"] = tower.all_strict(tower.depth());
  return j;
}

Json to_json(const Window& w) {
  Json coords = Json::array();
  for (const Coordinate& c : w.coords) coords.push_back(to_token(c));
  return Json{{"lo", w.lo}, {"hi", w.hi}, {"coords", coords}};
}

Json to_json(const MembershipReport& r) {
  Json j{{"status", to_string(r.status)}, {"blocks_checked", r.blocks_checked}};
  if (r.status == CheckStatus::fail) {
    j["fail_level"] = r.fail_level;
    j["fail_index"] = r.fail_index;
    j["fail_block"] = r.fail_block;
  }
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

Json to_json(const DecodeResult& r) {
  return Json{{"status", to_string(r.status)}, {"r", r.r.r}, {"survivors", r.survivors}, {"anchor", r.anchor}};
}

Json to_json(const CommonStarBlock& c) {
  return Json{{"N", c.N},           {"level", c.level},       {"case", c.case_id},
              {"a", c.a},           {"b", c.b},               {"selector", c.selector},
              {"n_plus", c.n_plus}, {"n_minus", c.n_minus},   {"verified", c.verified}};
}

Json to_json(const SeparationBlocks& s) {
  Json rows = Json::array();
  Index min_count = -1;
  for (const BlockRow& r : s.rows) {
    rows.push_back({{"block_start", r.block_start},
                    {"star_count", r.star_count},
                    {"separation_count", r.separation_count},
                    {"pass", r.pass}});
    if (min_count < 0 || r.separation_count < min_count) min_count = r.separation_count;
  }
  return Json{{"level", s.level},       {"case", s.case_id},      {"reference", s.reference == 0 ? "x" : "y"},
              {"bound", s.bound},       {"asserted", s.asserted}, {"min_separation", min_count},
              {"pass", s.pass},         {"blocks", rows}};
}

Json to_json(const MPrime& m) {
  return Json{{"m", m.m},
              {"m_prime", m.m_prime},
              {"m_top", m.m_top},
              {"boundary_levels", m.boundary_levels},
              {"digits", m.digits},
              {"digits_prime", m.digits_prime}};
}

Json to_json(const OrbitWindowReport& r) {
  return Json{{"level", r.level},         {"block_start", r.block_start}, {"alpha", r.alpha},
              {"n_range", {r.n_lo, r.n_hi}}, {"achieved_N", r.achieved_N}, {"probes", r.probes},
              {"mismatches", r.mismatches}, {"pass", r.pass}};
}

Json to_json(const EntropyBound& e) {
  return Json{{"level", e.level},
              {"ratio", big_to_json(e.ratio)},
              {"schedule_product", big_to_json(e.schedule_product)},
              {"h_base", e.h_base},
              {"bound", e.bound},
              {"schedule_bound", e.schedule_bound},
              {"strict", e.strict},
              {"pass", e.pass}};
}

Json to_json(const PairReport& r, std::size_t list_cap) {
  Json runs = Json::array();
  for (std::size_t i = 0; i < r.star_blocks.size() && i < list_cap; ++i) {
    runs.push_back({r.star_blocks[i].start, r.star_blocks[i].length});
  }
  std::vector<Index> hits(r.separation_hits.begin(),
                          r.separation_hits.begin() +
                              static_cast<std::ptrdiff_t>(std::min(list_cap, r.separation_hits.size())));
  return Json{{"window", {r.lo, r.hi}},
              {"N", r.N},
              {"delta", r.delta},
              {"r_match", r.r_match},
              {"star_block_count", r.star_blocks.size()},
              {"star_blocks", runs},
              {"longest_left", r.longest_left},
              {"longest_right", r.longest_right},
              {"separation_count", r.separation_hits.size()},
              {"separations_left", r.separations_left},
              {"separations_right", r.separations_right},
              {"separation_hits", hits},
              {"verdict", to_string(r.verdict)}};
}

std::string blocks_csv(const std::vector<BlockRow>& rows) {
  std::ostringstream os;
  os << "level,block_start,star_count,separation_count,bound,pass\n";
  for (const BlockRow& r : rows) {
    os << r.level << ',' << r.block_start << ',' << r.star_count << ',' << r.separation_count << ','
       << r.bound << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

Json to_json(const Check& c) {
  Json j{{"name", c.name}, {"bound", c.bound}, {"measured", c.measured}, {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

}  // namespace proxshift
