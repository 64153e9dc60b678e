#include "proxshift/suite.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace proxshift {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: bad value '" + value + "' for " + key);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: bad value '" + value + "' for " + key);
}

std::vector<Rational> parse_eps_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(Rational::parse(trim(item)));
    } catch (const std::exception& e) {
      throw ConfigError("config: bad eps entry '" + item + "': " + e.what());
    }
  }
  if (out.empty()) throw ConfigError("config: empty eps list");
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string str(Index v) { return std::to_string(v); }

Index uniform(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

// Everything the stages share.
struct Run {
  const ExperimentConfig& cfg;
  std::mt19937_64 rng;
  std::vector<Check> checks;
  std::vector<BlockRow> rows;
  Json sections = Json::object();

  void check(std::string name, std::string bound, std::string measured, bool pass, std::string note = {}) {
    checks.push_back({std::move(name), std::move(bound), std::move(measured), pass, std::move(note)});
  }
};

void stage_points(Run& run, const Tower& tower, const std::vector<PointSpec>& samples) {
  const int K = run.cfg.level;
  const Index pK = tower.p(K);
  Json out = Json::array();
  for (const PointSpec& x : samples) {
    const Index s = uniform(run.rng, 0, pK - 1);
    const PointSpec y = shift_point(x, s);
    const Window w = window(y, -s - pK, -s + pK);
    const RSequence r = phases_of_shift(tower, s, K);
    const MembershipReport mr = check_membership(w, tower, r, K);

    Index missing = 0;
    for (Index i : star_support(tower, r, K, w.lo, w.hi)) {
      if (!w.at(i).star) ++missing;
    }
    Index stray = 0;
    const std::vector<Index> orbit = orbit_support(tower, r, K, w.lo, w.hi);
    for (Index i = w.lo; i < w.hi; ++i) {
      if (!w.at(i).star && !std::binary_search(orbit.begin(), orbit.end(), i)) ++stray;
    }
    run.check("membership root " + std::to_string(x.root_id()), "pass", to_string(mr.status),
              mr.status == CheckStatus::pass, "shift " + str(s));
    run.check("star support root " + std::to_string(x.root_id()), "0 non-* guaranteed indices",
              str(missing) + " non-*, " + str(stray) + " outside orbit support", missing == 0 && stray == 0);
    out.push_back({{"root", x.root_id()},
                   {"shift", s},
                   {"window", {w.lo, w.hi}},
                   {"membership", to_json(mr)}});
  }
  run.sections["points"] = out;
}

void stage_decode(Run& run, const Tower& tower, const std::vector<PointSpec>& samples) {
  const int K = run.cfg.level;
  const Index pK = tower.p(K);
  Json out = Json::array();
  int unique = 0;
  for (int t = 0; t < run.cfg.decode_trials; ++t) {
    const PointSpec& x = samples[static_cast<std::size_t>(t) % samples.size()];
    const Index s = uniform(run.rng, 0, pK - 1);
    const Window w = window(shift_point(x, s), -s - 2 * pK, -s + 2 * pK);
    const DecodeResult d = decode_r(w, tower, K);
    const bool ok = d.status == DecodeStatus::unique && d.r == phases_of_shift(tower, s, K);
    unique += ok;
    out.push_back({{"shift", s}, {"result", to_json(d)}, {"pass", ok}});
  }
  run.check("decode round trips", str(run.cfg.decode_trials) + " unique and correct", str(unique),
            unique == run.cfg.decode_trials);
  run.sections["decode"] = out;
}

void stage_pairs(Run& run, const Tower& tower, const std::vector<PointSpec>& samples) {
  const int K = run.cfg.level;
  const int D = tower.depth();
  const Index pK = tower.p(K);
  Json out = Json::array();
  for (int t = 0; t < run.cfg.pair_trials; ++t) {
    const std::size_t ix = static_cast<std::size_t>(t) % samples.size();
    const std::size_t iy = t % 2 == 0 ? ix : (ix + 1) % samples.size();
    const Index sx = uniform(run.rng, 0, pK - 1);
    Index sy = uniform(run.rng, 0, pK - 1);
    if (ix == iy && sy == sx) sy = (sx + 1) % pK;
    const PointSpec x = shift_point(samples[ix], sx);
    const PointSpec y = shift_point(samples[iy], sy);
    Json entry{{"x", {{"root", samples[ix].root_id()}, {"shift", sx}}},
               {"y", {{"root", samples[iy].root_id()}, {"shift", sy}}}};
    const std::string tag = "pair " + std::to_string(t);

    Json blocks = Json::array();
    // Level k draws on level k + 1, and its blocks must stay inside the
    // tower's reach around the shifts, which holds for k <= D - 2.
    for (int k = 0; k <= std::max(0, D - 2) && k + 1 <= D; ++k) {
      const Index N = tower.p(k) / 2 - 1;
      if (N < 1) continue;
      try {
        const CommonStarBlock c = find_common_star_block(x, y, N, k);
        run.check(tag + " common * block level " + std::to_string(k), "verified, N = " + str(N),
                  c.verified ? "verified" : "failed", c.verified);
        blocks.push_back(to_json(c));
      } catch (const std::exception& e) {
        run.check(tag + " common * block level " + std::to_string(k), "verified, N = " + str(N), e.what(),
                  false);
      }
    }
    entry["common_star_blocks"] = blocks;

    const Index lo = std::max({x.lo(), y.lo(), -2 * pK});
    const Index hi = std::min({x.hi(), y.hi(), 2 * pK});
    Json seps = Json::array();
    const RSequence rx = x.phases(K);
    const RSequence ry = y.phases(K);
    for (int k = 0; k <= K; ++k) {
      if (rx.at(k) == ry.at(k)) continue;
      const SeparationBlocks sb = separation_blocks(x, y, k, lo, hi);
      run.rows.insert(run.rows.end(), sb.rows.begin(), sb.rows.end());
      Index min_count = -1;
      for (const BlockRow& r : sb.rows) {
        if (min_count < 0 || r.separation_count < min_count) min_count = r.separation_count;
      }
      if (sb.asserted) {
        run.check(tag + " separations level " + std::to_string(k), ">= " + str(sb.bound) + " per block",
                  "min " + str(min_count) + " over " + std::to_string(sb.rows.size()) + " blocks",
                  sb.pass && !sb.rows.empty());
      }
      Json j = to_json(sb);
      j.erase("blocks");
      j["block_count"] = sb.rows.size();
      seps.push_back(j);
    }
    entry["separation_blocks"] = seps;

    const Index N0 = std::max<Index>(1, tower.p(0) / 2 - 1);
    const PairReport pr = classify_pair(x, y, lo, hi, run.cfg.delta, N0);
    if (K >= 1) {
      run.check(tag + " verdict", "both", to_string(pr.verdict), pr.verdict == Verdict::both);
    }
    entry["classification"] = to_json(pr, 20);
    out.push_back(entry);
  }

  // Against the all-star point every non-* block separates on all of B_k.
  const PointSpec star = PointSpec::all_star(samples.front().tower_ptr());
  const PointSpec& x = samples.front();
  Json star_rows = Json::array();
  for (int k = 0; k <= K; ++k) {
    const SeparationBlocks sb = separation_blocks(x, star, k, -2 * pK, 2 * pK);
    run.rows.insert(run.rows.end(), sb.rows.begin(), sb.rows.end());
    run.check("all-star separations level " + std::to_string(k), ">= " + str(sb.bound) + " per block",
              std::to_string(sb.rows.size()) + " blocks", sb.pass && !sb.rows.empty());
    Json j = to_json(sb);
    j.erase("blocks");
    j["block_count"] = sb.rows.size();
    star_rows.push_back(j);
  }
  const bool fixed = shift_fixed_on(star, -pK, pK);
  run.check("all-star point fixed", "true", fixed ? "true" : "false", fixed);
  run.sections["pairs"] = out;
  run.sections["all_star"] = star_rows;
}

Index draw_digit(std::mt19937_64& rng, const std::vector<Index>& from) {
  return from[static_cast<std::size_t>(uniform(rng, 0, static_cast<Index>(from.size()) - 1))];
}

void stage_mprime(Run& run, const Tower& tower, const std::vector<PointSpec>& samples) {
  const int K = run.cfg.level;
  const int D = tower.depth();
  const PointSpec& x = samples.front();
  const PointSpec& y = samples.back();
  Json out = Json::array();
  Index equal = 0;
  Index orbit_ok = 0;
  Index orbit_total = 0;
  Index reach_ok = 0;
  Index reach_total = 0;
  for (int t = 0; t < run.cfg.mprime_trials; ++t) {
    // Interior digits above K, arbitrary B digits up to K with one forced to
    // the boundary, assembled with phase 0.
    const int forced = static_cast<int>(uniform(run.rng, 0, K));
    Index m = 0;
    for (int k = 0; k <= D; ++k) {
      const TowerLevel& lv = tower.level(k);
      Index d = 0;
      if (k > K) {
        std::vector<Index> interior;
        for (Index c : lv.c()) {
          const Index tc = lv.tau(c);
          if (tc >= 2 && tc <= lv.b() - 3) interior.push_back(c);
        }
        d = draw_digit(run.rng, interior);
      } else if (k == forced) {
        const Index ranks[] = {0, 1, lv.b() - 2, lv.b() - 1};
        d = lv.tau_inv(ranks[uniform(run.rng, 0, 3)]);
      } else {
        d = draw_digit(run.rng, lv.part().b);
      }
      m += d * tower.p(k - 1);
    }
    const MPrime mp = compute_mprime(x, m, K);
    const bool same = symbol_at(x, mp.m_prime) == symbol_at(x, m) && symbol_at(y, mp.m_prime) == symbol_at(y, m);
    equal += same;
    Json windows = Json::array();
    for (int k = 0; k <= K; ++k) {
      const OrbitWindowReport ow = check_orbit_window(x, mp.m_prime, k);
      ++orbit_total;
      orbit_ok += ow.pass;
      const TowerLevel& lv = tower.level(k);
      const Index tk = lv.tau(mp.digits_prime[static_cast<std::size_t>(k)]);
      if (tk >= 2 && tk <= lv.b() - 3) {
        ++reach_total;
        reach_ok += ow.achieved_N >= tower.b_prime(k - 1);
      }
      windows.push_back(to_json(ow));
    }
    out.push_back({{"mprime", to_json(mp)}, {"coordinates_equal", same}, {"orbit_windows", windows}});
  }
  run.check("m' keeps coordinates", str(run.cfg.mprime_trials), str(equal), equal == run.cfg.mprime_trials);
  run.check("orbit windows", str(orbit_total) + " without mismatch", str(orbit_ok), orbit_ok == orbit_total);
  run.check("orbit window reach on interior digits", str(reach_total) + " with N >= b'_{k-1}", str(reach_ok),
            reach_ok == reach_total);
  run.sections["mprime"] = out;
}

void stage_entropy(Run& run, const Tower& tower) {
  const EntropyEstimate est = entropy_estimate(tower.base().base, run.cfg.entropy_n, run.cfg.entropy_n, 0.5);
  Json out{{"base_estimate", est.value}, {"n", run.cfg.entropy_n}};
  Json levels = Json::array();
  BigRational prev(2);
  bool monotone = true;
  for (int k = 0; k <= tower.depth(); ++k) {
    const EntropyBound e = entropy_lower_bound(tower, k, est.value);
    monotone = monotone && e.ratio <= prev;
    prev = e.ratio;
    if (e.strict) {
      run.check("entropy bound level " + std::to_string(k), big_to_json(e.schedule_product).get<std::string>(),
                big_to_json(e.ratio).get<std::string>(), e.pass);
    }
    levels.push_back(to_json(e));
  }
  run.check("entropy ratio nonincreasing", "true", monotone ? "true" : "false", monotone);
  out["levels"] = levels;
  run.sections["entropy"] = out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "base") {
      c.base = value;
    } else if (key == "mode") {
      if (value == "strict") {
        c.mode = TowerMode::strict;
      } else if (value == "toy") {
        c.mode = TowerMode::toy;
      } else {
        throw ConfigError("config: mode must be strict or toy");
      }
    } else if (key == "eps_num") {
      c.eps_num = parse_number<std::int64_t>(key, value);
    } else if (key == "eps_base") {
      c.eps_base = parse_number<std::int64_t>(key, value);
    } else if (key == "eps_offset") {
      c.eps_offset = parse_number<int>(key, value);
    } else if (key == "eps") {
      c.eps_list = value;
    } else if (key == "toy_levels") {
      c.toy_levels = value;
    } else if (key == "level") {
      c.level = parse_number<int>(key, value);
    } else if (key == "tower_depth") {
      c.tower_depth = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "roots") {
      c.roots = parse_number<int>(key, value);
    } else if (key == "decode_trials") {
      c.decode_trials = parse_number<int>(key, value);
    } else if (key == "pair_trials") {
      c.pair_trials = parse_number<int>(key, value);
    } else if (key == "mprime_trials") {
      c.mprime_trials = parse_number<int>(key, value);
    } else if (key == "delta") {
      c.delta = parse_real(key, value);
    } else if (key == "entropy_n") {
      c.entropy_n = parse_number<Index>(key, value);
    } else if (key == "report_json") {
      c.report_json = value;
    } else if (key == "report_csv") {
      c.report_csv = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig c = parse_config(buf.str());
  // Input files are looked up next to the config; reports go to the
  // working directory.
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  auto anchor = [&](std::string& file) {
    if (!file.empty() && std::filesystem::path(file).is_relative()) file = (dir / file).string();
  };
  anchor(c.toy_levels);
  if (c.base.rfind("file:", 0) == 0) {
    std::string file = c.base.substr(5);
    anchor(file);
    c.base = "file:" + file;
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j{{"base", c.base},
         {"mode", c.mode == TowerMode::strict ? "strict" : "toy"},
         {"eps_num", c.eps_num},
         {"eps_base", c.eps_base},
         {"eps_offset", c.eps_offset},
         {"eps", c.eps_list},
         {"toy_levels", c.toy_levels},
         {"level", c.level},
         {"tower_depth", c.tower_depth},
         {"seed", c.seed},
         {"roots", c.roots},
         {"decode_trials", c.decode_trials},
         {"pair_trials", c.pair_trials},
         {"mprime_trials", c.mprime_trials},
         {"delta", c.delta},
         {"entropy_n", c.entropy_n}};
  return j;
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
  SuiteResult result;
  Json& rep = result.report;
  rep["schema"] = "proxshift-suite/1";
  rep["timestamp"] = utc_now();
  rep["config"] = to_json(cfg);

  Run run{cfg, std::mt19937_64(cfg.seed), {}, {}, Json::object()};
  auto finish = [&](int code) {
    Json checks = Json::array();
    bool all = true;
    for (const Check& c : run.checks) {
      checks.push_back(to_json(c));
      all = all && c.pass;
    }
    if (code == kExitOk && !all) code = kExitAssertion;
    rep["sections"] = run.sections;
    rep["checks"] = checks;
    rep["pass"] = code == kExitOk;
    rep["exit_code"] = code;
    if (!result.diagnostic.empty()) rep["diagnostic"] = result.diagnostic;
    result.exit_code = code;
    result.csv = blocks_csv(run.rows);
    return result;
  };

  // Configuration: anything wrong here is exit 2.
  std::optional<StarSpace> space;
  EpsSchedule schedule;
  BuildOptions options;
  options.mode = cfg.mode;
  try {
    if (cfg.level < 0) throw ConfigError("config: level must be nonnegative");
    if (cfg.tower_depth < cfg.level + 1) throw ConfigError("config: tower_depth must be at least level + 1");
    if (cfg.roots < 2 || cfg.decode_trials < 0 || cfg.pair_trials < 0 || cfg.mprime_trials < 0) {
      throw ConfigError("config: roots must be at least 2 and trial counts nonnegative");
    }
    if (!(cfg.delta > 0)) throw ConfigError("config: delta must be positive");
    space.emplace(builtin_or_file(cfg.base));
    schedule = cfg.eps_list.empty() ? EpsSchedule::geometric(cfg.eps_num, cfg.eps_base, cfg.eps_offset)
                                    : EpsSchedule::explicit_list(parse_eps_list(cfg.eps_list));
    if (cfg.mode == TowerMode::toy && !cfg.toy_levels.empty()) options.toy = load_toy_levels(cfg.toy_levels);
    if (cfg.mode == TowerMode::strict && !schedule.well_formed(cfg.tower_depth)) {
      throw ConfigError("config: eps schedule is not in (0, 1/2) for every level");
    }
  } catch (const std::exception& e) {
    result.diagnostic = e.what();
    return finish(kExitConfig);
  }

  // User-supplied levels are verified before anything is built on them.
  if (options.toy) {
    Json parts = Json::array();
    bool ok = true;
    for (std::size_t k = 0; k < options.toy->parts.size(); ++k) {
      const Partition& part = options.toy->parts[k];
      const Rational eps = k < options.toy->eps.size() ? options.toy->eps[k] : schedule.eps(static_cast<int>(k));
      const PartitionReport r = verify_partition(part, eps);
      run.check("partition level " + std::to_string(k) + " structural gate", "pass",
                r.structural ? "pass" : (r.issue.empty() ? "fail" : r.issue), r.structural);
      ok = ok && r.structural;
      parts.push_back({{"partition", to_json(part)}, {"report", to_json(r)}});
    }
    run.sections["partitions"] = parts;
    if (!ok) {
      result.diagnostic = "toy partition failed the structural gate";
      return finish(kExitAssertion);
    }
  }

  std::shared_ptr<const Tower> tower;
  try {
    tower = std::make_shared<const Tower>(build_tower(schedule, cfg.tower_depth, *space, options));
  } catch (const std::invalid_argument& e) {
    result.diagnostic = e.what();
    return finish(kExitConfig);
  } catch (const std::exception& e) {
    result.diagnostic = e.what();
    run.check("tower build", "success", e.what(), false);
    return finish(kExitAssertion);
  }
  if (!options.toy) {
    Json parts = Json::array();
    for (int k = 0; k <= tower->depth(); ++k) {
      const TowerLevel& lv = tower->level(k);
      const bool ok = cfg.mode == TowerMode::strict ? lv.strict() : lv.structural();
      run.check("partition level " + std::to_string(k) + (cfg.mode == TowerMode::strict ? " strict" : " structural"),
                "pass", ok ? "pass" : "fail", ok);
      parts.push_back({{"n", lv.n()}, {"report", to_json(lv.report())}});
    }
    run.sections["partitions"] = parts;
  }
  rep["tower"] = to_json(*tower);

  try {
    std::vector<PointSpec> samples;
    for (int j = 0; j < cfg.roots; ++j) {
      samples.push_back(PointSpec::sample(tower, random_point(space->base, 16, run.rng), static_cast<RootId>(j)));
    }
    Json roots = Json::array();
    for (const PointSpec& x : samples) {
      roots.push_back({{"id", x.root_id()}, {"point", x.root().to_text(space->base)}});
    }
    run.sections["roots"] = roots;
    stage_points(run, *tower, samples);
    stage_decode(run, *tower, samples);
    stage_pairs(run, *tower, samples);
    stage_mprime(run, *tower, samples);
    stage_entropy(run, *tower);
  } catch (const std::exception& e) {
    result.diagnostic = e.what();
    run.check("pipeline", "completes", e.what(), false);
    return finish(kExitAssertion);
  }
  return finish(kExitOk);
}

void write_reports(const ExperimentConfig& config, const SuiteResult& result) {
  if (!config.report_json.empty()) {
    std::ofstream out(config.report_json);
    if (!out) throw std::runtime_error("cannot write '" + config.report_json + "'");
    out << result.report.dump(2) << '\n';
  }
  if (!config.report_csv.empty()) {
    std::ofstream out(config.report_csv);
    if (!out) throw std::runtime_error("cannot write '" + config.report_csv + "'");
    out << result.csv;
  }
}

}  // namespace proxshift
