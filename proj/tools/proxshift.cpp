// Command-line front end: partition, tower, point, decode, analyze, suite.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "proxshift/suite.hpp"

using namespace proxshift;

namespace {

struct TowerArgs {
  std::string base = "full2";
  std::string mode = "strict";
  std::int64_t eps_num = 1;
  std::int64_t eps_base = 2;
  int eps_offset = 3;
  std::string eps_list;
  std::string toy;
  int depth = 1;
};

void add_tower_options(CLI::App* app, TowerArgs& t, int default_depth) {
  t.depth = default_depth;
  app->add_option("--base", t.base, "full<q>, golden, or file:<path>")->capture_default_str();
  app->add_option("--mode", t.mode, "strict or toy")->check(CLI::IsMember({"strict", "toy"}))->capture_default_str();
  app->add_option("--eps-num", t.eps_num, "eps_k = num / base^(k + offset)")->capture_default_str();
  app->add_option("--eps-den-base", t.eps_base)->capture_default_str();
  app->add_option("--eps-offset", t.eps_offset)->capture_default_str();
  app->add_option("--eps", t.eps_list, "explicit comma-separated eps list");
  app->add_option("--toy", t.toy, "toy level file (JSON)");
  app->add_option("--depth", t.depth, "top level of the tower")->capture_default_str();
}

std::shared_ptr<const Tower> make_tower(const TowerArgs& t) {
  StarSpace space(builtin_or_file(t.base));
  EpsSchedule schedule = EpsSchedule::geometric(t.eps_num, t.eps_base, t.eps_offset);
  if (!t.eps_list.empty()) {
    std::vector<Rational> eps;
    std::stringstream ss(t.eps_list);
    std::string item;
    while (std::getline(ss, item, ',')) eps.push_back(Rational::parse(item));
    schedule = EpsSchedule::explicit_list(eps);
  }
  BuildOptions options;
  options.mode = t.mode == "toy" ? TowerMode::toy : TowerMode::strict;
  if (!t.toy.empty()) {
    options.mode = TowerMode::toy;
    options.toy = load_toy_levels(t.toy);
  }
  return std::make_shared<const Tower>(build_tower(schedule, t.depth, space, options));
}

struct PointArgs {
  std::string root = "random";
  RootId id = 0;
  Index shift = 0;
  bool star = false;
};

void add_point_options(CLI::App* app, PointArgs& p, const std::string& prefix) {
  app->add_option("--" + prefix + "root", p.root,
                  "base point 'left=.. core=.. right=.. offset=..' or 'random'")
      ->capture_default_str();
  app->add_option("--" + prefix + "root-id", p.id)->capture_default_str();
  app->add_option("--" + prefix + "shift", p.shift)->capture_default_str();
  app->add_flag("--" + prefix + "star", p.star, "use the all-star point");
}

PointSpec make_point(const std::shared_ptr<const Tower>& tower, const PointArgs& p, std::mt19937_64& rng) {
  if (p.star) return PointSpec::all_star(tower);
  const BaseSystem& sys = tower->base().base;
  BasePoint root = p.root == "random" ? random_point(sys, 16, rng) : BasePoint::from_text(p.root, sys);
  return shift_point(PointSpec::sample(tower, root, p.id), p.shift);
}

Json point_json(const PointSpec& p, int K) {
  if (p.is_all_star()) return Json{{"all_star", true}};
  Json phases = p.phases(std::min(K, p.depth())).r;
  return Json{{"all_star", false},
              {"root_id", p.root_id()},
              {"root", p.root().to_text(p.tower().base().base)},
              {"shift", p.shift()},
              {"range", {p.lo(), p.hi()}},
              {"phases", phases}};
}

std::string read_input(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    buf << in.rdbuf();
  }
  return buf.str();
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induced proximal subshift toolkit"};
  app.require_subcommand(1);
  bool json = false;
  bool csv = false;
  std::uint64_t seed = 1;
  std::string config_path;
  app.add_flag("--json", json, "print JSON")->configurable(false);
  app.add_flag("--csv", csv, "print CSV block tables where available");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--config", config_path, "suite configuration file");
  app.fallthrough();

  // partition
  auto* part_cmd = app.add_subcommand("partition", "build or search a partition and verify it");
  Index part_n = 0;
  std::string part_eps = "1/8";
  bool part_verify = false;
  Index search_max = 0;
  std::string gate = "structural";
  part_cmd->add_option("--n", part_n, "interval length");
  part_cmd->add_option("--eps", part_eps)->capture_default_str();
  part_cmd->add_flag("--verify", part_verify, "run the exhaustive property check");
  part_cmd->add_option("--search", search_max, "search the smallest partition with n up to this value");
  part_cmd->add_option("--gate", gate)->check(CLI::IsMember({"structural", "strict"}))->capture_default_str();

  // tower
  auto* tower_cmd = app.add_subcommand("tower", "build a tower and dump its levels");
  TowerArgs tower_args;
  Index cap = 2000;
  add_tower_options(tower_cmd, tower_args, 1);
  tower_cmd->add_option("--cap", cap, "largest J_k listed in full")->capture_default_str();

  // point
  auto* point_cmd = app.add_subcommand("point", "construct and inspect points");
  point_cmd->require_subcommand(1);
  TowerArgs point_tower;
  PointArgs point_args;
  Index lo = -20;
  Index hi = 20;
  int level = 0;
  std::string window_path = "-";
  auto* build_cmd = point_cmd->add_subcommand("build", "describe a sample point");
  auto* window_cmd = point_cmd->add_subcommand("window", "materialize [lo, hi)");
  auto* pdecode_cmd = point_cmd->add_subcommand("decode", "recover the phases from a window");
  for (auto* c : {build_cmd, window_cmd}) {
    add_tower_options(c, point_tower, 1);
    add_point_options(c, point_args, "");
  }
  build_cmd->add_option("--level", level)->capture_default_str();
  window_cmd->add_option("--lo", lo)->capture_default_str();
  window_cmd->add_option("--hi", hi)->capture_default_str();

  // decode (also under point)
  auto* decode_cmd = app.add_subcommand("decode", "recover the phases from a window");
  for (auto* c : {pdecode_cmd, decode_cmd}) {
    add_tower_options(c, point_tower, 2);
    c->add_option("--window", window_path, "window text file, '-' for stdin")->capture_default_str();
    c->add_option("--level", level)->capture_default_str();
  }

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "certificates for points and towers");
  analyze_cmd->require_subcommand(1);
  TowerArgs an_tower;
  PointArgs x_args;
  PointArgs y_args;
  y_args.id = 1;
  y_args.shift = 1;
  Index N = 0;
  double delta = 2.0;
  Index m = 0;
  Index entropy_n = 20;
  auto* pair_cmd = analyze_cmd->add_subcommand("pair", "proximality and separation witnesses");
  auto* entropy_cmd = analyze_cmd->add_subcommand("entropy", "entropy lower bound");
  auto* orbit_cmd = analyze_cmd->add_subcommand("orbit", "m' and orbit windows");
  for (auto* c : {pair_cmd, entropy_cmd, orbit_cmd}) {
    add_tower_options(c, an_tower, 2);
    c->add_option("--level", level)->capture_default_str();
  }
  add_point_options(pair_cmd, x_args, "x-");
  add_point_options(pair_cmd, y_args, "y-");
  pair_cmd->add_option("--lo", lo)->capture_default_str();
  pair_cmd->add_option("--hi", hi)->capture_default_str();
  pair_cmd->add_option("--N", N, "common * run length; default p_k/2 - 1");
  pair_cmd->add_option("--delta", delta)->capture_default_str();
  entropy_cmd->add_option("--entropy-n", entropy_n, "word length for the base estimate")->capture_default_str();
  add_point_options(orbit_cmd, x_args, "");
  orbit_cmd->add_option("--m", m, "coordinate with a non-* value")->required();

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run the full experiment");
  bool seed_given = false;

  CLI11_PARSE(app, argc, argv);
  seed_given = app.count("--seed") > 0;
  std::mt19937_64 rng(seed);

  try {
    if (*part_cmd) {
      const Rational eps = Rational::parse(part_eps);
      std::optional<Partition> part;
      if (search_max > 0) {
        SearchOptions opt;
        opt.gate = gate == "strict" ? Gate::strict : Gate::structural;
        part = search_min_partition(eps, search_max, opt);
        if (!part) {
          if (json) print(Json{{"found", false}});
          else std::cout << "no partition with n <= " << search_max << '\n';
          return 1;
        }
      } else {
        if (part_n == 0) part_n = min_valid_n(eps);
        part = make_partition(part_n, eps);
      }
      const PartitionReport r = verify_partition(*part, eps);
      if (json) {
        Json j = to_json(*part);
        j["min_valid_n"] = min_valid_n(eps);
        if (part_verify || search_max > 0) j["report"] = to_json(r);
        print(j);
      } else {
        std::cout << "n=" << part->n << " eps=" << eps.str() << " #A=" << part->a.size() << " #B=" << part->b.size()
                  << "\nA:";
        for (Index a : part->a) std::cout << ' ' << a;
        std::cout << '\n';
        if (part_verify || search_max > 0) {
          std::cout << "(i) " << r.prop_i << "  (ii) " << r.prop_ii << "  (iii) " << r.prop_iii
                    << "  structural " << r.structural << "  strict " << r.strict << '\n';
        }
      }
      return part_verify && !r.strict ? 1 : 0;
    }

    if (*tower_cmd) {
      const auto tower = make_tower(tower_args);
      if (json) {
        print(to_json(*tower, cap));
      } else {
        std::cout << tower->schedule().describe() << '\n';
        for (int k = 0; k <= tower->depth(); ++k) {
          const TowerLevel& lv = tower->level(k);
          std::cout << "k=" << k << " n=" << lv.n() << " p=" << lv.p() << " #A=" << lv.part().a.size()
                    << " b=" << lv.b() << " b'=" << lv.b_prime() << (lv.strict() ? " strict" : " structural")
                    << '\n';
        }
      }
      return 0;
    }

    if (*point_cmd && (*build_cmd || *window_cmd)) {
      const auto tower = make_tower(point_tower);
      const PointSpec p = make_point(tower, point_args, rng);
      if (*build_cmd) {
        print(point_json(p, level));
        return 0;
      }
      const Window w = window(p, lo, hi);
      if (json) print(to_json(w));
      else std::cout << window_to_text(w);
      return 0;
    }

    if (*decode_cmd || *pdecode_cmd) {
      const auto tower = make_tower(point_tower);
      const Window w = window_from_text(read_input(window_path));
      const DecodeResult d = decode_r(w, *tower, level);
      if (json) {
        print(to_json(d));
      } else {
        std::cout << to_string(d.status) << " r =";
        for (Index r : d.r.r) std::cout << ' ' << r;
        std::cout << '\n';
      }
      return d.status == DecodeStatus::unique ? 0 : 1;
    }

    if (*pair_cmd) {
      const auto tower = make_tower(an_tower);
      const PointSpec x = make_point(tower, x_args, rng);
      const PointSpec y = make_point(tower, y_args, rng);
      if (N == 0) N = std::max<Index>(1, tower->p(level) / 2 - 1);
      const PairReport pr = classify_pair(x, y, lo, hi, delta, N);
      Json j{{"x", point_json(x, level)}, {"y", point_json(y, level)}, {"pair", to_json(pr)}};
      try {
        j["common_star_block"] = to_json(find_common_star_block(x, y, N));
      } catch (const std::exception& e) {
        j["common_star_block"] = Json{{"error", e.what()}};
      }
      std::vector<BlockRow> rows;
      try {
        const SeparationBlocks sb = separation_blocks(x, y, level, lo, hi);
        rows = sb.rows;
        j["separation_blocks"] = to_json(sb);
      } catch (const std::exception& e) {
        j["separation_blocks"] = Json{{"error", e.what()}};
      }
      if (csv) std::cout << blocks_csv(rows);
      else print(j);
      return 0;
    }

    if (*entropy_cmd) {
      const auto tower = make_tower(an_tower);
      const EntropyEstimate est = entropy_estimate(tower->base().base, entropy_n, entropy_n, 0.5);
      Json levels = Json::array();
      bool pass = true;
      for (int k = 0; k <= std::min(level, tower->depth()); ++k) {
        const EntropyBound e = entropy_lower_bound(*tower, k, est.value);
        pass = pass && (!e.strict || e.pass);
        levels.push_back(to_json(e));
      }
      if (csv) {
        std::cout << "level,ratio,schedule_product,bound,schedule_bound,strict,pass\n";
        for (const auto& e : levels) {
          std::cout << e["level"] << ',' << e["ratio"].get<std::string>() << ','
                    << e["schedule_product"].get<std::string>() << ',' << e["bound"] << ','
                    << e["schedule_bound"] << ',' << e["strict"] << ',' << e["pass"] << '\n';
        }
      } else {
        print(Json{{"base_estimate", est.value}, {"n", entropy_n}, {"levels", levels}});
      }
      return pass ? 0 : 1;
    }

    if (*orbit_cmd) {
      const auto tower = make_tower(an_tower);
      const PointSpec x = make_point(tower, x_args, rng);
      const MPrime mp = compute_mprime(x, m, level);
      Json windows = Json::array();
      bool pass = true;
      for (int k = 0; k <= level; ++k) {
        const OrbitWindowReport ow = check_orbit_window(x, mp.m_prime, k);
        pass = pass && ow.pass;
        windows.push_back(to_json(ow));
      }
      print(Json{{"mprime", to_json(mp)}, {"orbit_windows", windows}});
      return pass ? 0 : 1;
    }

    if (*suite_cmd) {
      ExperimentConfig cfg;
      try {
        if (!config_path.empty()) cfg = load_config(config_path);
      } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
      }
      if (seed_given) cfg.seed = seed;
      const SuiteResult result = run_suite(cfg);
      write_reports(cfg, result);
      if (json) {
        print(result.report);
      } else if (csv) {
        std::cout << result.csv;
      } else {
        for (const auto& c : result.report["checks"]) {
          std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
                    << c["measured"].get<std::string>() << " (bound " << c["bound"].get<std::string>() << ")\n";
        }
      }
      if (!result.diagnostic.empty()) std::cerr << result.diagnostic << '\n';
      return result.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
