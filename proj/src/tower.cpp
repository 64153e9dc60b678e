#include "proxshift/tower.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace proxshift {

namespace {

Index checked_mul(Index a, Index b, const char* what) {
  const __int128 r = static_cast<__int128>(a) * b;
  if (r > std::numeric_limits<Index>::max() || r < std::numeric_limits<Index>::min()) {
    throw std::overflow_error(std::string(what) + " overflows 64-bit indices");
  }
  return static_cast<Index>(r);
}

}  // namespace

// --- EpsSchedule ------------------------------------------------------------

EpsSchedule EpsSchedule::geometric(std::int64_t num, std::int64_t base, int offset) {
  if (num <= 0 || base < 2 || offset < 0) {
    throw std::invalid_argument("geometric schedule needs num > 0, base >= 2, offset >= 0");
  }
  EpsSchedule s;
  s.num_ = num;
  s.base_ = base;
  s.offset_ = offset;
  return s;
}

EpsSchedule EpsSchedule::explicit_list(std::vector<Rational> values) {
  if (values.empty()) throw std::invalid_argument("explicit schedule must be nonempty");
  EpsSchedule s;
  s.list_ = std::move(values);
  return s;
}

Rational EpsSchedule::eps(int k) const {
  if (k < 0) throw std::out_of_range("negative level");
  if (!list_.empty()) {
    if (static_cast<std::size_t>(k) >= list_.size()) {
      throw std::out_of_range("schedule has no eps for level " + std::to_string(k));
    }
    return list_[static_cast<std::size_t>(k)];
  }
  std::int64_t den = 1;
  for (int i = 0; i < k + offset_; ++i) den = checked_mul(den, base_, "schedule denominator");
  return {num_, den};
}

std::optional<int> EpsSchedule::length() const {
  if (list_.empty()) return std::nullopt;
  return static_cast<int>(list_.size());
}

BigRational EpsSchedule::product_lower_bound(int K) const {
  BigRational prod = 1;
  for (int k = 0; k <= K; ++k) prod *= 1 - 2 * eps(k).to_big();
  return prod;
}

bool EpsSchedule::well_formed(int K) const {
  const Rational half(1, 2);
  for (int k = 0; k <= K; ++k) {
    const Rational e = eps(k);
    if (e <= Rational(0, 1) || e >= half) return false;
    if (k > 0 && eps(k - 1) < e) return false;
  }
  return true;
}

bool EpsSchedule::product_positive() const {
  if (!list_.empty()) return well_formed(static_cast<int>(list_.size()) - 1);
  return eps(0) < Rational(1, 2);
}

std::string EpsSchedule::describe() const {
  if (list_.empty()) {
    return std::to_string(num_) + "/" + std::to_string(base_) + "^(k+" + std::to_string(offset_) + ")";
  }
  std::string out = "[";
  for (std::size_t i = 0; i < list_.size(); ++i) {
    if (i > 0) out += ", ";
    out += list_[i].str();
  }
  return out + "]";
}

// --- TowerLevel -------------------------------------------------------------

TowerLevel::TowerLevel(int k, Partition part, Index p_prev, Index b_prime_prev)
    : k_(k), part_(std::move(part)), p_prev_(p_prev), b_prime_prev_(b_prime_prev) {
  report_ = verify_partition(part_, part_.eps);
  if (!report_.well_formed) {
    throw std::invalid_argument("level " + std::to_string(k) + ": " + report_.issue);
  }
  if (b() < 4) {
    throw std::invalid_argument("level " + std::to_string(k) + ": #B = " + std::to_string(b()) +
                                " < 4 leaves f without three distinct branches");
  }
  strict_ = report_.strict;
  structural_ = report_.structural;
  p_ = checked_mul(part_.n, p_prev_, "p_k");
  b_prime_ = checked_mul(b_prime_prev_, b() - 2, "b'_k");

  tau_.assign(static_cast<std::size_t>(part_.n), -1);
  for (std::size_t t = 0; t < part_.b.size(); ++t) tau_[part_.b[t]] = static_cast<Index>(t);
  tau_inv_ = part_.b;
  c_.assign(part_.b.begin() + 1, part_.b.end() - 1);
}

Index TowerLevel::tau(Index i) const {
  if (!in_b(i)) throw std::out_of_range("tau: " + std::to_string(i) + " not in B");
  return tau_[i];
}

Index TowerLevel::tau_inv(Index t) const {
  if (t < 0 || t >= b()) throw std::out_of_range("tau_inv: rank out of range");
  return tau_inv_[t];
}

Index TowerLevel::f(Index i) const {
  if (!in_b(i)) throw std::out_of_range("f: " + std::to_string(i) + " not in B");
  if (i == 0) return 0;
  if (i == n() - 1) return -(b() - 3);
  return tau_[i] - (b() - 2);
}

Index TowerLevel::f_inv(Index v) const {
  if (v > 0 || v <= -(b() - 2)) throw std::out_of_range("f_inv: value outside (-(b-2), 0]");
  return tau_inv_[v + b() - 2];
}

Index TowerLevel::g_exponent(Index i) const { return b_prime_prev_ * f(i); }

CodingTable level_coding(const TowerLevel& level) {
  CodingTable t;
  for (Index i : level.part().b) {
    t.tau.emplace_back(i, level.tau(i));
    t.f.emplace_back(i, level.f(i));
  }
  for (Index v = -(level.b() - 3); v <= 0; ++v) t.f_inv.emplace_back(v, level.f_inv(v));
  return t;
}

// --- Tower ------------------------------------------------------------------

Tower::Tower(EpsSchedule schedule, const std::vector<Partition>& parts, TowerMode mode, StarSpace base)
    : schedule_(std::move(schedule)), mode_(mode), base_(std::move(base)) {
  if (parts.empty()) throw std::invalid_argument("tower needs at least one level");
  Index p_prev = 1;
  Index bp_prev = 1;
  Index seed = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0 && parts[k].n <= parts[k - 1].n) {
      throw std::invalid_argument("level " + std::to_string(k) + ": n must exceed the previous level's");
    }
    levels_.emplace_back(static_cast<int>(k), parts[k], p_prev, bp_prev);
    const TowerLevel& lv = levels_.back();
    seed += checked_mul(bp_prev, lv.b() - 3, "seed exponent");
    seed_.push_back(seed);
    p_prev = lv.p();
    bp_prev = lv.b_prime();
  }
}

Index Tower::p(int k) const {
  if (k < 0) return 1;
  return level(k).p();
}

Index Tower::b_prime(int k) const {
  if (k < 0) return 1;
  return level(k).b_prime();
}

Index Tower::negative_seed_exponent(int k) const { return seed_.at(static_cast<std::size_t>(k)); }

bool Tower::all_strict(int K) const {
  for (int k = 0; k <= K && k <= depth(); ++k) {
    if (!level(k).strict()) return false;
  }
  return K <= depth();
}

// --- toy level files --------------------------------------------------------

ToyLevels parse_toy_levels(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  ToyLevels toy;
  if (doc.contains("eps")) {
    for (const auto& e : doc.at("eps")) {
      toy.eps.push_back(e.is_string() ? Rational::parse(e.get<std::string>())
                                      : Rational::parse(std::to_string(e.get<double>())));
    }
  }
  for (const auto& lv : doc.at("levels")) {
    Partition part;
    part.n = lv.at("n").get<Index>();
    part.a = lv.at("A").get<std::vector<Index>>();
    std::sort(part.a.begin(), part.a.end());
    if (lv.contains("B")) {
      part.b = lv.at("B").get<std::vector<Index>>();
      std::sort(part.b.begin(), part.b.end());
    } else {
      for (Index i = 0; i < part.n; ++i) {
        if (!std::binary_search(part.a.begin(), part.a.end(), i)) part.b.push_back(i);
      }
    }
    toy.parts.push_back(std::move(part));
  }
  if (!toy.eps.empty() && toy.eps.size() != toy.parts.size()) {
    throw std::invalid_argument("toy file: eps list and level list differ in length");
  }
  return toy;
}

ToyLevels load_toy_levels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open toy level file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_toy_levels(buf.str());
}

// --- build ------------------------------------------------------------------

Tower build_tower(const EpsSchedule& schedule, int K, const StarSpace& base, const BuildOptions& options) {
  if (K < 0) throw std::invalid_argument("depth must be nonnegative");
  std::vector<Partition> parts;
  EpsSchedule used = schedule;

  if (options.mode == TowerMode::strict) {
    Index prev = 0;
    for (int k = 0; k <= K; ++k) {
      const Rational eps = schedule.eps(k);
      Index n = std::max(prev + 1, min_valid_n(eps));
      for (;; ++n) {
        Partition part = make_partition(n, eps);
        if (verify_partition(part, eps).strict) {
          parts.push_back(std::move(part));
          break;
        }
      }
      prev = n;
    }
  } else if (options.toy) {
    const ToyLevels& toy = *options.toy;
    if (static_cast<int>(toy.parts.size()) < K + 1) {
      throw std::runtime_error("toy file provides " + std::to_string(toy.parts.size()) +
                               " levels, depth " + std::to_string(K) + " needs " + std::to_string(K + 1));
    }
    if (!toy.eps.empty()) used = EpsSchedule::explicit_list(toy.eps);
    for (int k = 0; k <= K; ++k) {
      Partition part = toy.parts[static_cast<std::size_t>(k)];
      part.eps = used.eps(k);
      const PartitionReport rep = verify_partition(part, part.eps);
      if (!rep.structural) {
        throw std::runtime_error("toy level " + std::to_string(k) + " fails the structural gate" +
                                 (rep.issue.empty() ? std::string() : ": " + rep.issue));
      }
      if (part.b.size() < 4) throw std::runtime_error("toy level " + std::to_string(k) + " has #B < 4");
      parts.push_back(std::move(part));
    }
  } else {
    Index prev = 0;
    for (int k = 0; k <= K; ++k) {
      SearchOptions opt;
      opt.gate = Gate::structural;
      opt.n_min = prev + 1;
      opt.min_b = 4;
      opt.budget = options.toy_search_budget;
      auto found = search_min_partition(used.eps(k), options.toy_search_n_max, opt);
      if (!found) {
        throw std::runtime_error("no structural partition for level " + std::to_string(k) +
                                 " with n <= " + std::to_string(options.toy_search_n_max));
      }
      prev = found->n;
      parts.push_back(std::move(*found));
    }
  }
  return Tower(used, parts, options.mode, base);
}

// --- index sets and phi -----------------------------------------------------

IndexSets index_sets(const Tower& tower, int k, Index cap) {
  if (k < 0 || k > tower.depth()) throw std::out_of_range("index_sets: level beyond tower depth");
  IndexSets s;
  s.count = tower.b_prime(k);
  s.i_lo = -(s.count - 1);
  if (s.count > cap) {
    s.elided = true;
    return s;
  }
  s.j = tower.level(0).c();
  for (int l = 1; l <= k; ++l) {
    const Index p_prev = tower.p(l - 1);
    std::vector<Index> next;
    next.reserve(s.j.size() * tower.level(l).c().size());
    for (Index c : tower.level(l).c()) {
      for (Index j : s.j) next.push_back(c * p_prev + j);
    }
    s.j = std::move(next);
  }
  return s;
}

Index phi(const Tower& tower, int k, Index n) {
  if (k < 0 || k > tower.depth()) throw std::out_of_range("phi: level beyond tower depth");
  if (n > 0 || n <= -tower.b_prime(k)) throw std::out_of_range("phi: argument outside I_k");
  Index m = 0;
  for (int l = k; l >= 1; --l) {
    const Index bp = tower.b_prime(l - 1);
    // n in j b' + (-b', 0]  <=>  j = ceil(n / b') (n <= 0)
    const Index j = -((-n) / bp);
    m += tower.level(l).f_inv(j) * tower.p(l - 1);
    n -= j * bp;
  }
  return m + tower.level(0).f_inv(n);
}

Index phi_inv(const Tower& tower, int k, Index m) {
  if (k < 0 || k > tower.depth()) throw std::out_of_range("phi_inv: level beyond tower depth");
  if (m < 0 || m >= tower.p(k)) throw std::out_of_range("phi_inv: argument outside [0, p_k)");
  Index n = 0;
  for (int l = k; l >= 0; --l) {
    const TowerLevel& lv = tower.level(l);
    const Index digit = m / lv.p_prev();
    m %= lv.p_prev();
    if (digit == 0 || digit == lv.n() - 1 || !lv.in_b(digit)) {
      throw std::out_of_range("phi_inv: argument outside J_k");
    }
    n += lv.g_exponent(digit);
  }
  return n;
}

}  // namespace proxshift
