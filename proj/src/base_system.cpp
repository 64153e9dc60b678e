#include "proxshift/base_system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace proxshift {

namespace {

bool has_factor(const Word& w, const Word& f, std::size_t from = 0) {
  if (f.empty() || f.size() > w.size()) return false;
  for (std::size_t s = from; s + f.size() <= w.size(); ++s) {
    if (std::equal(f.begin(), f.end(), w.begin() + static_cast<std::ptrdiff_t>(s))) return true;
  }
  return false;
}

Index floor_mod(Index a, Index m) {
  Index r = a % m;
  return r < 0 ? r + m : r;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

// --- BaseSystem -------------------------------------------------------------

BaseSystem::BaseSystem(std::string name, std::vector<std::string> alphabet,
                       std::vector<Word> forbidden)
    : name_(std::move(name)), alphabet_(std::move(alphabet)), forbidden_(std::move(forbidden)) {
  if (alphabet_.empty()) throw std::invalid_argument("alphabet must be nonempty");
  if (alphabet_.size() > 0xffff) throw std::invalid_argument("alphabet too large");
  std::set<std::string> seen;
  for (const auto& s : alphabet_) {
    if (s.empty()) throw std::invalid_argument("empty alphabet symbol");
    if (!seen.insert(s).second) throw std::invalid_argument("duplicate alphabet symbol '" + s + "'");
    if (s.size() != 1) single_char_ = false;
  }
  for (const auto& w : forbidden_) {
    if (w.empty()) throw std::invalid_argument("empty forbidden word");
    for (Symbol c : w) {
      if (c >= alphabet_.size()) throw std::invalid_argument("forbidden word uses unknown symbol");
    }
    memory_ = std::max(memory_, w.size());
  }
  if (!is_nonempty(*this)) {
    throw std::invalid_argument("shift space '" + name_ + "' is empty");
  }
}

BaseSystem BaseSystem::full_shift(int symbols) {
  if (symbols < 1) throw std::invalid_argument("full shift needs at least one symbol");
  std::vector<std::string> alphabet;
  for (int i = 0; i < symbols; ++i) {
    alphabet.push_back(symbols <= 10 ? std::string(1, static_cast<char>('0' + i))
                                     : std::to_string(i));
  }
  return {"full" + std::to_string(symbols), std::move(alphabet), {}};
}

BaseSystem BaseSystem::golden_mean() { return {"golden", {"0", "1"}, {Word{1, 1}}}; }

bool BaseSystem::admissible(const Word& w) const {
  for (Symbol c : w) {
    if (c >= alphabet_.size()) return false;
  }
  return std::none_of(forbidden_.begin(), forbidden_.end(),
                      [&](const Word& f) { return has_factor(w, f); });
}

bool BaseSystem::admissible_suffix(const Word& w) const {
  if (!w.empty() && w.back() >= alphabet_.size()) return false;
  for (const auto& f : forbidden_) {
    if (f.size() <= w.size() &&
        std::equal(f.begin(), f.end(), w.end() - static_cast<std::ptrdiff_t>(f.size()))) {
      return false;
    }
  }
  return true;
}

std::optional<Symbol> BaseSystem::symbol(std::string_view text) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == text) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

std::string BaseSystem::format_word(const Word& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single_char_ && i > 0) out += ',';
    out += alphabet_.at(w[i]);
  }
  return out;
}

Word BaseSystem::parse_word(std::string_view text) const {
  Word w;
  auto push = [&](std::string_view token) {
    auto s = symbol(token);
    if (!s) throw std::invalid_argument("unknown symbol '" + std::string(token) + "'");
    w.push_back(*s);
  };
  if (single_char_ && text.find(',') == std::string_view::npos) {
    for (char c : text) push(std::string_view(&c, 1));
    return w;
  }
  std::size_t start = 0;
  while (start <= text.size() && !text.empty()) {
    auto comma = text.find(',', start);
    auto token = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (!token.empty()) push(token);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return w;
}

// --- BasePoint --------------------------------------------------------------

BasePoint::BasePoint(Word left_period, Word core, Word right_period, Index origin_offset)
    : left_(std::move(left_period)),
      core_(std::move(core)),
      right_(std::move(right_period)),
      offset_(origin_offset) {
  if (left_.empty() || right_.empty()) {
    throw std::invalid_argument("left and right periods must be nonempty");
  }
}

BasePoint BasePoint::constant(Symbol s) { return {Word{s}, Word{}, Word{s}, 0}; }

BasePoint BasePoint::periodic(const Word& w) { return {w, Word{}, w, 0}; }

Symbol BasePoint::at(Index i) const {
  const Index pos = i + offset_;
  const auto core_len = static_cast<Index>(core_.size());
  if (pos < 0) return left_[floor_mod(pos, static_cast<Index>(left_.size()))];
  if (pos < core_len) return core_[pos];
  return right_[(pos - core_len) % static_cast<Index>(right_.size())];
}

Word BasePoint::slice(Index lo, Index hi) const {
  Word w;
  w.reserve(static_cast<std::size_t>(std::max<Index>(hi - lo, 0)));
  for (Index i = lo; i < hi; ++i) w.push_back(at(i));
  return w;
}

bool operator==(const BasePoint& u, const BasePoint& v) {
  const auto lcm_left = std::lcm(static_cast<Index>(u.left_.size()), static_cast<Index>(v.left_.size()));
  const auto lcm_right =
      std::lcm(static_cast<Index>(u.right_.size()), static_cast<Index>(v.right_.size()));
  const Index lo = std::min(u.core_lo(), v.core_lo()) - lcm_left;
  const Index hi = std::max(u.core_hi(), v.core_hi()) + lcm_right;
  for (Index i = lo; i < hi; ++i) {
    if (u.at(i) != v.at(i)) return false;
  }
  return true;
}

namespace {

// Length of the primitive root of w viewed as a cyclic period.
Index primitive_period(const Word& w) {
  const auto n = static_cast<Index>(w.size());
  for (Index d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (Index i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return d;
  }
  return n;
}

}  // namespace

std::optional<Index> BasePoint::period() const {
  // A periodic sequence has the same minimal period on its left tail.
  const Index candidate = primitive_period(left_);
  if (primitive_period(right_) != candidate) return std::nullopt;
  if (shift(*this, candidate) == *this) return candidate;
  return std::nullopt;
}

std::string BasePoint::to_text(const BaseSystem& sys) const {
  return "left=" + sys.format_word(left_) + " core=" + sys.format_word(core_) +
         " right=" + sys.format_word(right_) + " offset=" + std::to_string(offset_);
}

BasePoint BasePoint::from_text(std::string_view text, const BaseSystem& sys) {
  std::optional<Word> left;
  std::optional<Word> right;
  Word core;
  Index offset = 0;
  for (auto token : split_ws(text)) {
    auto eq = token.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("expected key=value, got '" + std::string(token) + "'");
    }
    auto key = token.substr(0, eq);
    auto value = token.substr(eq + 1);
    if (key == "left") {
      left = sys.parse_word(value);
    } else if (key == "core") {
      core = sys.parse_word(value);
    } else if (key == "right") {
      right = sys.parse_word(value);
    } else if (key == "offset") {
      offset = std::stoll(std::string(value));
    } else {
      throw std::invalid_argument("unknown base point field '" + std::string(key) + "'");
    }
  }
  if (!left || !right) throw std::invalid_argument("base point needs left= and right=");
  return {std::move(*left), std::move(core), std::move(*right), offset};
}

BasePoint shift(const BasePoint& p, Index n) {
  return {p.left_period(), p.core(), p.right_period(), p.origin_offset() + n};
}

bool contains_point(const BaseSystem& sys, const BasePoint& p) {
  for (const Word* w : {&p.left_period(), &p.core(), &p.right_period()}) {
    for (Symbol c : *w) {
      if (c >= sys.alphabet_size()) return false;
    }
  }
  const auto mem = static_cast<Index>(sys.memory());
  if (mem == 0) return true;
  // Every length-mem window of the sequence appears starting in this range.
  const Index lo = p.core_lo() - static_cast<Index>(p.left_period().size()) - mem;
  const Index hi = p.core_hi() + static_cast<Index>(p.right_period().size()) + mem;
  return sys.admissible(p.slice(lo, hi + mem));
}

Index truncation_radius(double tol) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  Index i0 = 0;
  while (std::ldexp(2.0, static_cast<int>(-i0)) >= tol) ++i0;
  return i0;
}

double distance(const BasePoint& u, const BasePoint& v, double tol) {
  const Index i0 = truncation_radius(tol);
  double sum = 0.0;
  for (Index i = -i0; i <= i0; ++i) {
    if (u.at(i) != v.at(i)) sum += std::ldexp(1.0, static_cast<int>(-(i < 0 ? -i : i)));
  }
  return sum;
}

// --- word enumeration -------------------------------------------------------

namespace {

template <class Visit>
void extend_words(const BaseSystem& sys, Word& prefix, Index n, Visit&& visit) {
  if (static_cast<Index>(prefix.size()) == n) {
    visit(prefix);
    return;
  }
  for (std::size_t c = 0; c < sys.alphabet_size(); ++c) {
    prefix.push_back(static_cast<Symbol>(c));
    if (sys.admissible_suffix(prefix)) extend_words(sys, prefix, n, visit);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Word> enumerate_words(const BaseSystem& sys, Index n, std::uint64_t cap) {
  if (n < 0) throw std::invalid_argument("word length must be nonnegative");
  std::vector<Word> out;
  Word prefix;
  extend_words(sys, prefix, n, [&](const Word& w) {
    if (out.size() >= cap) {
      throw std::length_error("word enumeration exceeds cap of " + std::to_string(cap));
    }
    out.push_back(w);
  });
  return out;
}

std::uint64_t count_words(const BaseSystem& sys, Index n, std::uint64_t cap) {
  if (n < 0) throw std::invalid_argument("word length must be nonnegative");
  // Count by dynamic programming over suffix states of length memory-1.
  const std::size_t keep = sys.memory() > 0 ? sys.memory() - 1 : 0;
  std::map<Word, std::uint64_t> states{{Word{}, 1}};
  for (Index step = 0; step < n; ++step) {
    std::map<Word, std::uint64_t> next;
    for (const auto& [suffix, count] : states) {
      Word w = suffix;
      for (std::size_t c = 0; c < sys.alphabet_size(); ++c) {
        w.push_back(static_cast<Symbol>(c));
        if (sys.admissible_suffix(w)) {
          Word key(w.end() - static_cast<std::ptrdiff_t>(std::min(keep, w.size())), w.end());
          next[key] += count;
        }
        w.pop_back();
      }
    }
    states = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& [suffix, count] : states) total += count;
  if (total > cap) throw std::length_error("word count exceeds cap of " + std::to_string(cap));
  return total;
}

SeparatedCount separated_count(const BaseSystem& sys, Index n, double eps, std::uint64_t cap) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  return {count_words(sys, n, cap), eps >= 1.0};
}

EntropyEstimate entropy_estimate(const BaseSystem& sys, Index n_lo, Index n_hi, double eps,
                                 std::uint64_t cap) {
  if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("need 1 <= n_lo <= n_hi");
  EntropyEstimate est;
  for (Index n = n_lo; n <= n_hi; ++n) {
    const SeparatedCount s = separated_count(sys, n, eps, cap);
    est.n.push_back(n);
    est.ratios.push_back(std::log(static_cast<double>(s.count)) / static_cast<double>(n));
    est.upper_bound_only = s.upper_bound_only;
  }
  est.value = est.ratios.back();
  return est;
}

// --- block graph ------------------------------------------------------------

namespace {

// Vertices are admissible words of length max(memory - 1, 1); an edge u -> v
// exists when u overlaps v and u + last(v) is admissible. Bi-infinite paths
// are exactly the points of the shift space.
struct BlockGraph {
  std::vector<Word> vertices;
  std::vector<std::vector<std::size_t>> out;
};

BlockGraph essential_graph(const BaseSystem& sys) {
  const Index width = std::max<Index>(static_cast<Index>(sys.memory()) - 1, 1);
  BlockGraph g;
  g.vertices = enumerate_words(sys, width);
  std::map<Word, std::size_t> id;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) id[g.vertices[i]] = i;
  g.out.resize(g.vertices.size());
  for (std::size_t u = 0; u < g.vertices.size(); ++u) {
    for (std::size_t c = 0; c < sys.alphabet_size(); ++c) {
      Word edge = g.vertices[u];
      edge.push_back(static_cast<Symbol>(c));
      if (!sys.admissible(edge)) continue;
      Word target(edge.begin() + 1, edge.end());
      if (auto it = id.find(target); it != id.end()) g.out[u].push_back(it->second);
    }
  }
  // Trim vertices with no successor or no predecessor until stable.
  std::vector<bool> alive(g.vertices.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> indeg(g.vertices.size(), 0);
    for (std::size_t u = 0; u < g.vertices.size(); ++u) {
      if (!alive[u]) continue;
      for (auto v : g.out[u]) {
        if (alive[v]) ++indeg[v];
      }
    }
    for (std::size_t u = 0; u < g.vertices.size(); ++u) {
      if (!alive[u]) continue;
      const bool has_out = std::any_of(g.out[u].begin(), g.out[u].end(),
                                       [&](std::size_t v) { return alive[v]; });
      if (!has_out || indeg[u] == 0) {
        alive[u] = false;
        changed = true;
      }
    }
  }
  for (std::size_t u = 0; u < g.vertices.size(); ++u) {
    if (!alive[u]) {
      g.out[u].clear();
      continue;
    }
    std::erase_if(g.out[u], [&](std::size_t v) { return !alive[v]; });
  }
  return g;
}

}  // namespace

bool is_nonempty(const BaseSystem& sys) {
  const BlockGraph g = essential_graph(sys);
  return std::any_of(g.out.begin(), g.out.end(), [](const auto& o) { return !o.empty(); });
}

BasePoint random_point(const BaseSystem& sys, Index core_len, std::mt19937_64& rng) {
  const BlockGraph g = essential_graph(sys);
  std::vector<std::size_t> live;
  for (std::size_t u = 0; u < g.out.size(); ++u) {
    if (!g.out[u].empty()) live.push_back(u);
  }
  if (live.empty()) throw std::logic_error("random_point on an empty shift");

  auto step = [&](std::size_t u) {
    std::uniform_int_distribution<std::size_t> pick(0, g.out[u].size() - 1);
    return g.out[u][pick(rng)];
  };
  // Walk until a vertex repeats; returns (prefix vertices, cycle vertices)
  // with the walk's first vertex excluded from both.
  auto walk_to_cycle = [&](std::size_t start) {
    std::vector<std::size_t> path{start};
    std::map<std::size_t, std::size_t> first_seen{{start, 0}};
    for (;;) {
      const std::size_t v = step(path.back());
      if (auto it = first_seen.find(v); it != first_seen.end()) {
        std::vector<std::size_t> prefix(path.begin() + 1, path.begin() + static_cast<std::ptrdiff_t>(it->second) + 1);
        std::vector<std::size_t> cycle(path.begin() + static_cast<std::ptrdiff_t>(it->second) + 1, path.end());
        cycle.push_back(v);
        return std::pair{prefix, cycle};
      }
      first_seen.emplace(v, path.size());
      path.push_back(v);
    }
  };

  std::uniform_int_distribution<std::size_t> pick_live(0, live.size() - 1);
  // Left tail: a cycle through `anchor`, spelled so that it ends at anchor.
  auto [lead, left_cycle] = walk_to_cycle(live[pick_live(rng)]);
  const std::size_t anchor = left_cycle.back();

  Word left;
  for (auto v : left_cycle) left.push_back(g.vertices[v].back());

  Word core;
  std::size_t cur = anchor;
  for (Index i = 0; i < core_len; ++i) {
    cur = step(cur);
    core.push_back(g.vertices[cur].back());
  }
  auto [pre, right_cycle] = walk_to_cycle(cur);
  for (auto v : pre) core.push_back(g.vertices[v].back());
  Word right;
  for (auto v : right_cycle) right.push_back(g.vertices[v].back());

  BasePoint p(std::move(left), std::move(core), std::move(right), 0);
  if (!contains_point(sys, p)) throw std::logic_error("random_point produced an inadmissible point");
  return p;
}

// --- SFT files --------------------------------------------------------------

BaseSystem parse_sft(std::string_view text, std::string name) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> alphabet;
  std::vector<std::string> raw_words;
  bool have_alphabet = false;
  while (std::getline(in, line)) {
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (!have_alphabet) {
      for (auto t : tokens) alphabet.emplace_back(t);
      have_alphabet = true;
      continue;
    }
    std::string joined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) joined += ',';
      joined += tokens[i];
    }
    raw_words.push_back(joined);
  }
  if (!have_alphabet) throw std::invalid_argument("SFT text has no alphabet line");
  // Build a forbidden-free system first so that words can be parsed with
  // its symbol table.
  BaseSystem plain(name, alphabet, {});
  std::vector<Word> forbidden;
  for (const auto& w : raw_words) {
    if (w.find(',') == std::string::npos) {
      forbidden.push_back(plain.parse_word(w));
    } else {
      // Space-separated tokens: each token is a symbol, or a run of
      // single-character symbols.
      Word word;
      std::size_t start = 0;
      while (start <= w.size()) {
        auto comma = w.find(',', start);
        auto token = std::string_view(w).substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (auto s = plain.symbol(token)) {
          word.push_back(*s);
        } else {
          auto part = plain.parse_word(token);
          word.insert(word.end(), part.begin(), part.end());
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      forbidden.push_back(std::move(word));
    }
  }
  return {std::move(name), std::move(alphabet), std::move(forbidden)};
}

BaseSystem load_sft(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SFT file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto slash = path.find_last_of('/');
  return parse_sft(buf.str(), slash == std::string::npos ? path : path.substr(slash + 1));
}

BaseSystem builtin_or_file(const std::string& name) {
  if (name == "golden") return BaseSystem::golden_mean();
  if (name.rfind("file:", 0) == 0) return load_sft(name.substr(5));
  if (name.rfind("full", 0) == 0) {
    const std::string digits = name.substr(4);
    if (digits.empty()) return BaseSystem::full_shift(2);
    return BaseSystem::full_shift(std::stoi(digits));
  }
  throw std::invalid_argument("unknown base system '" + name + "' (use full2, fullN, golden, file:<path>)");
}

}  // namespace proxshift
