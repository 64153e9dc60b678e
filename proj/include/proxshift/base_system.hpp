#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "proxshift/rational.hpp"

namespace proxshift {

using Symbol = std::uint16_t;
using Word = std::vector<Symbol>;

/// A subshift of finite type over a finite alphabet. An empty forbidden list
/// gives the full shift.
class BaseSystem {
 public:
  BaseSystem(std::string name, std::vector<std::string> alphabet, std::vector<Word> forbidden);

  static BaseSystem full_shift(int symbols = 2);
  /// Binary shift with "11" forbidden.
  static BaseSystem golden_mean();

  const std::string& name() const { return name_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Word>& forbidden() const { return forbidden_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  /// Longest forbidden word (0 for the full shift).
  std::size_t memory() const { return memory_; }

  /// No forbidden word occurs as a factor.
  bool admissible(const Word& w) const;
  /// No forbidden word occurs as a suffix; used by incremental extension.
  bool admissible_suffix(const Word& w) const;

  std::optional<Symbol> symbol(std::string_view text) const;
  /// Words are written as the concatenation of their symbols when every
  /// symbol is a single character, and comma-separated otherwise.
  std::string format_word(const Word& w) const;
  Word parse_word(std::string_view text) const;

 private:
  std::string name_;
  std::vector<std::string> alphabet_;
  std::vector<Word> forbidden_;
  std::size_t memory_ = 0;
  bool single_char_ = true;
};

/// Bi-infinite eventually periodic sequence
///   ... L L L core R R R ...
/// Coordinate i is stored at position i + offset of the concatenation, with
/// the core at positions [0, |core|).
class BasePoint {
 public:
  BasePoint(Word left_period, Word core, Word right_period, Index origin_offset = 0);

  /// Constant sequence s s s ...
  static BasePoint constant(Symbol s);
  /// Purely periodic sequence with word w starting at coordinate 0.
  static BasePoint periodic(const Word& w);

  Symbol at(Index i) const;
  Word slice(Index lo, Index hi) const;

  const Word& left_period() const { return left_; }
  const Word& core() const { return core_; }
  const Word& right_period() const { return right_; }
  Index origin_offset() const { return offset_; }

  /// Coordinate range holding the core, [core_lo, core_hi).
  Index core_lo() const { return -offset_; }
  Index core_hi() const { return -offset_ + static_cast<Index>(core_.size()); }

  /// Sequence equality, decided on a finite window long enough to cover both
  /// cores and a common period of the tails.
  friend bool operator==(const BasePoint& u, const BasePoint& v);

  /// Least P > 0 with shift(*this, P) == *this, when the point is periodic.
  std::optional<Index> period() const;

  std::string to_text(const BaseSystem& sys) const;
  static BasePoint from_text(std::string_view text, const BaseSystem& sys);

 private:
  Word left_;
  Word core_;
  Word right_;
  Index offset_ = 0;
};

/// Coordinate i of the result is coordinate i + n of p (so shift(p, 1) is T p).
BasePoint shift(const BasePoint& p, Index n);

/// True when no forbidden word occurs anywhere in the bi-infinite sequence.
bool contains_point(const BaseSystem& sys, const BasePoint& p);

/// Truncation radius i0 with sum_{|i| > i0} 2^{-|i|} = 2^{1-i0} < tol.
Index truncation_radius(double tol);

/// sum_i 2^{-|i|} [u_i != v_i] truncated at |i| <= truncation_radius(tol).
double distance(const BasePoint& u, const BasePoint& v, double tol = 1e-12);

/// Under the weighted discrete metric every pair is within 3 = sum_i 2^{-|i|}.
inline constexpr double kMetricDiameter = 3.0;

/// X together with the isolated fixed point *, placed at distance diam + 1.
struct StarSpace {
  BaseSystem base;
  double star_distance = kMetricDiameter + 1.0;

  explicit StarSpace(BaseSystem sys) : base(std::move(sys)) {}
};

/// Default cap on enumerated words / counted words.
inline constexpr std::uint64_t kDefaultWordCap = std::uint64_t{1} << 24;

/// All length-n words with no forbidden factor, in lexicographic order.
/// Throws std::length_error when more than `cap` words would be produced.
std::vector<Word> enumerate_words(const BaseSystem& sys, Index n,
                                  std::uint64_t cap = kDefaultWordCap);

/// Number of admissible length-n words, counted without storing them.
std::uint64_t count_words(const BaseSystem& sys, Index n, std::uint64_t cap = kDefaultWordCap);

struct SeparatedCount {
  std::uint64_t count = 0;
  /// True for eps >= 1, where the word count is only an upper bound on the
  /// largest (n, eps)-separated set.
  bool upper_bound_only = false;
};

SeparatedCount separated_count(const BaseSystem& sys, Index n, double eps,
                               std::uint64_t cap = kDefaultWordCap);

struct EntropyEstimate {
  double value = 0.0;                 // log(s_{n_hi}) / n_hi
  std::vector<Index> n;               // n_lo .. n_hi
  std::vector<double> ratios;         // log(s_n) / n
  bool upper_bound_only = false;
};

EntropyEstimate entropy_estimate(const BaseSystem& sys, Index n_lo, Index n_hi, double eps,
                                 std::uint64_t cap = kDefaultWordCap);

/// True when the shift space is nonempty, i.e. the graph of admissible
/// (memory-1)-blocks has a cycle.
bool is_nonempty(const BaseSystem& sys);

/// Random point of the shift space with a core of about `core_len` symbols.
/// Tails are cycles of the block graph, so the point is always valid.
BasePoint random_point(const BaseSystem& sys, Index core_len, std::mt19937_64& rng);

/// Reads the SFT text format: line 1 holds the alphabet, every further
/// nonblank line a forbidden word. Lines starting with '#' are comments.
BaseSystem parse_sft(std::string_view text, std::string name = "sft");
BaseSystem load_sft(const std::string& path);

/// Resolves "full2", "fullN", "golden" or "file:<path>".
BaseSystem builtin_or_file(const std::string& name);

}  // namespace proxshift
