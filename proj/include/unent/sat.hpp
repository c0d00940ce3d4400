#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "unent/common.hpp"

namespace unent {

struct Literal {
  int var = 0;
  bool negated = false;
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause3 = std::array<Literal, 3>;
using Clause4 = std::array<Literal, 4>;

struct Assignment {
  std::vector<std::uint8_t> bits;

  Assignment() = default;
  explicit Assignment(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
  static Assignment zeros(std::size_t n) { return Assignment(std::vector<std::uint8_t>(n, 0)); }

  bool literal_value(const Literal& l) const {
    return static_cast<bool>(bits[static_cast<std::size_t>(l.var)]) != l.negated;
  }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

namespace detail {

template <std::size_t A>
void check_clause(const std::array<Literal, A>& cl, int num_vars) {
  for (std::size_t i = 0; i < A; ++i) {
    if (cl[i].var < 0 || cl[i].var >= num_vars)
      throw input_error("clause variable index out of range");
    for (std::size_t j = i + 1; j < A; ++j)
      if (cl[i].var == cl[j].var) throw input_error("clause repeats a variable");
  }
}

}  // namespace detail

struct ThreeSatInstance {
  int num_vars = 0;
  std::vector<Clause3> clauses;

  ThreeSatInstance() = default;
  ThreeSatInstance(int n, std::vector<Clause3> cls) : num_vars(n), clauses(std::move(cls)) {
    if (n < 0) throw input_error("negative variable count");
    for (const auto& c : clauses) detail::check_clause(c, num_vars);
  }
  std::size_t num_clauses() const { return clauses.size(); }
};

struct TwoOutOfFourInstance {
  int num_vars = 0;
  std::vector<Clause4> clauses;
  int max_occurrence = 0;  // balance parameter c, recomputed at construction

  TwoOutOfFourInstance() = default;
  TwoOutOfFourInstance(int n, std::vector<Clause4> cls) : num_vars(n), clauses(std::move(cls)) {
    if (n < 0) throw input_error("negative variable count");
    for (const auto& c : clauses) detail::check_clause(c, num_vars);
    max_occurrence = recount_max_occurrence();
  }
  std::size_t num_clauses() const { return clauses.size(); }

  std::vector<int> occurrence_counts() const {
    std::vector<int> occ(static_cast<std::size_t>(num_vars), 0);
    for (const auto& c : clauses)
      for (const auto& l : c) ++occ[static_cast<std::size_t>(l.var)];
    return occ;
  }
  int recount_max_occurrence() const {
    auto occ = occurrence_counts();
    return occ.empty() ? 0 : *std::max_element(occ.begin(), occ.end());
  }
};

inline double eval_3sat(const ThreeSatInstance& inst, const Assignment& a) {
  if (a.bits.size() != static_cast<std::size_t>(inst.num_vars))
    throw input_error("assignment length mismatch");
  if (inst.clauses.empty()) return 1.0;
  std::size_t sat = 0;
  for (const auto& c : inst.clauses) {
    if (a.literal_value(c[0]) || a.literal_value(c[1]) || a.literal_value(c[2])) ++sat;
  }
  return static_cast<double>(sat) / static_cast<double>(inst.clauses.size());
}

inline bool clause_satisfied_2in4(const Clause4& c, const Assignment& a) {
  int t = 0;
  for (const auto& l : c) t += a.literal_value(l) ? 1 : 0;
  return t == 2;
}

inline double eval_2in4(const TwoOutOfFourInstance& inst, const Assignment& a) {
  if (a.bits.size() != static_cast<std::size_t>(inst.num_vars))
    throw input_error("assignment length mismatch");
  if (inst.clauses.empty()) return 1.0;
  std::size_t sat = 0;
  for (const auto& c : inst.clauses)
    if (clause_satisfied_2in4(c, a)) ++sat;
  return static_cast<double>(sat) / static_cast<double>(inst.clauses.size());
}

struct MaxSatResult {
  double max_fraction = 1.0;
  Assignment argmax;
};

namespace detail {

// Bit-sliced exhaustive max-sat. Assignments are enumerated so that ascending
// order equals lexicographic order on the bit sequence (variable 0 most
// significant); the first maximum found is therefore the lexicographically
// smallest argmax. 64 assignments are evaluated per block: the 6 least
// significant positions (variables n-6..n-1) vary across lanes.
inline constexpr std::array<std::uint64_t, 6> kLanePatterns = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

struct SlicedEval {
  int n;
  // literal value word for variable v, given high bits of the block
  std::uint64_t var_word(int v, std::uint64_t high) const {
    int pos = n - 1 - v;  // lex significance -> bit position
    if (pos < 6) return kLanePatterns[static_cast<std::size_t>(pos)];
    return ((high >> (pos - 6)) & 1u) ? ~0ULL : 0ULL;
  }
};

inline std::uint64_t exactly_two_of_four(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                                         std::uint64_t d) {
  std::uint64_t t1 = a ^ b, c1 = a & b;
  std::uint64_t t2 = c ^ d, c2 = c & d;
  std::uint64_t low = t1 ^ t2;
  std::uint64_t carry = t1 & t2;
  std::uint64_t mid = c1 ^ c2 ^ carry;
  std::uint64_t top = (c1 & c2) | (carry & (c1 ^ c2));
  return ~low & mid & ~top;  // count == 2
}

template <typename PerClause>
MaxSatResult max_sat_sliced(int n, std::size_t num_clauses, PerClause&& clause_sat_words) {
  MaxSatResult best;
  best.max_fraction = -1.0;
  std::uint64_t best_ass = 0;
  std::size_t best_count = 0;

  auto note = [&](std::uint64_t ass, std::size_t count) {
    if (best.max_fraction < 0 || count > best_count) {
      best_count = count;
      best_ass = ass;
      best.max_fraction = static_cast<double>(count) / static_cast<double>(num_clauses);
    }
  };

  if (n < 6) {
    std::vector<std::uint64_t> words;
    clause_sat_words(0, words);
    std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t ass = 0; ass < total; ++ass) {
      std::size_t cnt = 0;
      for (auto w : words) cnt += (w >> ass) & 1u;
      note(ass, cnt);
    }
  } else {
    std::uint64_t blocks = std::uint64_t{1} << (n - 6);
    std::vector<std::uint64_t> words;
    std::array<std::uint8_t, 64> lane_counts{};
    for (std::uint64_t high = 0; high < blocks; ++high) {
      words.clear();
      clause_sat_words(high, words);
      lane_counts.fill(0);
      for (auto w : words) {
        while (w) {
          int l = std::countr_zero(w);
          w &= w - 1;
          ++lane_counts[static_cast<std::size_t>(l)];
        }
      }
      for (int l = 0; l < 64; ++l) {
        std::size_t cnt = lane_counts[static_cast<std::size_t>(l)];
        if (best.max_fraction < 0 || cnt > best_count)
          note((high << 6) | static_cast<std::uint64_t>(l), cnt);
      }
    }
  }

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) bits[static_cast<std::size_t>(v)] = (best_ass >> (n - 1 - v)) & 1u;
  best.argmax = Assignment(std::move(bits));
  return best;
}

}  // namespace detail

inline constexpr int kDefaultBruteForceCap = 24;

inline MaxSatResult brute_force_max_sat(const ThreeSatInstance& inst,
                                        int cap = kDefaultBruteForceCap) {
  if (inst.num_vars > cap) throw refusal_error("instance exceeds brute-force variable cap");
  if (inst.clauses.empty())
    return {1.0, Assignment::zeros(static_cast<std::size_t>(inst.num_vars))};
  detail::SlicedEval ev{inst.num_vars};
  auto per_block = [&](std::uint64_t high, std::vector<std::uint64_t>& out) {
    for (const auto& c : inst.clauses) {
      std::uint64_t w = 0;
      for (const auto& l : c) {
        std::uint64_t v = ev.var_word(l.var, high);
        w |= l.negated ? ~v : v;
      }
      out.push_back(w);
    }
  };
  return detail::max_sat_sliced(inst.num_vars, inst.clauses.size(), per_block);
}

inline MaxSatResult brute_force_max_sat(const TwoOutOfFourInstance& inst,
                                        int cap = kDefaultBruteForceCap) {
  if (inst.num_vars > cap) throw refusal_error("instance exceeds brute-force variable cap");
  if (inst.clauses.empty())
    return {1.0, Assignment::zeros(static_cast<std::size_t>(inst.num_vars))};
  detail::SlicedEval ev{inst.num_vars};
  auto per_block = [&](std::uint64_t high, std::vector<std::uint64_t>& out) {
    for (const auto& c : inst.clauses) {
      std::array<std::uint64_t, 4> lw;
      for (int i = 0; i < 4; ++i) {
        std::uint64_t v = ev.var_word(c[static_cast<std::size_t>(i)].var, high);
        lw[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)].negated ? ~v : v;
      }
      out.push_back(detail::exactly_two_of_four(lw[0], lw[1], lw[2], lw[3]));
    }
  };
  return detail::max_sat_sliced(inst.num_vars, inst.clauses.size(), per_block);
}

inline ThreeSatInstance random_3sat(int n, int m, Rng& rng) {
  if (n < 3) throw input_error("random_3sat needs at least 3 variables");
  std::vector<Clause3> clauses;
  clauses.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    std::array<int, 3> vars{};
    for (int k = 0; k < 3; ++k) {
      bool fresh;
      do {
        vars[static_cast<std::size_t>(k)] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        fresh = true;
        for (int j = 0; j < k; ++j)
          if (vars[static_cast<std::size_t>(j)] == vars[static_cast<std::size_t>(k)]) fresh = false;
      } while (!fresh);
    }
    Clause3 c;
    for (int k = 0; k < 3; ++k)
      c[static_cast<std::size_t>(k)] = {vars[static_cast<std::size_t>(k)], rng.bernoulli(0.5)};
    clauses.push_back(c);
  }
  return ThreeSatInstance(n, std::move(clauses));
}

// ---- DIMACS-like text format ----
// Header `p 3sat n m` or `p 2in4 N M c`, then one clause per line as signed
// 1-based variable indices.

namespace detail {

template <std::size_t A>
std::array<Literal, A> parse_clause_line(const std::string& line) {
  std::istringstream ss(line);
  std::array<Literal, A> cl;
  long v;
  std::size_t i = 0;
  while (ss >> v) {
    if (v == 0) throw input_error("zero literal in clause line");
    if (i >= A) throw input_error("clause has too many literals");
    cl[i++] = {static_cast<int>(std::labs(v)) - 1, v < 0};
  }
  if (i != A) throw input_error("clause has wrong number of literals");
  return cl;
}

inline std::vector<std::string> clause_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == 'c') continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

inline void write_dimacs(std::ostream& out, const ThreeSatInstance& inst) {
  out << "p 3sat " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
  for (const auto& c : inst.clauses) {
    for (std::size_t i = 0; i < 3; ++i)
      out << (i ? " " : "") << (c[i].negated ? -(c[i].var + 1) : c[i].var + 1);
    out << '\n';
  }
}

inline void write_dimacs(std::ostream& out, const TwoOutOfFourInstance& inst) {
  out << "p 2in4 " << inst.num_vars << ' ' << inst.clauses.size() << ' ' << inst.max_occurrence
      << '\n';
  for (const auto& c : inst.clauses) {
    for (std::size_t i = 0; i < 4; ++i)
      out << (i ? " " : "") << (c[i].negated ? -(c[i].var + 1) : c[i].var + 1);
    out << '\n';
  }
}

inline ThreeSatInstance parse_3sat(std::istream& in) {
  std::string tag, kind;
  int n, m;
  if (!(in >> tag >> kind >> n >> m) || tag != "p" || kind != "3sat")
    throw input_error("expected header `p 3sat n m`");
  std::string rest;
  std::getline(in, rest);
  auto lines = detail::clause_lines(in);
  if (lines.size() != static_cast<std::size_t>(m)) throw input_error("clause count mismatch");
  std::vector<Clause3> clauses;
  for (const auto& l : lines) clauses.push_back(detail::parse_clause_line<3>(l));
  return ThreeSatInstance(n, std::move(clauses));
}

inline TwoOutOfFourInstance parse_2in4(std::istream& in) {
  std::string tag, kind;
  int n, m, c;
  if (!(in >> tag >> kind >> n >> m >> c) || tag != "p" || kind != "2in4")
    throw input_error("expected header `p 2in4 N M c`");
  std::string rest;
  std::getline(in, rest);
  auto lines = detail::clause_lines(in);
  if (lines.size() != static_cast<std::size_t>(m)) throw input_error("clause count mismatch");
  std::vector<Clause4> clauses;
  for (const auto& l : lines) clauses.push_back(detail::parse_clause_line<4>(l));
  TwoOutOfFourInstance inst(n, std::move(clauses));
  if (inst.max_occurrence != c) throw input_error("declared balance parameter is wrong");
  return inst;
}

}  // namespace unent
