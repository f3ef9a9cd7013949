#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <future>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "brqw/coin.hpp"
#include "brqw/errors.hpp"
#include "brqw/graph.hpp"

namespace brqw {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 100'000'000ULL;

// A path of length n from the root, given by its letter sequence; the
// visited vertices are x_j = step(x_{j-1}, tau_j). tau0 is the initial
// coin state, not a step.
struct Path {
  Letter tau0{};
  std::vector<Letter> letters;

  std::size_t length() const { return letters.size(); }

  std::vector<Vertex> vertices(const Graph& g) const {
    std::vector<Vertex> vs;
    vs.reserve(letters.size() + 1);
    vs.push_back(g.origin());
    for (Letter l : letters) vs.push_back(g.step(vs.back(), l));
    return vs;
  }

  Vertex endpoint(const Graph& g) const {
    Vertex v = g.origin();
    for (Letter l : letters) v = g.step(v, l);
    return v;
  }
};

// Multiset of oriented edges (y,z) with multiplicities, canonically
// sorted; two paths are equivalent iff their phase contents coincide.
struct PhaseContent {
  struct Item {
    Vertex arrival, departure;
    int multiplicity;
  };
  std::vector<Item> items;  // sorted by encoded (arrival, departure)

  int total_multiplicity() const {
    int s = 0;
    for (const auto& it : items) s += it.multiplicity;
    return s;
  }

  // Canonical byte key; equal keys <=> equal contents.
  std::string key() const {
    std::string k;
    for (const auto& it : items) {
      it.arrival.encode_to(k);
      it.departure.encode_to(k);
      auto m = static_cast<std::uint32_t>(it.multiplicity);
      k.push_back(static_cast<char>(m & 0xFF));
      k.push_back(static_cast<char>((m >> 8) & 0xFF));
      k.push_back(static_cast<char>((m >> 16) & 0xFF));
      k.push_back(static_cast<char>((m >> 24) & 0xFF));
    }
    return k;
  }

  friend bool operator==(const PhaseContent& a, const PhaseContent& b) {
    if (a.items.size() != b.items.size()) return false;
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      if (a.items[i].arrival != b.items[i].arrival ||
          a.items[i].departure != b.items[i].departure ||
          a.items[i].multiplicity != b.items[i].multiplicity)
        return false;
    }
    return true;
  }
};

// m(y,z) = number of indices k with (x_k, x_{k-1}) = (y,z).
inline PhaseContent phase_content(const Graph& g, const Path& p) {
  std::map<std::string, std::pair<std::pair<Vertex, Vertex>, int>> counts;
  Vertex prev = g.origin();
  for (Letter l : p.letters) {
    Vertex next = g.step(prev, l);
    std::string k;
    next.encode_to(k);
    prev.encode_to(k);
    auto it = counts.find(k);
    if (it == counts.end())
      counts.emplace(std::move(k), std::make_pair(std::make_pair(next, prev), 1));
    else
      ++it->second.second;
    prev = next;
  }
  PhaseContent pc;
  pc.items.reserve(counts.size());
  for (auto& [k, v] : counts)
    pc.items.push_back(PhaseContent::Item{v.first.first, v.first.second, v.second});
  return pc;
}

// Per-class accumulators of the disorder average: for a fixed phase content,
// the endpoint (class-constant, asserted), the class cardinality, the
// per-last-letter complex amplitude sums, and for sign-exact coins the
// same sums as exact integers.
class ClassTable {
public:
  struct Entry {
    Vertex endpoint;
    std::uint64_t cardinality{0};
    std::vector<std::complex<double>> amp;  // indexed by last letter
    std::vector<std::int64_t> int_amp;      // sign-exact coins only
    std::vector<Letter> representative;     // first path seen, DFS order
  };

  Graph graph;
  int n{0};
  Letter tau0{};
  bool sign_exact{false};
  std::unordered_map<std::string, Entry> classes;

  std::uint64_t total_paths() const {
    std::uint64_t t = 0;
    for (const auto& [k, e] : classes) t += e.cardinality;
    return t;
  }

  // Keys in canonical (byte-lexicographic) order; every reduction over
  // the table iterates in this order so results are schedule-independent.
  std::vector<const std::string*> sorted_keys() const {
    std::vector<const std::string*> ks;
    ks.reserve(classes.size());
    for (const auto& [k, e] : classes) ks.push_back(&k);
    std::sort(ks.begin(), ks.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    return ks;
  }

  bool entry_is_zero(const Entry& e) const {
    if (sign_exact) {
      for (std::int64_t a : e.int_amp)
        if (a != 0) return false;
      return true;
    }
    double tol = 1e-9 * static_cast<double>(e.cardinality);
    for (const auto& a : e.amp)
      if (std::abs(a) >= tol) return false;
    return true;
  }
};

namespace detail {

// DFS over letter sequences with incremental phase-content update.
// `content` maps the canonical edge key to its multiplicity; the class
// key at a leaf is the in-order concatenation (std::map keeps edges
// sorted, so no re-canonicalisation per path is needed).
struct PathDfs {
  const Graph& g;
  int n;
  Letter tau0;
  const SkeletonMatrix* coin;  // null: content/cardinality only
  bool sign_exact;

  std::map<std::string, int> content;
  std::vector<Letter> letters;
  std::vector<Vertex> stack;
  double angle = 0;          // running sum of alpha_{tau_j, tau_{j-1}}
  int parity = 0;            // running count of -1 signs (sign-exact)
  ClassTable* table;

  explicit PathDfs(const Graph& graph, int len, Letter t0, const SkeletonMatrix* c,
                   ClassTable* out)
      : g(graph), n(len), tau0(t0), coin(c),
        sign_exact(c != nullptr && c->sign_exact()), table(out) {
    stack.push_back(g.origin());
  }

  Letter prev_letter() const { return letters.empty() ? tau0 : letters.back(); }

  void descend(Letter l) {
    Vertex next = g.step(stack.back(), l);
    std::string ek;
    next.encode_to(ek);
    stack.back().encode_to(ek);
    ++content[ek];
    if (coin != nullptr) {
      if (sign_exact) {
        if (coin->sign(l, prev_letter()) < 0) ++parity;
      } else {
        angle += coin->phase(l, prev_letter());
      }
    }
    letters.push_back(l);
    stack.push_back(std::move(next));
  }

  void ascend() {
    Letter l = letters.back();
    stack.pop_back();
    letters.pop_back();
    if (coin != nullptr) {
      if (sign_exact) {
        if (coin->sign(l, prev_letter()) < 0) --parity;
      } else {
        angle -= coin->phase(l, prev_letter());
      }
    }
    std::string ek;
    // re-derive the edge key of the popped step
    Vertex next = g.step(stack.back(), l);
    next.encode_to(ek);
    stack.back().encode_to(ek);
    auto it = content.find(ek);
    if (--it->second == 0) content.erase(it);
  }

  void record_leaf() {
    std::string key;
    key.reserve(content.size() * 16);
    for (const auto& [ek, m] : content) {
      key += ek;
      auto u = static_cast<std::uint32_t>(m);
      key.push_back(static_cast<char>(u & 0xFF));
      key.push_back(static_cast<char>((u >> 8) & 0xFF));
      key.push_back(static_cast<char>((u >> 16) & 0xFF));
      key.push_back(static_cast<char>((u >> 24) & 0xFF));
    }
    auto [it, inserted] = table->classes.try_emplace(std::move(key));
    ClassTable::Entry& e = it->second;
    if (inserted) {
      e.endpoint = stack.back();
      e.representative = letters;
      e.amp.assign(static_cast<std::size_t>(g.alphabet_size()), {0.0, 0.0});
      if (sign_exact) e.int_amp.assign(static_cast<std::size_t>(g.alphabet_size()), 0);
    } else if (e.endpoint != stack.back()) {
      // flow balance should pin the endpoint; fail loudly if it doesn't
      throw std::logic_error("class table: paths in one class have distinct endpoints");
    }
    ++e.cardinality;
    std::size_t last = letters.back().index;
    if (coin != nullptr) {
      if (sign_exact) {
        int s = (parity % 2 == 0) ? 1 : -1;
        e.int_amp[last] += s;
        e.amp[last] += static_cast<double>(s);
      } else {
        e.amp[last] += std::polar(1.0, angle);
      }
    } else {
      e.amp[last] += 1.0;
    }
  }

  void run(int depth) {
    if (depth == n) {
      record_leaf();
      return;
    }
    int m = g.alphabet_size();
    for (int i = 0; i < m; ++i) {
      descend(Letter{static_cast<std::uint8_t>(i)});
      run(depth + 1);
      ascend();
    }
  }
};

inline void merge_class_tables(ClassTable& into, ClassTable&& from) {
  for (auto& [k, e] : from.classes) {
    auto it = into.classes.find(k);
    if (it == into.classes.end()) {
      into.classes.emplace(k, std::move(e));
      continue;
    }
    ClassTable::Entry& t = it->second;
    if (t.endpoint != e.endpoint)
      throw std::logic_error("class table merge: endpoint mismatch within a class");
    t.cardinality += e.cardinality;
    for (std::size_t i = 0; i < t.amp.size(); ++i) t.amp[i] += e.amp[i];
    if (!t.int_amp.empty())
      for (std::size_t i = 0; i < t.int_amp.size(); ++i) t.int_amp[i] += e.int_amp[i];
  }
}

inline std::uint64_t pow_u64_checked(std::uint64_t base, int exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

}  // namespace detail

// Exhaustive table over all (2d)^n letter sequences. `coin == nullptr`
// builds contents and cardinalities only (amplitudes count paths).
// Sharded by the first letter when workers > 1; the merged table is
// independent of the shard count.
inline ClassTable build_class_table(const Graph& g, int n, Letter tau0,
                                    const SkeletonMatrix* coin, std::size_t workers = 1,
                                    std::uint64_t budget = kDefaultEnumerationBudget) {
  if (n < 1) throw std::invalid_argument("build_class_table: n must be >= 1");
  if (coin != nullptr && coin->dim() != g.d)
    throw std::invalid_argument("build_class_table: coin dimension mismatch");
  g.check_letter(tau0);
  std::uint64_t total =
      detail::pow_u64_checked(static_cast<std::uint64_t>(g.alphabet_size()), n, budget);
  if (total > budget)
    throw BudgetExceeded("path enumeration (2d)^n exceeds budget of " + std::to_string(budget));

  ClassTable result;
  result.graph = g;
  result.n = n;
  result.tau0 = tau0;
  result.sign_exact = coin != nullptr && coin->sign_exact();

  auto run_shard = [&](int first_letter) {
    ClassTable local;
    local.graph = g;
    local.n = n;
    local.tau0 = tau0;
    local.sign_exact = result.sign_exact;
    detail::PathDfs dfs(g, n, tau0, coin, &local);
    if (first_letter < 0) {
      dfs.run(0);
    } else {
      dfs.descend(Letter{static_cast<std::uint8_t>(first_letter)});
      dfs.run(1);
      dfs.ascend();
    }
    return local;
  };

  if (workers <= 1 || n < 2) {
    result = run_shard(-1);
    result.sign_exact = coin != nullptr && coin->sign_exact();
    return result;
  }
  std::vector<std::future<ClassTable>> futs;
  futs.reserve(static_cast<std::size_t>(g.alphabet_size()));
  for (int i = 0; i < g.alphabet_size(); ++i)
    futs.push_back(std::async(std::launch::async, run_shard, i));
  for (auto& f : futs) detail::merge_class_tables(result, f.get());
  return result;
}

// S_n(alpha) of the disorder-averaged exponential moment:
// (2d)^{-n} sum_x e^{alpha|x|} sum_classes sum_tau |class amplitude|^2.
inline double exact_S_n(const Graph& g, int n, Letter tau0, const SkeletonMatrix& coin,
                        double alpha, NormKind nk, std::size_t workers = 1,
                        std::uint64_t budget = kDefaultEnumerationBudget) {
  ClassTable t = build_class_table(g, n, tau0, &coin, workers, budget);
  double sum = 0;
  for (const std::string* k : t.sorted_keys()) {
    const ClassTable::Entry& e = t.classes.at(*k);
    double w = std::exp(alpha * g.norm(e.endpoint, nk));
    if (t.sign_exact) {
      for (std::int64_t a : e.int_amp) sum += w * static_cast<double>(a) * static_cast<double>(a);
    } else {
      for (const auto& a : e.amp) sum += w * std::norm(a);
    }
  }
  return sum / std::pow(static_cast<double>(g.alphabet_size()), n);
}

// Average of exact_S_n over the 2d initial coin states.
inline double exact_S_n_tau0_averaged(const Graph& g, int n, const SkeletonMatrix& coin,
                                      double alpha, NormKind nk, std::size_t workers = 1,
                                      std::uint64_t budget = kDefaultEnumerationBudget) {
  double s = 0;
  for (int t = 0; t < g.alphabet_size(); ++t)
    s += exact_S_n(g, n, Letter{static_cast<std::uint8_t>(t)}, coin, alpha, nk, workers, budget);
  return s / g.alphabet_size();
}

// SP_n: paths whose equivalence class is a singleton. Returned sorted by
// letter sequence. Independent of the coin.
inline std::vector<Path> single_path_classes(const Graph& g, int n, std::size_t workers = 1,
                                             std::uint64_t budget = kDefaultEnumerationBudget) {
  ClassTable t = build_class_table(g, n, Letter{0}, nullptr, workers, budget);
  std::vector<Path> out;
  for (const auto& [k, e] : t.classes)
    if (e.cardinality == 1) out.push_back(Path{Letter{0}, e.representative});
  std::sort(out.begin(), out.end(),
            [](const Path& a, const Path& b) { return a.letters < b.letters; });
  return out;
}

// True iff the given letter sequence forms a path whose class is a
// singleton among all paths of the same length.
inline bool is_single_path_class(const ClassTable& content_table, const Graph& g,
                                 const std::vector<Letter>& letters) {
  Path p{Letter{0}, letters};
  PhaseContent pc = phase_content(g, p);
  auto it = content_table.classes.find(pc.key());
  if (it == content_table.classes.end())
    throw std::logic_error("is_single_path_class: content missing from table");
  return it->second.cardinality == 1;
}

struct ZeroClassCensus {
  std::uint64_t class_count{0};
  std::uint64_t zero_class_count{0};
  std::uint64_t paths_in_zero_classes{0};
};

// Counts classes whose amplitude vanishes for every (endpoint, last
// letter); exact zero test for sign-exact coins.
inline ZeroClassCensus zero_class_census(const Graph& g, int n, Letter tau0,
                                         const SkeletonMatrix& coin, std::size_t workers = 1,
                                         std::uint64_t budget = kDefaultEnumerationBudget) {
  ClassTable t = build_class_table(g, n, tau0, &coin, workers, budget);
  ZeroClassCensus c;
  c.class_count = t.classes.size();
  for (const auto& [k, e] : t.classes) {
    if (t.entry_is_zero(e)) {
      ++c.zero_class_count;
      c.paths_in_zero_classes += e.cardinality;
    }
  }
  return c;
}

}  // namespace brqw
