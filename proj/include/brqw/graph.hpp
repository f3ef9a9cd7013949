#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace brqw {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

enum class GraphKind { Lattice, Tree };
enum class NormKind { TreeDepth, L1, Linf, Lp };

// A letter of the alphabet {a_1,...,a_d, a_1^{-1},...,a_d^{-1}},
// encoded as an index in {0,...,2d-1}: index j < d is a_{j+1},
// index j >= d is a_{j-d+1}^{-1}.
struct Letter {
  std::uint8_t index{0};

  friend bool operator==(Letter a, Letter b) { return a.index == b.index; }
  friend bool operator!=(Letter a, Letter b) { return a.index != b.index; }
  friend bool operator<(Letter a, Letter b) { return a.index < b.index; }
};

inline Letter inverse(Letter l, int d) {
  return Letter{static_cast<std::uint8_t>((l.index + d) % (2 * d))};
}

inline std::string letter_name(Letter l, int d) {
  int j = l.index % d + 1;
  std::string s = "a" + std::to_string(j);
  if (l.index >= d) s += "^-1";
  return s;
}

// A site of Z^d (coordinate vector of length d) or of T_{2d}
// (reduced word over A_{2d}, stored as the sequence of letter indices).
class Vertex {
public:
  Vertex() = default;
  static Vertex lattice_origin(int d) {
    Vertex v;
    v.data_.assign(static_cast<std::size_t>(d), 0);
    return v;
  }
  static Vertex tree_origin() { return Vertex{}; }

  static Vertex lattice(std::vector<std::int32_t> coords) {
    Vertex v;
    v.data_ = std::move(coords);
    return v;
  }

  const std::vector<std::int32_t>& data() const { return data_; }
  std::vector<std::int32_t>& data() { return data_; }
  std::size_t size() const { return data_.size(); }

  // Unambiguous byte encoding: length prefix then int32 little-endian
  // elements. Used for hashing and for canonical class-table keys.
  void encode_to(std::string& out) const {
    out.push_back(static_cast<char>(data_.size() & 0xFF));
    out.push_back(static_cast<char>((data_.size() >> 8) & 0xFF));
    for (std::int32_t x : data_) {
      auto u = static_cast<std::uint32_t>(x);
      out.push_back(static_cast<char>(u & 0xFF));
      out.push_back(static_cast<char>((u >> 8) & 0xFF));
      out.push_back(static_cast<char>((u >> 16) & 0xFF));
      out.push_back(static_cast<char>((u >> 24) & 0xFF));
    }
  }

  std::string encoded() const {
    std::string s;
    s.reserve(2 + 4 * data_.size());
    encode_to(s);
    return s;
  }

  std::uint64_t hash() const {
    std::uint64_t h = detail::fnv1a(data_.data(), data_.size() * sizeof(std::int32_t));
    return detail::splitmix64(h ^ (data_.size() * 0x9E3779B97F4A7C15ULL));
  }

  friend bool operator==(const Vertex& a, const Vertex& b) { return a.data_ == b.data_; }
  friend bool operator!=(const Vertex& a, const Vertex& b) { return !(a == b); }
  friend bool operator<(const Vertex& a, const Vertex& b) { return a.data_ < b.data_; }

private:
  std::vector<std::int32_t> data_;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const { return static_cast<std::size_t>(v.hash()); }
};

// The underlying graph G^d: Z^d or T_{2d}, coordination number 2d.
struct Graph {
  GraphKind kind{GraphKind::Lattice};
  int d{1};

  Graph() = default;
  Graph(GraphKind k, int dim) : kind(k), d(dim) {
    if (dim < 1) throw std::invalid_argument("Graph: d must be >= 1");
  }
  static Graph lattice(int d) { return Graph{GraphKind::Lattice, d}; }
  static Graph tree(int d) { return Graph{GraphKind::Tree, d}; }

  int alphabet_size() const { return 2 * d; }

  Vertex origin() const {
    return kind == GraphKind::Lattice ? Vertex::lattice_origin(d) : Vertex::tree_origin();
  }

  void check_letter(Letter l) const {
    if (l.index >= 2 * d)
      throw std::invalid_argument("letter index " + std::to_string(l.index) +
                                  " out of range for d=" + std::to_string(d));
  }

  // The unique neighbour of v reached by l. Tree words are re-reduced:
  // appending the inverse of the last letter cancels it.
  Vertex step(const Vertex& v, Letter l) const {
    check_letter(l);
    Vertex w = v;
    if (kind == GraphKind::Lattice) {
      int axis = l.index % d;
      w.data()[static_cast<std::size_t>(axis)] += (l.index < d) ? 1 : -1;
    } else {
      if (!w.data().empty() &&
          w.data().back() == inverse(l, d).index) {
        w.data().pop_back();
      } else {
        w.data().push_back(l.index);
      }
    }
    return w;
  }

  double norm(const Vertex& v, NormKind nk, double p = 2.0) const {
    switch (nk) {
      case NormKind::TreeDepth:
        if (kind != GraphKind::Tree)
          throw std::invalid_argument("TreeDepth norm requires a tree graph");
        return static_cast<double>(v.size());
      case NormKind::L1: {
        if (kind != GraphKind::Lattice)
          throw std::invalid_argument("l^1 norm requires a lattice graph");
        double s = 0;
        for (std::int32_t x : v.data()) s += std::abs(x);
        return s;
      }
      case NormKind::Linf: {
        if (kind != GraphKind::Lattice)
          throw std::invalid_argument("l^inf norm requires a lattice graph");
        double m = 0;
        for (std::int32_t x : v.data()) m = std::max(m, static_cast<double>(std::abs(x)));
        return m;
      }
      case NormKind::Lp: {
        if (kind != GraphKind::Lattice)
          throw std::invalid_argument("l^p norm requires a lattice graph");
        if (p < 1.0) throw std::invalid_argument("l^p norm requires p >= 1");
        double s = 0;
        for (std::int32_t x : v.data()) s += std::pow(std::abs(static_cast<double>(x)), p);
        return std::pow(s, 1.0 / p);
      }
    }
    throw std::invalid_argument("unknown norm kind");
  }

  // The natural norm for the graph kind: word length on the tree, l^1 on
  // the lattice.
  NormKind default_norm() const {
    return kind == GraphKind::Tree ? NormKind::TreeDepth : NormKind::L1;
  }
};

}  // namespace brqw
