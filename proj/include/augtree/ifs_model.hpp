#pragma once

// IFS specification S_i(x) = B^{-1}(R_i x + d_i) with integer data, and exact
// word -> cell arithmetic.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "augtree/errors.hpp"
#include "augtree/linalg.hpp"

namespace augtree {

/// Axis-aligned hypercube [corner, corner + side]^d.
struct Box {
  IntVector corner;
  Integer side;
  friend bool operator==(const Box&, const Box&) = default;
};

/// Attractor of (B, full_digits), a self-affine tile.
struct Tile {
  std::vector<IntVector> full_digits;
  friend bool operator==(const Tile&, const Tile&) = default;
};

/// User-supplied neighbor vectors s with J ∩ (J + s) nonempty.
struct CustomNeighbors {
  std::vector<IntVector> vectors;
  friend bool operator==(const CustomNeighbors&, const CustomNeighbors&) = default;
};

using InvariantSet = std::variant<Box, Tile, CustomNeighbors>;

struct Caps {
  std::size_t max_depth = 12;
  std::size_t max_classes = 512;
  std::size_t max_component_size = 4096;
  friend bool operator==(const Caps&, const Caps&) = default;
};

struct IfsSpec {
  std::string name;
  std::size_t dimension = 0;
  IntMatrix matrix;
  std::vector<IntVector> digits;
  std::vector<IntMatrix> linear_parts;  // one per map; identity when trivial
  InvariantSet invariant_set;
  Caps caps;
  std::optional<double> explicit_a;
  Integer scale = 1;  // common denominator cleared from the input data

  std::size_t maps() const noexcept { return digits.size(); }
  Integer det_abs() const { return abs(determinant(matrix)); }

  bool trivial_linear_parts() const {
    for (const auto& r : linear_parts)
      if (!r.is_identity()) return false;
    return true;
  }

  /// Contraction ratio r = |det B|^(-1/d).
  double ratio() const {
    return std::pow(static_cast<double>(det_abs()), -1.0 / static_cast<double>(dimension));
  }

  /// Parameter of the visual metric; defaults to -log r.
  double a_param() const { return explicit_a ? *explicit_a : -std::log(ratio()); }

  /// B = B^T B / const, i.e. the maps are similitudes in the working basis.
  bool is_similarity() const {
    IntMatrix gram(dimension, dimension);
    for (std::size_t i = 0; i < dimension; ++i)
      for (std::size_t j = 0; j < dimension; ++j)
        for (std::size_t k = 0; k < dimension; ++k) gram(i, j) += matrix(k, i) * matrix(k, j);
    for (std::size_t i = 0; i < dimension; ++i)
      for (std::size_t j = 0; j < dimension; ++j)
        if (gram(i, j) != (i == j ? gram(0, 0) : Integer(0))) return false;
    return true;
  }

  bool is_scalar_matrix() const {
    for (std::size_t i = 0; i < dimension; ++i)
      for (std::size_t j = 0; j < dimension; ++j)
        if (matrix(i, j) != (i == j ? matrix(0, 0) : Integer(0))) return false;
    return true;
  }

  friend bool operator==(const IfsSpec&, const IfsSpec&) = default;
};

/// Digit indices in 1..m; the empty word is the root.
using Word = std::vector<std::uint32_t>;

/// Realized cell B^{-level}(linear · J + translation).
struct CellState {
  std::size_t level = 0;
  IntMatrix linear;
  IntVector translation;
  friend bool operator==(const CellState&, const CellState&) = default;
};

inline CellState root_cell(const IfsSpec& spec) {
  return CellState{0, IntMatrix::identity(spec.dimension), IntVector(spec.dimension, Integer(0))};
}

/// Cell of the word extended by `digit`: G' = G R_i, t' = G d_i + B t.
inline CellState child_cell(const IfsSpec& spec, const CellState& cell, std::uint32_t digit) {
  if (digit < 1 || digit > spec.maps())
    throw std::out_of_range("digit index " + std::to_string(digit) + " outside 1.." +
                            std::to_string(spec.maps()));
  const std::size_t i = digit - 1;
  CellState out;
  out.level = cell.level + 1;
  out.linear = cell.linear * spec.linear_parts[i];
  out.translation = add(cell.linear * spec.digits[i], spec.matrix * cell.translation);
  return out;
}

inline CellState cell_of_word(const IfsSpec& spec, const Word& word) {
  CellState cell = root_cell(spec);
  for (auto digit : word) cell = child_cell(spec, cell, digit);
  return cell;
}

inline std::string word_to_string(const Word& word) {
  if (word.empty()) return "o";
  std::string out;
  const bool wide = std::any_of(word.begin(), word.end(), [](auto d) { return d > 9; });
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (wide && i) out += '.';
    out += std::to_string(word[i]);
  }
  return out;
}

inline Word parse_word(std::string_view text) {
  Word word;
  if (text.empty() || text == "o") return word;
  if (text.find('.') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('.', start);
      if (end == std::string_view::npos) end = text.size();
      word.push_back(static_cast<std::uint32_t>(std::stoul(std::string(text.substr(start, end - start)))));
      start = end + 1;
    }
    return word;
  }
  for (char c : text) {
    if (c < '1' || c > '9') throw std::invalid_argument("bad word: " + std::string(text));
    word.push_back(static_cast<std::uint32_t>(c - '0'));
  }
  return word;
}

namespace detail {

inline Rational parse_rational(const nlohmann::json& value, const char* field) {
  try {
    if (value.is_number_integer()) return Rational(Integer(value.get<std::int64_t>()));
    if (value.is_string()) {
      const auto text = value.get<std::string>();
      const auto slash = text.find('/');
      if (slash == std::string::npos) return Rational(Integer(text));
      Integer num(text.substr(0, slash));
      Integer den(text.substr(slash + 1));
      if (den == 0) throw SpecError("malformed", std::string(field) + ": zero denominator");
      return Rational(num, den);
    }
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError("malformed", std::string(field) + ": " + e.what());
  }
  throw SpecError("malformed", std::string(field) + ": expected integer or \"p/q\" string");
}

inline std::vector<RatVector> parse_vectors(const nlohmann::json& arr, std::size_t dim,
                                            const char* field) {
  if (!arr.is_array()) throw SpecError("malformed", std::string(field) + " must be an array");
  std::vector<RatVector> out;
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != dim)
      throw SpecError("malformed", std::string(field) + ": each vector needs " +
                                       std::to_string(dim) + " entries");
    RatVector vec;
    for (const auto& x : v) vec.push_back(parse_rational(x, field));
    out.push_back(std::move(vec));
  }
  return out;
}

inline IntMatrix parse_int_matrix(const nlohmann::json& arr, std::size_t dim, const char* field) {
  if (!arr.is_array() || arr.size() != dim)
    throw SpecError("malformed", std::string(field) + " must be a " + std::to_string(dim) + "x" +
                                     std::to_string(dim) + " integer matrix");
  IntMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    if (!arr[r].is_array() || arr[r].size() != dim)
      throw SpecError("malformed", std::string(field) + ": row " + std::to_string(r) +
                                       " has the wrong length");
    for (std::size_t c = 0; c < dim; ++c) {
      const Rational q = parse_rational(arr[r][c], field);
      if (boost::multiprecision::denominator(q) != 1)
        throw SpecError("malformed", std::string(field) + " entries must be integers");
      m(r, c) = boost::multiprecision::numerator(q);
    }
  }
  return m;
}

inline Integer lcm_denominators(const std::vector<RatVector>& vecs, Integer acc) {
  for (const auto& v : vecs)
    for (const auto& x : v) acc = boost::multiprecision::lcm(acc, boost::multiprecision::denominator(x));
  return acc;
}

inline std::vector<IntVector> scale_vectors(const std::vector<RatVector>& vecs, const Integer& q) {
  std::vector<IntVector> out;
  for (const auto& v : vecs) {
    IntVector iv;
    for (const auto& x : v) {
      const Rational y = x * q;
      iv.push_back(boost::multiprecision::numerator(y));
    }
    out.push_back(std::move(iv));
  }
  return out;
}

inline nlohmann::json to_json(const Integer& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(x);
  return x.str();
}

inline nlohmann::json to_json(const IntVector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : v) arr.push_back(to_json(x));
  return arr;
}

inline nlohmann::json to_json(const IntMatrix& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) arr.push_back(to_json(m.row(r)));
  return arr;
}

}  // namespace detail

/// Throws SpecError naming the first violated invariant.
inline void validate(const IfsSpec& spec) {
  const std::size_t d = spec.dimension;
  if (d == 0) throw SpecError("malformed", "dimension must be positive");
  if (spec.matrix.rows() != d || spec.matrix.cols() != d)
    throw SpecError("malformed", "matrix must be d x d");
  if (spec.maps() < 2) throw SpecError("map-count", "at least two maps are required");
  if (spec.linear_parts.size() != spec.maps())
    throw SpecError("malformed", "one linear part per digit is required");
  for (const auto& v : spec.digits)
    if (v.size() != d) throw SpecError("malformed", "digit of wrong dimension");
  if (!is_expanding(spec.matrix))
    throw SpecError("non-expanding", "matrix has an eigenvalue of modulus <= 1");
  for (const auto& r : spec.linear_parts)
    if (r.rows() != d || !is_signed_permutation(r))
      throw SpecError("linear-part", "linear parts must be signed permutation matrices");

  std::set<std::pair<IntMatrix, IntVector>> seen;
  for (std::size_t i = 0; i < spec.maps(); ++i)
    if (!seen.emplace(spec.linear_parts[i], spec.digits[i]).second)
      throw SpecError("distinct-maps", "map " + std::to_string(i + 1) + " repeats an earlier map");

  const RatMatrix b_inv = inverse(to_rational(spec.matrix));

  if (const auto* box = std::get_if<Box>(&spec.invariant_set)) {
    if (box->corner.size() != d) throw SpecError("malformed", "box corner of wrong dimension");
    if (box->side <= 0) throw SpecError("malformed", "box side must be positive");
    if (!spec.trivial_linear_parts() && !spec.is_scalar_matrix())
      throw SpecError("box-linear-parts",
                      "non-identity linear parts need a scalar expansion matrix n*I");
    // S_i(J) ⊆ J  <=>  every corner of R_i J + d_i lies in B J.
    for (std::size_t i = 0; i < spec.maps(); ++i) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        IntVector corner(d);
        for (std::size_t k = 0; k < d; ++k)
          corner[k] = box->corner[k] + (((mask >> k) & 1u) ? box->side : Integer(0));
        const RatVector image =
            b_inv * to_rational(add(spec.linear_parts[i] * corner, spec.digits[i]));
        for (std::size_t k = 0; k < d; ++k)
          if (image[k] < Rational(box->corner[k]) || image[k] > Rational(box->corner[k] + box->side))
            throw SpecError("containment",
                            "S_" + std::to_string(i + 1) + "(J) is not contained in J");
      }
    }
  } else if (const auto* tile = std::get_if<Tile>(&spec.invariant_set)) {
    if (!spec.trivial_linear_parts())
      throw SpecError("tile-linear-parts", "the tile backend requires trivial linear parts");
    std::set<IntVector> full(tile->full_digits.begin(), tile->full_digits.end());
    for (const auto& v : tile->full_digits)
      if (v.size() != d) throw SpecError("malformed", "full digit of wrong dimension");
    if (full.size() != tile->full_digits.size())
      throw SpecError("tile-digits", "full digit set has repeated entries");
    if (Integer(full.size()) != spec.det_abs())
      throw SpecError("tile-digits", "full digit set must have |det B| = " +
                                         spec.det_abs().str() + " elements");
    for (std::size_t i = 0; i < spec.maps(); ++i)
      if (!full.count(spec.digits[i]))
        throw SpecError("tile-digits",
                        "digit " + std::to_string(i + 1) + " is not in the full digit set");
  } else {
    const auto& custom = std::get<CustomNeighbors>(spec.invariant_set);
    if (!spec.trivial_linear_parts())
      throw SpecError("neighbor-linear-parts",
                      "custom neighbor sets require trivial linear parts");
    std::set<IntVector> vecs(custom.vectors.begin(), custom.vectors.end());
    for (const auto& v : custom.vectors) {
      if (v.size() != d) throw SpecError("malformed", "neighbor vector of wrong dimension");
      if (is_zero(v)) throw SpecError("neighbor-symmetry", "neighbor set contains 0");
      IntVector neg(v);
      for (auto& x : neg) x = -x;
      if (!vecs.count(neg)) throw SpecError("neighbor-symmetry", "neighbor set is not symmetric");
    }
  }
  if (spec.explicit_a && !(*spec.explicit_a > 0.0))
    throw SpecError("malformed", "a_param must be positive");
}

inline IfsSpec spec_from_json(const nlohmann::json& j) {
  using detail::parse_vectors;
  if (!j.is_object()) throw SpecError("malformed", "config must be a JSON object");
  IfsSpec spec;
  try {
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    spec.dimension = j.at("dimension").get<std::size_t>();
    if (spec.dimension == 0) throw SpecError("malformed", "dimension must be positive");
    spec.matrix = detail::parse_int_matrix(j.at("matrix"), spec.dimension, "matrix");
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("malformed", e.what());
  }
  const std::size_t d = spec.dimension;
  if (!j.contains("digits")) throw SpecError("malformed", "missing digits");
  if (!j.contains("invariant_set")) throw SpecError("malformed", "missing invariant_set");

  const auto digits = parse_vectors(j.at("digits"), d, "digits");
  const auto& inv = j.at("invariant_set");
  const std::string type = inv.value("type", "");

  std::vector<RatVector> set_vectors;
  Rational side;
  if (type == "box") {
    set_vectors = parse_vectors(nlohmann::json::array({inv.at("corner")}), d, "corner");
    side = detail::parse_rational(inv.at("side"), "side");
  } else if (type == "tile") {
    set_vectors = parse_vectors(inv.at("full_digits"), d, "full_digits");
  } else if (type == "custom_neighbors") {
    set_vectors = parse_vectors(inv.at("vectors"), d, "vectors");
  } else {
    throw SpecError("malformed", "invariant_set.type must be box, tile or custom_neighbors");
  }

  Integer q = detail::lcm_denominators(digits, Integer(1));
  q = detail::lcm_denominators(set_vectors, q);
  if (type == "box") q = boost::multiprecision::lcm(q, boost::multiprecision::denominator(side));

  Integer prior = 1;
  if (j.contains("scale")) {
    prior = Integer(j.at("scale").get<std::int64_t>());
    if (prior <= 0) throw SpecError("malformed", "scale must be positive");
  }
  spec.scale = prior * q;
  spec.digits = detail::scale_vectors(digits, q);
  const auto scaled_set = detail::scale_vectors(set_vectors, q);
  if (type == "box") {
    const Rational s = side * q;
    spec.invariant_set = Box{scaled_set.front(), boost::multiprecision::numerator(s)};
  } else if (type == "tile") {
    spec.invariant_set = Tile{scaled_set};
  } else {
    spec.invariant_set = CustomNeighbors{scaled_set};
  }

  if (j.contains("linear_parts") && !j.at("linear_parts").is_null()) {
    const auto& lp = j.at("linear_parts");
    if (!lp.is_array() || lp.size() != spec.digits.size())
      throw SpecError("malformed", "linear_parts needs one matrix per digit");
    for (const auto& m : lp) spec.linear_parts.push_back(detail::parse_int_matrix(m, d, "linear_parts"));
  } else {
    spec.linear_parts.assign(spec.digits.size(), IntMatrix::identity(d));
  }

  if (j.contains("caps")) {
    const auto& c = j.at("caps");
    spec.caps.max_depth = c.value("max_depth", spec.caps.max_depth);
    spec.caps.max_classes = c.value("max_classes", spec.caps.max_classes);
    spec.caps.max_component_size = c.value("max_component_size", spec.caps.max_component_size);
  }
  if (j.contains("a_param") && !j.at("a_param").is_null()) spec.explicit_a = j.at("a_param").get<double>();

  validate(spec);
  return spec;
}

inline IfsSpec parse_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError("malformed", e.what());
  }
  return spec_from_json(j);
}

/// Serializes the cleared (integer) form; parse_spec(to_json(s).dump()) == s.
inline nlohmann::json to_json(const IfsSpec& spec) {
  using detail::to_json;
  nlohmann::json j;
  if (!spec.name.empty()) j["name"] = spec.name;
  j["dimension"] = spec.dimension;
  j["matrix"] = to_json(spec.matrix);
  nlohmann::json digits = nlohmann::json::array();
  for (const auto& v : spec.digits) digits.push_back(to_json(v));
  j["digits"] = digits;
  if (!spec.trivial_linear_parts()) {
    nlohmann::json lp = nlohmann::json::array();
    for (const auto& m : spec.linear_parts) lp.push_back(to_json(m));
    j["linear_parts"] = lp;
  }
  nlohmann::json inv;
  if (const auto* box = std::get_if<Box>(&spec.invariant_set)) {
    inv["type"] = "box";
    inv["corner"] = to_json(box->corner);
    inv["side"] = to_json(box->side);
  } else if (const auto* tile = std::get_if<Tile>(&spec.invariant_set)) {
    inv["type"] = "tile";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : tile->full_digits) arr.push_back(to_json(v));
    inv["full_digits"] = arr;
  } else {
    inv["type"] = "custom_neighbors";
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : std::get<CustomNeighbors>(spec.invariant_set).vectors) arr.push_back(to_json(v));
    inv["vectors"] = arr;
  }
  j["invariant_set"] = inv;
  j["caps"] = {{"max_depth", spec.caps.max_depth},
               {"max_classes", spec.caps.max_classes},
               {"max_component_size", spec.caps.max_component_size}};
  if (spec.explicit_a) j["a_param"] = *spec.explicit_a;
  if (spec.scale != 1) j["scale"] = to_json(spec.scale);
  return j;
}

}  // namespace augtree
