#ifndef STABLEFIELD_LATTICE_HPP
#define STABLEFIELD_LATTICE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablefield {

/// An element of Z^d. The group law is coordinatewise addition; e = 0.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> coords)
      : coords_(std::move(coords)) {}
  GroupElement(std::initializer_list<std::int64_t> coords) : coords_(coords) {}

  static GroupElement identity(std::size_t d) {
    return GroupElement(std::vector<std::int64_t>(d, 0));
  }

  static GroupElement basis(std::size_t d, std::size_t k) {
    GroupElement e = identity(d);
    e.coords_.at(k) = 1;
    return e;
  }

  std::size_t dim() const noexcept { return coords_.size(); }
  std::int64_t operator[](std::size_t k) const { return coords_[k]; }
  std::int64_t& operator[](std::size_t k) { return coords_[k]; }
  const std::vector<std::int64_t>& coords() const noexcept { return coords_; }

  bool is_identity() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(),
                       [](std::int64_t c) { return c == 0; });
  }

  /// Sup norm ||t||_inf.
  std::int64_t sup_norm() const noexcept {
    std::int64_t m = 0;
    for (auto c : coords_) m = std::max(m, c < 0 ? -c : c);
    return m;
  }

  friend GroupElement operator+(const GroupElement& a, const GroupElement& b) {
    check_dims(a, b);
    GroupElement r = a;
    for (std::size_t k = 0; k < a.dim(); ++k) r.coords_[k] += b.coords_[k];
    return r;
  }

  friend GroupElement operator-(const GroupElement& a, const GroupElement& b) {
    check_dims(a, b);
    GroupElement r = a;
    for (std::size_t k = 0; k < a.dim(); ++k) r.coords_[k] -= b.coords_[k];
    return r;
  }

  GroupElement operator-() const {
    GroupElement r = *this;
    for (auto& c : r.coords_) c = -c;
    return r;
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < coords_.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(coords_[k]);
    }
    return s + ")";
  }

 private:
  static void check_dims(const GroupElement& a, const GroupElement& b) {
    if (a.dim() != b.dim())
      throw std::invalid_argument("group elements of different dimension");
  }

  std::vector<std::int64_t> coords_;
};

/// All t with ||t||_inf <= radius, in row-major order.
inline std::vector<GroupElement> sup_ball(std::size_t d, std::int64_t radius) {
  std::vector<GroupElement> out;
  GroupElement t(std::vector<std::int64_t>(d, -radius));
  if (d == 0) return {t};
  while (true) {
    out.push_back(t);
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (t[k] < radius) {
        ++t[k];
        break;
      }
      t[k] = -radius;
      if (k == 0) return out;
    }
  }
}

/**
 * A hyperrectangle [lower, upper] of Z^d (inclusive on both ends).
 * Points are enumerated in row-major order, last coordinate fastest.
 */
class LatticeWindow {
 public:
  LatticeWindow() = default;
  LatticeWindow(GroupElement lower, GroupElement upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.dim() != upper_.dim() || lower_.dim() == 0)
      throw std::invalid_argument("window bounds must share a positive dimension");
    for (std::size_t k = 0; k < lower_.dim(); ++k)
      if (upper_[k] < lower_[k])
        throw std::invalid_argument("window has zero volume along axis " +
                                    std::to_string(k));
  }

  /// The cube ||t||_inf <= radius.
  static LatticeWindow cube(std::size_t d, std::int64_t radius) {
    if (radius < 0) throw std::invalid_argument("negative cube radius");
    return LatticeWindow(GroupElement(std::vector<std::int64_t>(d, -radius)),
                         GroupElement(std::vector<std::int64_t>(d, radius)));
  }

  std::size_t dim() const noexcept { return lower_.dim(); }
  const GroupElement& lower() const noexcept { return lower_; }
  const GroupElement& upper() const noexcept { return upper_; }

  std::int64_t extent(std::size_t k) const { return upper_[k] - lower_[k] + 1; }

  std::size_t size() const {
    std::size_t n = 1;
    for (std::size_t k = 0; k < dim(); ++k) n *= static_cast<std::size_t>(extent(k));
    return dim() == 0 ? 0 : n;
  }

  bool contains(const GroupElement& t) const {
    if (t.dim() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k)
      if (t[k] < lower_[k] || t[k] > upper_[k]) return false;
    return true;
  }

  bool contains(const LatticeWindow& w) const {
    return contains(w.lower()) && contains(w.upper());
  }

  std::size_t index_of(const GroupElement& t) const {
    if (!contains(t)) throw std::out_of_range("point " + t.to_string() + " outside window");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < dim(); ++k)
      idx = idx * static_cast<std::size_t>(extent(k)) +
            static_cast<std::size_t>(t[k] - lower_[k]);
    return idx;
  }

  GroupElement point_at(std::size_t index) const {
    GroupElement t = lower_;
    for (std::size_t k = dim(); k-- > 0;) {
      const auto e = static_cast<std::size_t>(extent(k));
      t[k] = lower_[k] + static_cast<std::int64_t>(index % e);
      index /= e;
    }
    return t;
  }

  std::vector<GroupElement> points() const {
    std::vector<GroupElement> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point_at(i));
    return out;
  }

  /// Window grown by `r` in every direction.
  LatticeWindow dilate(std::int64_t r) const {
    GroupElement lo = lower_, hi = upper_;
    for (std::size_t k = 0; k < dim(); ++k) {
      lo[k] -= r;
      hi[k] += r;
    }
    return {lo, hi};
  }

  friend bool operator==(const LatticeWindow&, const LatticeWindow&) = default;

 private:
  GroupElement lower_;
  GroupElement upper_;
};

}  // namespace stablefield

#endif  // STABLEFIELD_LATTICE_HPP
