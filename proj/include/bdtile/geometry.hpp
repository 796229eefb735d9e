#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bdtile/numeric.hpp"

namespace bdtile {

// A point of R^d with exact rational coordinates.
struct Point {
    std::vector<Rational> coords;

    Point() = default;
    explicit Point(std::vector<Rational> c) : coords(std::move(c)) {}
    static Point zero(std::size_t d) { return Point(std::vector<Rational>(d, Rational(0))); }

    std::size_t dim() const { return coords.size(); }
    const Rational& operator[](std::size_t i) const { return coords[i]; }
    Rational& operator[](std::size_t i) { return coords[i]; }

    friend Point operator+(const Point& a, const Point& b);
    friend Point operator-(const Point& a, const Point& b);
    friend Point operator*(const Rational& s, const Point& p);
    Point operator-() const;

    Rational norm_squared() const;

    bool operator==(const Point& o) const { return coords == o.coords; }
    // Lexicographic coordinate order; the canonical tile/occurrence order.
    std::strong_ordering operator<=>(const Point& o) const;
};

std::string format_point(const Point& p);

// Axis-aligned box with positive extents.
struct Box {
    Point min_corner;
    std::vector<Rational> extents;

    Box() = default;
    Box(Point min, std::vector<Rational> ext);

    std::size_t dim() const { return extents.size(); }
    Rational max(std::size_t axis) const { return min_corner[axis] + extents[axis]; }
    Point max_corner() const;
    Rational volume() const;
    Point center() const;
    Rational diameter_squared() const;  // squared length of the extents vector

    Box translated(const Point& by) const;
    Box scaled(const Rational& s) const;  // s > 0, about the origin
    // Grow by `margin[axis]` on both sides of each axis.
    Box dilated(const std::vector<Rational>& margin) const;

    // Closed-set predicates.
    bool intersects(const Box& o) const;
    bool contains(const Box& o) const;
    bool contains_point(const Point& p) const;
    bool strictly_contains_point(const Point& p) const;
    // True when `o` is disjoint from this box's boundary (all facet gaps > 0).
    bool strictly_contains(const Box& o) const;

    bool operator==(const Box& o) const = default;
};

// Translated copy of a prototile, identified by index into the rule's list.
struct PlacedTile {
    int prototile_id = 0;
    Point offset;

    bool operator==(const PlacedTile& o) const = default;
    std::strong_ordering operator<=>(const PlacedTile& o) const {
        if (auto c = offset <=> o.offset; c != nullptr) return c;
        return prototile_id <=> o.prototile_id;
    }
};

// Finite sequence of placed tiles. Operations that promise disjointness or
// exact cover validate it explicitly; the container itself stays cheap.
struct Patch {
    std::vector<PlacedTile> tiles;

    std::size_t size() const { return tiles.size(); }
    bool empty() const { return tiles.empty(); }
    void canonical_sort();
};

// Lattice cube centers; each x stands for the half-open unit cube
// C(x) = prod [x_i - 1/2, x_i + 1/2).
struct CubeUnion {
    std::vector<std::vector<std::int64_t>> centers;

    std::size_t size() const { return centers.size(); }
    bool empty() const { return centers.empty(); }
};

// Per-axis inclusive center range of the cubes meeting a box; cube_cover of a
// box is always the full integer block spanned by these ranges.
struct CubeRange {
    std::vector<std::int64_t> lo, hi;

    BigInt cube_count() const;
    // (d-1)-measure of the boundary of the solid block.
    BigInt boundary_measure() const;
    Box bounding_box() const;  // closure of the cube union
};

CubeRange cube_cover_ranges(const Box& b);
CubeUnion cube_cover(const Box& b);

// Exact (d-1)-measure of the boundary of the closed union: one unit facet per
// cube face whose neighbor cube is absent.
Rational boundary_measure(const CubeUnion& a);

// Prototile support extents indexed by prototile id. Geometry operations
// resolve PlacedTile boxes against this table; the substitution module owns
// the richer rule type.
using ExtentTable = std::vector<std::vector<Rational>>;

Box tile_box(const ExtentTable& ext, const PlacedTile& t);
Rational patch_volume(const ExtentTable& ext, const Patch& p);
Box patch_bounding_box(const ExtentTable& ext, const Patch& p);

// [b]^p with closed-set intersection: a tile touching b only on its boundary
// is included.
Patch tiles_intersecting(const ExtentTable& ext, const Patch& p, const Box& b);

struct OverlapWitness {
    std::size_t first = 0, second = 0;  // indices into the checked tile list
};
struct BoundsWitness {
    std::size_t tile = 0;
};

// Result of exact_cover_check; violations are values, not errors.
struct CoverReport {
    bool ok = false;
    std::optional<OverlapWitness> overlap;
    std::optional<BoundsWitness> out_of_bounds;
    std::optional<Rational> volume_tiles, volume_region;

    std::string message() const;
};

// ok iff the tiles are pairwise interior-disjoint, every tile lies inside the
// region, and the total tile volume equals the region volume. For box tiles
// these three facts jointly imply an exact cover.
CoverReport exact_cover_check(const ExtentTable& ext, const Patch& p, const Box& region);

}  // namespace bdtile
