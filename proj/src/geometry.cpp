#include "bdtile/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace bdtile {

Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
    return r;
}

Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
    return r;
}

Point operator*(const Rational& s, const Point& p) {
    Point r = p;
    for (auto& c : r.coords) c *= s;
    return r;
}

Point Point::operator-() const {
    Point r = *this;
    for (auto& c : r.coords) c = -c;
    return r;
}

Rational Point::norm_squared() const {
    Rational s(0);
    for (const auto& c : coords) s += c * c;
    return s;
}

std::strong_ordering Point::operator<=>(const Point& o) const {
    const std::size_t n = std::min(coords.size(), o.coords.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (coords[i] < o.coords[i]) return std::strong_ordering::less;
        if (coords[i] > o.coords[i]) return std::strong_ordering::greater;
    }
    return coords.size() <=> o.coords.size();
}

std::string format_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.dim(); ++i) {
        if (i) os << ", ";
        os << format_rational(p[i]);
    }
    os << ")";
    return os.str();
}

Box::Box(Point min, std::vector<Rational> ext) : min_corner(std::move(min)), extents(std::move(ext)) {
    if (min_corner.dim() != extents.size()) throw InternalError("box dimension mismatch");
    for (const auto& e : extents)
        if (e <= 0) throw InternalError("box extent must be positive");
}

Point Box::max_corner() const {
    Point p = min_corner;
    for (std::size_t i = 0; i < extents.size(); ++i) p[i] += extents[i];
    return p;
}

Rational Box::volume() const {
    Rational v(1);
    for (const auto& e : extents) v *= e;
    return v;
}

Point Box::center() const {
    Point p = min_corner;
    for (std::size_t i = 0; i < extents.size(); ++i) p[i] += extents[i] / 2;
    return p;
}

Rational Box::diameter_squared() const {
    Rational s(0);
    for (const auto& e : extents) s += e * e;
    return s;
}

Box Box::translated(const Point& by) const { return Box(min_corner + by, extents); }

Box Box::scaled(const Rational& s) const {
    if (s <= 0) throw InternalError("box scale must be positive");
    Box r = *this;
    for (auto& c : r.min_corner.coords) c *= s;
    for (auto& e : r.extents) e *= s;
    return r;
}

Box Box::dilated(const std::vector<Rational>& margin) const {
    Box r = *this;
    for (std::size_t i = 0; i < extents.size(); ++i) {
        r.min_corner[i] -= margin[i];
        r.extents[i] += 2 * margin[i];
    }
    return r;
}

bool Box::intersects(const Box& o) const {
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (max(i) < o.min_corner[i] || o.max(i) < min_corner[i]) return false;
    }
    return true;
}

bool Box::contains(const Box& o) const {
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (o.min_corner[i] < min_corner[i] || o.max(i) > max(i)) return false;
    }
    return true;
}

bool Box::contains_point(const Point& p) const {
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (p[i] < min_corner[i] || p[i] > max(i)) return false;
    }
    return true;
}

bool Box::strictly_contains_point(const Point& p) const {
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (p[i] <= min_corner[i] || p[i] >= max(i)) return false;
    }
    return true;
}

bool Box::strictly_contains(const Box& o) const {
    for (std::size_t i = 0; i < extents.size(); ++i) {
        if (o.min_corner[i] <= min_corner[i] || o.max(i) >= max(i)) return false;
    }
    return true;
}

void Patch::canonical_sort() {
    std::sort(tiles.begin(), tiles.end());
    tiles.erase(std::unique(tiles.begin(), tiles.end()), tiles.end());
}

BigInt CubeRange::cube_count() const {
    BigInt n(1);
    for (std::size_t i = 0; i < lo.size(); ++i) n *= BigInt(hi[i] - lo[i] + 1);
    return n;
}

BigInt CubeRange::boundary_measure() const {
    // Solid block: 2 * sum_i prod_{j != i} n_j.
    BigInt total(0);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        BigInt side(1);
        for (std::size_t j = 0; j < lo.size(); ++j)
            if (j != i) side *= BigInt(hi[j] - lo[j] + 1);
        total += 2 * side;
    }
    return total;
}

Box CubeRange::bounding_box() const {
    Point min = Point::zero(lo.size());
    std::vector<Rational> ext(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        min[i] = Rational(2 * lo[i] - 1, 2);
        ext[i] = Rational(hi[i] - lo[i] + 1);
    }
    return Box(std::move(min), std::move(ext));
}

CubeRange cube_cover_ranges(const Box& b) {
    // C(x) = [x-1/2, x+1/2) meets the closed box [lo, hi] iff
    // x - 1/2 <= hi  and  x + 1/2 > lo, i.e. x in (lo - 1/2, hi + 1/2].
    CubeRange r;
    r.lo.resize(b.dim());
    r.hi.resize(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const Rational lo = b.min_corner[i] - Rational(1, 2);
        const Rational hi = b.max(i) + Rational(1, 2);
        // smallest integer > lo and largest integer <= hi
        BigInt first = rational_floor(lo) + 1;
        BigInt last = rational_floor(hi);
        if (hi == Rational(last)) {
            // x <= hi with equality allowed: floor already correct
        }
        if (last < first) throw InternalError("empty cube cover of a nonempty box");
        r.lo[i] = static_cast<std::int64_t>(first);
        r.hi[i] = static_cast<std::int64_t>(last);
    }
    return r;
}

CubeUnion cube_cover(const Box& b) {
    const CubeRange r = cube_cover_ranges(b);
    if (r.cube_count() > BigInt(20'000'000)) throw BudgetError("cube cover too large to materialize");
    CubeUnion u;
    std::vector<std::int64_t> cur(r.lo);
    while (true) {
        u.centers.push_back(cur);
        std::size_t axis = r.lo.size();
        while (axis > 0) {
            --axis;
            if (cur[axis] < r.hi[axis]) {
                ++cur[axis];
                for (std::size_t j = axis + 1; j < cur.size(); ++j) cur[j] = r.lo[j];
                break;
            }
            if (axis == 0) return u;
        }
    }
}

Rational boundary_measure(const CubeUnion& a) {
    if (a.empty()) throw ValidationError("boundary of an empty cube union is undefined");
    std::set<std::vector<std::int64_t>> present(a.centers.begin(), a.centers.end());
    BigInt facets(0);
    std::vector<std::int64_t> nb;
    for (const auto& c : present) {
        for (std::size_t axis = 0; axis < c.size(); ++axis) {
            for (int dir : {-1, 1}) {
                nb = c;
                nb[axis] += dir;
                if (!present.count(nb)) ++facets;
            }
        }
    }
    return Rational(facets);
}

Box tile_box(const ExtentTable& ext, const PlacedTile& t) {
    if (t.prototile_id < 0 || static_cast<std::size_t>(t.prototile_id) >= ext.size())
        throw ValidationError("prototile id out of range");
    return Box(t.offset, ext[t.prototile_id]);
}

Rational patch_volume(const ExtentTable& ext, const Patch& p) {
    Rational v(0);
    for (const auto& t : p.tiles) v += tile_box(ext, t).volume();
    return v;
}

Box patch_bounding_box(const ExtentTable& ext, const Patch& p) {
    if (p.empty()) throw ValidationError("bounding box of an empty patch is undefined");
    Box first = tile_box(ext, p.tiles.front());
    Point lo = first.min_corner, hi = first.max_corner();
    for (const auto& t : p.tiles) {
        const Box b = tile_box(ext, t);
        for (std::size_t i = 0; i < lo.dim(); ++i) {
            lo[i] = std::min(lo[i], b.min_corner[i]);
            hi[i] = std::max(hi[i], b.max(i));
        }
    }
    std::vector<Rational> extents(lo.dim());
    for (std::size_t i = 0; i < lo.dim(); ++i) extents[i] = hi[i] - lo[i];
    return Box(std::move(lo), std::move(extents));
}

Patch tiles_intersecting(const ExtentTable& ext, const Patch& p, const Box& b) {
    Patch out;
    for (const auto& t : p.tiles)
        if (tile_box(ext, t).intersects(b)) out.tiles.push_back(t);
    out.canonical_sort();
    return out;
}

namespace {

// Open-interior overlap: closed boxes sharing only boundary do not count.
bool interiors_overlap(const Box& a, const Box& b) {
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (a.max(i) <= b.min_corner[i] || b.max(i) <= a.min_corner[i]) return false;
    }
    return true;
}

}  // namespace

CoverReport exact_cover_check(const ExtentTable& ext, const Patch& p, const Box& region) {
    CoverReport rep;
    std::vector<Box> boxes;
    boxes.reserve(p.size());
    for (const auto& t : p.tiles) boxes.push_back(tile_box(ext, t));

    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (!region.contains(boxes[i])) {
            rep.out_of_bounds = BoundsWitness{i};
            return rep;
        }
    }
    // Sweep by min corner so the overlap scan stays near-linear in practice.
    std::vector<std::size_t> order(boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return boxes[a].min_corner < boxes[b].min_corner;
    });
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            if (boxes[order[b]].min_corner[0] >= boxes[order[a]].max(0)) break;
            if (interiors_overlap(boxes[order[a]], boxes[order[b]])) {
                rep.overlap = OverlapWitness{std::min(order[a], order[b]), std::max(order[a], order[b])};
                return rep;
            }
        }
    }
    Rational vol(0);
    for (const auto& b : boxes) vol += b.volume();
    if (vol != region.volume()) {
        rep.volume_tiles = vol;
        rep.volume_region = region.volume();
        return rep;
    }
    rep.ok = true;
    return rep;
}

std::string CoverReport::message() const {
    if (ok) return "ok";
    std::ostringstream os;
    if (overlap) {
        os << "tiles " << overlap->first << " and " << overlap->second << " overlap";
    } else if (out_of_bounds) {
        os << "tile " << out_of_bounds->tile << " extends outside the region";
    } else if (volume_tiles && volume_region) {
        os << "tile volume " << format_rational(*volume_tiles) << " != region volume "
           << format_rational(*volume_region);
    } else {
        os << "cover violation";
    }
    return os.str();
}

}  // namespace bdtile
