#include "bdtile/substitution.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bdtile {

const ExtentTable& SubstitutionRule::extent_table() const {
    if (extent_cache_.size() != prototiles.size()) {
        extent_cache_.clear();
        for (const auto& p : prototiles) extent_cache_.push_back(p.extents);
    }
    return extent_cache_;
}

Rational SubstitutionRule::lambda1() const {
    return rational_pow(inflation, static_cast<std::uint64_t>(dimension));
}

Rational SubstitutionRule::min_prototile_volume() const {
    Rational m = prototiles.front().volume;
    for (const auto& p : prototiles) m = std::min(m, p.volume);
    return m;
}

Rational SubstitutionRule::max_prototile_diameter_squared() const {
    Rational m(0);
    for (const auto& p : prototiles) m = std::max(m, p.box().diameter_squared());
    return m;
}

std::vector<Rational> SubstitutionRule::max_extent_per_axis() const {
    std::vector<Rational> m(dimension, Rational(0));
    for (const auto& p : prototiles)
        for (int i = 0; i < dimension; ++i) m[i] = std::max(m[i], p.extents[i]);
    return m;
}

std::string RuleReport::message() const {
    if (ok) return "ok";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        if (violations[i].prototile_id >= 0) os << "prototile " << violations[i].prototile_id << ": ";
        os << violations[i].detail;
    }
    return os.str();
}

RuleReport validate_rule(const SubstitutionRule& r) {
    RuleReport rep;
    if (r.prototiles.empty()) {
        rep.violations.push_back({-1, "prototile list is empty"});
        return rep;
    }
    if (r.inflation <= 1) {
        rep.violations.push_back({-1, "inflation factor must exceed 1"});
    }
    if (r.children.size() != r.prototiles.size()) {
        rep.violations.push_back({-1, "children list count does not match prototile count"});
        return rep;
    }
    for (std::size_t i = 0; i < r.prototiles.size(); ++i) {
        const auto& proto = r.prototiles[i];
        if (static_cast<int>(proto.extents.size()) != r.dimension) {
            rep.violations.push_back({static_cast<int>(i), "extents dimension mismatch"});
            continue;
        }
        if (proto.volume != Box(Point::zero(r.dimension), proto.extents).volume()) {
            rep.violations.push_back({static_cast<int>(i), "cached volume disagrees with extents"});
        }
        Patch kids;
        bool bad_id = false;
        for (const auto& c : r.children[i]) {
            if (c.prototile_id < 0 || static_cast<std::size_t>(c.prototile_id) >= r.prototiles.size()) {
                rep.violations.push_back({static_cast<int>(i), "child prototile id out of range"});
                bad_id = true;
                break;
            }
            kids.tiles.push_back({c.prototile_id, c.offset});
        }
        if (bad_id) continue;
        const Box inflated = proto.box().scaled(r.inflation);
        const CoverReport cover = exact_cover_check(r.extent_table(), kids, inflated);
        if (!cover.ok) rep.violations.push_back({static_cast<int>(i), cover.message()});
    }
    rep.ok = rep.violations.empty();
    return rep;
}

Patch substitute(const SubstitutionRule& r, const Patch& p) {
    Patch out;
    for (const auto& t : p.tiles) {
        if (t.prototile_id < 0 || static_cast<std::size_t>(t.prototile_id) >= r.prototiles.size())
            throw ValidationError("substitute: unknown prototile id");
        const Point scaled = r.inflation * t.offset;
        for (const auto& c : r.children[t.prototile_id]) {
            out.tiles.push_back({c.prototile_id, scaled + c.offset});
        }
    }
    out.canonical_sort();
    return out;
}

ResolvedSupertile resolve_address(const SubstitutionRule& r, const SupertileAddress& a,
                                  const Point& seed_offset) {
    if (a.level < 0 || a.path.size() > static_cast<std::size_t>(a.level))
        throw ValidationError("supertile address: path longer than level");
    int type = a.seed;
    Point offset = seed_offset;
    for (int step : a.path) {
        if (step < 0 || static_cast<std::size_t>(step) >= r.children[type].size())
            throw ValidationError("supertile address: child index out of range");
        const auto& child = r.children[type][step];
        offset = r.inflation * offset + child.offset;
        type = child.prototile_id;
    }
    ResolvedSupertile res;
    res.prototile_id = type;
    res.frame_offset = offset;
    res.levels_below = a.level - static_cast<int>(a.path.size());
    const Rational scale = rational_pow(r.inflation, static_cast<std::uint64_t>(res.levels_below));
    res.support = Box(offset, r.prototiles[type].extents).scaled(scale);
    return res;
}

namespace {

void expand_window_rec(const SubstitutionRule& r, int type, const Point& offset, int k,
                       const Box& query, const std::vector<Rational>& scale_pow, Patch& out) {
    const Box support = Box(offset, r.prototiles[type].extents).scaled(scale_pow[k]);
    if (!support.intersects(query)) return;
    if (k == 0) {
        out.tiles.push_back({type, offset});
        return;
    }
    const Point scaled = r.inflation * offset;
    for (const auto& c : r.children[type]) {
        expand_window_rec(r, c.prototile_id, scaled + c.offset, k - 1, query, scale_pow, out);
    }
}

}  // namespace

Patch expand_window(const SubstitutionRule& r, const PlacedTile& seed, int k, const Box& query) {
    if (k < 0) throw ValidationError("expansion level must be nonnegative");
    if (seed.prototile_id < 0 || static_cast<std::size_t>(seed.prototile_id) >= r.prototiles.size())
        throw ValidationError("expand_window: unknown prototile id");
    std::vector<Rational> scale_pow(k + 1);
    scale_pow[0] = 1;
    for (int i = 1; i <= k; ++i) scale_pow[i] = scale_pow[i - 1] * r.inflation;
    Patch out;
    expand_window_rec(r, seed.prototile_id, seed.offset, k, query, scale_pow, out);
    out.canonical_sort();
    return out;
}

BigInt expansion_tile_count(const SubstitutionRule& r, const Patch& p, int k) {
    const std::size_t n = r.prototiles.size();
    std::vector<BigInt> v(n, BigInt(0));
    for (const auto& t : p.tiles) ++v[t.prototile_id];
    for (int step = 0; step < k; ++step) {
        std::vector<BigInt> next(n, BigInt(0));
        for (std::size_t j = 0; j < n; ++j) {
            if (v[j] == 0) continue;
            for (const auto& c : r.children[j]) next[c.prototile_id] += v[j];
        }
        v.swap(next);
    }
    BigInt total(0);
    for (const auto& x : v) total += x;
    return total;
}

Patch expand_full(const SubstitutionRule& r, const Patch& p, int k, std::int64_t budget) {
    if (expansion_tile_count(r, p, k) > BigInt(budget))
        throw BudgetError("full expansion exceeds the tile budget; use a smaller level");
    Patch out = p;
    for (int i = 0; i < k; ++i) out = substitute(r, out);
    return out;
}

std::vector<BigInt> type_census(const SubstitutionRule& r, const Patch& p) {
    std::vector<BigInt> v(r.prototiles.size(), BigInt(0));
    for (const auto& t : p.tiles) {
        if (t.prototile_id < 0 || static_cast<std::size_t>(t.prototile_id) >= v.size())
            throw ValidationError("census: unknown prototile id");
        ++v[t.prototile_id];
    }
    return v;
}

std::vector<Occurrence> find_occurrences(const SubstitutionRule& r, const Patch& haystack,
                                         const Patch& needle, const std::optional<Box>& interior_of) {
    if (needle.empty()) throw ValidationError("occurrence search: empty needle");
    Patch canon = needle;
    canon.canonical_sort();

    std::map<std::pair<int, Point>, bool> index;
    for (const auto& t : haystack.tiles) index[{t.prototile_id, t.offset}] = true;

    const PlacedTile& anchor = canon.tiles.front();
    const Box needle_bb = patch_bounding_box(r.extent_table(), canon);

    std::vector<Occurrence> found;
    for (const auto& t : haystack.tiles) {
        if (t.prototile_id != anchor.prototile_id) continue;
        const Point shift = t.offset - anchor.offset;
        bool all = true;
        for (const auto& n : canon.tiles) {
            if (!index.count({n.prototile_id, n.offset + shift})) {
                all = false;
                break;
            }
        }
        if (!all) continue;
        if (interior_of && !interior_of->strictly_contains(needle_bb.translated(shift))) continue;
        Occurrence occ;
        occ.offset = shift;
        occ.content.tiles.reserve(canon.size());
        for (const auto& n : canon.tiles) occ.content.tiles.push_back({n.prototile_id, n.offset + shift});
        found.push_back(std::move(occ));
    }
    std::sort(found.begin(), found.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.offset < b.offset; });
    return found;
}

std::vector<Occurrence> occurrences(const SubstitutionRule& r, int haystack_seed, int m,
                                    const Patch& needle, std::int64_t budget) {
    if (haystack_seed < 0 || static_cast<std::size_t>(haystack_seed) >= r.prototiles.size())
        throw ValidationError("occurrences: unknown prototile id");
    Patch seed;
    seed.tiles.push_back({haystack_seed, Point::zero(r.dimension)});
    const Patch haystack = expand_full(r, seed, m, budget);
    return find_occurrences(r, haystack, needle);
}

int interior_copy_level(const SubstitutionRule& r, const Patch& p, const Patch& q,
                        std::int64_t budget) {
    for (const auto& t : p.tiles)
        if (t.prototile_id < 0 || static_cast<std::size_t>(t.prototile_id) >= r.prototiles.size())
            throw ValidationError("interior_copy_level: tile id out of range");
    for (const auto& t : q.tiles)
        if (t.prototile_id < 0 || static_cast<std::size_t>(t.prototile_id) >= r.prototiles.size())
            throw ValidationError("interior_copy_level: tile id out of range");

    const Box base = patch_bounding_box(r.extent_table(), p);
    Patch expanded = p;
    for (int a0 = 1;; ++a0) {
        if (expansion_tile_count(r, p, a0) > BigInt(budget))
            throw BudgetError("interior copy search exceeded the tile budget");
        expanded = substitute(r, expanded);
        const Box container = base.scaled(rational_pow(r.inflation, static_cast<std::uint64_t>(a0)));
        if (find_occurrences(r, expanded, p, container).empty()) continue;
        if (find_occurrences(r, expanded, q, container).empty()) continue;
        return a0;
    }
}

}  // namespace bdtile
