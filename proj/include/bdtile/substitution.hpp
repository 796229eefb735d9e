#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdtile/geometry.hpp"

namespace bdtile {

struct Prototile {
    int id = 0;                     // index into the rule's prototile list
    std::vector<Rational> extents;  // box support anchored at the origin
    Rational volume;                // cached product of extents

    Box box() const { return Box(Point::zero(extents.size()), extents); }
};

struct ChildPlacement {
    int prototile_id = 0;
    Point offset;
};

// A substitution rule: inflate a prototile by the factor, then tile the
// inflated box with the fixed child placements.
struct SubstitutionRule {
    int dimension = 0;
    Rational inflation;  // > 1
    std::vector<Prototile> prototiles;
    std::vector<std::vector<ChildPlacement>> children;  // per prototile

    std::size_t prototile_count() const { return prototiles.size(); }
    const ExtentTable& extent_table() const;
    Rational lambda1() const;  // inflation^dimension, the volume growth factor
    Rational min_prototile_volume() const;
    Rational max_prototile_diameter_squared() const;
    // Per-axis maximum extent over prototiles; dilation margin that captures
    // every tile touching a region.
    std::vector<Rational> max_extent_per_axis() const;

  private:
    mutable ExtentTable extent_cache_;
};

struct RuleViolation {
    int prototile_id = 0;
    std::string detail;
};

struct RuleReport {
    bool ok = false;
    std::vector<RuleViolation> violations;

    std::string message() const;
};

// ok iff the children of every prototile exactly cover its inflated box,
// the inflation factor exceeds 1, and the prototile list is nonempty.
RuleReport validate_rule(const SubstitutionRule& r);

// One inflation step applied tile by tile.
Patch substitute(const SubstitutionRule& r, const Patch& p);

// Hierarchical coordinates into the k-fold inflation of a seed tile: the
// sub-supertile reached by descending `path` child choices. The support is
// computable from the address alone, which is what makes pruned descent work.
struct SupertileAddress {
    int seed = 0;
    int level = 0;
    std::vector<int> path;
};

struct ResolvedSupertile {
    int prototile_id = 0;
    Point frame_offset;  // offset in the unscaled child frame at this depth
    int levels_below = 0;
    Box support;
};

ResolvedSupertile resolve_address(const SubstitutionRule& r, const SupertileAddress& a,
                                  const Point& seed_offset);

// Exactly the tiles of the k-fold inflation of `seed` whose closed support
// meets `query`, found by recursive descent that prunes every sub-supertile
// whose box misses the query. Output is in canonical order.
Patch expand_window(const SubstitutionRule& r, const PlacedTile& seed, int k, const Box& query);

// Predicted tile count of the k-fold inflation of a patch; used to guard
// full expansions.
BigInt expansion_tile_count(const SubstitutionRule& r, const Patch& p, int k);

inline constexpr std::int64_t kDefaultTileBudget = 10'000'000;

// Full expansion of the k-fold inflation of `p`; throws BudgetError when the
// predicted tile count exceeds the budget.
Patch expand_full(const SubstitutionRule& r, const Patch& p, int k,
                  std::int64_t budget = kDefaultTileBudget);

// Number of tiles of each type.
std::vector<BigInt> type_census(const SubstitutionRule& r, const Patch& p);

struct Occurrence {
    Point offset;
    Patch content;  // needle translated by offset; verified tile for tile
};

// All translations placing `needle` as a sub-patch of `haystack`. When
// `interior_of` is given, only occurrences whose support is disjoint from
// that box's boundary are kept. Offsets are sorted lexicographically.
std::vector<Occurrence> find_occurrences(const SubstitutionRule& r, const Patch& haystack,
                                         const Patch& needle,
                                         const std::optional<Box>& interior_of = std::nullopt);

// Occurrences of `needle` inside the m-fold inflation of one prototile.
std::vector<Occurrence> occurrences(const SubstitutionRule& r, int haystack_seed, int m,
                                    const Patch& needle, std::int64_t budget = kDefaultTileBudget);

// Smallest a0 such that the a0-fold inflation of `p` contains translated
// copies of both `p` and `q` with support disjoint from the inflated
// boundary. Throws BudgetError when the search would exceed the tile budget
// before succeeding.
int interior_copy_level(const SubstitutionRule& r, const Patch& p, const Patch& q,
                        std::int64_t budget = kDefaultTileBudget);

}  // namespace bdtile
