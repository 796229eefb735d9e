#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bdtile/spectral.hpp"
#include "bdtile/substitution.hpp"

namespace bdtile {

// A patch together with its contraction fixed point x(P). The anchored
// placement translates the patch so the mark sits at the origin.
struct MarkedPatch {
    Patch patch;       // canonical placement
    Box support;       // bounding box; the patch tiles it exactly
    Point mark;        // strictly inside the support
    CountVector census;

    Patch anchored() const;
    Box anchored_support() const { return support.translated(-mark); }
};

// Unique fixed point of the affine contraction induced by the canonical
// (lexicographically smallest) interior copy of p inside its a0-fold
// inflation: x = tau / (xi^a0 - 1), exactly.
Point fixed_point(const SubstitutionRule& r, const Patch& p, int a0,
                  std::int64_t budget = kDefaultTileBudget);

// Smallest exponent a such that the a-fold inflation of each patch contains
// interior copies of both patches. Requires supports to be boxes of equal
// extents (translates of each other).
int compute_a(const SubstitutionRule& r, const Patch& p, const Patch& q,
              std::int64_t budget = kDefaultTileBudget);

struct InflationSchedule {
    int h = 0;
    // k_i = h^(i-1), 1-based; throws BudgetError on int64 overflow
    std::int64_t level_exponent(int i) const;
    std::vector<std::int64_t> prefix(int count) const;
};

// Smallest positive multiple h of a with lambda1^(1/h) < |lambda_t| /
// lambda1^((d-1)/d), decided by the logarithm-free power comparison
// lambda1^(d + h(d-1)) < |lambda_t|^(h d). Exact when |lambda_t| is
// rational. Requires the continuum regime.
InflationSchedule compute_h(const SpectralReport& spec, int a, int dimension);

// One level of the nested-placement chain: a translated copy of the
// k-fold inflation of the letter patch.
struct NestedLevel {
    char letter = 'P';
    std::int64_t k = 0;
    Point offset;  // global placement offset of the inflated letter patch
    Point mark;    // global mark position
    Box support;   // global support box

    // provenance of the positioning step (absent at level 1)
    struct Step {
        std::int64_t chain_exponent = 0;   // e: inflation exponent of the carrier copy
        Point chain_offset;                // carrier copy offset inside the supertile
        Point occurrence_offset;           // chosen interior occurrence at gap e - k_prev
    };
    std::optional<Step> step;
};

struct NestedPlacement {
    std::vector<NestedLevel> levels;
};

// Everything derived from a rule and a letter pair: marks, the constants a
// and h, and cached interior-occurrence tables for the positioning rule.
class ConstructionContext {
  public:
    static std::shared_ptr<ConstructionContext> create(const SubstitutionRule& rule,
                                                       const Patch& p, const Patch& q,
                                                       const SpectralReport& spec,
                                                       std::int64_t budget = kDefaultTileBudget);

    const SubstitutionRule& rule() const { return rule_; }
    const MarkedPatch& letter(char c) const;
    int a() const { return a_; }
    const InflationSchedule& schedule() const { return schedule_; }
    Rational c1_squared() const { return c1_squared_; }

    // Interior occurrence offsets of `inner`'s patch inside the gap-fold
    // inflation of `outer`'s patch, sorted lexicographically. Cached.
    const std::vector<Point>& interior_occurrences(char inner, char outer, int gap);

  private:
    SubstitutionRule rule_;
    MarkedPatch p_, q_;
    int a_ = 0;
    InflationSchedule schedule_;
    Rational c1_squared_;
    std::int64_t budget_ = kDefaultTileBudget;
    std::map<std::tuple<char, char, int>, std::vector<Point>> occurrence_cache_;
};

// Builds the placement chain for a finite word over {P, Q}; level i is a
// translated copy of the k_i-fold inflation of the letter-i patch. All
// placements are positional; nothing is expanded. The three chain
// properties (kind, strict nesting with origin containment, mark-norm
// bound) are verified exactly and violations raise InternalError.
NestedPlacement build_nested(ConstructionContext& ctx, const std::string& word);

// A tiling determined by an infinite word; finite words are extended by
// repeating the last letter. Windows are expanded lazily through the
// placement chain.
class OmegaTiling {
  public:
    OmegaTiling(std::shared_ptr<ConstructionContext> ctx, std::string word);

    char letter_at(int i) const;  // 1-based
    const std::string& base_word() const { return word_; }

    // Placement chain grown on demand; levels are appended, never changed.
    const NestedLevel& level(int i);

    std::shared_ptr<ConstructionContext> context() const { return ctx_; }

  private:
    std::shared_ptr<ConstructionContext> ctx_;
    std::string word_;
    NestedPlacement chain_;
    friend Patch omega_window(OmegaTiling& t, const Box& query);
};

// Exactly the tiles of the omega tiling whose closed support meets the
// query box. Windows for nested queries agree on their overlap.
Patch omega_window(OmegaTiling& t, const Box& query);

}  // namespace bdtile
