#include "bdtile/construction.hpp"

#include <algorithm>
#include <sstream>

namespace bdtile {

Patch MarkedPatch::anchored() const {
    Patch out = patch;
    for (auto& t : out.tiles) t.offset = t.offset - mark;
    return out;
}

Point fixed_point(const SubstitutionRule& r, const Patch& p, int a0, std::int64_t budget) {
    if (a0 < 1) throw ValidationError("fixed point requires a positive inflation exponent");
    const Box base = patch_bounding_box(r.extent_table(), p);
    const Patch expanded = expand_full(r, p, a0, budget);
    const Rational scale = rational_pow(r.inflation, static_cast<std::uint64_t>(a0));
    const auto occs = find_occurrences(r, expanded, p, base.scaled(scale));
    if (occs.empty())
        throw ValidationError("no interior copy of the patch at inflation exponent " + std::to_string(a0));
    const Point& tau = occs.front().offset;  // lexicographically smallest
    const Rational denom = scale - 1;
    Point x = Point::zero(tau.dim());
    for (std::size_t i = 0; i < tau.dim(); ++i) x[i] = tau[i] / denom;
    if (!base.strictly_contains_point(x)) throw InternalError("fixed point escaped the patch support");
    return x;
}

namespace {

bool has_interior_copies(const SubstitutionRule& r, const Patch& host, const Patch& p,
                         const Patch& q, int exponent, std::int64_t budget) {
    const Box base = patch_bounding_box(r.extent_table(), host);
    if (expansion_tile_count(r, host, exponent) > BigInt(budget))
        throw BudgetError("interior copy verification exceeded the tile budget");
    const Patch expanded = expand_full(r, host, exponent, budget);
    const Box container = base.scaled(rational_pow(r.inflation, static_cast<std::uint64_t>(exponent)));
    return !find_occurrences(r, expanded, p, container).empty() &&
           !find_occurrences(r, expanded, q, container).empty();
}

Box require_box_support(const SubstitutionRule& r, const Patch& p, const char* who) {
    const Box bb = patch_bounding_box(r.extent_table(), p);
    const CoverReport cover = exact_cover_check(r.extent_table(), p, bb);
    if (!cover.ok)
        throw ValidationError(std::string(who) + " must tile its bounding box exactly: " + cover.message());
    return bb;
}

}  // namespace

int compute_a(const SubstitutionRule& r, const Patch& p, const Patch& q, std::int64_t budget) {
    const Box bp = require_box_support(r, p, "patch P");
    const Box bq = require_box_support(r, q, "patch Q");
    if (bp.extents != bq.extents)
        throw ValidationError("patch supports must differ by a translation");

    int a = std::max(interior_copy_level(r, p, q, budget), interior_copy_level(r, q, p, budget));
    // the smaller side is only known at its own minimal exponent; re-verify at a
    while (!has_interior_copies(r, p, p, q, a, budget) || !has_interior_copies(r, q, p, q, a, budget)) {
        ++a;
    }
    return a;
}

std::int64_t InflationSchedule::level_exponent(int i) const {
    if (i < 1) throw ValidationError("level index must be positive");
    std::int64_t k = 1;
    for (int step = 1; step < i; ++step) {
        if (k > std::numeric_limits<std::int64_t>::max() / h)
            throw BudgetError("inflation exponent overflows at level " + std::to_string(i));
        k *= h;
    }
    return k;
}

std::vector<std::int64_t> InflationSchedule::prefix(int count) const {
    std::vector<std::int64_t> ks;
    for (int i = 1; i <= count; ++i) ks.push_back(level_exponent(i));
    return ks;
}

InflationSchedule compute_h(const SpectralReport& spec, int a, int dimension) {
    if (spec.classification != Dichotomy::Continuum)
        throw ValidationError("h is defined only in the continuum regime");
    if (a < 1) throw ValidationError("a must be positive");
    const int d = dimension;
    const auto abs_exact = spec.lambda_t_abs_exact();
    constexpr int kMaxMultiples = 100000;
    for (int mult = 1; mult <= kMaxMultiples; ++mult) {
        const std::uint64_t h = static_cast<std::uint64_t>(a) * mult;
        const std::uint64_t lhs_exp = static_cast<std::uint64_t>(d) + h * (d - 1);
        const std::uint64_t rhs_exp = h * d;
        if (abs_exact) {
            if (rational_pow(spec.lambda1_exact, lhs_exp) < rational_pow(*abs_exact, rhs_exp))
                return InflationSchedule{static_cast<int>(h)};
        } else {
            const Real tol(spec.tolerance);
            const Real lam1 = to_real(spec.lambda1_exact);
            const Real lo = Real(spec.lambda_t_abs()) * (1 - tol);
            const Real hi = Real(spec.lambda_t_abs()) * (1 + tol);
            const Real lhs = pow(lam1, static_cast<int>(lhs_exp));
            const bool pass_lo = lhs < pow(lo, static_cast<int>(rhs_exp));
            const bool pass_hi = lhs < pow(hi, static_cast<int>(rhs_exp));
            if (pass_lo) return InflationSchedule{static_cast<int>(h)};
            if (pass_hi)
                throw InternalError("h is undecidable at the configured eigenvalue tolerance");
        }
    }
    throw BudgetError("no admissible h below the search cap");
}

std::shared_ptr<ConstructionContext> ConstructionContext::create(const SubstitutionRule& rule,
                                                                 const Patch& p, const Patch& q,
                                                                 const SpectralReport& spec,
                                                                 std::int64_t budget) {
    auto ctx = std::make_shared<ConstructionContext>();
    ctx->rule_ = rule;
    ctx->budget_ = budget;
    ctx->a_ = compute_a(rule, p, q, budget);
    ctx->schedule_ = compute_h(spec, ctx->a_, rule.dimension);

    auto make_marked = [&](const Patch& patch) {
        MarkedPatch mp;
        mp.patch = patch;
        mp.patch.canonical_sort();
        mp.support = require_box_support(rule, mp.patch, "letter patch");
        mp.mark = fixed_point(rule, mp.patch, ctx->a_, budget);
        mp.census = type_census(rule, mp.patch);
        return mp;
    };
    ctx->p_ = make_marked(p);
    ctx->q_ = make_marked(q);

    // c1 = lambda1^(a/d) diam(supp P); squared it is inflation^(2a) diam^2, exact
    const Rational diam_sq = ctx->p_.support.diameter_squared();
    ctx->c1_squared_ = rational_pow(rule.inflation, static_cast<std::uint64_t>(2 * ctx->a_)) * diam_sq;
    return ctx;
}

const MarkedPatch& ConstructionContext::letter(char c) const {
    if (c == 'P') return p_;
    if (c == 'Q') return q_;
    throw ValidationError(std::string("unknown letter '") + c + "'; words use P and Q");
}

const std::vector<Point>& ConstructionContext::interior_occurrences(char inner, char outer, int gap) {
    const auto key = std::make_tuple(inner, outer, gap);
    auto it = occurrence_cache_.find(key);
    if (it != occurrence_cache_.end()) return it->second;

    const MarkedPatch& host = letter(outer);
    const MarkedPatch& needle = letter(inner);
    const Patch expanded = expand_full(rule_, host.patch, gap, budget_);
    const Box container = host.support.scaled(rational_pow(rule_.inflation, static_cast<std::uint64_t>(gap)));
    std::vector<Point> offsets;
    for (const auto& occ : find_occurrences(rule_, expanded, needle.patch, container))
        offsets.push_back(occ.offset);
    return occurrence_cache_.emplace(key, std::move(offsets)).first->second;
}

namespace {

Box placed_support(const ConstructionContext& ctx, char letter, std::int64_t k, const Point& offset) {
    const Rational scale = rational_pow(ctx.rule().inflation, static_cast<std::uint64_t>(k));
    return ctx.letter(letter).support.scaled(scale).translated(offset);
}

}  // namespace

NestedPlacement build_nested(ConstructionContext& ctx, const std::string& word) {
    if (word.empty()) throw ValidationError("word must be nonempty");
    for (char c : word) ctx.letter(c);  // validate letters

    const SubstitutionRule& rule = ctx.rule();
    const Rational xi = rule.inflation;
    const int a = ctx.a();
    NestedPlacement chain;

    // level 1: the k_1-fold inflation of the first letter, anchored at its mark
    {
        NestedLevel lvl;
        lvl.letter = word[0];
        lvl.k = ctx.schedule().level_exponent(1);
        const MarkedPatch& mp = ctx.letter(lvl.letter);
        const Rational scale = rational_pow(xi, static_cast<std::uint64_t>(lvl.k));
        lvl.offset = -(scale * mp.mark);
        lvl.mark = Point::zero(rule.dimension);
        lvl.support = placed_support(ctx, lvl.letter, lvl.k, lvl.offset);
        if (!lvl.support.contains_point(lvl.mark))
            throw InternalError("level-1 anchor missed its own support");
        chain.levels.push_back(std::move(lvl));
    }

    for (std::size_t i = 1; i < word.size(); ++i) {
        const NestedLevel& prev = chain.levels.back();
        NestedLevel lvl;
        lvl.letter = word[i];
        lvl.k = ctx.schedule().level_exponent(static_cast<int>(i) + 1);
        const MarkedPatch& outer = ctx.letter(lvl.letter);
        const MarkedPatch& inner = ctx.letter(prev.letter);

        if (lvl.k < prev.k + a)
            throw ValidationError("schedule too flat: level exponent grows slower than a");
        // carrier exponent e >= prev.k + a, congruent to k mod a so the
        // canonical centered-copy chain reaches it from the top
        const std::int64_t rem = (lvl.k - prev.k - a) % a;
        const std::int64_t e = prev.k + a + rem;

        const Rational scale_k = rational_pow(xi, static_cast<std::uint64_t>(lvl.k));
        const Rational scale_e = rational_pow(xi, static_cast<std::uint64_t>(e));
        const Rational scale_prev = rational_pow(xi, static_cast<std::uint64_t>(prev.k));
        const int gap = static_cast<int>(e - prev.k);

        // carrier copy of the e-fold inflation along the mark chain
        const Point chain_offset = (scale_k - scale_e) * outer.mark;

        const auto& occs = ctx.interior_occurrences(prev.letter, lvl.letter, gap);
        if (occs.empty()) {
            std::ostringstream os;
            os << "positioning rule: no interior occurrence of letter " << prev.letter << " in the "
               << gap << "-fold inflation of letter " << lvl.letter
               << "; constants inconsistent with the rule";
            throw ValidationError(os.str());
        }
        const Point* chosen = nullptr;
        if (gap == a) {
            chosen = &occs.front();  // canonical lexicographically-smallest copy
        } else {
            // bridge step (only when k_prev is not a multiple of a): take the
            // occurrence nearest the scaled mark so the mark-norm bound holds
            Point target = rational_pow(xi, static_cast<std::uint64_t>(gap)) * outer.mark - inner.mark;
            Rational best(-1);
            for (const auto& cand : occs) {
                const Rational dist = (cand - target).norm_squared();
                if (best < 0 || dist < best) {
                    best = dist;
                    chosen = &cand;
                }
            }
        }

        lvl.offset = prev.offset - chain_offset - (scale_prev * (*chosen));
        lvl.mark = scale_k * outer.mark + lvl.offset;
        lvl.support = placed_support(ctx, lvl.letter, lvl.k, lvl.offset);
        lvl.step = NestedLevel::Step{e, chain_offset, *chosen};

        // chain properties, checked exactly
        if (!lvl.support.strictly_contains(prev.support))
            throw InternalError("nested placement violates strict containment");
        if (!lvl.support.contains_point(Point::zero(rule.dimension)))
            throw InternalError("nested placement lost the origin");
        const Rational bound =
            ctx.c1_squared() * rational_pow(xi, static_cast<std::uint64_t>(2 * prev.k));
        if (lvl.mark.norm_squared() > bound)
            throw InternalError("nested placement violates the mark-norm bound");

        chain.levels.push_back(std::move(lvl));
    }
    return chain;
}

OmegaTiling::OmegaTiling(std::shared_ptr<ConstructionContext> ctx, std::string word)
    : ctx_(std::move(ctx)), word_(std::move(word)) {
    if (word_.empty()) throw ValidationError("omega word must be nonempty");
    for (char c : word_) ctx_->letter(c);
}

char OmegaTiling::letter_at(int i) const {
    if (i < 1) throw ValidationError("letter index must be positive");
    const std::size_t idx = static_cast<std::size_t>(i) - 1;
    return idx < word_.size() ? word_[idx] : word_.back();
}

const NestedLevel& OmegaTiling::level(int i) {
    while (static_cast<int>(chain_.levels.size()) < i) {
        std::string prefix;
        for (int j = 1; j <= static_cast<int>(chain_.levels.size()) + 1; ++j) prefix.push_back(letter_at(j));
        chain_ = build_nested(*ctx_, prefix);
    }
    return chain_.levels[static_cast<std::size_t>(i) - 1];
}

Patch omega_window(OmegaTiling& t, const Box& query) {
    const SubstitutionRule& rule = t.ctx_->rule();
    const Box hull = query.dilated(rule.max_extent_per_axis());
    int i = 1;
    while (!t.level(i).support.contains(hull)) ++i;

    const NestedLevel& lvl = t.level(i);
    const MarkedPatch& mp = t.ctx_->letter(lvl.letter);
    const Box local_query = query.translated(-lvl.offset);
    Patch out;
    for (const auto& seed : mp.patch.tiles) {
        const Patch part = expand_window(rule, seed, static_cast<int>(lvl.k), local_query);
        for (const auto& tile : part.tiles) out.tiles.push_back({tile.prototile_id, tile.offset + lvl.offset});
    }
    out.canonical_sort();
    return out;
}

}  // namespace bdtile
