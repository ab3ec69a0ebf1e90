#include "medianscape/maximal.hpp"

#include "medianscape/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace medianscape {

namespace {

[[noreturn]] void fail(const std::string& msg)
{
    throw std::invalid_argument("maximal: " + msg);
}

void check_inputs(const MetricMeasureSpace& space, std::span<const double> u, double R)
{
    if (u.size() != space.size())
        fail("function length does not match the space");
    if (!(R > 0))
        fail("R must be positive");
}

// ----------------------------------------------------------- value ranks ---

struct ValueIndex {
    std::vector<double> distinct;    // ascending distinct |u| values
    std::vector<std::uint32_t> rank; // per point, 0-based index into distinct
};

ValueIndex build_value_index(std::span<const double> u)
{
    const std::size_t n = u.size();
    std::vector<std::pair<double, std::uint32_t>> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = {std::fabs(u[i]), static_cast<std::uint32_t>(i)};
    std::sort(s.begin(), s.end());
    ValueIndex vi;
    vi.rank.resize(n);
    vi.distinct.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 || s[k].first > s[k - 1].first)
            vi.distinct.push_back(s[k].first);
        vi.rank[s[k].second] = static_cast<std::uint32_t>(vi.distinct.size() - 1);
    }
    return vi;
}

// number of elements allowed at or above the median: the largest j with
// j - 1 < gamma * c, evaluated with the same product the definition uses
inline std::int64_t median_order(double gamma, std::int64_t c)
{
    const double t = gamma * static_cast<double>(c);
    const double f = std::floor(t);
    return f == t ? static_cast<std::int64_t>(t) : static_cast<std::int64_t>(f) + 1;
}

// ----------------------------------------------------------- wavelet tree ---

// Static wavelet tree over the per-point value ranks in index order.
// Supports counting and order statistics on index intervals in O(levels);
// shared read-only across worker threads.
class WaveletTree {
public:
    void build(const std::vector<std::uint32_t>& ranks, std::uint32_t m)
    {
        n_ = static_cast<std::uint32_t>(ranks.size());
        levels_ = m <= 1 ? 1 : static_cast<int>(std::bit_width(m - 1));
        if (levels_ == 0)
            levels_ = 1;
        const std::size_t words = (n_ + 63) / 64 + 1;
        bits_.assign(levels_ * words, 0);
        rk_.assign(levels_ * words, 0);
        zeros_.assign(levels_, 0);
        words_ = words;

        std::vector<std::uint32_t> cur(ranks), next(n_);
        for (int l = 0; l < levels_; ++l) {
            const std::uint32_t bit = 1u << (levels_ - 1 - l);
            std::uint64_t* b = &bits_[static_cast<std::size_t>(l) * words_];
            std::uint32_t lo = 0;
            for (std::uint32_t i = 0; i < n_; ++i)
                if (!(cur[i] & bit))
                    ++lo;
            zeros_[l] = lo;
            std::uint32_t zi = 0, oi = lo;
            for (std::uint32_t i = 0; i < n_; ++i) {
                if (cur[i] & bit) {
                    b[i >> 6] |= 1ULL << (i & 63);
                    next[oi++] = cur[i];
                } else {
                    next[zi++] = cur[i];
                }
            }
            std::uint32_t* rk = &rk_[static_cast<std::size_t>(l) * words_];
            std::uint32_t acc = 0;
            for (std::size_t w = 0; w < words_; ++w) {
                rk[w] = acc;
                acc += static_cast<std::uint32_t>(std::popcount(b[w]));
            }
            std::swap(cur, next);
        }
    }

    // count of elements with rank >= r in index window [a, b)
    std::int64_t count_ge(std::uint32_t a, std::uint32_t b, std::uint32_t r) const
    {
        return static_cast<std::int64_t>(b - a) - count_lt(a, b, r);
    }

    std::int64_t count_lt(std::uint32_t a, std::uint32_t b, std::uint32_t r) const
    {
        if (r == 0)
            return 0;
        if (levels_ >= 32 || r >= (1u << levels_))
            return b - a; // r above every stored rank

        std::int64_t cnt = 0;
        for (int l = 0; l < levels_; ++l) {
            const std::uint32_t bit = 1u << (levels_ - 1 - l);
            const std::uint32_t ra = rank1(l, a), rb = rank1(l, b);
            if (r & bit) {
                cnt += (b - a) - (rb - ra); // all 0-branch elements are below r
                a = zeros_[l] + ra;
                b = zeros_[l] + rb;
            } else {
                a -= ra;
                b -= rb;
            }
            if (a >= b)
                break;
        }
        return cnt;
    }

    // rank of the j-th largest element (1-based j) in [a, b)
    std::uint32_t select_kth_largest(std::uint32_t a, std::uint32_t b, std::int64_t j) const
    {
        std::uint32_t value = 0;
        for (int l = 0; l < levels_; ++l) {
            const std::uint32_t bit = 1u << (levels_ - 1 - l);
            const std::uint32_t ra = rank1(l, a), rb = rank1(l, b);
            const std::int64_t ones = rb - ra;
            if (j <= ones) {
                value |= bit;
                a = zeros_[l] + ra;
                b = zeros_[l] + rb;
            } else {
                j -= ones;
                a -= ra;
                b -= rb;
            }
        }
        return value;
    }

private:
    inline std::uint32_t rank1(int level, std::uint32_t pos) const
    {
        const std::uint64_t* b = &bits_[static_cast<std::size_t>(level) * words_];
        const std::uint32_t* rk = &rk_[static_cast<std::size_t>(level) * words_];
        const std::uint32_t w = pos >> 6;
        const std::uint32_t o = pos & 63;
        const std::uint64_t mask = o ? ((1ULL << o) - 1) : 0ULL;
        return rk[w] + static_cast<std::uint32_t>(std::popcount(b[w] & mask));
    }

    std::uint32_t n_ = 0;
    int levels_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> rk_;
    std::vector<std::uint32_t> zeros_;
};

// ------------------------------------------------- near-uniform line setup ---

// On a near-uniform line (gap spread below gmin / 2n) the distance merge
// around any center pairs up: the k-th left and k-th right neighbors enter
// before anything of step k+1. Every ball is then [i-k, i+k-1], [i-k+1, i+k]
// or [i-k, i+k] (clipped at the ends), which the kernels enumerate with
// branch-free prefix-sum windows.
struct SideBounds {
    std::size_t kL, kR; // largest admissible steps (distance < R) per side
};

template <class Coords>
SideBounds side_bounds(const Coords& c, std::size_t n, std::size_t i, double R)
{
    SideBounds sb{i, n - 1 - i};
    if (!std::isfinite(R))
        return sb;
    // binary search: dl_k = c[i] - c[i-k] increasing in k
    std::size_t lo = 0, hi = i;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (c[i] - c[i - mid] < R)
            lo = mid;
        else
            hi = mid - 1;
    }
    sb.kL = lo;
    lo = 0;
    hi = n - 1 - i;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (c[i + mid] - c[i] < R)
            lo = mid;
        else
            hi = mid - 1;
    }
    sb.kR = lo;
    return sb;
}

// ------------------------------------------------------------ hl maximal ---

std::vector<double> hl_maximal_uniform(const MetricMeasureSpace& space,
                                       std::span<const double> u, double R)
{
    // equal masses cancel in every average comparison: work with plain sums
    // and counts, divide by the unit mass once at the end (numerically this
    // matches the mass-weighted route to within an ulp)
    const std::size_t n = space.size();
    std::vector<double> out(n);
    std::vector<double> coords(n), PU(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = space.coord(static_cast<PointId>(i));
        PU[i + 1] = PU[i] + std::fabs(u[i]);
    }
    const bool unbounded = !std::isfinite(R);

    // center-independent one-sided windows: suffix max of the prefix
    // averages avg[0, h] and prefix max of the suffix averages avg[lo, n-1],
    // kept as (num, count) pairs compared by cross-multiplication
    std::vector<double> rnum(n + 1, 0.0), rden(n + 1, 1.0);
    std::vector<double> lnum(n + 1, 0.0), lden(n + 1, 1.0);
    if (unbounded && n > 1) {
        double bn = PU[n], bd = static_cast<double>(n); // full prefix [0, n-1]
        rnum[n - 1] = bn;
        rden[n - 1] = bd;
        for (std::size_t h = n - 1; h-- > 0;) {
            const double num = PU[h + 1];
            const double den = static_cast<double>(h + 1);
            if (num * bd > bn * den) {
                bn = num;
                bd = den;
            }
            rnum[h] = bn;
            rden[h] = bd;
        }
        bn = PU[n] - PU[0];
        bd = static_cast<double>(n);
        lnum[0] = bn;
        lden[0] = bd;
        for (std::size_t lo = 1; lo < n; ++lo) {
            const double num = PU[n] - PU[lo];
            const double den = static_cast<double>(n - lo);
            if (num * bd > bn * den) {
                bn = num;
                bd = den;
            }
            lnum[lo] = bn;
            lden[lo] = bd;
        }
    }

    parallel_for(n, [&](std::size_t i) {
        const double ci = coords[i];
        const auto [kL, kR] = side_bounds(coords, n, i, R);
        const std::size_t k1 = std::min(kL, kR);
        double bn = PU[i + 1] - PU[i];
        double bd = 1;
        double best = bn;
        const double* pu = PU.data() + i;
        for (std::size_t k = 1; k <= k1; ++k) {
            const double dl = ci - coords[i - k];
            const double dr = coords[i + k] - ci;
            // blend the one-point-short window and the tie case without
            // branches: ulp-level gap noise does not predict
            const double right_first = static_cast<double>(dl > dr);
            const double tie = static_cast<double>(dl == dr);
            const double anum0 = pu[k] - pu[-static_cast<std::ptrdiff_t>(k)];
            const double anum1 = pu[k + 1] - pu[1 - static_cast<std::ptrdiff_t>(k)];
            const double snum = pu[k + 1] - pu[-static_cast<std::ptrdiff_t>(k)];
            const double ks = static_cast<double>(2 * k);
            double anum = anum0 + right_first * (anum1 - anum0);
            double aden = ks + tie;
            anum += tie * (snum - anum);
            // division keeps the loop free of carried compare chains and
            // lets it vectorize; the max of rounded ratios matches the
            // exact-fraction route to within an ulp
            const double r1 = anum / aden;
            const double r2 = snum / (ks + 1.0);
            const double r = r1 > r2 ? r1 : r2;
            best = best > r ? best : r;
        }
        bn = best;
        bd = 1;
        if (unbounded) {
            if (kL < kR) { // left side exhausted: windows [0, hi], hi >= 2i+1
                const std::size_t h0 = 2 * i + 1;
                if (rnum[h0] * bd > bn * rden[h0]) {
                    bn = rnum[h0];
                    bd = rden[h0];
                }
            } else if (kR < kL) { // right side exhausted: windows [lo, n-1]
                const std::size_t lo0 = 2 * i + 1 - n;
                if (lnum[lo0] * bd > bn * lden[lo0]) {
                    bn = lnum[lo0];
                    bd = lden[lo0];
                }
            }
        } else if (kL > k1) {
            const double puh = pu[k1 + 1];
            for (std::size_t k = k1 + 1; k <= kL; ++k) {
                const double num = puh - pu[-static_cast<std::ptrdiff_t>(k)];
                const double den = static_cast<double>(k + k1 + 1);
                if (num * bd > bn * den) {
                    bn = num;
                    bd = den;
                }
            }
        } else if (kR > k1) {
            const double pul = pu[-static_cast<std::ptrdiff_t>(k1)];
            for (std::size_t k = k1 + 1; k <= kR; ++k) {
                const double num = pu[k + 1] - pul;
                const double den = static_cast<double>(k + k1 + 1);
                if (num * bd > bn * den) {
                    bn = num;
                    bd = den;
                }
            }
        }
        out[i] = bn / bd;
    });
    return out;
}

// general line spaces: two-pointer walk in metric order
std::vector<double> hl_maximal_line(const MetricMeasureSpace& space,
                                    std::span<const double> u, double R)
{
    const std::size_t n = space.size();
    std::vector<double> out(n);
    std::vector<double> coords(n), wu(n), wm(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = space.coord(static_cast<PointId>(i));
        wm[i] = space.mass(static_cast<PointId>(i));
        wu[i] = wm[i] * std::fabs(u[i]);
    }
    const bool capped = std::isfinite(R);

    parallel_for(n, [&](std::size_t i) {
        const double ci = coords[i];
        std::size_t l = i, r = i;
        double num = wu[i], den = wm[i];
        double bn = num, bd = den;
        while (l > 0 || r + 1 < n) {
            const double gl = l > 0 ? ci - coords[l - 1] : kInf;
            const double gr = r + 1 < n ? coords[r + 1] - ci : kInf;
            // rungs group by metric distance: distinct raw gaps can collapse
            // under the snowflake map
            const double d = space.apply_snowflake(gl < gr ? gl : gr);
            if (capped && !(d < R))
                break;
            while (l > 0 && space.apply_snowflake(ci - coords[l - 1]) == d) {
                --l;
                num += wu[l];
                den += wm[l];
            }
            while (r + 1 < n && space.apply_snowflake(coords[r + 1] - ci) == d) {
                ++r;
                num += wu[r];
                den += wm[r];
            }
            if (num * bd > bn * den) {
                bn = num;
                bd = den;
            }
        }
        out[i] = bn / bd;
    });
    return out;
}

std::vector<double> hl_maximal_general(const MetricMeasureSpace& space,
                                       std::span<const double> u, double R)
{
    const std::size_t n = space.size();
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, PointId>> nb;
        space.sorted_neighbors(static_cast<PointId>(i), nb);
        double num = 0, den = 0, bn = 0, bd = 1;
        for (std::size_t k = 0; k < n; ++k) {
            if (!(nb[k].first < R))
                break;
            const double m = space.mass(nb[k].second);
            num += m * std::fabs(u[static_cast<std::size_t>(nb[k].second)]);
            den += m;
            const bool rung_end = (k + 1 == n) || nb[k + 1].first > nb[k].first;
            if (rung_end && num * bd > bn * den) {
                bn = num;
                bd = den;
            }
        }
        out[i] = bn / bd;
    });
    return out;
}

struct MassFenwick {
    std::vector<double> tree; // 1-based
    std::uint32_t size = 0, highbit = 0;

    void init(std::uint32_t m)
    {
        size = m;
        tree.assign(m + 1, 0.0);
        highbit = m == 0 ? 0 : std::bit_floor(m);
    }
    void clear() { std::fill(tree.begin(), tree.end(), 0.0); }
    void add(std::uint32_t r, double v) // 0-based rank
    {
        for (std::uint32_t i = r + 1; i <= size; i += i & (~i + 1))
            tree[i] += v;
    }
    // 0-based rank of the smallest value whose strict-above mass drops below
    // gammaW; the comparisons run in the same suffix form as the definition.
    std::uint32_t median_rank(double W, double gammaW) const
    {
        std::uint32_t pos = 0;
        double pref = 0;
        for (std::uint32_t step = highbit; step > 0; step >>= 1) {
            const std::uint32_t next = pos + step;
            if (next <= size) {
                const double t = pref + tree[next];
                if (W - t >= gammaW) {
                    pos = next;
                    pref = t;
                }
            }
        }
        return pos;
    }
};

// ------------------------------------------- median maximal: uniform line ---

// Equal-mass near-uniform lines: a branch-free threshold test per window
// (count at or above the next candidate value against gamma * count), with
// the exact median recomputed from the wavelet tree only when a window
// certifies an improvement.
std::vector<double> median_maximal_uniform(const MetricMeasureSpace& space,
                                           std::span<const double> u, double gamma, double R,
                                           const ValueIndex& vi)
{
    const std::size_t n = space.size();
    std::vector<double> out(n);
    std::vector<double> coords(n);
    for (std::size_t i = 0; i < n; ++i)
        coords[i] = space.coord(static_cast<PointId>(i));
    const std::uint32_t m = static_cast<std::uint32_t>(vi.distinct.size());
    WaveletTree wt;
    wt.build(vi.rank, m);
    const std::uint32_t* rank = vi.rank.data();
    const bool unbounded = !std::isfinite(R);

    // center-independent one-sided windows (R = infinity): the medians of
    // the prefixes [0, h] and suffixes [lo, n-1], folded into suffix/prefix
    // maxima. One Fenwick pass each.
    std::vector<double> rmax(n, 0.0), lmax(n, 0.0);
    if (unbounded && n > 1) {
        MassFenwick fw;
        fw.init(m);
        std::vector<double> med(n);
        for (std::size_t h = 0; h < n; ++h) {
            fw.add(vi.rank[h], 1.0);
            const double c = static_cast<double>(h + 1);
            med[h] = vi.distinct[fw.median_rank(c, gamma * c)];
        }
        rmax[n - 1] = med[n - 1];
        for (std::size_t h = n - 1; h-- > 0;)
            rmax[h] = std::max(med[h], rmax[h + 1]);
        fw.clear();
        for (std::size_t lo = n; lo-- > 0;) {
            fw.add(vi.rank[lo], 1.0);
            const double c = static_cast<double>(n - lo);
            med[lo] = vi.distinct[fw.median_rank(c, gamma * c)];
        }
        lmax[0] = med[0];
        for (std::size_t lo = 1; lo < n; ++lo)
            lmax[lo] = std::max(med[lo], lmax[lo - 1]);
    }

    parallel_for(n, [&](std::size_t i) {
        const auto [kL, kR] = side_bounds(coords, n, i, R);
        const std::size_t k1 = std::min(kL, kR);
        const double ci = coords[i];

        std::uint32_t best_rank = rank[i];
        std::uint32_t rplus = best_rank + 1; // may equal m: nothing above
        std::int64_t cnt_above = 0;

        // windows are [a, b) index intervals
        auto improve = [&](std::uint32_t a, std::uint32_t b) {
            const std::int64_t c = b - a;
            const std::int64_t ca = wt.count_ge(a, b, rplus);
            if (static_cast<double>(ca) >= gamma * static_cast<double>(c)) {
                const std::int64_t j = median_order(gamma, c);
                const std::uint32_t rk = wt.select_kth_largest(a, b, j);
                // the test certifies median >= distinct[rplus] > best
                if (rk > best_rank) {
                    best_rank = rk;
                    rplus = best_rank + 1;
                }
            }
        };

        // conservative pre-test: every window of step k that can improve has
        // count >= gamma*2k, tracked with an incremental target and a margin
        // far above its rounding drift; the slow path re-tests each window
        // with the exact product comparison and re-anchors the target
        const double twog = 2 * gamma;
        double target = 0;
        for (std::size_t k = 1; k <= k1; ++k) {
            const std::int64_t incL = rank[i - k] >= rplus;
            const std::int64_t incR = rank[i + k] >= rplus;
            cnt_above += incL + incR;
            target += twog;
            if (static_cast<double>(cnt_above) >= target - 1e-4) {
                const double dl = ci - coords[i - k];
                const double dr = coords[i + k] - ci;
                const std::uint32_t a = static_cast<std::uint32_t>(i - k);
                const std::uint32_t b = static_cast<std::uint32_t>(i + k + 1);
                if (dl != dr) {
                    if (dl < dr)
                        improve(a, b - 1);
                    else
                        improve(a + 1, b);
                }
                improve(a, b);
                cnt_above = wt.count_ge(a, b, rplus);
                target = gamma * (2.0 * static_cast<double>(k)); // re-anchor
            }
        }
        if (unbounded && kL != kR) {
            const double cand = kL < kR ? rmax[2 * i + 1] : lmax[2 * i + 1 - n];
            if (cand > vi.distinct[best_rank]) {
                out[i] = cand;
                return;
            }
        } else if (kL > k1) {
            const std::uint32_t hi = static_cast<std::uint32_t>(i + k1);
            for (std::size_t k = k1 + 1; k <= kL; ++k) {
                const std::size_t lo = i - k;
                const std::int64_t ca = cnt_above + (rank[lo] >= rplus);
                const std::int64_t c = static_cast<std::int64_t>(hi + 1 - lo);
                cnt_above = ca;
                if (static_cast<double>(ca) >= gamma * static_cast<double>(c)) {
                    improve(static_cast<std::uint32_t>(lo), hi + 1);
                    cnt_above = wt.count_ge(static_cast<std::uint32_t>(lo), hi + 1, rplus);
                }
            }
        } else if (kR > k1) {
            const std::uint32_t lo = static_cast<std::uint32_t>(i - k1);
            for (std::size_t k = k1 + 1; k <= kR; ++k) {
                const std::size_t hi = i + k;
                const std::int64_t ca = cnt_above + (rank[hi] >= rplus);
                const std::int64_t c = static_cast<std::int64_t>(hi + 1 - lo);
                cnt_above = ca;
                if (static_cast<double>(ca) >= gamma * static_cast<double>(c)) {
                    improve(lo, static_cast<std::uint32_t>(hi + 1));
                    cnt_above = wt.count_ge(lo, static_cast<std::uint32_t>(hi + 1), rplus);
                }
            }
        }
        out[i] = vi.distinct[best_rank];
    });
    return out;
}

// ------------------------------------------------- median maximal: general ---


std::vector<double> median_maximal_general(const MetricMeasureSpace& space,
                                           std::span<const double> u, double gamma, double R,
                                           const ValueIndex& vi)
{
    const std::size_t n = space.size();
    std::vector<double> out(n);

    const unsigned workers =
        std::max(1u, std::min<unsigned>(worker_count(), static_cast<unsigned>(n)));
    const std::size_t chunk = (n + workers - 1) / workers;

    auto run_block = [&](std::size_t lo, std::size_t hi) {
        MassFenwick fw;
        fw.init(static_cast<std::uint32_t>(vi.distinct.size()));
        std::vector<std::pair<double, PointId>> nb;
        for (std::size_t i = lo; i < hi; ++i) {
            fw.clear();
            space.sorted_neighbors(static_cast<PointId>(i), nb);
            double W = 0;
            double best = -kInf;
            for (std::size_t k = 0; k < n; ++k) {
                if (!(nb[k].first < R))
                    break;
                const std::size_t idx = static_cast<std::size_t>(nb[k].second);
                fw.add(vi.rank[idx], space.mass(nb[k].second));
                W += space.mass(nb[k].second);
                const bool rung_end = (k + 1 == n) || nb[k + 1].first > nb[k].first;
                if (rung_end) {
                    const std::uint32_t rk = fw.median_rank(W, gamma * W);
                    best = std::max(best, vi.distinct[rk]);
                }
            }
            out[i] = best;
        }
    };

    if (workers <= 1) {
        run_block(0, n);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo2 = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi2 = std::min(n, lo2 + chunk);
            if (lo2 >= hi2)
                break;
            pool.emplace_back(run_block, lo2, hi2);
        }
        for (auto& t : pool)
            t.join();
    }
    return out;
}

} // namespace

std::vector<double> hl_maximal(const MetricMeasureSpace& space, std::span<const double> u,
                               double R)
{
    check_inputs(space, u, R);
    if (space.is_line() && space.near_uniform() && space.snowflake_exponent() == 1.0 &&
        space.equal_mass())
        return hl_maximal_uniform(space, u, R);
    if (space.is_line())
        return hl_maximal_line(space, u, R);
    return hl_maximal_general(space, u, R);
}

std::vector<double> median_maximal(const MetricMeasureSpace& space, std::span<const double> u,
                                   double gamma, double R)
{
    check_inputs(space, u, R);
    if (!(gamma > 0) || !(gamma < 1))
        fail("gamma must lie in (0,1)");
    const ValueIndex vi = build_value_index(u);
    if (space.is_line() && space.near_uniform() && space.snowflake_exponent() == 1.0 &&
        space.equal_mass())
        return median_maximal_uniform(space, u, gamma, R, vi);
    return median_maximal_general(space, u, gamma, R, vi);
}

} // namespace medianscape
