#include "frontforge/arrival_field.hpp"

#include <algorithm>
#include <unordered_set>

#include <boost/math/quadrature/gauss.hpp>

namespace frontforge::front {

namespace {

constexpr const char* kModule = "front_solver";
constexpr std::uint8_t kFar = 0, kTrial = 1, kKnown = 2;
constexpr int kKeyBits = 21;
constexpr std::uint64_t kKeyMask = (std::uint64_t{1} << kKeyBits) - 1;

std::uint64_t pack(const std::int64_t* k, int n)
{
    std::uint64_t key = 0;
    for (int d = 0; d < n; ++d)
        key |= static_cast<std::uint64_t>(k[d]) << (kKeyBits * d);
    return key;
}

void unpack(std::uint64_t key, int n, std::int64_t* k)
{
    for (int d = 0; d < n; ++d)
        k[d] = static_cast<std::int64_t>((key >> (kKeyBits * d)) & kKeyMask);
}

/// Solves sum_j (T - m_j)_+^2 = f^2 for the smallest admissible T.
double eikonal_update(double* m, int count, double f)
{
    std::sort(m, m + count);
    double T = m[0] + f;
    if (count == 1 || T <= m[1])
        return T;
    const double d01 = m[0] - m[1];
    const double disc2 = 2.0 * f * f - d01 * d01;
    T = 0.5 * (m[0] + m[1] + std::sqrt(std::max(0.0, disc2)));
    if (count == 2 || T <= m[2])
        return T;
    const double S = m[0] + m[1] + m[2];
    const double Q = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
    const double disc3 = S * S - 3.0 * (Q - f * f);
    return (S + std::sqrt(std::max(0.0, disc3))) / 3.0;
}

}  // namespace

Vec Source::centre() const
{
    Vec c = anchor;
    if (kind == Kind::Cell)
        for (auto& v : c)
            v += 0.5;
    return c;
}

std::size_t ArrivalField::block_of(const std::int64_t* k, std::size_t& offset) const
{
    std::size_t b = 0, bstride = 1, o = 0, ostride = 1;
    for (int d = 0; d < n_; ++d) {
        b += static_cast<std::size_t>(k[d] / kBlock) * bstride;
        bstride *= static_cast<std::size_t>(block_dims_[d]);
        o += static_cast<std::size_t>(k[d] % kBlock) * ostride;
        ostride *= kBlock;
    }
    offset = o;
    return b;
}

ArrivalField::Block* ArrivalField::block_ptr(const std::int64_t* k, std::size_t& offset) const
{
    const std::size_t b = block_of(k, offset);
    auto& blk = const_cast<Block&>(blocks_[b]);
    return blk.T ? &blk : nullptr;
}

ArrivalField::Block& ArrivalField::touch(const std::int64_t* k, std::size_t& offset)
{
    Block& blk = blocks_[block_of(k, offset)];
    if (!blk.T) {
        blk.T.reset(new double[block_volume_]);
        std::fill_n(blk.T.get(), block_volume_, kUnreached);
        blk.state.reset(new std::uint8_t[block_volume_]());
        ++blocks_allocated_;
    }
    return blk;
}

bool ArrivalField::in_box(const std::int64_t* k) const
{
    for (int d = 0; d < n_; ++d)
        if (k[d] < 0 || k[d] >= dims_[d])
            return false;
    return true;
}

double ArrivalField::node(const std::int64_t* k) const
{
    if (!in_box(k))
        return kUnreached;
    std::size_t off;
    const Block* blk = block_ptr(k, off);
    if (!blk || blk->state[off] != kKnown)
        return kUnreached;
    return blk->T[off];
}

Vec ArrivalField::node_position(const std::int64_t* k) const
{
    Vec x(static_cast<std::size_t>(n_));
    for (int d = 0; d < n_; ++d)
        x[d] = origin_[d] + static_cast<double>(k[d]) * h_;
    return x;
}

Vec ArrivalField::fold(std::span<const double> x) const
{
    Vec y(x.begin(), x.end());
    for (int d = 0; d < n_; ++d)
        if (mirror_[d] && y[d] < origin_[d])
            y[d] = 2.0 * origin_[d] - y[d];
    return y;
}

double ArrivalField::at(std::span<const double> x) const
{
    const Vec y = fold(x);
    std::int64_t base[3];
    double frac[3];
    for (int d = 0; d < n_; ++d) {
        const double u = (y[d] - origin_[d]) / h_;
        if (u < -1e-9 || u > static_cast<double>(dims_[d] - 1) + 1e-9)
            return kUnreached;
        auto k = static_cast<std::int64_t>(std::floor(u));
        k = std::clamp<std::int64_t>(k, 0, std::max<std::int64_t>(0, dims_[d] - 2));
        base[d] = k;
        frac[d] = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    }
    double value = 0.0;
    for (int corner = 0; corner < (1 << n_); ++corner) {
        double weight = 1.0;
        std::int64_t k[3];
        for (int d = 0; d < n_; ++d) {
            const int bit = (corner >> d) & 1;
            k[d] = std::min(base[d] + bit, dims_[d] - 1);
            weight *= bit ? frac[d] : 1.0 - frac[d];
        }
        if (weight == 0.0)
            continue;
        const double T = node(k);
        if (T == kUnreached)
            return kUnreached;
        value += weight * T;
    }
    return value;
}

void ArrivalField::for_each_accepted(const std::function<void(const std::int64_t*, double)>& fn) const
{
    std::int64_t k[3];
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const Block& blk = blocks_[b];
        if (!blk.T)
            continue;
        std::int64_t bk[3];
        std::size_t r = b;
        for (int d = 0; d < n_; ++d) {
            bk[d] = static_cast<std::int64_t>(r % static_cast<std::size_t>(block_dims_[d]));
            r /= static_cast<std::size_t>(block_dims_[d]);
        }
        for (std::size_t o = 0; o < block_volume_; ++o) {
            if (blk.state[o] != kKnown)
                continue;
            std::size_t q = o;
            for (int d = 0; d < n_; ++d) {
                k[d] = bk[d] * kBlock + static_cast<std::int64_t>(q % kBlock);
                q /= kBlock;
            }
            fn(k, blk.T[o]);
        }
    }
}

ScalarField ArrivalField::to_scalar_field() const
{
    ScalarField f;
    f.n = n_;
    f.origin = origin_;
    f.h = h_;
    std::size_t total = 1;
    for (auto d : dims_) {
        f.dims.push_back(static_cast<std::uint64_t>(d));
        total *= static_cast<std::size_t>(d);
    }
    f.values.assign(total, kUnreached);
    for_each_accepted([&](const std::int64_t* k, double T) {
        std::size_t idx = 0, stride = 1;
        for (int d = 0; d < n_; ++d) {
            idx += static_cast<std::size_t>(k[d]) * stride;
            stride *= static_cast<std::size_t>(dims_[d]);
        }
        f.values[idx] = T;
    });
    return f;
}

ArrivalField fmm_arrival(const Medium& medium, const Source& source, const FmmOptions& options)
{
    const int n = medium.n;
    if (n < 1 || n > 3)
        throw ValidationError(kModule, "fast marching supports n in {1,2,3}");
    if (source.anchor.size() != static_cast<std::size_t>(n))
        throw ValidationError(kModule, "source dimension does not match the medium");
    if (!(options.h > 0.0))
        throw ValidationError(kModule, "grid spacing must be positive");
    if (!(options.t_max > 0.0))
        throw ValidationError(kModule, "t_max must be positive");
    if (!options.mirror.empty() && options.mirror.size() != static_cast<std::size_t>(n))
        throw ValidationError(kModule, "mirror flags need one entry per axis");
    if (options.grid_anchor && options.grid_anchor->size() != static_cast<std::size_t>(n))
        throw ValidationError(kModule, "grid anchor dimension mismatch");

    const double h = options.h;
    ArrivalField F;
    F.n_ = n;
    F.h_ = h;
    F.source_ = source;
    F.t_max_ = options.t_max;
    F.mirror_ = options.mirror.empty() ? std::vector<bool>(n, false) : options.mirror;
    F.origin_.resize(n);
    F.dims_.resize(n);

    const double reach = medium.upper * options.t_max + options.margin_cells * h;
    const auto K = static_cast<std::int64_t>(std::ceil(reach / h - 1e-9));
    const bool cell = source.kind == Source::Kind::Cell;
    const double half_cells = 0.5 / h;
    for (int d = 0; d < n; ++d) {
        if (F.mirror_[d]) {
            if (cell && std::abs(half_cells - std::round(half_cells)) > 1e-9)
                throw ValidationError(kModule, "mirror plane through the cell centre needs 1/(2h) integral");
            F.origin_[d] = source.centre()[d];
            const double extent = cell ? 0.5 : 0.0;
            F.dims_[d] = static_cast<std::int64_t>(std::ceil(extent / h - 1e-9)) + K + 1;
        } else if (!cell && options.grid_anchor) {
            const double g = (*options.grid_anchor)[d];
            const auto below = static_cast<std::int64_t>(std::floor((source.anchor[d] - reach - g) / h));
            const auto above = static_cast<std::int64_t>(std::ceil((source.anchor[d] + reach - g) / h));
            F.origin_[d] = g + static_cast<double>(below) * h;
            F.dims_[d] = above - below + 1;
        } else {
            F.origin_[d] = source.anchor[d] - static_cast<double>(K) * h;
            const auto inner = cell ? static_cast<std::int64_t>(std::ceil(1.0 / h - 1e-9)) : 0;
            F.dims_[d] = 2 * K + inner + 1;
        }
        if (F.dims_[d] > static_cast<std::int64_t>(kKeyMask))
            throw ValidationError(kModule, "grid too large: " + std::to_string(F.dims_[d]) + " nodes on one axis");
    }
    F.block_dims_.resize(n);
    std::size_t nblocks = 1;
    F.block_volume_ = 1;
    for (int d = 0; d < n; ++d) {
        F.block_dims_[d] = (F.dims_[d] + ArrivalField::kBlock - 1) / ArrivalField::kBlock;
        nblocks *= static_cast<std::size_t>(F.block_dims_[d]);
        F.block_volume_ *= ArrivalField::kBlock;
    }
    F.blocks_.resize(nblocks);

    // Speed lookup: a periodic table when the lattice Z^n is a sublattice of the grid.
    const double cells_per_unit = 1.0 / h;
    const auto P = static_cast<std::int64_t>(std::llround(cells_per_unit));
    std::vector<double> table;
    const bool use_table = medium.periodic && std::abs(cells_per_unit - static_cast<double>(P)) < 1e-9 &&
                           std::pow(static_cast<double>(P), n) <= 1 << 24;
    if (use_table) {
        std::size_t total = 1;
        for (int d = 0; d < n; ++d)
            total *= static_cast<std::size_t>(P);
        table.resize(total);
        parallel_for(total, [&](std::size_t i) {
            Vec x(static_cast<std::size_t>(n));
            std::size_t r = i;
            for (int d = 0; d < n; ++d) {
                x[d] = F.origin_[d] + static_cast<double>(r % static_cast<std::size_t>(P)) * h;
                r /= static_cast<std::size_t>(P);
            }
            table[i] = medium(x);
        });
    }
    Vec xbuf(static_cast<std::size_t>(n));
    auto speed_at = [&](const std::int64_t* k) {
        if (use_table) {
            std::size_t i = 0, stride = 1;
            for (int d = 0; d < n; ++d) {
                i += static_cast<std::size_t>(k[d] % P) * stride;
                stride *= static_cast<std::size_t>(P);
            }
            return table[i];
        }
        for (int d = 0; d < n; ++d)
            xbuf[d] = F.origin_[d] + static_cast<double>(k[d]) * h;
        return medium(xbuf);
    };

    using Entry = std::pair<double, std::uint64_t>;
    std::vector<Entry> heap;
    auto push = [&](double T, const std::int64_t* k) {
        heap.emplace_back(T, pack(k, n));
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
    };
    auto offer = [&](const std::int64_t* k, double T) {
        std::size_t off;
        auto& blk = F.touch(k, off);
        if (blk.state[off] == kKnown || T >= blk.T[off])
            return;
        blk.T[off] = T;
        blk.state[off] = kTrial;
        push(T, k);
    };

    // Sources.
    std::int64_t k[3] = {0, 0, 0};
    std::int64_t lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    if (cell) {
        for (int d = 0; d < n; ++d) {
            lo[d] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((source.anchor[d] - F.origin_[d]) / h - 1e-9)));
            hi[d] = std::min<std::int64_t>(F.dims_[d] - 1,
                                           static_cast<std::int64_t>(std::floor((source.anchor[d] + 1.0 - F.origin_[d]) / h + 1e-9)));
        }
    } else {
        const auto r = static_cast<std::int64_t>(std::floor(options.init_radius_cells));
        for (int d = 0; d < n; ++d) {
            const auto c = static_cast<std::int64_t>(std::llround((source.anchor[d] - F.origin_[d]) / h));
            lo[d] = std::max<std::int64_t>(0, c - r);
            hi[d] = std::min<std::int64_t>(F.dims_[d] - 1, c + r);
        }
    }
    // Straight-segment travel time: exact along layers, an upper bound in general.
    auto segment_time = [&](const Vec& x) {
        Vec y(x.size());
        const double slowness = boost::math::quadrature::gauss<double, 10>::integrate(
            [&](double s) {
                for (std::size_t d = 0; d < y.size(); ++d)
                    y[d] = source.anchor[d] + s * (x[d] - source.anchor[d]);
                return 1.0 / medium(y);
            },
            0.0, 1.0);
        return distance(x, source.anchor) * slowness;
    };
    for (int d = 0; d < n; ++d)
        k[d] = lo[d];
    for (;;) {
        if (cell) {
            offer(k, 0.0);
        } else {
            const Vec x = F.node_position(k);
            const double r = distance(x, source.anchor);
            if (r <= options.init_radius_cells * h + 1e-12)
                offer(k, segment_time(x));
        }
        int d = 0;
        for (; d < n; ++d) {
            if (++k[d] <= hi[d])
                break;
            k[d] = lo[d];
        }
        if (d == n)
            break;
    }

    // Targets: every interpolation corner must be accepted.
    std::unordered_set<std::uint64_t> pending;
    const bool stop_on_targets = !options.targets.empty();
    for (const auto& t : options.targets) {
        if (t.size() != static_cast<std::size_t>(n))
            throw ValidationError(kModule, "target dimension mismatch");
        const Vec y = F.fold(t);
        std::int64_t base[3];
        for (int d = 0; d < n; ++d) {
            const double u = (y[d] - F.origin_[d]) / h;
            if (u < 0.0 || u > static_cast<double>(F.dims_[d] - 1))
                throw ValidationError(kModule, "target outside the grid box; raise t_max to at least the path duration");
            base[d] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(u)), 0, F.dims_[d] - 2);
        }
        for (int corner = 0; corner < (1 << n); ++corner) {
            for (int d = 0; d < n; ++d)
                k[d] = base[d] + ((corner >> d) & 1);
            pending.insert(pack(k, n));
        }
    }

    double last = 0.0;
    std::int64_t nb[3];
    double m[3];
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        const auto [T, key] = heap.back();
        heap.pop_back();
        unpack(key, n, k);
        std::size_t off;
        auto& blk = F.touch(k, off);
        if (blk.state[off] == kKnown || T != blk.T[off])
            continue;
        if (T > options.t_max) {
            last = T;
            break;
        }
        blk.state[off] = kKnown;
        ++F.accepted_;
        last = T;
        if (options.record_order)
            F.order_.push_back(T);
        for (int d = 0; d < n; ++d)
            if ((!F.mirror_[d] && k[d] == 0) || k[d] == F.dims_[d] - 1)
                throw ValidationError(kModule, "front reached the grid box at T=" + std::to_string(T) +
                                                   " < t_max; the box needs half-width above " +
                                                   std::to_string(medium.upper * options.t_max) +
                                                   " (max speed exceeded?)");
        if (stop_on_targets) {
            pending.erase(key);
            if (pending.empty())
                break;
        }

        // Update the 2n neighbours.
        for (int d = 0; d < n; ++d)
            for (int s = -1; s <= 1; s += 2) {
                std::copy(k, k + n, nb);
                nb[d] += s;
                if (nb[d] < 0) {
                    if (!F.mirror_[d])
                        continue;
                    nb[d] = 1;
                }
                if (nb[d] >= F.dims_[d])
                    continue;
                std::size_t noff;
                auto& nblk = F.touch(nb, noff);
                if (nblk.state[noff] == kKnown)
                    continue;
                int count = 0;
                for (int e = 0; e < n; ++e) {
                    double best = kUnreached;
                    std::int64_t q[3];
                    for (int t = -1; t <= 1; t += 2) {
                        std::copy(nb, nb + n, q);
                        q[e] += t;
                        if (q[e] < 0) {
                            if (!F.mirror_[e])
                                continue;
                            q[e] = 1;
                        }
                        if (q[e] >= F.dims_[e])
                            continue;
                        best = std::min(best, F.node(q));
                    }
                    if (best < kUnreached)
                        m[count++] = best;
                }
                const double Tn = eikonal_update(m, count, h / speed_at(nb));
                if (Tn < nblk.T[noff]) {
                    nblk.T[noff] = Tn;
                    nblk.state[noff] = kTrial;
                    push(Tn, nb);
                }
            }
    }
    if (stop_on_targets && !pending.empty())
        throw ValidationError(kModule, "targets not reached before t_max=" + std::to_string(options.t_max));
    F.complete_to_ = heap.empty() ? kUnreached : last;
    return F;
}

}  // namespace frontforge::front
