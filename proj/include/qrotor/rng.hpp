#pragma once

// Counter-based randomness (Philox4x32-10) plus deterministic parallel
// Monte Carlo plumbing. Every stochastic routine in the library draws
// from an explicitly seeded Philox stream, so results are reproducible
// bit-for-bit regardless of thread count: work is split into fixed-size
// chunks, chunk c of stream s uses counter (s, c, sample, block), and
// per-chunk accumulators are merged in chunk order.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace qrotor::rng {

struct Philox {
    // key = seed split into two 32-bit words
    static std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                              std::uint32_t stream,
                                              std::uint32_t chunk,
                                              std::uint32_t sample,
                                              std::uint32_t counter) {
        std::uint32_t k0 = std::uint32_t(seed);
        std::uint32_t k1 = std::uint32_t(seed >> 32);
        std::array<std::uint32_t, 4> c{counter, sample, chunk, stream};
        for (int round = 0; round < 10; ++round) {
            c = single_round(c, k0, k1);
            k0 += 0x9E3779B9u;  // Weyl constants
            k1 += 0xBB67AE85u;
        }
        return c;
    }

private:
    static std::array<std::uint32_t, 4> single_round(std::array<std::uint32_t, 4> c,
                                                     std::uint32_t k0, std::uint32_t k1) {
        std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c[0];
        std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c[2];
        return {std::uint32_t(p1 >> 32) ^ c[1] ^ k0, std::uint32_t(p1),
                std::uint32_t(p0 >> 32) ^ c[3] ^ k1, std::uint32_t(p0)};
    }
};

// Sequential stream of uniforms/normals for one (seed, stream, chunk, sample).
class Stream {
public:
    Stream(std::uint64_t seed, std::uint32_t stream, std::uint32_t chunk = 0,
           std::uint32_t sample = 0)
        : seed_(seed), stream_(stream), chunk_(chunk), sample_(sample) {}

    // uniform in (0, 1)
    double uniform() {
        return (double(next_word()) + 0.5) * 0x1p-32;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    void fill_normal(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

private:
    std::uint32_t next_word() {
        if (word_idx_ == 4) {
            buf_ = Philox::block(seed_, stream_, chunk_, sample_, counter_++);
            word_idx_ = 0;
        }
        return buf_[word_idx_++];
    }

    std::uint64_t seed_;
    std::uint32_t stream_, chunk_, sample_;
    std::uint32_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int word_idx_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Running mean/variance accumulator with exact merge.
struct Welford {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        double d = o.mean - mean;
        std::uint64_t t = n + o.n;
        mean += d * double(o.n) / double(t);
        m2 += o.m2 + d * d * double(n) * double(o.n) / double(t);
        n = t;
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double std_err() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }
};

struct Estimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t samples = 0;
};

inline constexpr std::uint64_t mc_chunk_size = 1 << 16;

// Runs `body(chunk, first_sample, count, accumulators)` over a fixed chunk
// plan, in parallel, and folds the per-chunk accumulator vectors in chunk
// order. `width` is the number of statistics tracked per chunk.
inline std::vector<Welford> parallel_chunks(
    std::uint64_t total_samples, std::size_t width,
    const std::function<void(std::uint32_t, std::uint64_t, std::vector<Welford>&)>& body) {
    std::uint64_t n_chunks = (total_samples + mc_chunk_size - 1) / mc_chunk_size;
    std::vector<std::vector<Welford>> partial(n_chunks);
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned n_threads = unsigned(std::min<std::uint64_t>(hw, n_chunks));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::uint64_t c = t; c < n_chunks; c += n_threads) {
                std::uint64_t count = std::min<std::uint64_t>(
                    mc_chunk_size, total_samples - c * mc_chunk_size);
                partial[c].assign(width, Welford{});
                body(std::uint32_t(c), count, partial[c]);
            }
        });
    }
    for (auto& th : pool) th.join();
    std::vector<Welford> out(width);
    for (auto& p : partial)
        for (std::size_t i = 0; i < width; ++i) out[i].merge(p[i]);
    return out;
}

}  // namespace qrotor::rng
