#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "saps/numeric.hpp"

namespace saps {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simple Eratosthenes up to limit inclusive.
inline std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    std::vector<bool> comp(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
    }
    return out;
}

inline const std::vector<std::uint64_t>& base_primes(std::uint64_t limit) {
    static std::mutex mtx;
    static std::vector<std::uint64_t> primes;
    static std::uint64_t have = 0;
    std::lock_guard<std::mutex> lock(mtx);
    if (limit > have) {
        std::uint64_t want = std::max<std::uint64_t>(limit + limit / 4, 1 << 16);
        primes = small_primes(want);
        have = want;
    }
    return primes;
}

// Arithmetic tables over the half-open integer window [lo, hi).
//   lambda[n-lo] = log p when n = p^k, else 0
//   mu[n-lo]     in {-1,0,+1}
// Invariant: is_prime(n) implies lambda(n) == log n.
struct SieveSegment {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::vector<std::uint64_t> prime_bits;
    std::vector<double> lambda;
    std::vector<std::int8_t> mu;

    std::size_t size() const { return static_cast<std::size_t>(hi - lo); }
    bool contains(std::uint64_t n) const { return n >= lo && n < hi; }

    bool is_prime(std::uint64_t n) const {
        std::size_t i = static_cast<std::size_t>(n - lo);
        return (prime_bits[i >> 6] >> (i & 63)) & 1;
    }
    double lambda_at(std::uint64_t n) const { return lambda[n - lo]; }
    int mu_at(std::uint64_t n) const { return mu[n - lo]; }
};

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 22;

inline SieveSegment build_segment(std::uint64_t lo, std::uint64_t hi,
                                  std::uint64_t max_size = kDefaultSegmentSize) {
    if (lo < 2) throw std::invalid_argument("build_segment: lo must be >= 2");
    if (lo >= hi) throw std::invalid_argument("build_segment: need lo < hi");
    if (hi - lo > max_size)
        throw std::invalid_argument("build_segment: window exceeds segment size cap");

    SieveSegment seg;
    seg.lo = lo;
    seg.hi = hi;
    std::size_t n = seg.size();
    seg.prime_bits.assign((n + 63) / 64, ~std::uint64_t{0});
    seg.lambda.assign(n, 0.0);
    seg.mu.assign(n, 1);

    std::uint64_t root = isqrt_u64(hi - 1);
    const auto& primes = base_primes(root);

    std::vector<std::uint64_t> rem(n);
    for (std::size_t i = 0; i < n; ++i) rem[i] = lo + i;

    auto clear_prime = [&](std::size_t i) {
        seg.prime_bits[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    };

    for (std::uint64_t p : primes) {
        if (p > root) break;
        std::uint64_t start = ((lo + p - 1) / p) * p;
        if (start == p) start = 2 * p;  // p itself stays prime
        for (std::uint64_t m = start; m < hi; m += p) {
            std::size_t i = static_cast<std::size_t>(m - lo);
            clear_prime(i);
            seg.mu[i] = static_cast<std::int8_t>(-seg.mu[i]);
            rem[i] /= p;
        }
        std::uint64_t p2 = p * p;
        if (p2 < hi) {
            std::uint64_t s2 = ((lo + p2 - 1) / p2) * p2;
            for (std::uint64_t m = s2; m < hi; m += p2) seg.mu[m - lo] = 0;
        }
    }
    // leftover factor > sqrt(hi)
    for (std::size_t i = 0; i < n; ++i) {
        if (rem[i] > 1) seg.mu[i] = static_cast<std::int8_t>(-seg.mu[i]);
    }
    if (n % 64) seg.prime_bits.back() &= (std::uint64_t{1} << (n % 64)) - 1;

    // lambda: primes in the window, then proper powers p^k by direct
    // enumeration (no log-rounding classification).
    for (std::size_t i = 0; i < n; ++i) {
        if (seg.is_prime(lo + i))
            seg.lambda[i] = std::log(static_cast<double>(lo + i));
    }
    for (std::uint64_t p : primes) {
        if (p > root) break;
        double logp = std::log(static_cast<double>(p));
        std::uint64_t pk = p;
        while (pk <= (hi - 1) / p) {
            pk *= p;
            if (pk >= lo) seg.lambda[pk - lo] = logp;
        }
    }
    return seg;
}

// --- binary cache format ------------------------------------------------
// "SAPS" | u32 version | u64 lo | u64 hi | prime bits (ceil(n/8) bytes,
// LSB-first) | lambda as raw little-endian f64 | mu as i8.

inline constexpr std::uint32_t kSegmentFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "segment cache assumes a little-endian host");

inline void write_segment(const SieveSegment& seg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open segment file for writing: " + path.string());
    out.write("SAPS", 4);
    std::uint32_t ver = kSegmentFormatVersion;
    out.write(reinterpret_cast<const char*>(&ver), 4);
    out.write(reinterpret_cast<const char*>(&seg.lo), 8);
    out.write(reinterpret_cast<const char*>(&seg.hi), 8);
    std::size_t n = seg.size();
    std::vector<std::uint8_t> bytes((n + 7) / 8, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if ((seg.prime_bits[i >> 6] >> (i & 63)) & 1)
            bytes[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.write(reinterpret_cast<const char*>(seg.lambda.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    out.write(reinterpret_cast<const char*>(seg.mu.data()),
              static_cast<std::streamsize>(n));
    if (!out) throw DataError("short write on segment file: " + path.string());
}

inline SieveSegment read_segment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open segment file: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SAPS", 4) != 0)
        throw DataError("bad segment magic in " + path.string());
    std::uint32_t ver = 0;
    in.read(reinterpret_cast<char*>(&ver), 4);
    if (ver != kSegmentFormatVersion)
        throw DataError("unsupported segment format version in " + path.string());
    SieveSegment seg;
    in.read(reinterpret_cast<char*>(&seg.lo), 8);
    in.read(reinterpret_cast<char*>(&seg.hi), 8);
    if (!in || seg.lo >= seg.hi) throw DataError("bad segment header in " + path.string());
    std::size_t n = static_cast<std::size_t>(seg.hi - seg.lo);
    std::vector<std::uint8_t> bytes((n + 7) / 8);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    seg.prime_bits.assign((n + 63) / 64, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if ((bytes[i >> 3] >> (i & 7)) & 1)
            seg.prime_bits[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    seg.lambda.resize(n);
    in.read(reinterpret_cast<char*>(seg.lambda.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    seg.mu.resize(n);
    in.read(reinterpret_cast<char*>(seg.mu.data()), static_cast<std::streamsize>(n));
    if (!in) throw DataError("truncated segment file: " + path.string());
    return seg;
}

// Walks windows through aligned segments.  Segments are immutable once
// built; the in-memory map and the optional on-disk cache serialize their
// writes per key.
class SieveContext {
  public:
    explicit SieveContext(std::uint64_t segment_size = kDefaultSegmentSize,
                          std::optional<std::filesystem::path> cache_dir = std::nullopt)
        : segment_size_(segment_size), cache_dir_(std::move(cache_dir)) {
        if (segment_size_ < 16) throw std::invalid_argument("segment size too small");
        if (cache_dir_) std::filesystem::create_directories(*cache_dir_);
    }

    const SieveSegment& segment_for(std::uint64_t n) {
        std::uint64_t base = std::max<std::uint64_t>(2, n - (n % segment_size_));
        return segment_keyed(base, std::min(base - (base % segment_size_) + segment_size_,
                                            base + segment_size_));
    }

    // f(segment, n) for every integer n in (y, y+h]
    template <typename F>
    void for_window(double y, double h, F&& f) {
        IntWindow w = window_integers(y, h);
        if (w.empty()) return;
        std::uint64_t n = std::max<std::uint64_t>(w.first, 2);
        while (n <= w.last) {
            const SieveSegment& seg = segment_for(n);
            std::uint64_t stop = std::min<std::uint64_t>(w.last, seg.hi - 1);
            for (std::uint64_t m = n; m <= stop; ++m) f(seg, m);
            n = stop + 1;
        }
    }

    // sum of Lambda(n) over y < n <= y+h, n == a (mod q)
    double psi_short(double y, double h, std::uint64_t q, std::uint64_t a) {
        check_progression(y, h, q, a);
        CompensatedSum s;
        for_window(y, h, [&](const SieveSegment& seg, std::uint64_t n) {
            if (n % q == a) {
                double l = seg.lambda_at(n);
                if (l > 0) s.add(l);
            }
        });
        return s.value();
    }

    // sum of log p over primes p with y < p <= y+h, p == a (mod q)
    double theta_short(double y, double h, std::uint64_t q, std::uint64_t a) {
        check_progression(y, h, q, a);
        CompensatedSum s;
        for_window(y, h, [&](const SieveSegment& seg, std::uint64_t n) {
            if (n % q == a && seg.is_prime(n))
                s.add(std::log(static_cast<double>(n)));
        });
        return s.value();
    }

    std::uint64_t segment_size() const { return segment_size_; }

  private:
    static void check_progression(double y, double h, std::uint64_t q, std::uint64_t a) {
        if (y < 0) throw std::invalid_argument("window start must be >= 0");
        if (h <= 0) throw std::invalid_argument("window length must be > 0");
        if (q < 1) throw std::invalid_argument("modulus must be >= 1");
        if (a >= q) throw std::invalid_argument("residue must satisfy 0 <= a < q");
    }

    const SieveSegment& segment_keyed(std::uint64_t lo, std::uint64_t hi) {
        std::unique_lock<std::mutex> lock(mtx_);
        auto key = std::make_pair(lo, hi);
        auto it = segments_.find(key);
        if (it != segments_.end()) return *it->second;
        lock.unlock();

        std::shared_ptr<SieveSegment> seg;
        if (cache_dir_) {
            auto path = *cache_dir_ / ("seg_" + std::to_string(lo) + "_" +
                                       std::to_string(hi) + ".saps");
            if (std::filesystem::exists(path)) {
                seg = std::make_shared<SieveSegment>(read_segment(path));
                if (seg->lo != lo || seg->hi != hi)
                    throw DataError("segment cache key mismatch: " + path.string());
            } else {
                seg = std::make_shared<SieveSegment>(build_segment(lo, hi, segment_size_));
                static std::atomic<std::uint64_t> tmp_counter{0};
                auto tmp = path;
                tmp += ".tmp" + std::to_string(tmp_counter.fetch_add(1));
                write_segment(*seg, tmp);
                std::filesystem::rename(tmp, path);  // atomic publish per key
            }
        } else {
            seg = std::make_shared<SieveSegment>(build_segment(lo, hi, segment_size_));
        }

        lock.lock();
        auto [pos, inserted] = segments_.emplace(key, std::move(seg));
        return *pos->second;
    }

    std::uint64_t segment_size_;
    std::optional<std::filesystem::path> cache_dir_;
    std::mutex mtx_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<SieveSegment>> segments_;
};

// --- multiplicative helpers ----------------------------------------------

inline std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    if (n < 2) return f;
    const auto& primes = base_primes(isqrt_u64(n));
    for (std::uint64_t p : primes) {
        if (p * p > n) break;
        if (n % p == 0) {
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            f.emplace_back(p, e);
        }
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
    std::uint64_t r = n;
    for (auto [p, e] : factorize(n)) r -= r / p;
    return n == 0 ? 0 : (n == 1 ? 1 : r);
}

inline unsigned omega(std::uint64_t n) {
    return static_cast<unsigned>(factorize(n).size());
}

// number of ordered m-tuples of positive integers with product n
inline std::uint64_t tau_m(unsigned m, std::uint64_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("tau_m: need m >= 1, n >= 1");
    std::uint64_t r = 1;
    for (auto [p, e] : factorize(n)) r *= binomial_u64(e + m - 1, m - 1);
    return r;
}

// true iff no prime p < z divides n
inline bool rough_indicator(std::uint64_t n, double z) {
    if (n < 1 || z < 2) throw std::invalid_argument("rough_indicator: need n >= 1, z >= 2");
    if (n == 1) return true;
    const auto& primes = base_primes(isqrt_u64(n));
    for (std::uint64_t p : primes) {
        if (static_cast<double>(p) >= z) return true;
        if (p * p > n) break;
        if (n % p == 0) return false;
    }
    // n is prime here (no factor <= sqrt(n))
    return !(static_cast<double>(n) < z);
}

}  // namespace saps
