#pragma once

// Experiment plumbing: a counter-based splittable RNG, an ordered parallel
// map whose output is independent of the worker count, deterministic number
// formatting, and an append-only CSV/JSON record store.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace klab {

inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Splittable stream keyed by (seed, task id): draws depend only on the key
/// and the draw index, never on thread scheduling.
class TaskRng {
  public:
    TaskRng(uint64_t seed, uint64_t task_id) {
        state_ = seed ^ (task_id * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
        (void)splitmix64(state_);  // decorrelate adjacent task ids
    }

    uint64_t next() { return splitmix64(state_); }

    /// Uniform in [0, n), rejection-sampled so it is exactly uniform.
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::domain_error("TaskRng::below(0)");
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % n;
    }

  private:
    uint64_t state_;
};

/// Worker count resolution: explicit request wins, then the KLAB_WORKERS
/// environment variable, then hardware concurrency.
inline unsigned effective_workers(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("KLAB_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Applies fn(i) for i in [0, n) on a small pool and keeps results in index
/// order.  fn must be pure; the output is byte-identical for any worker count.
template <class Result, class Fn>
std::vector<Result> parallel_map(size_t n, unsigned workers, Fn&& fn) {
    std::vector<Result> results(n);
    workers = std::max(1u, workers);
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    results[i] = fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
    return results;
}

/// Canonical number formatting used for every record we persist, so that
/// identical values always serialize to identical bytes.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string format_u64(uint64_t v) { return std::to_string(v); }
inline std::string format_i64(int64_t v) { return std::to_string(v); }

inline std::string hex_u64(uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Append-only CSV record log.  A header (with a schema tag) is written only
/// when the file starts empty; rows are never rewritten.
class ResultStore {
  public:
    ResultStore(const std::string& path, const std::vector<std::string>& columns,
                const std::string& schema_version)
        : columns_(columns) {
        bool fresh = true;
        {
            std::ifstream probe(path, std::ios::binary | std::ios::ate);
            fresh = !probe.good() || probe.tellg() == std::streampos(0);
        }
        out_.open(path, std::ios::app);
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        if (fresh) {
            out_ << "# schema=" << schema_version << "\n";
            write_row(columns_);
        }
    }

    void write_row(const std::vector<std::string>& fields) {
        if (fields.size() != columns_.size())
            throw std::invalid_argument("row width does not match the schema");
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void flush() { out_.flush(); }

  private:
    std::vector<std::string> columns_;
    std::ofstream out_;
};

}  // namespace klab
