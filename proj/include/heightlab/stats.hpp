#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace heightlab {

using Rng = std::mt19937_64;

/// Neumaier's variant of Kahan summation; robust when terms span many
/// orders of magnitude (partition functions mixing e^0 and e^-300).
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic stream seed from a master seed and any number of labels.
template <typename... Labels>
std::uint64_t derive_seed(std::uint64_t master, Labels... labels) {
    std::uint64_t h = splitmix64(master);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(labels))), ...);
    return h;
}

struct SeriesSummary {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
    double stderr_variance = 0.0;
    std::size_t n_samples = 0;
};

/// Mean and variance of a series with batch-means standard errors. Both
/// the mean and the second central moment are batched against the global
/// mean; trailing samples that do not fill a batch are dropped from the
/// error estimate only.
inline SeriesSummary batch_means(std::span<const double> series, std::size_t n_batches = 30) {
    SeriesSummary out;
    out.n_samples = series.size();
    if (series.empty()) return out;
    CompensatedSum s;
    for (double x : series) s += x;
    out.mean = s.value() / static_cast<double>(series.size());
    CompensatedSum ss;
    for (double x : series) ss += (x - out.mean) * (x - out.mean);
    out.variance = ss.value() / static_cast<double>(series.size());

    const std::size_t batch = series.size() / n_batches;
    if (batch == 0 || n_batches < 2) return out;
    std::vector<double> bm(n_batches), bv(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        CompensatedSum m, v;
        for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) {
            m += series[i];
            v += (series[i] - out.mean) * (series[i] - out.mean);
        }
        bm[b] = m.value() / static_cast<double>(batch);
        bv[b] = v.value() / static_cast<double>(batch);
    }
    auto stderr_of = [n_batches](const std::vector<double>& xs) {
        double mu = 0.0;
        for (double x : xs) mu += x;
        mu /= static_cast<double>(n_batches);
        double acc = 0.0;
        for (double x : xs) acc += (x - mu) * (x - mu);
        return std::sqrt(acc / static_cast<double>(n_batches - 1) / static_cast<double>(n_batches));
    };
    out.stderr_mean = stderr_of(bm);
    out.stderr_variance = stderr_of(bv);
    return out;
}

/// Total-variation distance between two distributions on the integers.
inline double total_variation(const std::map<int, double>& p, const std::map<int, double>& q) {
    double acc = 0.0;
    for (const auto& [k, v] : p) {
        auto it = q.find(k);
        acc += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : q)
        if (!p.contains(k)) acc += std::abs(v);
    return 0.5 * acc;
}

inline std::map<int, double> empirical_distribution(std::span<const int> samples) {
    std::map<int, double> out;
    for (int s : samples) out[s] += 1.0;
    for (auto& [k, v] : out) v /= static_cast<double>(samples.size());
    return out;
}

} // namespace heightlab
