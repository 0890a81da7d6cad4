#pragma once

// Straight-line serial Subset Simulation used as a test oracle. It shares
// only the random stream and the model with the library and consumes draws
// in the same order, so results must agree bit for bit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "subsim/model.hpp"
#include "subsim/random_stream.hpp"

namespace testing {

struct ReferenceResult {
    double p_hat = 0.0;
    std::size_t levels = 0;
    std::vector<double> thresholds;
    std::vector<std::vector<double>> responses;  // per level, pooled order
    std::uint64_t total_samples = 0;
};

inline ReferenceResult reference_subset_simulation(const subsim::FailureSpec& spec, double p, std::size_t n,
                                                   double sigma, std::uint64_t seed) {
    using subsim::Sample;
    const std::size_t d = spec.model.dim();
    const auto np = static_cast<std::size_t>(std::llround(static_cast<double>(n) * p));
    subsim::RandomStream stream(seed);

    std::vector<Sample> level(n);
    for (auto& s : level) {
        s.point.resize(d);
        for (auto& v : s.point) v = stream.next_normal();
        s.response = spec.model.evaluate(s.point);
    }

    ReferenceResult out;
    out.total_samples = n;
    double product = 1.0;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0;; ++l) {
        std::vector<double> ys;
        for (const auto& s : level) ys.push_back(s.response);
        out.responses.push_back(ys);
        const auto failures = static_cast<std::size_t>(std::count_if(ys.begin(), ys.end(), [&](double y) {
            return y > spec.critical_threshold;
        }));
        if (failures >= np) {
            out.levels = l;
            out.p_hat = product * (static_cast<double>(failures) * (1.0 / static_cast<double>(n)));
            return out;
        }

        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return ys[a] > ys[b]; });
        const double hi = ys[idx[np - 1]];
        const double lo = ys[idx[np]];
        double threshold = 0.5 * (hi + lo);
        std::size_t seeds = 0;
        for (double y : ys) seeds += y > threshold ? 1 : 0;
        if (hi == lo) {
            bool same = true;
            for (auto i : idx) {
                if (ys[i] == hi && level[i].point != level[idx[np - 1]].point) same = false;
            }
            const double below = std::nextafter(threshold, -std::numeric_limits<double>::infinity());
            if (same && below > prev) {
                threshold = below;
                seeds = np;
            }
        }
        prev = threshold;
        out.thresholds.push_back(threshold);

        std::vector<Sample> next;
        for (std::size_t c = 0; c < seeds; ++c) {
            const std::size_t length = n / seeds + (c < n % seeds ? 1 : 0);
            auto rng = stream.derive({l + 1, c});
            Sample cur = level[idx[c]];
            next.push_back(cur);
            for (std::size_t j = 1; j < length; ++j) {
                Sample cand = cur;
                bool moved = false;
                for (std::size_t k = 0; k < d; ++k) {
                    const double x = cur.point[k];
                    const double eta = x + sigma * rng.next_normal();
                    const double log_r = 0.5 * (x * x - eta * eta);
                    const bool take = log_r >= 0.0 || rng.next_unit() < std::exp(log_r);
                    if (take && eta != x) {
                        cand.point[k] = eta;
                        moved = true;
                    }
                }
                if (moved) {
                    cand.response = spec.model.evaluate(cand.point);
                    if (cand.response > threshold) cur = cand;
                }
                next.push_back(cur);
            }
        }
        product *= static_cast<double>(seeds) * (1.0 / static_cast<double>(n));
        out.total_samples += n - seeds;
        level = std::move(next);
    }
}

}  // namespace testing
