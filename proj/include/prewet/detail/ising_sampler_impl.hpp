#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "prewet/error.hpp"

namespace prewet {

template <class Record>
std::vector<std::vector<Record>> map_ensemble(
    const BoxGeometry& geometry, double beta, double h, const SampleSchedule& schedule,
    int replicas, std::uint64_t seed, int threads,
    const std::function<Record(int replica, long index, const SpinConfig&)>& fn) {
    if (replicas < 1) throw ValidationError("replicas must be >= 1");
    schedule.validate();
    const HeatBath kernel(beta, h);
    std::vector<std::vector<Record>> out(static_cast<std::size_t>(replicas));

    auto run_replica = [&](int r) {
        ChainState state(SpinConfig(geometry), seed,
                         static_cast<std::uint64_t>(r));
        for (long s = 0; s < schedule.burnin_sweeps; ++s) kernel.sweep(state);
        auto& bucket = out[static_cast<std::size_t>(r)];
        bucket.reserve(static_cast<std::size_t>(schedule.samples));
        for (long i = 0; i < schedule.samples; ++i) {
            for (long s = 0; s < schedule.thinning; ++s) kernel.sweep(state);
            bucket.push_back(fn(r, i, state.config));
        }
    };

    const int workers = std::clamp(threads, 1, replicas);
    if (workers == 1) {
        for (int r = 0; r < replicas; ++r) run_replica(r);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int r = next++; r < replicas; r = next++) {
                try {
                    run_replica(r);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

template <class Record>
std::vector<std::vector<Record>> map_ensemble(
    const ModelParams& params, const SampleSchedule& schedule, int replicas,
    std::uint64_t seed, int threads,
    const std::function<Record(int replica, long index, const SpinConfig&)>& fn) {
    return map_ensemble<Record>(BoxGeometry::lambda_n(params.n), params.beta, params.h(),
                                schedule, replicas, seed, threads, fn);
}

}  // namespace prewet
