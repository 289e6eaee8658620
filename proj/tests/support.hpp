#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <memory>

#include "rdcds/scenario.hpp"

namespace support {

inline rdcds::ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const rdcds::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an rdcds::Error";
    return rdcds::ErrorCode::ConfigParse;
}

inline rdcds::SystemParams golden() { return {7, 5, 6, 2, 17}; }

inline std::shared_ptr<const rdcds::Scheme> scheme(const rdcds::SystemParams& p) {
    return std::make_shared<const rdcds::Scheme>(p);
}

/// Cluster with a random message and random noise from `seed`.
inline rdcds::ClusterState cluster(const rdcds::SystemParams& p, std::uint64_t seed) {
    auto sc = scheme(p);
    rdcds::Rng rng(seed);
    return rdcds::init_cluster(sc, rng.symbols(sc->d.L, sc->d.q), rng);
}

inline rdcds::DropoutSet D(std::vector<int> servers, int N) { return rdcds::DropoutSet(std::move(servers), N); }

} // namespace support
