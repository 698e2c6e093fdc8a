// Copyright (c) 2026 The saltv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Host microbenchmarks for the crypto primitives and the benchmark-weighted
// cost model. Simulated verification cost is modeled (measured primitive
// costs times operation counts), never wall-clocked inside the event loop,
// so reports stay deterministic for a fixed cost table.

#ifndef SALTV_BENCH_HPP
#define SALTV_BENCH_HPP

#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "saltv/verifier.hpp"

namespace saltv::bench {

struct OpCost {
    double median_us = 0;
    double p95_us = 0;
};

struct BenchTable {
    // keys: sign, verify, gmac, sha256, hkdf, bloom_query_1k, bloom_query_1m
    std::map<std::string, OpCost> ops;
    std::string source;  // "measured" or "builtin_reference"

    const OpCost& at(const std::string& name) const;
};

// Fixed reference costs used when no measured table is supplied; keeps
// reports reproducible across runs on any host.
BenchTable builtin_reference();

// Runs >= `iterations` of each primitive; median and p95 per operation.
BenchTable measure(uint64_t iterations = 10'000);

// Benchmark-weighted average verification cost per message, in ms.
// Throws std::invalid_argument when an op is missing from the table.
double modeled_cost_ms(const verifier::OpCounts& counts, const BenchTable& table,
                       uint64_t messages);

nlohmann::ordered_json to_json(const BenchTable& table);
std::optional<BenchTable> table_from_json(const nlohmann::json& j);

}  // namespace saltv::bench

#endif  // SALTV_BENCH_HPP
