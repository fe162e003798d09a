#pragma once

// Latency benchmark for the primitives and protocol steps, plus the
// communication cost of one handshake. Times are microseconds from
// std::chrono::steady_clock.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lseg {

struct BenchRow {
    std::string label;
    std::string unit = "us";
    double mean = 0;
    double median = 0;
    double p95 = 0;
    size_t n = 0;
};

/// Summary statistics over raw samples (p95 is nearest-rank).
BenchRow summarize(std::string label, std::vector<double> samples, std::string unit = "us");

struct StepRow {
    std::string label; // step1 .. step4
    BenchRow client;
    BenchRow server;
};

struct CommunicationCost {
    uint64_t phase1_payload_bits = 0;
    uint64_t phase2_payload_bits = 0;
    uint64_t phase1_wire_bits = 0;
    uint64_t phase2_wire_bits = 0;
    size_t phase2_messages = 0;       // E_1, E_2, C_1, C_2
    size_t key_exchange_messages = 0; // C_1, C_2
};

struct BenchReport {
    std::vector<BenchRow> primitives; // the seven primitive rows, fixed order
    std::vector<StepRow> steps;       // step1 .. step4
    BenchRow client_handshake;        // full first-contact handshake, client side
    CommunicationCost cost;

    const BenchRow* primitive(const std::string& label) const;
    const StepRow* step(const std::string& label) const;

    /// label,unit,mean,median,p95,n
    std::string csv() const;
    std::string table() const;
};

struct BenchOptions {
    size_t primitive_iterations = 1000;
    size_t step_iterations = 100;
    size_t warmup = 20;
    uint64_t seed = 1;
};

/// Primitive row labels in report order.
const std::vector<std::string>& primitive_labels();

BenchReport run_bench(const BenchOptions& options = {});

} // namespace lseg
