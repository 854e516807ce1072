// Times the OpenMP sampling kernel against the serial reference and checks
// their tables match bit for bit.
//
//   bellwright-bench [trials] [substreams]

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "bellwright/models.hpp"
#include "bellwright/scan.hpp"
#include "bellwright/simulate.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000000;
  std::uint32_t substreams =
      argc > 2 ? static_cast<std::uint32_t>(std::strtoul(argv[2], nullptr, 10)) : 8;

  auto model = bellwright::models::uniform_model();
  bellwright::simulate::RunConfig cfg{trials, 20240601, substreams, false};

  std::cout << "threads: " << bellwright::simulate::effective_threads()
            << ", trials: " << trials << ", substreams: " << substreams << "\n";

  auto t0 = Clock::now();
  auto serial = bellwright::simulate::run_reference(model, cfg);
  double serial_ms = ms_since(t0);
  std::cout << "serial reference: " << serial_ms << " ms ("
            << static_cast<double>(trials) / serial_ms / 1000.0 << " Mtrials/s)\n";

  auto t1 = Clock::now();
  auto parallel = bellwright::simulate::run(model, cfg);
  double parallel_ms = ms_since(t1);
  std::cout << "parallel kernel:  " << parallel_ms << " ms ("
            << static_cast<double>(trials) / parallel_ms / 1000.0 << " Mtrials/s, "
            << serial_ms / parallel_ms << "x)\n";

  if (parallel.pair_outcome != serial.pair_outcome ||
      parallel.cause_pair != serial.cause_pair) {
    std::cerr << "MISMATCH: parallel table differs from the serial reference\n";
    return 1;
  }
  std::cout << "tables identical\n";

  auto t2 = Clock::now();
  auto curve = bellwright::wigner_scan(0.1, 179.9, 0.01);
  double scan_ms = ms_since(t2);
  std::cout << "scan (" << curve.rows.size() << " rows): " << scan_ms << " ms, min slack "
            << curve.rows[curve.argmin].slack << " at "
            << curve.rows[curve.argmin].theta_deg << " deg\n";
  return 0;
}
