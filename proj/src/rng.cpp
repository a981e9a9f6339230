#include "thermolab/rng.hpp"

#include <cmath>

#include "thermolab/error.hpp"

namespace thermolab {

namespace {

std::seed_seq make_seed_sequence(std::uint64_t seed, std::uint64_t stream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{lo(seed), hi(seed), lo(stream), hi(stream), 0x7468726du};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {
  auto seq = make_seed_sequence(seed, stream_index);
  engine_.seed(seq);
}

double RngStream::exponential(double rate) {
  require(rate > 0.0, ErrorKind::invalid_parameter, "exponential rate must be positive");
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform()) / rate;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid dimension";
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::degenerate_state: return "degenerate state";
    case ErrorKind::index_out_of_range: return "index out of range";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::invalid_initial_condition: return "invalid initial condition";
    case ErrorKind::unsupported_model: return "unsupported model";
    case ErrorKind::step_size: return "step size";
    case ErrorKind::grid_mismatch: return "grid mismatch";
    case ErrorKind::parse_error: return "parse error";
    case ErrorKind::io_error: return "io error";
  }
  return "error";
}

}  // namespace thermolab
