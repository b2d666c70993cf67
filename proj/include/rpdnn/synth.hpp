// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded synthetic threads for desk-scale checks. Each corpus plants the
// rumor signal in one named stream only.

#include <cstdint>
#include <string_view>
#include <vector>

#include "rpdnn/ingest.hpp"

namespace rpdnn {

enum class Signal {
  cc,     // rumor replies draw from their own token vocabulary
  cm,     // question marks, low-reputation authors, fast replies
  sc,     // marker tokens in the source text
  mixed,  // all of the above
};

std::string_view signal_name(Signal s);
Signal parse_signal(std::string_view name);

struct SynthOptions {
  std::size_t n_events = 4;
  std::size_t min_replies = 6;
  std::size_t max_replies = 20;
};

/// n threads alternating rumor/non-rumor (rumor first), events assigned
/// round-robin per label pair. Every thread passes the default candidate
/// filter. Unless the signal is cc or mixed, the preprocessed reply tokens
/// do not depend on the labels.
std::vector<Thread> synth_corpus(std::size_t n, Signal signal, std::uint64_t seed,
                                 const SynthOptions& opts = {});

}  // namespace rpdnn
