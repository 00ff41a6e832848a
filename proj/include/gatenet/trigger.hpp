#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gatenet/circuit.hpp"

namespace gatenet {

class TriggerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TriggerKind { Combinatorial, Sequential };

/// A trigger sub-circuit. The output node dangles (no payload is modeled);
/// trigger_inputs are the nets an embedder must drive from host logic.
struct Trigger {
  Circuit circuit;
  TriggerKind kind = TriggerKind::Combinatorial;
  std::vector<NodeId> trigger_inputs;
  NodeId trigger_output = 0;
  int size = 0;            ///< combinatorial: #inputs; sequential: #flipflops
  std::string sequence;    ///< sequential only
  std::string activation;  ///< combinatorial only: the single firing pattern,
                           ///< one char per trigger input, in input order
};

/// Grows a random AND/NOT/INPUT tree (P(AND)=0.45, P(NOT)=0.2, P(INPUT)=0.35,
/// renormalized where a production would break single-pattern firing) and
/// rejects candidates until one has exactly n_inputs INPUT leaves. Every
/// accepted tree fires on exactly one input pattern. Retries use sub-seeds
/// derived from (seed, attempt). Throws TriggerError after max_attempts
/// rejections.
Trigger gen_comb_trigger(int n_inputs, uint64_t seed, int max_attempts = 10000);

/// Builds the non-overlapping Mealy detector for a {0,1} sequence of length
/// L >= 2 as gates: ceil(log2(L)) flipflops holding the matched-prefix count
/// in natural binary, two-level AND/OR/NOT sum-of-products next-state logic,
/// and a Mealy output that pulses on the cycle the final symbol arrives.
/// Mismatches fall back to the longest matched proper prefix; a detection
/// resets the state to 0, so occurrences never share symbols. Deterministic;
/// the seed parameter is accepted for interface uniformity and unused.
Trigger gen_seq_trigger(const std::string& sequence, uint64_t seed = 0);

int trigger_size(const Trigger& t);

/// Sidecar JSON block describing the trigger; the circuit itself is stored
/// as a regular netlist next to it.
std::string serialize_trigger_sidecar(const Trigger& t);
Trigger load_trigger(const std::filesystem::path& circuit_file,
                     const std::filesystem::path& sidecar_file);
void save_trigger(const Trigger& t, const std::filesystem::path& circuit_file,
                  const std::filesystem::path& sidecar_file);

/// Simulates t's gate-level circuit on a single-bit input stream and returns
/// the 0-indexed cycles where the trigger output is 1.
std::vector<int> simulate_trigger_pulses(const Trigger& t,
                                         const std::vector<int>& stream);

/// Greedy non-overlapping substring scan; returns the 0-indexed stream
/// positions where an occurrence of seq ends. Reference semantics for the
/// sequential trigger.
std::vector<int> nonoverlapping_match_ends(const std::string& seq,
                                           const std::vector<int>& stream);

}  // namespace gatenet
