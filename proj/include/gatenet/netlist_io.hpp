#pragma once

#include <filesystem>
#include <string>

#include "gatenet/circuit.hpp"

namespace gatenet {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON netlist form
///   {"name", "nodes":[{"id","type"}], "edges":[[src,dst]],
///    "inputs":[ids], "outputs":[ids]}
/// and validates the result. Edge order in the file is free; the parsed
/// circuit holds them in canonical sorted order.
Circuit parse_netlist(const std::string& json_text);

Circuit read_netlist(const std::filesystem::path& file);

/// Deterministic serialization (canonical field and edge order); feeding the
/// output back through parse_netlist reproduces the circuit exactly.
std::string serialize_netlist(const Circuit& c);

void write_netlist(const Circuit& c, const std::filesystem::path& file);

/// Writes a file atomically (temp file + rename) so failed runs never leave
/// partially written artifacts behind.
void write_file_atomic(const std::filesystem::path& file,
                       const std::string& content);

std::string read_file(const std::filesystem::path& file);

}  // namespace gatenet
