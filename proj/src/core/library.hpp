#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "builtins.hpp"
#include "program.hpp"

namespace ppg {

/// Unknown or duplicate entry name.
class LibraryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LibraryEntry {
  std::string name;
  std::string comment;
  std::vector<std::uint8_t> code;  // encoded CompiledProgram
  friend bool operator==(const LibraryEntry&, const LibraryEntry&) = default;
};

inline constexpr std::uint16_t kLibraryVersion = 1;

std::vector<std::uint8_t> encode_library(const std::vector<LibraryEntry>& entries);
/// Throws FormatError on bad magic, version, truncation or checksum mismatch.
std::vector<LibraryEntry> decode_library(const std::vector<std::uint8_t>& bytes);

/// A .ppglib file. Every change rewrites the whole file through a temporary
/// and an atomic rename, under an exclusive lock on a sidecar "<path>.lock".
class Library {
 public:
  explicit Library(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const { return path_; }

  /// Entries in insertion order; a missing file reads as IoError.
  std::vector<LibraryEntry> entries() const;
  /// The program is checked to decode under `registry` before it is stored.
  void add(const std::string& name, const std::string& comment, const CompiledProgram& cp,
           const Registry& registry = Registry::standard());
  void remove(const std::string& name);
  CompiledProgram load(const std::string& name, const Registry& registry) const;

 private:
  std::filesystem::path path_;
};

namespace testing {
/// Makes the next library write stop after `bytes` bytes of the temporary
/// file and throw IoError, leaving the temporary behind as a crash would.
void interrupt_next_library_write(std::optional<std::size_t> bytes);
}  // namespace testing

}  // namespace ppg
