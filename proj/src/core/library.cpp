#include "library.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>

#include "builtins.hpp"
#include "errors.hpp"

namespace ppg {

namespace {

std::mutex fault_mutex;
std::optional<std::size_t> pending_fault;

std::optional<std::size_t> take_fault() {
  std::lock_guard lock(fault_mutex);
  auto f = pending_fault;
  pending_fault.reset();
  return f;
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& bytes) {
  return static_cast<std::uint32_t>(
      crc32(crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

void put_str(std::vector<std::uint8_t>& out, const std::string& s, const char* what) {
  if (s.size() > 0xFFFF) throw LibraryError(std::string(what) + " longer than 65535 bytes");
  put16(out, static_cast<std::uint16_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

struct Cursor {
  const std::vector<std::uint8_t>& b;
  std::size_t i = 0;

  void need(std::size_t n) const {
    if (b.size() - i < n) throw FormatError("library: unexpected end of data at byte " + std::to_string(i));
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(b[i] | (b[i + 1] << 8));
    i += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t lo = u16();
    return lo | (static_cast<std::uint32_t>(u16()) << 16);
  }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> v(b.begin() + static_cast<std::ptrdiff_t>(i), b.begin() + static_cast<std::ptrdiff_t>(i + n));
    i += n;
    return v;
  }
  std::string str() {
    auto v = bytes(u16());
    return {v.begin(), v.end()};
  }
};

std::string sys_error(const std::string& what, const std::filesystem::path& p) {
  return what + " '" + p.string() + "': " + std::strerror(errno);
}

/// flock on "<path>.lock"; shared for readers, exclusive for writers.
class FileLock {
 public:
  FileLock(const std::filesystem::path& lib, bool exclusive) {
    auto lock_path = lib;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError(sys_error("cannot open lock file", lock_path));
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw IoError(sys_error("cannot lock", lock_path));
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open library '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(int fd, const std::uint8_t* data, std::size_t n, const std::filesystem::path& p) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError(sys_error("cannot write", p));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

/// Writes `bytes` to a temporary next to `p`, syncs it and renames it over `p`.
void atomic_write(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  auto tmp = p;
  tmp += ".tmp." + std::to_string(::getpid());
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(sys_error("cannot create", tmp));
  if (auto fault = take_fault()) {
    write_all(fd, bytes.data(), std::min(*fault, bytes.size()), tmp);
    ::close(fd);
    throw IoError("simulated crash while writing '" + tmp.string() + "'");
  }
  try {
    write_all(fd, bytes.data(), bytes.size(), tmp);
    if (::fsync(fd) != 0) throw IoError(sys_error("cannot sync", tmp));
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), p.c_str()) != 0) {
    auto err = sys_error("cannot replace", p);
    ::unlink(tmp.c_str());
    throw IoError(err);
  }
  auto dir = p.parent_path().empty() ? std::filesystem::path(".") : p.parent_path();
  int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

std::vector<LibraryEntry> read_entries(const std::filesystem::path& p) { return decode_library(read_file(p)); }

}  // namespace

std::vector<std::uint8_t> encode_library(const std::vector<LibraryEntry>& entries) {
  std::vector<std::uint8_t> out = {'P', 'P', 'G', 'L'};
  put16(out, kLibraryVersion);
  put32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_str(out, e.name, "entry name");
    put_str(out, e.comment, "comment");
    put32(out, static_cast<std::uint32_t>(e.code.size()));
    out.insert(out.end(), e.code.begin(), e.code.end());
    put32(out, crc_of(e.code));
  }
  return out;
}

std::vector<LibraryEntry> decode_library(const std::vector<std::uint8_t>& bytes) {
  Cursor c{bytes};
  c.need(4);
  if (std::memcmp(bytes.data(), "PPGL", 4) != 0) throw FormatError("bad magic: not a program library");
  c.i = 4;
  std::uint16_t version = c.u16();
  if (version != kLibraryVersion) throw FormatError("unsupported library version " + std::to_string(version));
  std::uint32_t n = c.u32();
  std::vector<LibraryEntry> entries;
  for (std::uint32_t k = 0; k < n; ++k) {
    LibraryEntry e;
    e.name = c.str();
    e.comment = c.str();
    e.code = c.bytes(c.u32());
    if (c.u32() != crc_of(e.code)) throw FormatError("library entry '" + e.name + "': checksum mismatch");
    entries.push_back(std::move(e));
  }
  if (c.i != bytes.size()) throw FormatError("library: trailing data after the last entry");
  return entries;
}

std::vector<LibraryEntry> Library::entries() const {
  FileLock lock(path_, false);
  return read_entries(path_);
}

void Library::add(const std::string& name, const std::string& comment, const CompiledProgram& cp,
                  const Registry& registry) {
  auto code = encode(cp);
  if (decode(code, registry) != cp) throw FormatError("program does not survive encoding");
  FileLock lock(path_, true);
  std::vector<LibraryEntry> entries;
  if (std::filesystem::exists(path_)) entries = read_entries(path_);
  for (const auto& e : entries) {
    if (e.name == name) throw LibraryError("entry '" + name + "' already exists in " + path_.string());
  }
  entries.push_back({name, comment, std::move(code)});
  atomic_write(path_, encode_library(entries));
}

void Library::remove(const std::string& name) {
  FileLock lock(path_, true);
  auto entries = read_entries(path_);
  auto it = std::find_if(entries.begin(), entries.end(), [&](const LibraryEntry& e) { return e.name == name; });
  if (it == entries.end()) throw LibraryError("no entry '" + name + "' in " + path_.string());
  entries.erase(it);
  atomic_write(path_, encode_library(entries));
}

CompiledProgram Library::load(const std::string& name, const Registry& registry) const {
  for (auto& e : entries()) {
    if (e.name == name) return decode(e.code, registry);
  }
  throw LibraryError("no entry '" + name + "' in " + path_.string());
}

namespace testing {
void interrupt_next_library_write(std::optional<std::size_t> bytes) {
  std::lock_guard lock(fault_mutex);
  pending_fault = bytes;
}
}  // namespace testing

}  // namespace ppg
