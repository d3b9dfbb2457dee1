#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

// Little-endian binary artifact I/O. All artifact formats open with an
// 8-byte magic followed by a u32 version.
namespace lerg::io {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for write: " + path);
  }

  void magic(const char tag[8]) { out_.write(tag, 8); }

  template <typename T>
  void pod(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  template <typename T>
  void array(const T* p, std::size_t n) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(p),
               static_cast<std::streamsize>(n * sizeof(T)));
  }

  void bytes(const std::vector<std::uint8_t>& b) {
    array(b.data(), b.size());
  }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed on close");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open for read: " + path);
  }

  void expect_magic(const char tag[8], const std::string& what) {
    char buf[8];
    in_.read(buf, 8);
    if (!in_ || std::memcmp(buf, tag, 8) != 0)
      throw std::runtime_error("bad magic, not a " + what + " artifact");
  }

  template <typename T>
  T pod() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw std::runtime_error("truncated artifact");
    return v;
  }

  template <typename T>
  std::vector<T> array(std::size_t n) {
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()),
             static_cast<std::streamsize>(n * sizeof(T)));
    if (!in_) throw std::runtime_error("truncated artifact");
    return v;
  }

 private:
  std::ifstream in_;
};

}  // namespace lerg::io
