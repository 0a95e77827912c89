/*!
 *  Copyright (c) 2026 by Contributors
 * \file binary_io.h
 * \brief Little helpers for the versioned binary artifacts (graph, checkpoint).
 *        Values are written in host byte order.
 */
#ifndef FSGCN_SRC_BINARY_IO_H_
#define FSGCN_SRC_BINARY_IO_H_

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsgcn::io {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  template <class T>
  void pod(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  template <class T>
  void vec(const std::vector<T>& v) {
    pod<uint64_t>(v.size());
    out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  }

  void magic(const char (&tag)[5]) { out_.write(tag, 4); }

  void str(const std::string& s) {
    pod<uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open for reading: " + path);
  }

  template <class T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }

  template <class T>
  std::vector<T> vec(uint64_t max_elems = (1ULL << 34)) {
    const auto n = pod<uint64_t>();
    if (n > max_elems) throw std::runtime_error(path_ + ": corrupt length field");
    std::vector<T> v(n);
    in_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    check();
    return v;
  }

  std::string str() {
    const auto n = pod<uint64_t>();
    if (n > (1ULL << 32)) throw std::runtime_error(path_ + ": corrupt string length");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }

  void expect_magic(const char (&magic)[5]) {
    char buf[4];
    in_.read(buf, 4);
    check();
    if (std::string(buf, 4) != std::string(magic, 4))
      throw std::runtime_error(path_ + ": bad magic, expected " + std::string(magic, 4));
  }

  const std::string& path() const { return path_; }

 private:
  void check() {
    if (!in_) throw std::runtime_error(path_ + ": truncated file");
  }

  std::ifstream in_;
  std::string path_;
};

}  // namespace fsgcn::io

#endif  // FSGCN_SRC_BINARY_IO_H_
